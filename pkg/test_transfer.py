"""
Tests for transfer systems and their builders
"""

import numpy as np
import pytest

from conftest import random_artin_system
from services.monoid_service import SimpleGraph, WeightMap, normalize
from services.transfer_service import (
    SWAP, Fp_matrix, KGraphModel, LocalMapModel, TraceVec, TransferSystem, apply_Fp,
    bernoulli_pair, clique_operator, ensure_valid, example_optimal, from_kgraph,
    from_local_maps, kgraph_path_counts, optimal_admissible_radius, system_summary,
    trivial_system, validate,
)
from utils.errors import CommutationError, InvalidInputError


class TestTraceVec:
    def test_mass_and_normalization(self):
        tau = TraceVec.of([1.0, 3.0])
        assert tau.mass == 4.0
        assert tau.normalized().entries == (0.25, 0.75)

    def test_negative_entries_rejected(self):
        with pytest.raises(InvalidInputError):
            TraceVec.of([0.5, -0.1])

    def test_tiny_negative_rounding_accepted(self):
        assert TraceVec.of([1.0, -1e-15]).dim == 2

    def test_signed_vectors_allowed_when_requested(self):
        assert TraceVec.of([1.0, -2.0], positive=False).mass == -1.0

    def test_zero_mass_cannot_be_normalized(self):
        with pytest.raises(InvalidInputError):
            TraceVec.zeros(2).normalized()


class TestTransferSystem:
    def test_shape_checks(self):
        graph = SimpleGraph.complete(["a", "b"])
        with pytest.raises(InvalidInputError):
            TransferSystem.build(graph, [np.eye(2)], WeightMap((2.0, 2.0)))
        with pytest.raises(InvalidInputError):
            TransferSystem.build(graph, [np.eye(2), np.eye(3)], WeightMap((2.0, 2.0)))
        with pytest.raises(InvalidInputError):
            TransferSystem.build(graph, [np.eye(2), -np.eye(2)], WeightMap((2.0, 2.0)))

    def test_matrices_are_read_only(self, abelian_pair):
        with pytest.raises(ValueError):
            abelian_pair.F(0)[0, 0] = 5

    def test_exact_systems(self, abelian_pair):
        assert abelian_pair.exact
        graph = SimpleGraph.complete(["a"])
        assert not TransferSystem.build(graph, [np.array([[0.5]])], WeightMap((2.0,))).exact

    def test_commutation_checked_only_on_edges(self):
        A = np.array([[0, 1], [0, 0]])
        B = np.array([[0, 0], [1, 0]])
        free = SimpleGraph.edgeless(["a", "b"])
        assert validate(TransferSystem.build(free, [A, B], WeightMap((2.0, 2.0)))).ok

        complete = SimpleGraph.complete(["a", "b"])
        system = TransferSystem.build(complete, [A, B], WeightMap((2.0, 2.0)))
        diagnostics = validate(system)
        assert not diagnostics.ok
        assert diagnostics.commutators["a-b"] == 1.0
        with pytest.raises(CommutationError) as info:
            ensure_valid(system)
        assert info.value.edge == ("a", "b")

    def test_ensure_valid_raises_first_reported_issue(self):
        A = np.array([[0, 1], [0, 0]])
        B = np.array([[0, 0], [1, 0]])
        graph = SimpleGraph.complete(["a", "b", "c"])
        system = TransferSystem.build(graph, [np.eye(2, dtype=int), A, B], WeightMap((2.0, 2.0, 2.0)))
        diagnostics = validate(system)
        assert [issue.edge for issue in diagnostics.issues] == [("b", "c")]
        assert diagnostics.commutators == {"a-b": 0.0, "a-c": 0.0, "b-c": 1.0}
        assert diagnostics.messages == ["edge b-c: commutator entry (0, 0) = 1.000e+00"]
        with pytest.raises(CommutationError) as info:
            ensure_valid(system)
        assert info.value.edge == ("b", "c")
        assert info.value.entry == (0, 0)

    def test_real_matrices_compared_with_tolerance(self):
        graph = SimpleGraph.complete(["a", "b"])
        A = np.array([[0.1, 0.2], [0.3, 0.4]])
        system = TransferSystem.build(graph, [A, A + 1e-12 * np.eye(2)], WeightMap((2.0, 2.0)))
        assert validate(system).ok


class TestOperators:
    def test_Fp_follows_normal_form(self):
        graph = SimpleGraph.edgeless(["a", "b"])
        A = np.array([[1, 1], [0, 1]])
        B = np.array([[1, 0], [1, 1]])
        system = TransferSystem.build(graph, [A, B], WeightMap((2.0, 2.0)))
        p = normalize("ab", graph)
        assert np.array_equal(Fp_matrix(system, p), A @ B)
        tau = TraceVec.of([1.0, 2.0])
        assert apply_Fp(system, p, tau).entries == tuple(float(x) for x in A @ B @ tau.array)

    def test_apply_Fp_ignores_the_choice_of_word(self, rng):
        checked = 0
        while checked < 100:
            system = random_artin_system(rng, max_generators=4)
            graph = system.graph
            tau = TraceVec.of(rng.uniform(0.1, 1.0, size=system.dim))
            for _ in range(5):
                word = [int(s) for s in rng.integers(0, graph.size, size=int(rng.integers(2, 9)))]
                shuffled = list(word)
                for _ in range(20):
                    i = int(rng.integers(0, len(shuffled) - 1))
                    if graph.commute(shuffled[i], shuffled[i + 1]):
                        shuffled[i], shuffled[i + 1] = shuffled[i + 1], shuffled[i]
                assert normalize(shuffled, graph) == normalize(word, graph)

                vector = tau.array
                for s in reversed(word):
                    vector = system.F(s) @ vector
                result = apply_Fp(system, normalize(shuffled, graph), tau).array
                assert np.allclose(result, vector, rtol=1e-12, atol=0)
                checked += 1

    def test_clique_operator(self, abelian_pair):
        expected = 2.0 ** -1 * 4.0 ** -1 * (abelian_pair.F(0) @ abelian_pair.F(1))
        assert np.allclose(clique_operator(abelian_pair, (0, 1), 1.0), expected)

    def test_clique_operator_rejects_non_cliques(self, free_pair):
        with pytest.raises(InvalidInputError):
            clique_operator(free_pair, (0, 1), 1.0)

    def test_apply_Fp_checks_dimension(self, abelian_pair):
        with pytest.raises(InvalidInputError):
            apply_Fp(abelian_pair, normalize(["e1"], abelian_pair.graph), TraceVec.of([1.0]))


class TestBuilders:
    def test_kgraph_matches_path_counts(self):
        A1 = np.array([[1, 2, 0], [0, 1, 1], [1, 0, 0]])
        model = KGraphModel.of([A1, 2 * np.eye(3, dtype=int)])
        system = from_kgraph(model, WeightMap((2.0, 3.0)))
        assert system.rank_hint == (int(A1.sum()), 6)
        for degree in [(0, 0), (1, 0), (2, 1), (1, 3)]:
            word = ["e1"] * degree[0] + ["e2"] * degree[1]
            p = normalize(word, system.graph)
            assert np.array_equal(Fp_matrix(system, p), kgraph_path_counts(model, degree))

    def test_kgraph_rejects_non_commuting_colours(self):
        model = KGraphModel.of([[[0, 1], [0, 0]], [[0, 0], [1, 0]]])
        with pytest.raises(CommutationError):
            from_kgraph(model, WeightMap((2.0, 2.0)))

    def test_kgraph_rejects_fractional_entries(self):
        with pytest.raises(InvalidInputError):
            KGraphModel.of([[[0.5]]])

    def test_local_maps_preserve_mass(self):
        model = LocalMapModel.of(["x", "y", "z"], [[1, 2, 0], [2, 0, 1]])
        system = from_local_maps(model, WeightMap((3.0, 3.0)))
        for F in system.matrices:
            assert np.array_equal(F.sum(axis=0), np.ones(3))
        assert system.rank_hint == (1, 1)

    def test_local_maps_must_be_surjective_and_commute(self):
        with pytest.raises(InvalidInputError):
            LocalMapModel.of(["x", "y"], [[0, 0]])
        with pytest.raises(InvalidInputError):
            LocalMapModel.of(["x", "y", "z"], [[1, 0, 2], [0, 2, 1]])

    def test_trivial_system(self, free_pair):
        assert free_pair.dim == 1
        assert free_pair.rank_hint == (1, 1)


class TestOptimalExample:
    def test_distinguished_trace(self):
        system, mu = example_optimal(3, [1, 2], 4.0)
        assert mu.entries == pytest.approx((2 / 3, 4 / 3))
        assert np.array_equal(system.F(0), SWAP)
        assert np.array_equal(system.F(2), 2 * np.eye(2))
        assert system.weights.values == (4.0, 4.0, 2.0)

    def test_single_index_trace(self):
        _, mu = example_optimal(2, [1], 3.0)
        assert mu.entries == pytest.approx((0.0, 1.0))

    @pytest.mark.parametrize("n, I, alpha", [(1, [1], 3.0), (3, [4], 3.0), (3, [], 3.0), (2, [1], 2.0)])
    def test_parameter_checks(self, n, I, alpha):
        with pytest.raises(InvalidInputError):
            example_optimal(n, I, alpha)

    def test_radius_and_pairs(self):
        assert optimal_admissible_radius(4.0, 2) == pytest.approx(1 / 18)
        assert bernoulli_pair(0.25).entries == (0.25, 0.75)

    def test_summary(self):
        system, _ = example_optimal(2, [1], 3.0)
        summary = system_summary(system)
        assert summary["label"] == "example_optimal"
        assert summary["edges"] == [["e1", "e2"]]
        assert summary["complete_graph"] is True
