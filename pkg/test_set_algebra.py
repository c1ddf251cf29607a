"""
Tests for the cell algebra and the trace-valued measure
"""

import numpy as np
import pytest

from conftest import all_graphs, random_artin_system, scalar_system
from services.critical_service import critical_beta
from services.kms_service import S_beta_solve, T_beta, check_subinvariance, wold
from services.monoid_service import (
    INFINITY, SimpleGraph, WeightMap, enumerate_elements, generator, identity, join, leq, normalize,
)
from services.set_algebra_service import (
    Cell, CellSet, atom_summary, atom_weights, audit_disjoint, carved, cell_contains,
    complement, complement_in, cone, contains, disjoint_union, intersect, measure,
)
from services.transfer_service import TraceVec, TransferSystem, example_optimal, trivial_system
from utils.errors import BudgetExceededError, ContainmentError, GraphMismatchError, SubinvarianceError


@pytest.fixture
def square():
    return SimpleGraph.from_names(["a", "b", "c"], [["a", "b"], ["b", "c"]])


@pytest.fixture
def square_system(square):
    matrices = [np.array([[1, 1], [1, 1]]), 2 * np.eye(2, dtype=np.int64), np.array([[2, 1], [1, 2]])]
    return TransferSystem.build(square, matrices, WeightMap((2.0, 3.0, 2.0)))


def samples(graph):
    a, b, c = (generator(graph, name) for name in "abc")
    return [
        cone(normalize("ab", graph)),
        carved(identity(graph), [0]),
        CellSet.of(graph, [Cell(a, frozenset({1})), Cell(c)]),
        carved(b, [0, 2]),
        CellSet.of(graph, []),
    ]


class TestCells:
    def test_single_cell_membership(self, square):
        cell = Cell(generator(square, "a"), frozenset({1}))
        assert cell_contains(cell, normalize("a", square))
        assert cell_contains(cell, normalize("ac", square))
        assert not cell_contains(cell, normalize("ab", square))
        assert not cell_contains(cell, normalize("b", square))

    def test_printing(self, square):
        assert str(Cell(normalize("ab", square), frozenset({2}))) == "abΩ{c}"
        assert str(cone(identity(square))) == "eP"
        assert str(CellSet.of(square, [])) == "∅"

    def test_cells_from_other_graphs_rejected(self, square):
        other = SimpleGraph.complete(["a", "b", "c"])
        with pytest.raises(GraphMismatchError):
            CellSet.of(square, [Cell(generator(other, "a"))])
        with pytest.raises(GraphMismatchError):
            intersect(cone(generator(square, "a")), cone(generator(other, "a")))


class TestIntersection:
    def test_cones(self, square):
        a, b, c = (generator(square, name) for name in "abc")
        assert str(intersect(cone(a), cone(b))) == "abP"
        assert intersect(cone(a), cone(c)).is_empty()

    def test_cone_intersection_is_the_cone_of_the_join(self):
        for graph in all_graphs(3):
            universe = enumerate_elements(graph, 5)
            short = enumerate_elements(graph, 2)
            for p in short:
                for q in short:
                    both = intersect(cone(p), cone(q))
                    top = join(p, q)
                    if top is INFINITY:
                        assert both.is_empty()
                    else:
                        assert both == cone(top)
                    for r in universe:
                        assert contains(both, r) == (leq(p, r) and leq(q, r))

    def test_carve_swallowing_the_join_is_empty(self, square):
        a, b = generator(square, "a"), generator(square, "b")
        assert intersect(carved(a, [1]), cone(b)).is_empty()

    def test_membership(self, square):
        universe = enumerate_elements(square, 5)
        for A in samples(square):
            for B in samples(square):
                both = intersect(A, B)
                for p in universe:
                    assert contains(both, p) == (contains(A, p) and contains(B, p))


class TestComplement:
    def test_membership(self, square):
        universe = enumerate_elements(square, 5)
        for A in samples(square):
            rest = complement(A)
            for p in universe:
                assert contains(rest, p) != contains(A, p)

    def test_result_is_disjoint(self, square):
        for A in samples(square):
            assert audit_disjoint(complement(A)) is None

    def test_whole_and_empty(self, square):
        assert complement(cone(identity(square))).is_empty()
        assert str(complement(CellSet.of(square, []))) == "eP"

    def test_relative_complement(self, square):
        a = generator(square, "a")
        ab = normalize("ab", square)
        rest = complement_in(cone(a), cone(ab))
        for p in enumerate_elements(square, 5):
            assert contains(rest, p) == (leq(a, p) and not leq(ab, p))

    def test_relative_complement_needs_containment(self, square):
        with pytest.raises(ContainmentError):
            complement_in(cone(generator(square, "a")), cone(generator(square, "b")))


class TestDisjointUnion:
    def test_overlap_found(self, square):
        overlapping = CellSet.of(square, [Cell(generator(square, "a")), Cell(generator(square, "b"))])
        assert audit_disjoint(overlapping) == normalize("ab", square)
        with pytest.raises(ContainmentError):
            disjoint_union(cone(generator(square, "a")), cone(generator(square, "b")))

    def test_non_commuting_cones_are_disjoint(self, square):
        union = disjoint_union(cone(generator(square, "a")), cone(generator(square, "c")))
        assert len(union) == 2


class TestMeasure:
    def test_whole_monoid_has_measure_tau(self, square_system):
        tau = TraceVec.of([1.0, 2.0])
        assert np.allclose(measure(cone(identity(square_system.graph)), square_system, tau, 1.5), tau.array)

    def test_finite_additivity(self, square_system):
        tau = TraceVec.of([1.0, 2.0])
        graph = square_system.graph
        for beta in (0.5, 2.0):
            for A in samples(graph):
                total = measure(A, square_system, tau, beta) + measure(complement(A), square_system, tau, beta)
                assert np.allclose(total, tau.array)
                for B in samples(graph):
                    split = (measure(intersect(A, B), square_system, tau, beta)
                             + measure(intersect(A, complement(B)), square_system, tau, beta))
                    assert np.allclose(split, measure(A, square_system, tau, beta))

    def test_carving_every_generator_gives_T_beta(self, abelian_pair):
        tau = TraceVec.of([1.0, 3.0])
        value = measure(carved(identity(abelian_pair.graph), [0, 1]), abelian_pair, tau, 2.0)
        assert np.allclose(value, T_beta(abelian_pair, 2.0) @ tau.array)

    def test_cells_at_the_identity_are_positive_exactly_when_subinvariant(self, rng, abelian_pair):
        system, mu = example_optimal(3, [1, 2], 4.0)
        cases = [(system, mu, 1.0), (abelian_pair, TraceVec.of([1.0, 1.0]), 2.0)]
        for _ in range(40):
            system = random_artin_system(rng, max_generators=4, max_dim=4)
            cases.append((system, TraceVec.of(rng.uniform(0.05, 1.0, size=system.dim)),
                          float(rng.uniform(0.1, 3.0))))

        outcomes = set()
        for system, tau, beta in cases:
            report = check_subinvariance(system, tau, beta)
            if abs(report.min_slack) < 1e-6:
                continue
            carves = [[system.graph.index_of(name) for name in entry.subset] for entry in report.entries]
            values = [measure(carved(identity(system.graph), J), system, tau, beta) for J in carves]
            for value, entry in zip(values, report.entries):
                assert np.allclose(value, entry.vector, rtol=1e-9, atol=1e-12)
            assert all(value.min() >= -report.tol for value in values) == report.passed
            if report.passed:
                for p in enumerate_elements(system.graph, 2):
                    for J in carves:
                        assert measure(carved(p, J), system, tau, beta).min() >= -1e-10
            outcomes.add(report.passed)
        assert outcomes == {True, False}

    def test_graph_must_match_system(self, square, abelian_pair):
        with pytest.raises(GraphMismatchError):
            measure(cone(identity(square)), abelian_pair, TraceVec.of([1.0, 1.0]), 1.0)


class TestAtoms:
    def test_free_monoid_weights(self):
        graph = SimpleGraph.edgeless(["a", "b"])
        system = trivial_system(graph, WeightMap.constant(graph, 4.0))
        weights = atom_weights(system, TraceVec.of([1.0]), 1.0, 6)
        for element, value in weights.items():
            assert value == pytest.approx(0.25 ** len(element) * 0.5, rel=1e-12)

    def test_levels_and_tail_add_up_to_the_mass(self):
        graph = SimpleGraph.edgeless(["a", "b"])
        system = trivial_system(graph, WeightMap.constant(graph, 4.0))
        summary = atom_summary(system, TraceVec.of([1.0]), 1.0, 12)
        assert summary["total"] == pytest.approx(1 - 2.0 ** -13, rel=1e-12)
        assert summary["tail_bound"] == pytest.approx(2.0 ** -13, rel=1e-9)
        assert summary["total"] + summary["tail_bound"] == pytest.approx(1.0, rel=1e-12)
        assert summary["weights"]["e"] == pytest.approx(0.5)

    def test_infinite_type_has_no_atoms(self):
        system = scalar_system(2.0, 2.0)
        summary = atom_summary(system, TraceVec.of([1.0]), 1.0, 5)
        assert summary["total"] == 0.0
        assert summary["deficit"] == pytest.approx(1.0)

    def test_atoms_carry_the_finite_part(self, rng):
        for _ in range(10):
            system = random_artin_system(rng, weight_floor=3.0)
            beta = critical_beta(system) + 2.0
            tau = S_beta_solve(system, beta, TraceVec.of(rng.uniform(0.1, 1.0, size=system.dim)))
            finite = wold(system, tau, beta).tau_f.mass
            total = atom_summary(system, tau, beta, 8)["total"]
            assert total <= finite * (1 + 1e-9)
            assert finite - total <= 0.02 * finite

    def test_mixed_trace_atoms_sum_to_the_finite_mass(self, mixed_diagonal):
        system, tau = mixed_diagonal
        assert wold(system, tau, 1.0).tau_f.mass == pytest.approx(1.0)
        assert atom_summary(system, tau, 1.0, 30)["total"] == pytest.approx(1.0, abs=1e-9)

    def test_requires_subinvariance(self):
        system, mu = example_optimal(3, [1, 2], 4.0)
        with pytest.raises(SubinvarianceError):
            atom_weights(system, mu, 1.0, 3)

    def test_budget_guards_the_listing(self):
        graph = SimpleGraph.edgeless(["a", "b"])
        system = trivial_system(graph, WeightMap.constant(graph, 4.0))
        assert len(atom_weights(system, TraceVec.of([1.0]), 1.0, 3, budget=15)) == 15
        with pytest.raises(BudgetExceededError):
            atom_weights(system, TraceVec.of([1.0]), 1.0, 3, budget=14)
        with pytest.raises(BudgetExceededError):
            atom_summary(system, TraceVec.of([1.0]), 1.0, 8, budget=100)
