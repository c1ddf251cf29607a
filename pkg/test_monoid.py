"""
Tests for right-angled Artin monoid arithmetic
"""

import pytest

from conftest import all_graphs
from services.monoid_service import (
    INFINITY, NormalFormAutomaton, SimpleGraph, WeightMap, cliques, enumerate_elements,
    front_letters, generator, identity, is_clique, join, join_of_elements, join_of_set,
    left_quotient, leq, multidegree, multiply, normalize, parse_element, weight,
)
from utils.errors import GraphMismatchError, InvalidInputError


@pytest.fixture
def square():
    """Path a - b - c: a, c do not commute"""
    return SimpleGraph.from_names(["a", "b", "c"], [["a", "b"], ["b", "c"]])


class TestNormalForm:
    def test_commuting_letters_sort(self, square):
        assert str(normalize("cba", square)) == "bca"
        assert str(normalize("ba", square)) == "ab"

    def test_non_commuting_letters_stay(self, square):
        assert str(normalize("ca", square)) == "ca"
        assert normalize("ca", square) != normalize("ac", square)

    def test_equal_in_monoid_means_equal_words(self, square):
        assert normalize("bca", square) == normalize("cba", square)

    def test_normalize_is_idempotent_and_multiply_associative(self, rng):
        graphs = list(all_graphs(4))
        for _ in range(200):
            graph = graphs[int(rng.integers(len(graphs)))]
            words = [[int(s) for s in rng.integers(0, 4, size=int(rng.integers(0, 9)))] for _ in range(3)]
            p, q, r = (normalize(word, graph) for word in words)
            assert normalize(p.word, graph) == p
            assert len(p) == len(words[0])
            assert multiply(multiply(p, q), r) == multiply(p, multiply(q, r))
            assert multiply(multiply(p, q), r) == normalize(words[0] + words[1] + words[2], graph)

    def test_identity_prints_as_e(self, square):
        assert str(identity(square)) == "e"
        assert parse_element("e", square) == identity(square)

    def test_dotted_names(self):
        graph = SimpleGraph.complete(["x1", "x2"])
        p = parse_element("x2.x1", graph)
        assert p.letters == ("x1", "x2")
        assert str(p) == "x1.x2"

    def test_unknown_letter(self, square):
        with pytest.raises(InvalidInputError):
            normalize("ad", square)

    def test_graph_rejects_self_loop(self):
        with pytest.raises(InvalidInputError):
            SimpleGraph.from_names(["a"], [["a", "a"]])


class TestOrder:
    def test_prefix_order(self, square):
        ab = normalize("ab", square)
        assert leq(generator(square, "a"), ab)
        assert leq(generator(square, "b"), ab)
        assert not leq(generator(square, "c"), ab)
        assert leq(identity(square), ab)

    def test_left_quotient(self, square):
        p = normalize("b", square)
        q = normalize("abc", square)
        r = left_quotient(p, q)
        assert multiply(p, r) == q
        assert str(r) == "ac"

    def test_left_quotient_requires_divisibility(self, square):
        with pytest.raises(InvalidInputError):
            left_quotient(normalize("c", square), normalize("ab", square))

    @pytest.mark.parametrize("n", [2, 3])
    def test_order_matches_divisor_search(self, n):
        for graph in all_graphs(n):
            universe = enumerate_elements(graph, 4)
            reachable = {p: {multiply(p, r) for r in universe} for p in enumerate_elements(graph, 2)}
            for p, multiples in reachable.items():
                for q in universe:
                    assert leq(p, q) == (q in multiples)

    def test_mixed_graphs_rejected(self, square):
        other = SimpleGraph.complete(["a", "b", "c"])
        with pytest.raises(GraphMismatchError):
            leq(generator(square, "a"), generator(other, "a"))


class TestJoin:
    def test_commuting_generators(self, square):
        assert str(join(generator(square, "a"), generator(square, "b"))) == "ab"

    def test_non_commuting_generators(self, square):
        assert join(generator(square, "a"), generator(square, "c")) is INFINITY

    def test_join_with_divisor(self, square):
        abc = normalize("abc", square)
        assert join(generator(square, "b"), abc) == abc

    def test_join_of_words(self, square):
        assert join(normalize("ab", square), normalize("bc", square)) is INFINITY
        assert join(normalize("ab", square), normalize("cb", square)) is INFINITY
        assert str(join(normalize("ab", square), normalize("b", square))) == "ab"
        assert join(normalize("ab", square), normalize("ba", square)) == normalize("ab", square)

    def test_join_of_elements_and_sets(self, square):
        assert join_of_elements([generator(square, s) for s in "ab"]) == normalize("ab", square)
        assert join_of_set(square, ["a", "c"]) is INFINITY
        assert join_of_set(square, ["b", "a"]) == normalize("ab", square)
        with pytest.raises(InvalidInputError):
            join_of_set(square, [])

    def test_join_on_complete_graphs_takes_coordinatewise_max(self):
        graph = SimpleGraph.complete(["a", "b", "c"])
        elements = enumerate_elements(graph, 3)
        for p in elements:
            for q in elements:
                top = join(p, q)
                assert top is not INFINITY
                assert multidegree(top) == tuple(map(max, multidegree(p), multidegree(q)))

    @pytest.mark.parametrize("n, length, horizon", [(2, 3, 6), (3, 2, 4)])
    def test_matches_brute_force_least_upper_bound(self, n, length, horizon):
        for graph in all_graphs(n):
            universe = enumerate_elements(graph, horizon)
            short = enumerate_elements(graph, length)
            above = {p: {r for r in universe if leq(p, r)} for p in short}
            for p in short:
                for q in short:
                    upper = above[p] & above[q]
                    result = join(p, q)
                    if result is INFINITY:
                        assert not upper
                        continue
                    assert result in upper
                    assert all(leq(result, r) for r in upper)


class TestCliques:
    def test_clique_listing(self, square):
        assert cliques(square) == [(0,), (1,), (2,), (0, 1), (1, 2)]
        assert cliques(square, restrict_to=["a", "c"]) == [(0,), (2,)]
        assert is_clique(square, [0, 1]) and not is_clique(square, [0, 2])

    def test_front_letters_form_a_clique(self, square):
        for p in enumerate_elements(square, 4):
            assert is_clique(square, front_letters(p))

    def test_front_letters(self, square):
        assert front_letters(normalize("abc", square)) == frozenset({0, 1})


class TestEnumeration:
    def test_counts_on_complete_and_free_graphs(self):
        complete = SimpleGraph.complete(["a", "b"])
        free = SimpleGraph.edgeless(["a", "b"])
        assert len(enumerate_elements(complete, 3)) == 1 + 2 + 3 + 4
        assert len(enumerate_elements(free, 3)) == 1 + 2 + 4 + 8

    def test_elements_are_distinct_and_ordered(self, square):
        elements = enumerate_elements(square, 4)
        assert len(set(elements)) == len(elements)
        assert [len(p) for p in elements] == sorted(len(p) for p in elements)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_automaton_level_counts(self, n):
        for graph in all_graphs(n):
            elements = enumerate_elements(graph, 4)
            expected = [sum(1 for p in elements if len(p) == k) for k in range(5)]
            assert NormalFormAutomaton(graph).level_counts(4) == expected

    def test_automaton_accepts_normal_forms_only(self, square):
        automaton = NormalFormAutomaton(square)
        for p in enumerate_elements(square, 4):
            state = automaton.initial
            for b in reversed(p.word):
                assert automaton.allowed(state, b)
                state = automaton.step(state, b)
        # "ba" is not a normal form because a and b commute
        state = automaton.step(automaton.initial, 0)
        assert not automaton.allowed(state, 1)


class TestDegreeAndWeight:
    def test_multidegree_is_injective_on_complete_graphs(self):
        graph = SimpleGraph.complete(["a", "b", "c"])
        elements = enumerate_elements(graph, 3)
        degrees = [multidegree(p) for p in elements]
        assert len(set(degrees)) == len(degrees)
        assert multidegree(normalize("cab", graph)) == (1, 1, 1)

    def test_weight_is_multiplicative(self, square):
        N = WeightMap((2.0, 3.0, 5.0))
        assert weight(normalize("abcb", square), N) == pytest.approx(2 * 3 * 5 * 3)
        assert weight(identity(square), N) == 1.0

    def test_weights_must_be_positive(self):
        with pytest.raises(InvalidInputError):
            WeightMap((1.0, 0.0))
