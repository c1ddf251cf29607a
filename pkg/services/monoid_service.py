"""
Right-angled Artin monoid arithmetic

Elements are stored as lexicographically minimal words in their
commutation class. Letters are indices into the graph's vertex list, so
the declaration order of the vertices fixes the normal form.
"""

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from utils.errors import GraphMismatchError, InvalidInputError
from utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class SimpleGraph:
    """Commutation graph: an edge {s, t} means st = ts"""

    vertices: Tuple[str, ...]
    edges: FrozenSet[FrozenSet[int]] = frozenset()

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise InvalidInputError(f"Duplicate vertex names in {list(self.vertices)}")
        for edge in self.edges:
            if len(edge) != 2:
                raise InvalidInputError(f"Edge {sorted(edge)} is a self-loop")
            if any(v < 0 or v >= len(self.vertices) for v in edge):
                raise InvalidInputError(f"Edge {sorted(edge)} references an unknown vertex")

    @classmethod
    def from_names(cls, vertices: Sequence[str], edges: Iterable[Sequence[str]] = ()) -> "SimpleGraph":
        """Build a graph from vertex names and name pairs"""
        vertices = tuple(str(v) for v in vertices)
        index = {name: i for i, name in enumerate(vertices)}
        pairs = set()
        for edge in edges:
            edge = list(edge)
            if len(edge) != 2:
                raise InvalidInputError(f"Edge {edge} must have exactly two endpoints")
            unknown = [name for name in edge if name not in index]
            if unknown:
                raise InvalidInputError(f"Edge {edge} references unknown vertex {unknown[0]!r}")
            if edge[0] == edge[1]:
                raise InvalidInputError(f"Edge {edge} is a self-loop")
            pairs.add(frozenset((index[edge[0]], index[edge[1]])))
        return cls(vertices, frozenset(pairs))

    @classmethod
    def complete(cls, vertices: Sequence[str]) -> "SimpleGraph":
        vertices = tuple(vertices)
        edges = frozenset(frozenset(pair) for pair in combinations(range(len(vertices)), 2))
        return cls(vertices, edges)

    @classmethod
    def edgeless(cls, vertices: Sequence[str]) -> "SimpleGraph":
        return cls(tuple(vertices), frozenset())

    @property
    def size(self) -> int:
        return len(self.vertices)

    def commute(self, s: int, t: int) -> bool:
        """True when s and t are distinct and joined by an edge"""
        return s != t and frozenset((s, t)) in self.edges

    def is_complete(self) -> bool:
        n = self.size
        return len(self.edges) == n * (n - 1) // 2

    def index_of(self, name: str) -> int:
        try:
            return self.vertices.index(name)
        except ValueError:
            raise InvalidInputError(f"Unknown generator {name!r}; known: {list(self.vertices)}")

    def edge_names(self) -> List[Tuple[str, str]]:
        """Edges as sorted name pairs, in index order"""
        pairs = sorted(tuple(sorted(edge)) for edge in self.edges)
        return [(self.vertices[a], self.vertices[b]) for a, b in pairs]


class Infinity(Enum):
    """Join of two elements without a common upper bound"""

    INFINITY = "inf"

    def __str__(self) -> str:
        return "∞"


INFINITY = Infinity.INFINITY


@dataclass(frozen=True)
class MonoidElement:
    """Element of the Artin monoid, word kept in normal form"""

    word: Tuple[int, ...]
    graph: SimpleGraph = field(repr=False)

    def __len__(self) -> int:
        return len(self.word)

    def __str__(self) -> str:
        if not self.word:
            return "e"
        names = self.graph.vertices
        if all(len(names[s]) == 1 for s in self.word):
            return "".join(names[s] for s in self.word)
        return ".".join(names[s] for s in self.word)

    @property
    def letters(self) -> Tuple[str, ...]:
        return tuple(self.graph.vertices[s] for s in self.word)

    def is_identity(self) -> bool:
        return not self.word


ExtendedElement = Union[MonoidElement, Infinity]


@dataclass(frozen=True)
class WeightMap:
    """Positive weight N(s) per generator, extended multiplicatively"""

    values: Tuple[float, ...]

    def __post_init__(self):
        for i, value in enumerate(self.values):
            if not value > 0:
                raise InvalidInputError(f"Weight N({i}) = {value} must be positive")

    @classmethod
    def constant(cls, graph: SimpleGraph, value: float) -> "WeightMap":
        return cls(tuple(float(value) for _ in graph.vertices))

    def __getitem__(self, s: int) -> float:
        return self.values[s]

    def __len__(self) -> int:
        return len(self.values)


def _check_same_graph(p: MonoidElement, q: MonoidElement) -> None:
    if p.graph != q.graph:
        raise GraphMismatchError("Elements belong to different monoids")


def _to_indices(word: Sequence[Union[int, str]], graph: SimpleGraph) -> Tuple[int, ...]:
    letters = []
    for letter in word:
        if isinstance(letter, str):
            letters.append(graph.index_of(letter))
        elif isinstance(letter, int) and 0 <= letter < graph.size:
            letters.append(letter)
        else:
            raise InvalidInputError(f"Letter {letter!r} is not a vertex of the graph")
    return tuple(letters)


def _front_position(word: Sequence[int], s: int, graph: SimpleGraph) -> Optional[int]:
    """Position of the first s if every earlier letter commutes with s"""
    for position, letter in enumerate(word):
        if letter == s:
            return position
        if not graph.commute(letter, s):
            return None
    return None


@lru_cache(maxsize=None)
def _normal_word(word: Tuple[int, ...], graph: SimpleGraph) -> Tuple[int, ...]:
    remaining = list(word)
    result = []
    while remaining:
        # smallest letter that can be moved to the front
        best = None
        for s in sorted(set(remaining)):
            position = _front_position(remaining, s, graph)
            if position is not None:
                best = position
                break
        result.append(remaining.pop(best))
    return tuple(result)


def normalize(word: Sequence[Union[int, str]], graph: SimpleGraph) -> MonoidElement:
    """
    Canonical element for a word

    Args:
        word: letters as vertex indices or vertex names
        graph: commutation graph

    Returns:
        MonoidElement holding the lexicographically smallest equivalent word
    """
    return MonoidElement(_normal_word(_to_indices(word, graph), graph), graph)


def parse_element(text: str, graph: SimpleGraph) -> MonoidElement:
    """Parse 'e', 'aab' (single-character names) or 'x1.x2' notation"""
    text = text.strip()
    if text in ("", "e"):
        return identity(graph)
    letters = text.split(".") if "." in text else list(text)
    return normalize(letters, graph)


def identity(graph: SimpleGraph) -> MonoidElement:
    return MonoidElement((), graph)


def generator(graph: SimpleGraph, s: Union[int, str]) -> MonoidElement:
    return normalize([s], graph)


def multiply(p: MonoidElement, q: MonoidElement) -> MonoidElement:
    _check_same_graph(p, q)
    return MonoidElement(_normal_word(p.word + q.word, p.graph), p.graph)


@lru_cache(maxsize=None)
def _divides(p: Tuple[int, ...], q: Tuple[int, ...], graph: SimpleGraph) -> bool:
    if not p:
        return True
    if len(p) > len(q):
        return False
    position = _front_position(q, p[0], graph)
    if position is None:
        return False
    return _divides(p[1:], q[:position] + q[position + 1:], graph)


def leq(p: MonoidElement, q: MonoidElement) -> bool:
    """Left divisibility: p <= q iff q = p r for some r"""
    _check_same_graph(p, q)
    return _divides(p.word, q.word, p.graph)


def _strip(p: Tuple[int, ...], q: Tuple[int, ...], graph: SimpleGraph) -> Optional[Tuple[int, ...]]:
    """Word r with p r = q, or None"""
    for s in p:
        position = _front_position(q, s, graph)
        if position is None:
            return None
        q = q[:position] + q[position + 1:]
    return q


def left_quotient(p: MonoidElement, q: MonoidElement) -> MonoidElement:
    """The unique r with p r = q"""
    _check_same_graph(p, q)
    rest = _strip(p.word, q.word, p.graph)
    if rest is None:
        raise InvalidInputError(f"{p} does not left-divide {q}")
    return MonoidElement(_normal_word(rest, p.graph), p.graph)


def _join_generator(p: Tuple[int, ...], s: int, graph: SimpleGraph) -> Optional[Tuple[int, ...]]:
    # s already in front position: p v s = p
    if _front_position(p, s, graph) is not None:
        return p
    # s absent and central for p: p v s = ps
    if s not in p and all(graph.commute(letter, s) for letter in p):
        return p + (s,)
    return None


@lru_cache(maxsize=None)
def _join_words(p: Tuple[int, ...], q: Tuple[int, ...], graph: SimpleGraph) -> Optional[Tuple[int, ...]]:
    if not q:
        return p
    s = q[0]
    upper = _join_generator(p, s, graph)
    if upper is None:
        return None
    reduced = _strip((s,), upper, graph)
    rest = _join_words(_normal_word(reduced, graph), q[1:], graph)
    if rest is None:
        return None
    return _normal_word((s,) + rest, graph)


def join(p: MonoidElement, q: MonoidElement) -> ExtendedElement:
    """Least common upper bound of p and q, or INFINITY"""
    _check_same_graph(p, q)
    word = _join_words(p.word, q.word, p.graph)
    if word is None:
        return INFINITY
    return MonoidElement(word, p.graph)


def join_extended(p: ExtendedElement, q: ExtendedElement) -> ExtendedElement:
    if p is INFINITY or q is INFINITY:
        return INFINITY
    return join(p, q)


def join_of_elements(elements: Iterable[MonoidElement]) -> ExtendedElement:
    result: Optional[ExtendedElement] = None
    for element in elements:
        result = element if result is None else join_extended(result, element)
        if result is INFINITY:
            return INFINITY
    if result is None:
        raise InvalidInputError("Join of an empty family is undefined")
    return result


def join_of_set(graph: SimpleGraph, K: Iterable[Union[int, str]]) -> ExtendedElement:
    """
    Join of a set of generators

    Returns the product s_K when K is a clique of the graph and INFINITY
    otherwise.
    """
    letters = sorted(set(_to_indices(list(K), graph)))
    if not letters:
        raise InvalidInputError("join_of_set needs a nonempty set of generators")
    if not is_clique(graph, letters):
        return INFINITY
    return MonoidElement(tuple(letters), graph)


def is_clique(graph: SimpleGraph, letters: Iterable[int]) -> bool:
    letters = list(letters)
    return all(graph.commute(a, b) for a, b in combinations(letters, 2))


def cliques(graph: SimpleGraph, restrict_to: Optional[Iterable[Union[int, str]]] = None) -> List[Tuple[int, ...]]:
    """
    All nonempty complete subgraphs, ordered by size then lexicographically

    Args:
        graph: commutation graph
        restrict_to: optional generator subset to search inside

    Returns:
        Cliques as sorted tuples of vertex indices
    """
    if restrict_to is None:
        pool = list(range(graph.size))
    else:
        pool = sorted(set(_to_indices(list(restrict_to), graph)))

    result: List[Tuple[int, ...]] = []
    layer = [(s,) for s in pool]
    while layer:
        result.extend(layer)
        grown = []
        for clique in layer:
            for s in pool:
                if s > clique[-1] and all(graph.commute(t, s) for t in clique):
                    grown.append(clique + (s,))
        layer = grown
    return result


def front_letters(p: MonoidElement) -> FrozenSet[int]:
    """Letters that can be moved to the front of p"""
    return frozenset(
        s for s in set(p.word) if _front_position(p.word, s, p.graph) is not None
    )


def enumerate_elements(graph: SimpleGraph, up_to_length: int) -> List[MonoidElement]:
    """
    Every element of word length at most up_to_length, exactly once

    Elements are listed level by level, lexicographically inside a level.
    """
    if up_to_length < 0:
        raise InvalidInputError("up_to_length must be nonnegative")
    level = [()]
    words: List[Tuple[int, ...]] = [()]
    for _ in range(up_to_length):
        seen = {}
        for word in level:
            for s in range(graph.size):
                seen.setdefault(_normal_word(word + (s,), graph), None)
        level = sorted(seen)
        words.extend(level)
    return [MonoidElement(word, graph) for word in words]


def multidegree(p: MonoidElement) -> Tuple[int, ...]:
    """Letter counts; an isomorphism onto Z^n_+ on complete graphs"""
    counts = [0] * p.graph.size
    for s in p.word:
        counts[s] += 1
    return tuple(counts)


def weight(p: MonoidElement, N: WeightMap) -> float:
    if len(N) != p.graph.size:
        raise InvalidInputError("Weight map does not match the graph")
    result = 1.0
    for s in p.word:
        result *= N[s]
    return result


class NormalFormAutomaton:
    """
    Recognizer for normal forms, read right to left

    A state is the front set of the suffix read so far. Prepending b is
    allowed unless some front letter a < b commutes with b; the new state
    is {b} together with the front letters commuting with b.
    """

    def __init__(self, graph: SimpleGraph):
        self.graph = graph
        self.initial: FrozenSet[int] = frozenset()
        self.states: List[FrozenSet[int]] = []
        self.transitions: Dict[FrozenSet[int], Dict[int, FrozenSet[int]]] = {}
        self._build()

    def allowed(self, state: FrozenSet[int], b: int) -> bool:
        return not any(a < b and self.graph.commute(a, b) for a in state)

    def step(self, state: FrozenSet[int], b: int) -> FrozenSet[int]:
        return frozenset({b} | {a for a in state if self.graph.commute(a, b)})

    def _build(self) -> None:
        pending = [self.initial]
        index = {self.initial: 0}
        while pending:
            state = pending.pop(0)
            self.states.append(state)
            moves = {}
            for b in range(self.graph.size):
                if self.allowed(state, b):
                    target = self.step(state, b)
                    moves[b] = target
                    if target not in index:
                        index[target] = len(index)
                        pending.append(target)
            self.transitions[state] = moves
        logger.debug("Normal form automaton with %d states", len(self.states))

    def level_counts(self, up_to_length: int) -> List[int]:
        """Number of elements of each word length 0..up_to_length"""
        counts = []
        current = {self.initial: 1}
        for _ in range(up_to_length + 1):
            counts.append(sum(current.values()))
            following: Dict[FrozenSet[int], int] = {}
            for state, count in current.items():
                for target in self.transitions[state].values():
                    following[target] = following.get(target, 0) + count
            current = following
        return counts
