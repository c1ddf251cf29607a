"""
Finite-dimensional transfer operator systems

The coefficient algebra is C(Z) for a finite set Z of size d. A trace is a
nonnegative d-vector and each generator s carries a nonnegative d x d
matrix F_s acting on trace vectors by left multiplication.
"""

from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import config
from services.monoid_service import MonoidElement, SimpleGraph, WeightMap, join_of_set
from utils.errors import CommutationError, InvalidInputError
from utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class TraceVec:
    """Trace on C(Z) given by its values on the point masses"""

    entries: Tuple[float, ...]
    positive: bool = True

    def __post_init__(self):
        if self.positive:
            slack = config.trace_slack * max(1.0, sum(abs(x) for x in self.entries))
            worst = min(self.entries, default=0.0)
            if worst < -slack:
                raise InvalidInputError(f"Trace entry {worst} is negative")

    @classmethod
    def of(cls, values: Sequence[float], positive: bool = True) -> "TraceVec":
        array = np.asarray(values, dtype=float).ravel()
        if not np.all(np.isfinite(array)):
            raise InvalidInputError("Trace entries must be finite numbers")
        return cls(tuple(float(x) for x in array), positive)

    @classmethod
    def zeros(cls, dim: int) -> "TraceVec":
        return cls(tuple(0.0 for _ in range(dim)))

    @property
    def dim(self) -> int:
        return len(self.entries)

    @property
    def mass(self) -> float:
        """Value on the unit"""
        return float(sum(self.entries))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=float)

    def normalized(self) -> "TraceVec":
        mass = self.mass
        if mass <= 0:
            raise InvalidInputError("Cannot normalize a trace of zero mass")
        return TraceVec.of(self.array / mass)


def _frozen_matrix(matrix, dim: int, name: str) -> np.ndarray:
    array = np.asarray(matrix)
    if array.shape != (dim, dim):
        raise InvalidInputError(f"F_{name} has shape {array.shape}, expected ({dim}, {dim})")
    if not np.issubdtype(array.dtype, np.integer):
        array = array.astype(float)
    if not np.all(np.isfinite(array)):
        raise InvalidInputError(f"F_{name} has non-finite entries")
    if np.any(array < 0):
        raise InvalidInputError(f"F_{name} has negative entries")
    array = array.copy()
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class TransferSystem:
    """Graph, weights and commuting transfer matrices, one per generator"""

    graph: SimpleGraph
    dim: int
    matrices: Tuple[np.ndarray, ...]
    weights: WeightMap
    rank_hint: Optional[Tuple[int, ...]] = None
    label: str = field(default="custom")

    @classmethod
    def build(cls, graph: SimpleGraph, matrices: Sequence, weights: WeightMap,
              rank_hint: Optional[Sequence[int]] = None, label: str = "custom") -> "TransferSystem":
        if len(matrices) != graph.size:
            raise InvalidInputError(f"Expected {graph.size} matrices, got {len(matrices)}")
        if len(weights) != graph.size:
            raise InvalidInputError(f"Expected {graph.size} weights, got {len(weights)}")
        first = np.asarray(matrices[0]) if matrices else np.zeros((0, 0))
        dim = first.shape[0] if first.ndim == 2 else 0
        if dim < 1:
            raise InvalidInputError("Transfer matrices must be square with dimension at least 1")
        frozen = tuple(
            _frozen_matrix(m, dim, graph.vertices[i]) for i, m in enumerate(matrices)
        )
        if rank_hint is not None:
            rank_hint = tuple(int(m) for m in rank_hint)
            if len(rank_hint) != graph.size or any(m < 1 for m in rank_hint):
                raise InvalidInputError("rank_hint needs one positive integer per generator")
        return cls(graph, dim, frozen, weights, rank_hint, label)

    @property
    def exact(self) -> bool:
        """True when every matrix has integer entries"""
        return all(np.issubdtype(m.dtype, np.integer) for m in self.matrices)

    def F(self, s: int) -> np.ndarray:
        return self.matrices[s]

    def N(self, s: int) -> float:
        return self.weights[s]


@dataclass
class SystemDiagnostics:
    """Outcome of validate"""

    ok: bool
    commutators: Dict[str, float]
    messages: List[str]
    issues: List[CommutationError] = field(default_factory=list)


def validate(sys_: TransferSystem) -> SystemDiagnostics:
    """
    Check nonnegativity and commutation of the matrices along every edge

    Integer systems are compared exactly, real systems within
    config.commutation_tol. Edges are visited in sorted order, so
    issues[0] is the first offending edge.
    """
    commutators: Dict[str, float] = {}
    issues: List[CommutationError] = []
    names = sys_.graph.vertices
    exact = sys_.exact

    for a, b in sorted(tuple(sorted(edge)) for edge in sys_.graph.edges):
        Fa, Fb = sys_.F(a), sys_.F(b)
        commutator = Fa @ Fb - Fb @ Fa
        if not commutator.size:
            commutators[f"{names[a]}-{names[b]}"] = 0.0
            continue
        entry = np.unravel_index(int(np.argmax(np.abs(commutator))), commutator.shape)
        worst = float(abs(commutator[entry]))
        commutators[f"{names[a]}-{names[b]}"] = worst
        if (worst != 0) if exact else (worst > config.commutation_tol):
            issues.append(CommutationError((names[a], names[b]), tuple(int(i) for i in entry), worst))

    messages = [
        f"edge {issue.edge[0]}-{issue.edge[1]}: commutator entry {issue.entry} = {issue.value:.3e}"
        for issue in issues
    ]
    return SystemDiagnostics(ok=not issues, commutators=commutators, messages=messages, issues=issues)


def ensure_valid(sys_: TransferSystem) -> TransferSystem:
    """Raise CommutationError on the first offending edge"""
    diagnostics = validate(sys_)
    if diagnostics.issues:
        raise diagnostics.issues[0]
    return sys_


def _check_dim(sys_: TransferSystem, tau: TraceVec) -> None:
    if tau.dim != sys_.dim:
        raise InvalidInputError(f"Trace has dimension {tau.dim}, system has {sys_.dim}")


def Fp_matrix(sys_: TransferSystem, p: MonoidElement) -> np.ndarray:
    """Product of F_s along the normal form of p"""
    result = np.eye(sys_.dim)
    for s in p.word:
        result = result @ sys_.F(s)
    return result


def apply_Fp(sys_: TransferSystem, p: MonoidElement, tau: TraceVec) -> TraceVec:
    _check_dim(sys_, tau)
    vector = tau.array
    for s in reversed(p.word):
        vector = sys_.F(s) @ vector
    return TraceVec.of(vector, positive=tau.positive)


def clique_operator(sys_: TransferSystem, clique: Sequence[int], beta: float) -> np.ndarray:
    """N(s_K)^-beta F_{s_K} for a clique K"""
    element = join_of_set(sys_.graph, clique)
    if not isinstance(element, MonoidElement):
        raise InvalidInputError(f"{list(clique)} is not a clique")
    scale = 1.0
    for s in element.word:
        scale *= sys_.N(s) ** (-beta)
    return scale * Fp_matrix(sys_, element)


@dataclass(frozen=True, eq=False)
class KGraphModel:
    """Vertex count and commuting coloured adjacency matrices"""

    vertex_count: int
    matrices: Tuple[np.ndarray, ...]

    @classmethod
    def of(cls, matrices: Sequence) -> "KGraphModel":
        arrays = []
        for i, matrix in enumerate(matrices):
            array = np.asarray(matrix)
            if array.ndim != 2 or array.shape[0] != array.shape[1]:
                raise InvalidInputError(f"A_{i + 1} must be square")
            if not np.all(np.equal(np.mod(array, 1), 0)) or np.any(array < 0):
                raise InvalidInputError(f"A_{i + 1} must have nonnegative integer entries")
            arrays.append(array.astype(np.int64))
        if not arrays:
            raise InvalidInputError("A k-graph needs at least one colour")
        size = arrays[0].shape[0]
        if any(a.shape != (size, size) for a in arrays):
            raise InvalidInputError("All adjacency matrices must have the same size")
        return cls(size, tuple(arrays))

    @property
    def rank(self) -> int:
        return len(self.matrices)


def from_kgraph(m: KGraphModel, N: WeightMap) -> TransferSystem:
    """
    System of a k-graph: complete graph on the k colours, F_i = A_i

    rank_hint is the edge count of each colour.
    """
    for i in range(m.rank):
        for j in range(i + 1, m.rank):
            Ai, Aj = m.matrices[i], m.matrices[j]
            if not np.array_equal(Ai @ Aj, Aj @ Ai):
                diff = Ai @ Aj - Aj @ Ai
                index = np.unravel_index(int(np.argmax(np.abs(diff))), diff.shape)
                raise CommutationError((f"e{i + 1}", f"e{j + 1}"), tuple(int(x) for x in index),
                                       float(abs(diff[index])))
    graph = SimpleGraph.complete([f"e{i + 1}" for i in range(m.rank)])
    rank_hint = [max(1, int(A.sum())) for A in m.matrices]
    return TransferSystem.build(graph, list(m.matrices), N, rank_hint, label="kgraph")


def kgraph_path_counts(m: KGraphModel, degree: Sequence[int]) -> np.ndarray:
    """
    Brute-force path counts of the given degree

    Paths follow colour 1 edges degree[0] times, then colour 2 edges, and so
    on; entry (v, w) counts vertex sequences from v to w weighted by edge
    multiplicities.
    """
    colours = [c for c, count in enumerate(degree) for _ in range(count)]
    size = m.vertex_count
    counts = np.zeros((size, size), dtype=np.int64)
    for v in range(size):
        for middle in product(range(size), repeat=len(colours)):
            path = (v,) + middle
            total = 1
            for step, colour in enumerate(colours):
                total *= int(m.matrices[colour][path[step], path[step + 1]])
                if total == 0:
                    break
            counts[v, path[-1]] += total
    return counts


@dataclass(frozen=True)
class LocalMapModel:
    """Finite state set with commuting surjective self-maps"""

    states: Tuple[str, ...]
    maps: Tuple[Tuple[int, ...], ...]

    @classmethod
    def of(cls, states: Sequence[str], maps: Sequence[Sequence[int]]) -> "LocalMapModel":
        states = tuple(str(z) for z in states)
        size = len(states)
        checked = []
        for i, h in enumerate(maps):
            h = tuple(int(z) for z in h)
            if len(h) != size or any(z < 0 or z >= size for z in h):
                raise InvalidInputError(f"h_{i + 1} must map {size} states into range(0, {size})")
            if len(set(h)) != size:
                raise InvalidInputError(f"h_{i + 1} is not surjective")
            checked.append(h)
        if not checked:
            raise InvalidInputError("At least one local map is required")
        for i in range(len(checked)):
            for j in range(i + 1, len(checked)):
                hi, hj = checked[i], checked[j]
                for z in range(size):
                    if hi[hj[z]] != hj[hi[z]]:
                        raise InvalidInputError(
                            f"h_{i + 1} and h_{j + 1} do not commute at state {states[z]!r}"
                        )
        return cls(states, tuple(checked))


def from_local_maps(m: LocalMapModel, N: WeightMap) -> TransferSystem:
    """
    System of commuting surjective maps: F_i[z][w] = 1 iff h_i(w) = z

    Every column has exactly one nonzero entry, so mass is preserved.
    """
    size = len(m.states)
    matrices = []
    for h in m.maps:
        F = np.zeros((size, size), dtype=np.int64)
        for w, z in enumerate(h):
            F[z, w] = 1
        matrices.append(F)
    graph = SimpleGraph.complete([f"h{i + 1}" for i in range(len(m.maps))])
    rank_hint = [int(F.sum(axis=1).max()) for F in matrices]
    return TransferSystem.build(graph, matrices, N, rank_hint, label="local_maps")


def trivial_system(graph: SimpleGraph, N: WeightMap) -> TransferSystem:
    """Scalar system with F_s = [1] for every generator"""
    matrices = [np.ones((1, 1), dtype=np.int64) for _ in graph.vertices]
    return TransferSystem.build(graph, matrices, N, [1] * graph.size, label="trivial")


SWAP = np.array([[0, 2], [2, 0]], dtype=np.int64)


def example_optimal(n: int, I: Sequence[int], alpha: float) -> Tuple[TransferSystem, TraceVec]:
    """
    Two-dimensional system where subinvariance fails only at J = I

    Args:
        n: number of commuting generators (n >= 2)
        I: 1-based indices carrying the swap matrix and weight alpha
        alpha: weight on I, must exceed 2

    Returns:
        The system and the distinguished trace (1 - S/alpha)^(1-|I|) (0, 1)
    """
    I = sorted(set(int(i) for i in I))
    if n < 2:
        raise InvalidInputError("example_optimal needs n >= 2")
    if not I or I[0] < 1 or I[-1] > n:
        raise InvalidInputError(f"I must be a nonempty subset of 1..{n}")
    if not alpha > 2:
        raise InvalidInputError("alpha must be greater than 2")

    matrices = [SWAP if i in I else 2 * np.eye(2, dtype=np.int64) for i in range(1, n + 1)]
    weights = WeightMap(tuple(float(alpha) if i in I else 2.0 for i in range(1, n + 1)))
    graph = SimpleGraph.complete([f"e{i}" for i in range(1, n + 1)])
    sys_ = TransferSystem.build(graph, matrices, weights, [2] * n, label="example_optimal")

    resolvent = np.linalg.inv(np.eye(2) - SWAP / alpha)
    mu = np.linalg.matrix_power(resolvent, len(I) - 1) @ np.array([0.0, 1.0])
    return sys_, TraceVec.of(mu)


def optimal_admissible_radius(alpha: float, size: int) -> float:
    """Half-width of the lambda interval where (lambda, 1 - lambda) is admissible"""
    return 0.5 * ((alpha - 2.0) / (alpha + 2.0)) ** size


def bernoulli_pair(lam: float) -> TraceVec:
    return TraceVec.of([lam, 1.0 - lam])


def system_summary(sys_: TransferSystem) -> dict:
    """JSON-friendly description used in reports"""
    return {
        "label": sys_.label,
        "generators": list(sys_.graph.vertices),
        "edges": [list(edge) for edge in sys_.graph.edge_names()],
        "dimension": sys_.dim,
        "weights": [float(w) for w in sys_.weights.values],
        "complete_graph": sys_.graph.is_complete(),
        "rank_hint": list(sys_.rank_hint) if sys_.rank_hint else None,
    }
