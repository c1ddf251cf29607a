"""
Boolean algebra generated by the cones pP

Sets are finite disjoint unions of cells. A cell (p, J) is the cone pP
when J is empty and p(P minus the union of sP, s in J) otherwise; J is
always a set of generators.
"""

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from config import config
from services.kms_service import T_beta, check_subinvariance
from services.monoid_service import (
    INFINITY, MonoidElement, SimpleGraph, cliques, enumerate_elements, generator,
    identity, join, left_quotient, leq, multiply, weight,
)
from services.series_service import orbit_vectors, ratio_tail
from services.transfer_service import TraceVec, TransferSystem, apply_Fp, clique_operator
from utils.errors import ContainmentError, GraphMismatchError, KMSError, SubinvarianceError
from utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class Cell:
    base: MonoidElement
    carve: FrozenSet[int] = frozenset()

    def sort_key(self) -> tuple:
        return (len(self.base), self.base.word, tuple(sorted(self.carve)))

    def __str__(self) -> str:
        if not self.carve:
            return f"{self.base}P"
        names = ",".join(self.base.graph.vertices[s] for s in sorted(self.carve))
        return f"{self.base}Ω{{{names}}}"


@dataclass(frozen=True)
class CellSet:
    """Finite disjoint union of cells in canonical order"""

    graph: SimpleGraph
    cells: Tuple[Cell, ...] = ()

    @classmethod
    def of(cls, graph: SimpleGraph, cells: Iterable[Cell]) -> "CellSet":
        cells = list(cells)
        for cell in cells:
            if cell.base.graph != graph:
                raise GraphMismatchError("Cell belongs to another monoid")
        return cls(graph, tuple(sorted(cells, key=Cell.sort_key)))

    def is_empty(self) -> bool:
        return not self.cells

    def __len__(self) -> int:
        return len(self.cells)

    def __str__(self) -> str:
        return " ⊔ ".join(str(cell) for cell in self.cells) if self.cells else "∅"


def _same_graph(A: CellSet, B: CellSet) -> None:
    if A.graph != B.graph:
        raise GraphMismatchError("Cell sets belong to different monoids")


def cone(p: MonoidElement) -> CellSet:
    return CellSet.of(p.graph, [Cell(p)])


def carved(p: MonoidElement, J: Iterable[int]) -> CellSet:
    """The single cell p Omega_J"""
    return CellSet.of(p.graph, [Cell(p, frozenset(J))])


def cell_contains(cell: Cell, p: MonoidElement) -> bool:
    if not leq(cell.base, p):
        return False
    return not any(leq(multiply(cell.base, generator(p.graph, s)), p) for s in cell.carve)


def contains(A: CellSet, p: MonoidElement) -> bool:
    return any(cell_contains(cell, p) for cell in A.cells)


def _intersect_cells(first: Cell, second: Cell) -> Optional[Cell]:
    """
    Intersection of two cells as a single cell or None

    With m = p v q, each carved cone psP either misses mP, contains it,
    or meets it in msP, so the result is m with a generator carve.
    """
    top = join(first.base, second.base)
    if top is INFINITY:
        return None
    carve = set()
    for cell in (first, second):
        for s in cell.carve:
            upper = join(top, multiply(cell.base, generator(top.graph, s)))
            if upper is INFINITY:
                continue
            if upper == top:
                return None
            step = left_quotient(top, upper)
            if len(step) != 1:
                raise KMSError(f"Carving {cell} at {top} produced a non-generator step {step}")
            carve.add(step.word[0])
    return Cell(top, frozenset(carve))


def intersect(A: CellSet, B: CellSet) -> CellSet:
    _same_graph(A, B)
    cells = []
    for first in A.cells:
        for second in B.cells:
            cell = _intersect_cells(first, second)
            if cell is not None:
                cells.append(cell)
    return CellSet.of(A.graph, cells)


def _cell_complement(cell: Cell) -> CellSet:
    """
    P minus a cell

    P minus pP splits along the normal form s_1...s_m of p into the cells
    (s_1...s_{i-1}, {s_i}); the carved part of pP is added back as
    disjoint pieces p t_i P minus the earlier p t_j P.
    """
    graph = cell.base.graph
    word = cell.base.word
    cells = [Cell(MonoidElement(word[:i], graph), frozenset({word[i]})) for i in range(len(word))]
    ordered = sorted(cell.carve)
    for i, t in enumerate(ordered):
        piece = _intersect_cells(
            Cell(multiply(cell.base, generator(graph, t))),
            Cell(cell.base, frozenset(ordered[:i])),
        )
        if piece is not None:
            cells.append(piece)
    return CellSet.of(graph, cells)


def complement(A: CellSet) -> CellSet:
    result = cone(identity(A.graph))
    for cell in A.cells:
        result = intersect(result, _cell_complement(cell))
    return result


def _sample(graph: SimpleGraph, length: Optional[int]) -> List[MonoidElement]:
    return enumerate_elements(graph, config.audit_length if length is None else length)


def complement_in(parent: CellSet, A: CellSet, audit_length: Optional[int] = None) -> CellSet:
    """
    parent minus A, for A contained in parent

    Containment is audited on all elements up to audit_length.
    """
    _same_graph(parent, A)
    for p in _sample(parent.graph, audit_length):
        if contains(A, p) and not contains(parent, p):
            raise ContainmentError(f"{p} lies in {A} but not in {parent}")
    return intersect(parent, complement(A))


def audit_disjoint(A: CellSet, length: Optional[int] = None) -> Optional[MonoidElement]:
    """First sampled element lying in two cells, or None"""
    for p in _sample(A.graph, length):
        if sum(cell_contains(cell, p) for cell in A.cells) > 1:
            return p
    return None


def disjoint_union(A: CellSet, B: CellSet, audit_length: Optional[int] = None) -> CellSet:
    _same_graph(A, B)
    union = CellSet.of(A.graph, A.cells + B.cells)
    overlap = audit_disjoint(union, audit_length)
    if overlap is not None:
        raise ContainmentError(f"{overlap} lies in both operands of a disjoint union")
    return union


def _omega_measure(sys_: TransferSystem, tau: np.ndarray, beta: float, carve: FrozenSet[int]) -> np.ndarray:
    value = tau.copy()
    if carve:
        for clique in cliques(sys_.graph, restrict_to=sorted(carve)):
            value += (-1) ** len(clique) * (clique_operator(sys_, clique, beta) @ tau)
    return value


def measure(A: CellSet, sys_: TransferSystem, tau: TraceVec, beta: float) -> np.ndarray:
    """
    Trace-valued measure of A

    mu(p Omega_J) = N(p)^-beta F_p (tau + sum over cliques K of J of
    (-1)^|K| N(s_K)^-beta F_{s_K} tau).
    """
    if A.graph != sys_.graph:
        raise GraphMismatchError("Cell set and system use different graphs")
    total = np.zeros(sys_.dim)
    for cell in A.cells:
        local = TraceVec.of(_omega_measure(sys_, tau.array, beta, cell.carve), positive=False)
        total += weight(cell.base, sys_.weights) ** (-beta) * apply_Fp(sys_, cell.base, local).array
    return total


def atom_weights(sys_: TransferSystem, tau: TraceVec, beta: float, up_to_length: int,
                 tol: Optional[float] = None, budget: Optional[int] = None) -> Dict[MonoidElement, float]:
    """
    w_p = N(p)^-beta (F_p tau_S)(1) with tau_S = T_beta tau, for |p| <= up_to_length

    Raises:
        SubinvarianceError: tau is not subinvariant at beta
        BudgetExceededError: more than budget elements up to that length
    """
    report = check_subinvariance(sys_, tau, beta, tol)
    if not report.passed:
        raise SubinvarianceError(
            f"Atom weights need a subinvariant trace; J={list(report.worst.subset)} fails"
        )
    generating = np.clip(T_beta(sys_, beta) @ tau.array, 0.0, None)
    return {
        element: float(vector.sum())
        for element, vector in orbit_vectors(sys_, beta, generating, up_to_length, budget).items()
    }


def atom_tail_bound(level_sums: Sequence[float]) -> float:
    """Ratio-test bound on the atom mass beyond the last level"""
    return ratio_tail(list(level_sums))


def atom_summary(sys_: TransferSystem, tau: TraceVec, beta: float, up_to_length: int,
                 budget: Optional[int] = None) -> dict:
    """Atom weights with level sums, total and tail bound, for reports"""
    weights = atom_weights(sys_, tau, beta, up_to_length, budget=budget)
    level_sums = [0.0] * (up_to_length + 1)
    for element, value in weights.items():
        level_sums[len(element)] += value
    total = sum(weights.values())
    tail = atom_tail_bound(level_sums)
    return {
        "weights": {str(element): value for element, value in weights.items()},
        "level_sums": level_sums,
        "total": total,
        "tail_bound": tail,
        "trace_mass": tau.mass,
        "deficit": tau.mass - total,
    }
