"""
Gibbs series summation over normal forms

Level sums of N(p)^-beta F_p v are accumulated by dynamic programming on
the normal form automaton, so the cost grows with the number of automaton
states instead of the number of monoid elements.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, FrozenSet, Iterator, List, Optional, Tuple

import numpy as np

from config import config
from services.monoid_service import MonoidElement, NormalFormAutomaton, SimpleGraph
from services.transfer_service import TransferSystem
from utils.errors import BudgetExceededError, DivergenceError
from utils.logger import get_logger

logger = get_logger(__name__)


@lru_cache(maxsize=64)
def automaton_for(graph: SimpleGraph) -> NormalFormAutomaton:
    return NormalFormAutomaton(graph)


@dataclass
class SeriesResult:
    """Partial sum of a Gibbs series with its truncation data"""

    total: np.ndarray
    level_masses: List[float] = field(default_factory=list)
    tail_bound: float = 0.0
    work: int = 0

    @property
    def levels(self) -> int:
        return len(self.level_masses)


def scaled_generators(sys_: TransferSystem, beta: float) -> List[np.ndarray]:
    return [sys_.N(s) ** (-beta) * sys_.F(s).astype(float) for s in range(sys_.graph.size)]


def iterate_levels(sys_: TransferSystem, beta: float, vector: np.ndarray) -> Iterator[Tuple[np.ndarray, int]]:
    """
    Yield (level sum, work so far) for word lengths 0, 1, 2, ...

    Work counts automaton transitions performed.
    """
    automaton = automaton_for(sys_.graph)
    scaled = scaled_generators(sys_, beta)
    current: Dict[FrozenSet[int], np.ndarray] = {automaton.initial: np.asarray(vector, dtype=float)}
    work = 0
    while True:
        yield sum(current.values(), np.zeros(sys_.dim)), work
        following: Dict[FrozenSet[int], np.ndarray] = {}
        for state, v in current.items():
            if not np.any(v):
                continue
            for b, target in automaton.transitions[state].items():
                w = scaled[b] @ v
                if target in following:
                    following[target] = following[target] + w
                else:
                    following[target] = w
                work += 1
        current = following


def ratio_tail(level_masses: List[float]) -> float:
    """Geometric tail estimate from the last two level masses"""
    if not level_masses or level_masses[-1] <= 0:
        return 0.0
    if len(level_masses) < 2 or level_masses[-2] <= 0:
        return float("inf")
    ratio = level_masses[-1] / level_masses[-2]
    if ratio >= 1:
        return float("inf")
    return level_masses[-1] * ratio / (1 - ratio)


def gibbs_series(sys_: TransferSystem, beta: float, tau0: np.ndarray,
                 tol: Optional[float] = None, budget: Optional[int] = None,
                 bound: Optional[float] = None) -> SeriesResult:
    """
    Sum N(p)^-beta F_p tau0 over the monoid

    Args:
        sys_: transfer system
        beta: inverse temperature
        tau0: nonnegative generating vector
        tol: stop once the tail estimate is below tol times the partial mass
            on two consecutive levels
        budget: maximal number of automaton transitions
        bound: optional upper bound on the total mass; exceeding it means
            the series is not converging to the expected value

    Returns:
        SeriesResult with the partial sum, level masses and tail bound
    """
    tol = config.series_tol if tol is None else tol
    budget = config.series_budget if budget is None else budget
    total = np.zeros(sys_.dim)
    result = SeriesResult(total=total)
    settled = 0

    for level, (vector, work) in enumerate(iterate_levels(sys_, beta, tau0)):
        result.work = work
        if work > budget:
            raise BudgetExceededError(
                f"Gibbs series exceeded the budget of {budget} steps at level {level} "
                f"(partial mass {total.sum():.6g})"
            )
        if level > config.series_max_levels:
            raise BudgetExceededError(f"Gibbs series did not settle within {config.series_max_levels} levels")

        total += vector
        mass = float(vector.sum())
        result.level_masses.append(mass)

        if bound is not None and total.sum() > bound * (1 + 1e-9) + tol:
            raise DivergenceError(
                f"Partial sums reached mass {total.sum():.6g} above the bound {bound:.6g} at level {level}"
            )

        if not np.any(vector):
            result.tail_bound = 0.0
            break

        tail = ratio_tail(result.level_masses)
        result.tail_bound = tail
        if level >= 1 and tail <= tol * max(float(total.sum()), np.finfo(float).tiny):
            settled += 1
            if settled >= 2:
                break
        else:
            settled = 0

    logger.debug("Gibbs series: %d levels, tail %.3e, work %d",
                 result.levels, result.tail_bound, result.work)
    result.total = total
    return result


def level_operator(sys_: TransferSystem, beta: float) -> Tuple[np.ndarray, List[int]]:
    """
    Transfer matrix of the level recursion

    Block (target, source) is the sum of N(b)^-beta F_b over letters b
    leading from source to target. Returns the matrix restricted to the
    coordinates reachable from the initial state, and the kept indices.
    """
    automaton = automaton_for(sys_.graph)
    order = {state: i for i, state in enumerate(automaton.states)}
    d = sys_.dim
    size = len(order) * d
    operator = np.zeros((size, size))
    scaled = scaled_generators(sys_, beta)
    for state, moves in automaton.transitions.items():
        source = order[state] * d
        for b, target in moves.items():
            row = order[target] * d
            operator[row:row + d, source:source + d] += scaled[b]

    # keep only coordinates reachable from the initial state
    pattern = operator > 0
    reached = np.zeros(size, dtype=bool)
    start = order[automaton.initial] * d
    reached[start:start + d] = True
    frontier = reached.copy()
    while frontier.any():
        following = pattern[:, frontier].any(axis=1) & ~reached
        reached |= following
        frontier = following
    kept = [int(i) for i in np.flatnonzero(reached)]
    return operator[np.ix_(kept, kept)], kept


def orbit_vectors(sys_: TransferSystem, beta: float, vector: np.ndarray,
                  up_to_length: int, budget: Optional[int] = None) -> Dict[MonoidElement, np.ndarray]:
    """
    N(p)^-beta F_p vector for every element p with |p| <= up_to_length

    Normal forms are grown by prepending letters the automaton allows, so
    each vector is one matrix product away from the vector of its suffix.
    Keys come level by level, lexicographically within a level.

    Raises:
        BudgetExceededError: more than budget elements (default
            config.series_budget) would be listed
    """
    budget = config.series_budget if budget is None else budget
    automaton = automaton_for(sys_.graph)
    scaled = scaled_generators(sys_, beta)
    level = {(): (automaton.initial, np.asarray(vector, dtype=float))}
    result: Dict[MonoidElement, np.ndarray] = {}
    for length in range(up_to_length + 1):
        for word in sorted(level):
            result[MonoidElement(word, sys_.graph)] = level[word][1]
        if length == up_to_length:
            break
        upcoming = sum(len(automaton.transitions[state]) for state, _ in level.values())
        if len(result) + upcoming > budget:
            raise BudgetExceededError(
                f"Listing elements up to length {up_to_length} needs more than {budget} vectors "
                f"({len(result) + upcoming} by length {length + 1}); lower the length or raise the budget"
            )
        grown = {}
        for word, (state, v) in level.items():
            for b, target in automaton.transitions[state].items():
                grown[(b,) + word] = (target, scaled[b] @ v)
        level = grown
    return result


def neumann_partial_sum(operator: np.ndarray, vector: np.ndarray,
                        tol: Optional[float] = None, budget: Optional[int] = None) -> Tuple[np.ndarray, float]:
    """
    Sum of operator^k vector for a nonnegative operator and vector

    Returns the partial sum and the ratio-test tail estimate.
    """
    tol = config.series_tol if tol is None else tol
    budget = config.series_budget if budget is None else budget
    term = np.asarray(vector, dtype=float)
    total = term.copy()
    masses = [float(term.sum())]
    settled = 0
    for _ in range(budget):
        if not np.any(term):
            return total, 0.0
        term = operator @ term
        total += term
        masses.append(float(term.sum()))
        tail = ratio_tail(masses)
        if tail <= tol * max(float(total.sum()), np.finfo(float).tiny):
            settled += 1
            if settled >= 2:
                return total, tail
        else:
            settled = 0
    raise BudgetExceededError(f"Neumann series did not settle within {budget} terms")
