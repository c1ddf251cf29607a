"""
KMS classification engine

Trace-level criteria for equilibrium states: subinvariance inequalities,
the operators T_beta and S_beta, Wold and product decompositions, the
NO(X) condition, gauge-invariance checks and the monotonicity probe.
"""

from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from math import comb
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import null_space, svdvals

from config import config
from services.monoid_service import (
    INFINITY, MonoidElement, cliques, enumerate_elements, identity, join,
)
from services.series_service import gibbs_series, neumann_partial_sum, orbit_vectors
from services.spectral_service import nonnegative_kernel_vector
from services.transfer_service import TraceVec, TransferSystem, clique_operator
from utils.errors import (
    BudgetExceededError, DivergenceError, InvalidInputError, SingularOperatorError,
    SubinvarianceError, UnsupportedSystemError,
)
from utils.logger import get_logger

logger = get_logger(__name__)


def positivity_slack(tau: TraceVec, tol: Optional[float] = None) -> float:
    """Absolute slack for entrywise positivity, relative to mass(tau)"""
    tol = config.positivity_tol if tol is None else tol
    mass = tau.mass
    return tol * mass if mass > 0 else tol


def _check_dim(sys_: TransferSystem, tau: TraceVec) -> None:
    if tau.dim != sys_.dim:
        raise InvalidInputError(f"Trace has dimension {tau.dim}, system has {sys_.dim}")


def _names(sys_: TransferSystem, letters) -> List[str]:
    return [sys_.graph.vertices[s] for s in letters]


@dataclass
class SubsetValue:
    """Inclusion-exclusion vector for one subset J"""

    subset: Tuple[str, ...]
    vector: List[float]
    minimum: float
    passed: bool


@dataclass
class SubinvarianceReport:
    """Clique subinvariance check over all nonempty J of generators"""

    beta: float
    tol: float
    entries: List[SubsetValue] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(entry.passed for entry in self.entries)

    @property
    def worst(self) -> Optional[SubsetValue]:
        if not self.entries:
            return None
        return min(self.entries, key=lambda entry: entry.minimum)

    @property
    def min_slack(self) -> float:
        worst = self.worst
        return worst.minimum if worst else 0.0

    def failing(self) -> List[SubsetValue]:
        return [entry for entry in self.entries if not entry.passed]

    def to_dict(self) -> dict:
        worst = self.worst
        return {
            "verdict": "pass" if self.passed else "fail",
            "beta": self.beta,
            "tolerance": self.tol,
            "worst_subset": list(worst.subset) if worst else None,
            "worst_minimum": worst.minimum if worst else None,
            "failing_subsets": [list(entry.subset) for entry in self.failing()],
            "subsets": [
                {"J": list(entry.subset), "vector": entry.vector,
                 "minimum": entry.minimum, "passed": entry.passed}
                for entry in self.entries
            ],
        }


def _clique_vectors(sys_: TransferSystem, tau: np.ndarray, beta: float) -> Dict[Tuple[int, ...], np.ndarray]:
    """N(s_K)^-beta F_{s_K} tau for every clique K, built from smaller cliques"""
    vectors: Dict[Tuple[int, ...], np.ndarray] = {(): tau}
    for clique in cliques(sys_.graph):
        s = clique[0]
        vectors[clique] = sys_.N(s) ** (-beta) * (sys_.F(s) @ vectors[clique[1:]])
    return vectors


def check_subinvariance(sys_: TransferSystem, tau: TraceVec, beta: float,
                        tol: Optional[float] = None) -> SubinvarianceReport:
    """
    Evaluate tau + sum over cliques K in J of (-1)^|K| N(s_K)^-beta F_{s_K} tau

    Every nonempty J of generators is checked; non-clique K contribute
    nothing because their join is infinite. Subset sums are accumulated
    with a zeta transform over bitmasks.
    """
    _check_dim(sys_, tau)
    n = sys_.graph.size
    if n > config.subset_cap:
        raise UnsupportedSystemError(
            f"{n} generators exceed the subset cap of {config.subset_cap}"
        )
    slack = positivity_slack(tau, tol)

    table = np.zeros((1 << n, sys_.dim))
    for clique, vector in _clique_vectors(sys_, tau.array, beta).items():
        mask = sum(1 << s for s in clique)
        table[mask] = (-1) ** len(clique) * vector

    for i in range(n):
        view = table.reshape(-1, 2, 1 << i, sys_.dim)
        view[:, 1] += view[:, 0]

    masks = sorted(range(1, 1 << n), key=lambda m: (bin(m).count("1"), [s for s in range(n) if m >> s & 1]))
    report = SubinvarianceReport(beta=beta, tol=slack)
    for mask in masks:
        letters = [s for s in range(n) if mask >> s & 1]
        vector = table[mask]
        minimum = float(vector.min())
        report.entries.append(SubsetValue(
            subset=tuple(_names(sys_, letters)),
            vector=[float(x) for x in vector],
            minimum=minimum,
            passed=minimum >= -slack,
        ))

    logger.info("Subinvariance at beta=%g: %s (worst %.3e)", beta,
                "pass" if report.passed else "fail", report.min_slack)
    return report


@dataclass
class GeneralSubinvarianceReport:
    """Subinvariance over finite sets J of short monoid elements"""

    beta: float
    tol: float
    length_cap: int
    subset_size: int
    checked: int = 0
    failures: int = 0
    worst_subset: Optional[Tuple[str, ...]] = None
    worst_minimum: float = 0.0

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_dict(self) -> dict:
        return {
            "verdict": "pass" if self.passed else "fail",
            "beta": self.beta,
            "length_cap": self.length_cap,
            "subset_size": self.subset_size,
            "checked": self.checked,
            "failures": self.failures,
            "worst_subset": list(self.worst_subset) if self.worst_subset else None,
            "worst_minimum": self.worst_minimum,
        }


def check_subinvariance_general(sys_: TransferSystem, tau: TraceVec, beta: float, length_cap: int,
                                subset_size: Optional[int] = None, tol: Optional[float] = None,
                                stop_at_first_failure: bool = False) -> GeneralSubinvarianceReport:
    """
    Subinvariance over all J of nonidentity elements of length <= length_cap

    Each J is grown one element at a time: adding x to J subtracts the
    measure of xP intersected with the current set, i.e. the terms
    (q_K v x) with flipped signs. Infinite joins drop out.
    """
    _check_dim(sys_, tau)
    subset_size = config.general_subset_size if subset_size is None else subset_size
    elements = enumerate_elements(sys_.graph, length_cap)[1:]
    total = sum(comb(len(elements), k) for k in range(1, subset_size + 1))
    if total > config.general_max_subsets:
        raise UnsupportedSystemError(
            f"{total} subsets exceed the limit of {config.general_max_subsets}; lower the length or size cap"
        )

    slack = positivity_slack(tau, tol)
    report = GeneralSubinvarianceReport(beta=beta, tol=slack, length_cap=length_cap, subset_size=subset_size)
    cache: Dict[MonoidElement, np.ndarray] = {}
    base = tau.array
    scaled = [sys_.N(s) ** (-beta) * sys_.F(s) for s in range(sys_.graph.size)]

    def vector_of(q: MonoidElement) -> np.ndarray:
        if q not in cache:
            vector = base
            for s in reversed(q.word):
                vector = scaled[s] @ vector
            cache[q] = vector
        return cache[q]

    def grow(start: int, terms: list, value: np.ndarray, chosen: tuple) -> bool:
        for index in range(start, len(elements)):
            x = elements[index]
            added = []
            delta = np.zeros(sys_.dim)
            for sign, q in terms:
                upper = join(q, x)
                if upper is INFINITY:
                    continue
                added.append((-sign, upper))
                delta -= sign * vector_of(upper)
            current = value + delta
            subset = chosen + (index,)
            report.checked += 1
            minimum = float(current.min())
            if report.worst_subset is None or minimum < report.worst_minimum:
                report.worst_minimum = minimum
                report.worst_subset = tuple(str(elements[i]) for i in subset)
            if minimum < -slack:
                report.failures += 1
                if stop_at_first_failure:
                    return False
            if len(subset) < subset_size:
                if not grow(index + 1, terms + added, current, subset):
                    return False
        return True

    if elements and subset_size > 0:
        grow(0, [(1, identity(sys_.graph))], base, ())
    logger.info("General subinvariance: %d subsets, %d failures", report.checked, report.failures)
    return report


def T_beta(sys_: TransferSystem, beta: float) -> np.ndarray:
    """I + sum over cliques K of (-1)^|K| N(s_K)^-beta F_{s_K}"""
    operator = np.eye(sys_.dim)
    for clique in cliques(sys_.graph):
        operator += (-1) ** len(clique) * clique_operator(sys_, clique, beta)
    return operator


def smallest_singular_value(sys_: TransferSystem, beta: float) -> float:
    return float(svdvals(T_beta(sys_, beta)).min())


def S_beta_solve(sys_: TransferSystem, beta: float, tau0: TraceVec,
                 tol: Optional[float] = None, budget: Optional[int] = None) -> TraceVec:
    """
    Solve T_beta x = tau0 and confirm x is the sum of the Gibbs series

    Raises:
        SingularOperatorError: T_beta singular or condition number above the cap
        DivergenceError: negative solution or series disagreeing with the solve
    """
    _check_dim(sys_, tau0)
    operator = T_beta(sys_, beta)
    condition = np.linalg.cond(operator)
    if not np.isfinite(condition) or condition > config.condition_max:
        raise SingularOperatorError(f"T_beta at beta={beta:g} has condition number {condition:.3e}")

    x = np.linalg.solve(operator, tau0.array)
    slack = positivity_slack(tau0, tol)
    if x.min() < -slack:
        raise DivergenceError(
            f"T_beta^-1 tau0 has negative entry {x.min():.3e}; beta={beta:g} is not above the critical value"
        )

    series = gibbs_series(sys_, beta, tau0.array, budget=budget, bound=float(x.sum()) + slack)
    gap = float(np.max(np.abs(series.total - x)))
    allowed = series.tail_bound + config.residual_tol * max(1.0, float(np.abs(x).sum()))
    if gap > allowed:
        raise DivergenceError(f"Gibbs series differs from the solve by {gap:.3e} (allowed {allowed:.3e})")

    return TraceVec.of(np.clip(x, 0.0, None))


def gibbs_state(sys_: TransferSystem, beta: float, tau0: TraceVec) -> TraceVec:
    """Finite-type tracial state generated by tau0, normalized to mass one"""
    return S_beta_solve(sys_, beta, tau0).normalized()


class TraceType(Enum):
    FINITE = "finite"
    INFINITE = "infinite"
    MIXED = "mixed"


@dataclass
class WoldResult:
    """tau = tau_f + tau_inf with generating trace tau0"""

    tau0: TraceVec
    tau_f: TraceVec
    tau_inf: TraceVec
    type: TraceType
    residuals: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "type": self.type.value,
            "tau0": list(self.tau0.entries),
            "tau_f": list(self.tau_f.entries),
            "tau_inf": list(self.tau_inf.entries),
            "mass_tau0": self.tau0.mass,
            "mass_tau_f": self.tau_f.mass,
            "mass_tau_inf": self.tau_inf.mass,
            "residuals": dict(self.residuals),
        }


def _require_subinvariant(sys_: TransferSystem, tau: TraceVec, beta: float,
                          tol: Optional[float]) -> SubinvarianceReport:
    report = check_subinvariance(sys_, tau, beta, tol)
    if not report.passed:
        worst = report.worst
        raise SubinvarianceError(
            f"Trace fails subinvariance at beta={beta:g}: J={list(worst.subset)} "
            f"has entry {worst.minimum:.3e}"
        )
    return report


def wold(sys_: TransferSystem, tau: TraceVec, beta: float,
         tol: Optional[float] = None, budget: Optional[int] = None) -> WoldResult:
    """
    Wold decomposition of a subinvariant trace

    tau0 = T_beta tau, tau_f is the Gibbs series of tau0 and tau_inf the
    remainder. A zero trace counts as finite.
    """
    _require_subinvariant(sys_, tau, beta, tol)
    raw = T_beta(sys_, beta) @ tau.array
    tau0 = np.clip(raw, 0.0, None)

    series = gibbs_series(sys_, beta, tau0, budget=budget, bound=tau.mass + positivity_slack(tau, tol))
    tau_f = series.total
    remainder = tau.array - tau_f
    tau_inf = np.clip(remainder, 0.0, None)

    mass_tol = config.residual_tol * max(1.0, tau.mass)
    if tau_inf.sum() <= mass_tol:
        kind = TraceType.FINITE
    elif tau0.sum() <= mass_tol:
        kind = TraceType.INFINITE
    else:
        kind = TraceType.MIXED

    residuals = {
        "tau0_clipped": float(np.max(np.abs(raw - tau0))),
        "tau_inf_clipped": float(np.max(np.abs(remainder - tau_inf))),
        "series_tail": series.tail_bound,
        "series_levels": series.levels,
    }
    logger.info("Wold at beta=%g: %s", beta, kind.value)
    return WoldResult(TraceVec.of(tau0), TraceVec.of(tau_f), TraceVec.of(tau_inf), kind, residuals)


@dataclass
class ProductComponent:
    """Part of tau finite in the coordinates of F and infinite elsewhere"""

    coordinates: FrozenSet[int]
    tau: np.ndarray
    tau0: np.ndarray
    fixed_point_residual: float


@dataclass
class ProductDecomposition:
    components: List[ProductComponent]
    residual: float
    names: Tuple[str, ...]

    def component(self, coordinates) -> ProductComponent:
        key = frozenset(coordinates)
        for component in self.components:
            if component.coordinates == key:
                return component
        raise KeyError(sorted(key))

    def to_dict(self) -> dict:
        return {
            "reconstruction_residual": self.residual,
            "components": [
                {
                    "F": [self.names[i] for i in sorted(c.coordinates)],
                    "tau_F": [float(x) for x in c.tau],
                    "tau_F0": [float(x) for x in c.tau0],
                    "mass": float(c.tau.sum()),
                    "fixed_point_residual": c.fixed_point_residual,
                }
                for c in self.components
            ],
        }


def product_decompose(sys_: TransferSystem, tau: TraceVec, beta: float,
                      tol: Optional[float] = None, budget: Optional[int] = None) -> ProductDecomposition:
    """
    Split tau coordinate by coordinate on a complete graph

    Each component rho is divided into sum_k A_i^k (1 - A_i) rho, finite
    in coordinate i, and the infinite remainder, with
    A_i = N(e_i)^-beta F_i. After all n coordinates the component indexed
    by F is finite exactly in the coordinates of F.
    """
    if not sys_.graph.is_complete():
        raise UnsupportedSystemError("product_decompose needs a complete graph")
    _require_subinvariant(sys_, tau, beta, tol)

    n = sys_.graph.size
    operators = [sys_.N(i) ** (-beta) * sys_.F(i).astype(float) for i in range(n)]
    components: Dict[FrozenSet[int], np.ndarray] = {frozenset(): tau.array}

    for i, A in enumerate(operators):
        split: Dict[FrozenSet[int], np.ndarray] = {}
        for coordinates, rho in components.items():
            generating = np.clip(rho - A @ rho, 0.0, None)
            finite, _ = neumann_partial_sum(A, generating, budget=budget)
            split[coordinates | {i}] = finite
            split[coordinates] = rho - finite
        components = split

    identity_matrix = np.eye(sys_.dim)
    result = []
    for coordinates in sorted(components, key=lambda c: (len(c), sorted(c))):
        part = components[coordinates]
        generating = part.copy()
        for i in sorted(coordinates):
            generating = (identity_matrix - operators[i]) @ generating
        residual = max(
            (float(np.max(np.abs(operators[i] @ generating - generating)))
             for i in range(n) if i not in coordinates),
            default=0.0,
        )
        result.append(ProductComponent(coordinates, part, generating, residual))

    reconstruction = float(np.max(np.abs(sum(components.values()) - tau.array)))
    return ProductDecomposition(result, reconstruction, sys_.graph.vertices)


def finite_type_certificate(sys_: TransferSystem, tau: TraceVec, beta: float,
                            budget: Optional[int] = None) -> dict:
    """
    Ratio-test evidence that tau is of finite type

    When sum_p N(p)^-beta F_p tau converges and tau is subinvariant the
    trace is of finite type; the Wold classification is reported next to
    the certificate.
    """
    try:
        series = gibbs_series(sys_, beta, tau.array, budget=budget)
        converges = np.isfinite(series.tail_bound)
        series_mass = float(series.total.sum())
        tail = series.tail_bound
    except (BudgetExceededError, DivergenceError) as e:
        logger.debug("Series for the certificate does not settle: %s", e)
        converges, series_mass, tail = False, None, None

    report = check_subinvariance(sys_, tau, beta)
    wold_type = wold(sys_, tau, beta, budget=budget).type.value if report.passed else None
    return {
        "series_converges": bool(converges),
        "series_mass": series_mass,
        "tail_bound": tail,
        "subinvariant": report.passed,
        "certified_finite": bool(converges and report.passed),
        "wold_type": wold_type,
    }


@dataclass
class NOReport:
    passed: bool
    residuals: Dict[str, float]
    tol: float

    def to_dict(self) -> dict:
        return {"verdict": "pass" if self.passed else "fail",
                "residuals": dict(self.residuals), "tolerance": self.tol}


def check_NO_condition(sys_: TransferSystem, tau: TraceVec, beta: float,
                       tol: Optional[float] = None) -> NOReport:
    """
    N(s)^-beta F_s tau = tau for every generator

    Valid as a criterion when left actions are injective and by compacts,
    which holds for the matrix models here.
    """
    _check_dim(sys_, tau)
    tol = (config.residual_tol if tol is None else tol) * max(1.0, tau.mass)
    residuals = {}
    for s, name in enumerate(sys_.graph.vertices):
        image = sys_.N(s) ** (-beta) * (sys_.F(s) @ tau.array)
        residuals[name] = float(np.max(np.abs(image - tau.array)))
    return NOReport(all(r <= tol for r in residuals.values()), residuals, tol)


def solve_NO_traces(sys_: TransferSystem, beta: float) -> Optional[TraceVec]:
    """A mass-one trace fixed by every N(s)^-beta F_s, or None"""
    stacked = np.vstack([
        sys_.N(s) ** (-beta) * sys_.F(s) - np.eye(sys_.dim) for s in range(sys_.graph.size)
    ])
    if null_space(stacked).shape[1] == 0:
        return None
    candidate = nonnegative_kernel_vector(stacked)
    if candidate.sum() <= 0 or np.max(np.abs(stacked @ candidate)) > config.residual_tol:
        return None
    return TraceVec.of(candidate)


@dataclass
class GaugeReport:
    verdict: str
    decay: str
    bound: str
    profile: Optional[List[float]]
    bound_margins: Optional[Dict[str, float]]

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "decay_check": self.decay,
            "bound_check": self.bound,
            "profile": None if self.profile is None else list(self.profile),
            "bound_margins": self.bound_margins,
        }


def decay_profile(sys_: TransferSystem, tau: TraceVec, beta: float, length: int,
                  budget: Optional[int] = None) -> List[float]:
    """d_l = max over |p| = l of N(p)^-beta (F_p tau)(1), for l <= length"""
    profile = [0.0] * (length + 1)
    for element, vector in orbit_vectors(sys_, beta, tau.array, length, budget).items():
        profile[len(element)] = max(profile[len(element)], float(vector.sum()))
    return profile


def check_gauge_sufficient(sys_: TransferSystem, tau: TraceVec, beta: float,
                           length: Optional[int] = None, delta: Optional[float] = None,
                           budget: Optional[int] = None) -> GaugeReport:
    """
    Evidence that KMS states with this trace are gauge invariant

    (a) the decay profile is reported as "decay" or "no decay"; it is
    evidence only. When listing the elements up to length would exceed
    budget the profile is skipped and reported as "unavailable".
    (b) N(s)^beta >= (1 + delta) m(s) for every generator is sufficient and
    yields "guaranteed"; without rank hints it is "unavailable".
    """
    _check_dim(sys_, tau)
    length = config.decay_length if length is None else length
    delta = config.gauge_delta if delta is None else delta
    if length < 1:
        raise InvalidInputError("Decay profile needs length >= 1")

    try:
        profile: Optional[List[float]] = decay_profile(sys_, tau, beta, length, budget)
    except BudgetExceededError as e:
        logger.info("Decay profile skipped: %s", e)
        profile = None

    if profile is None:
        decay = "unavailable"
    elif profile[length] == 0 or profile[length] < 1e-6 * profile[1]:
        decay = "decay"
    else:
        decay = "no decay"

    margins = None
    if sys_.rank_hint is None:
        bound = "unavailable"
    else:
        margins = {
            name: sys_.N(s) ** beta - (1 + delta) * sys_.rank_hint[s]
            for s, name in enumerate(sys_.graph.vertices)
        }
        bound = "guaranteed" if all(m >= 0 for m in margins.values()) else "not guaranteed"

    verdict = "guaranteed" if bound == "guaranteed" else decay
    return GaugeReport(verdict, decay, bound, profile, margins)


@dataclass
class MonotonicityReport:
    beta0: float
    rows: List[Dict[str, object]]

    @property
    def passed(self) -> bool:
        return all(row["passed"] for row in self.rows if not row.get("skipped"))

    @property
    def failures(self) -> List[float]:
        return [row["beta"] for row in self.rows if not row.get("skipped") and not row["passed"]]


def monotonicity_probe(sys_: TransferSystem, tau: TraceVec, beta0: float, betas: Sequence[float],
                       tol: Optional[float] = None) -> MonotonicityReport:
    """
    Re-check subinvariance above beta0

    With N(s) >= 1 subinvariance at beta0 persists for larger beta, so a
    failure here points to a numerical or implementation problem.
    """
    low = [name for s, name in enumerate(sys_.graph.vertices) if sys_.N(s) < 1]
    if low:
        raise UnsupportedSystemError(f"Monotonicity needs N(s) >= 1; violated for {low}")
    _require_subinvariant(sys_, tau, beta0, tol)

    rows: List[Dict[str, object]] = []
    for beta in betas:
        if beta <= beta0:
            rows.append({"beta": beta, "passed": True, "skipped": True, "min_slack": None})
            continue
        report = check_subinvariance(sys_, tau, beta, tol)
        rows.append({"beta": beta, "passed": report.passed, "skipped": False,
                     "min_slack": report.min_slack})
        if not report.passed:
            logger.error("Subinvariance lost at beta=%g after holding at %g", beta, beta0)
    return MonotonicityReport(beta0, rows)
