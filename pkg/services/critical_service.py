"""
Critical inverse temperature and phase-transition witnesses
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from config import config
from services.kms_service import T_beta, check_subinvariance, smallest_singular_value
from services.series_service import level_operator
from services.spectral_service import nonnegative_kernel_vector, perron_vector, spectral_radius
from services.transfer_service import TraceVec, TransferSystem
from utils.errors import DivergenceError, UnsupportedSystemError
from utils.logger import get_logger

logger = get_logger(__name__)

BRACKET_LIMIT = 1e6
SINGULAR_THRESHOLD = 1e-8


def _require_weights_above_one(sys_: TransferSystem) -> None:
    low = [name for s, name in enumerate(sys_.graph.vertices) if not sys_.N(s) > 1]
    if low:
        raise UnsupportedSystemError(f"Critical temperature needs N(s) > 1; violated for {low}")


def _spectral_terms(sys_: TransferSystem) -> List[Dict[str, float]]:
    terms = []
    for s, name in enumerate(sys_.graph.vertices):
        radius = spectral_radius(sys_.F(s))
        ratio = math.log(radius.value) / math.log(sys_.N(s)) if radius.value > 0 else -math.inf
        terms.append({"generator": name, "spectral_radius": radius.value,
                      "method": radius.method, "beta": ratio})
    return terms


def growth_rate(sys_: TransferSystem, beta: float) -> float:
    """Exponential growth rate of the level sums of N(p)^-beta F_p"""
    operator, _ = level_operator(sys_, beta)
    if operator.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(operator))))


def growth_abscissa(sys_: TransferSystem, tol: Optional[float] = None) -> float:
    """
    Root of growth_rate(beta) = 1 by bisection, polished with brentq

    The bracket is widened geometrically in both directions; a growth rate
    that vanishes identically gives -inf.
    """
    _require_weights_above_one(sys_)
    tol = config.bisection_tol if tol is None else tol

    def excess(beta: float) -> float:
        return growth_rate(sys_, beta) - 1.0

    if growth_rate(sys_, 0.0) == 0.0:
        return -math.inf

    hi, step = 1.0, 1.0
    while excess(hi) >= 0:
        hi += step
        step *= 2
        if hi > BRACKET_LIMIT:
            raise DivergenceError("Could not bracket the critical temperature from above")
    lo, step = hi - 1.0, 1.0
    while excess(lo) < 0:
        lo -= step
        step *= 2
        if lo < -BRACKET_LIMIT:
            raise DivergenceError("Could not bracket the critical temperature from below")

    while hi - lo > tol:
        middle = 0.5 * (lo + hi)
        if excess(middle) >= 0:
            lo = middle
        else:
            hi = middle
        logger.debug("Bisection bracket [%.12g, %.12g]", lo, hi)

    if excess(lo) == 0:
        return lo
    return float(brentq(excess, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps))


def critical_beta(sys_: TransferSystem, method: str = "auto") -> float:
    """
    Critical inverse temperature

    Complete graphs use max_i log r(F_i) / log N(e_i) unless method is
    "growth"; other graphs use the growth abscissa.
    """
    _require_weights_above_one(sys_)
    if method not in ("auto", "spectral", "growth"):
        raise ValueError(f"Unknown method {method!r}")
    if method == "spectral" and not sys_.graph.is_complete():
        raise UnsupportedSystemError("The spectral formula applies to complete graphs only")

    if method != "growth" and sys_.graph.is_complete():
        return max(term["beta"] for term in _spectral_terms(sys_))
    return growth_abscissa(sys_)


def invertibility_threshold(sys_: TransferSystem, beta_c: float, span: float = 5.0,
                            samples: int = 200) -> Dict[str, object]:
    """
    Scan the smallest singular value of T_beta above beta_c

    If T_beta is nearly singular somewhere above beta_c, the largest such
    beta is located and reported as the invertibility threshold.
    """
    start = beta_c + max(10 * config.bisection_tol, 1e-3)
    grid = np.linspace(start, beta_c + span, samples)
    sigmas = np.array([smallest_singular_value(sys_, b) for b in grid])
    singular = np.flatnonzero(sigmas < SINGULAR_THRESHOLD)
    if singular.size == 0:
        return {"agrees": True, "min_singular_value": float(sigmas.min()), "threshold": beta_c}

    last = int(singular[-1])
    left = grid[max(last - 1, 0)]
    right = grid[min(last + 1, samples - 1)]
    found = minimize_scalar(lambda b: smallest_singular_value(sys_, b), bounds=(left, right), method="bounded")
    logger.warning("T_beta is nearly singular at beta=%.8g above the growth abscissa %.8g", found.x, beta_c)
    return {"agrees": False, "min_singular_value": float(found.fun), "threshold": float(found.x)}


@dataclass
class CriticalReport:
    beta_c: float
    method: str
    spectral_terms: Optional[List[Dict[str, float]]] = None
    growth_abscissa: Optional[float] = None
    invertibility: Dict[str, object] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "beta_c": None if not math.isfinite(self.beta_c) else self.beta_c,
            "method": self.method,
            "spectral_terms": self.spectral_terms,
            "growth_abscissa": (None if self.growth_abscissa is None or not math.isfinite(self.growth_abscissa)
                                else self.growth_abscissa),
            "invertibility": self.invertibility,
        }


def critical_report(sys_: TransferSystem) -> CriticalReport:
    """beta_c with the spectral formula, the growth abscissa and the invertibility scan"""
    _require_weights_above_one(sys_)
    abscissa = growth_abscissa(sys_)
    if sys_.graph.is_complete():
        terms = _spectral_terms(sys_)
        beta_c = max(term["beta"] for term in terms)
        report = CriticalReport(beta_c, "spectral", terms, abscissa)
        if math.isfinite(beta_c) and math.isfinite(abscissa) and abs(beta_c - abscissa) > 1e-5:
            logger.warning("Spectral formula %.10g and growth abscissa %.10g disagree", beta_c, abscissa)
    else:
        report = CriticalReport(abscissa, "growth", None, abscissa)

    if math.isfinite(report.beta_c):
        report.invertibility = invertibility_threshold(sys_, report.beta_c)
    return report


def _resolvent_limit(sys_: TransferSystem, beta_c: float) -> Optional[np.ndarray]:
    """T_t^-1 applied to the uniform trace, normalized, for t just above beta_c"""
    start = np.ones(sys_.dim)
    vector = None
    for gap in (1e-6, 1e-8, 1e-10):
        try:
            solved = np.linalg.solve(T_beta(sys_, beta_c + gap), start)
        except np.linalg.LinAlgError:
            break
        if solved.sum() <= 0 or not np.all(np.isfinite(solved)):
            break
        vector = np.clip(solved / solved.sum(), 0.0, None)
    return vector


def infinite_type_at_critical(sys_: TransferSystem, beta_c: Optional[float] = None) -> Optional[TraceVec]:
    """
    Tracial state at beta_c of infinite type, or None

    Candidates, in order: the Perron vector of the factor attaining beta_c
    (complete graphs), the normalized limit of T_t^-1 as t decreases to
    beta_c, and the nonnegative kernel vector of T_{beta_c}. A candidate
    must satisfy |T_{beta_c} tau| <= residual_tol; one that is also
    subinvariant is preferred.
    """
    beta_c = critical_beta(sys_) if beta_c is None else beta_c
    if not math.isfinite(beta_c):
        raise UnsupportedSystemError("No witness exists when beta_c is -inf")
    operator = T_beta(sys_, beta_c)

    candidates = []
    if sys_.graph.is_complete():
        terms = _spectral_terms(sys_)
        best = int(np.argmax([term["beta"] for term in terms]))
        candidates.append(perron_vector(sys_.F(best), terms[best]["spectral_radius"]))
    candidates.append(_resolvent_limit(sys_, beta_c))
    candidates.append(nonnegative_kernel_vector(operator))

    admissible = []
    for candidate in candidates:
        if candidate is None or candidate.sum() <= 0:
            continue
        residual = float(np.max(np.abs(operator @ candidate)))
        if residual > config.residual_tol:
            continue
        tau = TraceVec.of(candidate)
        if check_subinvariance(sys_, tau, beta_c).passed:
            return tau
        admissible.append(tau)

    if admissible:
        logger.warning("Witness at beta_c annihilates T_beta but is not subinvariant")
        return admissible[0]
    return None


def check_subinvariance_reduced(sys_: TransferSystem, tau: TraceVec, beta: float) -> Dict[str, object]:
    """
    Above beta_c on a complete graph, J = S alone decides subinvariance

    Reports the one-inequality verdict next to the full check.
    """
    if not sys_.graph.is_complete():
        raise UnsupportedSystemError("The one-inequality reduction applies to complete graphs")
    beta_c = critical_beta(sys_)
    if not beta > beta_c:
        raise UnsupportedSystemError(f"beta={beta:g} is not above beta_c={beta_c:g}")
    full = check_subinvariance(sys_, tau, beta)
    top = full.entries[-1]
    return {
        "beta_c": beta_c,
        "reduced_verdict": "pass" if top.passed else "fail",
        "full_verdict": "pass" if full.passed else "fail",
        "agrees": top.passed == full.passed,
    }
