"""
Perron-Frobenius helpers for nonnegative matrices
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import svd
from scipy.optimize import nnls

from config import config
from utils.logger import get_logger

logger = get_logger(__name__)


@dataclass
class SpectralRadius:
    """Spectral radius with the evidence behind it"""

    value: float
    method: str
    iterations: int
    reference: float


def power_iteration(matrix: np.ndarray, tol: Optional[float] = None, max_iter: Optional[int] = None):
    """
    Dominant eigenvalue of a nonnegative matrix

    Iterates with F + I from the all-ones vector, which keeps iterates
    strictly positive, and stops when the Collatz-Wielandt bounds
    min (Ax)_i/x_i <= r <= max (Ax)_i/x_i meet.

    Returns:
        (estimate, vector, iterations, converged)
    """
    tol = config.spectral_tol if tol is None else tol
    max_iter = config.spectral_max_iter if max_iter is None else max_iter
    A = np.asarray(matrix, dtype=float) + np.eye(len(matrix))
    x = np.full(len(matrix), 1.0 / len(matrix))
    lower, upper = 0.0, np.inf

    for iteration in range(1, max_iter + 1):
        y = A @ x
        ratios = y / x
        lower, upper = float(ratios.min()), float(ratios.max())
        if upper - lower <= tol * max(1.0, upper):
            return 0.5 * (lower + upper) - 1.0, y / y.sum(), iteration, True
        x = y / y.sum()

    return 0.5 * (lower + upper) - 1.0, x, max_iter, False


def reference_radius(matrix: np.ndarray) -> float:
    """Largest eigenvalue modulus, via the characteristic polynomial when small"""
    matrix = np.asarray(matrix, dtype=float)
    if len(matrix) <= 4:
        roots = np.roots(np.poly(matrix))
        return float(np.max(np.abs(roots))) if roots.size else 0.0
    return float(np.max(np.abs(np.linalg.eigvals(matrix))))


def spectral_radius(matrix: np.ndarray) -> SpectralRadius:
    matrix = np.asarray(matrix, dtype=float)
    estimate, _, iterations, converged = power_iteration(matrix)
    reference = reference_radius(matrix)
    eigen = float(np.max(np.abs(np.linalg.eigvals(matrix))))

    if converged and abs(estimate - eigen) <= 1e-6 * max(1.0, eigen):
        return SpectralRadius(max(estimate, 0.0), "power_iteration", iterations, reference)

    if converged:
        logger.warning("Power iteration (%.12g) disagrees with eigenvalues (%.12g); using eigenvalues",
                       estimate, eigen)
    else:
        logger.debug("Power iteration did not converge after %d steps; using eigenvalues", iterations)
    return SpectralRadius(eigen, "eigenvalues", iterations, reference)


def _normalized_nonnegative(vector: np.ndarray, tol: float) -> Optional[np.ndarray]:
    vector = np.real(np.asarray(vector))
    if vector.sum() < 0:
        vector = -vector
    scale = np.max(np.abs(vector)) if vector.size else 0.0
    if scale == 0 or vector.min() < -tol * scale:
        return None
    vector = np.clip(vector, 0.0, None)
    return vector / vector.sum()


def _nnls_kernel(matrix: np.ndarray) -> np.ndarray:
    """Nonnegative x with sum 1 minimizing |matrix x|"""
    d = matrix.shape[1]
    weight = max(1.0, float(np.abs(matrix).max()))
    system = np.vstack([matrix, weight * np.ones((1, d))])
    target = np.zeros(matrix.shape[0] + 1)
    target[-1] = weight
    x, _ = nnls(system, target)
    total = x.sum()
    return x / total if total > 0 else x


def perron_vector(matrix: np.ndarray, radius: float, tol: float = 1e-9) -> Optional[np.ndarray]:
    """
    Nonnegative eigenvector of mass one for the eigenvalue radius

    Eigen decomposition first; NNLS on (radius I - F) as fallback.
    """
    matrix = np.asarray(matrix, dtype=float)
    values, vectors = np.linalg.eig(matrix)
    closest = int(np.argmin(np.abs(values - radius)))
    candidate = _normalized_nonnegative(vectors[:, closest], tol)
    if candidate is not None:
        return candidate
    logger.debug("Eigenvector for %.6g is not sign-definite; trying NNLS", radius)
    return _nnls_kernel(radius * np.eye(len(matrix)) - matrix)


def nonnegative_kernel_vector(matrix: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """
    Nonnegative mass-one vector nearly annihilated by matrix

    Uses the right singular vector of the smallest singular value when it
    is sign-definite, otherwise nonnegative least squares.
    """
    matrix = np.asarray(matrix, dtype=float)
    _, _, vt = svd(matrix)
    candidate = _normalized_nonnegative(vt[-1], tol)
    if candidate is not None:
        return candidate
    return _nnls_kernel(matrix)
