"""
Exception hierarchy for the KMS trace classifier

Every analysis error derives from ValueError so callers that only know
about bad input can keep catching ValueError.
"""

from typing import Optional


class KMSError(ValueError):
    """Base class for all analysis errors"""


class InvalidInputError(KMSError):
    """Malformed argument: unknown letter, wrong dimension, bad range"""


class GraphMismatchError(KMSError):
    """Operands live on different graphs"""


class CommutationError(KMSError):
    """Matrices attached to an edge do not commute"""

    def __init__(self, edge: tuple, entry: tuple, value: float):
        self.edge = edge
        self.entry = entry
        self.value = value
        super().__init__(
            f"F_{edge[0]} and F_{edge[1]} do not commute: "
            f"commutator entry {entry} = {value:.3e}"
        )


class SubinvarianceError(KMSError):
    """The trace fails the subinvariance inequalities at this beta"""


class UnsupportedSystemError(KMSError):
    """The system is outside what an analysis can handle"""


class SingularOperatorError(KMSError):
    """T_beta is singular or too badly conditioned to invert"""


class DivergenceError(KMSError):
    """A Gibbs series does not converge to the solved value"""


class BudgetExceededError(KMSError):
    """Series accumulation ran past its work budget"""


class ContainmentError(KMSError):
    """A cell set is not contained in its claimed parent"""


class InconsistentJoinTableError(KMSError):
    """A join table is not the join of a partial order"""


class ModelFileError(KMSError):
    """Model file could not be parsed or failed schema validation"""

    def __init__(self, message: str, location: Optional[str] = None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)
