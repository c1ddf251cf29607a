"""
Configuration module for the KMS trace classifier
Loads environment variables and provides numerical settings
"""

import os
from dataclasses import dataclass, replace
from typing import Optional
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

@dataclass
class Config:
    """Numerical tolerances and budgets from environment variables"""

    # Positivity and residual tolerances
    positivity_tol: float = float(os.getenv('KMS_POSITIVITY_TOL', '1e-9'))
    residual_tol: float = float(os.getenv('KMS_RESIDUAL_TOL', '1e-8'))
    commutation_tol: float = float(os.getenv('KMS_COMMUTATION_TOL', '1e-9'))
    trace_slack: float = float(os.getenv('KMS_TRACE_SLACK', '1e-12'))

    # Gibbs series summation
    series_tol: float = float(os.getenv('KMS_SERIES_TOL', '1e-13'))
    series_budget: int = int(os.getenv('KMS_SERIES_BUDGET', '1000000'))
    series_max_levels: int = int(os.getenv('KMS_SERIES_MAX_LEVELS', '10000'))

    # Subset enumeration guards
    subset_cap: int = int(os.getenv('KMS_SUBSET_CAP', '20'))
    general_subset_size: int = int(os.getenv('KMS_GENERAL_SUBSET_SIZE', '4'))
    general_max_subsets: int = int(os.getenv('KMS_GENERAL_MAX_SUBSETS', '2000000'))
    audit_length: int = int(os.getenv('KMS_AUDIT_LENGTH', '6'))

    # Spectral analysis and critical temperature
    spectral_tol: float = float(os.getenv('KMS_SPECTRAL_TOL', '1e-10'))
    spectral_max_iter: int = int(os.getenv('KMS_SPECTRAL_MAX_ITER', '10000'))
    bisection_tol: float = float(os.getenv('KMS_BISECTION_TOL', '1e-6'))
    condition_max: float = float(os.getenv('KMS_CONDITION_MAX', '1e12'))

    # Gauge invariance and atoms
    gauge_delta: float = float(os.getenv('KMS_GAUGE_DELTA', '0.1'))
    decay_length: int = int(os.getenv('KMS_DECAY_LENGTH', '8'))
    atom_length: int = int(os.getenv('KMS_ATOM_LENGTH', '8'))

    log_level: str = os.getenv('KMS_LOG_LEVEL', 'WARNING')

    def with_overrides(self, tol: Optional[float] = None, budget: Optional[int] = None) -> "Config":
        """Copy with per-invocation CLI overrides applied"""
        changes = {}
        if tol is not None:
            changes["positivity_tol"] = tol
        if budget is not None:
            changes["series_budget"] = budget
        return replace(self, **changes)

    def tolerances(self) -> dict:
        """Tolerances echoed into every report"""
        return {
            "positivity_tol": self.positivity_tol,
            "residual_tol": self.residual_tol,
            "series_tol": self.series_tol,
            "series_budget": self.series_budget,
        }

    def validate(self) -> bool:
        """Validate configuration"""
        positive = [
            self.positivity_tol, self.residual_tol, self.commutation_tol,
            self.series_tol, self.spectral_tol, self.bisection_tol,
            self.condition_max, self.gauge_delta,
        ]
        if any(value <= 0 for value in positive):
            return False

        if min(self.series_budget, self.series_max_levels, self.subset_cap,
               self.general_subset_size, self.spectral_max_iter) < 1:
            return False

        return True

# Global configuration instance
config = Config()
