"""
Critical Command - Critical inverse temperature and witness at beta_c
"""

import math
from typing import Any, Dict

import numpy as np

from commands.base_command import BaseCommand
from services.critical_service import critical_report, infinite_type_at_critical
from services.kms_service import T_beta
from utils.logger import get_logger

logger = get_logger(__name__)


class CriticalCommand(BaseCommand):
    """Command to report beta_c and an infinite-type trace at beta_c"""

    name = "critical"

    def validate_params(self) -> bool:
        return self.require("model")

    def execute(self) -> Dict[str, Any]:
        model = self.load()
        system = model.system
        report = critical_report(system)

        witness = None
        residuals: Dict[str, Any] = {}
        if math.isfinite(report.beta_c):
            witness = infinite_type_at_critical(system, report.beta_c)
            if witness is not None:
                residuals["witness"] = float(np.max(np.abs(T_beta(system, report.beta_c) @ witness.array)))

        analysis = {
            "critical": report.to_dict(),
            "witness": list(witness.entries) if witness is not None else None,
        }
        data = self.report(system, analysis, residuals)
        if math.isfinite(report.beta_c):
            message = f"beta_c = {report.beta_c:.10g} ({report.method})"
        else:
            message = "beta_c = -inf: every Gibbs series converges"
        self.set_success(message, data)
        return self.result
