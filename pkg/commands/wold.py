"""
Wold Command - Split a subinvariant trace into finite and infinite parts
"""

from typing import Any, Dict

from commands.base_command import BaseCommand
from services.kms_service import finite_type_certificate, wold
from utils.errors import SubinvarianceError
from utils.logger import get_logger

logger = get_logger(__name__)


class WoldCommand(BaseCommand):
    """Command to compute tau0, tau_f and tau_inf"""

    name = "wold"

    def validate_params(self) -> bool:
        return self.require("model", "beta")

    def execute(self) -> Dict[str, Any]:
        model = self.load()
        system = model.system
        tau = self.extractor.extract_trace(self.params, model)
        beta = self.extractor.extract_beta(self.params)

        try:
            result = wold(system, tau, beta, self.settings.positivity_tol, self.settings.series_budget)
        except SubinvarianceError as e:
            self.set_failure(str(e), self.report(system, {"wold": None}))
            return self.result

        analysis = {
            "wold": result.to_dict(),
            "certificate": finite_type_certificate(system, tau, beta, self.settings.series_budget),
        }
        self.set_success(f"Trace is of {result.type.value} type at beta={beta:g}",
                         self.report(system, analysis, dict(result.residuals)))
        return self.result
