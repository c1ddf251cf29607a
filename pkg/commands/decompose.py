"""
Decompose Command - Coordinatewise finite/infinite split on a complete graph
"""

from typing import Any, Dict

from commands.base_command import BaseCommand
from services.kms_service import product_decompose
from utils.errors import SubinvarianceError
from utils.logger import get_logger

logger = get_logger(__name__)


class DecomposeCommand(BaseCommand):
    """Command to emit all 2^n product components of a trace"""

    name = "decompose"

    def validate_params(self) -> bool:
        return self.require("model", "beta")

    def execute(self) -> Dict[str, Any]:
        model = self.load()
        system = model.system
        tau = self.extractor.extract_trace(self.params, model)
        beta = self.extractor.extract_beta(self.params)

        try:
            decomposition = product_decompose(
                system, tau, beta, self.settings.positivity_tol, self.settings.series_budget
            )
        except SubinvarianceError as e:
            self.set_failure(str(e), self.report(system, {"decomposition": None}))
            return self.result

        worst_fixed_point = max((c.fixed_point_residual for c in decomposition.components), default=0.0)
        residuals = {
            "reconstruction": decomposition.residual,
            "worst_fixed_point": worst_fixed_point,
        }
        self.set_success(
            f"{len(decomposition.components)} components at beta={beta:g}",
            self.report(system, {"decomposition": decomposition.to_dict()}, residuals),
        )
        return self.result
