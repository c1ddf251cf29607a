"""
Atoms Command - Point masses of the measure attached to a subinvariant trace
"""

from typing import Any, Dict

from commands.base_command import BaseCommand
from services.set_algebra_service import atom_summary
from utils.errors import SubinvarianceError
from utils.logger import get_logger

logger = get_logger(__name__)


class AtomsCommand(BaseCommand):
    """Command to list atom weights up to a word length"""

    name = "atoms"

    def validate_params(self) -> bool:
        return self.require("model", "beta")

    def execute(self) -> Dict[str, Any]:
        model = self.load()
        system = model.system
        tau = self.extractor.extract_trace(self.params, model)
        beta = self.extractor.extract_beta(self.params)
        length = self.extractor.extract_positive_int(self.params, "length", self.settings.atom_length)

        try:
            summary = atom_summary(system, tau, beta, length, budget=self.settings.series_budget)
        except SubinvarianceError as e:
            self.set_failure(str(e), self.report(system, {"atoms": None}))
            return self.result

        residuals = {"deficit": summary["deficit"], "tail_bound": summary["tail_bound"]}
        self.set_success(
            f"Atom mass {summary['total']:.10g} up to length {length}",
            self.report(system, {"atoms": summary}, residuals),
        )
        return self.result
