"""
Check Command - Subinvariance of a trace at one inverse temperature

With extended set the report also carries the reduced check on complete
graphs, the NO condition, gauge evidence and a monotonicity probe.
"""

from typing import Any, Dict

from commands.base_command import BaseCommand
from services.critical_service import check_subinvariance_reduced
from services.kms_service import (
    check_gauge_sufficient, check_NO_condition, check_subinvariance, check_subinvariance_general,
    monotonicity_probe, solve_NO_traces,
)
from services.transfer_service import TraceVec, TransferSystem
from utils.errors import UnsupportedSystemError
from utils.logger import get_logger

logger = get_logger(__name__)

PROBE_OFFSETS = (0.5, 1.0, 5.0)


class CheckCommand(BaseCommand):
    """Command to check the subinvariance inequalities"""

    name = "check"

    def validate_params(self) -> bool:
        return self.require("model", "beta")

    def execute(self) -> Dict[str, Any]:
        model = self.load()
        system = model.system
        tau = self.extractor.extract_trace(self.params, model)
        beta = self.extractor.extract_beta(self.params)
        tol = self.settings.positivity_tol

        report = check_subinvariance(system, tau, beta, tol)
        analysis: Dict[str, Any] = {"subinvariance": report.to_dict()}

        general_length = self.params.get("general_length")
        if general_length:
            general = check_subinvariance_general(system, tau, beta, int(general_length), tol=tol)
            analysis["general"] = general.to_dict()

        if self.params.get("extended"):
            analysis.update(self._extended(system, tau, beta, report.passed))

        data = self.report(system, analysis, {"worst_minimum": report.min_slack})
        worst = report.worst
        if report.passed:
            self.set_success(f"Trace is subinvariant at beta={beta:g}", data)
        else:
            self.set_failure(
                f"Subinvariance fails at beta={beta:g}; worst J={{{','.join(worst.subset)}}}", data
            )
        return self.result

    def _extended(self, system: TransferSystem, tau: TraceVec, beta: float, passed: bool) -> Dict[str, Any]:
        """Reduced check, NO condition, gauge evidence and monotonicity probe"""
        extra: Dict[str, Any] = {}
        if system.graph.is_complete() and all(system.N(s) > 1 for s in range(system.graph.size)):
            try:
                extra["reduced"] = check_subinvariance_reduced(system, tau, beta)
            except UnsupportedSystemError as e:
                logger.debug("Reduced check skipped: %s", e)

        extra["no_condition"] = check_NO_condition(system, tau, beta).to_dict()
        fixed = solve_NO_traces(system, beta)
        extra["no_trace"] = list(fixed.entries) if fixed is not None else None
        extra["gauge"] = check_gauge_sufficient(
            system, tau, beta, budget=self.settings.series_budget
        ).to_dict()

        if passed and all(system.N(s) >= 1 for s in range(system.graph.size)):
            probe = monotonicity_probe(
                system, tau, beta, [beta + offset for offset in PROBE_OFFSETS], self.settings.positivity_tol
            )
            extra["monotonicity"] = {"passed": probe.passed, "rows": probe.rows}
        return extra
