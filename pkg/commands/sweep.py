"""
Sweep Command - Subinvariance and Wold masses across a range of beta

CSV columns: beta, verdict, min_slack, mass_tau0, mass_tau_f, mass_tau_inf,
type, sigma_min. Rows are emitted in beta order whatever the order in
which the workers finish.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List

import numpy as np

from commands.base_command import BaseCommand
from services.kms_service import check_subinvariance, smallest_singular_value, wold
from services.transfer_service import TraceVec, TransferSystem
from utils.errors import KMSError
from utils.logger import get_logger

logger = get_logger(__name__)

COLUMNS = ("beta", "verdict", "min_slack", "mass_tau0", "mass_tau_f", "mass_tau_inf", "type", "sigma_min")


class SweepCommand(BaseCommand):
    """Command to tabulate the analysis over a beta grid"""

    name = "sweep"

    def validate_params(self) -> bool:
        return self.require("model", "beta_range")

    def _row(self, system: TransferSystem, tau: TraceVec, beta: float) -> Dict[str, Any]:
        row: Dict[str, Any] = dict.fromkeys(COLUMNS)
        row["beta"] = beta
        report = check_subinvariance(system, tau, beta, self.settings.positivity_tol)
        row["verdict"] = "pass" if report.passed else "fail"
        row["min_slack"] = report.min_slack
        row["sigma_min"] = smallest_singular_value(system, beta)
        if report.passed:
            try:
                result = wold(system, tau, beta, self.settings.positivity_tol, self.settings.series_budget)
                row["mass_tau0"] = result.tau0.mass
                row["mass_tau_f"] = result.tau_f.mass
                row["mass_tau_inf"] = result.tau_inf.mass
                row["type"] = result.type.value
            except KMSError as e:
                logger.warning("Wold at beta=%g skipped: %s", beta, e)
        return row

    def execute(self) -> Dict[str, Any]:
        model = self.load()
        system = model.system
        tau = self.extractor.extract_trace(self.params, model)
        start, stop, steps = self.extractor.parse_beta_range(self.params["beta_range"])
        workers = self.extractor.extract_positive_int(self.params, "workers", 1)
        betas = [float(b) for b in np.linspace(start, stop, steps)]

        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows: List[Dict[str, Any]] = list(pool.map(lambda b: self._row(system, tau, b), betas))

        passing = sum(row["verdict"] == "pass" for row in rows)
        self.set_success(
            f"{len(rows)} rows from beta={start:g} to {stop:g}; {passing} subinvariant",
            self.report(system, {"columns": list(COLUMNS), "rows": rows}),
        )
        return self.result
