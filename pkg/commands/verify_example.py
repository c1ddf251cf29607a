"""
Verify Example Command - Reruns the reference scenarios and reports pass/fail

optimal: the two-dimensional system that fails subinvariance only at J = I,
    plus the lambda scan of Bernoulli pairs
kgraph: transfer matrices against brute-force path counts on random k-graphs
blrs: the free monoid on two letters with trivial fibres and N = 2
    (also accepted as free-semigroup)
"""

import math
from itertools import product
from typing import Any, Dict, List

import numpy as np

from commands.base_command import BaseCommand
from services.critical_service import critical_beta
from services.kms_service import check_subinvariance, wold
from services.monoid_service import SimpleGraph, WeightMap, normalize
from services.transfer_service import (
    Fp_matrix, KGraphModel, TraceVec, bernoulli_pair, example_optimal, from_kgraph,
    kgraph_path_counts, optimal_admissible_radius, trivial_system,
)
from utils.errors import InvalidInputError
from utils.logger import get_logger

logger = get_logger(__name__)

EXAMPLES = ("optimal", "kgraph", "blrs", "free-semigroup")
LAMBDA_STEP = 1e-3
BOUNDARY_TOL = 1e-9


def verify_optimal(n: int, I: List[int], alpha: float) -> Dict[str, Any]:
    system, mu = example_optimal(n, I, alpha)
    report = check_subinvariance(system, mu, 1.0)
    expected = [system.graph.vertices[i - 1] for i in I]
    failing = [list(entry.subset) for entry in report.failing()]

    radius = optimal_admissible_radius(alpha, len(I))
    mismatches = []
    for lam in np.round(np.arange(0.0, 1.0 + LAMBDA_STEP / 2, LAMBDA_STEP), 6):
        distance = abs(lam - 0.5) - radius
        if abs(distance) <= BOUNDARY_TOL:
            continue
        passed = check_subinvariance(system, bernoulli_pair(float(lam)), 1.0).passed
        if passed != (distance < 0):
            mismatches.append(float(lam))

    return {
        "n": n,
        "I": list(I),
        "alpha": alpha,
        "mu": list(mu.entries),
        "failing_subsets": failing,
        "fails_exactly_at_I": failing == [expected],
        "lambda_radius": radius,
        "lambda_mismatches": mismatches,
        "passed": failing == [expected] and not mismatches,
    }


def _random_kgraph(rng: np.random.Generator) -> KGraphModel:
    size = int(rng.integers(1, 5))
    first = rng.integers(0, 3, size=(size, size))
    if rng.integers(1, 3) == 1:
        return KGraphModel.of([first])
    partners = [np.eye(size, dtype=np.int64), first, 2 * np.eye(size, dtype=np.int64)]
    return KGraphModel.of([first, partners[int(rng.integers(0, len(partners)))]])


def verify_kgraph(samples: int, seed: int, max_degree: int = 4) -> Dict[str, Any]:
    rng = np.random.default_rng(seed)
    checked, mismatches = 0, []
    for sample in range(samples):
        kgraph = _random_kgraph(rng)
        system = from_kgraph(kgraph, WeightMap(tuple(2.0 for _ in range(kgraph.rank))))
        for degree in product(range(max_degree + 1), repeat=kgraph.rank):
            if sum(degree) > max_degree:
                continue
            word = [c for c, count in enumerate(degree) for _ in range(count)]
            p = normalize(word, system.graph)
            checked += 1
            if not np.array_equal(Fp_matrix(system, p), kgraph_path_counts(kgraph, degree)):
                mismatches.append({"sample": sample, "degree": list(degree)})
    return {"samples": samples, "seed": seed, "checked": checked,
            "mismatches": mismatches, "passed": not mismatches}


def verify_free_semigroup() -> Dict[str, Any]:
    graph = SimpleGraph.edgeless(["a", "b"])
    system = trivial_system(graph, WeightMap.constant(graph, 2.0))
    tau = TraceVec.of([1.0])
    beta_c = critical_beta(system)
    above = wold(system, tau, 1.5).type.value
    at = wold(system, tau, 1.0).type.value
    return {
        "beta_c": beta_c,
        "type_at_1_5": above,
        "type_at_1": at,
        "passed": math.isclose(beta_c, 1.0, abs_tol=1e-8) and above == "finite" and at == "infinite",
    }


class VerifyExampleCommand(BaseCommand):
    """Command to rerun one of the reference scenarios"""

    name = "verify-example"

    def validate_params(self) -> bool:
        if self.params.get("example") not in EXAMPLES:
            self.result["message"] = f"Unknown example {self.params.get('example')!r}; choose one of {list(EXAMPLES)}"
            return False
        return True

    def execute(self) -> Dict[str, Any]:
        example = self.params["example"]
        if example == "optimal":
            n = self.extractor.extract_positive_int(self.params, "n", 3)
            I = self.extractor.extract_subset(self.params.get("subset") or "1,2", n)
            alpha = float(self.params.get("alpha") or 4.0)
            if not alpha > 2:
                raise InvalidInputError("alpha must be greater than 2")
            outcome = verify_optimal(n, I, alpha)
        elif example == "kgraph":
            samples = self.extractor.extract_positive_int(self.params, "samples", 20)
            outcome = verify_kgraph(samples, int(self.params.get("seed") or 0))
        else:
            outcome = verify_free_semigroup()
            example = "blrs"

        data = self.report(None, {"example": example, "outcome": outcome})
        if outcome["passed"]:
            self.set_success(f"Example {example} reproduced", data)
        else:
            self.set_failure(f"Example {example} did not reproduce", data)
        return self.result
