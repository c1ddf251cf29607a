"""
Parameter Extractor - Turns raw CLI flag values into validated analysis inputs
"""

import math
import re
from typing import Any, Dict, List, Optional, Tuple

from parsers.model_parser import LoadedModel
from services.transfer_service import TraceVec
from utils.errors import InvalidInputError
from utils.logger import get_logger

logger = get_logger(__name__)

_NUMBER = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"


class ParameterExtractor:
    """Extract and validate parameters for analysis commands"""

    def extract_trace(self, params: Dict[str, Any], model: LoadedModel) -> TraceVec:
        """
        Trace from --trace NAME or --trace-inline CSV

        With neither flag a model holding exactly one named trace uses it.
        """
        name = params.get("trace")
        inline = params.get("trace_inline")
        if name and inline:
            raise InvalidInputError("Use either --trace or --trace-inline, not both")
        if inline:
            values = self.parse_trace_inline(inline)
            if len(values) != model.system.dim:
                raise InvalidInputError(
                    f"Inline trace has {len(values)} entries, system dimension is {model.system.dim}"
                )
            return TraceVec.of(values)
        if name:
            return model.trace(self._clean_text(name))
        if len(model.traces) == 1:
            only = next(iter(model.traces))
            logger.info("Using the only named trace %r", only)
            return model.traces[only]
        raise InvalidInputError(
            f"A trace is required; named traces available: {sorted(model.traces) or 'none'}"
        )

    def parse_trace_inline(self, text: str) -> List[float]:
        """Comma-separated decimals, e.g. "0.5,0.5" """
        parts = [part.strip() for part in self._clean_text(text).split(",")]
        if not parts or any(not re.fullmatch(_NUMBER, part) for part in parts):
            raise InvalidInputError(f"Inline trace {text!r} must be comma-separated decimals")
        return [float(part) for part in parts]

    def extract_beta(self, params: Dict[str, Any], required: bool = True) -> Optional[float]:
        beta = params.get("beta")
        if beta is None:
            if required:
                raise InvalidInputError("--beta is required")
            return None
        beta = float(beta)
        if not math.isfinite(beta):
            raise InvalidInputError("--beta must be a finite number")
        return beta

    def parse_beta_range(self, text: str) -> Tuple[float, float, int]:
        """
        Parse "A:B:N" into (A, B, N)

        Requires A < B and N >= 2.
        """
        match = re.fullmatch(rf"\s*({_NUMBER})\s*:\s*({_NUMBER})\s*:\s*(\d+)\s*", text or "")
        if not match:
            raise InvalidInputError(f"Beta range {text!r} must look like A:B:N")
        start, stop, steps = float(match.group(1)), float(match.group(2)), int(match.group(3))
        if not start < stop:
            raise InvalidInputError(f"Beta range needs A < B, got {start:g}:{stop:g}")
        if steps < 2:
            raise InvalidInputError("Beta range needs at least 2 steps")
        return start, stop, steps

    def extract_positive_int(self, params: Dict[str, Any], key: str, default: int) -> int:
        value = params.get(key)
        if value is None:
            return default
        value = int(value)
        if value < 1:
            raise InvalidInputError(f"--{key.replace('_', '-')} must be at least 1")
        return value

    def extract_subset(self, text: str, n: int) -> List[int]:
        """1-based index list such as "1,2" for I"""
        try:
            indices = sorted({int(part) for part in self._clean_text(text).split(",") if part.strip()})
        except ValueError:
            raise InvalidInputError(f"Index set {text!r} must be comma-separated integers")
        if not indices or indices[0] < 1 or indices[-1] > n:
            raise InvalidInputError(f"Index set {text!r} must be a nonempty subset of 1..{n}")
        return indices

    def _clean_text(self, text: str) -> str:
        """Clean and normalize text input"""
        if not isinstance(text, str):
            return str(text)

        text = ' '.join(text.split())

        if (text.startswith('"') and text.endswith('"')) or (text.startswith("'") and text.endswith("'")):
            text = text[1:-1]

        return text.strip()
