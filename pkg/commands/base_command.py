"""
Base command class for Modular Command Pattern (MCP)
"""

from abc import ABC, abstractmethod
from typing import Any, Dict, Optional

from config import config
from parsers.model_parser import LoadedModel, load_model
from parsers.parameter_extractor import ParameterExtractor
from services.transfer_service import TransferSystem, system_summary
from utils.errors import KMSError
from utils.logger import get_logger

logger = get_logger(__name__)

EXIT_CODES = {"pass": 0, "fail": 1, "error": 2}

# flags that only affect presentation and stay out of the command echo
_PRESENTATION_KEYS = {"format", "out", "verbose", "workers"}


class BaseCommand(ABC):
    """Abstract base class for all commands using MCP pattern"""

    name = "command"

    def __init__(self, params: Dict[str, Any]):
        self.params = params
        self.result = {"success": False, "verdict": "error", "message": "", "data": {}}
        self.extractor = ParameterExtractor()
        self.settings = config.with_overrides(params.get("tol"), params.get("budget"))

    @abstractmethod
    def execute(self) -> Dict[str, Any]:
        """Execute the command and return result"""
        pass

    def validate_params(self) -> bool:
        """Validate required parameters"""
        return True

    def run(self) -> Dict[str, Any]:
        """Validate, execute and turn any exception into an error result"""
        self.log_execution(f"params {self.echo()['params']}")
        if not self.validate_params():
            if not self.result["message"]:
                self.result["message"] = f"Invalid parameters for {self.name}"
            self.result["verdict"] = "error"
            return self.result
        try:
            return self.execute()
        except KMSError as e:
            logger.error("%s failed: %s", self.name, str(e))
            self.set_error(str(e), {"command": self.echo(), "error": type(e).__name__})
        except Exception as e:
            logger.exception("%s crashed", self.name)
            self.set_error(f"System error: {str(e)}", {"command": self.echo(), "error": type(e).__name__})
        return self.result

    def require(self, *keys: str) -> bool:
        missing = [key for key in keys if self.params.get(key) is None]
        if missing:
            self.result["message"] = f"Missing required parameter: {', '.join(missing)}"
            return False
        return True

    def load(self) -> LoadedModel:
        return load_model(self.params["model"])

    def echo(self) -> Dict[str, Any]:
        params = {
            key: value for key, value in sorted(self.params.items())
            if value is not None and key not in _PRESENTATION_KEYS
        }
        return {"name": self.name, "params": params}

    def report(self, system: Optional[TransferSystem], analysis: Dict[str, Any],
               residuals: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        """Report body with a fixed key order"""
        data: Dict[str, Any] = {
            "command": self.echo(),
            "system": system_summary(system) if system is not None else None,
            "tolerances": self.settings.tolerances(),
        }
        data.update(analysis)
        data["residuals"] = residuals or {}
        return data

    @property
    def exit_code(self) -> int:
        return EXIT_CODES.get(self.result.get("verdict"), 2)

    def log_execution(self, action: str) -> None:
        """Log command execution"""
        logger.info(f"Executing {self.__class__.__name__}: {action}")

    def set_success(self, message: str, data: Dict[str, Any] = None) -> None:
        """Set passing result"""
        self.result = {
            "success": True,
            "verdict": "pass",
            "message": message,
            "data": data or {}
        }

    def set_failure(self, message: str, data: Dict[str, Any] = None) -> None:
        """Set result for an analysis that ran and found a violation"""
        self.result = {
            "success": False,
            "verdict": "fail",
            "message": message,
            "data": data or {}
        }

    def set_error(self, message: str, data: Dict[str, Any] = None) -> None:
        """Set error result"""
        self.result = {
            "success": False,
            "verdict": "error",
            "message": message,
            "data": data or {}
        }
