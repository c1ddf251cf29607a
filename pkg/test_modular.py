#!/usr/bin/env python3
"""
Smoke tests for the modular KMS trace classifier
Run this directly or through pytest to validate the architecture
"""

import sys
from pathlib import Path

# Add the project root to the Python path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))


def test_imports():
    """All modules import cleanly"""
    print("🧪 Testing module imports...")

    from config import config  # noqa: F401
    from utils.errors import KMSError  # noqa: F401
    from utils.logger import get_logger, setup_logging  # noqa: F401
    from utils.output_formatter import OutputFormat, format_output  # noqa: F401
    print("✅ config and utils modules imported")

    from services import (  # noqa: F401
        critical_service, kms_service, monoid_service, poset_service, series_service,
        set_algebra_service, spectral_service, transfer_service,
    )
    print("✅ services modules imported")

    from parsers.model_parser import parse_model  # noqa: F401
    from parsers.parameter_extractor import ParameterExtractor  # noqa: F401
    print("✅ parser modules imported")

    from main import CommandFactory
    assert sorted(CommandFactory.command_map) == [
        "atoms", "check", "critical", "decompose", "sweep", "verify-example", "wold",
    ]
    print("✅ command modules imported")


def test_configuration():
    """Defaults validate and overrides leave the global config alone"""
    print("\n🔧 Testing configuration...")
    from config import config

    assert config.validate()
    before = config.tolerances()
    overridden = config.with_overrides(tol=1e-6, budget=10)
    assert overridden.positivity_tol == 1e-6
    assert overridden.series_budget == 10
    assert config.tolerances() == before
    print(f"  Positivity tolerance: {config.positivity_tol}")
    print(f"  Series budget: {config.series_budget}")


def test_parameter_extraction():
    """Flag values are parsed and rejected as expected"""
    print("\n🔍 Testing parameter extraction...")
    import pytest

    from parsers.parameter_extractor import ParameterExtractor
    from utils.errors import InvalidInputError

    extractor = ParameterExtractor()
    assert extractor.parse_beta_range("0.5:2:4") == (0.5, 2.0, 4)
    assert extractor.parse_trace_inline(" 0.25, 0.75 ") == [0.25, 0.75]
    assert extractor.extract_subset("1, 3", 3) == [1, 3]
    for bad in ("2:1:3", "0:1:1", "0:1"):
        with pytest.raises(InvalidInputError):
            extractor.parse_beta_range(bad)
    with pytest.raises(InvalidInputError):
        extractor.parse_trace_inline("0.5;0.5")
    with pytest.raises(InvalidInputError):
        extractor.extract_subset("0,4", 3)


def test_command_creation():
    """Commands validate their required parameters"""
    print("\n⚙️  Testing command creation...")
    from commands.check import CheckCommand

    command = CheckCommand({"model": "missing.json"})
    result = command.run()
    assert result["verdict"] == "error"
    assert "beta" in result["message"]
    assert command.exit_code == 2

    command = CheckCommand({"model": "missing.json", "beta": 1.0})
    result = command.run()
    assert result["verdict"] == "error"
    assert result["data"]["error"] == "ModelFileError"
    print("  CheckCommand validation: ✅ PASS")


def test_output_formatting():
    """Reports serialize deterministically"""
    print("\n📋 Testing output formatting...")
    import numpy as np

    from utils.output_formatter import OutputFormat, format_output

    test_data = {
        "success": True,
        "verdict": "pass",
        "message": "Trace is subinvariant at beta=2",
        "data": {"minimum": np.float64(1 / 3), "infinite": float("inf"), "flags": np.array([True])},
    }

    json_output = format_output(test_data, OutputFormat.JSON)
    assert '"minimum": 0.333333333333' in json_output
    assert '"infinite": null' in json_output
    assert '"flags": [\n      true\n    ]' in json_output

    text_output = format_output(test_data, OutputFormat.TEXT)
    assert text_output.startswith("✅ [pass] Trace is subinvariant")

    csv_output = format_output(test_data, OutputFormat.CSV)
    assert csv_output.splitlines()[0] == "key,value"
    print("  JSON, text and CSV formats: ✅ PASS")


def main():
    """Run all tests"""
    print("🚀 KMS Trace Classifier - Modular Architecture Test Suite")
    print("=" * 60)

    tests = [
        test_imports,
        test_configuration,
        test_parameter_extraction,
        test_command_creation,
        test_output_formatting,
    ]

    passed = 0
    for test in tests:
        try:
            test()
            passed += 1
        except Exception as e:
            print(f"❌ {test.__name__}: {type(e).__name__}: {e}")

    print("\n" + "=" * 60)
    print(f"📊 Test Results: {passed}/{len(tests)} tests passed")

    if passed == len(tests):
        print("🎉 All tests passed! The modular architecture is working correctly.")
        print("\n🎯 Next steps:")
        print("1. Run the full suite: pytest")
        print("2. Try an example: python main.py check --model docs/examples/optimal.json --beta 1")
        print("3. Write a settings template: python main.py setup")
        return 0

    print("❌ Some tests failed. Please check the error messages above.")
    return 1


if __name__ == "__main__":
    sys.exit(main())
