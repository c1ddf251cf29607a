"""
Output formatting utilities

Reports are plain dictionaries {"success", "verdict", "message", "data"}.
Before formatting every float is rounded to 12 significant digits and
non-finite numbers become null, so identical runs give identical output.
"""

import csv
import io
import json
import math
from enum import Enum
from typing import Any, Dict, List

import numpy as np
from tabulate import tabulate

SIGNIFICANT_DIGITS = 12


class OutputFormat(Enum):
    """Supported output formats"""
    JSON = "json"
    CSV = "csv"
    TEXT = "text"
    TABLE = "table"


def clean_value(value: Any) -> Any:
    """Recursively convert numpy values, round floats and drop non-finite numbers"""
    if isinstance(value, dict):
        return {str(key): clean_value(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [clean_value(item) for item in value]
    if isinstance(value, np.ndarray):
        return [clean_value(item) for item in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return None
        rounded = float(f"{value:.{SIGNIFICANT_DIGITS}g}")
        return 0.0 if rounded == 0 else rounded
    if isinstance(value, Enum):
        return value.value
    return value


def _scalar(value: Any) -> str:
    if value is None:
        return "null"
    if isinstance(value, (dict, list)):
        return json.dumps(value, ensure_ascii=False)
    return str(value)


def _flatten(data: Dict[str, Any], prefix: str = "") -> List[List[str]]:
    rows = []
    for key, value in data.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict) and value:
            rows.extend(_flatten(value, f"{name}."))
        else:
            rows.append([name, _scalar(value)])
    return rows


class OutputFormatter:
    """Class for formatting output in different formats"""

    def format_json(self, data: Dict[str, Any]) -> str:
        """Format data as JSON, keeping key order"""
        return json.dumps(clean_value(data), indent=2, ensure_ascii=False, allow_nan=False)

    def format_csv(self, data: Dict[str, Any]) -> str:
        """
        Format data as CSV

        A report with a "rows" list (sweeps) becomes one line per row with
        the columns of the first row; anything else becomes key,value lines.
        """
        data = clean_value(data)
        body = data.get("data") or {}
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        rows = body.get("rows")
        if isinstance(rows, list) and rows:
            columns = list(rows[0].keys())
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_scalar(row.get(column)) for column in columns])
        else:
            writer.writerow(["key", "value"])
            writer.writerow(["verdict", _scalar(data.get("verdict"))])
            writer.writerow(["message", _scalar(data.get("message"))])
            writer.writerows(_flatten(body))
        return buffer.getvalue().rstrip("\n")

    def format_text(self, data: Dict[str, Any]) -> str:
        """Format data as human-readable text"""
        data = clean_value(data)
        mark = "✅" if data.get("success") else "❌"
        output = f"{mark} [{data.get('verdict', 'error')}] {data.get('message', '')}\n"
        for key, value in _flatten(data.get("data") or {}):
            output += f"   {key}: {value}\n"
        return output.strip()

    def format_table(self, data: Dict[str, Any]) -> str:
        """Format data as a table"""
        data = clean_value(data)
        body = data.get("data") or {}
        output = f"Status: {'SUCCESS' if data.get('success') else 'FAILED'} ({data.get('verdict')})\n"
        output += f"Message: {data.get('message')}\n"
        rows = body.get("rows")
        if isinstance(rows, list) and rows:
            return output + tabulate(rows, headers="keys", tablefmt="simple")
        if not body:
            return output.strip()
        return output + tabulate(_flatten(body), headers=["key", "value"], tablefmt="simple")


def format_output(data: Dict[str, Any], format_type: OutputFormat = OutputFormat.JSON) -> str:
    """
    Format output data according to specified format

    Args:
        data: Data to format
        format_type: Output format type

    Returns:
        Formatted string
    """
    formatter = OutputFormatter()

    if format_type == OutputFormat.JSON:
        return formatter.format_json(data)

    elif format_type == OutputFormat.CSV:
        return formatter.format_csv(data)

    elif format_type == OutputFormat.TEXT:
        return formatter.format_text(data)

    elif format_type == OutputFormat.TABLE:
        return formatter.format_table(data)

    else:
        return str(data)
