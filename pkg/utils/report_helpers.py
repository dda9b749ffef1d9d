"""
Common rendering helpers for command reports
Every command returns a plain dict; text and JSON are built from the same payload
"""
import json
import sys
from fractions import Fraction
from typing import Any, Optional, TextIO

from config import JSON_SCHEMA_VERSION


def _jsonable(value: Any) -> Any:
    if isinstance(value, Fraction):
        return str(value) if value.denominator != 1 else value.numerator
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, (list, tuple)):
        if all(isinstance(v, (int, str, Fraction)) and not isinstance(v, bool) for v in value):
            return ", ".join(str(v) for v in value)
        return "; ".join(_format_value(v) for v in value)
    if isinstance(value, dict):
        return ", ".join(f"{k}={_format_value(v)}" for k, v in value.items())
    if value is None:
        return "-"
    return str(value)


def render_text(payload: dict) -> str:
    """
    Render a payload as an aligned ``key: value`` block

    Args:
        payload: Report payload; nested dicts become indented sections

    Returns:
        The text block without a trailing newline
    """
    lines: list[str] = []

    def walk(block: dict, indent: str):
        width = max((len(str(k)) for k in block), default=0)
        for key, value in block.items():
            if isinstance(value, dict) and value and any(isinstance(v, (dict, list)) for v in value.values()):
                lines.append(f"{indent}{key}:")
                walk(value, indent + "  ")
            elif isinstance(value, list) and value and all(isinstance(v, str) for v in value) \
                    and any(" " in v or "\n" in v for v in value):
                lines.append(f"{indent}{key}:")
                lines.extend(f"{indent}  {v}" for v in value)
            else:
                lines.append(f"{indent}{str(key).ljust(width)}: {_format_value(value)}")

    walk(payload, "")
    return "\n".join(lines)


def render_json(payload: dict) -> str:
    document = {"schema_version": JSON_SCHEMA_VERSION, **_jsonable(payload)}
    return json.dumps(document, sort_keys=True, indent=2)


def emit_report(payload: dict, as_json: bool = False, stream: Optional[TextIO] = None) -> None:
    """
    Print a command report

    Args:
        payload: Report payload
        as_json: Render JSON (sorted keys, schema_version added) instead of text
        stream: Output stream (default: stdout)
    """
    stream = stream or sys.stdout
    stream.write((render_json(payload) if as_json else render_text(payload)) + "\n")


def emit_text(text: str, stream: Optional[TextIO] = None) -> None:
    """Print raw text such as a DSL document"""
    stream = stream or sys.stdout
    stream.write(text if text.endswith("\n") else text + "\n")


def emit_error(
    message: str,
    code: str = "engine_error",
    as_json: bool = False,
    stream: Optional[TextIO] = None
) -> None:
    """
    Print an error report

    Args:
        message: Error message (will be prefixed with ❌ in text mode)
        code: Stable machine-readable error code
        as_json: Emit ``{"error": {"code", "message"}}`` instead
        stream: Output stream (default: stderr in text mode, stdout in JSON mode)
    """
    if as_json:
        stream = stream or sys.stdout
        stream.write(render_json({"error": {"code": code, "message": message}}) + "\n")
        return
    stream = stream or sys.stderr
    if not message.startswith("❌"):
        message = f"❌ {message}"
    stream.write(f"{message} [{code}]\n")


def emit_warning(message: str, stream: Optional[TextIO] = None) -> None:
    """Print a warning (prefixed with ⚠️) on stderr"""
    stream = stream or sys.stderr
    if not message.startswith("⚠️"):
        message = f"⚠️ {message}"
    stream.write(message + "\n")


def emit_success(message: str, stream: Optional[TextIO] = None) -> None:
    """Print a success line (prefixed with ✅) on stdout"""
    stream = stream or sys.stdout
    if not message.startswith("✅"):
        message = f"✅ {message}"
    stream.write(message + "\n")
