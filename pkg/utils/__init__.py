"""
Utility modules for JetKit
"""
from .logger import logger, setup_logging
from .report_helpers import (
    emit_error,
    emit_report,
    emit_success,
    emit_text,
    emit_warning,
    render_json,
    render_text,
)

__all__ = [
    'logger',
    'setup_logging',
    'emit_error',
    'emit_report',
    'emit_success',
    'emit_text',
    'emit_warning',
    'render_json',
    'render_text',
]
