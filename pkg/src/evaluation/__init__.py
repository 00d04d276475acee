"""Prequential evaluation, metrics and report writers."""

from .metrics import sliding_accuracy, tracking_error, tracking_error_flagged
from .prequential import (
    EvalConfig,
    EvalRecord,
    PrequentialResult,
    RunSummary,
    Trajectory,
    capture_trajectory,
    prequential_run,
)
from .reports import emit_csv, emit_plot, emit_summary_table, emit_trajectory, load_records

__all__ = [
    "EvalConfig",
    "EvalRecord",
    "PrequentialResult",
    "RunSummary",
    "Trajectory",
    "capture_trajectory",
    "emit_csv",
    "emit_plot",
    "emit_summary_table",
    "emit_trajectory",
    "load_records",
    "prequential_run",
    "sliding_accuracy",
    "tracking_error",
    "tracking_error_flagged",
]
