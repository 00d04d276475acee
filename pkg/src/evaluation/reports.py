"""CSV, summary and SVG outputs for evaluation runs."""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

from src.evaluation.prequential import EvalRecord, RunSummary, Trajectory

logger = logging.getLogger(__name__)

RECORD_COLUMNS = [
    "t",
    "correct",
    "window_acc",
    "tracking_err",
    "predict_ns",
    "update_ns",
    "model_size",
    "tracking_degenerate",
]

_SVG_PARAMS = {"svg.fonttype": "none", "svg.hashsalt": "drift-bench"}

SeriesLike = Union[pd.Series, Sequence[float], np.ndarray]


def records_to_frame(records: Sequence[EvalRecord]) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "t": pd.array([r.t for r in records], dtype="int64"),
            "correct": pd.array([int(r.correct) for r in records], dtype="int64"),
            "window_acc": pd.array([r.window_accuracy for r in records], dtype="float64"),
            "tracking_err": pd.array(
                [np.nan if r.tracking_error is None else r.tracking_error for r in records], dtype="float64"
            ),
            "predict_ns": pd.array([r.predict_ns for r in records], dtype="Int64"),
            "update_ns": pd.array([r.update_ns for r in records], dtype="Int64"),
            "model_size": pd.array([r.model_size for r in records], dtype="int64"),
            "tracking_degenerate": pd.array([int(r.tracking_degenerate) for r in records], dtype="int64"),
        },
        columns=RECORD_COLUMNS,
    )


def summary_path_for(path: Path) -> Path:
    return path.with_suffix(".summary.txt")


def emit_csv(records: Sequence[EvalRecord], summary: Optional[RunSummary], path: Union[str, Path]) -> Path:
    """Write one row per record plus a ``key=value`` summary sidecar next to it."""

    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        records_to_frame(records).to_csv(path, index=False)
        if summary is not None:
            emit_summary(summary, summary_path_for(path))
    except OSError as exc:
        raise OSError(f"Failed to write evaluation records to {path}: {exc}") from exc
    logger.info("Wrote evaluation records", extra={"path": str(path), "rows": len(records)})
    return path


def load_records(path: Union[str, Path]) -> List[EvalRecord]:
    """Parse a file written by :func:`emit_csv`."""

    frame = pd.read_csv(
        path,
        dtype={"predict_ns": "Int64", "update_ns": "Int64"},
        float_precision="round_trip",
    )
    missing = [column for column in RECORD_COLUMNS if column not in frame.columns]
    if missing:
        raise ValueError(f"{path} is missing columns: {', '.join(missing)}")

    def _optional_int(value: Any) -> Optional[int]:
        return None if pd.isna(value) else int(value)

    return [
        EvalRecord(
            t=int(row.t),
            correct=bool(row.correct),
            window_accuracy=float(row.window_acc),
            tracking_error=None if pd.isna(row.tracking_err) else float(row.tracking_err),
            predict_ns=_optional_int(row.predict_ns),
            update_ns=_optional_int(row.update_ns),
            model_size=int(row.model_size),
            tracking_degenerate=bool(row.tracking_degenerate),
        )
        for row in frame.itertuples(index=False)
    ]


def summary_items(summary: RunSummary) -> Dict[str, Any]:
    items: Dict[str, Any] = {
        "overall_accuracy": summary.overall_accuracy,
        "evaluated": summary.evaluated,
        "total_ns": summary.total_ns,
        "predict_ns": summary.predict_ns,
        "update_ns": summary.update_ns,
    }
    for key in sorted(summary.metadata):
        items[key] = summary.metadata[key]
    return items


def emit_summary(summary: RunSummary, path: Union[str, Path]) -> Path:
    path = Path(path)
    lines = [f"{key}={'' if value is None else value}" for key, value in summary_items(summary).items()]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def load_summary(path: Union[str, Path]) -> Dict[str, str]:
    entries: Dict[str, str] = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        if "=" in raw:
            key, value = raw.split("=", 1)
            entries[key] = value
    return entries


def emit_trajectory(trajectory: Trajectory, path: Union[str, Path]) -> Path:
    """``t, theta_0.., theta_hat_0..`` per timestep."""

    path = Path(path)
    dims = trajectory.theta.shape[1]
    frame = pd.DataFrame({"t": trajectory.t})
    for index in range(dims):
        frame[f"theta_{index}"] = trajectory.theta[:, index]
    for index in range(dims):
        frame[f"theta_hat_{index}"] = trajectory.theta_hat[:, index]
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False)
    return path


def emit_plot(
    series: Mapping[str, SeriesLike],
    path: Union[str, Path],
    ylabel: str = "Sliding-window accuracy",
    title: Optional[str] = None,
    markers: Optional[Mapping[str, float]] = None,
) -> Path:
    """Overlay one line per learner and save a standalone SVG.

    A ``pd.Series`` is plotted against its index (the timestep); plain sequences
    against ``0..n-1``. ``markers`` draws labelled vertical lines (e.g. drift start).
    """

    if not series:
        raise ValueError("Nothing to plot: no series given")
    for name, values in series.items():
        if len(values) == 0:
            raise ValueError(f"Nothing to plot: series '{name}' is empty")

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with plt.rc_context(_SVG_PARAMS):
        fig, ax = plt.subplots(figsize=(8, 4.5))
        for name, values in series.items():
            if isinstance(values, pd.Series):
                x, y = values.index.to_numpy(), values.to_numpy()
            else:
                x, y = np.arange(len(values)), np.asarray(values, dtype=float)
            ax.plot(x, y, label=name, linewidth=1.2, gid=f"series-{name}")
        for label, position in (markers or {}).items():
            ax.axvline(position, color="grey", linestyle="--", linewidth=0.8)
            ax.annotate(label, (position, 1.0), xycoords=("data", "axes fraction"), fontsize=8)
        ax.set_xlabel("t")
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        ax.legend(loc="lower right")
        ax.grid(alpha=0.3)
        fig.savefig(path, format="svg", bbox_inches="tight", metadata={"Date": None})
        plt.close(fig)
    logger.info("Wrote plot", extra={"path": str(path), "series": len(series)})
    return path


def emit_summary_table(rows: Sequence[Mapping[str, Any]], path: Union[str, Path]) -> pd.DataFrame:
    frame = pd.DataFrame(list(rows))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False)
    return frame


__all__ = [
    "RECORD_COLUMNS",
    "emit_csv",
    "emit_plot",
    "emit_summary",
    "emit_summary_table",
    "emit_trajectory",
    "load_records",
    "load_summary",
    "records_to_frame",
    "summary_path_for",
]
