"""Prequential (test-then-train) evaluation loop."""
from __future__ import annotations

import logging
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Deque, Dict, List, NamedTuple, Optional

import numpy as np

from src.evaluation.metrics import tracking_error_flagged
from src.streams.core import DriftSchedule, Learner, StreamSource, UnsupportedOperation, iterate

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EvalConfig:
    """Evaluation settings; without a schedule every instance is evaluated."""

    window: int = 200
    schedule: Optional[DriftSchedule] = None
    record_trajectory: bool = False
    timing: bool = True
    track_concept: bool = True
    raw_tracking_error: bool = False

    def __post_init__(self) -> None:
        if self.window < 1:
            raise ValueError(f"Window must be >= 1, got {self.window}")

    @property
    def tau0(self) -> int:
        return self.schedule.tau0 if self.schedule is not None else 0

    @property
    def limit(self) -> Optional[int]:
        return self.schedule.total if self.schedule is not None else None


@dataclass
class EvalRecord:
    t: int
    correct: bool
    window_accuracy: float
    tracking_error: Optional[float] = None
    predict_ns: Optional[int] = None
    update_ns: Optional[int] = None
    model_size: int = 0
    tracking_degenerate: bool = False


@dataclass
class RunSummary:
    overall_accuracy: float
    evaluated: int
    total_ns: Optional[int] = None
    predict_ns: Optional[int] = None
    update_ns: Optional[int] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not 0.0 <= self.overall_accuracy <= 1.0:
            raise ValueError(f"Overall accuracy must lie in [0, 1], got {self.overall_accuracy}")

    @property
    def total_seconds(self) -> Optional[float]:
        return None if self.total_ns is None else self.total_ns / 1e9


@dataclass
class Trajectory:
    """Per-timestep concept and estimate, aligned row by row."""

    t: np.ndarray
    theta: np.ndarray
    theta_hat: np.ndarray

    def __len__(self) -> int:
        return int(self.t.shape[0])


class PrequentialResult(NamedTuple):
    records: List[EvalRecord]
    summary: RunSummary
    trajectory: Optional[Trajectory] = None


def _concept_available(stream: StreamSource) -> bool:
    true_theta = getattr(stream, "true_theta", None)
    if true_theta is None:
        return False
    try:
        true_theta()
    except UnsupportedOperation:
        return False
    return True


def _stream_length(stream: StreamSource) -> Optional[int]:
    total = getattr(stream, "total", None)
    if total is None and hasattr(stream, "__len__"):
        total = len(stream)  # type: ignore[arg-type]
    return int(total) if total is not None else None


def prequential_run(learner: Learner, stream: StreamSource, config: EvalConfig) -> PrequentialResult:
    """Predict, score, then update on every instance of a fresh stream.

    Correctness counts from ``tau0`` on; earlier instances only train the learner.
    Predict and update are timed separately with a monotonic nanosecond clock when
    ``config.timing`` is set.
    """

    if getattr(stream, "t", 0) != 0:
        raise ValueError("prequential_run needs a fresh stream (t == 0)")
    tau0 = config.tau0
    length = _stream_length(stream)
    if length is not None and length <= tau0:
        raise ValueError(f"Stream of {length} instances ends before evaluation starts at tau0={tau0}")

    weights = learner.weights()
    parametric = weights is not None
    has_concept = _concept_available(stream)
    concept_dim = stream.dimensionality
    comparable = has_concept and parametric and np.asarray(weights).reshape(-1).shape[0] == concept_dim
    if config.record_trajectory and not comparable:
        raise UnsupportedOperation(
            f"Learner '{learner.learner_id}' exposes no weights comparable to the stream concept; "
            "trajectories need a linear learner on a hyperplane stream"
        )
    track = config.track_concept and comparable

    window: Deque[int] = deque(maxlen=config.window)
    records: List[EvalRecord] = []
    traj_t: List[int] = []
    traj_theta: List[np.ndarray] = []
    traj_hat: List[np.ndarray] = []
    correct_total = window_hits = 0
    predict_total = update_total = 0
    clock = time.perf_counter_ns

    run_start = clock()
    for t, labeled in enumerate(iterate(stream)):
        if config.limit is not None and t >= config.limit:
            break

        theta_hat = learner.weights() if (track or config.record_trajectory) else None

        if config.timing:
            start = clock()
            prediction = learner.predict(labeled.instance)
            predict_ns: Optional[int] = clock() - start
        else:
            prediction = learner.predict(labeled.instance)
            predict_ns = None

        theta = stream.true_theta() if theta_hat is not None else None  # type: ignore[attr-defined]
        if config.record_trajectory:
            traj_t.append(t)
            traj_theta.append(theta)
            traj_hat.append(np.asarray(theta_hat, dtype=float).reshape(-1))

        if config.timing:
            start = clock()
            learner.update(labeled)
            update_ns: Optional[int] = clock() - start
            predict_total += predict_ns or 0
            update_total += update_ns
        else:
            learner.update(labeled)
            update_ns = None

        if t < tau0:
            continue

        correct = prediction == labeled.label
        if len(window) == window.maxlen:
            window_hits -= window[0]
        window.append(int(correct))
        window_hits += int(correct)
        correct_total += int(correct)
        error: Optional[float] = None
        degenerate = False
        if track:
            error, degenerate = tracking_error_flagged(theta, theta_hat, normalize=not config.raw_tracking_error)
        records.append(
            EvalRecord(
                t=t,
                correct=correct,
                window_accuracy=window_hits / len(window),
                tracking_error=error,
                predict_ns=predict_ns,
                update_ns=update_ns,
                model_size=learner.model_size(),
                tracking_degenerate=degenerate,
            )
        )
    elapsed = clock() - run_start

    if not records:
        raise ValueError(f"Stream ended before evaluation starts at tau0={tau0}; nothing to evaluate")

    metadata: Dict[str, Any] = {
        "learner": learner.learner_id,
        "window": config.window,
        "tau0": tau0,
        "final_model_size": learner.model_size(),
    }
    stream_metadata = getattr(stream, "metadata", None)
    if callable(stream_metadata):
        metadata.update(stream_metadata())
    reset_count = getattr(learner, "reset_count", None)
    if reset_count is not None:
        metadata["reset_count"] = reset_count

    summary = RunSummary(
        overall_accuracy=correct_total / len(records),
        evaluated=len(records),
        total_ns=elapsed if config.timing else None,
        predict_ns=predict_total if config.timing else None,
        update_ns=update_total if config.timing else None,
        metadata=metadata,
    )
    trajectory = None
    if config.record_trajectory:
        trajectory = Trajectory(np.asarray(traj_t), np.vstack(traj_theta), np.vstack(traj_hat))

    logger.info(
        "Prequential run complete",
        extra={
            "learner": learner.learner_id,
            "evaluated": summary.evaluated,
            "overall_accuracy": summary.overall_accuracy,
        },
    )
    return PrequentialResult(records, summary, trajectory)


def capture_trajectory(result: PrequentialResult) -> Trajectory:
    """The ``(theta_t, theta_hat_t)`` path recorded by a run."""

    if result.trajectory is None:
        raise UnsupportedOperation("Run did not record a trajectory (enable record_trajectory on a linear learner)")
    return result.trajectory


__all__ = [
    "EvalConfig",
    "EvalRecord",
    "PrequentialResult",
    "RunSummary",
    "Trajectory",
    "capture_trajectory",
    "prequential_run",
]
