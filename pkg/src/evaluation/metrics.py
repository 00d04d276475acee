"""Accuracy and concept-tracking metrics."""
from __future__ import annotations

from typing import Iterable, Sequence, Tuple, Union

import numpy as np
import pandas as pd

#: Reported when the estimate has zero norm: two antipodal unit vectors are 2 apart.
MAX_TRACKING_ERROR = 4.0


def sliding_accuracy(correct: Union[Sequence[bool], Iterable[object]], window: int) -> np.ndarray:
    """Trailing mean of correctness; the first ``window - 1`` points average what exists.

    Accepts booleans/ints or objects with a ``correct`` attribute (evaluation records).
    """

    if window < 1:
        raise ValueError(f"Window must be >= 1, got {window}")
    values = [float(getattr(item, "correct", item)) for item in correct]
    if not values:
        return np.zeros(0)
    return pd.Series(values).rolling(window, min_periods=1).mean().to_numpy()


def tracking_error_flagged(
    theta_true: np.ndarray,
    theta_hat: np.ndarray,
    normalize: bool = True,
) -> Tuple[float, bool]:
    """Squared distance between concept and estimate, and whether the estimate was degenerate.

    With ``normalize`` both vectors are scaled to unit norm and the estimate's sign is
    chosen to maximise the dot product, so only the boundary direction counts.
    """

    truth = np.asarray(theta_true, dtype=float).reshape(-1)
    estimate = np.asarray(theta_hat, dtype=float).reshape(-1)
    if truth.shape != estimate.shape:
        raise ValueError(f"Length mismatch: theta has {truth.shape[0]} entries, estimate has {estimate.shape[0]}")
    if not normalize:
        return float(np.sum((truth - estimate) ** 2)), False

    estimate_norm = np.linalg.norm(estimate)
    truth_norm = np.linalg.norm(truth)
    if estimate_norm == 0.0 or truth_norm == 0.0:
        return MAX_TRACKING_ERROR, True
    unit_truth = truth / truth_norm
    unit_estimate = estimate / estimate_norm
    if unit_truth @ unit_estimate < 0.0:
        unit_estimate = -unit_estimate
    return float(np.sum((unit_truth - unit_estimate) ** 2)), False


def tracking_error(theta_true: np.ndarray, theta_hat: np.ndarray, normalize: bool = True) -> float:
    return tracking_error_flagged(theta_true, theta_hat, normalize)[0]


__all__ = ["MAX_TRACKING_ERROR", "sliding_accuracy", "tracking_error", "tracking_error_flagged"]
