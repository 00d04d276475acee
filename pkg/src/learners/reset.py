"""Detect-and-reset wrapper: discard the inner learner when its windowed error jumps."""
from __future__ import annotations

import logging
import math
from collections import deque
from typing import Callable, Deque, Optional

import numpy as np

from src.streams.core import Instance, LabeledInstance, Learner

logger = logging.getLogger(__name__)


class DetectAndReset:
    """Monitor the inner learner's error on each instance before it trains on it.

    The reference is the lowest windowed error rate seen since the window last
    filled; a rate above ``reference + sensitivity`` rebuilds the inner learner from
    ``factory`` and clears the window.
    """

    def __init__(
        self,
        factory: Callable[[], Learner],
        window: int = 100,
        sensitivity: float = 0.15,
        learner_id: Optional[str] = None,
    ) -> None:
        if window < 1:
            raise ValueError(f"Detection window must be >= 1, got {window}")
        if sensitivity < 0 or math.isnan(sensitivity):
            raise ValueError(f"Sensitivity must be non-negative, got {sensitivity}")
        self.factory = factory
        self.window = window
        self.sensitivity = sensitivity
        self.inner = factory()
        self.learner_id = learner_id or f"reset({self.inner.learner_id})"
        self.reset_count = 0
        self.instances_seen = 0
        self._errors: Deque[int] = deque(maxlen=window)
        self._reference: Optional[float] = None

    @property
    def error_rate(self) -> Optional[float]:
        if len(self._errors) < self.window:
            return None
        return sum(self._errors) / self.window

    def predict(self, instance: Instance) -> int:
        return self.inner.predict(instance)

    def reset_wrapper_update(self, labeled: LabeledInstance) -> None:
        self.instances_seen += 1
        self._errors.append(int(self.inner.predict(labeled.instance) != labeled.label))
        rate = self.error_rate
        if rate is not None:
            if self._reference is None or rate < self._reference:
                self._reference = rate
            elif rate > self._reference + self.sensitivity:
                self._reset(rate)
        self.inner.update(labeled)

    update = reset_wrapper_update

    def _reset(self, rate: float) -> None:
        logger.info(
            "Drift detected, resetting learner",
            extra={
                "learner": self.inner.learner_id,
                "error_rate": rate,
                "reference": self._reference,
                "instances_seen": self.instances_seen,
            },
        )
        self.inner = self.factory()
        self.reset_count += 1
        self._errors.clear()
        self._reference = None

    def weights(self) -> Optional[np.ndarray]:
        return self.inner.weights()

    def model_size(self) -> int:
        return self.inner.model_size()


__all__ = ["DetectAndReset"]
