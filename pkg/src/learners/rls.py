"""Recursive least squares, as a regressor and as a one-vs-rest stream classifier."""
from __future__ import annotations

from typing import Optional

import numpy as np

from src.streams.core import Instance, LabeledInstance


class RlsRegressor:
    """Exponentially weighted RLS; ``forgetting == 1`` is the plain recursion.

    ``rinv`` starts at ``delta * I`` and is symmetrised after every update.
    """

    def __init__(self, n_features: int, delta: float = 1e6, forgetting: float = 1.0, n_outputs: int = 1) -> None:
        if delta <= 0:
            raise ValueError(f"delta must be positive, got {delta}")
        if not 0.0 < forgetting <= 1.0:
            raise ValueError(f"Forgetting factor must lie in (0, 1], got {forgetting}")
        self.n_features = n_features
        self.delta = delta
        self.forgetting = forgetting
        self.rinv = np.eye(n_features) * delta
        self.theta = np.zeros((n_outputs, n_features))

    def rls_update(self, x: np.ndarray, y: np.ndarray | float) -> None:
        x = np.asarray(x, dtype=float)
        targets = np.atleast_1d(np.asarray(y, dtype=float))
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(targets))):
            raise ValueError("RLS inputs must be finite")
        if x.shape[0] != self.n_features:
            raise ValueError(f"Expected {self.n_features} features, got {x.shape[0]}")

        residuals = targets - self.theta @ x
        rinv_x = self.rinv @ x
        gain = rinv_x / (self.forgetting + x @ rinv_x)
        rinv = (self.rinv - np.outer(gain, rinv_x)) / self.forgetting
        self.rinv = 0.5 * (rinv + rinv.T)
        # the updated rinv applied to x equals the gain vector
        self.theta += np.outer(residuals, gain)

    update = rls_update

    def predict_value(self, x: np.ndarray) -> np.ndarray:
        return self.theta @ np.asarray(x, dtype=float)


def rls_update(model: RlsRegressor, x: np.ndarray, y: float) -> None:
    model.rls_update(x, y)


class RlsClassifier:
    """RLS fitted to +/-1 targets; all one-vs-rest outputs share one ``rinv``."""

    def __init__(
        self,
        n_features: int,
        n_classes: int = 2,
        delta: float = 1e6,
        forgetting: float = 1.0,
        learner_id: str = "rls",
    ) -> None:
        self.n_classes = n_classes
        self.learner_id = learner_id
        outputs = 1 if n_classes == 2 else n_classes
        self.regressor = RlsRegressor(n_features, delta=delta, forgetting=forgetting, n_outputs=outputs)

    def predict(self, instance: Instance) -> int:
        scores = self.regressor.predict_value(instance.features)
        if self.n_classes == 2:
            return 1 if scores[0] >= 0.0 else 0
        return int(np.argmax(scores))

    def update(self, labeled: LabeledInstance) -> None:
        if self.n_classes == 2:
            targets = np.array([1.0 if labeled.label == 1 else -1.0])
        else:
            targets = -np.ones(self.n_classes)
            targets[labeled.label] = 1.0
        self.regressor.rls_update(labeled.features, targets)

    def weights(self) -> Optional[np.ndarray]:
        theta = self.regressor.theta
        return theta[0].copy() if self.n_classes == 2 else theta.copy()

    def model_size(self) -> int:
        return int(self.regressor.theta.size)


__all__ = ["RlsClassifier", "RlsRegressor", "rls_update"]
