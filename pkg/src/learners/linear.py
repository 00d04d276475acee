"""SGD family: hinge-loss linear classifiers with optional momentum and basis expansion."""
from __future__ import annotations

import logging
from typing import Optional

import numpy as np
from scipy.special import comb
from sklearn.preprocessing import PolynomialFeatures

from src.streams.core import Instance, LabeledInstance

logger = logging.getLogger(__name__)


class PolyBasis:
    """All monomials of total degree <= ``degree``, constant first, graded-lex order."""

    def __init__(self, d: int, degree: int) -> None:
        if degree < 1:
            raise ValueError(f"Polynomial degree must be >= 1, got {degree}")
        if d < 1:
            raise ValueError(f"Input dimension must be >= 1, got {d}")
        self.d = d
        self.degree = degree
        self._features = PolynomialFeatures(degree=degree, include_bias=True)
        self._features.fit(np.zeros((1, d)))

    @property
    def output_dim(self) -> int:
        return int(comb(self.d + self.degree, self.degree, exact=True))

    def expand(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float).reshape(1, -1)
        if x.shape[1] != self.d:
            raise ValueError(f"Expected {self.d} features, got {x.shape[1]}")
        return self._features.transform(x)[0]


def poly_expand(basis: PolyBasis, x: np.ndarray) -> np.ndarray:
    return basis.expand(x)


class SgdClassifier:
    """Hinge-loss SGD with L2 shrinkage, classical momentum and a constant step size.

    Binary problems keep a single weight row scored against 0; ``n_classes > 2`` uses
    one-vs-rest rows and predicts the argmax. The bias is never regularised.
    """

    def __init__(
        self,
        n_features: int,
        n_classes: int = 2,
        learning_rate: float = 0.01,
        l2: float = 1e-4,
        momentum: float = 0.0,
        degree: Optional[int] = None,
        learner_id: Optional[str] = None,
    ) -> None:
        if learning_rate <= 0:
            raise ValueError(f"Learning rate must be positive, got {learning_rate}")
        if l2 < 0:
            raise ValueError(f"L2 strength must be non-negative, got {l2}")
        if not 0.0 <= momentum < 1.0:
            raise ValueError(f"Momentum must lie in [0, 1), got {momentum}")
        if n_classes < 2:
            raise ValueError(f"Need at least two classes, got {n_classes}")

        self.n_features = n_features
        self.n_classes = n_classes
        self.learning_rate = learning_rate
        self.l2 = l2
        self.momentum = momentum
        self.basis = PolyBasis(n_features, degree) if degree is not None else None

        dim = self.basis.output_dim if self.basis is not None else n_features
        rows = 1 if n_classes == 2 else n_classes
        self.coef = np.zeros((rows, dim))
        self.intercept = np.zeros(rows)
        self._velocity_coef = np.zeros_like(self.coef)
        self._velocity_intercept = np.zeros_like(self.intercept)
        self._cache_key: Optional[np.ndarray] = None
        self._cache_value: Optional[np.ndarray] = None

        if learner_id is not None:
            self.learner_id = learner_id
        elif degree is not None:
            self.learner_id = f"pbf-sgd-{degree}"
        else:
            self.learner_id = "momentum-sgd" if momentum > 0 else "sgd"

    def _phi(self, x: np.ndarray) -> np.ndarray:
        if x.shape[0] != self.n_features:
            raise ValueError(f"Expected {self.n_features} features, got {x.shape[0]}")
        if self.basis is None:
            return x
        # predict then update expand the same features under prequential evaluation
        if self._cache_key is None or not np.array_equal(self._cache_key, x):
            self._cache_key = x.copy()
            self._cache_value = self.basis.expand(x)
        return self._cache_value

    def _targets(self, label: int) -> np.ndarray:
        if self.n_classes == 2:
            return np.array([1.0 if label == 1 else -1.0])
        signs = -np.ones(self.n_classes)
        signs[label] = 1.0
        return signs

    def decision_function(self, x: np.ndarray) -> np.ndarray:
        return self.coef @ self._phi(np.asarray(x, dtype=float)) + self.intercept

    def sgd_predict(self, instance: Instance) -> int:
        scores = self.decision_function(instance.features)
        if self.n_classes == 2:
            return 1 if scores[0] >= 0.0 else 0
        return int(np.argmax(scores))

    predict = sgd_predict

    def loss(self, x: np.ndarray, label: int) -> float:
        """Per-instance objective: summed hinge losses plus ``l2/2 * ||w||^2``."""

        margins = self._targets(label) * self.decision_function(x)
        hinge = np.maximum(0.0, 1.0 - margins).sum()
        return float(hinge + 0.5 * self.l2 * np.sum(self.coef**2))

    def gradient(self, x: np.ndarray, label: int) -> tuple[np.ndarray, np.ndarray]:
        """Gradient of :meth:`loss` w.r.t. ``(coef, intercept)``; margin exactly 1 counts as satisfied."""

        phi = self._phi(np.asarray(x, dtype=float))
        signs = self._targets(label)
        margins = signs * (self.coef @ phi + self.intercept)
        active = (margins < 1.0).astype(float) * signs
        grad_coef = -np.outer(active, phi) + self.l2 * self.coef
        grad_intercept = -active
        return grad_coef, grad_intercept

    def sgd_update(self, labeled: LabeledInstance) -> None:
        if labeled.label >= self.n_classes:
            raise ValueError(f"Label {labeled.label} outside 0..{self.n_classes - 1}")
        x = labeled.features
        if not np.all(np.isfinite(x)):
            raise ValueError("Features must be finite")

        grad_coef, grad_intercept = self.gradient(x, labeled.label)
        self._velocity_coef = self.momentum * self._velocity_coef - self.learning_rate * grad_coef
        self._velocity_intercept = self.momentum * self._velocity_intercept - self.learning_rate * grad_intercept
        self.coef += self._velocity_coef
        self.intercept += self._velocity_intercept

    update = sgd_update

    def weights(self) -> Optional[np.ndarray]:
        if self.n_classes == 2:
            return self.coef[0].copy()
        return self.coef.copy()

    def model_size(self) -> int:
        return int(self.coef.size + self.intercept.size)


__all__ = ["PolyBasis", "SgdClassifier", "poly_expand"]
