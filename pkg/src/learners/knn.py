"""k-nearest neighbours over a fixed-size FIFO window of recent instances."""
from __future__ import annotations

from typing import List, Optional, Tuple

import numpy as np

from src.streams.core import Instance, LabeledInstance


class KnnClassifier:
    """Majority vote of the ``k`` nearest buffered instances (Euclidean).

    The buffer is a ring of at most ``window`` rows; the oldest row is overwritten
    first, so prediction costs O(window * d) regardless of stream length.
    """

    def __init__(self, n_features: int, n_classes: int = 2, k: int = 10, window: int = 100, learner_id: str = "knn") -> None:
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        if window < 1:
            raise ValueError(f"Buffer size must be >= 1, got {window}")
        self.n_features = n_features
        self.n_classes = n_classes
        self.k = k
        self.window = window
        self.learner_id = learner_id
        self._features = np.zeros((window, n_features))
        self._labels = np.zeros(window, dtype=int)
        self._size = 0
        self._head = 0  # next slot to write

    @property
    def size(self) -> int:
        return self._size

    def buffer(self) -> List[Tuple[np.ndarray, int]]:
        """Buffered ``(features, label)`` pairs, oldest first."""

        start = self._head if self._size == self.window else 0
        order = [(start + i) % self.window for i in range(self._size)]
        return [(self._features[i].copy(), int(self._labels[i])) for i in order]

    def knn_predict(self, instance: Instance) -> int:
        if self._size == 0:
            return 0
        stored = self._features[: self._size]
        distances = np.sqrt(np.sum((stored - instance.features) ** 2, axis=1))
        neighbours = np.argsort(distances, kind="stable")[: min(self.k, self._size)]
        votes = np.bincount(self._labels[: self._size][neighbours], minlength=self.n_classes)
        return int(np.argmax(votes))

    predict = knn_predict

    def knn_insert(self, labeled: LabeledInstance) -> None:
        self._features[self._head] = labeled.features
        self._labels[self._head] = labeled.label
        self._head = (self._head + 1) % self.window
        self._size = min(self._size + 1, self.window)

    update = knn_insert

    def weights(self) -> Optional[np.ndarray]:
        return None

    def model_size(self) -> int:
        return self._size


__all__ = ["KnnClassifier"]
