"""Hoeffding tree with Gaussian numeric observers and naive Bayes leaves."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy.stats import norm

from src.streams.core import Instance, LabeledInstance

logger = logging.getLogger(__name__)

_MIN_BRANCH_FRACTION = 0.01
_VARIANCE_FLOOR = 1e-6


def entropy(distribution: np.ndarray) -> float:
    total = float(np.sum(distribution))
    if total <= 0.0:
        return 0.0
    probabilities = distribution[distribution > 0] / total
    return float(-np.sum(probabilities * np.log2(probabilities)))


def hoeffding_bound(value_range: float, confidence: float, n: float) -> float:
    """``sqrt(R^2 ln(1/delta) / 2n)``."""

    return math.sqrt(value_range**2 * math.log(1.0 / confidence) / (2.0 * n))


def information_gain(pre_split: np.ndarray, left: np.ndarray, right: np.ndarray) -> float:
    total = float(np.sum(pre_split))
    left_weight, right_weight = float(np.sum(left)), float(np.sum(right))
    if total <= 0.0:
        return 0.0
    if min(left_weight, right_weight) / total < _MIN_BRANCH_FRACTION:
        return -math.inf
    post = (left_weight * entropy(left) + right_weight * entropy(right)) / total
    return entropy(pre_split) - post


@dataclass
class SplitSuggestion:
    attribute: Optional[int]
    threshold: float
    merit: float
    left_distribution: np.ndarray
    right_distribution: np.ndarray

    @property
    def is_null(self) -> bool:
        return self.attribute is None


class LearningLeaf:
    """Class counts plus per-class, per-attribute running Gaussian summaries."""

    def __init__(self, n_features: int, n_classes: int, class_counts: Optional[np.ndarray] = None) -> None:
        self.class_counts = np.zeros(n_classes) if class_counts is None else np.array(class_counts, dtype=float)
        self.n = np.zeros((n_classes, n_features))
        self.mean = np.zeros((n_classes, n_features))
        self.m2 = np.zeros((n_classes, n_features))
        self.attr_min = np.full(n_features, np.inf)
        self.attr_max = np.full(n_features, -np.inf)
        self.seen = 0
        self.seen_at_last_check = 0

    def observe(self, x: np.ndarray, y: int) -> None:
        self.class_counts[y] += 1.0
        self.seen += 1
        self.n[y] += 1.0
        delta = x - self.mean[y]
        self.mean[y] += delta / self.n[y]
        self.m2[y] += delta * (x - self.mean[y])
        np.minimum(self.attr_min, x, out=self.attr_min)
        np.maximum(self.attr_max, x, out=self.attr_max)

    def std(self) -> np.ndarray:
        with np.errstate(invalid="ignore", divide="ignore"):
            variance = np.where(self.n > 0, self.m2 / np.maximum(self.n, 1.0), 0.0)
        return np.sqrt(variance)

    def majority_class(self) -> int:
        return int(np.argmax(self.class_counts))

    def naive_bayes_class(self, x: np.ndarray) -> int:
        """Prior times Gaussian likelihoods, over the classes observed at this leaf.

        Counts inherited from a parent split still weigh into the prior, but a class
        without a Gaussian summary here cannot win. A leaf that has observed nothing
        falls back to its majority class.
        """

        observed = self.n.min(axis=1) > 0 if self.n.shape[1] else self.class_counts > 0
        if not np.any(observed):
            return self.majority_class()
        scale = np.sqrt(np.maximum(self.std()[observed] ** 2, _VARIANCE_FLOOR))
        log_likelihood = norm.logpdf(x, loc=self.mean[observed], scale=scale).sum(axis=1)
        scores = np.full(self.class_counts.shape[0], -np.inf)
        scores[observed] = np.log(self.class_counts[observed] / self.class_counts.sum()) + log_likelihood
        return int(np.argmax(scores))

    def split_candidates(self, n_candidates: int) -> List[SplitSuggestion]:
        """Best equal-width threshold per attribute, estimated from the Gaussians."""

        pre_split = self.n[:, 0] if self.n.shape[1] else self.class_counts
        std = self.std()
        suggestions: List[SplitSuggestion] = []
        for attribute in range(self.n.shape[1]):
            low, high = self.attr_min[attribute], self.attr_max[attribute]
            if not high > low:
                continue
            thresholds = low + (high - low) * np.arange(1, n_candidates + 1) / (n_candidates + 1)
            counts = self.n[:, attribute][:, None]
            means = self.mean[:, attribute][:, None]
            spread = std[:, attribute][:, None]
            with np.errstate(divide="ignore", invalid="ignore"):
                below = np.where(
                    spread > 0,
                    norm.cdf((thresholds[None, :] - means) / np.where(spread > 0, spread, 1.0)),
                    (means <= thresholds[None, :]).astype(float),
                )
            left = counts * below
            right = counts - left
            best: Optional[SplitSuggestion] = None
            for column, threshold in enumerate(thresholds):
                merit = information_gain(pre_split, left[:, column], right[:, column])
                if best is None or merit > best.merit:
                    best = SplitSuggestion(attribute, float(threshold), merit, left[:, column].copy(), right[:, column].copy())
            if best is not None and math.isfinite(best.merit):
                suggestions.append(best)
        return suggestions


@dataclass
class SplitNode:
    attribute: int
    threshold: float
    left: "Node"
    right: "Node"

    def child_for(self, x: np.ndarray) -> Tuple["Node", bool]:
        if x[self.attribute] <= self.threshold:
            return self.left, True
        return self.right, False


Node = Union[SplitNode, LearningLeaf]


@dataclass
class _Route:
    leaf: LearningLeaf
    parent: Optional[SplitNode] = None
    is_left: bool = False
    depth: int = 0


@dataclass
class HoeffdingTree:
    """Incremental decision tree splitting only on Hoeffding-bound evidence.

    A leaf is evaluated each time it has seen ``grace_period`` new instances; it
    splits when the best attribute beats the runner-up (or the null split) by more
    than the bound, or when the bound drops below ``tie_threshold``. Leaves that have
    seen fewer than ``nb_threshold`` instances predict their majority class.
    """

    n_features: int
    n_classes: int = 2
    split_confidence: float = 1e-7
    tie_threshold: float = 0.05
    grace_period: int = 200
    n_candidates: int = 10
    nb_threshold: int = 10
    learner_id: str = "ht"
    root: Node = field(init=False)
    instances_seen: int = field(init=False, default=0)
    split_times: List[int] = field(init=False, default_factory=list)

    def __post_init__(self) -> None:
        self.root = LearningLeaf(self.n_features, self.n_classes)
        self._leaves = 1

    @property
    def n_leaves(self) -> int:
        return self._leaves

    @property
    def first_split_at(self) -> Optional[int]:
        return self.split_times[0] if self.split_times else None

    def _route(self, x: np.ndarray) -> _Route:
        node, parent, is_left, depth = self.root, None, False, 0
        while isinstance(node, SplitNode):
            parent = node
            node, is_left = node.child_for(x)
            depth += 1
        return _Route(node, parent, is_left, depth)

    def ht_predict(self, instance: Instance) -> int:
        leaf = self._route(instance.features).leaf
        if leaf.seen < self.nb_threshold:
            return leaf.majority_class() if leaf.class_counts.sum() > 0 else 0
        return leaf.naive_bayes_class(instance.features)

    predict = ht_predict

    def ht_learn(self, labeled: LabeledInstance) -> None:
        if labeled.label >= self.n_classes:
            raise ValueError(f"Label {labeled.label} outside 0..{self.n_classes - 1}")
        self.instances_seen += 1
        route = self._route(labeled.features)
        leaf = route.leaf
        leaf.observe(labeled.features, labeled.label)
        if leaf.seen - leaf.seen_at_last_check < self.grace_period:
            return
        leaf.seen_at_last_check = leaf.seen
        suggestion = self.ht_try_split(leaf)
        if suggestion is not None:
            self._apply_split(route, suggestion)

    update = ht_learn

    def ht_try_split(self, leaf: LearningLeaf) -> Optional[SplitSuggestion]:
        """Return the winning split if the Hoeffding criterion holds, else ``None``."""

        if np.count_nonzero(leaf.n[:, 0] if leaf.n.shape[1] else leaf.class_counts) < 2:
            return None
        candidates = leaf.split_candidates(self.n_candidates)
        null_split = SplitSuggestion(None, 0.0, 0.0, leaf.class_counts.copy(), np.zeros_like(leaf.class_counts))
        candidates.append(null_split)
        candidates.sort(key=lambda suggestion: suggestion.merit, reverse=True)
        best, runner_up = candidates[0], candidates[1] if len(candidates) > 1 else null_split
        if best.is_null or best.merit <= 0.0:
            return None

        value_range = math.log2(max(self.n_classes, 2))
        epsilon = hoeffding_bound(value_range, self.split_confidence, leaf.seen)
        if best.merit - runner_up.merit > epsilon or epsilon < self.tie_threshold:
            return best
        return None

    def _apply_split(self, route: _Route, suggestion: SplitSuggestion) -> None:
        node = SplitNode(
            attribute=int(suggestion.attribute),
            threshold=suggestion.threshold,
            left=LearningLeaf(self.n_features, self.n_classes, suggestion.left_distribution),
            right=LearningLeaf(self.n_features, self.n_classes, suggestion.right_distribution),
        )
        if route.parent is None:
            self.root = node
        elif route.is_left:
            route.parent.left = node
        else:
            route.parent.right = node
        self._leaves += 1
        self.split_times.append(self.instances_seen)
        logger.debug(
            "Hoeffding split",
            extra={
                "attribute": node.attribute,
                "threshold": node.threshold,
                "merit": suggestion.merit,
                "depth": route.depth,
                "instances_seen": self.instances_seen,
            },
        )

    def weights(self) -> Optional[np.ndarray]:
        return None

    def model_size(self) -> int:
        return self._leaves


__all__ = [
    "HoeffdingTree",
    "LearningLeaf",
    "SplitNode",
    "SplitSuggestion",
    "entropy",
    "hoeffding_bound",
    "information_gain",
]
