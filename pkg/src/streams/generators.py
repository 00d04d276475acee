"""Synthetic concept-drifting streams.

``HyperplaneStream`` labels standard-normal instances by the side of a hyperplane
``theta_t`` whose evolution follows one of the drift kinds (sudden switch, rotation,
probabilistic mixing). ``RandomTreeStream`` labels uniform instances by a fixed random
decision tree.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np

from src.streams.core import (
    DriftSchedule,
    EndOfStream,
    Instance,
    LabeledInstance,
    UnsupportedOperation,
)
from src.utils.rng import PRNG_NAME, spawn_rngs

logger = logging.getLogger(__name__)

DEFAULT_ANGLE = 0.01
ROTATION_PLANE = "x0-x1"


class DriftType(str, Enum):
    NONE = "none"
    SUDDEN = "sudden"
    INCREMENTAL = "incremental"
    GRADUAL = "gradual"
    CONSTANT_INCREMENTAL = "constant-incremental"


@dataclass(frozen=True)
class DriftKind:
    """How the concept moves; ``angle`` (radians per step) only matters for rotations."""

    type: DriftType = DriftType.NONE
    angle: float = DEFAULT_ANGLE

    def __post_init__(self) -> None:
        object.__setattr__(self, "type", DriftType(self.type))
        if not math.isfinite(self.angle):
            raise ValueError(f"Drift angle must be finite, got {self.angle}")

    @property
    def rotates(self) -> bool:
        return self.type in (DriftType.INCREMENTAL, DriftType.CONSTANT_INCREMENTAL)


def sample_concept(d: int, rng: np.random.Generator) -> np.ndarray:
    """Draw a hyperplane normal with i.i.d. standard-normal entries."""

    if d < 1:
        raise ValueError(f"Invalid dimension {d}: concepts need d >= 1")
    return rng.standard_normal(d)


def label(theta: np.ndarray, x: np.ndarray) -> int:
    """Class 1 on the non-negative side of ``theta^T x = 0`` (ties included)."""

    theta = np.asarray(theta, dtype=float)
    x = np.asarray(x, dtype=float)
    if theta.shape != x.shape:
        raise ValueError(f"Length mismatch: theta has {theta.shape[0]} entries, x has {x.shape[0]}")
    return 1 if float(theta @ x) >= 0.0 else 0


def rotate_first_plane(theta: np.ndarray, angle: float) -> np.ndarray:
    """Apply ``A^T`` for a plane rotation of ``angle`` in the first two coordinates."""

    if theta.shape[0] < 2:
        raise ValueError("Rotation needs at least two dimensions")
    cos_a, sin_a = math.cos(angle), math.sin(angle)
    rotated = theta.copy()
    rotated[0] = cos_a * theta[0] + sin_a * theta[1]
    rotated[1] = -sin_a * theta[0] + cos_a * theta[1]
    return rotated


class HyperplaneStream:
    """Binary stream labelled by a drifting hyperplane concept.

    Three independent generators are spawned from ``seed``: one for the concepts,
    one for instances and one for the gradual mixing coin. Streams that share a seed
    therefore emit the same instances regardless of their drift kind.
    """

    n_classes = 2

    def __init__(
        self,
        d: int,
        schedule: DriftSchedule,
        kind: Optional[DriftKind] = None,
        seed: int = 0,
        theta_a: Optional[np.ndarray] = None,
        theta_b: Optional[np.ndarray] = None,
    ) -> None:
        self.kind = kind or DriftKind()
        if self.kind.rotates and d < 2:
            raise ValueError(f"Rotational drift is undefined for d={d} (needs d >= 2)")

        self.dimensionality = d
        self.schedule = schedule
        self.seed = seed
        self.t = 0

        concept_rng, self._data_rng, self._mix_rng = spawn_rngs(seed, 3)
        drawn_a = sample_concept(d, concept_rng)
        drawn_b = sample_concept(d, concept_rng)
        self.theta_a = drawn_a if theta_a is None else np.asarray(theta_a, dtype=float).copy()
        self.theta_b = drawn_b if theta_b is None else np.asarray(theta_b, dtype=float).copy()
        self._theta = self.theta_a.copy()

        logger.info(
            "Initialized hyperplane stream",
            extra={"d": d, "kind": self.kind.type.value, "seed": seed},
        )

    @property
    def total(self) -> int:
        return self.schedule.total

    def advance_sudden(self) -> None:
        """Concept a before ``tau1``, the independently drawn concept b from ``tau1`` on."""

        self._theta = self.theta_a if self.t < self.schedule.tau1 else self.theta_b

    def advance_incremental(self) -> None:
        """Rotate the concept by ``angle`` at each step inside the drift window."""

        if self.t == 0:
            return
        if self.kind.type == DriftType.CONSTANT_INCREMENTAL:
            active = True
        else:
            active = self.schedule.tau1 < self.t <= self.schedule.tau2
        if active and self.kind.angle != 0.0:
            self._theta = rotate_first_plane(self._theta, self.kind.angle)

    def gradual_alpha(self, t: int) -> float:
        """Probability of drawing from concept b at timestep ``t`` (linear ramp)."""

        tau1, tau2 = self.schedule.tau1, self.schedule.tau2
        if t < tau1:
            return 0.0
        if t >= tau2:
            # an empty window (tau2 == tau1) degenerates to a sudden switch
            return 1.0
        return (t - tau1) / (tau2 - tau1)

    def advance_gradual(self) -> None:
        """Pick concept b with probability ``alpha_t`` and concept a otherwise."""

        alpha = self.gradual_alpha(self.t)
        if alpha <= 0.0:
            self._theta = self.theta_a
        elif alpha >= 1.0:
            self._theta = self.theta_b
        else:
            self._theta = self.theta_b if self._mix_rng.random() < alpha else self.theta_a

    def _advance(self) -> None:
        kind = self.kind.type
        if kind == DriftType.SUDDEN:
            self.advance_sudden()
        elif kind == DriftType.GRADUAL:
            self.advance_gradual()
        elif self.kind.rotates:
            self.advance_incremental()

    def next_instance(self) -> LabeledInstance:
        if self.t >= self.schedule.total:
            raise EndOfStream(f"Stream exhausted after {self.schedule.total} instances")
        self._advance()
        x = self._data_rng.standard_normal(self.dimensionality)
        y = label(self._theta, x)
        self.t += 1
        return LabeledInstance(Instance(x), y)

    def true_theta(self) -> np.ndarray:
        """Concept that generated the most recent instance (a copy)."""

        return self._theta.copy()

    def metadata(self) -> Dict[str, Any]:
        return {
            "stream": "hyperplane",
            "kind": self.kind.type.value,
            "angle": self.kind.angle,
            "d": self.dimensionality,
            "tau0": self.schedule.tau0,
            "tau1": self.schedule.tau1,
            "tau2": self.schedule.tau2,
            "total": self.schedule.total,
            "seed": self.seed,
            "prng": PRNG_NAME,
            "rotation_plane": ROTATION_PLANE,
        }


@dataclass
class TreeNode:
    """Internal node when ``attribute`` is set, leaf otherwise."""

    attribute: Optional[int] = None
    threshold: float = 0.0
    left: Optional["TreeNode"] = None
    right: Optional["TreeNode"] = None
    label: int = 0

    @property
    def is_leaf(self) -> bool:
        return self.attribute is None

    def route(self, x: np.ndarray) -> int:
        node = self
        while not node.is_leaf:
            node = node.left if x[node.attribute] <= node.threshold else node.right
        return node.label

    def leaf_count(self) -> int:
        if self.is_leaf:
            return 1
        return self.left.leaf_count() + self.right.leaf_count()


def build_random_tree(
    d: int,
    n_classes: int,
    depth: int,
    rng: np.random.Generator,
) -> TreeNode:
    """Full binary tree with random split attributes, thresholds and leaf classes.

    Thresholds are drawn inside the interval still reachable at the node, so every
    leaf covers a region of positive volume.
    """

    def grow(level: int, bounds: Tuple[Tuple[float, float], ...]) -> TreeNode:
        if level == depth:
            return TreeNode(label=int(rng.integers(n_classes)))
        attribute = int(rng.integers(d))
        low, high = bounds[attribute]
        threshold = float(rng.uniform(low, high))
        left_bounds = bounds[:attribute] + ((low, threshold),) + bounds[attribute + 1 :]
        right_bounds = bounds[:attribute] + ((threshold, high),) + bounds[attribute + 1 :]
        return TreeNode(
            attribute=attribute,
            threshold=threshold,
            left=grow(level + 1, left_bounds),
            right=grow(level + 1, right_bounds),
        )

    return grow(0, tuple((0.0, 1.0) for _ in range(d)))


class RandomTreeStream:
    """Uniform instances on ``[0, 1]^d`` labelled by a fixed random tree."""

    def __init__(
        self,
        d: int = 10,
        n_classes: int = 2,
        depth: int = 5,
        total: int = 10_000,
        seed: int = 0,
        tree: Optional[TreeNode] = None,
    ) -> None:
        if d < 1:
            raise ValueError(f"Invalid dimension {d}: RTG needs d >= 1")
        self.dimensionality = d
        self.n_classes = n_classes
        self.depth = depth
        self.total = total
        self.seed = seed
        self.t = 0

        tree_rng, self._data_rng = spawn_rngs(seed, 2)
        self.tree = tree if tree is not None else build_random_tree(d, n_classes, depth, tree_rng)

    def rtg_next(self) -> LabeledInstance:
        if self.t >= self.total:
            raise EndOfStream(f"Stream exhausted after {self.total} instances")
        x = self._data_rng.uniform(0.0, 1.0, self.dimensionality)
        self.t += 1
        return LabeledInstance(Instance(x), self.tree.route(x))

    next_instance = rtg_next

    def true_theta(self) -> np.ndarray:
        raise UnsupportedOperation("Random-tree streams have no hyperplane concept")

    def metadata(self) -> Dict[str, Any]:
        return {
            "stream": "rtg",
            "d": self.dimensionality,
            "n_classes": self.n_classes,
            "depth": self.depth,
            "leaves": self.tree.leaf_count(),
            "total": self.total,
            "seed": self.seed,
            "prng": PRNG_NAME,
        }


__all__ = [
    "DEFAULT_ANGLE",
    "DriftKind",
    "DriftType",
    "HyperplaneStream",
    "RandomTreeStream",
    "TreeNode",
    "build_random_tree",
    "label",
    "rotate_first_plane",
    "sample_concept",
]
