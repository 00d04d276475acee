"""Instance, stream and learner contracts shared across drift-bench.

Every stream emits :class:`LabeledInstance` values one timestep at a time and every
learner follows the test-then-train discipline: ``predict`` is side-effect free,
``update`` consumes the true label afterwards.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, Iterator, Optional, Protocol, runtime_checkable

import numpy as np


class EndOfStream(Exception):
    """Raised by ``next_instance`` once a stream has emitted all of its instances."""


class UnsupportedOperation(RuntimeError):
    """Raised when an operation does not apply to a stream or learner."""


@dataclass(frozen=True)
class Instance:
    """Dense feature vector observed at one timestep."""

    features: np.ndarray

    def __post_init__(self) -> None:
        array = np.array(self.features, dtype=float, copy=True).reshape(-1)
        if not np.all(np.isfinite(array)):
            raise ValueError("Instance features must be finite")
        array.setflags(write=False)
        object.__setattr__(self, "features", array)

    @property
    def dimensionality(self) -> int:
        return int(self.features.shape[0])


@dataclass(frozen=True)
class LabeledInstance:
    """An instance paired with its class index."""

    instance: Instance
    label: int

    def __post_init__(self) -> None:
        if int(self.label) < 0:
            raise ValueError(f"Label must be a non-negative class index, got {self.label}")
        object.__setattr__(self, "label", int(self.label))

    @property
    def features(self) -> np.ndarray:
        return self.instance.features


@dataclass(frozen=True)
class DriftSchedule:
    """Timeline of a drifting stream: pre-training end, drift window and length."""

    tau0: int
    tau1: int
    tau2: int
    total: int

    def __post_init__(self) -> None:
        if not 0 <= self.tau0 <= self.tau1 <= self.tau2 <= self.total:
            raise ValueError(
                "Drift schedule requires 0 <= tau0 <= tau1 <= tau2 <= total, got "
                f"tau0={self.tau0}, tau1={self.tau1}, tau2={self.tau2}, total={self.total}"
            )

    @classmethod
    def sudden(cls, tau1: int, total: int, tau0: Optional[int] = None) -> "DriftSchedule":
        """Sudden drift is a one-step window: ``tau2 = tau1 + 1``."""

        return cls(tau0=total // 10 if tau0 is None else tau0, tau1=tau1, tau2=tau1 + 1, total=total)

    @classmethod
    def default(cls, total: int = 10_000) -> "DriftSchedule":
        """Standard synthetic timeline: pre-training T/10, drift from 5K to 6K of 10K."""

        scale = total / 10_000
        return cls(
            tau0=total // 10,
            tau1=int(5_000 * scale),
            tau2=int(6_000 * scale),
            total=total,
        )

    def is_evaluated(self, t: int) -> bool:
        return self.tau0 <= t < self.total

    @property
    def evaluated_count(self) -> int:
        return self.total - self.tau0


@runtime_checkable
class StreamSource(Protocol):
    """A deterministic, seeded source of labeled instances."""

    dimensionality: int
    n_classes: int

    def next_instance(self) -> LabeledInstance:
        """Emit the instance at the current timestep and advance."""

    def metadata(self) -> Dict[str, Any]:
        """Parameters describing the stream, echoed into run metadata."""


@runtime_checkable
class Learner(Protocol):
    """Incremental classifier used under prequential evaluation."""

    learner_id: str

    def predict(self, instance: Instance) -> int:
        """Return a class index without mutating state."""

    def update(self, labeled: LabeledInstance) -> None:
        """Consume one labeled instance."""

    def weights(self) -> Optional[np.ndarray]:
        """Current parameter vector for parametric learners, otherwise ``None``."""

    def model_size(self) -> int:
        """Deterministic size proxy (weights, buffer entries or leaves)."""


def iterate(stream: StreamSource) -> Iterator[LabeledInstance]:
    """Yield instances from ``stream`` until it signals the end."""

    while True:
        try:
            yield stream.next_instance()
        except EndOfStream:
            return


__all__ = [
    "DriftSchedule",
    "EndOfStream",
    "Instance",
    "LabeledInstance",
    "Learner",
    "StreamSource",
    "UnsupportedOperation",
    "iterate",
]
