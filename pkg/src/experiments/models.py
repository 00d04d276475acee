"""Pydantic models describing a reproducible experiment."""
from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.streams.core import DriftSchedule
from src.streams.generators import DEFAULT_ANGLE, DriftType

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

CONFIG_VERSION = 1


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class DatasetConfig(_Strict):
    """A benchmark file; ``name`` picks built-in expectations (electricity, covertype)."""

    name: Optional[str] = None
    path: Optional[str] = None
    format: Optional[Literal["csv", "arff"]] = None
    label_column: Union[int, str] = -1
    header: bool = True
    expected_instances: Optional[int] = Field(None, ge=1)
    expected_attributes: Optional[int] = Field(None, ge=0)
    expected_classes: Optional[int] = Field(None, ge=1)
    attribute_policy: Literal["error", "warn"] = "error"


class StreamConfig(_Strict):
    """Synthetic stream parameters, or a dataset reference when ``kind == 'dataset'``."""

    kind: Literal["hyperplane", "rtg", "dataset"] = "hyperplane"
    drift: DriftType = DriftType.NONE
    angle: float = Field(DEFAULT_ANGLE, allow_inf_nan=False)
    d: int = Field(2, ge=1)
    n_classes: int = Field(2, ge=2)
    depth: int = Field(5, ge=1)
    total: int = Field(10_000, ge=1)
    tau0: Optional[int] = Field(None, ge=0)
    tau1: int = Field(5_000, ge=0)
    tau2: Optional[int] = Field(6_000, ge=0)
    dataset: Optional[DatasetConfig] = None
    head: Optional[int] = Field(None, ge=1)
    normalization: Literal["auto", "none", "online-standardize"] = "auto"

    @model_validator(mode="after")
    def _check_timeline(self) -> "StreamConfig":
        if self.kind == "dataset":
            if self.dataset is None:
                raise ValueError("dataset streams need a [stream.dataset] section")
            return self
        if self.kind == "hyperplane":
            if self.drift in (DriftType.INCREMENTAL, DriftType.CONSTANT_INCREMENTAL) and self.d < 2:
                raise ValueError("rotational drift needs d >= 2")
        self.schedule()
        return self

    def schedule(self, total: Optional[int] = None) -> DriftSchedule:
        """Resolved timeline; sudden drift always uses a one-step window.

        Streams without drift (random-tree, datasets) only use ``tau0`` and ``total``;
        ``total`` overrides the configured length for datasets.
        """

        total = self.total if total is None else total
        if self.kind == "dataset":
            tau0 = self.tau0 or 0
            return DriftSchedule(tau0=tau0, tau1=tau0, tau2=tau0, total=total)
        tau0 = total // 10 if self.tau0 is None else self.tau0
        if self.kind == "rtg":
            return DriftSchedule(tau0=tau0, tau1=tau0, tau2=tau0, total=total)
        tau2 = self.tau1 + 1 if self.drift == DriftType.SUDDEN or self.tau2 is None else self.tau2
        return DriftSchedule(tau0=tau0, tau1=self.tau1, tau2=tau2, total=total)


class LearnerConfig(_Strict):
    id: str
    params: Dict[str, Any] = Field(default_factory=dict)


class EvalSettings(_Strict):
    window: int = Field(200, ge=1)
    record_trajectory: bool = False
    timing: bool = True
    raw_tracking_error: bool = False
    plot: bool = True


class ExperimentConfig(_Strict):
    """Everything needed to replay an experiment; echoed as ``resolved_config.json``."""

    version: Literal[1] = CONFIG_VERSION
    name: str = "experiment"
    description: Optional[str] = None
    stream: StreamConfig = Field(default_factory=StreamConfig)
    learners: List[LearnerConfig] = Field(..., min_length=1)
    eval: EvalSettings = Field(default_factory=EvalSettings)
    seeds: List[int] = Field(default_factory=lambda: [42], min_length=1)
    output_dir: Optional[str] = None


def load_experiment_config(path: Union[str, Path]) -> ExperimentConfig:
    """Parse a TOML (or JSON) experiment file and validate it.

    Raises ``pydantic.ValidationError`` whose locations name the offending field.
    """

    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Experiment config not found: {path}")
    if path.suffix.lower() == ".json":
        raw = json.loads(path.read_text(encoding="utf-8"))
    else:
        with path.open("rb") as handle:
            raw = tomllib.load(handle)
    return ExperimentConfig.model_validate(raw)


def dump_resolved_config(config: ExperimentConfig, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(config.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


__all__ = [
    "CONFIG_VERSION",
    "DatasetConfig",
    "EvalSettings",
    "ExperimentConfig",
    "LearnerConfig",
    "StreamConfig",
    "dump_resolved_config",
    "load_experiment_config",
]
