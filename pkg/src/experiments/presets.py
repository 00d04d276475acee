"""Named experiments reproducing the drift benchmark figures and tables."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

from src.experiments.models import (
    DatasetConfig,
    EvalSettings,
    ExperimentConfig,
    LearnerConfig,
    StreamConfig,
)
from src.streams.generators import DriftType
from src.utils.config import AppConfig

logger = logging.getLogger(__name__)

#: Overall accuracy (%) reported for systems this package does not implement.
PUBLISHED_TABLE4: Dict[str, Dict[str, float]] = {
    "electricity": {"SAMkNN": 79.8, "PBF-SGD": 85.9, "RF-HT": 86.2},
    "rtg": {"SAMkNN": 78.8, "PBF-SGD": 81.8, "RF-HT": 77.9},
    "covertype": {"SAMkNN": 93.3, "PBF-SGD": 92.6, "RF-HT": 93.9},
    "synthetic": {"SAMkNN": 96.0, "PBF-SGD": 95.1, "RF-HT": 93.6},
}

TIMING_INSTANCES = 10_000

_VANILLA = ["knn", "sgd", "ht"]


def _learners(*ids: str) -> List[LearnerConfig]:
    return [LearnerConfig(id=learner_id) for learner_id in ids]


def _synthetic(drift: DriftType) -> StreamConfig:
    return StreamConfig(kind="hyperplane", drift=drift, d=2, total=10_000, tau0=1_000, tau1=5_000, tau2=6_000)


def _dataset_stream(name: str, app_config: AppConfig, head: Optional[int] = None) -> Optional[StreamConfig]:
    path = {"electricity": app_config.electricity_path, "covertype": app_config.covertype_path}[name]
    if path is None:
        logger.warning(
            "Dataset not configured, skipping",
            extra={"dataset": name, "env": f"DRIFT_{name.upper()}_PATH"},
        )
        return None
    return StreamConfig(kind="dataset", dataset=DatasetConfig(name=name, path=str(path)), tau0=0, head=head)


def _fig4(drift: DriftType, name: str) -> Callable[[AppConfig], List[ExperimentConfig]]:
    def build(app_config: AppConfig) -> List[ExperimentConfig]:
        return [
            ExperimentConfig(
                name=name,
                stream=_synthetic(drift),
                learners=_learners(*_VANILLA),
                eval=EvalSettings(window=200, timing=False),
                seeds=[app_config.seed],
            )
        ]

    return build


def _fig5(app_config: AppConfig) -> List[ExperimentConfig]:
    return [
        ExperimentConfig(
            name="fig5-tracking",
            stream=_synthetic(DriftType.CONSTANT_INCREMENTAL),
            learners=[
                LearnerConfig(id="sgd", params={"learning_rate": 0.5}),
                LearnerConfig(id="momentum-sgd", params={"learning_rate": 0.5, "momentum": 0.5}),
            ],
            eval=EvalSettings(window=200, timing=False, record_trajectory=True),
            seeds=[app_config.seed],
        )
    ]


def _fig6(app_config: AppConfig) -> List[ExperimentConfig]:
    return [
        ExperimentConfig(
            name="fig6-constant-drift",
            stream=_synthetic(DriftType.CONSTANT_INCREMENTAL),
            learners=_learners("sgd", "pbf-sgd-3", "knn", "ht", "reset(ht)"),
            eval=EvalSettings(window=200, timing=False),
            seeds=[app_config.seed],
        )
    ]


def _table4(app_config: AppConfig) -> List[ExperimentConfig]:
    learners = _learners("pbf-sgd-3", "sgd", "knn", "ht")
    experiments = [
        ExperimentConfig(
            name="table4-synthetic",
            stream=_synthetic(DriftType.CONSTANT_INCREMENTAL),
            learners=learners,
            eval=EvalSettings(timing=False, plot=False),
            seeds=[app_config.seed],
        ),
        ExperimentConfig(
            name="table4-rtg",
            stream=StreamConfig(kind="rtg", d=10, depth=5, total=10_000, tau0=1_000),
            learners=learners,
            eval=EvalSettings(timing=False, plot=False),
            seeds=[app_config.seed],
        ),
    ]
    for dataset in ("electricity", "covertype"):
        stream = _dataset_stream(dataset, app_config)
        if stream is not None:
            experiments.append(
                ExperimentConfig(
                    name=f"table4-{dataset}",
                    stream=stream,
                    learners=learners,
                    eval=EvalSettings(timing=False, plot=False),
                    seeds=[app_config.seed],
                )
            )
    return experiments


def _table6(app_config: AppConfig) -> List[ExperimentConfig]:
    learners = _learners("sgd", "pbf-sgd-2", "pbf-sgd-3", "knn", "ht", "reset(ht)")
    settings = EvalSettings(timing=True, plot=False)
    experiments = [
        ExperimentConfig(
            name="table6-synthetic",
            stream=_synthetic(DriftType.CONSTANT_INCREMENTAL),
            learners=learners,
            eval=settings,
            seeds=[app_config.seed],
        ),
        ExperimentConfig(
            name="table6-rtg",
            stream=StreamConfig(kind="rtg", d=10, depth=5, total=TIMING_INSTANCES, tau0=1_000),
            learners=learners,
            eval=settings,
            seeds=[app_config.seed],
        ),
    ]
    for dataset in ("electricity", "covertype"):
        stream = _dataset_stream(dataset, app_config, head=TIMING_INSTANCES)
        if stream is not None:
            experiments.append(
                ExperimentConfig(name=f"table6-{dataset}", stream=stream, learners=learners, eval=settings, seeds=[app_config.seed])
            )
    return experiments


def _fig7(app_config: AppConfig) -> List[ExperimentConfig]:
    learners = _learners("pbf-sgd-3", "knn", "ht")
    experiments = [
        ExperimentConfig(
            name="fig7-rtg",
            stream=StreamConfig(kind="rtg", d=10, depth=5, total=10_000, tau0=1_000),
            learners=learners,
            eval=EvalSettings(window=200, timing=False),
            seeds=[app_config.seed],
        )
    ]
    for dataset, head in (("electricity", None), ("covertype", 50_000)):
        stream = _dataset_stream(dataset, app_config, head=head)
        if stream is not None:
            experiments.append(
                ExperimentConfig(
                    name=f"fig7-{dataset}",
                    stream=stream,
                    learners=learners,
                    eval=EvalSettings(window=200, timing=False),
                    seeds=[app_config.seed],
                )
            )
    return experiments


@dataclass(frozen=True)
class Preset:
    name: str
    description: str
    build: Callable[[AppConfig], List[ExperimentConfig]]


PRESETS: Dict[str, Preset] = {
    preset.name: preset
    for preset in [
        Preset("fig4-stationary", "No drift; kNN, SGD and HT on a 2-d hyperplane stream", _fig4(DriftType.NONE, "fig4-stationary")),
        Preset("fig4-sudden", "Concept resampled at t=5,000", _fig4(DriftType.SUDDEN, "fig4-sudden")),
        Preset("fig4-incremental", "Rotation of 0.01 rad/step over t=5,000..6,000", _fig4(DriftType.INCREMENTAL, "fig4-incremental")),
        Preset("fig4-gradual", "Linear mixing of two concepts over t=5,000..6,000", _fig4(DriftType.GRADUAL, "fig4-gradual")),
        Preset("fig5-tracking", "SGD and momentum SGD (lr 0.5) tracking a constantly rotating concept", _fig5),
        Preset("fig6-constant-drift", "Constant rotation; SGD, PBF-SGD, kNN, HT and detect-and-reset HT", _fig6),
        Preset("fig7-difficult", "Window accuracy on RTG and, when configured, Electricity and CoverType", _fig7),
        Preset("table4", "Overall accuracy beside published comparison numbers", _table4),
        Preset("table6-timing", "Total prequential running time on the first 10,000 instances", _table6),
    ]
}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(f"Unknown preset '{name}'. Available presets: {', '.join(PRESETS)}") from None


__all__ = ["PRESETS", "PUBLISHED_TABLE4", "Preset", "TIMING_INSTANCES", "get_preset"]
