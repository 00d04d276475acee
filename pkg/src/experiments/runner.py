"""Execute experiments: build streams and learners, evaluate, write artifacts."""
from __future__ import annotations

import functools
import logging
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from src.evaluation.prequential import EvalConfig, RunSummary, prequential_run
from src.evaluation.reports import emit_csv, emit_plot, emit_summary_table, emit_trajectory
from src.experiments.models import (
    DatasetConfig,
    ExperimentConfig,
    StreamConfig,
    dump_resolved_config,
    load_experiment_config,
)
from src.experiments.presets import PUBLISHED_TABLE4, get_preset
from src.ingestion.loader import (
    DatasetSpec,
    DatasetStream,
    covertype_spec,
    electricity_spec,
    load_dataset,
    normalize,
)
from src.learners import build_learner
from src.streams.core import StreamSource
from src.streams.generators import DriftKind, DriftType, HyperplaneStream, RandomTreeStream
from src.utils.config import AppConfig

logger = logging.getLogger(__name__)

_UNSAFE = re.compile(r"[^A-Za-z0-9_.-]+")
_GRADIENT_LEARNERS = re.compile(r"(sgd|rls)")


def safe_name(learner_id: str) -> str:
    return _UNSAFE.sub("_", learner_id).strip("_")


def dataset_spec_for(config: DatasetConfig) -> DatasetSpec:
    """Built-in expectations for named benchmarks, overridden by explicit fields."""

    if config.path is None:
        raise ValueError(f"Dataset '{config.name or 'unnamed'}' has no path configured")
    if config.name == "electricity":
        spec = electricity_spec(config.path)
    elif config.name == "covertype":
        spec = covertype_spec(config.path)
    else:
        spec = DatasetSpec(path=Path(config.path), name=config.name)
    overrides: Dict[str, Any] = {
        key: value
        for key, value in config.model_dump(exclude={"name", "path"}, exclude_defaults=True).items()
        if value is not None
    }
    if config.format is None:
        overrides["format"] = "arff" if Path(config.path).suffix.lower() == ".arff" else "csv"
    return replace(spec, **overrides)


@functools.lru_cache(maxsize=4)
def _cached_dataset(spec: DatasetSpec) -> DatasetStream:
    return load_dataset(spec)


def build_stream(config: StreamConfig, seed: int) -> StreamSource:
    """Fresh, un-normalized stream for one run."""

    if config.kind == "hyperplane":
        return HyperplaneStream(
            d=config.d,
            schedule=config.schedule(),
            kind=DriftKind(config.drift, config.angle),
            seed=seed,
        )
    if config.kind == "rtg":
        return RandomTreeStream(
            d=config.d,
            n_classes=config.n_classes,
            depth=config.depth,
            total=config.total,
            seed=seed,
        )
    dataset = _cached_dataset(dataset_spec_for(config.dataset)).fresh()
    if config.head is not None and config.head < len(dataset):
        dataset = dataset.head(config.head)
    return dataset


def normalization_for(config: StreamConfig, learner_id: str) -> str:
    """``auto`` standardizes dataset streams for gradient learners only."""

    if config.normalization != "auto":
        return config.normalization
    if config.kind == "dataset" and _GRADIENT_LEARNERS.search(learner_id):
        return "online-standardize"
    return "none"


@dataclass
class RunOutcome:
    experiment: str
    learner_id: str
    seed: int
    records_path: str
    summary: RunSummary
    t: List[int] = field(default_factory=list)
    window_accuracy: List[float] = field(default_factory=list)
    tracking_error: List[Optional[float]] = field(default_factory=list)
    trajectory_path: Optional[str] = None

    def row(self) -> Dict[str, Any]:
        summary = self.summary
        metadata = summary.metadata
        return {
            "experiment": self.experiment,
            "stream": metadata.get("dataset", metadata.get("stream")),
            "learner": self.learner_id,
            "seed": self.seed,
            "overall_accuracy": summary.overall_accuracy,
            "evaluated": summary.evaluated,
            "total_s": summary.total_seconds,
            "predict_s": None if summary.predict_ns is None else summary.predict_ns / 1e9,
            "update_s": None if summary.update_ns is None else summary.update_ns / 1e9,
            "final_model_size": metadata.get("final_model_size"),
            "resets": metadata.get("reset_count", 0),
            "normalization": metadata.get("normalization", "none"),
        }


def execute_run(config: ExperimentConfig, learner_index: int, seed: int, out_dir: Union[str, Path]) -> RunOutcome:
    """One (learner, seed) pair; safe to call in a worker process."""

    learner_config = config.learners[learner_index]
    mode = normalization_for(config.stream, learner_config.id)
    raw_stream = build_stream(config.stream, seed)
    stream = normalize(raw_stream, mode)
    learner = build_learner(learner_config.id, stream.dimensionality, stream.n_classes, **learner_config.params)

    total = getattr(raw_stream, "total", config.stream.total)
    schedule = config.stream.schedule(total=total)
    weights = learner.weights()
    trajectory_ok = (
        config.eval.record_trajectory
        and config.stream.kind == "hyperplane"
        and weights is not None
        and np.asarray(weights).reshape(-1).shape[0] == stream.dimensionality
    )
    if config.eval.record_trajectory and not trajectory_ok:
        logger.warning("Trajectory not available for learner", extra={"learner": learner.learner_id})

    result = prequential_run(
        learner,
        stream,
        EvalConfig(
            window=config.eval.window,
            schedule=schedule,
            record_trajectory=trajectory_ok,
            timing=config.eval.timing,
            raw_tracking_error=config.eval.raw_tracking_error,
        ),
    )
    result.summary.metadata.update({"seed": seed, "experiment": config.name, "normalization": mode})

    run_dir = Path(out_dir) / f"seed_{seed}"
    records_path = emit_csv(result.records, result.summary, run_dir / f"{safe_name(learner.learner_id)}.csv")
    trajectory_path = None
    if result.trajectory is not None:
        trajectory_path = str(emit_trajectory(result.trajectory, run_dir / f"trajectory_{safe_name(learner.learner_id)}.csv"))

    return RunOutcome(
        experiment=config.name,
        learner_id=learner.learner_id,
        seed=seed,
        records_path=str(records_path),
        summary=result.summary,
        t=[record.t for record in result.records],
        window_accuracy=[record.window_accuracy for record in result.records],
        tracking_error=[record.tracking_error for record in result.records],
        trajectory_path=trajectory_path,
    )


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    output_dir: Path
    outcomes: List[RunOutcome]
    table: pd.DataFrame


def _drift_markers(config: StreamConfig) -> Dict[str, float]:
    if config.kind != "hyperplane" or config.drift in (DriftType.NONE, DriftType.CONSTANT_INCREMENTAL):
        return {}
    schedule = config.schedule()
    markers = {"tau1": float(schedule.tau1)}
    if config.drift in (DriftType.INCREMENTAL, DriftType.GRADUAL):
        markers["tau2"] = float(schedule.tau2)
    return markers


def _plot_outcomes(config: ExperimentConfig, outcomes: List[RunOutcome], out_dir: Path) -> None:
    for seed in config.seeds:
        runs = [outcome for outcome in outcomes if outcome.seed == seed]
        accuracy = {run.learner_id: pd.Series(run.window_accuracy, index=run.t) for run in runs}
        emit_plot(
            accuracy,
            out_dir / f"seed_{seed}" / "accuracy.svg",
            ylabel=f"Accuracy (sliding window of {config.eval.window})",
            title=config.name,
            markers=_drift_markers(config.stream),
        )
        tracking = {
            run.learner_id: pd.Series([np.nan if v is None else v for v in run.tracking_error], index=run.t)
            for run in runs
            if any(value is not None for value in run.tracking_error)
        }
        if tracking and config.eval.record_trajectory:
            emit_plot(tracking, out_dir / f"seed_{seed}" / "tracking_error.svg", ylabel="Tracking error", title=config.name)


def run_experiment(config: ExperimentConfig, output_root: Union[str, Path], jobs: int = 1) -> ExperimentResult:
    """Run every (learner, seed) pair, then write ``summary.csv`` and plots."""

    out_dir = Path(output_root) / config.name
    dump_resolved_config(config, out_dir / "resolved_config.json")
    tasks: List[Tuple[int, int]] = [(index, seed) for seed in config.seeds for index in range(len(config.learners))]
    logger.info(
        "Running experiment",
        extra={"experiment": config.name, "runs": len(tasks), "jobs": jobs, "output_dir": str(out_dir)},
    )

    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(execute_run, config, index, seed, out_dir) for index, seed in tasks]
            outcomes = [future.result() for future in futures]
    else:
        outcomes = [execute_run(config, index, seed, out_dir) for index, seed in tasks]

    table = emit_summary_table([outcome.row() for outcome in outcomes], out_dir / "summary.csv")
    if config.eval.plot:
        _plot_outcomes(config, outcomes, out_dir)
    return ExperimentResult(config, out_dir, outcomes, table)


def _with_seed(config: ExperimentConfig, seed: Optional[int]) -> ExperimentConfig:
    return config if seed is None else config.model_copy(update={"seeds": [seed]})


def _resolve_datasets(config: ExperimentConfig, app_config: AppConfig) -> ExperimentConfig:
    """Fill a missing dataset path from the environment so the echoed config replays."""

    dataset = config.stream.dataset
    if config.stream.kind != "dataset" or dataset is None or dataset.path is not None:
        return config
    env_path = {"electricity": app_config.electricity_path, "covertype": app_config.covertype_path}.get(dataset.name or "")
    if env_path is None:
        raise ValueError(f"stream.dataset.path is required (or set DRIFT_{(dataset.name or 'dataset').upper()}_PATH)")
    stream = config.stream.model_copy(update={"dataset": dataset.model_copy(update={"path": str(env_path)})})
    return config.model_copy(update={"stream": stream})


def published_comparison(results: List[ExperimentResult]) -> pd.DataFrame:
    """Reproduced accuracies (%) beside the published numbers for unimplemented systems."""

    rows: List[Dict[str, Any]] = []
    for result in results:
        stream_name = result.config.name.split("-", 1)[-1]
        reproduced = result.table.groupby("learner")["overall_accuracy"].mean() * 100.0
        row: Dict[str, Any] = {"stream": stream_name}
        for learner, value in reproduced.items():
            row[f"{learner} (reproduced)"] = round(float(value), 1)
        for system, value in PUBLISHED_TABLE4.get(stream_name, {}).items():
            row[f"{system} (published, not reproduced)"] = value
        rows.append(row)
    return pd.DataFrame(rows)


def run_preset(
    name: str,
    app_config: AppConfig,
    output_root: Optional[Union[str, Path]] = None,
    seed: Optional[int] = None,
    jobs: int = 1,
) -> List[ExperimentResult]:
    preset = get_preset(name)
    output_root = Path(output_root or app_config.output_dir)
    configs = [_with_seed(config, seed) for config in preset.build(app_config)]
    results = [run_experiment(config, output_root, jobs) for config in configs]
    if name == "table4":
        comparison = published_comparison(results)
        comparison.to_csv(output_root / "table4-comparison.csv", index=False)
    return results


def run_config(
    path: Union[str, Path],
    app_config: AppConfig,
    output_root: Optional[Union[str, Path]] = None,
    seed: Optional[int] = None,
    jobs: int = 1,
) -> ExperimentResult:
    config = _resolve_datasets(_with_seed(load_experiment_config(path), seed), app_config)
    output_root = Path(output_root or config.output_dir or app_config.output_dir)
    return run_experiment(config, output_root, jobs)


__all__ = [
    "ExperimentResult",
    "RunOutcome",
    "build_stream",
    "dataset_spec_for",
    "execute_run",
    "normalization_for",
    "published_comparison",
    "run_config",
    "run_experiment",
    "run_preset",
]
