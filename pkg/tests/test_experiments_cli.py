import sys
from pathlib import Path

PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

import pandas as pd
import pytest
from pydantic import ValidationError
from typer.testing import CliRunner

from src.cli import app
from src.evaluation.reports import load_records, load_summary
from src.experiments.models import DatasetConfig, ExperimentConfig, StreamConfig, load_experiment_config
from src.experiments.presets import PRESETS, get_preset
from src.experiments.runner import (
    ExperimentResult,
    dataset_spec_for,
    normalization_for,
    published_comparison,
    run_config,
)
from src.streams.generators import DriftType
from src.utils.config import load_config

FIXTURE_DIR = Path(__file__).resolve().parent / "fixtures"
MINIMAL_CONFIG = FIXTURE_DIR / "minimal_experiment.toml"

runner = CliRunner()


@pytest.fixture()
def app_config(tmp_path: Path, monkeypatch: pytest.MonkeyPatch):
    monkeypatch.setenv("DRIFT_OUTPUT_DIR", str(tmp_path / "results"))
    monkeypatch.delenv("DRIFT_ELECTRICITY_PATH", raising=False)
    monkeypatch.delenv("DRIFT_COVERTYPE_PATH", raising=False)
    return load_config()


def _write_config(path: Path, body: str) -> Path:
    path.write_text(body, encoding="utf-8")
    return path


def test_minimal_config_writes_one_run(tmp_path: Path, app_config) -> None:
    result = run_config(MINIMAL_CONFIG, app_config, tmp_path)
    run_dir = tmp_path / "minimal"
    records = load_records(run_dir / "seed_7" / "sgd.csv")
    assert len(records) == 540
    assert records[0].t == 60
    assert load_summary(run_dir / "seed_7" / "sgd.summary.txt")["learner"] == "sgd"
    assert (run_dir / "resolved_config.json").exists()
    assert (run_dir / "summary.csv").exists()
    assert (run_dir / "seed_7" / "accuracy.svg").exists()
    assert list(result.table["learner"]) == ["sgd"]


def test_resolved_config_replays_the_experiment(tmp_path: Path, app_config) -> None:
    run_config(MINIMAL_CONFIG, app_config, tmp_path)
    echoed = (tmp_path / "minimal" / "resolved_config.json").read_text(encoding="utf-8")
    replayed = ExperimentConfig.model_validate_json(echoed)
    assert replayed.model_dump() == load_experiment_config(MINIMAL_CONFIG).model_dump()


def test_each_seed_gets_its_own_run(tmp_path: Path, app_config) -> None:
    config = _write_config(
        tmp_path / "two_seeds.toml",
        'name = "two-seeds"\nseeds = [1, 2]\n\n[stream]\ntotal = 400\ntau1 = 200\ntau2 = 300\n\n'
        '[[learners]]\nid = "knn"\n\n[eval]\ntiming = false\nplot = false\n',
    )
    result = run_config(config, app_config, tmp_path / "out")
    first = (tmp_path / "out" / "two-seeds" / "seed_1" / "knn.csv").read_text(encoding="utf-8")
    second = (tmp_path / "out" / "two-seeds" / "seed_2" / "knn.csv").read_text(encoding="utf-8")
    assert first != second
    assert sorted(result.table["seed"]) == [1, 2]


def test_seed_override_replaces_the_seed_list(tmp_path: Path, app_config) -> None:
    run_config(MINIMAL_CONFIG, app_config, tmp_path, seed=11)
    assert (tmp_path / "minimal" / "seed_11" / "sgd.csv").exists()
    assert not (tmp_path / "minimal" / "seed_7").exists()


def test_parallel_runs_match_sequential_runs(tmp_path: Path, app_config) -> None:
    config = _write_config(
        tmp_path / "parallel.toml",
        'name = "parallel"\nseeds = [3, 4]\n\n[stream]\ndrift = "sudden"\ntotal = 500\ntau1 = 250\n\n'
        '[[learners]]\nid = "sgd"\n\n[[learners]]\nid = "ht"\n\n[eval]\ntiming = false\nplot = false\n',
    )
    run_config(config, app_config, tmp_path / "serial", jobs=1)
    run_config(config, app_config, tmp_path / "pooled", jobs=2)
    for seed in (3, 4):
        for learner in ("sgd", "ht"):
            relative = Path("parallel") / f"seed_{seed}" / f"{learner}.csv"
            assert (tmp_path / "serial" / relative).read_bytes() == (tmp_path / "pooled" / relative).read_bytes()


def test_nan_angle_names_the_field() -> None:
    with pytest.raises(ValidationError) as excinfo:
        load_experiment_config(FIXTURE_DIR / "nan_angle.toml")
    assert any(error["loc"] == ("stream", "angle") for error in excinfo.value.errors())


def test_unknown_keys_are_rejected(tmp_path: Path) -> None:
    config = _write_config(tmp_path / "typo.toml", '[[learners]]\nid = "sgd"\n\n[stream]\ntau_1 = 10\n')
    with pytest.raises(ValidationError):
        load_experiment_config(config)


def test_timeline_must_be_ordered() -> None:
    with pytest.raises(ValidationError):
        StreamConfig(total=100, tau1=80, tau2=50)


def test_sudden_drift_uses_a_one_step_window() -> None:
    schedule = StreamConfig(drift=DriftType.SUDDEN, tau1=5_000, tau2=7_000).schedule()
    assert (schedule.tau0, schedule.tau1, schedule.tau2, schedule.total) == (1_000, 5_000, 5_001, 10_000)


def test_dataset_config_runs_end_to_end(tmp_path: Path, app_config) -> None:
    config = _write_config(
        tmp_path / "dataset.toml",
        'name = "nominal"\n\n[stream]\nkind = "dataset"\n\n[stream.dataset]\n'
        f'path = "{(FIXTURE_DIR / "nominal.csv").as_posix()}"\nexpected_classes = 3\n\n'
        '[[learners]]\nid = "sgd"\n\n[[learners]]\nid = "knn"\n\n[eval]\nwindow = 2\nplot = false\n',
    )
    result = run_config(config, app_config, tmp_path / "out")
    rows = result.table.set_index("learner")
    assert rows.loc["sgd", "normalization"] == "online-standardize"
    assert rows.loc["knn", "normalization"] == "none"
    assert (rows["evaluated"] == 4).all()


def test_missing_dataset_path_names_the_environment_variable(tmp_path: Path, app_config) -> None:
    config = _write_config(
        tmp_path / "covertype.toml",
        '[stream]\nkind = "dataset"\n\n[stream.dataset]\nname = "covertype"\n\n[[learners]]\nid = "ht"\n',
    )
    with pytest.raises(ValueError) as excinfo:
        run_config(config, app_config, tmp_path)
    assert "DRIFT_COVERTYPE_PATH" in str(excinfo.value)


def test_dataset_spec_uses_builtin_expectations() -> None:
    spec = dataset_spec_for(DatasetConfig(name="electricity", path="data/elec.arff"))
    assert spec.format == "arff"
    assert spec.expected_instances == 45_312
    overridden = dataset_spec_for(DatasetConfig(name="covertype", path="cov.csv", expected_instances=1_000))
    assert overridden.expected_instances == 1_000
    assert overridden.expected_classes == 7


@pytest.mark.parametrize(
    "kind, mode, learner_id, expected",
    [
        ("dataset", "auto", "pbf-sgd-3", "online-standardize"),
        ("dataset", "auto", "rls", "online-standardize"),
        ("dataset", "auto", "ht", "none"),
        ("dataset", "none", "sgd", "none"),
        ("hyperplane", "auto", "sgd", "none"),
        ("hyperplane", "online-standardize", "knn", "online-standardize"),
    ],
)
def test_normalization_choice(kind: str, mode: str, learner_id: str, expected: str) -> None:
    dataset = DatasetConfig(name="x", path="x.csv") if kind == "dataset" else None
    config = StreamConfig(kind=kind, dataset=dataset, normalization=mode)
    assert normalization_for(config, learner_id) == expected


class TestPresets:
    def test_fig4_sudden_timeline(self, app_config) -> None:
        (config,) = get_preset("fig4-sudden").build(app_config)
        schedule = config.stream.schedule()
        assert (schedule.tau0, schedule.tau1, schedule.tau2, schedule.total) == (1_000, 5_000, 5_001, 10_000)
        assert [learner.id for learner in config.learners] == ["knn", "sgd", "ht"]
        assert config.stream.d == 2

    def test_fig5_learning_rates(self, app_config) -> None:
        (config,) = get_preset("fig5-tracking").build(app_config)
        params = {learner.id: learner.params for learner in config.learners}
        assert params["sgd"]["learning_rate"] == 0.5
        assert params["momentum-sgd"] == {"learning_rate": 0.5, "momentum": 0.5}
        assert config.eval.record_trajectory

    def test_table6_times_the_first_ten_thousand_instances(self, app_config, tmp_path: Path, monkeypatch) -> None:
        monkeypatch.setenv("DRIFT_ELECTRICITY_PATH", str(tmp_path / "elec.arff"))
        configs = get_preset("table6-timing").build(load_config())
        assert all(config.eval.timing for config in configs)
        electricity = next(config for config in configs if config.name == "table6-electricity")
        assert electricity.stream.head == 10_000
        assert not any(config.name == "table6-covertype" for config in configs)

    def test_presets_use_the_configured_seed(self, app_config) -> None:
        for preset in PRESETS.values():
            for config in preset.build(app_config):
                assert config.seeds == [app_config.seed]

    def test_unknown_preset_lists_available_names(self) -> None:
        with pytest.raises(ValueError) as excinfo:
            get_preset("fig9")
        assert "fig4-sudden" in str(excinfo.value)


def test_published_numbers_are_labelled_as_not_reproduced(tmp_path: Path) -> None:
    config = ExperimentConfig(name="table4-synthetic", learners=[{"id": "sgd"}])
    table = pd.DataFrame({"learner": ["sgd", "sgd"], "overall_accuracy": [0.9, 0.8]})
    comparison = published_comparison([ExperimentResult(config, tmp_path, [], table)])
    row = comparison.iloc[0]
    assert row["stream"] == "synthetic"
    assert row["sgd (reproduced)"] == pytest.approx(85.0)
    assert row["SAMkNN (published, not reproduced)"] == 96.0


class TestCli:
    def test_list_presets(self) -> None:
        result = runner.invoke(app, ["list-presets"])
        assert result.exit_code == 0
        for name in ("fig4-sudden", "fig5-tracking", "table4", "table6-timing"):
            assert name in result.output

    def test_run_config(self, tmp_path: Path, app_config) -> None:
        result = runner.invoke(app, ["run", "--config", str(MINIMAL_CONFIG), "--out", str(tmp_path)])
        assert result.exit_code == 0, result.output
        assert (tmp_path / "minimal" / "seed_7" / "sgd.csv").exists()
        assert "sgd" in result.output

    def test_unknown_preset_exits_with_validation_code(self, app_config) -> None:
        result = runner.invoke(app, ["run", "fig9"])
        assert result.exit_code == 1
        assert "fig4-sudden" in result.output

    def test_invalid_config_exits_with_validation_code(self, app_config) -> None:
        result = runner.invoke(app, ["run", "--config", str(FIXTURE_DIR / "nan_angle.toml")])
        assert result.exit_code == 1
        assert "stream.angle" in result.output

    def test_missing_config_exits_with_runtime_code(self, tmp_path: Path, app_config) -> None:
        result = runner.invoke(app, ["run", "--config", str(tmp_path / "absent.toml")])
        assert result.exit_code == 2

    def test_preset_and_config_are_exclusive(self, app_config) -> None:
        result = runner.invoke(app, ["run", "fig4-sudden", "--config", str(MINIMAL_CONFIG)])
        assert result.exit_code == 1
