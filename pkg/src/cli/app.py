"""Command-line entrypoints for drift-bench experiments."""
from __future__ import annotations

from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, List, Optional

import typer
from pydantic import ValidationError

from src.experiments.presets import PRESETS
from src.experiments.runner import ExperimentResult, published_comparison, run_config, run_preset
from src.utils.config import configure_logging, load_config

EXIT_VALIDATION = 1
EXIT_RUNTIME = 2

app = typer.Typer(help="Prequential benchmarks of incremental learners on concept-drifting streams.")


@app.callback()
def initialize(level: Optional[str] = typer.Option(None, "--log-level", help="Log level override")) -> None:
    """Initialize logging from configuration or CLI overrides."""

    config = load_config()
    if level is not None:
        configure_logging(level)
    else:
        configure_logging(config.log_level)


def _format_validation(exc: ValidationError) -> str:
    lines = []
    for error in exc.errors():
        location = ".".join(str(part) for part in error["loc"])
        lines.append(f"  {location}: {error['msg']}")
    return "Invalid experiment config:\n" + "\n".join(lines)


@contextmanager
def _exit_codes() -> Iterator[None]:
    """Map validation failures to exit code 1 and runtime/I-O failures to 2."""

    try:
        yield
    except ValidationError as exc:
        typer.echo(_format_validation(exc), err=True)
        raise typer.Exit(EXIT_VALIDATION) from exc
    except (OSError, RuntimeError) as exc:
        typer.echo(f"Error: {exc}", err=True)
        raise typer.Exit(EXIT_RUNTIME) from exc
    except ValueError as exc:
        typer.echo(f"Invalid input: {exc}", err=True)
        raise typer.Exit(EXIT_VALIDATION) from exc


def _report(results: List[ExperimentResult]) -> None:
    for result in results:
        typer.echo(f"\n{'='*60}")
        typer.echo(f"{result.config.name}  ->  {result.output_dir}")
        typer.echo(f"{'='*60}")
        typer.echo(result.table.to_string(index=False))


@app.command()
def run(
    preset: Optional[str] = typer.Argument(None, help="Preset name (see list-presets)."),
    config: Optional[Path] = typer.Option(None, "--config", dir_okay=False, help="TOML or JSON experiment config."),
    seed: Optional[int] = typer.Option(None, "--seed", help="Override the seed list with a single seed."),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory (defaults to DRIFT_OUTPUT_DIR)."),
    jobs: Optional[int] = typer.Option(None, "--jobs", min=1, help="Parallel runs (defaults to DRIFT_JOBS)."),
) -> None:
    """Run a preset or a config file and write CSV, SVG and summary outputs."""

    if (preset is None) == (config is None):
        typer.echo("Give exactly one of PRESET or --config.", err=True)
        raise typer.Exit(EXIT_VALIDATION)

    app_config = load_config(str(out) if out is not None else None)
    workers = jobs or app_config.jobs

    with _exit_codes():
        if preset is not None:
            results = run_preset(preset, app_config, app_config.output_dir, seed=seed, jobs=workers)
            _report(results)
            if preset == "table4":
                typer.echo("\nOverall accuracy (%), published columns are not reproduced here:")
                typer.echo(published_comparison(results).to_string(index=False))
        else:
            output_root = app_config.output_dir if out is not None else None
            _report([run_config(config, app_config, output_root, seed=seed, jobs=workers)])


@app.command("list-presets")
def list_presets() -> None:
    """List available experiment presets."""

    width = max(len(name) for name in PRESETS)
    for name, preset in PRESETS.items():
        typer.echo(f"{name:<{width}}  {preset.description}")


def main() -> None:
    """CLI entrypoint for console_scripts."""

    app()


if __name__ == "__main__":
    main()
