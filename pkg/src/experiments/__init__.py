"""Experiment configs, presets and the runner behind the CLI."""
