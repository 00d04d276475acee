"""Command-line interface package for drift-bench experiments."""

from .app import app

__all__ = ["app"]
