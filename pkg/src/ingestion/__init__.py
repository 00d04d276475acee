"""Benchmark dataset loading and causal normalization."""

from .loader import (
    DatasetFormatError,
    DatasetSpec,
    DatasetStream,
    OnlineStandardizer,
    covertype_spec,
    electricity_spec,
    load_dataset,
    normalize,
)
from .validation import DatasetValidationError, ValidationIssue, ValidationResult

__all__ = [
    "DatasetFormatError",
    "DatasetSpec",
    "DatasetStream",
    "DatasetValidationError",
    "OnlineStandardizer",
    "ValidationIssue",
    "ValidationResult",
    "covertype_spec",
    "electricity_spec",
    "load_dataset",
    "normalize",
]
