"""
Dataset count checks run after loading a benchmark file.

Every mismatch between what a file contains and what its ``DatasetSpec`` expects
becomes a ``ValidationIssue``; errors fail the load, warnings are logged.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

logger = logging.getLogger(__name__)


@dataclass
class ValidationIssue:
    """A single expected-versus-found discrepancy."""

    severity: str  # 'error' | 'warning'
    category: str  # 'instances' | 'attributes' | 'classes'
    message: str
    expected: Optional[int] = None
    found: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "severity": self.severity,
            "category": self.category,
            "message": self.message,
            "expected": self.expected,
            "found": self.found,
        }


@dataclass
class ValidationResult:
    """Outcome of validating one loaded dataset."""

    issues: List[ValidationIssue] = field(default_factory=list)
    file_stats: Dict[str, Any] = field(default_factory=dict)

    @property
    def error_count(self) -> int:
        return sum(1 for issue in self.issues if issue.severity == "error")

    @property
    def warning_count(self) -> int:
        return sum(1 for issue in self.issues if issue.severity == "warning")

    @property
    def valid(self) -> bool:
        return self.error_count == 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "valid": self.valid,
            "error_count": self.error_count,
            "warning_count": self.warning_count,
            "issues": [issue.to_dict() for issue in self.issues],
            "file_stats": self.file_stats,
        }

    def describe(self) -> str:
        return "; ".join(issue.message for issue in self.issues)


class DatasetValidationError(ValueError):
    """Raised when a loaded dataset contradicts its declared counts."""

    def __init__(self, path: str, result: ValidationResult) -> None:
        self.path = path
        self.result = result
        super().__init__(f"Dataset {path} failed validation: {result.describe()}")


def check_count(
    category: str,
    expected: Optional[int],
    found: int,
    severity: str = "error",
) -> Optional[ValidationIssue]:
    """Compare one count; ``expected=None`` disables the check."""

    if expected is None or expected == found:
        return None
    return ValidationIssue(
        severity=severity,
        category=category,
        message=f"expected {expected} {category}, found {found}",
        expected=expected,
        found=found,
    )


def validate_counts(
    path: str,
    counts: Dict[str, int],
    expected: Dict[str, Optional[int]],
    severities: Dict[str, str],
) -> ValidationResult:
    """Check ``counts`` against ``expected`` and raise on any error-level mismatch."""

    result = ValidationResult(file_stats={"path": path, **counts})
    for category, found in counts.items():
        issue = check_count(category, expected.get(category), found, severities.get(category, "error"))
        if issue is not None:
            result.issues.append(issue)

    for issue in result.issues:
        if issue.severity == "warning":
            logger.warning(
                "Dataset count differs from expectation",
                extra={"path": path, "category": issue.category, "expected": issue.expected, "found": issue.found},
            )
    if not result.valid:
        raise DatasetValidationError(path, result)
    return result


__all__ = [
    "DatasetValidationError",
    "ValidationIssue",
    "ValidationResult",
    "check_count",
    "validate_counts",
]
