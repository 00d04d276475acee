"""Load benchmark datasets (CSV or ARFF) into replayable in-memory streams."""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from scipy.io import arff

from src.ingestion.validation import ValidationResult, validate_counts
from src.streams.core import EndOfStream, Instance, LabeledInstance, StreamSource

logger = logging.getLogger(__name__)

_LINE_PATTERN = re.compile(r"line (\d+)")
_STD_FLOOR = 1e-8
# share of unparseable cells below which a column counts as numeric
_NUMERIC_MAJORITY = 0.5


class DatasetFormatError(ValueError):
    """A dataset file could not be parsed; ``line`` is 1-based when known."""

    def __init__(self, path: Union[str, Path], message: str, line: Optional[int] = None) -> None:
        self.path = str(path)
        self.line = line
        location = f"{self.path}:{line}" if line is not None else self.path
        super().__init__(f"{location}: {message}")


@dataclass(frozen=True)
class DatasetSpec:
    """Where a dataset lives and what it must contain.

    ``attribute_policy="warn"`` downgrades an attribute-count mismatch to a warning.
    Attribute counts refer to the raw file columns, before one-hot encoding.
    """

    path: Path
    format: str = "csv"
    label_column: Union[int, str] = -1
    header: bool = True
    expected_instances: Optional[int] = None
    expected_attributes: Optional[int] = None
    expected_classes: Optional[int] = None
    attribute_policy: str = "error"
    name: Optional[str] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "path", Path(self.path))
        if self.format not in ("csv", "arff"):
            raise ValueError(f"Unsupported dataset format '{self.format}' (expected csv or arff)")
        if self.attribute_policy not in ("error", "warn"):
            raise ValueError(f"attribute_policy must be 'error' or 'warn', got '{self.attribute_policy}'")

    @property
    def display_name(self) -> str:
        return self.name or self.path.stem


def electricity_spec(path: Union[str, Path]) -> DatasetSpec:
    """Electricity: 45,312 instances, two classes; six attributes are expected but
    common distributions carry eight, so that check only warns."""

    return DatasetSpec(
        path=Path(path),
        format=_format_for(path),
        expected_instances=45_312,
        expected_attributes=6,
        expected_classes=2,
        attribute_policy="warn",
        name="electricity",
    )


def covertype_spec(path: Union[str, Path]) -> DatasetSpec:
    return DatasetSpec(
        path=Path(path),
        format=_format_for(path),
        expected_instances=581_012,
        expected_attributes=54,
        expected_classes=7,
        name="covertype",
    )


def _format_for(path: Union[str, Path]) -> str:
    return "arff" if Path(path).suffix.lower() == ".arff" else "csv"


class DatasetStream:
    """Cursor over immutable feature and label arrays; row order is stream order."""

    def __init__(
        self,
        features: np.ndarray,
        labels: np.ndarray,
        class_names: List[str],
        attribute_names: List[str],
        name: str = "dataset",
        validation: Optional[ValidationResult] = None,
    ) -> None:
        features = np.asarray(features, dtype=float)
        labels = np.asarray(labels, dtype=int)
        if features.ndim != 2 or features.shape[0] != labels.shape[0]:
            raise ValueError("Features must be 2-D with one row per label")
        features.setflags(write=False)
        labels.setflags(write=False)
        self.features = features
        self.labels = labels
        self.class_names = list(class_names)
        self.attribute_names = list(attribute_names)
        self.name = name
        self.validation = validation
        self.dimensionality = int(features.shape[1])
        self.n_classes = len(self.class_names)
        self.t = 0

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    @property
    def total(self) -> int:
        return len(self)

    def next_instance(self) -> LabeledInstance:
        if self.t >= len(self):
            raise EndOfStream(f"Dataset {self.name} exhausted after {len(self)} instances")
        row = self.t
        self.t += 1
        return LabeledInstance(Instance(self.features[row]), int(self.labels[row]))

    def fresh(self) -> "DatasetStream":
        """An independent cursor at t=0 sharing the same arrays."""

        return DatasetStream(
            self.features, self.labels, self.class_names, self.attribute_names, self.name, self.validation
        )

    def head(self, n: int) -> "DatasetStream":
        if n < 1:
            raise ValueError(f"head() needs n >= 1, got {n}")
        return DatasetStream(
            self.features[:n], self.labels[:n], self.class_names, self.attribute_names, self.name, self.validation
        )

    def metadata(self) -> Dict[str, Any]:
        metadata: Dict[str, Any] = {
            "stream": "dataset",
            "dataset": self.name,
            "instances": len(self),
            "d": self.dimensionality,
            "n_classes": self.n_classes,
        }
        if self.validation is not None and self.validation.issues:
            metadata["validation_warnings"] = self.validation.describe()
        return metadata


def _encode_attributes(
    frame: pd.DataFrame,
    path: Path,
    first_data_line: int,
) -> Tuple[np.ndarray, List[str]]:
    """Numeric columns pass through; any other column is one-hot encoded in first-appearance order.

    A column whose values are mostly numbers is numeric: a cell in it that does not
    parse is a malformed row, not a new category.
    """

    blocks: List[np.ndarray] = []
    names: List[str] = []
    for column in frame.columns:
        values = frame[column]
        missing = values.isna().to_numpy()
        if missing.any():
            row = int(np.argmax(missing))
            raise DatasetFormatError(path, f"missing value in column '{column}'", line=first_data_line + row)
        numeric = pd.to_numeric(values, errors="coerce")
        unparsed = numeric.isna().to_numpy()
        if not unparsed.any():
            blocks.append(numeric.to_numpy(dtype=float)[:, None])
            names.append(str(column))
            continue
        if unparsed.mean() < _NUMERIC_MAJORITY:
            row = int(np.argmax(unparsed))
            raise DatasetFormatError(
                path,
                f"non-numeric value {values.iloc[row]!r} in numeric column '{column}'",
                line=first_data_line + row,
            )
        categories = pd.unique(values.astype(str))
        encoded = pd.Categorical(values.astype(str), categories=categories)
        dummies = pd.get_dummies(encoded, dtype=float)
        blocks.append(dummies.to_numpy())
        names.extend(f"{column}={category}" for category in categories)
    if not blocks:
        return np.zeros((len(frame), 0)), names
    return np.hstack(blocks), names


def _split_label(frame: pd.DataFrame, label_column: Union[int, str], path: Path) -> Tuple[pd.DataFrame, pd.Series]:
    if isinstance(label_column, int):
        try:
            column = frame.columns[label_column]
        except IndexError as exc:
            raise DatasetFormatError(path, f"label column index {label_column} out of range") from exc
    else:
        if label_column not in frame.columns:
            raise DatasetFormatError(path, f"label column '{label_column}' not found")
        column = label_column
    return frame.drop(columns=[column]), frame[column]


def _read_csv(spec: DatasetSpec) -> Tuple[pd.DataFrame, int]:
    try:
        frame = pd.read_csv(spec.path, header=0 if spec.header else None, skipinitialspace=True)
    except pd.errors.EmptyDataError as exc:
        raise DatasetFormatError(spec.path, "file is empty") from exc
    except pd.errors.ParserError as exc:
        match = _LINE_PATTERN.search(str(exc))
        raise DatasetFormatError(spec.path, f"malformed row ({exc})", int(match.group(1)) if match else None) from exc
    return frame, 2 if spec.header else 1


def _read_arff(spec: DatasetSpec) -> Tuple[pd.DataFrame, int]:
    try:
        data, meta = arff.loadarff(str(spec.path))
    except (arff.ArffError, ValueError) as exc:
        match = _LINE_PATTERN.search(str(exc))
        raise DatasetFormatError(spec.path, f"invalid ARFF ({exc})", int(match.group(1)) if match else None) from exc

    frame = pd.DataFrame(data)
    for name, kind in zip(meta.names(), meta.types()):
        if kind == "nominal":
            decoded = frame[name].str.decode("utf-8")
            frame[name] = decoded.where(decoded != "?", None)
    first_data_line = _arff_data_line(spec.path)
    return frame, first_data_line


def _arff_data_line(path: Path) -> int:
    """1-based line number of the first row after ``@data``."""

    with path.open("r", encoding="utf-8", errors="replace") as handle:
        for number, raw in enumerate(handle, start=1):
            if raw.strip().lower().startswith("@data"):
                return number + 1
    return 1


def load_dataset(spec: DatasetSpec) -> DatasetStream:
    """Parse, encode and validate a dataset file.

    Labels are indexed 0..K-1 by first appearance. Count mismatches raise
    ``DatasetValidationError`` listing expected and found values.
    """

    if not spec.path.exists():
        raise FileNotFoundError(f"Dataset file not found: {spec.path}")

    frame, first_data_line = _read_arff(spec) if spec.format == "arff" else _read_csv(spec)
    attributes, raw_labels = _split_label(frame, spec.label_column, spec.path)
    if raw_labels.isna().any():
        row = int(np.argmax(raw_labels.isna().to_numpy()))
        raise DatasetFormatError(spec.path, "missing class label", line=first_data_line + row)

    features, names = _encode_attributes(attributes, spec.path, first_data_line)
    codes, uniques = pd.factorize(raw_labels.astype(str))

    validation = validate_counts(
        str(spec.path),
        counts={"instances": len(frame), "attributes": attributes.shape[1], "classes": len(uniques)},
        expected={
            "instances": spec.expected_instances,
            "attributes": spec.expected_attributes,
            "classes": spec.expected_classes,
        },
        severities={"attributes": "warning" if spec.attribute_policy == "warn" else "error"},
    )
    logger.info(
        "Loaded dataset",
        extra={
            "dataset": spec.display_name,
            "instances": len(frame),
            "attributes": attributes.shape[1],
            "encoded_dimensionality": features.shape[1],
            "classes": len(uniques),
        },
    )
    return DatasetStream(features, codes, [str(u) for u in uniques], names, spec.display_name, validation)


class OnlineStandardizer:
    """Causal z-scoring: each instance is scaled with statistics that include it
    and everything before it, never anything after."""

    def __init__(self, stream: StreamSource) -> None:
        self.stream = stream
        self.dimensionality = stream.dimensionality
        self.n_classes = stream.n_classes
        self.count = 0
        self.mean = np.zeros(stream.dimensionality)
        self._m2 = np.zeros(stream.dimensionality)

    @property
    def t(self) -> int:
        return getattr(self.stream, "t", self.count)

    @property
    def total(self) -> Optional[int]:
        return getattr(self.stream, "total", None)

    def std(self) -> np.ndarray:
        if self.count == 0:
            return np.zeros(self.dimensionality)
        return np.sqrt(self._m2 / self.count)

    def transform(self, x: np.ndarray) -> np.ndarray:
        self.count += 1
        delta = x - self.mean
        self.mean = self.mean + delta / self.count
        self._m2 = self._m2 + delta * (x - self.mean)
        return (x - self.mean) / np.maximum(self.std(), _STD_FLOOR)

    def next_instance(self) -> LabeledInstance:
        labeled = self.stream.next_instance()
        return LabeledInstance(Instance(self.transform(labeled.features)), labeled.label)

    def metadata(self) -> Dict[str, Any]:
        metadata = dict(self.stream.metadata())
        metadata["normalization"] = "online-standardize"
        return metadata


NORMALIZATION_MODES = ("none", "online-standardize")


def normalize(stream: StreamSource, mode: str = "none") -> StreamSource:
    if mode == "none":
        return stream
    if mode == "online-standardize":
        return OnlineStandardizer(stream)
    raise ValueError(f"Unknown normalization mode '{mode}'. Available: {', '.join(NORMALIZATION_MODES)}")


__all__ = [
    "DatasetFormatError",
    "DatasetSpec",
    "DatasetStream",
    "NORMALIZATION_MODES",
    "OnlineStandardizer",
    "covertype_spec",
    "electricity_spec",
    "load_dataset",
    "normalize",
]
