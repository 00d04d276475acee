"""Incremental learners and the id-based registry used by experiment configs."""
from __future__ import annotations

import re
from typing import Any, Dict, List

from src.learners.hoeffding import HoeffdingTree
from src.learners.knn import KnnClassifier
from src.learners.linear import PolyBasis, SgdClassifier, poly_expand
from src.learners.reset import DetectAndReset
from src.learners.rls import RlsClassifier, RlsRegressor, rls_update
from src.streams.core import Learner

_PBF_PATTERN = re.compile(r"^pbf-sgd-(\d+)$")
_RESET_PATTERN = re.compile(r"^reset\((.+)\)$")
_RESET_KEYS = ("reset_window", "sensitivity")

LEARNER_IDS: List[str] = ["sgd", "momentum-sgd", "pbf-sgd-<degree>", "rls", "knn", "ht", "reset(<id>)"]


def build_learner(learner_id: str, n_features: int, n_classes: int = 2, **params: Any) -> Learner:
    """Construct a fresh learner from its identifier.

    ``params`` are learner keyword arguments; for ``reset(<id>)`` the keys
    ``reset_window`` and ``sensitivity`` configure the wrapper and the rest go to
    the inner learner.
    """

    learner_id = learner_id.strip()
    reset_match = _RESET_PATTERN.match(learner_id)
    if reset_match:
        inner_id = reset_match.group(1)
        wrapper_params: Dict[str, Any] = {key: params.pop(key) for key in _RESET_KEYS if key in params}
        return DetectAndReset(
            lambda: build_learner(inner_id, n_features, n_classes, **params),
            window=int(wrapper_params.get("reset_window", 100)),
            sensitivity=float(wrapper_params.get("sensitivity", 0.15)),
            learner_id=learner_id,
        )

    pbf_match = _PBF_PATTERN.match(learner_id)
    if pbf_match:
        degree = int(pbf_match.group(1))
        return SgdClassifier(n_features, n_classes, degree=degree, learner_id=learner_id, **params)
    if learner_id == "sgd":
        return SgdClassifier(n_features, n_classes, learner_id=learner_id, **params)
    if learner_id == "momentum-sgd":
        params.setdefault("momentum", 0.5)
        return SgdClassifier(n_features, n_classes, learner_id=learner_id, **params)
    if learner_id == "rls":
        return RlsClassifier(n_features, n_classes, **params)
    if learner_id == "knn":
        return KnnClassifier(n_features, n_classes, **params)
    if learner_id == "ht":
        return HoeffdingTree(n_features, n_classes, **params)
    raise ValueError(f"Unknown learner id '{learner_id}'. Available: {', '.join(LEARNER_IDS)}")


__all__ = [
    "DetectAndReset",
    "HoeffdingTree",
    "KnnClassifier",
    "LEARNER_IDS",
    "PolyBasis",
    "RlsClassifier",
    "RlsRegressor",
    "SgdClassifier",
    "build_learner",
    "poly_expand",
    "rls_update",
]
