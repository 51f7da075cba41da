"""Probabilistic vertex classifiers: logistic regression and random forest."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .base import (
    GridSearchReport, Metrics, TrainingError, TrainingSet, binary_metrics, stratified_folds,
)
from .forest import ForestModel, fit_forest, train_forest
from .logreg import LogRegModel, fit_logreg, train_logreg

Model = LogRegModel | ForestModel


def predict_proba(model: Model, x) -> np.ndarray | float:
    """P(label = 1) for one feature vector (returns a float) or a matrix of rows."""
    arr = np.asarray(x, dtype=np.float64)
    single = arr.ndim == 1
    arr = np.atleast_2d(arr)
    if arr.shape[1] != model.width:
        raise ValueError(f"feature width {arr.shape[1]} does not match model width {model.width}")
    p = np.clip(model.predict_proba(arr), 0.0, 1.0)
    return float(p[0]) if single else p


def classifier_metrics(model: Model, holdout: TrainingSet) -> Metrics:
    """F1, precision, recall and accuracy at the 0.5 probability threshold."""
    if len(holdout) == 0:
        raise ValueError("holdout set is empty")
    return binary_metrics(holdout.y, predict_proba(model, holdout.X) > 0.5)


def model_to_json(model: Model) -> str:
    return json.dumps(model.to_dict(), sort_keys=True)


def model_from_dict(d: dict) -> Model:
    kinds = {"logreg": LogRegModel, "forest": ForestModel}
    if d.get("kind") not in kinds:
        raise ValueError(f"unknown model kind {d.get('kind')!r}")
    return kinds[d["kind"]].from_dict(d)


def save_model(model: Model, path) -> None:
    Path(path).write_text(model_to_json(model) + "\n")


def load_model(path) -> Model:
    return model_from_dict(json.loads(Path(path).read_text()))


def train(kind: str, ts: TrainingSet, seed: int) -> tuple[Model, GridSearchReport]:
    if kind == "logreg":
        return train_logreg(ts, seed)
    if kind == "forest":
        return train_forest(ts, seed)
    raise ValueError(f"unknown model kind {kind!r}")


__all__ = [
    "ForestModel", "GridSearchReport", "LogRegModel", "Metrics", "Model", "TrainingError",
    "TrainingSet", "binary_metrics", "classifier_metrics", "fit_forest", "fit_logreg",
    "load_model", "model_from_dict", "model_to_json", "predict_proba", "save_model",
    "stratified_folds", "train", "train_forest", "train_logreg",
]
