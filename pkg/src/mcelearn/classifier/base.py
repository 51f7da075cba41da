"""Training-set container, binary metrics and the cross-validated grid search."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..graph import make_rng

N_FOLDS = 5


class TrainingError(ValueError):
    """Raised when a training set cannot support model fitting."""


@dataclass
class TrainingSet:
    X: np.ndarray
    y: np.ndarray
    feature_names: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        if self.X.ndim != 2:
            raise ValueError("features must be a 2-D array")
        self.y = np.asarray(self.y, dtype=np.int64).ravel()
        if len(self.y) != len(self.X):
            raise ValueError(f"{len(self.X)} feature rows but {len(self.y)} labels")
        if not np.isin(self.y, (0, 1)).all():
            raise ValueError("labels must be 0 or 1")
        if not self.feature_names:
            self.feature_names = [f"f{i}" for i in range(self.X.shape[1])]
        elif len(self.feature_names) != self.X.shape[1]:
            raise ValueError("feature_names length does not match feature width")

    def __len__(self) -> int:
        return len(self.y)

    @property
    def width(self) -> int:
        return self.X.shape[1]

    def rows(self, idx) -> TrainingSet:
        return TrainingSet(self.X[idx], self.y[idx], list(self.feature_names))

    def columns(self, cols: Sequence[int]) -> TrainingSet:
        cols = list(cols)
        return TrainingSet(self.X[:, cols], self.y, [self.feature_names[c] for c in cols])

    def require_both_classes(self) -> None:
        if len(self) < 2 or self.y.min() == self.y.max():
            raise TrainingError("training needs at least one sample of each class")


@dataclass
class Metrics:
    f1: float
    precision: float
    recall: float
    accuracy: float
    precision_defined: bool = True
    recall_defined: bool = True


def binary_metrics(y_true, y_pred) -> Metrics:
    """Positive-class metrics; undefined ratios are reported as 0 and flagged."""
    y_true = np.asarray(y_true).astype(bool)
    y_pred = np.asarray(y_pred).astype(bool)
    if len(y_true) == 0:
        raise ValueError("metrics need at least one sample")
    tp = int(np.sum(y_true & y_pred))
    pp = int(y_pred.sum())
    ap = int(y_true.sum())
    precision = tp / pp if pp else 0.0
    recall = tp / ap if ap else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    accuracy = float(np.mean(y_true == y_pred))
    return Metrics(f1, precision, recall, accuracy, pp > 0, ap > 0)


def stratified_folds(y: np.ndarray, seed: int, n_folds: int = N_FOLDS) -> np.ndarray:
    """Fold id per sample; each class is shuffled and dealt round-robin."""
    rng = make_rng(seed, 0xF01D)
    folds = np.empty(len(y), dtype=np.int64)
    for label in (0, 1):
        idx = np.flatnonzero(y == label)
        idx = idx[rng.permutation(len(idx))]
        folds[idx] = np.arange(len(idx)) % n_folds
    return folds


@dataclass
class GridSearchReport:
    cells: list[dict]
    chosen: dict

    def to_dict(self) -> dict:
        return {"cells": self.cells, "chosen": self.chosen}

    @classmethod
    def from_dict(cls, d: dict) -> GridSearchReport:
        return cls(d["cells"], d["chosen"])


def grid_search(ts: TrainingSet, grid: list[dict], seed: int,
                fit: Callable[[TrainingSet, dict, int, int], Callable[[np.ndarray], np.ndarray]]
                ) -> GridSearchReport:
    """Mean out-of-fold F1 per grid cell; the first cell with the top mean wins.

    ``fit(train, params, cell_index, fold)`` returns a probability function.
    """
    folds = stratified_folds(ts.y, seed)
    cells = []
    for ci, params in enumerate(grid):
        scores = []
        for f in range(N_FOLDS):
            test = folds == f
            if not test.any():
                continue
            train = ts.rows(~test)
            if train.y.min() == train.y.max():
                raise TrainingError("a CV fold lacks one class; need more samples")
            proba = fit(train, params, ci, f)
            scores.append(binary_metrics(ts.y[test], proba(ts.X[test]) > 0.5).f1)
        cells.append({"params": params, "fold_f1": scores, "mean_f1": float(np.mean(scores))})
    best = max(range(len(cells)), key=lambda i: (cells[i]["mean_f1"], -i))
    return GridSearchReport(cells, dict(grid[best]))
