"""Random forest of binary decision trees grown to purity.

Each tree is fitted on a bootstrap sample.  At every node the features are
visited in a random order and the best axis-aligned threshold is searched
on each until ``max_features`` non-constant features have been examined (or
features run out).  A node becomes a leaf when it is pure or no feature
separates its samples.  Leaves store class counts of the bootstrap sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from ..graph import make_rng
from .base import N_FOLDS, GridSearchReport, TrainingSet, grid_search

GRID = [{"n_estimators": t, "criterion": c} for t in (5, 25, 100) for c in ("gini", "entropy")]
_CRITERIA = {"gini": 0, "entropy": 1}


@njit(cache=True)
def _impurity(pos, total, criterion):
    if total == 0:
        return 0.0
    p = pos / total
    if criterion == 0:
        return 2.0 * p * (1.0 - p)
    h = 0.0
    if p > 0.0:
        h -= p * np.log2(p)
    if p < 1.0:
        h -= (1.0 - p) * np.log2(1.0 - p)
    return h


@njit(cache=True)
def _grow(X, y, samples, max_features, criterion, seed):
    np.random.seed(seed)
    n_feat = X.shape[1]
    cap = 2 * len(samples) + 1
    feature = np.full(cap, -1, dtype=np.int64)
    threshold = np.zeros(cap, dtype=np.float64)
    left = np.full(cap, -1, dtype=np.int64)
    right = np.full(cap, -1, dtype=np.int64)
    value = np.zeros((cap, 2), dtype=np.int64)

    # node work queue: (node id, start, end) into the `samples` buffer
    stack = np.empty((cap, 3), dtype=np.int64)
    stack[0, 0], stack[0, 1], stack[0, 2] = 0, 0, len(samples)
    top = 1
    n_nodes = 1
    order = np.arange(n_feat)
    while top > 0:
        top -= 1
        node, start, end = stack[top, 0], stack[top, 1], stack[top, 2]
        idx = samples[start:end]
        total = end - start
        pos = 0
        for i in range(total):
            pos += y[idx[i]]
        value[node, 0] = total - pos
        value[node, 1] = pos
        if pos == 0 or pos == total:
            continue

        best_score = np.inf
        best_feat = -1
        best_thr = 0.0
        visited = 0
        for i in range(n_feat - 1, 0, -1):
            j = np.random.randint(0, i + 1)
            order[i], order[j] = order[j], order[i]
        for fi in range(n_feat):
            if visited >= max_features:
                break
            f = order[fi]
            vals = X[idx, f]
            srt = np.argsort(vals, kind="mergesort")
            if vals[srt[0]] == vals[srt[total - 1]]:
                continue
            visited += 1
            left_pos = 0
            for i in range(total - 1):
                left_pos += y[idx[srt[i]]]
                a = vals[srt[i]]
                b = vals[srt[i + 1]]
                if a == b:
                    continue
                nl = i + 1
                nr = total - nl
                score = (nl * _impurity(left_pos, nl, criterion)
                         + nr * _impurity(pos - left_pos, nr, criterion))
                if score < best_score:
                    best_score = score
                    best_feat = f
                    thr = a + (b - a) / 2.0
                    if thr >= b:
                        thr = a
                    best_thr = thr
        if best_feat < 0:
            continue

        # partition samples[start:end] in place: <= threshold to the left
        lo = start
        hi = end - 1
        while lo <= hi:
            if X[samples[lo], best_feat] <= best_thr:
                lo += 1
            else:
                samples[lo], samples[hi] = samples[hi], samples[lo]
                hi -= 1
        feature[node] = best_feat
        threshold[node] = best_thr
        left[node] = n_nodes
        right[node] = n_nodes + 1
        stack[top, 0], stack[top, 1], stack[top, 2] = n_nodes + 1, lo, end
        top += 1
        stack[top, 0], stack[top, 1], stack[top, 2] = n_nodes, start, lo
        top += 1
        n_nodes += 2
    return (feature[:n_nodes].copy(), threshold[:n_nodes].copy(), left[:n_nodes].copy(),
            right[:n_nodes].copy(), value[:n_nodes].copy())


@njit(cache=True)
def _tree_proba(X, feature, threshold, left, right, value):
    out = np.empty(X.shape[0])
    for r in range(X.shape[0]):
        node = 0
        while feature[node] >= 0:
            if X[r, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[r] = value[node, 1] / (value[node, 0] + value[node, 1])
    return out


@dataclass
class Tree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def predict_proba(self, X) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        return _tree_proba(X, self.feature, self.threshold, self.left, self.right, self.value)

    def to_dict(self) -> dict:
        return {"feature": self.feature.tolist(), "threshold": self.threshold.tolist(),
                "left": self.left.tolist(), "right": self.right.tolist(),
                "value": self.value.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> Tree:
        return cls(np.asarray(d["feature"], dtype=np.int64),
                   np.asarray(d["threshold"], dtype=np.float64),
                   np.asarray(d["left"], dtype=np.int64),
                   np.asarray(d["right"], dtype=np.int64),
                   np.asarray(d["value"], dtype=np.int64).reshape(-1, 2))


def grow_tree(X: np.ndarray, y: np.ndarray, samples: np.ndarray, criterion: str,
              max_features: int, seed: int) -> Tree:
    return Tree(*_grow(np.ascontiguousarray(X, dtype=np.float64), y.astype(np.int64),
                       samples.astype(np.int64).copy(), max_features, _CRITERIA[criterion],
                       seed))


def default_max_features(width: int) -> int:
    return max(1, int(math.sqrt(width)))


@dataclass
class ForestModel:
    trees: list[Tree]
    criterion: str
    feature_names: list[str]
    seed: int = 0
    max_features: int = 1
    report: GridSearchReport | None = field(default=None, repr=False)

    kind = "forest"

    @property
    def n_estimators(self) -> int:
        return len(self.trees)

    @property
    def width(self) -> int:
        return len(self.feature_names)

    def tree_probas(self, X) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        return np.stack([t.predict_proba(X) for t in self.trees])

    def predict_proba(self, X) -> np.ndarray:
        return self.tree_probas(X).mean(axis=0)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n_estimators": self.n_estimators,
            "criterion": self.criterion,
            "max_features": self.max_features,
            "feature_names": self.feature_names,
            "seed": self.seed,
            "grid": self.report.to_dict() if self.report else None,
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, d: dict) -> ForestModel:
        return cls([Tree.from_dict(t) for t in d["trees"]], d["criterion"],
                   list(d["feature_names"]), int(d["seed"]), int(d["max_features"]),
                   GridSearchReport.from_dict(d["grid"]) if d.get("grid") else None)


def fit_forest(ts: TrainingSet, n_estimators: int = 100, criterion: str = "gini",
               seed: int = 0, max_features: int | None = None) -> ForestModel:
    """Fit one forest with fixed hyper-parameters."""
    ts.require_both_classes()
    if criterion not in _CRITERIA:
        raise ValueError(f"unknown split criterion {criterion!r}")
    mf = max_features or default_max_features(ts.width)
    rng = make_rng(seed, 0x7EE)
    X = np.ascontiguousarray(ts.X)
    trees = []
    for _ in range(n_estimators):
        boot = rng.integers(0, len(ts), size=len(ts))
        tree_seed = int(rng.integers(0, 2**31 - 1))
        trees.append(grow_tree(X, ts.y, boot, criterion, mf, tree_seed))
    return ForestModel(trees, criterion, list(ts.feature_names), seed, mf)


def _cell_seed(seed: int, cell: int, fold: int) -> int:
    return int(make_rng(seed, cell, fold).integers(0, 2**63))


def train_forest(ts: TrainingSet, seed: int) -> tuple[ForestModel, GridSearchReport]:
    """Grid search over {5, 25, 100} trees x {gini, entropy} by 5-fold CV, then refit."""
    ts.require_both_classes()

    def fit(train, params, cell, fold):
        return fit_forest(train, params["n_estimators"], params["criterion"],
                          _cell_seed(seed, cell, fold)).predict_proba

    report = grid_search(ts, GRID, seed, fit)
    best = GRID.index(report.chosen)
    model = fit_forest(ts, report.chosen["n_estimators"], report.chosen["criterion"],
                       _cell_seed(seed, best, N_FOLDS))
    model.report = report
    model.seed = seed
    return model, report
