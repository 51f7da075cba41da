"""Regularised logistic regression fitted by full-batch (proximal) gradient descent.

Objective on standardised features ``Z`` with ``L`` samples::

    J(w, b) = mean log-loss(sigmoid(Z w + b), y) + R(w) / (C * L)

with ``R(w) = ||w||^2 / 2`` (L2) or ``||w||_1`` (L1).  ``C`` is the
regularisation multiplier in the inverse convention (larger ``C`` = weaker
penalty), and the bias is never penalised.  L1 is handled by a
soft-thresholding proximal step.  Step sizes come from backtracking on the
smooth part.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .base import GridSearchReport, TrainingSet, grid_search

MAX_EPOCHS = 100
GRID = [{"penalty": p, "C": c} for p in ("l1", "l2") for c in (0.5, 1.0)]


def sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _logloss(z, y):
    # log(1 + e^z) - y z, computed stably
    return np.logaddexp(0.0, z) - y * z


def smooth_objective(w, b, Z, y, penalty: str, C: float) -> float:
    """Differentiable part of J: the full objective for L2, log-loss only for L1."""
    L = len(y)
    val = float(np.mean(_logloss(Z @ w + b, y)))
    if penalty == "l2":
        val += 0.5 * float(w @ w) / (C * L)
    return val


def smooth_gradient(w, b, Z, y, penalty: str, C: float) -> tuple[np.ndarray, float]:
    L = len(y)
    r = sigmoid(Z @ w + b) - y
    gw = Z.T @ r / L
    if penalty == "l2":
        gw = gw + w / (C * L)
    return gw, float(r.mean())


def objective(w, b, Z, y, penalty: str, C: float) -> float:
    val = smooth_objective(w, b, Z, y, penalty, C)
    if penalty == "l1":
        val += float(np.abs(w).sum()) / (C * len(y))
    return val


def _prox(w, step, penalty, C, L):
    if penalty != "l1":
        return w
    tau = step / (C * L)
    return np.sign(w) * np.maximum(np.abs(w) - tau, 0.0)


def fit_standardized(Z: np.ndarray, y: np.ndarray, penalty: str, C: float,
                     epochs: int = MAX_EPOCHS) -> tuple[np.ndarray, float, list[float]]:
    """Fit weights on already-standardised data; returns (w, b, objective trace)."""
    if penalty not in ("l1", "l2"):
        raise ValueError(f"unknown penalty {penalty!r}")
    L, d = Z.shape
    y = y.astype(np.float64)
    w = np.zeros(d)
    b = 0.0
    step = 1.0
    trace = [objective(w, b, Z, y, penalty, C)]
    for _ in range(epochs):
        f0 = smooth_objective(w, b, Z, y, penalty, C)
        gw, gb = smooth_gradient(w, b, Z, y, penalty, C)
        while True:
            w_new = _prox(w - step * gw, step, penalty, C, L)
            b_new = b - step * gb
            dw, db = w_new - w, b_new - b
            bound = f0 + gw @ dw + gb * db + (dw @ dw + db * db) / (2 * step)
            if smooth_objective(w_new, b_new, Z, y, penalty, C) <= bound + 1e-12 or step < 1e-10:
                break
            step *= 0.5
        if np.array_equal(w_new, w) and b_new == b:
            break
        w, b = w_new, b_new
        trace.append(objective(w, b, Z, y, penalty, C))
    return w, b, trace


def standardization(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale[scale == 0] = 1.0
    return mean, scale


@dataclass
class LogRegModel:
    weights: np.ndarray
    bias: float
    penalty: str
    C: float
    mean: np.ndarray
    scale: np.ndarray
    feature_names: list[str]
    seed: int = 0
    report: GridSearchReport | None = field(default=None, repr=False)

    kind = "logreg"

    @property
    def width(self) -> int:
        return len(self.weights)

    def predict_proba(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        return sigmoid(((X - self.mean) / self.scale) @ self.weights + self.bias)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "penalty": self.penalty,
            "C": self.C,
            "weights": self.weights.tolist(),
            "bias": self.bias,
            "mean": self.mean.tolist(),
            "scale": self.scale.tolist(),
            "feature_names": self.feature_names,
            "seed": self.seed,
            "grid": self.report.to_dict() if self.report else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> LogRegModel:
        return cls(np.asarray(d["weights"], dtype=np.float64), float(d["bias"]), d["penalty"],
                   float(d["C"]), np.asarray(d["mean"], dtype=np.float64),
                   np.asarray(d["scale"], dtype=np.float64), list(d["feature_names"]),
                   int(d["seed"]), GridSearchReport.from_dict(d["grid"]) if d.get("grid") else None)


def fit_logreg(ts: TrainingSet, penalty: str = "l2", C: float = 1.0,
               epochs: int = MAX_EPOCHS, seed: int = 0) -> LogRegModel:
    """Single fit with fixed hyper-parameters (no grid search)."""
    ts.require_both_classes()
    mean, scale = standardization(ts.X)
    w, b, _ = fit_standardized((ts.X - mean) / scale, ts.y, penalty, C, epochs)
    return LogRegModel(w, b, penalty, C, mean, scale, list(ts.feature_names), seed)


def train_logreg(ts: TrainingSet, seed: int) -> tuple[LogRegModel, GridSearchReport]:
    """Grid search over {L1, L2} x {0.5, 1.0} by 5-fold CV, then refit on all data."""
    ts.require_both_classes()

    def fit(train, params, _cell, _fold):
        return fit_logreg(train, params["penalty"], params["C"]).predict_proba

    report = grid_search(ts, GRID, seed, fit)
    model = fit_logreg(ts, report.chosen["penalty"], report.chosen["C"], seed=seed)
    model.report = report
    return model, report
