"""Feature rankings and the nested subsets cut from their average.

Ranks run from 1 (worst) to n (best).  Ties always put the lower column
index at the lower rank.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, TextIO

import numpy as np

from .classifier.base import TrainingSet
from .classifier.logreg import fit_standardized, standardization

DEFAULT_PERCENTILES = (90.0, 75.0, 50.0)


def ranks_from_scores(scores: np.ndarray) -> np.ndarray:
    """Rank 1 for the lowest score; equal scores ordered by column index."""
    scores = np.asarray(scores, dtype=np.float64)
    order = np.lexsort((np.arange(len(scores)), scores))
    ranks = np.empty(len(scores), dtype=np.int64)
    ranks[order] = np.arange(1, len(scores) + 1)
    return ranks


def rank_by_rfe(ts: TrainingSet, seed: int = 0) -> np.ndarray:
    """Recursive elimination under an L2 logistic model, one feature per round.

    The fit is deterministic, so ``seed`` only exists for interface symmetry
    with the stochastic rankers.
    """
    ts.require_both_classes()
    mean, scale = standardization(ts.X)
    Z = (ts.X - mean) / scale
    remaining = list(range(ts.width))
    ranks = np.zeros(ts.width, dtype=np.int64)
    rank = 1
    while len(remaining) > 1:
        w, _, _ = fit_standardized(Z[:, remaining], ts.y, "l2", 1.0)
        mag = np.abs(w)
        # smallest |w| goes; among equals the lowest column index
        drop = min(range(len(remaining)), key=lambda i: (mag[i], remaining[i]))
        ranks[remaining.pop(drop)] = rank
        rank += 1
    ranks[remaining[0]] = rank
    return ranks


def anova_f(ts: TrainingSet) -> np.ndarray:
    """One-way ANOVA F between the label groups, per feature."""
    ts.require_both_classes()
    X, y = ts.X, ts.y.astype(bool)
    n = len(y)
    grand = X.mean(axis=0)
    between = np.zeros(ts.width)
    within = np.zeros(ts.width)
    for mask in (y, ~y):
        grp = X[mask]
        mu = grp.mean(axis=0)
        between += len(grp) * (mu - grand) ** 2
        within += ((grp - mu) ** 2).sum(axis=0)
    # two groups: one between-group degree of freedom, n - 2 within
    with np.errstate(divide="ignore", invalid="ignore"):
        f = between / (within / max(n - 2, 1))
    return np.where(within > 0, f, np.where(between > 0, np.inf, 0.0))


def rank_by_univariate(ts: TrainingSet) -> np.ndarray:
    return ranks_from_scores(anova_f(ts))


def pearson_abs(ts: TrainingSet) -> np.ndarray:
    X = ts.X - ts.X.mean(axis=0)
    y = ts.y - ts.y.mean()
    sx = np.sqrt((X ** 2).sum(axis=0))
    sy = np.sqrt((y ** 2).sum())
    with np.errstate(divide="ignore", invalid="ignore"):
        r = (X.T @ y) / (sx * sy)
    r = np.where((sx > 0) & (sy > 0), r, 0.0)
    return np.minimum(np.abs(r), 1.0)


def rank_by_pearson(ts: TrainingSet) -> np.ndarray:
    ts.require_both_classes()
    return ranks_from_scores(pearson_abs(ts))


def combine_scores(ranks: Sequence[np.ndarray]) -> np.ndarray:
    if not ranks:
        raise ValueError("need at least one rank vector")
    widths = {len(r) for r in ranks}
    if len(widths) != 1:
        raise ValueError(f"rank vectors differ in width: {sorted(widths)}")
    return np.mean(np.vstack(ranks).astype(np.float64), axis=0)


@dataclass
class FeatureSubset:
    name: str
    indices: list[int]
    threshold: float | None = None


def make_subsets(scores: np.ndarray, s1: float, s2: float, s3: float,
                 prefix: str = "f") -> tuple[FeatureSubset, FeatureSubset, FeatureSubset]:
    """Subsets of features scoring strictly above each threshold; s1 > s2 > s3."""
    if not s1 > s2 > s3:
        raise ValueError(f"thresholds must be strictly descending, got {s1}, {s2}, {s3}")
    scores = np.asarray(scores, dtype=np.float64)
    return tuple(FeatureSubset(f"{prefix}{i}", np.flatnonzero(scores > s).tolist(), float(s))
                 for i, s in enumerate((s1, s2, s3), start=1))


def default_thresholds(scores: np.ndarray,
                       percentiles: Sequence[float] = DEFAULT_PERCENTILES) -> tuple[float, ...]:
    t = tuple(float(np.percentile(scores, p)) for p in percentiles)
    if not t[0] > t[1] > t[2]:
        raise ValueError(f"score percentiles are not distinct: {t}")
    return t


@dataclass
class SelectionResult:
    feature_names: list[str]
    rfe: np.ndarray
    univariate: np.ndarray
    pearson: np.ndarray
    combined: np.ndarray
    subsets: tuple[FeatureSubset, ...]

    def write_scores(self, out: TextIO) -> None:
        out.write("feature,rfe_rank,univ_rank,pearson_rank,combined\n")
        for i, name in enumerate(self.feature_names):
            out.write(f"{name},{self.rfe[i]},{self.univariate[i]},{self.pearson[i]},"
                      f"{self.combined[i]!r}\n")

    def subset_dict(self) -> dict:
        full = FeatureSubset("f0", list(range(len(self.feature_names))))
        return {s.name: {"indices": s.indices, "threshold": s.threshold,
                         "features": [self.feature_names[i] for i in s.indices]}
                for s in (full, *self.subsets)}


def select_features(ts: TrainingSet, seed: int = 0,
                    thresholds: Sequence[float] | None = None) -> SelectionResult:
    """All three rankings, their mean, and the nested subsets f1 within f2 within f3."""
    rfe = rank_by_rfe(ts, seed)
    univ = rank_by_univariate(ts)
    pear = rank_by_pearson(ts)
    combined = combine_scores([rfe, univ, pear])
    s = tuple(thresholds) if thresholds is not None else default_thresholds(combined)
    return SelectionResult(list(ts.feature_names), rfe, univ, pear, combined,
                           make_subsets(combined, *s))
