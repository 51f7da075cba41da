import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mcelearn.classifier import TrainingSet
from mcelearn.selection import (
    anova_f, combine_scores, default_thresholds, make_subsets, pearson_abs, rank_by_pearson,
    rank_by_rfe, rank_by_univariate, ranks_from_scores, select_features,
)


def labels(n=200, seed=0):
    return np.random.default_rng(seed).integers(0, 2, size=n)


def is_permutation(r):
    return sorted(r.tolist()) == list(range(1, len(r) + 1))


def test_rank_ties_lower_index_lower():
    np.testing.assert_array_equal(ranks_from_scores([5.0, 1.0, 5.0, 1.0]), [3, 1, 4, 2])


def test_rfe_single_feature():
    y = labels(20)
    assert rank_by_rfe(TrainingSet(y[:, None] + 0.0, y)).tolist() == [1]


def test_rfe_predictive_feature_survives():
    wins = 0
    for seed in range(10):
        rng = np.random.default_rng(seed)
        y = rng.integers(0, 2, size=150)
        X = rng.normal(size=(150, 6))
        col = int(rng.integers(6))
        X[:, col] = y + 0.1 * rng.normal(size=150)
        r = rank_by_rfe(TrainingSet(X, y), seed)
        assert is_permutation(r)
        wins += r[col] == 6
    assert wins >= 9


def test_rfe_duplicate_columns_lower_index_eliminated_first():
    rng = np.random.default_rng(1)
    y = rng.integers(0, 2, size=100)
    base = y + rng.normal(size=100)
    X = np.column_stack([base, base, rng.normal(size=100)])
    r = rank_by_rfe(TrainingSet(X, y))
    assert r[0] < r[1]


def test_univariate_constant_and_label_features():
    y = labels(50)
    X = np.column_stack([np.ones(50), y.astype(float), np.random.default_rng(2).normal(size=50)])
    f = anova_f(TrainingSet(X, y))
    assert f[0] == 0.0 and np.isinf(f[1])
    r = rank_by_univariate(TrainingSet(X, y))
    assert r.tolist() == [1, 3, 2]


def test_anova_matches_hand_computation():
    y = np.array([0, 0, 0, 1, 1, 1])
    X = np.array([[1.0, 0.0, 2.0], [2.0, 1.0, 2.5], [3.0, 2.0, 3.0],
                  [4.0, 0.5, 2.0], [5.0, 1.5, 2.5], [6.0, 2.5, 3.0]])
    # column 0: means 2 and 5, grand 3.5; between = 3*1.5^2*2 = 13.5; within = 4; F = 13.5/(4/4)
    # column 1: means 1 and 1.5; between = 0.375; within = 4; F = 0.375
    # column 2: equal group means; F = 0
    np.testing.assert_allclose(anova_f(TrainingSet(X, y)), [13.5, 0.375, 0.0])
    assert rank_by_univariate(TrainingSet(X, y)).tolist() == [3, 2, 1]


def test_pearson_label_and_complement():
    y = labels(100)
    X = np.column_stack([y, 1 - y, np.zeros(100)]).astype(float)
    r = pearson_abs(TrainingSet(X, y))
    np.testing.assert_allclose(r, [1.0, 1.0, 0.0])
    assert rank_by_pearson(TrainingSet(X, y)).tolist() == [2, 3, 1]


def test_pearson_independent_feature_small():
    rng = np.random.default_rng(3)
    y = rng.integers(0, 2, size=10_000)
    assert pearson_abs(TrainingSet(rng.normal(size=(10_000, 1)), y))[0] < 0.05


def test_combine_examples():
    r = np.array([3, 1, 2])
    np.testing.assert_array_equal(combine_scores([r, r]), r)
    np.testing.assert_array_equal(combine_scores([np.array([1, 2, 3, 4]), np.array([4, 3, 2, 1])]),
                                  [2.5] * 4)
    np.testing.assert_array_equal(
        combine_scores([np.array([3, 2, 1]), np.array([1, 2, 3]), np.array([2, 2, 2])]), [2, 2, 2])
    with pytest.raises(ValueError):
        combine_scores([np.array([1, 2]), np.array([1, 2, 3])])


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 12), st.integers(1, 4), st.randoms())
def test_combine_permutation_equivariant(width, methods, rnd):
    ranks = []
    for _ in range(methods):
        r = list(range(1, width + 1))
        rnd.shuffle(r)
        ranks.append(np.array(r))
    perm = list(range(width))
    rnd.shuffle(perm)
    np.testing.assert_array_equal(combine_scores([r[perm] for r in ranks]),
                                  combine_scores(ranks)[perm])


def test_subset_edges():
    scores = np.array([1.0, 2.0, 3.0])
    f1, f2, f3 = make_subsets(scores, 10.0, 2.5, 0.5)
    assert f1.indices == [] and f2.indices == [2] and f3.indices == [0, 1, 2]
    with pytest.raises(ValueError):
        make_subsets(scores, 1.0, 2.0, 0.5)
    with pytest.raises(ValueError):
        make_subsets(scores, 2.0, 2.0, 0.5)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(1, 73), min_size=1, max_size=80),
       st.lists(st.floats(0, 80), min_size=3, max_size=3, unique=True))
def test_subset_nesting(scores, thresholds):
    s1, s2, s3 = sorted(thresholds, reverse=True)
    f1, f2, f3 = make_subsets(np.array(scores), s1, s2, s3)
    assert set(f1.indices) <= set(f2.indices) <= set(f3.indices) <= set(range(len(scores)))


def test_select_features_end_to_end():
    rng = np.random.default_rng(4)
    y = rng.integers(0, 2, size=120)
    X = rng.normal(size=(120, 10))
    X[:, 3] += 2 * y
    res = select_features(TrainingSet(X, y))
    for r in (res.rfe, res.univariate, res.pearson):
        assert is_permutation(r)
    assert ((res.combined >= 1) & (res.combined <= 10)).all()
    assert 3 in res.subsets[0].indices
    buf = io.StringIO()
    res.write_scores(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "feature,rfe_rank,univ_rank,pearson_rank,combined" and len(lines) == 11
    assert res.subset_dict()["f0"]["indices"] == list(range(10))
    assert default_thresholds(res.combined) == tuple(res.subsets[i].threshold for i in range(3))
