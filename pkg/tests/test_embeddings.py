import io
import time
from collections import Counter

import numpy as np
import pytest
from scipy import stats

from mcelearn.embeddings import (
    SkipGramConfig, WalkConfig, WalkCorpus, embed, generate_walks, read_embedding,
    train_skipgram, write_embedding,
)
from mcelearn.graph import Graph, gen_gnp

from conftest import petersen, two_cliques_bridge

SMALL = SkipGramConfig(dim=16, epochs=2)


def cosine_gap(vectors, size=10):
    V = vectors / np.linalg.norm(vectors, axis=1, keepdims=True)
    S = V @ V.T
    a = np.arange(len(V)) < size
    off = ~np.eye(size, dtype=bool)
    intra = np.concatenate([S[np.ix_(a, a)][off], S[np.ix_(~a, ~a)][off]]).mean()
    return intra, S[np.ix_(a, ~a)].mean()


@pytest.mark.parametrize("strategy", ["uniform", "biased"])
def test_walks_are_paths_with_exact_counts(strategy):
    g = gen_gnp(30, 0.15, 4)
    cfg = WalkConfig(num_walks=3, walk_length=7, strategy=strategy, seed=1)
    corpus = generate_walks(g, cfg)
    assert len(corpus) == g.n * 3
    assert Counter(w[0] for w in corpus.walks) == {v: 3 for v in range(g.n)}
    for w in corpus.walks:
        assert 1 <= len(w) <= 7
        assert all(g.has_edge(a, b) for a, b in zip(w, w[1:]))
        if g.degree(w[0]) > 0:
            assert len(w) == 7


def test_isolated_vertex_walk_is_single_vertex():
    g = Graph.from_edges(3, [(0, 1)])
    corpus = generate_walks(g, WalkConfig(num_walks=2, strategy="biased"))
    assert [w for w in corpus.walks if w[0] == 2] == [[2], [2]]


def test_walks_reproducible():
    g = petersen()
    cfg = WalkConfig(strategy="biased", seed=11)
    assert generate_walks(g, cfg).walks == generate_walks(g, cfg).walks


def test_config_validation():
    with pytest.raises(ValueError):
        WalkConfig(walk_length=0)
    with pytest.raises(ValueError):
        WalkConfig(return_param=0.0)
    with pytest.raises(ValueError):
        SkipGramConfig(dim=0)


def transitions(corpus):
    """Counts of (previous, current) -> next over second and later steps."""
    out: dict[tuple[int, int], Counter] = {}
    for w in corpus.walks:
        for t, c, x in zip(w, w[1:], w[2:]):
            out.setdefault((t, c), Counter())[x] += 1
    return out


def test_unit_parameters_reduce_to_uniform_chi_square():
    g = gen_gnp(12, 0.45, 8)
    cfg = WalkConfig(num_walks=100, walk_length=11, strategy="biased", return_param=1.0,
                     inout_param=1.0, seed=5)
    trans = transitions(generate_walks(g, cfg))
    assert sum(sum(c.values()) for c in trans.values()) >= 10_000
    chi, dof = 0.0, 0
    for (_, cur), counts in trans.items():
        nbrs = g.neighbors(cur).tolist()
        total = sum(counts.values())
        exp = total / len(nbrs)
        chi += sum((counts.get(x, 0) - exp) ** 2 / exp for x in nbrs)
        dof += len(nbrs) - 1
    assert stats.chi2.sf(chi, dof) > 0.01


def test_low_return_parameter_favours_backtracking():
    g = petersen()
    trans = transitions(generate_walks(g, WalkConfig(num_walks=50, strategy="biased",
                                                     return_param=0.05, seed=2)))
    back = sum(c[t] for (t, _), c in trans.items())
    total = sum(sum(c.values()) for c in trans.values())
    # weight 20 against 1/0.75 for each of the two other neighbours
    assert back / total > 0.8


def test_output_shape_and_determinism():
    corpus = generate_walks(petersen(), WalkConfig(seed=3))
    a = train_skipgram(corpus, SkipGramConfig(dim=24, seed=9))
    b = train_skipgram(corpus, SkipGramConfig(dim=24, seed=9))
    assert a.shape == (10, 24)
    assert a.vectors.tobytes() == b.vectors.tobytes()
    assert np.isfinite(a.vectors).all()


def test_empty_corpus_is_an_error():
    with pytest.raises(ValueError):
        train_skipgram(WalkCorpus(0, []), SMALL)


def test_single_vertex_graph_keeps_initial_vectors():
    cfg = SkipGramConfig(dim=8, seed=4)
    e = embed(Graph.empty(1), "node2vec", scfg=cfg)
    assert e.shape == (1, 8)
    assert (np.abs(e.vectors) <= 0.5 / 8).all()
    assert generate_walks(Graph.empty(1)).walks == [[0]] * 5


def test_deepwalk_is_uniform_strategy():
    g = petersen()
    w = WalkConfig(seed=6, strategy="biased")
    via_embed = embed(g, "deepwalk", w, SMALL).vectors
    direct = train_skipgram(generate_walks(g, WalkConfig(seed=6)), SMALL).vectors
    np.testing.assert_array_equal(via_embed, direct)


def test_node2vec_defaults():
    cfg = WalkConfig()
    assert (cfg.return_param, cfg.inout_param) == (0.25, 0.75)
    s = SkipGramConfig()
    assert (s.dim, s.window, s.negatives, s.epochs) == (128, 10, 5, 5)


def test_two_cliques_separate_and_loss_falls():
    g = two_cliques_bridge()
    t0 = time.perf_counter()
    separated = falling = 0
    for seed in range(5):
        e = embed(g, "deepwalk", WalkConfig(seed=seed), SkipGramConfig(seed=seed))
        intra, inter = cosine_gap(e.vectors)
        separated += intra > inter
        falling += e.epoch_losses[-1] < e.epoch_losses[0]
    assert separated >= 4 and falling >= 3
    assert time.perf_counter() - t0 < 120


def test_parallel_mode_runs():
    e = embed(two_cliques_bridge(), "node2vec", WalkConfig(seed=1),
              SkipGramConfig(dim=16, seed=1, parallel=True))
    assert np.isfinite(e.vectors).all()


def test_embedding_file_round_trip():
    vec = np.random.default_rng(0).normal(size=(4, 3))
    buf = io.StringIO()
    write_embedding(vec, buf)
    assert buf.getvalue().splitlines()[0] == "4 3"
    buf.seek(0)
    np.testing.assert_array_equal(read_embedding(buf), vec)
