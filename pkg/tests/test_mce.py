import itertools
import random

import pytest

from mcelearn.graph import Graph, gen_gnp, induced_subgraph, planted_gnp
from mcelearn.mce import (
    brute_force_mce, clique_number, enumerate_maximal_cliques, enumerate_maximum_cliques,
)

from conftest import cycle, k4_minus_edge, petersen


def maximal_by_subsets(g: Graph) -> set[frozenset]:
    """Independent oracle: cliques from all subsets, keep the inclusion-maximal ones."""
    cliques = [frozenset(s) for r in range(1, g.n + 1)
               for s in itertools.combinations(range(g.n), r)
               if all(g.has_edge(u, v) for u, v in itertools.combinations(s, 2))]
    return {c for c in cliques if not any(c < d for d in cliques)}


def test_maximal_triangle():
    assert enumerate_maximal_cliques(Graph.complete(3)) == [(0, 1, 2)]


def test_maximal_c5():
    out = enumerate_maximal_cliques(cycle(5))
    assert len(out) == 5 and all(len(c) == 2 for c in out)


def test_maximal_empty_graph():
    assert enumerate_maximal_cliques(Graph.empty(0)) == []


@pytest.mark.parametrize("seed", range(10))
def test_maximal_matches_subset_oracle(seed):
    g = gen_gnp(10, 0.5, seed)
    out = enumerate_maximal_cliques(g)
    assert len(out) == len(set(out))
    assert {frozenset(c) for c in out} == maximal_by_subsets(g)
    assert out == sorted(out)


def test_maximum_k4_minus_edge():
    r = enumerate_maximum_cliques(k4_minus_edge())
    assert r.clique_number == 3 and len(r.cliques) == 2


def test_maximum_c5():
    r = enumerate_maximum_cliques(cycle(5))
    assert r.clique_number == 2 and len(r.cliques) == 5


def test_maximum_planted():
    g, planted = planted_gnp(128, 12, 3)
    r = enumerate_maximum_cliques(g)
    assert r.clique_number >= 12


def test_empty_vertex_set_is_an_error():
    for fn in (enumerate_maximum_cliques, clique_number, brute_force_mce):
        with pytest.raises(ValueError):
            fn(Graph.empty(0))


@pytest.mark.parametrize("g, omega", [
    (Graph.empty(5), 1), (Graph.complete(7), 7), (petersen(), 2),
])
def test_clique_number(g, omega):
    assert clique_number(g) == omega
    assert brute_force_mce(g).clique_number == omega


def test_brute_force_small():
    r = brute_force_mce(Graph.complete(3))
    assert (r.clique_number, len(r.cliques)) == (3, 1)
    r = brute_force_mce(cycle(5))
    assert (r.clique_number, len(r.cliques)) == (2, 5)


def test_brute_force_guard():
    with pytest.raises(ValueError, match="guard"):
        brute_force_mce(Graph.empty(21))


def test_oracle_equivalence_random():
    rng = random.Random(99)
    for _ in range(200):
        n = rng.randint(4, 12)
        g = gen_gnp(n, rng.choice([0.3, 0.5, 0.7]), rng.getrandbits(64))
        fast = enumerate_maximum_cliques(g)
        ref = brute_force_mce(g)
        assert fast.clique_sets() == ref.clique_sets()
        assert fast.clique_number == ref.clique_number == clique_number(g)


@pytest.mark.parametrize("seed", range(20))
def test_result_properties(seed):
    g = gen_gnp(40, 0.4, seed)
    r = enumerate_maximum_cliques(g)
    adj = [set(nb) for nb in g.adjacency]
    for c in r.cliques:
        assert len(c) == r.clique_number
        assert all(v in adj[u] for u, v in itertools.combinations(c, 2))
    assert len(set(r.cliques)) == len(r.cliques)
    for c in enumerate_maximal_cliques(g):
        common = set.intersection(*(adj[u] for u in c))
        assert not common, "maximal clique can be extended"


def test_monotone_under_induced_subgraphs():
    rng = random.Random(5)
    for seed in range(30):
        g = gen_gnp(12, 0.5, seed)
        keep = [v for v in range(12) if rng.random() < 0.6] or [0]
        assert clique_number(induced_subgraph(g, keep)) <= clique_number(g)
