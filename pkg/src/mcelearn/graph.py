"""Simple undirected graphs: construction, edge-list I/O, generators."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np

SEED_MAX = 2**64 - 1


class ParseError(ValueError):
    """Raised when an edge-list line cannot be parsed."""

    def __init__(self, lineno: int, line: str, reason: str):
        super().__init__(f"line {lineno}: {reason}: {line.rstrip()!r}")
        self.lineno = lineno


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= SEED_MAX:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Generator for `seed`, optionally specialised to a sub-stream.

    Sub-streams (e.g. a graph index or a purpose tag) give independent,
    reproducible generators without sharing state between call sites.
    """
    return np.random.default_rng([check_seed(seed), *stream])


class Graph:
    """Immutable simple undirected graph on vertices ``0..n-1``.

    Adjacency is held in CSR form (``indptr``, ``indices``) with every
    neighbour list strictly increasing.  ``id_map`` optionally maps external
    labels (file ids, or parent-graph ids for induced subgraphs) to internal
    ids.
    """

    __slots__ = ("n", "m", "indptr", "indices", "id_map", "_bits", "_dense")

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray,
                 id_map: dict | None = None):
        self.n = int(n)
        self.indptr = indptr
        self.indices = indices
        self.m = int(len(indices) // 2)
        self.id_map = id_map
        self._bits = None
        self._dense = None
        indptr.setflags(write=False)
        indices.setflags(write=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]],
                   id_map: dict | None = None) -> Graph:
        """Build from an edge iterable; self-loops and duplicates are dropped."""
        arr = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if len(arr) and (arr.min() < 0 or arr.max() >= n):
            raise ValueError(f"edge endpoint outside 0..{n - 1}")
        return cls._from_array(n, arr, id_map)

    @classmethod
    def _from_array(cls, n: int, arr: np.ndarray, id_map=None) -> Graph:
        arr = arr[arr[:, 0] != arr[:, 1]]
        lo = np.minimum(arr[:, 0], arr[:, 1])
        hi = np.maximum(arr[:, 0], arr[:, 1])
        keys = np.unique(lo * max(n, 1) + hi)
        lo, hi = keys // max(n, 1), keys % max(n, 1)
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        np.cumsum(indptr, out=indptr)
        return cls(n, indptr, dst.astype(np.int64), id_map)

    @classmethod
    def empty(cls, n: int) -> Graph:
        return cls(n, np.zeros(n + 1, dtype=np.int64), np.zeros(0, dtype=np.int64))

    @classmethod
    def complete(cls, n: int) -> Graph:
        iu = np.triu_indices(n, 1)
        return cls._from_array(n, np.column_stack(iu).astype(np.int64))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n == other.n and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))

    __hash__ = None

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def adjacency(self) -> list[list[int]]:
        return [self.neighbors(v).tolist() for v in range(self.n)]

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < len(nb) and nb[i] == v)

    def edges(self) -> np.ndarray:
        """(m, 2) array of edges with u < v, lexicographically sorted."""
        src = np.repeat(np.arange(self.n), self.degrees())
        mask = src < self.indices
        return np.column_stack([src[mask], self.indices[mask]])

    def bitsets(self) -> list[int]:
        """Neighbourhoods as Python-int bitsets (bit u set in row v iff uv ∈ E)."""
        if self._bits is None:
            bits = []
            for v in range(self.n):
                b = 0
                for u in self.neighbors(v).tolist():
                    b |= 1 << u
                bits.append(b)
            self._bits = bits
        return self._bits

    def dense(self) -> np.ndarray:
        """n x n uint8 adjacency matrix (cached)."""
        if self._dense is None:
            a = np.zeros((self.n, self.n), dtype=np.uint8)
            e = self.edges()
            a[e[:, 0], e[:, 1]] = 1
            a[e[:, 1], e[:, 0]] = 1
            a.setflags(write=False)
            self._dense = a
        return self._dense

    def validate(self) -> None:
        """Walk the adjacency and assert simplicity, symmetry and sortedness."""
        assert len(self.indptr) == self.n + 1 and self.indptr[0] == 0
        assert self.indptr[-1] == len(self.indices) == 2 * self.m
        for v in range(self.n):
            nb = self.neighbors(v)
            assert np.all(np.diff(nb) > 0), f"neighbours of {v} not strictly increasing"
            assert v not in nb, f"self-loop at {v}"
            for u in nb.tolist():
                assert 0 <= u < self.n
                assert self.has_edge(u, v), f"asymmetric edge {v}-{u}"


@dataclass
class LoadReport:
    lines: int = 0
    edges_read: int = 0
    self_loops: int = 0
    duplicates: int = 0
    skipped_header: bool = False


def parse_edge_list(source: TextIO | Iterable[str], fmt: str = "plain"
                    ) -> tuple[Graph, LoadReport]:
    """Parse an edge list, returning the graph and a load report.

    ``fmt`` is ``"plain"`` or ``"matrix-market"``.  In matrix-market mode the
    first non-comment line is the dimensions line and is skipped.  Extra
    tokens on a data line (weights) are ignored.  External ids are remapped
    to ``0..n-1`` in first-seen order.
    """
    if fmt not in ("plain", "matrix-market"):
        raise ValueError(f"unknown edge-list format {fmt!r}")
    report = LoadReport()
    id_map: dict[int, int] = {}
    pairs: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    need_header = fmt == "matrix-market"
    for lineno, line in enumerate(source, start=1):
        report.lines += 1
        s = line.strip()
        if not s or s[0] in "#%":
            continue
        if need_header:
            need_header = False
            report.skipped_header = True
            continue
        toks = s.split()
        if len(toks) < 2:
            raise ParseError(lineno, line, "expected two vertex ids")
        try:
            a, b = int(toks[0]), int(toks[1])
        except ValueError:
            raise ParseError(lineno, line, "vertex id is not an integer") from None
        report.edges_read += 1
        u = id_map.setdefault(a, len(id_map))
        v = id_map.setdefault(b, len(id_map))
        if u == v:
            report.self_loops += 1
            continue
        key = (u, v) if u < v else (v, u)
        if key in seen:
            report.duplicates += 1
            continue
        seen.add(key)
        pairs.append(key)
    g = Graph.from_edges(len(id_map), pairs, id_map=id_map)
    return g, report


def load_edge_list(source: TextIO | Iterable[str], fmt: str = "plain") -> Graph:
    return parse_edge_list(source, fmt)[0]


def read_graph(path, fmt: str | None = None) -> Graph:
    """Load a graph from a file; ``.mtx`` files default to matrix-market."""
    path = str(path)
    if fmt is None:
        fmt = "matrix-market" if path.endswith(".mtx") else "plain"
    with open(path) as fh:
        return load_edge_list(fh, fmt)


def write_edge_list(g: Graph, out: TextIO) -> None:
    """Write one ``u v`` line per edge using internal ids."""
    for u, v in g.edges().tolist():
        out.write(f"{u} {v}\n")


def gen_gnp(n: int, p: float, seed: int) -> Graph:
    """Erdős–Rényi G(n, p): each of the C(n,2) pairs kept independently."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    rng = make_rng(seed)
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(len(iu)) < p
    return Graph._from_array(n, np.column_stack([iu[keep], ju[keep]]).astype(np.int64))


def sample_without_replacement(n: int, k: int, rng: np.random.Generator) -> list[int]:
    """First k entries of a partial Fisher-Yates shuffle of range(n)."""
    perm = list(range(n))
    for i in range(k):
        j = int(rng.integers(i, n))
        perm[i], perm[j] = perm[j], perm[i]
    return perm[:k]


def plant_clique(g: Graph, k: int, seed: int) -> tuple[Graph, tuple[int, ...]]:
    """Add every edge among k uniformly sampled vertices of g."""
    if not 1 <= k <= g.n:
        raise ValueError(f"clique size k={k} must satisfy 1 <= k <= n={g.n}")
    planted = sorted(sample_without_replacement(g.n, k, make_rng(seed)))
    pa = np.asarray(planted, dtype=np.int64)
    iu, ju = np.triu_indices(k, 1)
    extra = np.column_stack([pa[iu], pa[ju]])
    arr = np.concatenate([g.edges().astype(np.int64).reshape(-1, 2), extra])
    return Graph._from_array(g.n, arr), tuple(planted)


def planted_gnp(n: int, k: int, seed: int, p: float = 0.5) -> tuple[Graph, tuple[int, ...]]:
    """G(n, p) with a planted K_k; generation and planting use split streams."""
    ss = np.random.SeedSequence(check_seed(seed))
    g_seed, k_seed = (int(s.generate_state(1, np.uint64)[0]) for s in ss.spawn(2))
    return plant_clique(gen_gnp(n, p, g_seed), k, k_seed)


def induced_subgraph(g: Graph, keep: Iterable[int]) -> Graph:
    """Subgraph induced by ``keep``; ``id_map`` maps parent ids to new ids."""
    kept = sorted(set(int(v) for v in keep))
    if kept and (kept[0] < 0 or kept[-1] >= g.n):
        raise ValueError(f"vertex id outside 0..{g.n - 1}")
    relabel = np.full(g.n, -1, dtype=np.int64)
    relabel[kept] = np.arange(len(kept))
    e = g.edges()
    if len(e):
        e = relabel[e]
        e = e[(e[:, 0] >= 0) & (e[:, 1] >= 0)]
    return Graph._from_array(len(kept), e.reshape(-1, 2),
                             id_map={v: i for i, v in enumerate(kept)})


def degeneracy_order(g: Graph) -> tuple[list[int], int]:
    """Min-degree elimination order and the graph's degeneracy.

    Ties go to the smallest vertex id, so the order is deterministic.
    """
    deg = g.degrees().tolist()
    heap = [(d, v) for v, d in enumerate(deg)]
    heapq.heapify(heap)
    removed = [False] * g.n
    order: list[int] = []
    degeneracy = 0
    adj = g.adjacency
    while heap:
        d, v = heapq.heappop(heap)
        if removed[v] or d != deg[v]:
            continue
        removed[v] = True
        order.append(v)
        degeneracy = max(degeneracy, d)
        for u in adj[v]:
            if not removed[u]:
                deg[u] -= 1
                heapq.heappush(heap, (deg[u], u))
    return order, degeneracy
