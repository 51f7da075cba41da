"""Catalog of connected graphlets on 2-5 vertices and their 73 vertex orbits.

A k-vertex pattern is encoded as a bit code over vertex pairs: pair
``(i, j)`` with ``i < j`` occupies bit ``j*(j-1)/2 + i``.  With this layout
the code of the first ``k-1`` positions is a prefix of the code of ``k``
positions, which the counting kernels rely on.

Graphlets are ordered by size and then by canonical code (the minimum code
over all relabelings).  Orbits are numbered consecutively through that
graphlet order; within a graphlet they are ordered by the smallest position
of the canonical representative they contain.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from itertools import permutations

import numpy as np

CATALOG_VERSION = 1
MAX_K = 5
N_ORBITS = 73


def pair_bit(i: int, j: int) -> int:
    if i > j:
        i, j = j, i
    return j * (j - 1) // 2 + i


def n_pairs(k: int) -> int:
    return k * (k - 1) // 2


def code_edges(code: int, k: int) -> list[tuple[int, int]]:
    return [(i, j) for j in range(k) for i in range(j) if code >> pair_bit(i, j) & 1]


def edges_code(edges) -> int:
    code = 0
    for i, j in edges:
        code |= 1 << pair_bit(i, j)
    return code


def permute_code(code: int, k: int, perm) -> int:
    """Code after moving position i to position perm[i]."""
    out = 0
    for i, j in code_edges(code, k):
        out |= 1 << pair_bit(perm[i], perm[j])
    return out


def is_connected(code: int, k: int) -> bool:
    if k == 1:
        return True
    adj = [0] * k
    for i, j in code_edges(code, k):
        adj[i] |= 1 << j
        adj[j] |= 1 << i
    seen, frontier = 1, 1
    while frontier:
        nxt = 0
        for v in range(k):
            if frontier >> v & 1:
                nxt |= adj[v]
        frontier = nxt & ~seen
        seen |= nxt
    return seen == (1 << k) - 1


def canonical_code(code: int, k: int) -> int:
    return min(permute_code(code, k, p) for p in permutations(range(k)))


@dataclass(frozen=True)
class Graphlet:
    index: int
    k: int
    code: int              # canonical code
    edges: tuple[tuple[int, int], ...]
    position_orbit: tuple[int, ...]   # global orbit index of each position

    @property
    def orbits(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.position_orbit)))


@dataclass(frozen=True)
class GraphletCatalog:
    graphlets: tuple[Graphlet, ...]
    orbit_graphlet: tuple[int, ...]       # orbit -> host graphlet index
    orbit_position: tuple[int, ...]       # orbit -> representative position

    @property
    def n_orbits(self) -> int:
        return len(self.orbit_graphlet)

    def orbit_size(self, orbit: int) -> int:
        g = self.graphlets[self.orbit_graphlet[orbit]]
        return g.position_orbit.count(orbit)

    def by_code(self) -> dict[tuple[int, int], Graphlet]:
        return {(g.k, g.code): g for g in self.graphlets}

    def to_json(self) -> dict:
        return {
            "version": CATALOG_VERSION,
            "bit_layout": "pair (i,j), i<j -> bit j*(j-1)/2+i",
            "n_graphlets": len(self.graphlets),
            "n_orbits": self.n_orbits,
            "graphlets": [
                {"index": g.index, "k": g.k, "code": g.code,
                 "edges": [list(e) for e in g.edges],
                 "position_orbit": list(g.position_orbit)}
                for g in self.graphlets
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> GraphletCatalog:
        graphlets = tuple(
            Graphlet(d["index"], d["k"], d["code"],
                     tuple(tuple(e) for e in d["edges"]), tuple(d["position_orbit"]))
            for d in data["graphlets"])
        return cls._assemble(graphlets)

    @classmethod
    def _assemble(cls, graphlets) -> GraphletCatalog:
        og, op = [], []
        for g in graphlets:
            for o in g.orbits:
                og.append(g.index)
                op.append(g.position_orbit.index(o))
        return cls(tuple(graphlets), tuple(og), tuple(op))


def _automorphisms(code: int, k: int) -> list[tuple[int, ...]]:
    return [p for p in permutations(range(k)) if permute_code(code, k, p) == code]


def build_catalog() -> GraphletCatalog:
    """Enumerate connected graphs on 2..5 vertices up to isomorphism."""
    graphlets: list[Graphlet] = []
    next_orbit = 0
    for k in range(2, MAX_K + 1):
        canon = sorted({canonical_code(c, k) for c in range(1 << n_pairs(k))
                        if is_connected(c, k)})
        for code in canon:
            autos = _automorphisms(code, k)
            local = [-1] * k
            for pos in range(k):
                if local[pos] < 0:
                    for a in autos:
                        local[a[pos]] = next_orbit
                    next_orbit += 1
            graphlets.append(Graphlet(len(graphlets), k, code,
                                      tuple(code_edges(code, k)), tuple(local)))
    return GraphletCatalog._assemble(graphlets)


@lru_cache(maxsize=1)
def load_catalog() -> GraphletCatalog:
    """The shipped, versioned catalog (``data/graphlet_catalog_v1.json``)."""
    path = resources.files("mcelearn") / "data" / f"graphlet_catalog_v{CATALOG_VERSION}.json"
    return GraphletCatalog.from_json(json.loads(path.read_text()))


def classify(code: int, k: int, catalog: GraphletCatalog | None = None
             ) -> tuple[Graphlet, tuple[int, ...]] | None:
    """Identify the graphlet of a k-vertex pattern and each position's orbit.

    Returns None for disconnected patterns.  Works by searching for a
    relabeling onto the canonical representative.
    """
    if not is_connected(code, k):
        return None
    catalog = catalog or load_catalog()
    table = catalog.by_code()
    for perm in permutations(range(k)):
        g = table.get((k, permute_code(code, k, perm)))
        if g is not None:
            return g, tuple(g.position_orbit[perm[i]] for i in range(k))
    raise AssertionError("pattern not found in catalog")


@lru_cache(maxsize=1)
def orbit_tables() -> tuple[np.ndarray, ...]:
    """Lookup tables T[k] of shape (2^(k(k-1)/2), k): orbit per position.

    Disconnected codes map to ``N_ORBITS``, a sink column the kernels
    discard.
    """
    catalog = load_catalog()
    tables = []
    for k in range(2, MAX_K + 1):
        t = np.full((1 << n_pairs(k), k), N_ORBITS, dtype=np.int64)
        for code in range(1 << n_pairs(k)):
            hit = classify(code, k, catalog)
            if hit is not None:
                t[code] = hit[1]
        t.setflags(write=False)
        tables.append(t)
    return tuple(tables)


def edge_orbit() -> int:
    """Index of the single orbit of the 2-vertex graphlet (degree column)."""
    return load_catalog().graphlets[0].position_orbit[0]


def orbit_names() -> list[str]:
    return [f"o{i}" for i in range(N_ORBITS)]
