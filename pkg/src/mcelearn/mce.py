"""Exact clique enumeration: pivoting Bron-Kerbosch over a degeneracy order.

Vertex sets are Python integers used as bitsets; for the graph sizes this
package targets that is considerably faster than ``set`` objects.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .graph import Graph, degeneracy_order

BRUTE_FORCE_LIMIT = 20


@dataclass
class MceResult:
    clique_number: int
    cliques: list[tuple[int, ...]]
    elapsed: float = field(default=0.0, compare=False)

    def clique_sets(self) -> set[frozenset[int]]:
        return {frozenset(c) for c in self.cliques}


def _members(bits: int) -> list[int]:
    out = []
    while bits:
        low = bits & -bits
        out.append(low.bit_length() - 1)
        bits ^= low
    return out


def _pivot(p: int, x: int, adj: list[int]) -> int:
    best_u, best = -1, -1
    for u in _members(p | x):
        c = (p & adj[u]).bit_count()
        if c > best:
            best_u, best = u, c
    return best_u


def _outer(g: Graph):
    """Yield (v, P, X) for the degeneracy-ordered outer loop."""
    adj = g.bitsets()
    order, _ = degeneracy_order(g)
    later = (1 << g.n) - 1
    earlier = 0
    for v in order:
        later &= ~(1 << v)
        yield v, adj[v] & later, adj[v] & earlier
        earlier |= 1 << v


def enumerate_maximal_cliques(g: Graph) -> list[tuple[int, ...]]:
    """All inclusion-maximal cliques, each once, sorted lexicographically."""
    adj = g.bitsets()
    out: list[tuple[int, ...]] = []

    def expand(r: int, p: int, x: int) -> None:
        if not p:
            if not x:
                out.append(tuple(_members(r)))
            return
        u = _pivot(p, x, adj)
        for v in _members(p & ~adj[u]):
            bit = 1 << v
            expand(r | bit, p & adj[v], x & adj[v])
            p &= ~bit
            x |= bit

    for v, p, x in _outer(g):
        expand(1 << v, p, x)
    out.sort()
    return out


def _greedy_clique_size(g: Graph) -> int:
    adj = g.bitsets()
    if g.n == 0:
        return 0
    order, _ = degeneracy_order(g)
    best = 1
    # Greedy from the last few vertices of the degeneracy order (densest core).
    for v in order[-min(len(order), 16):]:
        cand = adj[v]
        size = 1
        while cand:
            u = max(_members(cand), key=lambda w: (adj[w] & cand).bit_count())
            cand &= adj[u]
            size += 1
        best = max(best, size)
    return best


class _MaxSearch:
    """Branch-and-bound Bron-Kerbosch keeping cliques of the best size seen.

    With ``collect=False`` only the size is tracked and branches that cannot
    strictly beat it are cut, which is enough for the clique number.
    """

    def __init__(self, g: Graph, collect: bool):
        self.adj = g.bitsets()
        self.collect = collect
        self.best = _greedy_clique_size(g)
        self.found: list[int] = []
        self.slack = 0 if collect else 1

    def expand(self, r: int, rsize: int, p: int, x: int) -> None:
        adj = self.adj
        if not p:
            if not x:
                if rsize > self.best:
                    self.best = rsize
                    self.found = [r]
                elif rsize == self.best and self.collect:
                    self.found.append(r)
            return
        if rsize + p.bit_count() < self.best + self.slack:
            return
        u = _pivot(p, x, adj)
        for v in _members(p & ~adj[u]):
            if rsize + p.bit_count() < self.best + self.slack:
                return
            bit = 1 << v
            self.expand(r | bit, rsize + 1, p & adj[v], x & adj[v])
            p &= ~bit
            x |= bit

    def run(self, g: Graph) -> None:
        for v, p, x in _outer(g):
            if 1 + p.bit_count() >= self.best + self.slack:
                self.expand(1 << v, 1, p, x)


def enumerate_maximum_cliques(g: Graph) -> MceResult:
    """All maximum cliques of g with the clique number and wall time."""
    if g.n == 0:
        raise ValueError("clique number is undefined for the empty vertex set")
    t0 = time.perf_counter()
    search = _MaxSearch(g, collect=True)
    search.run(g)
    cliques = sorted(tuple(_members(r)) for r in search.found)
    return MceResult(search.best, cliques, time.perf_counter() - t0)


def clique_number(g: Graph) -> int:
    """Size of a maximum clique; stops improving-only, without listing ties."""
    if g.n == 0:
        raise ValueError("clique number is undefined for the empty vertex set")
    search = _MaxSearch(g, collect=False)
    search.run(g)
    return search.best


def brute_force_mce(g: Graph, limit: int = BRUTE_FORCE_LIMIT) -> MceResult:
    """Reference enumeration over all 2^n vertex subsets (test oracle)."""
    if g.n > limit:
        raise ValueError(f"brute force refused: n={g.n} exceeds guard {limit}")
    if g.n == 0:
        raise ValueError("clique number is undefined for the empty vertex set")
    t0 = time.perf_counter()
    adj = g.bitsets()
    is_clique = bytearray(1 << g.n)
    is_clique[0] = 1
    best, found = 0, []
    for s in range(1, 1 << g.n):
        low = (s & -s).bit_length() - 1
        rest = s & (s - 1)
        if is_clique[rest] and adj[low] & rest == rest:
            is_clique[s] = 1
            size = s.bit_count()
            if size > best:
                best, found = size, [s]
            elif size == best:
                found.append(s)
    cliques = sorted(tuple(_members(s)) for s in found)
    return MceResult(best, cliques, time.perf_counter() - t0)
