"""Random-walk vertex embeddings: uniform (DeepWalk) and second-order biased
(Node2vec) walks, followed by skip-gram training with negative sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import TextIO

import numpy as np
from numba import njit, prange

from .graph import Graph, check_seed, make_rng

STRATEGIES = ("uniform", "biased")
METHODS = {"deepwalk": "uniform", "node2vec": "biased"}


@dataclass(frozen=True)
class WalkConfig:
    num_walks: int = 5
    walk_length: int = 10
    strategy: str = "uniform"
    return_param: float = 0.25
    inout_param: float = 0.75
    seed: int = 0

    def __post_init__(self):
        if self.num_walks < 0:
            raise ValueError("num_walks must be nonnegative")
        if self.walk_length < 1:
            raise ValueError("walk_length must be at least 1")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown walk strategy {self.strategy!r}")
        if not (self.return_param > 0 and self.inout_param > 0):
            raise ValueError("return and in-out parameters must be positive")
        check_seed(self.seed)


@dataclass(frozen=True)
class SkipGramConfig:
    dim: int = 128
    window: int = 10
    negatives: int = 5
    epochs: int = 5
    learning_rate: float = 0.025
    noise_exponent: float = 0.75
    seed: int = 0
    # unsynchronised multi-threaded updates; results then vary run to run
    parallel: bool = False

    def __post_init__(self):
        if self.dim < 1 or self.window < 1:
            raise ValueError("dim and window must be at least 1")
        if self.negatives < 0 or self.epochs < 0:
            raise ValueError("negatives and epochs must be nonnegative")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        check_seed(self.seed)


@dataclass
class WalkCorpus:
    n: int
    walks: list[list[int]]

    def __len__(self) -> int:
        return len(self.walks)

    def flat(self) -> tuple[np.ndarray, np.ndarray]:
        """Concatenated vertex ids and walk offsets."""
        lengths = np.fromiter((len(w) for w in self.walks), dtype=np.int64, count=len(self.walks))
        offsets = np.zeros(len(self.walks) + 1, dtype=np.int64)
        np.cumsum(lengths, out=offsets[1:])
        ids = np.fromiter((v for w in self.walks for v in w), dtype=np.int64, count=int(offsets[-1]))
        return ids, offsets

    def frequencies(self) -> np.ndarray:
        ids, _ = self.flat()
        return np.bincount(ids, minlength=self.n)


@dataclass
class EmbeddingMatrix:
    vectors: np.ndarray
    epoch_losses: list[float] = field(default_factory=list)

    @property
    def shape(self) -> tuple[int, int]:
        return self.vectors.shape


def _biased_step(nbrs: np.ndarray, prev: int, prev_nbrs: np.ndarray, cfg: WalkConfig,
                 rng: np.random.Generator) -> int:
    # weights relative to the previous vertex: return, stay at distance 1, move outward
    w = np.full(len(nbrs), 1.0 / cfg.inout_param)
    pos = np.searchsorted(prev_nbrs, nbrs)
    pos[pos == len(prev_nbrs)] = 0
    if len(prev_nbrs):
        w[prev_nbrs[pos] == nbrs] = 1.0
    w[nbrs == prev] = 1.0 / cfg.return_param
    cum = np.cumsum(w)
    return int(nbrs[min(np.searchsorted(cum, rng.random() * cum[-1], side="right"), len(nbrs) - 1)])


def generate_walks(g: Graph, cfg: WalkConfig = WalkConfig()) -> WalkCorpus:
    """``num_walks`` walks from every vertex, ordered by round then start vertex.

    Each start vertex has its own random stream, so a vertex's walks do not
    depend on the rest of the corpus order.  Walks stop early at isolated
    vertices.
    """
    per_vertex = []
    for v in range(g.n):
        rng = make_rng(cfg.seed, 0x3A1C, v)
        walks = []
        for _ in range(cfg.num_walks):
            walk = [v]
            while len(walk) < cfg.walk_length:
                cur = walk[-1]
                nbrs = g.neighbors(cur)
                if len(nbrs) == 0:
                    break
                if cfg.strategy == "uniform" or len(walk) == 1:
                    walk.append(int(nbrs[rng.integers(len(nbrs))]))
                else:
                    prev = walk[-2]
                    walk.append(_biased_step(nbrs, prev, g.neighbors(prev), cfg, rng))
            walks.append(walk)
        per_vertex.append(walks)
    return WalkCorpus(g.n, [per_vertex[v][r] for r in range(cfg.num_walks) for v in range(g.n)])


@njit(cache=True)
def _sgns_walk(ids, lo, hi, W, C, cum_noise, window, negatives, lr0, done, total, grad):
    """Skip-gram updates for one walk; returns (summed loss, pair count)."""
    dim = W.shape[1]
    loss = 0.0
    pairs = 0
    for i in range(lo, hi):
        center = ids[i]
        for j in range(max(lo, i - window), min(hi, i + window + 1)):
            if j == i:
                continue
            lr = lr0 * max(1.0 - (done + pairs) / total, 1e-4)
            for d in range(dim):
                grad[d] = 0.0
            for s in range(negatives + 1):
                if s == 0:
                    target = ids[j]
                    label = 1.0
                else:
                    r = np.random.random() * cum_noise[-1]
                    target = np.searchsorted(cum_noise, r, side="right")
                    if target >= len(cum_noise):
                        target = len(cum_noise) - 1
                    if target == ids[j]:
                        continue
                    label = 0.0
                dot = 0.0
                for d in range(dim):
                    dot += W[center, d] * C[target, d]
                if dot > 30.0:
                    sig = 1.0
                elif dot < -30.0:
                    sig = 0.0
                else:
                    sig = 1.0 / (1.0 + math.exp(-dot))
                if label == 1.0:
                    loss -= math.log(max(sig, 1e-12))
                else:
                    loss -= math.log(max(1.0 - sig, 1e-12))
                step = lr * (label - sig)
                for d in range(dim):
                    grad[d] += step * C[target, d]
                    C[target, d] += step * W[center, d]
            for d in range(dim):
                W[center, d] += grad[d]
            pairs += 1
    return loss, pairs


@njit(cache=True)
def _pair_count(offsets, window):
    total = 0
    for w in range(len(offsets) - 1):
        length = offsets[w + 1] - offsets[w]
        for i in range(length):
            total += min(length - 1, i + window) - max(0, i - window)
    return total


@njit(cache=True)
def _train_serial(ids, offsets, W, C, cum_noise, window, negatives, epochs, lr0, seed):
    np.random.seed(seed)
    total = max(_pair_count(offsets, window) * epochs, 1)
    grad = np.zeros(W.shape[1])
    losses = np.zeros(epochs)
    done = 0
    for e in range(epochs):
        loss = 0.0
        count = 0
        for w in range(len(offsets) - 1):
            l, p = _sgns_walk(ids, offsets[w], offsets[w + 1], W, C, cum_noise, window,
                              negatives, lr0, done, total, grad)
            loss += l
            count += p
            done += p
        losses[e] = loss / count if count else np.nan
    return losses


@njit(cache=True, parallel=True)
def _train_parallel(ids, offsets, W, C, cum_noise, window, negatives, epochs, lr0, seed):
    n_walks = len(offsets) - 1
    per_epoch = _pair_count(offsets, window)
    total = max(per_epoch * epochs, 1)
    losses = np.zeros(epochs)
    for e in range(epochs):
        wl = np.zeros(n_walks)
        wc = np.zeros(n_walks, dtype=np.int64)
        for w in prange(n_walks):
            np.random.seed(seed + e * n_walks + w)
            grad = np.zeros(W.shape[1])
            # approximate progress for the decay: walks are processed out of order
            l, p = _sgns_walk(ids, offsets[w], offsets[w + 1], W, C, cum_noise, window,
                              negatives, lr0, e * per_epoch + per_epoch * w // max(n_walks, 1),
                              total, grad)
            wl[w] = l
            wc[w] = p
        count = wc.sum()
        losses[e] = wl.sum() / count if count else np.nan
    return losses


def train_skipgram(corpus: WalkCorpus, cfg: SkipGramConfig = SkipGramConfig()) -> EmbeddingMatrix:
    """Skip-gram with negative sampling; returns the centre vectors.

    The learning rate decays linearly from ``learning_rate`` towards zero over
    all (centre, context) pairs of all epochs.  Noise vertices are drawn with
    probability proportional to corpus frequency raised to ``noise_exponent``.
    """
    if len(corpus) == 0 or corpus.n == 0:
        raise ValueError("cannot train on an empty walk corpus")
    ids, offsets = corpus.flat()
    rng = make_rng(cfg.seed, 0x5EED)
    W = (rng.random((corpus.n, cfg.dim)) - 0.5) / cfg.dim
    C = np.zeros((corpus.n, cfg.dim))
    cum_noise = np.cumsum(corpus.frequencies().astype(np.float64) ** cfg.noise_exponent)
    kernel_seed = int(rng.integers(0, 2**31 - 1))
    train = _train_parallel if cfg.parallel else _train_serial
    losses = train(ids, offsets, W, C, cum_noise, cfg.window, cfg.negatives, cfg.epochs,
                   cfg.learning_rate, kernel_seed)
    return EmbeddingMatrix(W, [float(x) for x in losses])


def embed(g: Graph, method: str = "deepwalk", wcfg: WalkConfig | None = None,
          scfg: SkipGramConfig | None = None) -> EmbeddingMatrix:
    if method not in METHODS:
        raise ValueError(f"unknown embedding method {method!r}")
    wcfg = replace(wcfg or WalkConfig(), strategy=METHODS[method])
    return train_skipgram(generate_walks(g, wcfg), scfg or SkipGramConfig())


def write_embedding(vectors: np.ndarray, out: TextIO) -> None:
    n, dim = vectors.shape
    out.write(f"{n} {dim}\n")
    for v, row in enumerate(vectors.tolist()):
        out.write(f"{v} " + " ".join(repr(x) for x in row) + "\n")


def read_embedding(source: TextIO) -> np.ndarray:
    header = source.readline().split()
    if len(header) != 2:
        raise ValueError("embedding file must start with 'n dim'")
    n, dim = int(header[0]), int(header[1])
    out = np.zeros((n, dim))
    seen = 0
    for line in source:
        parts = line.split()
        if not parts:
            continue
        if len(parts) != dim + 1:
            raise ValueError(f"expected {dim} values for vertex {parts[0]}")
        out[int(parts[0])] = [float(x) for x in parts[1:]]
        seen += 1
    if seen != n:
        raise ValueError(f"header declares {n} vertices, found {seen}")
    return out
