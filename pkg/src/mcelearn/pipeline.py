"""Learned vertex pruning for maximum clique enumeration, end to end.

Vertices are labelled by membership in any maximum clique, a classifier is
trained on balanced samples, vertices whose predicted probability is at most
``q`` are removed, and the maximum cliques of the remaining graph are
compared with those of the original.
"""

from __future__ import annotations

import json
import math
import time
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .classifier import Model, TrainingSet, classifier_metrics, predict_proba, train
from .embeddings import SkipGramConfig, WalkConfig, embed
from .graph import Graph, check_seed, induced_subgraph, make_rng, planted_gnp, \
    read_graph, sample_without_replacement
from .mce import MceResult, enumerate_maximum_cliques
from .orbits import count_orbits
from .catalog import orbit_names

REPRESENTATIONS = ("orbits", "deepwalk", "node2vec")


class SamplingWarning(UserWarning):
    """A graph had fewer negatives than the requested ratio asked for."""


@dataclass
class PipelineConfig:
    representation: str = "orbits"
    feature_subset: list[int] | None = None
    q: float = 0.4
    negative_ratio: float = 1.5
    model: str = "forest"
    seed: int = 0
    walk: WalkConfig = field(default_factory=WalkConfig)
    skipgram: SkipGramConfig = field(default_factory=SkipGramConfig)

    def __post_init__(self):
        if self.representation not in REPRESENTATIONS:
            raise ValueError(f"unknown representation {self.representation!r}")
        if not 0.0 <= self.q <= 1.0:
            raise ValueError(f"q must lie in [0, 1], got {self.q}")
        if not self.negative_ratio > 0:
            raise ValueError("negative_ratio must be positive")
        if self.model not in ("forest", "logreg"):
            raise ValueError(f"unknown model kind {self.model!r}")
        check_seed(self.seed)


def feature_names(cfg: PipelineConfig) -> list[str]:
    names = orbit_names() if cfg.representation == "orbits" else \
        [f"e{i}" for i in range(cfg.skipgram.dim)]
    if cfg.feature_subset is not None:
        names = [names[i] for i in cfg.feature_subset]
    return names


def compute_features(g: Graph, cfg: PipelineConfig, stream: int = 0) -> np.ndarray:
    """Per-vertex feature rows for the configured representation.

    ``stream`` individualises the embedding seeds per graph, so that
    different graphs in one experiment do not share walk randomness.
    """
    if cfg.representation == "orbits":
        X = count_orbits(g).astype(np.float64)
    else:
        seed = int(make_rng(cfg.seed, 0xE3B, stream).integers(0, 2**63))
        wcfg = WalkConfig(**{**asdict(cfg.walk), "seed": seed})
        scfg = SkipGramConfig(**{**asdict(cfg.skipgram), "seed": seed})
        X = embed(g, cfg.representation, wcfg, scfg).vectors
    if cfg.feature_subset is not None:
        X = X[:, list(cfg.feature_subset)]
    return np.ascontiguousarray(X)


@dataclass
class LabeledGraph:
    graph: Graph
    labels: np.ndarray
    mce: MceResult

    @property
    def positives(self) -> np.ndarray:
        return np.flatnonzero(self.labels)


def label_max_clique_membership(g: Graph) -> LabeledGraph:
    """Label 1 for every vertex lying in at least one maximum clique."""
    mce = enumerate_maximum_cliques(g)
    labels = np.zeros(g.n, dtype=np.int64)
    for c in mce.cliques:
        labels[list(c)] = 1
    return LabeledGraph(g, labels, mce)


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def build_training_set(graphs: Sequence[LabeledGraph], features: Sequence[np.ndarray],
                       ratio: float = 1.5, seed: int = 0,
                       names: list[str] | None = None) -> TrainingSet:
    """All positives of each graph plus round(ratio * positives) sampled negatives.

    Negatives are drawn without replacement, clamped to what the graph has;
    a shortfall emits a ``SamplingWarning``.
    """
    if len(graphs) != len(features):
        raise ValueError("one feature matrix per graph is required")
    widths = {f.shape[1] for f in features}
    if len(widths) > 1:
        raise ValueError(f"feature widths differ across graphs: {sorted(widths)}")
    rows, labels = [], []
    for gi, (lg, X) in enumerate(zip(graphs, features)):
        if len(X) != lg.graph.n:
            raise ValueError(f"graph {gi}: {len(X)} feature rows for {lg.graph.n} vertices")
        pos = lg.positives
        neg = np.flatnonzero(lg.labels == 0)
        want = round_half_up(ratio * len(pos))
        if want > len(neg):
            warnings.warn(f"graph {gi}: wanted {want} negatives, only {len(neg)} available",
                          SamplingWarning, stacklevel=2)
        pick = sample_without_replacement(len(neg), min(want, len(neg)),
                                          make_rng(seed, 0x5A3B, gi))
        chosen = np.concatenate([pos, neg[pick]]).astype(np.int64)
        rows.append(X[chosen])
        labels.append(lg.labels[chosen])
    width = widths.pop() if widths else 0
    X = np.vstack(rows) if rows else np.zeros((0, width))
    y = np.concatenate(labels) if labels else np.zeros(0, dtype=np.int64)
    return TrainingSet(X, y, names or [])


def _probabilities(model, X: np.ndarray) -> np.ndarray:
    # plain callables are accepted as models (useful for fixed or synthetic scorers)
    if hasattr(model, "predict_proba"):
        return np.atleast_1d(predict_proba(model, X))
    p = np.asarray(model(X), dtype=np.float64).reshape(-1)
    if len(p) != len(X):
        raise ValueError("model returned the wrong number of probabilities")
    return p


@dataclass
class PruneResult:
    pruned: np.ndarray
    graph: Graph
    pruning_ratio: float
    probabilities: np.ndarray

    @property
    def kept(self) -> np.ndarray:
        return np.array(sorted(self.graph.id_map), dtype=np.int64)


def prune(g: Graph, model: Model | Callable, features: np.ndarray, q: float) -> PruneResult:
    """Remove every vertex whose predicted probability is at most ``q``."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2 or len(features) != g.n:
        raise ValueError(f"{len(features)} feature rows for a graph with {g.n} vertices")
    p = _probabilities(model, features) if g.n else np.zeros(0)
    drop = p <= q
    return PruneResult(np.flatnonzero(drop), induced_subgraph(g, np.flatnonzero(~drop)),
                       float(drop.mean()) if g.n else 0.0, p)


TIMING_FIELDS = ("t_enum_original", "t_enum_pruned", "t_features", "t_inference", "speedup")


@dataclass
class ExperimentReport:
    n: int
    m: int
    omega_original: int
    omega_pruned: int
    n_pruned: int
    pruning_ratio: float
    pruned_graph_empty: bool
    clique_preserved: bool
    information_loss: float
    t_enum_original: float = 0.0
    t_enum_pruned: float = 0.0
    t_features: float = 0.0
    t_inference: float = 0.0
    speedup: float = 0.0
    holdout_f1: float | None = None
    label: str = ""

    def to_dict(self, deterministic: bool = False) -> dict:
        d = asdict(self)
        if deterministic:
            for k in TIMING_FIELDS:
                d.pop(k)
        return d


def information_loss(omega: int, omega_pruned: int) -> float:
    return abs(omega - omega_pruned) / omega


def evaluate_single(g: Graph, model: Model | Callable, features: np.ndarray | None = None,
                    q: float = 0.4, cfg: PipelineConfig | None = None,
                    t_features: float = 0.0, omega: MceResult | None = None,
                    holdout_f1: float | None = None, label: str = "") -> ExperimentReport:
    """Prune ``g`` and compare clique numbers before and after.

    When ``features`` is None they are computed from ``cfg`` and timed;
    otherwise ``t_features`` is taken as given.  A previously computed
    ``omega`` result for the original graph may be passed to avoid a rerun.
    """
    if g.n == 0:
        raise ValueError("cannot evaluate an empty graph")
    if features is None:
        cfg = cfg or PipelineConfig(q=q)
        t0 = time.perf_counter()
        features = compute_features(g, cfg)
        t_features = time.perf_counter() - t0
    full = omega or enumerate_maximum_cliques(g)
    t0 = time.perf_counter()
    pr = prune(g, model, features, q)
    t_inference = time.perf_counter() - t0
    if pr.graph.n:
        sub = enumerate_maximum_cliques(pr.graph)
        omega_pruned, t_sub = sub.clique_number, sub.elapsed
    else:
        omega_pruned, t_sub = 0, 0.0
    cost = t_sub + t_features + t_inference
    return ExperimentReport(
        n=g.n, m=g.m, omega_original=full.clique_number, omega_pruned=omega_pruned,
        n_pruned=len(pr.pruned), pruning_ratio=pr.pruning_ratio,
        pruned_graph_empty=pr.graph.n == 0,
        clique_preserved=omega_pruned == full.clique_number,
        information_loss=information_loss(full.clique_number, omega_pruned),
        t_enum_original=full.elapsed, t_enum_pruned=t_sub, t_features=t_features,
        t_inference=t_inference, speedup=full.elapsed / cost if cost > 0 else math.inf,
        holdout_f1=holdout_f1, label=label)


def clique_accuracy(reports: Sequence[ExperimentReport]) -> float:
    """Fraction of reports whose clique number survived pruning."""
    if not reports:
        raise ValueError("clique accuracy needs at least one report")
    return sum(r.omega_pruned == r.omega_original for r in reports) / len(reports)


def derive_seed(seed: int, *stream: int) -> int:
    return int(make_rng(seed, *stream).integers(0, 2**63))


@dataclass
class TrainedPipeline:
    model: Model
    training_set: TrainingSet
    config: PipelineConfig
    t_train: float = 0.0


def train_pipeline(graphs: Sequence[Graph], cfg: PipelineConfig,
                   features: Sequence[np.ndarray] | None = None) -> TrainedPipeline:
    """Label, featurise, sample and fit one classifier on a set of graphs."""
    labeled = [label_max_clique_membership(g) for g in graphs]
    if features is None:
        features = [compute_features(g, cfg, i) for i, g in enumerate(graphs)]
    ts = build_training_set(labeled, features, cfg.negative_ratio, cfg.seed, feature_names(cfg))
    t0 = time.perf_counter()
    model, _ = train(cfg.model, ts, cfg.seed)
    return TrainedPipeline(model, ts, cfg, time.perf_counter() - t0)


@dataclass
class KPrimeSummary:
    k_prime: int
    count: int
    mean_pruning_ratio: float
    clique_accuracy: float
    mean_information_loss: float
    mean_speedup: float | None

    def to_dict(self, deterministic: bool = False) -> dict:
        d = asdict(self)
        if deterministic:
            d.pop("mean_speedup")
        return d


@dataclass
class PlantedExperiment:
    n: int
    k: int
    q: float
    seed: int
    train_count: int
    test_count: int
    holdout_metrics: dict
    chosen: dict
    summaries: list[KPrimeSummary]
    reports: dict[int, list[ExperimentReport]] = field(repr=False)
    model: Model | None = field(default=None, repr=False)
    training_set: TrainingSet | None = field(default=None, repr=False)

    def to_dict(self, deterministic: bool = False, include_reports: bool = True) -> dict:
        d = {
            "n": self.n, "k": self.k, "q": self.q, "seed": self.seed,
            "train_count": self.train_count, "test_count": self.test_count,
            "classifier": self.chosen, "holdout": self.holdout_metrics,
            "summary": [s.to_dict(deterministic) for s in self.summaries],
        }
        if include_reports:
            d["reports"] = {str(kp): [r.to_dict(deterministic) for r in rs]
                            for kp, rs in self.reports.items()}
        return d

    def summary_csv(self) -> str:
        lines = ["n,k,k_prime,count,mean_pruning_ratio,clique_accuracy,mean_information_loss"]
        for s in self.summaries:
            lines.append(f"{self.n},{self.k},{s.k_prime},{s.count},{s.mean_pruning_ratio!r},"
                         f"{s.clique_accuracy!r},{s.mean_information_loss!r}")
        return "\n".join(lines) + "\n"


_TRAIN, _HOLDOUT, _TEST = 1, 2, 3


def planted_training_graphs(n: int, k: int, count: int, seed: int, stream: int = _TRAIN
                            ) -> list[Graph]:
    return [planted_gnp(n, k, derive_seed(seed, stream, k, i))[0] for i in range(count)]


def run_planted_experiment(n: int = 128, k: int = 12, train_count: int = 300,
                           test_count: int = 100, q: float = 0.4, seed: int = 0,
                           holdout_count: int = 50, k_primes: Sequence[int] | None = None,
                           negative_ratio: float = 1.5,
                           progress: Callable[[str], None] | None = None) -> PlantedExperiment:
    """Train a forest on orbit features of G(n, 1/2) + planted K_k, then test on
    ``test_count`` fresh graphs for each planted size k' in k+1..k+3.

    Classifier F1 is measured on a balanced sample from ``holdout_count``
    further graphs drawn like the training graphs.
    """
    if not 1 <= k <= n:
        raise ValueError(f"clique size k={k} must satisfy 1 <= k <= n={n}")
    say = progress or (lambda _msg: None)
    cfg = PipelineConfig(q=q, negative_ratio=negative_ratio, seed=seed)
    say(f"featurising {train_count} training graphs")
    trained = train_pipeline(planted_training_graphs(n, k, train_count, seed), cfg)
    say(f"trained in {trained.t_train:.1f}s: {trained.model.to_dict().get('n_estimators')} trees")

    hold_graphs = planted_training_graphs(n, k, holdout_count, seed, _HOLDOUT)
    hold_lab = [label_max_clique_membership(g) for g in hold_graphs]
    hold_X = [compute_features(g, cfg) for g in hold_graphs]
    holdout = build_training_set(hold_lab, hold_X, negative_ratio, derive_seed(seed, _HOLDOUT),
                                 feature_names(cfg)) if hold_graphs else None
    metrics = asdict(classifier_metrics(trained.model, holdout)) if holdout else {}
    say(f"holdout metrics {metrics}")

    reports: dict[int, list[ExperimentReport]] = {}
    summaries = []
    for kp in (k_primes or (k + 1, k + 2, k + 3)):
        if kp > n:
            raise ValueError(f"planted size {kp} exceeds n={n}")
        rs = []
        for i in range(test_count):
            g, _ = planted_gnp(n, kp, derive_seed(seed, _TEST, kp, i))
            t0 = time.perf_counter()
            X = compute_features(g, cfg)
            rs.append(evaluate_single(g, trained.model, X, q, t_features=time.perf_counter() - t0,
                                      holdout_f1=metrics.get("f1"), label=f"k'={kp}#{i}"))
        reports[kp] = rs
        summaries.append(KPrimeSummary(
            kp, len(rs), float(np.mean([r.pruning_ratio for r in rs])), clique_accuracy(rs),
            float(np.mean([r.information_loss for r in rs])),
            float(np.mean([r.speedup for r in rs]))))
        say(f"k'={kp}: P={summaries[-1].mean_pruning_ratio:.3f} A_C={summaries[-1].clique_accuracy:.2f}")
    report = getattr(trained.model, "report", None)
    return PlantedExperiment(n, k, q, seed, train_count, test_count, metrics,
                             report.chosen if report else {}, summaries, reports,
                             trained.model, trained.training_set)


@dataclass
class DomainManifest:
    """Named group of graph files sharing one classifier.

    ``train`` and ``test`` are lists of paths; when ``test`` is omitted the
    training graphs are also the evaluation graphs.
    """

    name: str
    train: list[Path]
    test: list[Path]
    fmt: str | None = None

    @classmethod
    def load(cls, path) -> DomainManifest:
        path = Path(path)
        d = json.loads(path.read_text())
        base = path.parent

        def paths(key):
            return [(base / p) for p in d.get(key, [])]

        train_paths = paths("train") or paths("graphs")
        if not train_paths:
            raise ValueError(f"manifest {path} lists no graphs")
        return cls(d.get("name", path.stem), train_paths, paths("test") or train_paths,
                   d.get("format"))


def run_domain(manifest: DomainManifest, cfg: PipelineConfig,
               deterministic: bool = False) -> dict:
    """Train one classifier on a domain's graphs and evaluate each test graph."""
    train_graphs = [read_graph(p, manifest.fmt) for p in manifest.train]
    trained = train_pipeline(train_graphs, cfg)
    reports = []
    for i, p in enumerate(manifest.test):
        g = read_graph(p, manifest.fmt)
        t0 = time.perf_counter()
        X = compute_features(g, cfg, 10_000 + i)
        reports.append(evaluate_single(g, trained.model, X, cfg.q,
                                       t_features=time.perf_counter() - t0, label=p.name))
    return {
        "domain": manifest.name,
        "representation": cfg.representation,
        "model": cfg.model,
        "q": cfg.q,
        "clique_accuracy": clique_accuracy(reports),
        "reports": [r.to_dict(deterministic) for r in reports],
    }
