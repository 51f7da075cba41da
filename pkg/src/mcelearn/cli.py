"""Command-line interface: ``mcelearn <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import pipeline as pl
from .classifier import TrainingSet, load_model, save_model, train
from .embeddings import SkipGramConfig, WalkConfig, embed, write_embedding
from .graph import gen_gnp, planted_gnp, read_graph, write_edge_list
from .mce import enumerate_maximum_cliques
from .orbits import count_orbits, write_orbit_csv
from .selection import select_features


def _dump(obj, path: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def read_feature_csv(path) -> tuple[np.ndarray, list[str]]:
    """Feature matrix and column names; a leading ``vertex`` column is dropped."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty feature file")
    header, body = rows[0], rows[1:]
    start = 1 if header and header[0] == "vertex" else 0
    X = np.array([[float(x) for x in r[start:]] for r in body if r], dtype=np.float64)
    return X.reshape(len(X), len(header) - start), header[start:]


def read_label_csv(path) -> np.ndarray:
    """Labels from the ``label`` column (or the last column) of a CSV."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    col = rows[0].index("label") if "label" in rows[0] else len(rows[0]) - 1
    return np.array([int(r[col]) for r in rows[1:]], dtype=np.int64)


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def cmd_gen(a) -> None:
    out = Path(a.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    meta = []
    for i in range(a.count):
        seed = pl.derive_seed(a.seed, i)
        if a.plant_k:
            g, planted = planted_gnp(a.n, a.plant_k, seed, a.p)
        else:
            g, planted = gen_gnp(a.n, a.p, seed), ()
        name = f"graph_{i:04d}.txt"
        with open(out / name, "w") as fh:
            write_edge_list(g, fh)
        meta.append({"file": name, "n": g.n, "m": g.m, "seed": seed, "planted": list(planted)})
    _dump({"n": a.n, "p": a.p, "plant_k": a.plant_k, "seed": a.seed, "graphs": meta},
          str(out / "graphs.json"))


def cmd_orbits(a) -> None:
    g = read_graph(a.graph, a.format)
    counts = count_orbits(g, a.method)
    cols = _int_list(a.columns) if a.columns else None
    with (open(a.out, "w") if a.out else sys.stdout) as fh:
        write_orbit_csv(counts, fh, cols)


def cmd_embed(a) -> None:
    g = read_graph(a.graph, a.format)
    wcfg = WalkConfig(a.walks, a.length, return_param=a.return_param, inout_param=a.inout_param,
                      seed=a.seed)
    scfg = SkipGramConfig(a.dim, a.window, a.negatives, a.epochs, a.lr, seed=a.seed,
                          parallel=a.parallel)
    e = embed(g, a.method, wcfg, scfg)
    with (open(a.out, "w") if a.out else sys.stdout) as fh:
        write_embedding(e.vectors, fh)


def cmd_mce(a) -> None:
    g = read_graph(a.graph, a.format)
    lg = pl.label_max_clique_membership(g)
    if a.cliques_out:
        Path(a.cliques_out).write_text(
            "".join(" ".join(map(str, c)) + "\n" for c in lg.mce.cliques))
    if a.labels_out:
        Path(a.labels_out).write_text(
            "vertex,label\n" + "".join(f"{v},{y}\n" for v, y in enumerate(lg.labels.tolist())))
    _dump({"n": g.n, "m": g.m, "clique_number": lg.mce.clique_number,
           "maximum_cliques": len(lg.mce.cliques), "elapsed": lg.mce.elapsed}, a.out)


def _training_set(a) -> TrainingSet:
    X, names = read_feature_csv(a.features)
    y = read_label_csv(a.labels)
    return TrainingSet(X, y, names)


def cmd_train(a) -> None:
    ts = _training_set(a)
    model, report = train(a.model, ts, a.seed)
    save_model(model, a.out)
    _dump({"model": a.model, "samples": len(ts), "chosen": report.chosen,
           "cells": report.cells}, a.report)


def cmd_select(a) -> None:
    ts = _training_set(a)
    res = select_features(ts, a.seed, a.thresholds)
    with open(a.out_scores, "w") as fh:
        res.write_scores(fh)
    _dump(res.subset_dict(), a.out_subsets)


def _features_for(a, g):
    if a.features:
        X, _ = read_feature_csv(a.features)
        return X
    return count_orbits(g).astype(np.float64)


def cmd_prune(a) -> None:
    g = read_graph(a.graph, a.format)
    pr = pl.prune(g, load_model(a.model), _features_for(a, g), a.q)
    if a.out_graph:
        with open(a.out_graph, "w") as fh:
            write_edge_list(pr.graph, fh)
    _dump({"n": g.n, "q": a.q, "pruned": pr.pruned.tolist(), "n_pruned": len(pr.pruned),
           "pruning_ratio": pr.pruning_ratio, "kept": pr.kept.tolist()}, a.out)


def cmd_eval(a) -> None:
    if a.manifest:
        cfg = pl.PipelineConfig(representation=a.representation, q=a.q, model=a.model_kind,
                                seed=a.seed)
        _dump(pl.run_domain(pl.DomainManifest.load(a.manifest), cfg, a.deterministic), a.out)
        return
    if not (a.graph and a.model):
        raise SystemExit("eval needs either --manifest or both --graph and --model")
    g = read_graph(a.graph, a.format)
    model = load_model(a.model)
    if a.features:
        rep = pl.evaluate_single(g, model, _features_for(a, g), a.q)
    else:
        rep = pl.evaluate_single(g, model, None, a.q, pl.PipelineConfig(q=a.q, seed=a.seed))
    _dump(rep.to_dict(a.deterministic), a.out)


def cmd_experiment(a) -> None:
    log = (lambda m: print(m, file=sys.stderr)) if a.verbose else None
    ex = pl.run_planted_experiment(a.n, a.k, a.train_count, a.test_count, a.q, a.seed,
                                   a.holdout_count, progress=log)
    _dump(ex.to_dict(a.deterministic, include_reports=not a.no_reports), a.out)
    if a.summary:
        Path(a.summary).write_text(ex.summary_csv())
    if a.model_out:
        save_model(ex.model, a.model_out)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mcelearn", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def graph_args(sp, required=True):
        sp.add_argument("--graph", required=required, help="edge-list file")
        sp.add_argument("--format", choices=["plain", "matrix-market"], default=None,
                        help="default: by extension (.mtx = matrix-market)")

    s = sub.add_parser("gen", help="generate G(n,p) graphs, optionally with a planted clique")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--p", type=float, default=0.5)
    s.add_argument("--plant-k", type=int, default=0)
    s.add_argument("--count", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out-dir", required=True)
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("orbits", help="per-vertex graphlet orbit counts as CSV")
    graph_args(s)
    s.add_argument("--method", choices=["auto", "esu", "dense"], default="auto")
    s.add_argument("--columns", help="comma-separated orbit indices to keep")
    s.add_argument("--out")
    s.set_defaults(func=cmd_orbits)

    s = sub.add_parser("embed", help="random-walk skip-gram embeddings")
    graph_args(s)
    s.add_argument("--method", choices=["deepwalk", "node2vec"], default="deepwalk")
    s.add_argument("--dim", type=int, default=128)
    s.add_argument("--walks", type=int, default=5)
    s.add_argument("--length", type=int, default=10)
    s.add_argument("--window", type=int, default=10)
    s.add_argument("--negatives", type=int, default=5)
    s.add_argument("--epochs", type=int, default=5)
    s.add_argument("--lr", type=float, default=0.025)
    s.add_argument("--return-param", type=float, default=0.25)
    s.add_argument("--inout-param", type=float, default=0.75)
    s.add_argument("--parallel", action="store_true", help="multi-threaded, not reproducible")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_embed)

    s = sub.add_parser("mce", help="clique number and all maximum cliques")
    graph_args(s)
    s.add_argument("--cliques-out", help="write one maximum clique per line")
    s.add_argument("--labels-out", help="write vertex,label membership CSV")
    s.add_argument("--out")
    s.set_defaults(func=cmd_mce)

    s = sub.add_parser("train", help="fit a classifier with a cross-validated grid search")
    s.add_argument("--model", choices=["logreg", "forest"], required=True)
    s.add_argument("--features", required=True)
    s.add_argument("--labels", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--report", help="grid-search report (JSON); default stdout")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("select", help="rank features and cut nested subsets")
    s.add_argument("--features", required=True)
    s.add_argument("--labels", required=True)
    s.add_argument("--out-scores", required=True)
    s.add_argument("--out-subsets", help="subset definitions (JSON); default stdout")
    s.add_argument("--thresholds", type=float, nargs=3, metavar=("S1", "S2", "S3"))
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_select)

    s = sub.add_parser("prune", help="remove vertices predicted outside every maximum clique")
    graph_args(s)
    s.add_argument("--model", required=True)
    s.add_argument("--features", help="feature CSV; default: orbit counts of the graph")
    s.add_argument("--q", type=float, default=0.4)
    s.add_argument("--out-graph", help="write the pruned graph as an edge list")
    s.add_argument("--out")
    s.set_defaults(func=cmd_prune)

    s = sub.add_parser("eval", help="prune and compare clique numbers")
    graph_args(s, required=False)
    s.add_argument("--model")
    s.add_argument("--features")
    s.add_argument("--manifest", help="domain manifest (JSON): train a model and evaluate")
    s.add_argument("--representation", choices=list(pl.REPRESENTATIONS), default="orbits")
    s.add_argument("--model-kind", choices=["forest", "logreg"], default="forest")
    s.add_argument("--q", type=float, default=0.4)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--deterministic", action="store_true", help="omit timings")
    s.add_argument("--out")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("experiment", help="planted-clique robustness experiment")
    s.add_argument("--n", type=int, default=128)
    s.add_argument("--k", type=int, default=12)
    s.add_argument("--train-count", type=int, default=300)
    s.add_argument("--test-count", type=int, default=100)
    s.add_argument("--holdout-count", type=int, default=50)
    s.add_argument("--q", type=float, default=0.4)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--deterministic", action="store_true", help="omit timings")
    s.add_argument("--no-reports", action="store_true", help="summary only, no per-graph rows")
    s.add_argument("--summary", help="per-k' summary CSV")
    s.add_argument("--model-out")
    s.add_argument("--verbose", action="store_true")
    s.add_argument("--out")
    s.set_defaults(func=cmd_experiment)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ValueError, OSError) as exc:
        print(f"mcelearn {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
