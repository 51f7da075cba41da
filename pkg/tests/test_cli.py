import json

import numpy as np

from mcelearn.cli import main, read_feature_csv, read_label_csv
from mcelearn.datasets import bundled_path


def run(*args):
    assert main([str(a) for a in args]) == 0


def test_gen_writes_graphs(tmp_path):
    run("gen", "--n", 30, "--p", 0.5, "--plant-k", 6, "--count", 2, "--seed", 3,
        "--out-dir", tmp_path)
    meta = json.loads((tmp_path / "graphs.json").read_text())
    assert len(meta["graphs"]) == 2 and len(meta["graphs"][0]["planted"]) == 6
    assert (tmp_path / "graph_0001.txt").exists()


def test_full_cli_flow(tmp_path):
    graph = bundled_path("lesmis")
    feats, labels = tmp_path / "f.csv", tmp_path / "y.csv"
    run("orbits", "--graph", graph, "--out", feats)
    run("mce", "--graph", graph, "--labels-out", labels, "--cliques-out", tmp_path / "c.txt",
        "--out", tmp_path / "mce.json")
    mce = json.loads((tmp_path / "mce.json").read_text())
    assert mce["clique_number"] == 10
    X, names = read_feature_csv(feats)
    assert X.shape == (77, 73) and names[0] == "o0"
    assert read_label_csv(labels).sum() > 0

    model = tmp_path / "m.json"
    run("train", "--model", "logreg", "--features", feats, "--labels", labels, "--out", model,
        "--report", tmp_path / "grid.json")
    assert json.loads(model.read_text())["kind"] == "logreg"

    run("select", "--features", feats, "--labels", labels, "--out-scores", tmp_path / "s.csv",
        "--out-subsets", tmp_path / "subsets.json")
    assert (tmp_path / "s.csv").read_text().startswith("feature,rfe_rank")
    assert set(json.loads((tmp_path / "subsets.json").read_text())) == {"f0", "f1", "f2", "f3"}

    run("prune", "--graph", graph, "--model", model, "--features", feats, "--q", 0.4,
        "--out-graph", tmp_path / "pruned.txt", "--out", tmp_path / "prune.json")
    pr = json.loads((tmp_path / "prune.json").read_text())
    assert pr["pruning_ratio"] == pr["n_pruned"] / 77

    run("eval", "--graph", graph, "--model", model, "--deterministic", "--out", tmp_path / "e.json")
    ev = json.loads((tmp_path / "e.json").read_text())
    assert ev["omega_pruned"] <= ev["omega_original"] == 10 and "speedup" not in ev


def test_embed_cli(tmp_path):
    out = tmp_path / "emb.txt"
    run("embed", "--graph", bundled_path("karate"), "--method", "node2vec", "--dim", 8,
        "--out", out)
    lines = out.read_text().splitlines()
    assert lines[0] == "34 8" and len(lines) == 35


def test_experiment_cli(tmp_path):
    run("experiment", "--n", 30, "--k", 7, "--train-count", 6, "--test-count", 2,
        "--holdout-count", 2, "--deterministic", "--summary", tmp_path / "s.csv",
        "--out", tmp_path / "r.json")
    rep = json.loads((tmp_path / "r.json").read_text())
    assert [s["k_prime"] for s in rep["summary"]] == [8, 9, 10]
    assert len((tmp_path / "s.csv").read_text().splitlines()) == 4


def test_bad_input_exit_code(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1\n1 x\n")
    assert main(["mce", "--graph", str(bad)]) == 1


def test_feature_csv_without_vertex_column(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("a,b\n1,2\n3,4\n")
    X, names = read_feature_csv(p)
    assert names == ["a", "b"]
    np.testing.assert_array_equal(X, [[1, 2], [3, 4]])
