import csv
import json
import os

import numpy as np
import pytest

from mlrssc.cli import main
from mlrssc.data import generate_synthetic, save_views


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    out = tmp_path_factory.mktemp("data")
    paths, labels = save_views(generate_synthetic(0, n_points=60), out)
    return [str(p) for p in paths], str(labels)


def test_synth_default(tmp_path):
    assert main(["synth", "--out", str(tmp_path / "a")]) == 0
    assert sorted(os.listdir(tmp_path / "a")) == ["labels.txt", "view1.csv", "view2.csv"]
    X = np.loadtxt(tmp_path / "a" / "view1.csv", delimiter=",")
    assert X.shape == (1000, 2)
    assert main(["synth", "--out", str(tmp_path / "b")]) == 0
    for name in ("view1.csv", "view2.csv", "labels.txt"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_synth_unwritable(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["synth", "--out", str(blocker / "sub")]) != 0
    assert "error" in capsys.readouterr().err


def test_fit_writes_record(files, tmp_path, capsys):
    views, labels = files
    out = tmp_path / "r.jsonl"
    args = ["fit", "--views", *views, "--labels", labels, "--max-iters", "10",
            "--restarts", "3", "--out", str(out)]
    assert main(args) == 0
    text = out.read_text()
    rec = json.loads(text.splitlines()[0])
    assert rec["method"] == "Pairwise MLRSSC" and "seconds" not in rec
    assert "NMI" in capsys.readouterr().out
    assert main(args) == 0
    assert out.read_text() == text


def test_fit_nonconverged_exits_zero(files, tmp_path):
    views, labels = files
    out = tmp_path / "r.jsonl"
    assert main(["fit", "--views", *views, "--labels", labels, "--max-iters", "1",
                 "--epsilon", "1e-300", "--restarts", "1", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["report"]["converged"] is False


def test_fit_without_labels(files, tmp_path):
    views, _ = files
    out = tmp_path / "r.jsonl"
    assert main(["fit", "--views", *views, "--k", "2", "--max-iters", "3", "--restarts", "1",
                 "--out", str(out)]) == 0
    assert json.loads(out.read_text())["metrics"] is None


@pytest.mark.parametrize("flags", [
    ["--mode", "centroid"], ["--mode", "single", "--concat"], ["--fidelity", "exact"],
    ["--fidelity", "kernel", "--sigma-mult", "1", "2"], ["--fidelity", "kernel", "--kernel", "linear"],
    ["--pca", "0.9"],
])
def test_fit_variants(files, flags):
    views, labels = files
    assert main(["fit", "--views", *views, "--labels", labels, "--max-iters", "3",
                 "--restarts", "1", *flags]) == 0


def test_fit_errors(files, tmp_path):
    views, labels = files
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\n1,nope\n")
    assert main(["fit", "--views", str(bad), "--k", "2"]) != 0
    assert main(["fit", "--views", views[0], str(bad), "--k", "2"]) != 0
    assert main(["fit", "--views", *views, "--labels", labels, "--mode", "single"]) != 0
    assert main(["fit", "--views", *views, "--labels", labels, "--mu", "-1"]) != 0
    assert main(["fit"]) != 0


def test_grid_cli(files, tmp_path, capsys):
    views, labels = files
    out = tmp_path / "g.jsonl"
    assert main(["grid", "--views", *views, "--labels", labels, "--grid-beta1", "0.3", "0.7",
                 "--grid-lambda", "0.5", "--grid-mu", "100", "--max-iters", "5",
                 "--restarts", "2", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 3
    text = capsys.readouterr().out
    assert "best grid point" in text and "Adj-RI" in text


def test_bench_cli(tmp_path):
    out = tmp_path / "b.csv"
    assert main(["bench", "--sizes", "30", "--repeats", "1", "--max-iters", "2",
                 "--out", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0][0] == "N" and rows[1][0] == "30"


def test_trace_cli(files, tmp_path):
    views, labels = files
    out = tmp_path / "t.csv"
    assert main(["trace", "--views", *views, "--labels", labels, "--max-iters", "6",
                 "--epsilon", "1e-300", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 6
    assert {"iteration", "residual_sum", "normalized_sum", "objective"} <= set(rows[0])
