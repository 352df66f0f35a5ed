import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from oscbound import GridFunction, save_grid
from oscbound.cli import main


@pytest.fixture
def grid1d(tmp_path):
    p = tmp_path / "g1.oscg"
    save_grid(GridFunction(np.array([4.0, 0, 0, 0]), 0.25), str(p))
    return str(p)


@pytest.fixture
def grid2d(tmp_path):
    p = tmp_path / "g2.oscg"
    save_grid(GridFunction(np.random.default_rng(0).random((8, 8)), 1 / 8), str(p))
    return str(p)


def test_verify_pass_writes_outputs(tmp_path, capsys):
    out, rows, plot = tmp_path / "r.json", tmp_path / "r.csv", tmp_path / "plot.csv"
    code = main(["verify", "--suite", "wik", "--dim", "2", "--grid", "8", "--trials", "3",
                 "--out", str(out), "--csv", str(rows), "--plot-data", str(plot)])
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["verdict"] == "pass" and len(rep["trials"]) == 3
    assert len(rows.read_text().splitlines()) == 4
    main(["verify", "--suite", "wik", "--dim", "3", "--grid", "4", "--trials", "2", "--out", str(out), "--plot-data", str(plot)])
    table = list(csv.DictReader(open(plot)))
    assert [r["n"] for r in table] == ["2", "3"]
    assert "pass" in capsys.readouterr().err


def test_verify_failure_exit_1_and_reproducer(tmp_path):
    out = tmp_path / "r.json"
    code = main(["verify", "--suite", "falsecompare", "--grid", "8", "--trials", "3", "--slack", "-0.9",
                 "--out", str(out)])
    assert code == 1
    rep = json.loads(out.read_text())
    assert rep["verdict"] == "fail"
    assert all(p.startswith(str(tmp_path)) for p in rep["notes"]["reproducer"])


def test_verify_stdout_and_weights(capsys):
    assert main(["verify", "--suite", "klemes1d", "--grid", "16", "--trials", "2", "--weights", "constant=1,iid=0,dyadic=0,logspike=0,radial=0,checker=0,twolevel=0"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["max_ratio"] == 0.0


@pytest.mark.parametrize("argv", [
    ["verify", "--suite", "nope"],
    ["verify"],
    ["verify", "--suite", "klemes1d", "--dim", "2"],
    ["verify", "--suite", "wik", "--weights", "bogus=1"],
    ["oscillation", "--input", "/nonexistent.oscg"],
    ["concentration", "--random", "m=x"],
    ["concentration", "--random", "m=25"],
    [],
])
def test_usage_errors_exit_2(argv):
    assert main(argv) == 2


def test_rearrange(grid1d, tmp_path):
    stem = str(tmp_path / "out")
    assert main(["rearrange", "--input", grid1d, "--out", stem]) == 0
    meta = json.load(open(stem + ".json"))
    assert meta["measure"] == 1.0
    assert open(stem + ".csv").read().strip()


def test_oscillation(grid2d, tmp_path):
    out = tmp_path / "o.json"
    assert main(["oscillation", "--input", grid2d, "--basis", "rectangles", "--refine", "--per-scale", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["basis"] == "rectangles" and rep["value"] > 0


@pytest.mark.parametrize("method,extra", [
    ("dyadic", ["--level", "2"]),
    ("bisection", ["--t", "1.0"]),
    ("risingsun", ["--level", "1"]),
    ("risingsun", ["--t", "1.0"]),
])
def test_czd(grid1d, tmp_path, method, extra):
    out = tmp_path / "c.json"
    assert main(["czd", "--input", grid1d, "--method", method, "--out", str(out), *extra]) == 0
    d = json.loads(out.read_text())
    assert d["validation"]["ok"] and d["method"] == method
    if method == "risingsun":
        assert "exact_endpoints" in d


def test_czd_precondition_violation(grid1d):
    assert main(["czd", "--input", grid1d, "--method", "risingsun", "--level", "0.5"]) == 2
    assert main(["czd", "--input", grid1d, "--method", "bisection", "--level", "2"]) == 2


def test_concentration(tmp_path):
    out = tmp_path / "k.json"
    assert main(["concentration", "--random", "m=10", "--trials", "5", "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["m"] == 10 and d["verdict"] == "pass" and len(d["trials"]) == 5
    assert main(["concentration", "--random", "4", "--trials", "2", "--kind", "parity", "--p", "0.3", "--out", str(out)]) == 0


def test_corpus_and_constants(tmp_path, capsys):
    assert main(["corpus", "--dim", "1", "--grid", "16", "--count", "3", "--out-dir", str(tmp_path / "c")]) == 0
    index = json.load(open(tmp_path / "c" / "index.json"))
    assert len(index) == 3
    assert main(["constants", "--max-dim", "4"]) == 0
    d = json.loads(capsys.readouterr().out.split("\n", 1)[1])
    assert d["crossover_dimension"] == 3 and len(d["rows"]) == 4


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "oscbound", "constants", "--max-dim", "2"], capture_output=True, text=True)
    assert r.returncode == 0
    assert json.loads(r.stdout)["rows"][1]["dyadic"] == 4.0
