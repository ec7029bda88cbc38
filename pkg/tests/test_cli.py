import json
import subprocess
import sys

import pytest

from higgsreal import __version__
from higgsreal.cli import CSV_COLUMNS, main
from higgsreal.filtered import ModelPairing, enumerate_compatible


def run(*args):
    return main([str(a) for a in args])


@pytest.fixture()
def cyclic_field(tmp_path):
    path = tmp_path / "cyc.json"
    assert run("build-hitchin", "--r", 2, "--cyclic", "--q2", "1", "--out", path) == 0
    return path


@pytest.fixture()
def ex1_field(tmp_path):
    path = tmp_path / "ex1.json"
    assert run("build-hitchin", "--example", 1, "--alpha1", "z", "--alpha2", "1 - z/2",
               "--out", path) == 0
    return path


def test_version(capsys):
    assert run("--version") == 0
    assert __version__ in capsys.readouterr().out


def test_build_and_solve_constant_field(tmp_path, cyclic_field):
    out, csv = tmp_path / "sol.json", tmp_path / "sol.csv"
    code = run("solve", "--field", cyclic_field, "--domain", "-1,1,-1,1,17,17",
               "--out", out, "--csv", csv)
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["provenance"]["command"] == "solve"
    assert doc["provenance"]["config"]["tol"] == 1e-6
    assert doc["report"]["converged"]
    lines = csv.read_text().splitlines()
    assert lines[0].split(",") == CSV_COLUMNS
    assert len(lines) == 1 + 17 * 17
    assert max(float(r.split(",")[2]) for r in lines[1:]) <= 1e-6


def test_outputs_are_deterministic(tmp_path, ex1_field):
    texts = []
    out, csv = tmp_path / "a.json", tmp_path / "a.csv"
    for _ in range(2):
        assert run("solve", "--field", ex1_field, "--domain", "-1,1,-1,1,13,13",
                   "--seed-rule", "perturbed:0.2", "--out", out, "--csv", csv) == 0
        texts.append((out.read_bytes(), csv.read_bytes()))
    assert texts[0] == texts[1]


def test_config_file_and_override(tmp_path, cyclic_field):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"field": str(cyclic_field), "domain": "0,1,0,1,9,9", "tol": 1e-8}))
    out = tmp_path / "o.json"
    assert run("solve", "--config", cfg, "--tol", "1e-7", "--out", out) == 0
    conf = json.loads(out.read_text())["provenance"]["config"]
    assert conf["tol"] == 1e-7 and conf["domain"] == "0,1,0,1,9,9"


@pytest.mark.parametrize("extra", [
    ("--domain", "0,1,0,1,9"),
    ("--domain", "1,0,0,1,9,9"),
    ("--domain", "0,1,0,1,9,9", "--tol", "-1"),
    ("--domain", "0,1,0,1,9,9", "--seed-rule", "bogus"),
])
def test_config_errors_exit_2_without_output(tmp_path, cyclic_field, extra, capsys):
    out = tmp_path / "o.json"
    assert run("solve", "--field", cyclic_field, *extra, "--out", out) == 2
    assert not out.exists()
    assert "exit=2" in capsys.readouterr().err


def test_missing_file_and_unknown_key(tmp_path):
    out = tmp_path / "o.json"
    assert run("solve", "--field", tmp_path / "nope.json", "--domain", "0,1,0,1,9,9",
               "--out", out) == 2
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"frobnicate": 1}))
    assert run("verify-linalg", "--config", cfg, "--out", out) == 2
    assert run("frobnicate") == 2
    assert not out.exists()


def test_precondition_violation_exit_4(tmp_path, ex1_field):
    out = tmp_path / "o.json"
    assert run("solve", "--field", ex1_field, "--domain", "0,1,0,1,9,9",
               "--method", "toda", "--out", out) == 4
    assert not out.exists()


def test_non_convergence_exit_3(tmp_path, ex1_field, capsys):
    out = tmp_path / "o.json"
    code = run("solve", "--field", ex1_field, "--domain", "-2,2,-2,2,17,17",
               "--seed-rule", "perturbed:0.5", "--max-iter", 1, "--tol", "1e-14",
               "--out", out)
    assert code == 3
    assert not json.loads(out.read_text())["report"]["converged"]
    assert "exit=3" in capsys.readouterr().err


def test_exhaust_and_probe(tmp_path, ex1_field):
    out = tmp_path / "e.json"
    assert run("exhaust", "--field", ex1_field, "--ladder", "1,2", "--n", 13, "--out", out) == 0
    assert len(json.loads(out.read_text())["diagnostic"]) == 1
    assert run("uniqueness-probe", "--field", ex1_field, "--domains",
               "-1,1,-1,1,13,13;-2,2,-2,2,13,13", "--out", out) == 0
    assert len(json.loads(out.read_text())["gaps"]) == 2
    assert run("exhaust", "--field", ex1_field, "--ladder", "2,1", "--n", 13, "--out", out) == 2


def test_analyze_spectral(tmp_path):
    field, out = tmp_path / "f.json", tmp_path / "s.json"
    assert run("build-hitchin", "--example", 2, "--beta", "z", "--out", field) == 0
    assert run("analyze-spectral", "--field", field, "--at", "inf", "--out", out) == 0
    rep = json.loads(out.read_text())["report"]
    assert rep["grss"] and rep["puncture"]["rs_at_puncture"]


def test_classify_lattices_matches_library(tmp_path):
    out = tmp_path / "c.json"
    assert run("classify-lattices", "--m", "0,0", "--out", out) == 0
    fams = json.loads(out.read_text())["families"]
    lib = enumerate_compatible(ModelPairing((0, 0))).to_json()
    assert json.loads(json.dumps(lib, default=str)) == fams
    assert run("classify-lattices", "--m", "2,0", "--out", out) == 2


def test_check_lattice(tmp_path):
    spec, out = tmp_path / "l.json", tmp_path / "c.json"
    spec.write_text(json.dumps({"family": "typeNA", "n": [0, 0], "alpha": ["1", "I"], "b": ["-1/2"]}))
    assert run("check-lattice", "--spec", spec, "--m", "0,0", "--out", out) == 0
    doc = json.loads(out.read_text())
    assert doc["compatible"] and doc["lattice_oracle"]["compatible"]
    assert run("check-lattice", "--spec", spec, "--m", "1,0", "--out", out) == 0
    assert not json.loads(out.read_text())["compatible"]
    spec.write_text(json.dumps({"family": "typeNA", "n": [0, 0], "alpha": ["0", "0"], "b": "0"}))
    assert run("check-lattice", "--spec", spec, "--m", "0,0", "--out", out) == 4


def test_verify_linalg(tmp_path):
    out = tmp_path / "v.json"
    assert run("verify-linalg", "--trials", 20, "--dims", "2,3", "--out", out) == 0
    suite = json.loads(out.read_text())["suite"]
    assert [d["dim"] for d in suite["dims"]] == [2, 3]


def test_console_entry_point(tmp_path):
    out = tmp_path / "c.json"
    proc = subprocess.run([sys.executable, "-m", "higgsreal.cli", "classify-lattices", "--m", "1,0",
                           "--out", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(out.read_text())["families"]["type_III_2"]
