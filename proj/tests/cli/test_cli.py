import csv
import json
import os
import shutil
import subprocess

import pytest

CLI = os.environ.get("CUTSTOKES_CLI") or shutil.which("cutstokes")

pytestmark = pytest.mark.skipif(CLI is None, reason="cutstokes executable not found; set CUTSTOKES_CLI")


def run(*args, cwd=None):
    return subprocess.run([CLI, *args], capture_output=True, text=True, cwd=cwd)


def read_rows(path):
    with open(path) as f:
        lines = [line for line in f if not line.startswith("#")]
    return list(csv.DictReader(lines))


def test_convergence_single_config(tmp_path):
    r = run("convergence", "--config", "A", "--pair", "p1p1", "--n", "2,3", "--out", str(tmp_path))
    assert r.returncode == 0, r.stderr
    rows = read_rows(tmp_path / "convergence.csv")
    assert len(rows) == 2
    assert [int(row["N"]) for row in rows] == [2, 3]
    slopes = json.loads((tmp_path / "slopes.json").read_text())
    assert slopes
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["subcommand"] == "convergence"
    assert "convergence.csv" in manifest["outputs"]


def test_convergence_all_configs(tmp_path):
    r = run("convergence", "--config", "all", "--pair", "p1p0", "--n", "2,3", "--out", str(tmp_path))
    assert r.returncode == 0, r.stderr
    rows = read_rows(tmp_path / "convergence.csv")
    assert len(rows) == 6
    assert {row["config"] for row in rows} == {"A", "B", "C"}


def test_csv_schema_line(tmp_path):
    run("convergence", "--config", "B", "--pair", "p1p1", "--n", "2", "--out", str(tmp_path))
    first = (tmp_path / "convergence.csv").read_text().splitlines()[0]
    assert first == "# schema_version=1"


@pytest.mark.parametrize("n", ["0", "-1", "4,2"])
def test_bad_n_is_usage_error(tmp_path, n):
    r = run("convergence", "--config", "A", "--n", n, "--out", str(tmp_path))
    assert r.returncode == 2


def test_bad_param_key_is_usage_error(tmp_path):
    r = run("patchtest", "--params", "nonsense=1")
    assert r.returncode == 2


def test_condition_is_deterministic(tmp_path):
    outs = []
    for name in ("a", "b"):
        d = tmp_path / name
        r = run("condition", "--pair", "p1p1", "--l", "0.99", "--beta", "0.1", "--out", str(d))
        assert r.returncode == 0, r.stderr
        outs.append((d / "condition.csv").read_bytes())
    assert outs[0] == outs[1]
    lines = outs[0].decode().splitlines()
    data = [line for line in lines if not line.startswith("#")]
    assert data[0] == "beta,l_0.990"
    kappa = float(data[1].split(",")[1])
    assert 100 < kappa < 1e4


def test_patchtest_passes(tmp_path):
    r = run("patchtest", "--pair", "both", "--n", "2", "--out", str(tmp_path))
    assert r.returncode == 0, r.stderr + r.stdout
    rows = read_rows(tmp_path / "patchtest.csv")
    assert len(rows) == 4
    skipped = [row for row in rows if row["pair"] == "p1p0" and row["name"] == "linear_pressure"]
    assert len(skipped) == 1
    assert "skip" in (skipped[0]["status"]).lower()


def test_patchtest_without_nitsche_fails():
    r = run("patchtest", "--pair", "p1p1", "--n", "2", "--params", "gamma=0")
    assert r.returncode == 1


def test_mesh_dump(tmp_path):
    r = run("mesh", "--config", "A", "--n", "2", "--out", str(tmp_path))
    assert r.returncode == 0, r.stderr
    assert (tmp_path / "mesh.txt").stat().st_size > 0
    assert (tmp_path / "cut_geometry.txt").exists()
