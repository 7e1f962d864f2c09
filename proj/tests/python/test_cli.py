import json
import os
import subprocess
from pathlib import Path

import numpy as np
import pytest

EXE = os.environ.get("LSFLOW_EXE")
pytestmark = pytest.mark.skipif(not EXE, reason="LSFLOW_EXE not set")


def lsflow(*args, cwd=None):
    return subprocess.run([EXE, *args], capture_output=True, text=True, cwd=cwd)


def write_config(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc, indent=2))
    return str(path)


def preset(name):
    out = lsflow("preset", name)
    assert out.returncode == 0, out.stderr
    return json.loads(out.stdout)


def test_preset_listing():
    out = lsflow("preset")
    assert out.returncode == 0
    assert out.stdout.split() == [
        "example1-le1", "example1-le2", "example1-le3", "example2-l075", "example2-l05",
        "example2-l025", "example3-x0a", "example3-x0b", "example4",
    ]


def test_preset_files_match_builtins():
    presets = Path(__file__).resolve().parents[2] / "presets"
    for name in lsflow("preset").stdout.split():
        path = presets / (name.replace("-", "_") + ".json")
        assert json.loads(path.read_text()) == preset(name), name


def test_run_example1_from_config_file(tmp_path):
    cfg = write_config(tmp_path, preset("example1-le1"), "example1_le1.json")
    out = lsflow("run", "--config", cfg, "--out", str(tmp_path / "out"))
    assert out.returncode == 0, out.stderr
    fit = json.loads((tmp_path / "out" / "fit_solution_error.json").read_text())
    assert fit["slope"] == pytest.approx(-0.313, abs=0.05)
    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert manifest["check"]["scenario"] == "FixedConnected"


def test_run_example3_alias(tmp_path):
    out = lsflow("run", "--preset", "example3", "--out", str(tmp_path), "--emit-svg")
    assert out.returncode == 0, out.stderr
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["check"]["scenario"] == "SwitchingAllConnected"
    assert manifest["terminal"]["oracle_gap"] < 1e-2
    assert (tmp_path / "solution_error.svg").read_text().startswith("<svg")


def test_exit_codes(tmp_path):
    doc = preset("example3-x0a")
    doc["stepsize"]["lambda"] = 0.25
    doc["horizon"] = 2.0
    cfg = write_config(tmp_path, doc)
    assert lsflow("run", "--config", cfg, "--out", str(tmp_path / "a")).returncode == 1
    assert lsflow("run", "--config", cfg, "--out", str(tmp_path / "b"), "--force").returncode == 0
    assert lsflow("check", "--config", cfg).returncode == 1
    assert lsflow("check", "--preset", "example4").returncode == 0

    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "name": "x",\n  "K": ,\n}\n')
    out = lsflow("run", "--config", str(bad))
    assert out.returncode == 2
    assert "line 3" in out.stderr

    doc = preset("example1-le1")
    doc["graphs"][0]["nodes"] = 0
    out = lsflow("run", "--config", write_config(tmp_path, doc, "zero.json"))
    assert out.returncode == 2
    assert "/graphs/0/nodes" in out.stderr

    assert lsflow("run", "--preset", "nope").returncode == 2
    assert lsflow("run").returncode == 2



def test_divergence_exit_code(tmp_path):
    # states near the double range overflow on the first step
    doc = preset("example1-le1")
    doc["x0"] = [1e308, -1e308] * 4
    doc["horizon"] = 1.0
    doc["record"] = {"points": 10, "t_min": 0.1}
    out = lsflow("run", "--config", write_config(tmp_path, doc), "--out", str(tmp_path / "d"))
    assert out.returncode == 3
    assert "diverged" in out.stderr


def test_analyze(tmp_path):
    t = np.geomspace(1, 1e4, 200)
    csv = tmp_path / "s.csv"
    csv.write_text("t,value\n" + "".join(f"{float(a)!r},{float(2 * a ** -0.5)!r}\n" for a in t))
    out = lsflow("analyze", str(csv))
    assert out.returncode == 0, out.stderr
    fit = json.loads(out.stdout)
    assert fit["slope"] == pytest.approx(-0.5, abs=1e-9)
    assert fit["t_lo"] == pytest.approx(100.0)
    assert set(fit) == {"slope", "intercept", "t_lo", "t_hi", "rms_residual"}

    zero = tmp_path / "z.csv"
    zero.write_text("t,value\n" + "".join(f"{float(a)!r},0\n" for a in t))
    assert lsflow("analyze", str(zero)).returncode == 2
    assert lsflow("analyze", str(tmp_path / "missing.csv")).returncode == 2


def test_repeated_runs_are_byte_identical(tmp_path):
    for d in ("a", "b"):
        out = lsflow("run", "--preset", "example4", "--horizon", "200", "--out", str(tmp_path / d))
        assert out.returncode == 0, out.stderr
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert "trajectory.csv" in names
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    text = (tmp_path / "a" / "trajectory.csv").read_bytes()
    assert b"\r" not in text
    assert text.splitlines()[0].decode() == "t," + ",".join(
        f"x_{i}_{d}" for i in range(1, 6) for d in (1, 2))
