import json
import subprocess
import sys

import numpy as np
import pytest

from razavy_qes.cli import emit_csv, emit_json, run


def _run(tmp_path, *argv, name="out"):
    out = tmp_path / name
    code = run(list(argv) + ["--output", str(out)])
    return code, out


def test_poly_json(tmp_path):
    code, out = _run(tmp_path, "poly", "--M", "4", "--zeta", "1", "--family", "tilde", "--k", "4", "--format", "json")
    assert code == 0
    data = json.loads(out.read_text())
    polys = data["polynomials"]
    assert [p["degree"] for p in polys] == [0, 1, 2, 3, 4]
    assert polys[4]["coefficients"][0] == 12432
    assert all(p["coefficients"][-1] == 1 for p in polys)


def test_spectrum_m1(tmp_path, capsys):
    code, out = _run(tmp_path, "spectrum", "--M", "1", "--zeta", "1", "--family", "tilde")
    assert code == 0
    assert json.loads(out.read_text())["energies"] == [2.0]
    assert "energies 2" in capsys.readouterr().out


def test_spectrum_csv_header(tmp_path):
    code, out = _run(tmp_path, "spectrum", "--M", "3", "--zeta", "1", "--format", "csv")
    lines = out.read_bytes().split(b"\n")
    assert code == 0 and lines[0] == b"index,energy" and len(lines) == 5 and lines[-1] == b""


def test_verify_passes(tmp_path, capsys):
    code, out = _run(tmp_path, "verify", "--M", "5", "--zeta", "1")
    assert code == 0
    text = capsys.readouterr().out
    assert "FAIL" not in text and "checks passed" in text
    assert json.loads(out.read_text())["passed"] is True


def test_verify_reports_failure(tmp_path):
    # an absurdly small plane-wave basis makes the Floquet oracle refuse
    code, out = _run(tmp_path, "verify", "--M", "6", "--zeta", "2", "--K", "3")
    assert code == 2
    assert json.loads(out.read_text())["passed"] is False


def test_sweep_csv_header(tmp_path):
    code, out = _run(tmp_path, "sweep", "--M", "5", "--zeta-min", "0.5", "--zeta-max", "1.5",
                     "--zeta-points", "3", "--format", "csv")
    lines = out.read_text().splitlines()
    assert code == 0 and lines[0] == "zeta,band,edge_lo,edge_hi,lo_tag,hi_tag" and len(lines) == 16


def test_jobs_do_not_change_artifact(tmp_path, monkeypatch):
    args = ("sweep", "--M", "4", "--zeta-min", "0.2", "--zeta-max", "2", "--zeta-points", "6")
    _, a = _run(tmp_path, *args, "--jobs", "1", name="a")
    monkeypatch.setenv("RAZAVY_QES_JOBS", "3")
    _, b = _run(tmp_path, *args, name="b")
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("cmd", [
    ["poly", "--M", "4", "--zeta", "1", "--family", "hat", "--branch", "eta=+1"],
    ["spectrum", "--M", "5", "--zeta", "2", "--periodic"],
    ["moments", "--M", "4", "--zeta", "1", "--family", "hat", "--branch", "eta=-1"],
    ["wavefunction", "--M", "4", "--zeta", "1", "--periodic", "--index", "2"],
    ["wavefunction", "--M", "3", "--zeta", "1", "--family", "hat", "--branch", "sigma=+1"],
    ["bands", "--M", "4", "--zeta", "1"],
])
@pytest.mark.parametrize("fmt", ["json", "csv"])
def test_artifacts_reproducible(tmp_path, cmd, fmt):
    c1, a = _run(tmp_path, *cmd, "--format", fmt, name="a")
    c2, b = _run(tmp_path, *cmd, "--format", fmt, name="b")
    assert c1 == c2 == 0
    assert a.read_bytes() == b.read_bytes()
    assert b"\r" not in a.read_bytes()


def test_bands_json(tmp_path):
    code, out = _run(tmp_path, "bands", "--M", "5", "--zeta", "1")
    data = json.loads(out.read_text())
    assert code == 0 and data["gap_indices"] == [2, 4] and data["includes_ground_state"] is True


def test_moments_weights_sum(tmp_path):
    code, out = _run(tmp_path, "moments", "--M", "6", "--zeta", "1")
    data = json.loads(out.read_text())
    assert code == 0 and sum(data["weights"]) == pytest.approx(1.0)


def test_wavefunction_real_default(tmp_path):
    code, out = _run(tmp_path, "wavefunction", "--M", "4", "--zeta", "1", "--periodic", "--points", "65")
    data = json.loads(out.read_text())
    assert code == 0 and data["form"] in ("ee", "eo") and max(map(abs, data["im"])) == 0


@pytest.mark.parametrize("argv", [
    ["spectrum", "--M", "0", "--zeta", "1"],
    ["spectrum", "--M", "2", "--zeta", "-1"],
    ["spectrum", "--M", "2"],
    ["spectrum", "--zeta", "1"],
    ["spectrum", "--M", "4", "--zeta", "1", "--family", "hat"],
    ["spectrum", "--M", "4", "--zeta", "1", "--family", "hat", "--branch", "sigma=+1"],
    ["wavefunction", "--M", "4", "--zeta", "1", "--index", "9"],
    ["wavefunction", "--M", "4", "--zeta", "1", "--periodic", "--form", "oe"],
    ["nonsense"],
    ["spectrum", "--M", "two", "--zeta", "1"],
])
def test_validation_errors_exit_1(tmp_path, argv):
    assert run(argv + ["--output", str(tmp_path / "x")]) == 1


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nM = 2\nzeta = 1\nformat = csv\nperiodic = true\n")
    code, out = _run(tmp_path, "spectrum", "--config", str(cfg))
    assert code == 0
    assert out.read_text().splitlines()[1:] == ["0,-6", "1,-2"]
    code, out = _run(tmp_path, "spectrum", "--config", str(cfg), "--M", "1", name="o")
    assert out.read_text().splitlines()[1:] == ["0,-2"]
    bad = tmp_path / "bad.cfg"
    bad.write_text("M 2\n")
    assert run(["spectrum", "--config", str(bad)]) == 1


def test_emitters():
    rec = {"b": [1.0, 0.1, float("nan")], "a": {"y": True, "x": "s"}}
    text = emit_json(rec).decode()
    assert text.index('"a"') < text.index('"b"')
    assert "0.10000000000000001" in text and "null" in text
    assert emit_json(rec) == emit_json(dict(reversed(list(rec.items()))))
    assert emit_csv(("index", "energy"), [(0, 2.0)]) == b"index,energy\n0,2\n"
    assert float(emit_csv(("v",), [(np.pi,)]).split(b"\n")[1]) == np.pi


def test_module_entry_point(tmp_path):
    out = tmp_path / "s.json"
    proc = subprocess.run([sys.executable, "-m", "razavy_qes", "spectrum", "--M", "2", "--zeta", "1",
                           "--output", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(out.read_text())["energies"] == pytest.approx([2.0, 6.0])
