import json
import subprocess
import sys

import pytest

from discflux.cli import ExperimentSpec, SpecError, main, run

EX72 = ["inviscid", "--example", "ex72", "--domain", "-4", "4", "--h", "1e-3", "--refined"]


def manifest(out):
    return json.loads((out / "manifest.json").read_text())


def test_resolvent_zero_data(tmp_path):
    out = tmp_path / "z"
    code = main(["resolvent", "--flux", "traffic", "--domain", "-2", "2", "--h", "0.01",
                 "--data", "zero", "--lam", "0.1", "--eps", "0.1", "--out", str(out)])
    assert code == 0
    rows = (out / "profile.csv").read_text().splitlines()[1:]
    assert all(float(r.split(",")[1]) == 0.0 for r in rows)


def test_inviscid_example_writes_jump_records(tmp_path):
    out = tmp_path / "ex72"
    assert main(EX72 + ["--out", str(out), "--gnuplot"]) == 0
    jumps = json.loads((out / "jumps.json").read_text())
    assert [j["verdict"] for j in jumps] == ["admissible_case4", "admissible_case1"]
    m = manifest(out)
    for name in m["files"]:
        assert (out / name).exists()
    assert {"profile.csv", "jumps.json", "convergence.csv", "plot.gp"} <= set(m["files"])
    assert len(m["input_sha256"]) == 64


def test_runs_are_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(EX72 + ["--out", str(a)]) == 0
    assert main(EX72 + ["--out", str(b)]) == 0
    for name in ("profile.csv", "jumps.json", "convergence.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_config_file_round_trip(tmp_path):
    spec = {"name": "bump", "action": "evolve", "flux": "traffic_jump",
            "grid": {"x_min": -3, "x_max": 3, "h": 0.01},
            "data": {"shape": "bump", "height": 0.8},
            "params": {"t": 0.5, "n": 4, "mode": "viscous:0.05", "snapshots": [0.25]}}
    cfg = tmp_path / "spec.json"
    cfg.write_text(json.dumps(spec))
    out = tmp_path / "run"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    m = manifest(out)
    assert m["spec"]["params"] == spec["params"]
    assert "telemetry.csv" in m["files"]
    assert any(f.startswith("snapshot_t") for f in m["files"])


def test_sweep_and_diagnose(tmp_path):
    out = tmp_path / "sw"
    assert main(["sweep", "--flux", "traffic", "--domain", "-3", "3", "--h", "0.01", "--data", "bump",
                 "--kind", "cl", "--t", "0.5", "--n-list", "2,4,8", "--mode", "viscous:0.1",
                 "--out", str(out)]) == 0
    assert (out / "convergence.csv").read_text().count("\n") == 3
    out = tmp_path / "acc"
    assert main(["diagnose", "accretivity", "--gamma", "1.0", "--lam", "0.5", "--out", str(out)]) == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["ratio"] == pytest.approx(5 / 6)


def test_invalid_input_exit_code(tmp_path, capsys):
    assert main(["resolvent", "--flux", "nope", "--out", str(tmp_path / "x")]) == 2
    assert "invalid input" in capsys.readouterr().err
    with pytest.raises(SpecError):
        ExperimentSpec.from_dict({"action": "fly"})


def test_nonconvergence_exit_code(tmp_path):
    code = main(["inviscid", "--example", "case3", "--domain", "-3", "3", "--h", "0.01",
                 "--cauchy-tol", "1e-12", "--out", str(tmp_path / "nc")])
    assert code == 3


def test_io_failure_exit_code(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["diagnose", "accretivity", "--out", str(blocker / "sub")]) == 4
    assert main(["resolvent", "--flux", "traffic", "--csv", str(tmp_path / "missing.csv"),
                 "--lam", "0.1", "--eps", "0.1", "--out", str(tmp_path / "m")]) == 4


def test_run_returns_report(tmp_path):
    spec = ExperimentSpec.from_dict({"action": "diagnose", "params": {"kind": "twave", "eps": 0.1},
                                     "flux": "burgers_shifted", "outputs": str(tmp_path / "tw")})
    rep = run(spec)
    assert rep.exit_code == 0 and "report.json" in rep.files


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "discflux", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip()
