import json
import subprocess
import sys

import pytest

from uavcpn.cli import EXIT_COMPARE, EXIT_CONFIG, EXIT_OK, main
from uavcpn.sweep import read_csv


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_default(capsys):
    code, out, _ = run(capsys, "analyze")
    assert code == EXIT_OK
    assert out.startswith("average_success_probability = ")
    assert "service_radius_m" in out


def test_analyze_json_diagnostics(capsys):
    code, out, _ = run(capsys, "analyze", "--json", "--set", "uav_altitude_m=300", "--set", "cn_dist_radius_m=200")
    doc = json.loads(out)
    assert doc["average_success_probability"] == pytest.approx(0.4665, abs=1e-4)
    assert [p["r_u_m"] for p in doc["points"]] == [0.0, 100.0, 200.0]
    assert doc["converged"] is True


def test_analyze_zero_density(capsys):
    code, out, _ = run(capsys, "analyze", "--json", "--set", "cn_density_per_km2=0")
    assert json.loads(out)["average_success_probability"] == 0.0


def test_malformed_config_names_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("bandwidth_mhz = eight\n")
    code, _, err = run(capsys, "analyze", "--config", str(cfg))
    assert code == EXIT_CONFIG
    assert "bandwidth_mhz" in err


def test_missing_config_file(capsys):
    code, _, err = run(capsys, "analyze", "--config", "/nonexistent/x.cfg")
    assert code == EXIT_CONFIG


def test_config_env_var(tmp_path, monkeypatch, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("cn_density_per_km2 = 0  # nothing to offload to\n")
    monkeypatch.setenv("UAVCPN_CONFIG", str(cfg))
    code, out, _ = run(capsys, "analyze", "--json")
    assert json.loads(out)["average_success_probability"] == 0.0


def test_simulate_byte_identical(capsys):
    argv = ["simulate", "--trials", "200", "--gus", "30", "--seed", "42", "--set", "uav_altitude_m=1000"]
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    parallel = run(capsys, *argv, "--jobs", "2")
    assert first == second
    assert first[1] == parallel[1]
    assert "seed = 42" in first[1]


def test_simulate_zero_density(capsys):
    code, out, _ = run(capsys, "simulate", "--json", "--trials", "20", "--set", "cn_density_per_km2=0")
    assert json.loads(out)["mean"] == 0.0


def test_compare_exit_codes(capsys):
    code, out, _ = run(capsys, "compare", "--altitudes", "100:1000:3", "--trials", "300", "--gus", "50",
                       "--set", "cn_density_per_km2=0")
    assert code == EXIT_OK and "3/3 altitudes pass" in out
    # failing row injected to exercise the exit-code path
    from uavcpn import cli
    from uavcpn.sweep import CompareRow

    orig = cli.compare
    cli.compare = lambda *a, **k: [CompareRow(100.0, 0.9, 0.5, 0.001, 0.4, False)]
    try:
        code, out, _ = run(capsys, "compare")
    finally:
        cli.compare = orig
    assert code == EXIT_COMPARE and "FAIL" in out


def test_sweep_writes_csv_and_json(tmp_path, capsys):
    out, js = tmp_path / "s.csv", tmp_path / "s.json"
    code, _, _ = run(capsys, "sweep", "--axis", "altitude:100:1000:19", "--output", str(out), "--json-output", str(js))
    assert code == EXIT_OK
    comments, rows = read_csv(out.read_text())
    assert len(rows) == 19 and all(r["theory_prob"] is not None for r in rows)
    assert len(json.loads(js.read_text())["rows"]) == 19


def test_sweep_unwritable_output(capsys):
    code, _, err = run(capsys, "sweep", "--axis", "altitude:100:200:2", "--output", "/nonexistent/dir/x.csv")
    assert code == EXIT_CONFIG


def test_sweep_bad_axis(capsys):
    code, _, err = run(capsys, "sweep", "--axis", "height:1:2:2")
    assert code == EXIT_CONFIG and "height" in err


def test_sweep_nonconvergence_exit_code(monkeypatch, capsys):
    from uavcpn import cli

    real = cli.run_sweep

    def flaky(*a, **k):
        recs = real(*a, **k)
        recs[0].converged = False
        return recs

    monkeypatch.setattr(cli, "run_sweep", flaky)
    code, _, _ = run(capsys, "sweep", "--axis", "altitude:100:200:2")
    assert code == cli.EXIT_QUADRATURE


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "uavcpn", "analyze", "--json", "--set", "cn_density_per_km2=0"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["average_success_probability"] == 0.0
