import json
import os
import subprocess
import sys

import pytest

PKG_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def run_cli(*args, cwd=None, env_extra=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "concentra", *args],
        capture_output=True, text=True, cwd=cwd or PKG_ROOT, env=env)


def test_rho_table(tmp_path):
    out = tmp_path / "rho.csv"
    res = run_cli("rho", "--poly", "x^2+1", "--max", "100", "--out", str(out))
    assert res.returncode == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "p,nu,rho,bound1_ok,bound2_applies,bound2_ok"
    primes = {int(line.split(",")[0]) for line in lines[1:]}
    assert len(primes) == 25


def test_rho_empty_table(tmp_path):
    out = tmp_path / "rho.csv"
    res = run_cli("rho", "--poly", "x^2+1", "--max", "1", "--out", str(out))
    assert res.returncode == 0
    assert out.read_text().strip().splitlines() == [
        "p,nu,rho,bound1_ok,bound2_applies,bound2_ok"]


def test_bad_polynomial_exits_2():
    res = run_cli("rho", "--poly", "x^^2", "--max", "10")
    assert res.returncode == 2
    assert "parse error" in res.stderr


def test_efx_json():
    res = run_cli("efx", "--f", "omega", "--x", "1e2")
    assert res.returncode == 0
    payload = json.loads(res.stdout)
    assert payload["weight"] == "unit"
    assert abs(payload["value"] - 2.8028) < 2e-4


def test_concentration_files(tmp_path):
    prefix = str(tmp_path / "run")
    res = run_cli("concentration", "--family", "x;x+1", "--f", "omega;omega",
                  "--x", "10", "--y", "10", "--out-prefix", prefix)
    assert res.returncode == 0
    table = (tmp_path / "run_table.csv").read_text().splitlines()
    assert table[0] == "k_1,k_2,count"
    rows = {tuple(line.split(",")) for line in table[1:]}
    assert ("1", "2", "4") in rows
    report = json.loads((tmp_path / "run_report.json").read_text())
    assert report["sup"] == 4 and report["arg"] == [1, 2]


def test_concentration_empty_warns(tmp_path):
    prefix = str(tmp_path / "empty")
    res = run_cli("concentration", "--family", "x", "--f", "omega",
                  "--x", "10", "--y", "0", "--out-prefix", prefix)
    assert res.returncode == 0
    assert "warning" in res.stderr
    assert (tmp_path / "empty_table.csv").read_text().strip() == "k_1,count"


def test_lower_target_json():
    res = run_cli("lower-target", "--family", "x", "--yj", "100",
                  "--x", "1e6", "--ystar-exponent", "0.3")
    assert res.returncode == 0
    payload = json.loads(res.stdout)
    assert payload["k"] == [0]
    assert payload["ystars"][0] == pytest.approx(63.0957, abs=1e-3)


def test_lower_target_range_error_exit_1():
    res = run_cli("lower-target", "--family", "x", "--yj", "100", "--x", "1e6")
    assert res.returncode == 1
    assert "error" in res.stderr


def test_verify_star_pass_and_determinism(tmp_path):
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    r1 = run_cli("verify", "star", "--out", str(out1))
    r2 = run_cli("verify", "star", "--out", str(out2))
    assert r1.returncode == 0 and r2.returncode == 0
    assert out1.read_bytes() == out2.read_bytes()
    payload = json.loads(out1.read_text())
    assert payload["passed"] is True


def test_verify_failure_exit_code(tmp_path):
    out = tmp_path / "fail.json"
    res = run_cli("verify", "upper", "--family", "x", "--f", "omega",
                  "--decades", "3,4", "--band", "1.0000001",
                  "--out", str(out))
    assert res.returncode == 1
    payload = json.loads(out.read_text())
    assert payload["passed"] is False


def test_config_file_merge(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("f=omega\nx=1e2\n")
    res = run_cli("efx", "--config", str(cfg))
    assert res.returncode == 0
    assert abs(json.loads(res.stdout)["value"] - 2.8028) < 2e-4
    # explicit flags win over the file
    res2 = run_cli("efx", "--config", str(cfg), "--f", "omega_y:1")
    assert json.loads(res2.stdout)["value"] == 1.0


def test_charsum_and_friable():
    res = run_cli("charsum", "--f", "omega", "--x", "10", "--y", "10",
                  "--t", "0,0.5")
    rows = json.loads(res.stdout)["rows"]
    assert rows[0]["re"] == pytest.approx(10.0)
    assert rows[1]["re"] == pytest.approx(-4.0, abs=1e-9)
    res2 = run_cli("friable", "--x", "10", "--y", "2", "--values")
    assert json.loads(res2.stdout)["values"] == [1, 2, 4, 8]


def test_threads_env_accepted():
    res = run_cli("efx", "--f", "omega", "--x", "1e2",
                  env_extra={"CONCENTRA_THREADS": "4"})
    assert res.returncode == 0
