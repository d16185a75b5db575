import subprocess
import sys

import numpy as np
import pytest

from ramanujan_stability.cli import dispatch
from ramanujan_stability.io import read_discrete_csv, read_table_csv
from ramanujan_stability.simulators import TraceConfig, euclidean_trace, ramanujan_trace


def run(capsys, *argv):
    code = dispatch(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_rsum_row(capsys):
    assert run(capsys, "rsum", "--q", "5") == (0, "4,-1,-1,-1,-1\n", "")


def test_rsum_table(capsys):
    code, out, _ = run(capsys, "rsum", "--q", "4", "--n-max", "4")
    assert code == 0
    assert out.splitlines() == ["q,0,1,2,3,4", "1,1,1,1,1,1", "2,1,-1,1,-1,1", "3,2,-1,-1,2,-1", "4,2,0,-2,0,2"]


def test_gain_stable(capsys):
    code, out, _ = run(capsys, "gain", "--q", "5", "--M", "0.1", "--r", "0.5", "--mode", "abs", "--assert-stable")
    assert code == 0
    rows = dict(line.split(",", 1) for line in out.splitlines())
    assert abs(float(rows["G"]) - 0.10194) <= 1e-5
    assert rows["stable"] == "true"


def test_gain_unstable(capsys):
    code, out, _ = run(capsys, "gain", "--q", "5", "--M", "1", "--r", "0.9", "--mode", "abs", "--assert-stable")
    assert code == 1
    rows = dict(line.split(",", 1) for line in out.splitlines())
    assert float(rows["G"]) == pytest.approx(3.465, abs=1e-3)
    assert rows["stable"] == "false"


def test_gain_unstable_without_assert_is_ok(capsys):
    assert run(capsys, "gain", "--q", "5", "--M", "1", "--r", "0.9")[0] == 0


def test_gain_bad_input(capsys):
    assert run(capsys, "gain", "--q", "5", "--M", "1", "--r", "1.5")[0] == 2


@pytest.mark.parametrize("argv", [["frobnicate"], [], ["rsum"], ["rsum", "--q", "x"], ["rsum", "--q", "0"]])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert "usage" in err or "must be" in err


def test_norm(capsys, tmp_path):
    path = tmp_path / "s.csv"
    path.write_text("n,value\n0,1\n1,2\n")
    code, out, _ = run(capsys, "norm", "--input", str(path), "--Q", "3")
    assert code == 0
    rows = dict(line.split(",") for line in out.splitlines())
    assert rows["clamped"] == "false" and float(rows["value"]) > 0


def test_norm_negative_form(capsys, tmp_path):
    path = tmp_path / "s.csv"
    path.write_text("n,value\n1,1\n")
    code, _, err = run(capsys, "norm", "--input", str(path), "--Q", "5")
    assert code == 1 and "--clamp" in err
    code, out, _ = run(capsys, "norm", "--input", str(path), "--Q", "5", "--clamp")
    assert code == 0 and out.splitlines() == ["value,0", "clamped,true"]


def test_norm_missing_file(capsys, tmp_path):
    assert run(capsys, "norm", "--input", str(tmp_path / "nope.csv"), "--Q", "3")[0] == 2


def test_project(capsys, tmp_path):
    path = tmp_path / "s.csv"
    path.write_text("n,value\n0,4\n1,-1\n2,-1\n3,-1\n4,-1\n")
    code, out, _ = run(capsys, "project", "--input", str(path), "--period", "5", "--D", "5")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "d,alpha,phi_d"
    alpha = {int(r.split(",")[0]): float(r.split(",")[1]) for r in lines[1:]}
    assert alpha[5] == pytest.approx(1.0, abs=1e-12)
    assert all(abs(alpha[d]) <= 1e-12 for d in (1, 2, 3, 4))
    assert lines[-1].endswith(",4")
    assert run(capsys, "project", "--input", str(path), "--period", "4", "--D", "5")[0] == 2


def test_simulate_discrete_files(capsys, tmp_path):
    out = tmp_path / "traj.csv"
    code, summary, _ = run(capsys, "simulate-discrete", "--out", str(out))
    assert code == 0 and "steps,200" in summary
    traj, eu, ra, clamped = read_discrete_csv(out)
    assert traj.states.shape == (201, 2)
    assert np.array_equal(ramanujan_trace(traj, TraceConfig(5, 0.9)).value, ra)
    assert np.array_equal(euclidean_trace(traj).value, eu)


def test_simulate_discrete_config_and_flags(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("K = 20\nq = 3\ndisturbance = zero\n")
    code, out, _ = run(capsys, "simulate-discrete", "--config", str(cfg), "--K", "5", "--set", "x0=2,0")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 7
    assert lines[1].startswith("0,2,0,2,")


def test_simulate_discrete_custom_and_overflow(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("system = custom\nA = 3,0;0,3\ndisturbance = zero\nK = 40\n")
    code, _, err = run(capsys, "simulate-discrete", "--config", str(cfg))
    assert code == 1 and "error" in err


def test_simulate_discrete_config_error(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("r = 1.5\n")
    code, _, err = run(capsys, "simulate-discrete", "--config", str(cfg))
    assert code == 2 and "r out of range (0,1) at line 1" in err


def test_simulate_hybrid_files(capsys, tmp_path):
    out, ev = tmp_path / "h.csv", tmp_path / "e.csv"
    code, summary, _ = run(capsys, "simulate-hybrid", "--out", str(out), "--events", str(ev))
    assert code == 0
    assert "jumps,15" in summary and "flow_check,true" in summary and "jump_check,true" in summary
    header, data = read_table_csv(out)
    assert header[:2] == ["t", "j"] and data.shape == (1001, 7)
    _, events = read_table_csv(ev)
    assert events.shape == (15, 6)


def test_filter_demo(capsys):
    code, out, _ = run(capsys, "filter-demo", "--m", "4", "--r0", "1", "--q", "4", "--horizon", "5")
    assert code == 0
    csv_part = out.split("\n\n", 1)[1].splitlines()
    assert csv_part[0] == "j,n,weight"
    assert [r.split(",")[2] for r in csv_part[1:]] == ["0"] * 6
    assert run(capsys, "filter-demo", "--m", "4", "--r0", "4", "--q", "4")[0] == 2


def test_verify_output_matches_exit_code(capsys):
    code, out, _ = run(capsys, "verify", "--fast")
    lines = out.splitlines()
    statuses = [line.split()[0] for line in lines[:-1]]
    assert set(statuses) <= {"PASS", "FAIL"}
    assert code == (0 if "FAIL" not in statuses else 1)
    passed = statuses.count("PASS")
    assert lines[-1] == f"{passed}/{len(statuses)} checks passed"


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "ramanujan_stability.cli", "rsum", "--q", "6"], capture_output=True, text=True
    )
    assert proc.returncode == 0 and proc.stdout == "2,1,-1,-2,-1,1\n"


def test_deterministic_output(capsys):
    a = run(capsys, "simulate-hybrid", "--T", "5")[1]
    b = run(capsys, "simulate-hybrid", "--T", "5")[1]
    assert a == b
