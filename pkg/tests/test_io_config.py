import io

import numpy as np
import pytest

from ramanujan_stability.config import ConfigError, RunConfig, apply_overrides, parse_config
from ramanujan_stability.io import (
    fmt,
    read_discrete_csv,
    read_sequence_csv,
    read_table_csv,
    write_discrete_csv,
    write_events_csv,
    write_hybrid_csv,
    write_sequence_csv,
)
from ramanujan_stability.simulators import (
    HybridSystem,
    TraceConfig,
    euclidean_trace,
    example1_system,
    hybrid_ramanujan_trace,
    ramanujan_trace,
    simulate_discrete,
    simulate_hybrid,
)
from ramanujan_stability.space import FiniteSequence


def test_parse_basic():
    cfg = parse_config("q = 5\nr = 0.5\nM = 0.1")
    assert (cfg.q, cfg.r, cfg.M) == (5, 0.5, 0.1)


def test_parse_empty_gives_defaults():
    cfg = parse_config("")
    assert cfg == RunConfig()
    assert cfg.q == 5 and cfg.lam is None and cfg.x0 == [1.0, 1.0]
    assert cfg.K == 200 and cfg.T == 50.0 and cfg.h == 0.05
    assert cfg.disturbance == "prime" and cfg.dist_vector == [0.0, 0.5]
    assert cfg.window is None and cfg.mode == "abs" and cfg.seed == 0


def test_parse_range_error_message():
    with pytest.raises(ConfigError) as err:
        parse_config("r = 1.5")
    assert err.value.messages == ["r out of range (0,1) at line 1"]


def test_parse_reports_every_bad_line():
    text = "# header\nq = 5\nbogus = 1\nK = ten\n\nlambda = 0   # too small\nnot a pair\n"
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    msgs = err.value.messages
    assert len(msgs) == 4
    assert "unknown key 'bogus' at line 3" in msgs
    assert any(m.startswith("malformed value for K") and m.endswith("at line 4") for m in msgs)
    assert "lambda out of range (0,1] at line 6" in msgs
    assert "expected 'key = value' at line 7" in msgs


def test_keys_are_case_sensitive():
    with pytest.raises(ConfigError):
        parse_config("Q = 5")


def test_parse_comments_vectors_and_matrix():
    cfg = parse_config("x0 = 2, -1  # start\nwindow = unbounded\nsystem = custom\nA = 0.5,0;0,0.5\nlambda = 1")
    assert cfg.x0 == [2.0, -1.0]
    assert cfg.window is None
    assert cfg.A == [[0.5, 0.0], [0.0, 0.5]]
    assert cfg.lam == 1.0


def test_cross_checks():
    with pytest.raises(ConfigError, match="needs both m and r0"):
        parse_config("disturbance = residue")
    with pytest.raises(ConfigError, match=r"r0 out of range"):
        parse_config("disturbance = residue\nm = 4\nr0 = 4")
    with pytest.raises(ConfigError, match="needs a matrix"):
        parse_config("system = custom")
    assert parse_config("disturbance = residue\nm = 4\nr0 = 1").m == 4


def test_overrides_win_and_do_not_mutate():
    base = parse_config("q = 7\nK = 10")
    cfg = apply_overrides(base, {"q": "3"})
    assert cfg.q == 3 and cfg.K == 10
    assert base.q == 7
    with pytest.raises(ConfigError, match="command line"):
        apply_overrides(base, {"q": "0"})


def test_fmt_round_trips_doubles(rng):
    for v in rng.normal(size=200) * 10.0 ** rng.integers(-30, 30, size=200):
        assert float(fmt(v)) == v
    assert fmt(0.1) == "0.10000000000000001"
    assert fmt(1.0) == "1"


def test_sequence_csv_round_trip(tmp_path):
    seq = FiniteSequence(-3, np.array([0.1, 0.0, 2.5, -1e-300]))
    path = tmp_path / "seq.csv"
    write_sequence_csv(seq, path)
    raw = path.read_bytes()
    assert raw.startswith(b"n,value\n") and b"\r" not in raw
    back = read_sequence_csv(path)
    assert back.offset == -3 and np.array_equal(back.values, seq.values)


def test_sequence_csv_gaps_are_zero():
    seq = read_sequence_csv(io.StringIO("n,value\n5,1\n2,3\n"))
    assert seq.offset == 2
    assert seq.values.tolist() == [3.0, 0.0, 0.0, 1.0]


@pytest.mark.parametrize(
    "text, needle",
    [
        ("x,y\n1,2\n", "header"),
        ("n,value\n1,abc\n", "line 2"),
        ("n,value\n1,2\n1,3\n", "line 3"),
        ("n,value\n1.5,2\n", "line 2"),
    ],
)
def test_sequence_csv_errors(text, needle):
    with pytest.raises(ValueError, match=needle):
        read_sequence_csv(io.StringIO(text))


def test_discrete_csv_round_trip_recomputes_traces(tmp_path):
    traj = simulate_discrete(example1_system(), (1, 1), 200)
    cfg = TraceConfig(5, 0.9)
    eu, ra = euclidean_trace(traj), ramanujan_trace(traj, cfg)
    path = tmp_path / "traj.csv"
    write_discrete_csv(traj, eu, ra, path)
    raw = path.read_bytes()
    assert raw.splitlines()[0] == b"k,x1,x2,euclid,ramanujan,clamped"
    assert b"\r\n" not in raw and len(raw.splitlines()) == 202
    back, euc, ram, clamped = read_discrete_csv(path)
    assert np.array_equal(back.states, traj.states)
    assert np.array_equal(euclidean_trace(back).value, euc)
    assert np.array_equal(ramanujan_trace(back, cfg).value, ram)
    assert np.array_equal(ramanujan_trace(back, cfg).clamped, clamped)
    assert np.array_equal(euc, eu.value) and np.array_equal(ram, ra.value)


def test_hybrid_and_event_csv(tmp_path):
    traj = simulate_hybrid(HybridSystem(T=10))
    eu, ra = euclidean_trace(traj), hybrid_ramanujan_trace(traj)
    buf = io.StringIO()
    write_hybrid_csv(traj, eu, ra, buf)
    header, data = read_table_csv(io.StringIO(buf.getvalue()))
    assert header == ["t", "j", "x1", "x2", "euclid", "ramanujan", "clamped"]
    assert np.array_equal(data[:, 2:4], traj.states)
    assert np.array_equal(data[:, 5], ra.value)
    path = tmp_path / "events.csv"
    write_events_csv(traj, path)
    header, ev = read_table_csv(path)
    assert header == ["t", "x1_pre", "x2_pre", "x1_post", "x2_post", "dV"]
    assert ev[:, 0].tolist() == [2.0, 3.0, 5.0, 7.0]
    assert np.allclose(ev[:, 5], -0.32 * ev[:, 2] ** 2, atol=1e-12)


def test_read_discrete_rejects_other_tables():
    with pytest.raises(ValueError):
        read_discrete_csv(io.StringIO("t,j,x1\n0,0,1\n"))
