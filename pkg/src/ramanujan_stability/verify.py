"""Built-in invariant suite behind ``rstab verify``.

Each check returns ``(passed, detail)``. ``fast`` shrinks the sweep sizes
but keeps every check.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import arithmetic as ar
from . import certificates as cert
from . import simulators as sim
from . import space as sp


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _sums(fast: bool):
    qmax = 60 if fast else 200
    bad = [
        (q, n)
        for q in range(1, qmax + 1)
        for n in range(q)
        if ar.ramanujan_sum(q, n) != ar.ramanujan_sum_direct(q, n)
    ]
    return not bad, f"q <= {qmax}: {len(bad)} mismatches"


def _row_properties(fast: bool):
    qmax = 60 if fast else 200
    for q in range(1, qmax + 1):
        row = ar.ramanujan_row(q)
        phi = ar.totient(q)
        if row.values[0] != phi or sum(row) != (1 if q == 1 else 0):
            return False, f"row invariant broken at q={q}"
        if max(abs(v) for v in row) > phi:
            return False, f"|c_q| > phi(q) at q={q}"
        mu = ar.moebius(q)
        if any(row[n] != mu for n in range(q) if math.gcd(n, q) == 1):
            return False, f"coprime specialization broken at q={q}"
    for q1 in range(1, 21):
        for q2 in range(1, 21):
            if math.gcd(q1, q2) != 1:
                continue
            for n in range(q1 * q2):
                if ar.ramanujan_sum(q1 * q2, n) != ar.ramanujan_sum(q1, n) * ar.ramanujan_sum(q2, n):
                    return False, f"multiplicativity broken at {q1},{q2},{n}"
    return True, f"rows q <= {qmax}, multiplicativity q1,q2 <= 20"


def _orthogonality(fast: bool):
    dmax = 30
    for d in range(1, dmax + 1):
        for e in range(1, dmax + 1):
            expected = ar.totient(d) if d == e else 0
            if sp.orthogonality_average(d, e) != expected:
                return False, f"d={d}, e={e}"
    return True, f"exact for d, e <= {dmax}"


def _parseval(fast: bool):
    rng = np.random.default_rng(1)
    D = 10
    L = sp.lcm_range(D)
    trials = 5 if fast else 20
    worst = 0.0
    for _ in range(trials):
        alpha = sp.RamanujanCoefficients({d: rng.normal() for d in range(1, D + 1) if rng.random() < 0.7})
        period = np.array([sp.reconstruct(alpha, n) for n in range(L)])
        back = sp.project_coefficients(sp.FiniteSequence(0, period), D)
        worst = max(worst, max(abs(back[d] - alpha[d]) for d in range(1, D + 1)))
    return worst <= 1e-9, f"max coefficient error {worst:.3e}"


def _domination(fast: bool):
    rng = np.random.default_rng(2)
    count = 100 if fast else 1000
    Qs = range(1, 51, 7) if fast else range(1, 51)
    worst = -math.inf
    for _ in range(count):
        length = int(rng.integers(1, 30))
        seq = sp.FiniteSequence(int(rng.integers(-20, 20)), rng.normal(size=length))
        l2 = seq.l2_norm()
        forms = sp.truncated_inner_profile(seq, seq, 50)
        for Q in Qs:
            worst = max(worst, float(np.sqrt(max(forms[Q - 1], 0.0))) - l2)
    return worst <= 1e-12, f"max(|x|_R - |x|_2) = {worst:.3e}"


def _gain(fast: bool):
    worst = 0.0
    for q in range(1, 51):
        for r in (0.3, 0.5, 0.9):
            for mode in ("signed", "absolute"):
                k = cert.KernelSpec(q, 1.0, r, mode)
                worst = max(worst, abs(cert.gain_truncated(k, 1000) - cert.gain_closed_form(k)))
    g = cert.gain_closed_form(cert.KernelSpec(5, 0.1, 0.5, "absolute"))
    ok = worst <= 1e-12 and abs(g - 0.10194) <= 1e-5
    return ok, f"truncation error {worst:.3e}; G(5, 0.1, 0.5, abs) = {g:.6f}"


def _certificate(fast: bool):
    k = cert.KernelSpec(5, 0.1, 0.5, "absolute")
    alpha = cert.ClassKSpec(1.0, 1.0)
    c = cert.certify(k, alpha, 1.0, W=2.0)
    S = 0.0
    for _ in range(10_000):
        S = alpha(1.0) + c.G * S
    ok = abs(S - c.uniform_bound) <= 1e-9
    return ok, f"fixed point {S!r} vs bound {c.uniform_bound!r}"


def _example1(fast: bool):
    traj = sim.simulate_discrete(sim.example1_system(), (1.0, 1.0), 200)
    eu = sim.euclidean_trace(traj).value
    ra = sim.ramanujan_trace(traj, sim.TraceConfig(5, 0.9)).value
    spikes = float(eu[150:201].max())
    final = float(ra[200])
    rise = float(np.max(np.diff(ra[30:])))
    ok = spikes >= 0.25 and final <= 0.05 and rise <= 1e-3
    return ok, f"euclid max[150,200] = {spikes:.4f}; ramanujan(200) = {final:.4f}; max rise k>=30 = {rise:.4f}"


def _example1_nominal(fast: bool):
    traj = sim.simulate_discrete(sim.example1_system(sim.DisturbanceSpec()), (1.0, 1.0), 50)
    final = float(np.linalg.norm(traj.states[50]))
    return final <= 1e-3, f"|x_50| = {final:.3e}"


def _example2(fast: bool):
    traj = sim.simulate_hybrid(sim.HybridSystem())
    jumps = [ev.t for ev in traj.events]
    V = sim.oscillator_energy(traj.states)
    jump_report = sim.lyapunov_jump_check(traj)
    tr = sim.hybrid_ramanujan_trace(traj).value
    ok = (
        jumps == [float(p) for p in ar.prime_sieve(50)]
        and float(np.max(np.diff(V))) <= 1e-9
        and jump_report.worst_error <= 1e-12
        and tr[-1] <= 0.2 * tr[0]
    )
    return ok, f"{len(jumps)} jumps; max dV step {np.max(np.diff(V)):.2e}; trace ratio {tr[-1] / tr[0]:.4f}"


def _integrator_order(fast: bool):
    ratio = integrator_error_ratio(0.05)
    return 12 <= ratio <= 20, f"error ratio {ratio:.3f}"


def integrator_error_ratio(h: float) -> float:
    """Endpoint-error ratio on the first flow arc ``[0, 2)`` for ``h`` vs ``h/2``."""

    def pre_jump(step):
        traj = sim.simulate_hybrid(sim.HybridSystem(T=2.0, h=step))
        return traj.events[0].x_before

    ref = pre_jump(h / 100)
    e1 = np.max(np.abs(pre_jump(h) - ref))
    e2 = np.max(np.abs(pre_jump(h / 2) - ref))
    return float(e1 / e2)


def _filter(fast: bool):
    a = sim.filter_demo(4, 1, 4)
    b = sim.filter_demo(6, 1, 6)
    ok = not any(a.weights) and a.projection == 0.0 and all(w == 1 for w in b.weights)
    return ok, f"m=4: weights {set(a.weights)}, alpha_4 = {a.projection}; m=6: weights {set(b.weights)}"


def _cesaro(fast: bool):
    w0 = sp.cesaro_weight(0, 10**5)
    w1 = sp.cesaro_weight(1, 10**4)
    return abs(w0 - 0.6079) <= 0.01 and abs(w1) <= 0.01, f"w(0) = {w0:.5f}, w(1) = {w1:.2e}"


CHECKS: list[tuple[str, Callable[[bool], tuple[bool, str]]]] = [
    ("ramanujan-sum equivalence", _sums),
    ("ramanujan-row invariants", _row_properties),
    ("orthogonality", _orthogonality),
    ("parseval round trip", _parseval),
    ("euclidean domination", _domination),
    ("gain closed form", _gain),
    ("certificate fixed point", _certificate),
    ("example 1 reproduction", _example1),
    ("example 1 nominal decay", _example1_nominal),
    ("example 2 reproduction", _example2),
    ("integrator order", _integrator_order),
    ("filter demo", _filter),
    ("cesaro weights", _cesaro),
]


def run_checks(fast: bool = False) -> list[CheckResult]:
    results = []
    for name, check in CHECKS:
        start = time.perf_counter()
        try:
            passed, detail = check(fast)
        except Exception as exc:  # a crashing check is a failed check
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(passed), detail, time.perf_counter() - start))
    return results
