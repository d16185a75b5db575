"""Reference simulators: a discrete LTI system with arithmetic disturbances
and a damped oscillator with dissipative jumps at prime times.

Also holds the per-step Euclidean and Ramanujan traces used to compare the
two norms along a trajectory, and numerical checkers for the Lyapunov
decrease conditions of the hybrid example.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence, Union

import numpy as np

from .arithmetic import is_prime, moebius, prime_sieve, ramanujan_row, ramanujan_sum
from .space import FiniteSequence, RamanujanCoefficients, project_coefficients

__all__ = [
    "EXAMPLE1_A",
    "SimulationError",
    "DisturbanceSpec",
    "DiscreteSystem",
    "DiscreteTrajectory",
    "HybridSystem",
    "HybridTrajectory",
    "JumpEvent",
    "TraceConfig",
    "Trace",
    "make_disturbance",
    "simulate_discrete",
    "simulate_hybrid",
    "euclidean_trace",
    "ramanujan_trace",
    "hybrid_ramanujan_trace",
    "energy_trace",
    "lyapunov_flow_check",
    "lyapunov_jump_check",
    "filter_demo",
    "example1_system",
]

EXAMPLE1_A = np.array([[0.8, 0.1], [0.0, 0.8]])
EXAMPLE1_DISTURBANCE = (0.0, 0.5)
OVERFLOW_LIMIT = 1e12
DISCRETE_LAMBDA = 0.9
HYBRID_LAMBDA = 0.995


class SimulationError(RuntimeError):
    """A simulated state left the finite range (``|x_i| > 1e12`` or NaN)."""


def _guard(x: np.ndarray, where: str) -> None:
    if not np.all(np.isfinite(x)) or np.any(np.abs(x) > OVERFLOW_LIMIT):
        raise SimulationError(f"state diverged at {where}: {x!r}")


@dataclass(frozen=True)
class DisturbanceSpec:
    """Arithmetically structured disturbance ``w_k``.

    ``kind`` is one of ``zero``, ``prime_indexed``, ``residue_class`` or
    ``table``. For ``residue_class`` the vector is injected whenever
    ``k = residue (mod modulus)``; ``table`` maps time indices to vectors.
    """

    kind: str = "zero"
    vector: Sequence[float] = ()
    modulus: int = 1
    residue: int = 0
    table: Mapping[int, Sequence[float]] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("zero", "prime_indexed", "residue_class", "table"):
            raise ValueError(f"unknown disturbance kind {self.kind!r}")
        object.__setattr__(self, "vector", tuple(float(v) for v in self.vector))
        if self.kind == "residue_class":
            if self.modulus < 1 or not 0 <= self.residue < self.modulus:
                raise ValueError("residue class needs m >= 1 and 0 <= r0 < m")
        table = {int(k): tuple(float(v) for v in vec) for k, vec in dict(self.table).items()}
        if any(k < 0 for k in table):
            raise ValueError("table keys must be nonnegative")
        object.__setattr__(self, "table", table)

    @classmethod
    def prime_indexed(cls, vector) -> "DisturbanceSpec":
        return cls("prime_indexed", vector)

    @classmethod
    def residue_class(cls, vector, modulus: int, residue: int) -> "DisturbanceSpec":
        return cls("residue_class", vector, modulus=modulus, residue=residue)


def make_disturbance(spec: DisturbanceSpec, k: int, dimension: Optional[int] = None) -> np.ndarray:
    """Disturbance vector at time index ``k`` (zero unless the condition holds)."""
    if dimension is None:
        dimension = len(spec.vector) or len(next(iter(spec.table.values()), ()))
    zero = np.zeros(dimension)
    if spec.kind == "prime_indexed" and is_prime(k):
        return np.array(spec.vector, dtype=float)
    if spec.kind == "residue_class" and k % spec.modulus == spec.residue:
        return np.array(spec.vector, dtype=float)
    if spec.kind == "table" and k in spec.table:
        return np.array(spec.table[k], dtype=float)
    return zero


Transition = Union[np.ndarray, Callable[[np.ndarray], np.ndarray]]


@dataclass(frozen=True)
class DiscreteSystem:
    """``x_{k+1} = transition(x_k) + w_k``; transition is a matrix or a map."""

    transition: Transition
    disturbance: DisturbanceSpec = field(default_factory=DisturbanceSpec)
    dimension: Optional[int] = None

    def __post_init__(self):
        if callable(self.transition):
            if self.dimension is None:
                raise ValueError("a callable transition needs an explicit dimension")
        else:
            A = np.atleast_2d(np.asarray(self.transition, dtype=float))
            if A.shape[0] != A.shape[1]:
                raise ValueError("transition matrix must be square")
            if self.dimension not in (None, A.shape[0]):
                raise ValueError("dimension does not match the transition matrix")
            object.__setattr__(self, "transition", A)
            object.__setattr__(self, "dimension", A.shape[0])
        dim = self.dimension
        d = self.disturbance
        if d.kind in ("prime_indexed", "residue_class") and len(d.vector) != dim:
            raise ValueError(f"disturbance vector must have length {dim}")
        if any(len(v) != dim for v in d.table.values()):
            raise ValueError(f"disturbance table vectors must have length {dim}")

    def step(self, x: np.ndarray) -> np.ndarray:
        if callable(self.transition):
            return np.asarray(self.transition(x), dtype=float)
        return self.transition @ x


def example1_system(disturbance: Optional[DisturbanceSpec] = None) -> DiscreteSystem:
    if disturbance is None:
        disturbance = DisturbanceSpec.prime_indexed(EXAMPLE1_DISTURBANCE)
    return DiscreteSystem(EXAMPLE1_A.copy(), disturbance)


@dataclass(frozen=True)
class DiscreteTrajectory:
    states: np.ndarray  # (K+1, n)
    disturbances: np.ndarray  # (K+1, n); row k is w_k, last row unused by the states

    @property
    def K(self) -> int:
        return self.states.shape[0] - 1

    @property
    def index(self) -> np.ndarray:
        return np.arange(self.states.shape[0])


def simulate_discrete(sys: DiscreteSystem, x0, K: int) -> DiscreteTrajectory:
    x = np.asarray(x0, dtype=float).reshape(-1)
    if x.size != sys.dimension:
        raise ValueError(f"x0 has length {x.size}, system dimension is {sys.dimension}")
    K = int(K)
    if K < 0:
        raise ValueError("K must be nonnegative")
    _guard(x, "k=0")
    states = np.empty((K + 1, sys.dimension))
    dists = np.empty((K + 1, sys.dimension))
    states[0] = x
    for k in range(K + 1):
        dists[k] = make_disturbance(sys.disturbance, k, sys.dimension)
    for k in range(K):
        x = sys.step(states[k]) + dists[k]
        _guard(x, f"k={k + 1}")
        states[k + 1] = x
    return DiscreteTrajectory(states, dists)


@dataclass(frozen=True)
class HybridSystem:
    """Damped oscillator flowing between primes and jumping at prime times.

    Flow ``(x2, -x1 - c_damp x2)``, jump ``(x1, c_jump x2)``.
    """

    c_damp: float = 0.1
    c_jump: float = 0.6
    T: float = 50.0
    h: float = 0.05

    def __post_init__(self):
        for name in ("c_damp", "c_jump", "T", "h"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    def flow(self, x: np.ndarray) -> np.ndarray:
        return np.array([x[1], -x[0] - self.c_damp * x[1]])

    def jump(self, x: np.ndarray) -> np.ndarray:
        return np.array([x[0], self.c_jump * x[1]])

    @property
    def jump_times(self) -> list[int]:
        return [p for p in prime_sieve(int(math.floor(self.T))) if p > 0]

    def rk4_step(self, x: np.ndarray, dt: float) -> np.ndarray:
        k1 = self.flow(x)
        k2 = self.flow(x + 0.5 * dt * k1)
        k3 = self.flow(x + 0.5 * dt * k2)
        k4 = self.flow(x + dt * k3)
        return x + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


@dataclass(frozen=True)
class JumpEvent:
    t: float
    x_before: np.ndarray
    x_after: np.ndarray


@dataclass(frozen=True)
class HybridTrajectory:
    """Uniform samples ``(t, j, x)`` plus the jump events.

    A sample at a jump time holds the post-jump state; the pre-jump state is
    in the matching :class:`JumpEvent`.
    """

    t: np.ndarray
    j: np.ndarray
    states: np.ndarray
    events: tuple[JumpEvent, ...]
    system: HybridSystem


def _integrate(sys: HybridSystem, x: np.ndarray, t0: float, t1: float, h: float) -> np.ndarray:
    # fixed step h, last step shortened to land exactly on t1
    span = t1 - t0
    n = max(1, int(math.ceil(span / h - 1e-9)))
    dt = span / n if abs(span - n * h) < 1e-9 * h else h
    t = t0
    for i in range(n):
        step = dt if i < n - 1 else t1 - t
        x = sys.rk4_step(x, step)
        t += step
    return x


def simulate_hybrid(sys: HybridSystem, x0=(1.0, 1.0)) -> HybridTrajectory:
    """Integrate the flow with classical RK4 and jump at every prime ``<= T``.

    Samples are recorded on the grid ``t = i*h``. Grid cells containing a
    prime are split so the jump is applied exactly at the prime.
    """
    x = np.asarray(x0, dtype=float).reshape(2)
    _guard(x, "t=0")
    h = sys.h
    n_samples = int(math.floor(sys.T / h + 1e-9))
    grid = np.arange(n_samples + 1) * h
    pending = list(sys.jump_times)
    eps = 1e-9 * h

    ts, js, xs, events = [0.0], [0], [x.copy()], []
    j = 0
    for i in range(1, n_samples + 1):
        t_lo, t_hi = grid[i - 1], grid[i]
        t_cur = t_lo
        while pending and pending[0] <= t_hi + eps:
            p = float(pending.pop(0))
            if p > t_cur + eps:
                x = _integrate(sys, x, t_cur, p, h)
                t_cur = p
            before = x.copy()
            x = sys.jump(x)
            j += 1
            _guard(x, f"jump t={p}")
            events.append(JumpEvent(p, before, x.copy()))
        if t_hi > t_cur + eps:
            x = _integrate(sys, x, t_cur, t_hi, h)
        _guard(x, f"t={t_hi}")
        ts.append(float(t_hi))
        js.append(j)
        xs.append(x.copy())
    return HybridTrajectory(np.array(ts), np.array(js), np.array(xs), tuple(events), sys)


@dataclass(frozen=True)
class TraceConfig:
    """Per-step Ramanujan trace settings.

    ``window=None`` means unbounded. ``lam`` is the discount in ``(0, 1]``.
    """

    q: int = 5
    lam: float = DISCRETE_LAMBDA
    window: Optional[int] = None
    clamp: bool = True

    def __post_init__(self):
        if int(self.q) < 1:
            raise ValueError("q must be >= 1")
        if not 0 < self.lam <= 1:
            raise ValueError(f"lambda must lie in (0, 1], got {self.lam}")
        if self.window is not None and int(self.window) < 1:
            raise ValueError("window must be a positive integer or None")


@dataclass(frozen=True)
class Trace:
    index: np.ndarray
    value: np.ndarray
    clamped: np.ndarray

    def __len__(self) -> int:
        return self.value.size

    def __iter__(self):
        return iter(zip(self.index.tolist(), self.value.tolist(), self.clamped.tolist()))


def energy_trace(states: np.ndarray) -> np.ndarray:
    states = np.asarray(states, dtype=float)
    return np.einsum("ij,ij->i", states, states)


def euclidean_trace(traj: Union[DiscreteTrajectory, HybridTrajectory]) -> Trace:
    index = traj.t if isinstance(traj, HybridTrajectory) else traj.index
    value = np.linalg.norm(traj.states, axis=1)
    return Trace(index, value, np.zeros(value.size, dtype=bool))


def _ramanujan_quadratic_form(energies: np.ndarray, cfg: TraceConfig) -> np.ndarray:
    """``E_k = (1/q) sum_{m < min(k+1, W)} c_q(m) lam^m e_{k-m}``."""
    K1 = energies.size
    span = K1 if cfg.window is None else min(K1, int(cfg.window))
    m = np.arange(span)
    kernel = ramanujan_row(cfg.q).as_array()[m % cfg.q] * np.power(cfg.lam, m)
    return np.convolve(energies, kernel)[:K1] / cfg.q


def trace_from_energies(index: np.ndarray, energies: np.ndarray, cfg: TraceConfig) -> Trace:
    E = _ramanujan_quadratic_form(energies, cfg)
    negative = E < 0
    if negative.any() and not cfg.clamp:
        from .space import NegativeFormError

        k = int(np.argmax(negative))
        raise NegativeFormError(f"trace quadratic form negative at sample {k}")
    return Trace(index, np.sqrt(np.maximum(E, 0.0)), negative)


def ramanujan_trace(traj: DiscreteTrajectory, cfg: TraceConfig = TraceConfig()) -> Trace:
    """Discounted single-modulus Ramanujan form of the state energies.

    ``value(k) = sqrt(max(E_k, 0))`` with
    ``E_k = (1/q) sum_j c_q(k - j) lam^(k - j) |x_j|^2`` over the last ``W``
    states; the ``clamped`` flag marks ``E_k < 0``.
    """
    return trace_from_energies(traj.index, energy_trace(traj.states), cfg)


def hybrid_ramanujan_trace(traj: HybridTrajectory, cfg: TraceConfig = TraceConfig(lam=HYBRID_LAMBDA)) -> Trace:
    """:func:`ramanujan_trace` over the uniform samples, indexed by sample number."""
    if traj.t.size > 1:
        dt = np.diff(traj.t)
        if not np.allclose(dt, dt[0], rtol=0, atol=1e-9 * max(dt[0], 1.0)):
            raise ValueError("hybrid trace needs uniformly spaced samples")
    return trace_from_energies(traj.t, energy_trace(traj.states), cfg)


def oscillator_energy(x: np.ndarray) -> np.ndarray:
    x = np.atleast_2d(x)
    return 0.5 * (x[:, 0] ** 2 + x[:, 1] ** 2)


def flow_derivative(x, c_damp: float = 0.1) -> float:
    """``<grad V, f>`` for ``V = (x1^2 + x2^2) / 2``."""
    x1, x2 = float(x[0]), float(x[1])
    return x1 * x2 + x2 * (-x1 - c_damp * x2)


@dataclass
class FlowCheckReport:
    samples_checked: int
    max_identity_error: float
    max_slope: float
    identity_violations: list[tuple[float, float]]
    slope_violations: list[tuple[float, float]]

    @property
    def ok(self) -> bool:
        return not self.identity_violations and not self.slope_violations


def lyapunov_flow_check(traj: HybridTrajectory, tol: float = 1e-6, max_listed: int = 10) -> FlowCheckReport:
    """Check ``V`` decreases along flows.

    At each sample the analytic ``<grad V, f>`` is compared with
    ``-c_damp x2^2`` (tolerance 1e-12, scaled by ``|x|^2`` above one).
    Between consecutive samples without a jump in between, the difference
    quotient of ``V`` must not exceed ``tol``. Violations are collected,
    worst first, not raised.
    """
    c = traj.system.c_damp
    id_bad, slope_bad = [], []
    max_id = 0.0
    for t, x in zip(traj.t, traj.states):
        err = abs(flow_derivative(x, c) - (-c * x[1] ** 2))
        max_id = max(max_id, err)
        if err > 1e-12 * max(1.0, float(x @ x)):
            id_bad.append((float(t), err))
    V = oscillator_energy(traj.states)
    same_arc = traj.j[1:] == traj.j[:-1]
    slopes = np.diff(V) / np.diff(traj.t)
    flow_slopes = slopes[same_arc]
    max_slope = float(flow_slopes.max()) if flow_slopes.size else -math.inf
    for i in np.flatnonzero(same_arc & (slopes > tol)):
        slope_bad.append((float(traj.t[i]), float(slopes[i])))
    id_bad.sort(key=lambda v: -v[1])
    slope_bad.sort(key=lambda v: -v[1])
    return FlowCheckReport(
        int(traj.t.size), max_id, max_slope, id_bad[:max_listed], slope_bad[:max_listed]
    )


@dataclass
class JumpCheckReport:
    # (t, dV, expected dV) per jump
    events: list[tuple[float, float, float]]
    worst_error: float

    @property
    def ok(self) -> bool:
        return self.worst_error <= 1e-12 and all(dv <= 0 for _, dv, _ in self.events)


def jump_energy_change(x_before, c_jump: float = 0.6) -> float:
    """Exact ``V(g(x)) - V(x) = (c_jump^2 - 1) x2^2 / 2``."""
    return 0.5 * (c_jump**2 - 1.0) * float(x_before[1]) ** 2


def lyapunov_jump_check(traj: HybridTrajectory) -> JumpCheckReport:
    c = traj.system.c_jump
    rows = []
    worst = 0.0
    for ev in traj.events:
        dv = float(oscillator_energy(ev.x_after)[0] - oscillator_energy(ev.x_before)[0])
        expected = jump_energy_change(ev.x_before, c)
        worst = max(worst, abs(dv - expected))
        rows.append((ev.t, dv, expected))
    return JumpCheckReport(rows, worst)


@dataclass
class FilterReport:
    m: int
    r0: int
    q: int
    weights: list[int]
    mobius_identity: Optional[bool]
    coefficients: RamanujanCoefficients

    @property
    def projection(self) -> float:
        return self.coefficients[self.q]

    def summary(self) -> str:
        lines = [
            f"disturbance: residue class {self.r0} mod {self.m}; analysis modulus q={self.q}",
            f"kernel weights c_q(r0 + m*j), j=0..{len(self.weights) - 1}: {self.weights}",
        ]
        if self.mobius_identity is not None:
            state = "holds" if self.mobius_identity else "FAILS"
            lines.append(f"c_m(r0 + m*j) = mu(m) = {moebius(self.m)}: {state}")
        lines.append(f"projection coefficient alpha_{self.q} = {self.projection!r}")
        if self.weights and not any(self.weights):
            lines.append("disturbance is orthogonal to c_q: filtered out")
        return "\n".join(lines)


def filter_demo(m: int, r0: int, q: int, horizon: int = 20) -> FilterReport:
    """Kernel weights seen by a residue-class disturbance at modulus ``q``."""
    m, r0, q, horizon = int(m), int(r0), int(q), int(horizon)
    if m < 1 or q < 1 or not 0 <= r0 < m:
        raise ValueError("need m >= 1, q >= 1 and 0 <= r0 < m")
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    weights = [ramanujan_sum(q, r0 + m * j) for j in range(horizon + 1)]
    identity = None
    if q == m and math.gcd(r0, m) == 1:
        identity = all(w == moebius(m) for w in weights)
    indicator = np.zeros(m)
    indicator[r0] = 1.0
    coeffs = project_coefficients(FiniteSequence(0, indicator), q)
    return FilterReport(m, r0, q, weights, identity, coeffs)
