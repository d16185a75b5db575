"""Small-gain stability certificates built on Ramanujan-sum kernels."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .arithmetic import ramanujan_row

__all__ = [
    "KernelSpec",
    "ClassKSpec",
    "StabilityCertificate",
    "gain_closed_form",
    "gain_truncated",
    "certify",
    "delta_for_epsilon",
    "empirical_gain",
    "discrete_lyapunov",
    "quadratic_iss_rate",
    "LyapunovConvergenceError",
]

_MODE_ALIASES = {"abs": "absolute", "signed": "signed", "absolute": "absolute"}
DELTA_MARGIN = 1e-6


class LyapunovConvergenceError(ArithmeticError):
    """Fixed-point iteration for the discrete Lyapunov equation did not settle."""


def normalize_mode(mode: str) -> str:
    try:
        return _MODE_ALIASES[str(mode).lower()]
    except KeyError:
        raise ValueError(f"mode must be one of signed/absolute/abs, got {mode!r}") from None


@dataclass(frozen=True)
class KernelSpec:
    """Kernel ``M * kappa_q(n) / q * r**n`` with ``kappa = c_q`` or ``|c_q|``."""

    q: int
    M: float
    r: float
    mode: str = "absolute"

    def __post_init__(self):
        if int(self.q) < 1:
            raise ValueError(f"q must be >= 1, got {self.q}")
        if not self.M >= 0:
            raise ValueError(f"M must be >= 0, got {self.M}")
        if not 0 < self.r < 1:
            raise ValueError(f"r must lie in (0, 1), got {self.r}")
        object.__setattr__(self, "q", int(self.q))
        object.__setattr__(self, "mode", normalize_mode(self.mode))

    def weights(self) -> np.ndarray:
        """``kappa(s)`` for one period ``s = 0..q-1``."""
        row = ramanujan_row(self.q).as_array()
        return np.abs(row) if self.mode == "absolute" else row


@dataclass(frozen=True)
class ClassKSpec:
    """Class-K function ``alpha(s) = a * s**p``."""

    a: float = 1.0
    p: float = 1.0

    def __post_init__(self):
        if not (self.a > 0 and self.p > 0):
            raise ValueError("class-K parameters a and p must be positive")

    def __call__(self, s: float) -> float:
        return self.a * s**self.p

    def inverse(self, y: float) -> float:
        return (y / self.a) ** (1.0 / self.p)


@dataclass(frozen=True)
class StabilityCertificate:
    kernel: KernelSpec
    alpha: ClassKSpec
    G: float
    stable: bool
    x0_norm: float
    uniform_bound: Optional[float] = None
    W: Optional[float] = None
    disturbance_bound: Optional[float] = None

    def as_rows(self) -> list[tuple[str, object]]:
        k = self.kernel
        return [
            ("q", k.q),
            ("M", k.M),
            ("r", k.r),
            ("mode", k.mode),
            ("alpha_a", self.alpha.a),
            ("alpha_p", self.alpha.p),
            ("x0_norm", self.x0_norm),
            ("G", self.G),
            ("stable", self.stable),
            ("uniform_bound", self.uniform_bound),
            ("W", self.W),
            ("disturbance_bound", self.disturbance_bound),
        ]


def gain_closed_form(k: KernelSpec) -> float:
    """Exact series sum using the period-``q`` structure of ``c_q``."""
    s = np.arange(k.q)
    one_period = float(np.dot(k.weights(), k.r**s))
    return k.M / k.q * one_period / (1.0 - k.r**k.q)


def gain_truncated(k: KernelSpec, N: int) -> float:
    """Partial sum of the gain series through ``n = N - 1``."""
    N = int(N)
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    n = np.arange(N)
    terms = k.weights()[n % k.q] * k.r**n
    return k.M / k.q * float(np.sum(terms))


def certify(
    k: KernelSpec,
    alpha: ClassKSpec,
    x0_norm: float,
    W: Optional[float] = None,
) -> StabilityCertificate:
    if x0_norm < 0:
        raise ValueError("x0_norm must be nonnegative")
    if W is not None and W < 0:
        raise ValueError("W must be nonnegative")
    G = gain_closed_form(k)
    stable = G < 1
    uniform = disturbance = None
    if stable:
        a0 = alpha(x0_norm)
        uniform = a0 / (1 - G)
        if W is not None:
            disturbance = (a0 + G * W) / (1 - G)
    return StabilityCertificate(k, alpha, G, stable, x0_norm, uniform, W, disturbance)


def delta_for_epsilon(cert: StabilityCertificate, epsilon: float) -> float:
    """Initial-norm radius keeping ``alpha(delta) / (1 - G) < epsilon``."""
    if not cert.stable:
        raise ValueError(f"certificate is not stable (G = {cert.G})")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    return cert.alpha.inverse((1 - cert.G) * epsilon * (1 - DELTA_MARGIN))


def empirical_gain(
    system,
    radius: float,
    samples: int,
    horizon: int,
    norm: str = "euclidean",
    seed: int = 0,
    trace_config=None,
) -> float:
    """Sampled lower estimate of the gain function at ``radius``.

    Initial states are drawn on the sphere of the given radius, one
    pseudo-random direction per sample (each from its own child seed). For
    every sample the system is simulated over ``horizon`` steps and the
    largest trace value, ``k = 0`` included, is kept; the maximum over
    samples is returned. Only a lower bound on the true supremum.

    ``norm`` is ``"euclidean"`` or ``"ramanujan"``; the latter uses
    ``trace_config`` (defaults to ``TraceConfig()``).
    """
    from .simulators import TraceConfig, euclidean_trace, ramanujan_trace, simulate_discrete

    if samples < 1:
        raise ValueError("samples must be >= 1")
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    if norm not in ("euclidean", "ramanujan"):
        raise ValueError(f"unknown norm selector {norm!r}")
    cfg = trace_config or TraceConfig()

    best = 0.0
    for child in np.random.SeedSequence(seed).spawn(samples):
        rng = np.random.default_rng(child)
        direction = rng.standard_normal(system.dimension)
        while not np.any(direction):
            direction = rng.standard_normal(system.dimension)
        x0 = radius * direction / np.linalg.norm(direction)
        traj = simulate_discrete(system, x0, horizon)
        trace = euclidean_trace(traj) if norm == "euclidean" else ramanujan_trace(traj, cfg)
        best = max(best, float(np.max(trace.value)))
    return best


def discrete_lyapunov(A, Qm, tol: float = 1e-12, max_iter: int = 100_000) -> np.ndarray:
    """Solve ``A.T P A - P = -Qm`` by summing ``sum_k (A.T)^k Qm A^k``.

    Iteration stops once the added term has Frobenius norm below ``tol``.
    Raises :class:`LyapunovConvergenceError` when the series does not settle,
    which happens when the spectral radius of ``A`` is at least one.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    Qm = np.atleast_2d(np.asarray(Qm, dtype=float))
    n = A.shape[0]
    if A.shape != (n, n) or Qm.shape != (n, n):
        raise ValueError("A and Qm must be square matrices of the same size")
    if n > 8:
        raise ValueError("discrete_lyapunov targets n <= 8")
    if not np.allclose(Qm, Qm.T):
        raise ValueError("Qm must be symmetric")
    try:
        np.linalg.cholesky(Qm)
    except np.linalg.LinAlgError:
        raise ValueError("Qm must be positive definite") from None

    P = Qm.copy()
    term = Qm.copy()
    for _ in range(max_iter):
        term = A.T @ term @ A
        P += term
        size = np.linalg.norm(term)
        if not math.isfinite(size):
            break
        if size < tol:
            P = 0.5 * (P + P.T)
            return P
    raise LyapunovConvergenceError(
        "Lyapunov series did not converge; spectral radius of A is likely >= 1"
    )


def quadratic_iss_rate(P, Qm) -> float:
    """Decay rate ``alpha`` with ``V(Ax) - V(x) <= -alpha V(x)`` for ``V = x'Px``."""
    P = np.asarray(P, dtype=float)
    Qm = np.asarray(Qm, dtype=float)
    return float(np.linalg.eigvalsh(Qm)[0] / np.linalg.eigvalsh(P)[-1])
