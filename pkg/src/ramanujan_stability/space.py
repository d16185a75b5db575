"""Finitely supported sequences and the Ramanujan inner product.

Two faces of the inner product live here: the residue-class form truncated at
a finite Cesaro depth ``Q`` (:func:`truncated_inner`), and the coefficient-side
Parseval form over a finite Ramanujan expansion (:func:`parseval_inner`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Mapping

import numpy as np

from .arithmetic import ramanujan_row, ramanujan_sums_over_moduli, totient

__all__ = [
    "FiniteSequence",
    "RamanujanCoefficients",
    "TruncationConfig",
    "NegativeFormError",
    "truncated_inner",
    "truncated_inner_profile",
    "truncated_norm",
    "cesaro_weight",
    "project_coefficients",
    "parseval_inner",
    "parseval_norm",
    "reconstruct",
    "orthogonality_average",
    "lcm_range",
]


class NegativeFormError(ValueError):
    """The truncated quadratic form came out negative and clamping is off."""


@dataclass(frozen=True)
class FiniteSequence:
    """Real sequence on the integers, zero outside ``[offset, offset + len)``."""

    offset: int
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise ValueError("sequence values must be one-dimensional")
        if not np.all(np.isfinite(values)):
            raise ValueError("sequence values must be finite")
        object.__setattr__(self, "offset", int(self.offset))
        object.__setattr__(self, "values", values)

    @classmethod
    def from_mapping(cls, entries: Mapping[int, float]) -> "FiniteSequence":
        if not entries:
            return cls(0, np.zeros(0))
        lo, hi = min(entries), max(entries)
        values = np.zeros(hi - lo + 1)
        for n, v in entries.items():
            values[n - lo] = v
        return cls(lo, values)

    @classmethod
    def impulse(cls, n: int, height: float = 1.0) -> "FiniteSequence":
        return cls(n, np.array([height], dtype=float))

    def __len__(self) -> int:
        return self.values.size

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + len(self), dtype=np.int64)

    def __getitem__(self, n: int) -> float:
        i = int(n) - self.offset
        if 0 <= i < len(self):
            return float(self.values[i])
        return 0.0

    def l2_norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def __add__(self, other: "FiniteSequence") -> "FiniteSequence":
        lo, hi = _joint_range(self, other)
        return FiniteSequence(lo, _dense(self, lo, hi) + _dense(other, lo, hi))

    def __mul__(self, scalar: float) -> "FiniteSequence":
        return FiniteSequence(self.offset, self.values * float(scalar))

    __rmul__ = __mul__


def _joint_range(a: FiniteSequence, b: FiniteSequence) -> tuple[int, int]:
    spans = [(s.offset, s.offset + len(s)) for s in (a, b) if len(s)]
    if not spans:
        return 0, 0
    return min(s[0] for s in spans), max(s[1] for s in spans)


def _dense(a: FiniteSequence, lo: int, hi: int) -> np.ndarray:
    out = np.zeros(hi - lo)
    if len(a):
        start = a.offset - lo
        out[start : start + len(a)] = a.values
    return out


@dataclass(frozen=True)
class TruncationConfig:
    """Finite Cesaro depth ``Q`` standing in for the ``Q -> inf`` limit."""

    Q: int
    clamp_negative: bool = True

    def __post_init__(self):
        if int(self.Q) < 1:
            raise ValueError(f"Q must be >= 1, got {self.Q}")
        object.__setattr__(self, "Q", int(self.Q))


@dataclass(frozen=True)
class RamanujanCoefficients:
    """Finite Ramanujan expansion ``a(n) = sum_d alpha_d c_d(n)``."""

    entries: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for d, alpha in dict(self.entries).items():
            d = int(d)
            if d < 1:
                raise ValueError(f"modulus must be >= 1, got {d}")
            clean[d] = float(alpha)
        object.__setattr__(self, "entries", dict(sorted(clean.items())))

    @property
    def max_modulus(self) -> int:
        return max(self.entries, default=0)

    def __getitem__(self, d: int) -> float:
        return self.entries.get(int(d), 0.0)

    def __len__(self) -> int:
        return len(self.entries)

    def scaled(self, lam: float) -> "RamanujanCoefficients":
        return RamanujanCoefficients({d: lam * a for d, a in self.entries.items()})

    def __add__(self, other: "RamanujanCoefficients") -> "RamanujanCoefficients":
        keys = set(self.entries) | set(other.entries)
        return RamanujanCoefficients({d: self[d] + other[d] for d in keys})


def truncated_inner_profile(a: FiniteSequence, b: FiniteSequence, Q: int) -> np.ndarray:
    """Truncated inner products at every depth ``1..Q`` in one pass."""
    Q = int(Q)
    if Q < 1:
        raise ValueError(f"Q must be >= 1, got {Q}")
    lo, hi = _joint_range(a, b)
    prod = _dense(a, lo, hi) * _dense(b, lo, hi)
    if not prod.any():
        return np.zeros(Q)
    n = np.arange(lo, hi, dtype=np.int64)
    per_modulus = np.empty(Q)
    for q in range(1, Q + 1):
        residues = ((n % q) + q) % q
        class_sums = np.bincount(residues, weights=prod, minlength=q)
        per_modulus[q - 1] = float(np.dot(ramanujan_row(q).as_array(), class_sums)) / q
    return np.cumsum(per_modulus) / np.arange(1, Q + 1)


def truncated_inner(a: FiniteSequence, b: FiniteSequence, cfg: TruncationConfig) -> float:
    """Residue-class Ramanujan inner product at finite depth ``cfg.Q``.

    ``(1/Q) sum_{q<=Q} (1/q) sum_{r<q} c_q(r) sum_{n = r mod q} a_n b_n``
    """
    return float(truncated_inner_profile(a, b, cfg.Q)[-1])


def truncated_norm(a: FiniteSequence, cfg: TruncationConfig) -> tuple[float, bool]:
    """Return ``(sqrt(max(<a,a>_Q, 0)), clamped)``.

    With ``cfg.clamp_negative`` false a negative form raises
    :class:`NegativeFormError` instead of being clamped.
    """
    form = truncated_inner(a, a, cfg)
    if form < 0:
        if not cfg.clamp_negative:
            raise NegativeFormError(f"truncated quadratic form is negative ({form!r}) at Q={cfg.Q}")
        return 0.0, True
    return math.sqrt(form), False


def cesaro_weight(n: int, Q: int) -> float:
    """``(1/Q) sum_{q=1}^{Q} c_q(n) / q``."""
    Q = int(Q)
    if Q < 1:
        raise ValueError(f"Q must be >= 1, got {Q}")
    c = ramanujan_sums_over_moduli(n, Q)
    q = np.arange(1, Q + 1, dtype=float)
    return float(np.sum(c / q) / Q)


def lcm_range(D: int) -> int:
    return reduce(math.lcm, range(1, int(D) + 1), 1)


def project_coefficients(a: FiniteSequence, D: int) -> RamanujanCoefficients:
    """Project one period of a periodic signal onto ``c_1 .. c_D``.

    The stored values of ``a`` form one period ``N = len(a)``; the value at
    index ``offset + i`` is taken as the signal at every ``n = offset + i
    (mod N)``. Sums run over ``L = lcm(N, lcm(1..D))`` so every basis row
    completes whole periods and the projection has no leakage.
    """
    D = int(D)
    if D < 1:
        raise ValueError(f"D must be >= 1, got {D}")
    N = len(a)
    if N == 0:
        raise ValueError("cannot project an empty period")
    period = np.empty(N)
    period[(a.indices % N + N) % N] = a.values
    L = math.lcm(N, lcm_range(D))
    n = np.arange(1, L + 1, dtype=np.int64)
    signal = period[n % N]
    coeffs = {}
    for d in range(1, D + 1):
        kernel = ramanujan_row(d).as_array()[n % d]
        coeffs[d] = float(np.dot(signal, kernel)) / (totient(d) * L)
    return RamanujanCoefficients(coeffs)


def parseval_inner(alpha: RamanujanCoefficients, beta: RamanujanCoefficients) -> float:
    common = set(alpha.entries) & set(beta.entries)
    return float(sum(totient(d) * alpha[d] * beta[d] for d in sorted(common)))


def parseval_norm(alpha: RamanujanCoefficients) -> float:
    return math.sqrt(sum(totient(d) * a * a for d, a in alpha.entries.items()))


def reconstruct(alpha: RamanujanCoefficients, n: int) -> float:
    return float(sum(a * ramanujan_row(d)[n] for d, a in alpha.entries.items()))


def orthogonality_average(d: int, e: int) -> Fraction:
    """Exact mean of ``c_d(n) c_e(n)`` over ``n = 1..lcm(d, e)``."""
    d, e = int(d), int(e)
    if d < 1 or e < 1:
        raise ValueError("moduli must be positive")
    L = math.lcm(d, e)
    rd, re_ = ramanujan_row(d), ramanujan_row(e)
    return Fraction(sum(rd[n] * re_[n] for n in range(1, L + 1)), L)
