"""Exact integer arithmetic: primes, factorization, totient, Moebius and
Ramanujan sums.

Ramanujan sums are evaluated with Hoelder's closed form. The exponential-sum
definition is kept as :func:`ramanujan_sum_direct`, which is only meant as an
independent cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

__all__ = [
    "Factorization",
    "RamanujanRow",
    "prime_sieve",
    "is_prime",
    "factorize",
    "totient",
    "moebius",
    "ramanujan_sum_direct",
    "ramanujan_sum",
    "ramanujan_row",
    "totient_table",
    "moebius_table",
    "ramanujan_sums_over_moduli",
]

_DIRECT_RESIDUAL_TOL = 1e-6


def _require_positive(name: str, value: int) -> int:
    value = int(value)
    if value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value}")
    return value


@dataclass(frozen=True)
class Factorization:
    """Canonical prime factorization ``n = prod(p**e)``, primes increasing."""

    n: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prod = 1
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1:
                raise ValueError(f"non-canonical factorization {self.factors}")
            last = p
            prod *= p**e
        if prod != self.n:
            raise ValueError(f"factors multiply to {prod}, not {self.n}")

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def as_dict(self) -> dict[int, int]:
        return dict(self.factors)

    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)


@dataclass(frozen=True)
class RamanujanRow:
    """One full period of ``c_q``: ``values[s] == c_q(s)`` for ``0 <= s < q``."""

    q: int
    values: tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != self.q:
            raise ValueError(f"row for q={self.q} must hold {self.q} values")

    def __getitem__(self, n: int) -> int:
        return self.values[int(n) % self.q]

    def __len__(self) -> int:
        return self.q

    def __iter__(self):
        return iter(self.values)

    @cached_property
    def _array(self) -> np.ndarray:
        arr = np.asarray(self.values, dtype=np.int64)
        arr.setflags(write=False)
        return arr

    def as_array(self) -> np.ndarray:
        return self._array


def prime_sieve(N: int) -> list[int]:
    """Sorted list of all primes ``<= N`` (sieve of Eratosthenes)."""
    N = int(N)
    if N < 2:
        return []
    flags = bytearray([1]) * (N + 1)
    flags[0] = flags[1] = 0
    for p in range(2, math.isqrt(N) + 1):
        if flags[p]:
            flags[p * p :: p] = bytes(len(range(p * p, N + 1, p)))
    return [i for i, f in enumerate(flags) if f]


def is_prime(n: int) -> bool:
    n = int(n)
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    for p in range(3, math.isqrt(n) + 1, 2):
        if n % p == 0:
            return False
    return True


@lru_cache(maxsize=4096)
def factorize(n: int) -> Factorization:
    """Factor ``n >= 1`` by trial division up to ``sqrt(n)``."""
    n = _require_positive("n", n)
    factors = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors.append((p, e))
        p += 1 if p == 2 else 2
    if m > 1:
        factors.append((m, 1))
    return Factorization(n, tuple(factors))


def totient(n: int) -> int:
    """Euler's totient, exact."""
    result = _require_positive("n", n)
    for p, _ in factorize(n).factors:
        result = result // p * (p - 1)
    return result


def moebius(n: int) -> int:
    fac = factorize(_require_positive("n", n))
    if not fac.is_squarefree():
        return 0
    return -1 if len(fac.factors) % 2 else 1


def ramanujan_sum_direct(q: int, n: int) -> int:
    """Evaluate ``c_q(n)`` from its exponential-sum definition.

    Only the real part is accumulated (the imaginary parts cancel in pairs
    ``k, q - k``). The float result is rounded to the nearest integer; a
    rounding residual above 1e-6 raises :class:`ArithmeticError`.
    """
    q = _require_positive("q", q)
    n = int(n)
    total = 0.0
    for k in range(1, q + 1):
        if math.gcd(k, q) == 1:
            # k*n reduced mod q keeps the cosine argument inside one turn
            total += math.cos(2.0 * math.pi * ((k * n) % q) / q)
    rounded = round(total)
    if abs(total - rounded) > _DIRECT_RESIDUAL_TOL:
        raise ArithmeticError(
            f"c_{q}({n}) direct sum {total!r} is not close to an integer"
        )
    return int(rounded)


def ramanujan_sum(q: int, n: int) -> int:
    """``c_q(n) = mu(q/d) * phi(q) / phi(q/d)`` with ``d = gcd(n, q)``.

    Negative ``n`` uses ``c_q(|n|)``; ``n == 0`` gives ``d = q``.
    """
    q = _require_positive("q", q)
    d = math.gcd(abs(int(n)), q)  # gcd(0, q) == q
    m = q // d
    mu = moebius(m)
    if mu == 0:
        return 0
    return mu * (totient(q) // totient(m))


@lru_cache(maxsize=1024)
def ramanujan_row(q: int) -> RamanujanRow:
    """Full period table of ``c_q``."""
    q = _require_positive("q", q)
    return RamanujanRow(q, tuple(ramanujan_sum(q, s) for s in range(q)))


@lru_cache(maxsize=8)
def _tables(N: int) -> tuple[np.ndarray, np.ndarray]:
    # Eratosthenes-style sieve for phi and mu on 0..N
    phi = np.arange(N + 1, dtype=np.int64)
    mu = np.ones(N + 1, dtype=np.int64)
    mu[0] = 0
    is_comp = np.zeros(N + 1, dtype=bool)
    for p in range(2, N + 1):
        if is_comp[p]:
            continue
        phi[p::p] -= phi[p::p] // p
        mu[p::p] *= -1
        if p * p <= N:
            mu[p * p :: p * p] = 0
        is_comp[2 * p :: p] = True
    phi.setflags(write=False)
    mu.setflags(write=False)
    return phi, mu


def totient_table(N: int) -> np.ndarray:
    """``phi(0..N)`` as an int64 array (entry 0 is 0)."""
    return _tables(int(N))[0]


def moebius_table(N: int) -> np.ndarray:
    """``mu(0..N)`` as an int64 array (entry 0 is 0)."""
    return _tables(int(N))[1]


def ramanujan_sums_over_moduli(n: int, Q: int) -> np.ndarray:
    """Vector ``[c_1(n), ..., c_Q(n)]`` via the closed form on sieved tables."""
    Q = _require_positive("Q", Q)
    phi, mu = _tables(Q)
    q = np.arange(1, Q + 1, dtype=np.int64)
    d = np.gcd(abs(int(n)), q)
    m = q // d
    return mu[m] * (phi[q] // phi[m])
