import math

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def trial_division_primes(N):
    return [n for n in range(2, N + 1) if all(n % d for d in range(2, math.isqrt(n) + 1))]


def brute_totient(n):
    return sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(12345)
