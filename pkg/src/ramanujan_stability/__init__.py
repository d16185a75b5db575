"""Ramanujan sums, Ramanujan inner products and small-gain stability tools
for discrete-time and hybrid systems."""

from .arithmetic import (
    Factorization,
    RamanujanRow,
    factorize,
    is_prime,
    moebius,
    prime_sieve,
    ramanujan_row,
    ramanujan_sum,
    ramanujan_sum_direct,
    totient,
)
from .certificates import (
    ClassKSpec,
    KernelSpec,
    StabilityCertificate,
    certify,
    delta_for_epsilon,
    discrete_lyapunov,
    empirical_gain,
    gain_closed_form,
    gain_truncated,
)
from .estimators import RamanujanProjector, RamanujanTraceTransformer, SmallGainCertifier
from .simulators import (
    DiscreteSystem,
    DisturbanceSpec,
    HybridSystem,
    TraceConfig,
    euclidean_trace,
    filter_demo,
    hybrid_ramanujan_trace,
    lyapunov_flow_check,
    lyapunov_jump_check,
    make_disturbance,
    ramanujan_trace,
    simulate_discrete,
    simulate_hybrid,
)
from .space import (
    FiniteSequence,
    RamanujanCoefficients,
    TruncationConfig,
    cesaro_weight,
    orthogonality_average,
    parseval_inner,
    parseval_norm,
    project_coefficients,
    reconstruct,
    truncated_inner,
    truncated_norm,
)

__version__ = "0.1.0"
