import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from ramanujan_stability.certificates import KernelSpec, gain_closed_form
from ramanujan_stability.estimators import RamanujanProjector, RamanujanTraceTransformer, SmallGainCertifier
from ramanujan_stability.simulators import TraceConfig, example1_system, ramanujan_trace, simulate_discrete
from ramanujan_stability.space import RamanujanCoefficients, lcm_range, reconstruct


def test_get_params_and_clone():
    est = RamanujanProjector(max_modulus=6)
    assert est.get_params() == {"max_modulus": 6}
    twin = clone(est).set_params(max_modulus=4)
    assert twin.max_modulus == 4 and est.max_modulus == 6
    assert SmallGainCertifier(q=3).get_params()["q"] == 3
    assert set(RamanujanTraceTransformer().get_params()) == {"q", "lam", "window"}


def test_projector_round_trip(rng):
    D = 6
    L = lcm_range(D)
    alphas = [RamanujanCoefficients({d: rng.normal() for d in range(1, D + 1)}) for _ in range(3)]
    X = np.array([[reconstruct(a, n) for n in range(L)] for a in alphas])
    proj = RamanujanProjector(D).fit(X)
    C = proj.transform(X)
    assert C.shape == (3, D)
    for row, a in zip(C, alphas):
        assert np.allclose(row, [a[d] for d in range(1, D + 1)], atol=1e-9)
    assert np.allclose(proj.inverse_transform(C), X, atol=1e-9)
    expected = [np.sqrt(sum(phi * a[d] ** 2 for d, phi in zip(range(1, D + 1), [1, 1, 2, 2, 4, 2]))) for a in alphas]
    assert np.allclose(proj.parseval_norms(X), expected)


def test_projector_validation():
    with pytest.raises(NotFittedError):
        RamanujanProjector().transform([[1.0, 2.0]])
    proj = RamanujanProjector(3).fit(np.ones((1, 6)))
    with pytest.raises(ValueError):
        proj.transform(np.ones((1, 5)))
    with pytest.raises(ValueError):
        RamanujanProjector(0).fit(np.ones((1, 6)))
    with pytest.raises(ValueError):
        RamanujanProjector().fit([[np.nan, 1.0]])


def test_trace_transformer_matches_functional_core():
    traj = simulate_discrete(example1_system(), (1, 1), 60)
    tr = RamanujanTraceTransformer(q=5, lam=0.9)
    out = tr.fit_transform(traj.states)
    ref = ramanujan_trace(traj, TraceConfig(5, 0.9))
    assert out.shape == (61, 1)
    assert np.array_equal(out.ravel(), ref.value)
    assert np.array_equal(tr.clamped_, ref.clamped)


def test_trace_transformer_in_pipeline():
    traj = simulate_discrete(example1_system(), (1, 1), 30)
    pipe = make_pipeline(FunctionTransformer(lambda X: 2 * X), RamanujanTraceTransformer(q=5, lam=0.9))
    out = pipe.fit_transform(traj.states).ravel()
    ref = RamanujanTraceTransformer(q=5, lam=0.9).fit_transform(traj.states).ravel()
    assert np.allclose(out, 2 * ref)


def test_certifier_predict_and_score():
    est = SmallGainCertifier(q=5, M=0.1, r=0.5).fit()
    G = gain_closed_form(KernelSpec(5, 0.1, 0.5, "absolute"))
    assert est.gain_ == G and est.stable_
    assert np.allclose(est.predict([0.0, 1.0, 2.0]), np.array([0.0, 1.0, 2.0]) / (1 - G))
    assert est.score() == pytest.approx(1 - G)


def test_certifier_unstable():
    est = SmallGainCertifier(q=5, M=1.0, r=0.9).fit()
    assert not est.stable_
    with pytest.raises(ValueError, match="small-gain"):
        est.predict([1.0])
    with pytest.raises(ValueError):
        SmallGainCertifier(q=5).fit().predict([-1.0])
