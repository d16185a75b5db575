"""scikit-learn compatible wrappers.

These let the Ramanujan projection, the per-step trace and the small-gain
certificate sit inside ``Pipeline`` / ``GridSearchCV`` style code. All
numerical work is delegated to the functional modules.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .arithmetic import totient
from .certificates import ClassKSpec, KernelSpec, certify
from .simulators import TraceConfig, trace_from_energies, energy_trace
from .space import FiniteSequence, RamanujanCoefficients, project_coefficients, reconstruct


class RamanujanProjector(TransformerMixin, BaseEstimator):
    """Map periodic signals to Ramanujan coefficients ``alpha_1..alpha_D``.

    Each row of ``X`` is one period of a signal. ``transform`` returns an
    ``(n_signals, max_modulus)`` coefficient matrix and ``inverse_transform``
    rebuilds one period from coefficients.

    Parameters
    ----------
    max_modulus : int, default=10
        Largest modulus ``D`` in the expansion.
    """

    def __init__(self, max_modulus=10):
        self.max_modulus = max_modulus

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        if int(self.max_modulus) < 1:
            raise ValueError("max_modulus must be >= 1")
        self.n_features_in_ = X.shape[1]
        self.moduli_ = np.arange(1, int(self.max_modulus) + 1)
        self.totients_ = np.array([totient(d) for d in self.moduli_])
        return self

    def transform(self, X):
        check_is_fitted(self, "moduli_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, projector was fitted with {self.n_features_in_}"
            )
        D = int(self.moduli_[-1])
        out = np.empty((X.shape[0], D))
        for i, row in enumerate(X):
            coeffs = project_coefficients(FiniteSequence(0, row), D)
            out[i] = [coeffs[d] for d in self.moduli_]
        return out

    def inverse_transform(self, C):
        check_is_fitted(self, "moduli_")
        C = check_array(C, dtype=float)
        out = np.empty((C.shape[0], self.n_features_in_))
        for i, row in enumerate(C):
            alpha = RamanujanCoefficients(dict(zip(self.moduli_.tolist(), row)))
            out[i] = [reconstruct(alpha, n) for n in range(self.n_features_in_)]
        return out

    def parseval_norms(self, X):
        """Coefficient-side Ramanujan norm of each signal."""
        C = self.transform(X)
        return np.sqrt(C**2 @ self.totients_)


class RamanujanTraceTransformer(TransformerMixin, BaseEstimator):
    """Per-step Ramanujan trace of a state history.

    ``X`` is one trajectory with samples on rows and state components on
    columns. ``transform`` returns a single column of trace values; the
    clamping flags of the last call are kept in ``clamped_``.
    """

    def __init__(self, q=5, lam=0.9, window=None):
        self.q = q
        self.lam = lam
        self.window = window

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        self.config_ = TraceConfig(q=int(self.q), lam=float(self.lam), window=self.window)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "config_")
        X = check_array(X, dtype=float)
        trace = trace_from_energies(np.arange(X.shape[0]), energy_trace(X), self.config_)
        self.clamped_ = trace.clamped
        return trace.value.reshape(-1, 1)


class SmallGainCertifier(BaseEstimator):
    """Small-gain certificate as an estimator.

    ``fit`` computes the gain; ``predict`` maps initial Ramanujan norms to
    uniform bounds ``alpha(x0) / (1 - G)``.
    """

    def __init__(self, q=5, M=0.1, r=0.5, mode="absolute", alpha_a=1.0, alpha_p=1.0):
        self.q = q
        self.M = M
        self.r = r
        self.mode = mode
        self.alpha_a = alpha_a
        self.alpha_p = alpha_p

    def fit(self, X=None, y=None):
        self.kernel_ = KernelSpec(self.q, self.M, self.r, self.mode)
        self.alpha_ = ClassKSpec(self.alpha_a, self.alpha_p)
        self.certificate_ = certify(self.kernel_, self.alpha_, 0.0)
        self.gain_ = self.certificate_.G
        self.stable_ = self.certificate_.stable
        return self

    def predict(self, X):
        check_is_fitted(self, "certificate_")
        x0 = check_array(np.asarray(X, dtype=float).reshape(-1, 1)).ravel()
        if not self.stable_:
            raise ValueError(f"kernel is not small-gain (G = {self.gain_}); no bound exists")
        if np.any(x0 < 0):
            raise ValueError("initial norms must be nonnegative")
        return np.array([certify(self.kernel_, self.alpha_, v).uniform_bound for v in x0])

    def score(self, X=None, y=None):
        """Stability margin ``1 - G``."""
        check_is_fitted(self, "certificate_")
        return 1.0 - self.gain_

