"""scikit-learn style wrappers.

:class:`EnergyFeatures` maps a batch of curves to a feature matrix (length,
thickness, ropelength and one energy per exponent) and slots into pipelines.
:class:`RopelengthMinimizer` runs a p-continuation on one curve in ``fit``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .energy import rp_energy
from .knot import SymmetryGroup222
from .optimize import OptimizerConfig, default_schedule, run_continuation
from .thickness import thickness
from .validation import check_curve, check_curves, check_exponents


class EnergyFeatures(TransformerMixin, BaseEstimator):
    """Stateless transformer: curves -> ``[length, thickness, ropelength, R^p...]``."""

    def __init__(self, exponents=(2, 16, 256), threads=None):
        self.exponents = exponents
        self.threads = threads

    def fit(self, X, y=None):
        self.exponents_ = check_exponents(self.exponents)
        self.n_features_out_ = 3 + len(self.exponents_)
        return self

    def transform(self, X):
        check_is_fitted(self)
        rows = []
        for K in check_curves(X):
            rep = thickness(K, self.threads)
            row = [K.length, rep.tau, rep.ropelength]
            row += [rp_energy(K, p, self.threads).value for p in self.exponents_]
            rows.append(row)
        return np.array(rows)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self)
        return np.array(["length", "thickness", "ropelength"] + [f"R{p:g}" for p in self.exponents_], dtype=object)


class RopelengthMinimizer(BaseEstimator):
    """Minimize ``R^p`` over a doubling schedule of exponents, starting from one curve.

    After ``fit`` the result is in ``knot_``, the per-stage records in
    ``report_`` and the final ropelength in ``ropelength_``.
    """

    def __init__(self, p_min=2, p_max=256, symmetry=None, max_iter=300, tol=1e-6,
                 resample_every=50, threads=None):
        self.p_min = p_min
        self.p_max = p_max
        self.symmetry = symmetry
        self.max_iter = max_iter
        self.tol = tol
        self.resample_every = resample_every
        self.threads = threads

    def _config(self) -> OptimizerConfig:
        sym = self.symmetry
        if sym == "222":
            sym = SymmetryGroup222()
        return OptimizerConfig(max_iter=self.max_iter, tol=self.tol, resample_every=self.resample_every,
                               symmetry=sym, threads=self.threads)

    def fit(self, X, y=None):
        K = check_curve(X)
        report = run_continuation(K, default_schedule(self.p_min, self.p_max), self._config())
        self.report_ = report
        self.knot_ = report.knot
        self.ropelength_ = thickness(report.knot, self.threads).ropelength
        self.energy_ = report.final.energy if report.stages else None
        return self

    def transform(self, X=None):
        """Vertices of the minimized curve."""
        check_is_fitted(self)
        return np.array(self.knot_.vertices)

    def fit_transform(self, X, y=None):
        return self.fit(X).transform()

    def score(self, X=None, y=None):
        """Negative ropelength of the minimized curve (higher is better)."""
        check_is_fitted(self)
        return -self.ropelength_
