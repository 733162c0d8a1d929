from __future__ import annotations

import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import StandardScaler

from ropelength.estimators import EnergyFeatures, RopelengthMinimizer
from ropelength.exceptions import DomainError
from ropelength.knot import generate_circle, generate_torus_knot
from ropelength.validation import check_curves, parse_exponent_list, parse_schedule


def test_energy_features_on_circles():
    curves = [generate_circle(64, r) for r in (0.5, 1.0, 2.0)]
    F = EnergyFeatures(exponents=(2, 64)).fit_transform(curves)
    assert F.shape == (3, 5)
    assert np.allclose(F[:, 1], [0.5, 1.0, 2.0])
    assert np.allclose(F[:, 2:], 128 * math.sin(math.pi / 64))


def test_energy_features_params_and_names():
    est = EnergyFeatures(exponents=(2, 4))
    assert est.get_params() == {"exponents": (2, 4), "threads": None}
    c = clone(est).set_params(exponents=(8,))
    assert list(c.fit([generate_circle(8)]).get_feature_names_out()) == ["length", "thickness", "ropelength", "R8"]
    with pytest.raises(NotFittedError):
        EnergyFeatures().transform([generate_circle(8)])


def test_energy_features_in_pipeline():
    curves = np.stack([generate_torus_knot(2, 3, n=64, major=m).vertices for m in (2.0, 2.5, 3.0)])
    out = make_pipeline(EnergyFeatures(exponents=(2,)), StandardScaler()).fit_transform(curves)
    assert out.shape == (3, 4)


def test_minimizer_fit():
    est = RopelengthMinimizer(p_min=2, p_max=4, max_iter=20)
    est.fit(generate_torus_knot(2, 3, n=64).vertices)
    assert est.report_.final.p == 4
    assert est.transform().shape == (64, 3)
    assert est.score() == -est.ropelength_
    with pytest.raises(NotFittedError):
        RopelengthMinimizer().transform()


def test_validation_helpers():
    assert parse_exponent_list("2, 16,256") == (2.0, 16.0, 256.0)
    assert parse_schedule("2:4096") == (2, 4096)
    with pytest.raises(DomainError):
        parse_exponent_list("0.5")
    with pytest.raises(DomainError):
        parse_schedule("2-4")
    with pytest.raises(DomainError):
        check_curves([])
    assert len(check_curves(generate_circle(8).vertices)) == 1
