from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ropelength.energy import (
    clasp_curve,
    clasp_divergence_series,
    log_energy,
    rp_energy,
    rp_gradient,
    rp_local,
)
from ropelength.exceptions import DomainError, ResolutionError, SingularConfigurationError
from ropelength.knot import PolyKnot, generate_circle, generate_torus_knot
from ropelength.optimize import project_rigid
from ropelength.thickness import thickness

from conftest import random_rigid, random_unknot


def naive_energy(K, p):
    """Plain double sum on the unit-length rescaling, no log-domain shifting."""
    X = K.vertices / K.length
    w = K.weights / K.length
    T = K.tangents
    num = 0.0
    for i in range(K.n):
        for j in range(K.n):
            if i == j:
                continue
            d = X[j] - X[i]
            q = np.linalg.norm(np.cross(T[i], d))
            r = math.inf if q == 0 else float(d @ d) / (2 * q)
            num += w[i] * w[j] * r ** (-p)
    return (num / (1 - np.sum(w * w))) ** (1 / p)


# -- circle --------------------------------------------------------------------------


@pytest.mark.parametrize("p", [1, 2, 3.5, 64, 4096])
@pytest.mark.parametrize("radius", [0.01, 1.0, 300.0])
def test_circle_energy_closed_form(p, radius):
    K = generate_circle(256, radius)
    assert rp_energy(K, p).value == pytest.approx(512 * math.sin(math.pi / 256), rel=1e-10)


def test_circle_rp_local_closed_form():
    n, p = 64, 7.0
    K = generate_circle(n)
    rho = 1.0 / (2 * n * math.sin(math.pi / n))
    expected = math.log(1 - 1 / n) - p * math.log(rho)
    assert rp_local(K, 5, p).log_value == pytest.approx(expected, rel=1e-12)


# -- rp_local ---------------------------------------------------------------------------


def test_rp_local_naive_p1(rng):
    K = random_unknot(rng, 16)
    X = K.vertices / K.length
    total = 0.0
    for j in range(16):
        if j != 3:
            d = X[j] - X[3]
            total += K.weights[j] / K.length * 2 * np.linalg.norm(np.cross(K.tangents[3], d)) / (d @ d)
    assert rp_local(K, 3, 1).value == pytest.approx(total, rel=1e-12)


def test_rp_local_dominant_term():
    # Pinch two far-apart vertices together so one radius dominates at large p.
    K = generate_circle(32)
    X = K.vertices.copy()
    X[16] *= 0.02 / np.linalg.norm(X[16]) * np.array([-1, 1, 1])
    X[16] = X[0] + np.array([0, 0, 0.05])
    X[15] = 0.5 * (X[14] + X[16])
    X[17] = 0.5 * (X[18] + X[16])
    K = PolyKnot(X)
    U = K.vertices / K.length
    d = U - U[0]
    r = np.array([np.inf] + [float(d[j] @ d[j]) / (2 * np.linalg.norm(np.cross(K.tangents[0], d[j]))) for j in range(1, 32)])
    j = int(np.argmin(r))
    p = 400
    dominant = math.log(K.weights[j] / K.length) - p * math.log(r[j])
    assert rp_local(K, 0, p).log_value == pytest.approx(dominant, abs=1e-3)


def test_rp_local_singular():
    X = generate_circle(12).vertices.copy()
    X[6] = X[0]
    K = PolyKnot(X)
    with pytest.raises(SingularConfigurationError):
        rp_local(K, 0, 2)


# -- rp_energy -----------------------------------------------------------------------------


@pytest.mark.parametrize("p", [1, 2, 5, 32])
def test_energy_matches_naive_sum(rng, p):
    K = random_unknot(rng, 20)
    assert rp_energy(K, p).value == pytest.approx(naive_energy(K, p), rel=1e-12)


def test_bounded_by_ropelength_and_monotone(rng):
    for _ in range(5):
        K = random_unknot(rng, 40)
        rope = thickness(K).ropelength
        prev = 0.0
        for k in range(13):
            e = rp_energy(K, 2**k).value
            assert e <= rope
            assert e >= prev * (1 - 1e-10)
            prev = e


def test_large_p_limit_trefoil():
    K = generate_torus_knot(2, 3, n=200)
    rep = thickness(K)
    i, j = rep.argmin
    W = K.length**2 - np.sum(K.weights**2)
    mass = K.weights[i] * K.weights[j] / W
    gaps = []
    for p in (256, 4096, 65536):
        e = rp_energy(K, p).value
        # The minimal pair alone contributes mass * rope^p to the p-th power mean.
        assert rep.ropelength * mass ** (1 / p) <= e <= rep.ropelength
        gaps.append((rep.ropelength - e) / rep.ropelength)
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-3


def test_invariances(rng):
    K = random_unknot(rng, 30)
    R, shift = random_rigid(rng)
    for p in (1.5, 16, 1024):
        ref = rp_energy(K, p).value
        for M in (K.transformed(R, shift, 0.1), K.transformed(R, shift, 10.0), K.shifted(11), K.reversed()):
            assert rp_energy(M, p).value == pytest.approx(ref, rel=1e-10)


@given(st.floats(0.5, 0.99))
def test_exponent_domain(p):
    with pytest.raises(DomainError):
        rp_energy(generate_circle(8), p)


def test_coincident_vertices_are_singular():
    X = generate_circle(12).vertices.copy()
    X[6] = X[0]
    with pytest.raises(SingularConfigurationError):
        rp_energy(PolyKnot(X), 2)


def test_thread_count_is_bit_identical():
    K = generate_torus_knot(2, 3, n=300)
    a = rp_energy(K, 64, threads=1)
    b = rp_energy(K, 64, threads=4)
    ga = rp_gradient(K, 64, threads=1).vectors
    gb = rp_gradient(K, 64, threads=3).vectors
    assert a == b
    assert np.array_equal(ga, gb)


# -- gradient ---------------------------------------------------------------------------


@pytest.mark.parametrize("p", [2, 16, 256])
def test_gradient_finite_differences(rng, p):
    K = random_unknot(rng, 24)
    X = K.vertices.copy()
    g = rp_gradient(K, p).vectors
    h = 1e-6 * K.length
    fd = np.zeros_like(X)
    for i in range(X.shape[0]):
        for k in range(3):
            Xp, Xm = X.copy(), X.copy()
            Xp[i, k] += h
            Xm[i, k] -= h
            fd[i, k] = (log_energy(Xp, p)[0] - log_energy(Xm, p)[0]) / (2 * h)
    scale = np.abs(g).max()
    big = np.abs(g) > 1e-3 * scale
    assert np.all(np.abs(fd - g)[big] / np.abs(g)[big] < 1e-5)
    assert np.all(np.abs(fd - g)[~big] < 1e-8 * scale)


def test_gradient_translation_invariance(rng):
    K = random_unknot(rng, 30)
    g = rp_gradient(K, 8).vectors
    assert np.linalg.norm(g.sum(axis=0)) < 1e-9 * np.linalg.norm(g)


def test_gradient_is_scale_orthogonal(rng):
    # log R^p is scale invariant: the gradient is orthogonal to the position field.
    K = random_unknot(rng, 30)
    g = rp_gradient(K, 8).vectors
    assert abs(np.sum(g * K.vertices)) < 1e-9 * np.linalg.norm(g) * np.linalg.norm(K.vertices)


@pytest.mark.parametrize("p", [2, 64, 4096])
def test_regular_polygon_is_critical(p):
    K = generate_circle(48)
    g = rp_gradient(K, p)
    assert np.abs(project_rigid(K.vertices, g.vectors)).max() < 1e-8


def test_gradient_norm_resolution_independent():
    norms = [rp_gradient(generate_torus_knot(2, 3, n=n), 4).norm for n in (100, 200, 400)]
    assert norms[1] == pytest.approx(norms[2], rel=0.02)


def test_gradient_exponent_limit():
    with pytest.raises(DomainError):
        rp_gradient(generate_circle(8), 8192)


# -- clasp -----------------------------------------------------------------------------


def test_clasp_crossing_gap():
    gap = 0.05
    K = clasp_curve(gap, n=1024)
    X = K.vertices
    near = np.abs(X[:, 0]) < 0.02
    assert np.abs(X[near, 2]).max() == pytest.approx(gap / 2, rel=1e-3)
    assert thickness(K).tau <= gap / 2 * 1.01


def test_clasp_series_validation():
    with pytest.raises(DomainError):
        clasp_divergence_series(4, [0.1, 0.2])
    with pytest.raises(ResolutionError):
        clasp_divergence_series(4, [0.2, 0.001], n=512)


def test_clasp_series_diverges_for_large_p():
    gaps = [0.2, 0.1, 0.05]
    e4 = [e.value for e in clasp_divergence_series(4, gaps, n=512)]
    e1 = [e.value for e in clasp_divergence_series(1, gaps, n=512)]
    assert e4[2] / e4[1] > 1.3 and e4[1] / e4[0] > 1.3
    assert max(e1) / min(e1) < 1.1
