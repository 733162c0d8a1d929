from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ropelength.exceptions import DomainError
from ropelength.geom import (
    bitangent_sphere_radius,
    circumradius,
    pairwise_tangent_point_radii,
    tangent_point_radius,
)

from conftest import random_rigid

coord = st.floats(-10, 10, allow_nan=False)
point = st.tuples(coord, coord, coord).map(np.array)


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


# -- circumradius ----------------------------------------------------------------


def test_circumradius_right_triangle():
    assert circumradius((0, 0, 0), (3, 0, 0), (0, 4, 0)) == pytest.approx(2.5, rel=1e-15)


def test_circumradius_collinear_is_inf():
    assert circumradius((0, 0, 0), (1, 0, 0), (2, 0, 0)) == math.inf


def test_circumradius_equilateral():
    c = (0.5, math.sqrt(3) / 2, 0)
    assert circumradius((0, 0, 0), (1, 0, 0), c) == pytest.approx(1 / math.sqrt(3), rel=1e-14)


def test_circumradius_coincident_names_pair():
    with pytest.raises(DomainError, match="c and a"):
        circumradius((1, 2, 3), (0, 0, 0), (1, 2, 3))


def test_circumradius_matches_law_of_sines():
    # Independent route: r = |bc| / (2 sin A).
    rng = np.random.default_rng(1)
    for _ in range(50):
        a, b, c = rng.normal(size=(3, 3))
        u, v = b - a, c - a
        A = math.acos(np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v)))
        assert circumradius(a, b, c) == pytest.approx(np.linalg.norm(c - b) / (2 * math.sin(A)), rel=1e-10)


@given(point, point, point)
def test_circumradius_permutation_symmetric(a, b, c):
    sides = [np.linalg.norm(a - b), np.linalg.norm(b - c), np.linalg.norm(c - a)]
    if min(sides) < 1e-3:
        return
    ref = circumradius(a, b, c)
    for perm in itertools.permutations((a, b, c)):
        r = circumradius(*perm)
        if math.isinf(ref):
            assert math.isinf(r)
        else:
            assert r == pytest.approx(ref, rel=1e-12)


# -- tangent-point radius ----------------------------------------------------------------


def test_tangent_point_perpendicular_chord():
    assert tangent_point_radius((0, 0, 0), (1, 0, 0), (0, 2, 0)) == 1.0


def test_tangent_point_on_tangent_line():
    assert tangent_point_radius((0, 0, 0), (1, 0, 0), (2, 0, 0)) == math.inf


@pytest.mark.parametrize("theta", [1e-2, 0.3, 1.0, 2.5, math.pi, 4.0, 6.28])
def test_tangent_point_unit_circle(theta):
    y = (math.cos(theta), math.sin(theta), 0.0)
    assert tangent_point_radius((1, 0, 0), (0, 1, 0), y) == pytest.approx(1.0, rel=1e-9)


def test_tangent_point_coincident_raises():
    with pytest.raises(DomainError):
        tangent_point_radius((1, 1, 1), (1, 0, 0), (1, 1, 1))


def test_tangent_point_rejects_non_unit_tangent():
    with pytest.raises(DomainError):
        tangent_point_radius((0, 0, 0), (2, 0, 0), (0, 1, 0))


def test_tangent_point_matches_displayed_formula():
    rng = np.random.default_rng(2)
    for _ in range(50):
        x, y = rng.normal(size=(2, 3))
        t = unit(rng.normal(size=3))
        d2 = np.sum((x - y) ** 2)
        direct = d2 / (2 * math.sqrt(d2 - np.dot(t, x - y) ** 2))
        assert tangent_point_radius(x, t, y) == pytest.approx(direct, rel=1e-9)


def test_pairwise_matrix_matches_scalar_calls():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(9, 3))
    T = rng.normal(size=(9, 3))
    T /= np.linalg.norm(T, axis=1, keepdims=True)
    R = pairwise_tangent_point_radii(X, T)
    for i in range(9):
        assert R[i, i] == math.inf
        for j in range(9):
            if i != j:
                assert R[i, j] == pytest.approx(tangent_point_radius(X[i], T[i], X[j]), rel=1e-14)


# -- bitangent sphere ----------------------------------------------------------------


def test_bitangent_antipodal_circle_points():
    assert bitangent_sphere_radius((1, 0, 0), (0, 1, 0), (-1, 0, 0), (0, 1, 0)) == pytest.approx(1.0, rel=1e-12)


def test_bitangent_parallel_tangents_null_space():
    assert bitangent_sphere_radius((0, 0, 0), (1, 0, 0), (0, 0, 2), (1, 0, 0)) == pytest.approx(1.0, rel=1e-12)


def test_bitangent_inconsistent_is_inf():
    # Both tangents along the chord: no sphere is tangent to both lines.
    assert bitangent_sphere_radius((0, 0, 0), (1, 0, 0), (1, 0, 0), (1, 0, 0)) == math.inf


def test_bitangent_coincident_raises():
    with pytest.raises(DomainError):
        bitangent_sphere_radius((0, 0, 0), (1, 0, 0), (0, 0, 0), (0, 1, 0))


def _bitangent_grid_oracle(x, tx, y, ty):
    """Centres lie on the line where the two normal planes meet; grid it for |c-x| = |c-y|."""
    direction = np.cross(tx, ty)
    A = np.stack([tx, ty])
    c0 = np.linalg.lstsq(A, np.array([tx @ x, ty @ y]), rcond=None)[0]
    direction /= np.linalg.norm(direction)
    f = lambda s: np.linalg.norm(c0 + s * direction - x) - np.linalg.norm(c0 + s * direction - y)
    s = np.linspace(-100, 100, 200001)
    vals = np.array([f(v) for v in s[::100]])
    k = int(np.flatnonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0])
    lo, hi = s[::100][k], s[::100][k + 1]
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.sign(f(mid)) == np.sign(f(lo)):
            lo = mid
        else:
            hi = mid
    return float(np.linalg.norm(c0 + 0.5 * (lo + hi) * direction - x))


def test_bitangent_generic_matches_grid_oracle():
    rng = np.random.default_rng(4)
    checked = 0
    while checked < 10:
        x, y = rng.normal(size=(2, 3))
        tx, ty = unit(rng.normal(size=3)), unit(rng.normal(size=3))
        r = bitangent_sphere_radius(x, tx, y, ty)
        if not (0.01 < r < 50):
            continue
        assert r == pytest.approx(_bitangent_grid_oracle(x, tx, y, ty), rel=1e-8)
        checked += 1


def test_inf_bitangent_equals_inf_tangent_point_on_ellipse():
    n = 96
    s = 2 * np.pi * np.arange(n) / n
    X = np.column_stack([2 * np.cos(s), np.sin(s), np.zeros(n)])
    T = np.column_stack([-2 * np.sin(s), np.cos(s), np.zeros(n)])
    T /= np.linalg.norm(T, axis=1, keepdims=True)
    tp = pairwise_tangent_point_radii(X, T).min()
    bt = min(bitangent_sphere_radius(X[i], T[i], X[j], T[j]) for i in range(n) for j in range(n) if i != j)
    assert bt == pytest.approx(tp, rel=0.01)
    assert tp == pytest.approx(0.5, rel=0.01)  # osculating radius b^2/a at the major-axis ends


# -- invariances -----------------------------------------------------------------------


def test_rigid_motion_and_scaling():
    rng = np.random.default_rng(5)
    for _ in range(20):
        a, b, c = rng.normal(size=(3, 3))
        t1, t2 = unit(rng.normal(size=3)), unit(rng.normal(size=3))
        R, shift = random_rigid(rng)
        lam = float(rng.uniform(0.1, 10))
        move = lambda p: lam * (R @ p) + shift
        assert circumradius(move(a), move(b), move(c)) == pytest.approx(lam * circumradius(a, b, c), rel=1e-12)
        assert tangent_point_radius(move(a), R @ t1, move(b)) == pytest.approx(
            lam * tangent_point_radius(a, t1, b), rel=1e-12)
        assert bitangent_sphere_radius(move(a), R @ t1, move(b), R @ t2) == pytest.approx(
            lam * bitangent_sphere_radius(a, t1, b, t2), rel=1e-10)
