"""Pointwise radius primitives: circumradius, tangent-point radius, bitangent sphere.

All radii are plain floats; ``math.inf`` marks the collinear/degenerate case and is
never an error.
"""

from __future__ import annotations

import math

import numpy as np

from ._parallel import map_blocks
from .exceptions import DomainError

#: Relative tolerance for collinearity and coincidence tests.
REL_TOL = 1e-14


def as_point(p, name="point") -> np.ndarray:
    a = np.asarray(p, dtype=float)
    if a.shape != (3,):
        raise DomainError(f"{name} must have 3 coordinates, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError(f"{name} has non-finite coordinates")
    return a


def as_unit_vector(t, name="tangent", tol=1e-12) -> np.ndarray:
    a = as_point(t, name)
    if abs(np.linalg.norm(a) - 1.0) > tol:
        raise DomainError(f"{name} is not a unit vector (norm {np.linalg.norm(a)!r})")
    return a


def _magnitude(*pts) -> float:
    return max(float(np.abs(p).max()) for p in pts)


def circumradius(a, b, c) -> float:
    """Radius of the circle through three points, ``inf`` when collinear."""
    a, b, c = as_point(a, "a"), as_point(b, "b"), as_point(c, "c")
    sides = {
        ("a", "b"): np.linalg.norm(b - a),
        ("b", "c"): np.linalg.norm(c - b),
        ("c", "a"): np.linalg.norm(a - c),
    }
    longest = max(sides.values())
    for pair, length in sides.items():
        if length <= REL_TOL * longest:
            raise DomainError(f"coincident points {pair[0]} and {pair[1]}")
    area = 0.5 * np.linalg.norm(np.cross(b - a, c - a))
    if area < REL_TOL * longest**2:
        return math.inf
    ab, bc, ca = sides.values()
    return float(ab * bc * ca / (4.0 * area))


def tangent_point_radius(x, t, y) -> float:
    """Radius of the circle tangent to ``t`` at ``x`` and passing through ``y``.

    Equals ``|x-y|^2 / (2 sqrt(|x-y|^2 - (t.(x-y))^2))``; the radicand is evaluated
    as ``|t x (y-x)|^2`` to avoid cancellation on nearly straight pairs.
    """
    x, y = as_point(x, "x"), as_point(y, "y")
    t = as_unit_vector(t, "t")
    d = y - x
    d2 = float(d @ d)
    if math.sqrt(d2) <= REL_TOL * _magnitude(x, y):
        raise DomainError("tangent-point radius undefined for y == x")
    c = np.cross(t, d)
    q = float(c @ c)
    if q < REL_TOL * d2:
        return math.inf
    return d2 / (2.0 * math.sqrt(q))


def bitangent_sphere_radius(x, tx, y, ty, tol=1e-9) -> float:
    """Radius of the smallest sphere tangent to line ``(x, tx)`` at x and ``(y, ty)`` at y.

    The centre ``c`` solves ``(c-x).tx = 0``, ``(c-y).ty = 0`` and
    ``2 c.(y-x) = |y|^2 - |x|^2``. A rank-deficient system is resolved by minimizing
    ``|c - x|`` over its solution set; an inconsistent one yields ``inf``.
    """
    x, y = as_point(x, "x"), as_point(y, "y")
    tx, ty = as_unit_vector(tx, "tx"), as_unit_vector(ty, "ty")
    d = y - x
    dist = float(np.linalg.norm(d))
    if dist <= REL_TOL * _magnitude(x, y):
        raise DomainError("bitangent sphere undefined for x == y")

    # Work in coordinates centred at x and scaled by |y-x| so that tolerances are relative.
    e = d / dist
    A = np.stack([tx, ty, 2.0 * e])
    rhs = np.array([0.0, float(ty @ e), 1.0])
    U, s, Vt = np.linalg.svd(A)
    rank = int(np.sum(s > tol * s[0]))
    coef = U.T @ rhs
    if rank < 3 and np.linalg.norm(coef[rank:]) > tol * max(1.0, np.linalg.norm(rhs)):
        return math.inf
    # Minimum-norm solution is exactly the point of the solution set closest to x.
    c = Vt[:rank].T @ (coef[:rank] / s[:rank])
    return float(np.linalg.norm(c)) * dist


def pairwise_tangent_point_radii(X: np.ndarray, T: np.ndarray, threads=None) -> np.ndarray:
    """Matrix ``r[i, j] = tangent_point_radius(X[i], T[i], X[j])``.

    The diagonal is ``inf`` and coincident off-diagonal pairs give ``0``. Thickness
    and energy both call this so they see bit-identical radii.
    """
    X = np.asarray(X, dtype=float)
    T = np.asarray(T, dtype=float)

    def block(b):
        d = X[None, :, :] - X[b, None, :]
        d2 = np.einsum("ijk,ijk->ij", d, d)
        c = np.cross(T[b, None, :], d)
        q = np.einsum("ijk,ijk->ij", c, c)
        with np.errstate(divide="ignore", invalid="ignore"):
            r = d2 / (2.0 * np.sqrt(q))
        r[q < REL_TOL * d2] = np.inf
        r[d2 == 0.0] = 0.0
        rows = np.arange(b.start, b.stop)
        r[rows - b.start, rows] = np.inf
        return r

    return np.vstack(map_blocks(block, X.shape[0], threads))


def circumradii_with(X: np.ndarray, i: int) -> np.ndarray:
    """Matrix ``r[j, k] = circumradius(X[i], X[j], X[k])`` with ``inf`` on invalid triples."""
    a = X[i]
    u = X - a
    lu = np.linalg.norm(u, axis=1)
    cross = np.cross(u[:, None, :], u[None, :, :])
    area2 = np.linalg.norm(cross, axis=2)
    jk = np.linalg.norm(X[:, None, :] - X[None, :, :], axis=2)
    longest = np.maximum(np.maximum(lu[:, None], lu[None, :]), jk)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = lu[:, None] * lu[None, :] * jk / (2.0 * area2)
    r[0.5 * area2 < REL_TOL * longest**2] = np.inf
    r[i, :] = np.inf
    r[:, i] = np.inf
    np.fill_diagonal(r, np.inf)
    return r
