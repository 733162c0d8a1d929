"""Discrete thickness, local thickness, ropelength and a brute-force local-feature-size check."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .exceptions import DomainError
from .geom import circumradii_with, pairwise_tangent_point_radii
from .knot import PolyKnot


class Witnessed(NamedTuple):
    """A radius together with the vertex (or vertex pair) that realizes it."""

    value: float
    witness: object


@dataclass(frozen=True)
class ThicknessReport:
    tau: float
    argmin: tuple[int, int]
    local: np.ndarray
    length: float
    ropelength: float
    near_singular: bool


def _check_index(K, i):
    if not 0 <= i < K.n:
        raise DomainError(f"vertex index {i} out of range for n={K.n}")


def local_thickness(K: PolyKnot, i: int) -> Witnessed:
    """``min_{j != i} r(x_i, t_i, x_j)`` and the minimizing ``j``."""
    _check_index(K, i)
    d = K.vertices - K.vertices[i]
    d2 = np.einsum("ij,ij->i", d, d)
    c = np.cross(K.tangents[i], d)
    q = np.einsum("ij,ij->i", c, c)
    with np.errstate(divide="ignore", invalid="ignore"):
        radii = d2 / (2.0 * np.sqrt(q))
    radii[q < 1e-14 * d2] = np.inf
    radii[i] = np.inf
    j = int(np.argmin(radii))
    return Witnessed(float(radii[j]), j)


def thickness(K: PolyKnot, threads=None) -> ThicknessReport:
    """Thickness ``tau = min_i tau_i`` over vertex pairs, and ropelength ``length / tau``."""
    r = pairwise_tangent_point_radii(K.vertices, K.tangents, threads)
    local = r.min(axis=1)
    i = int(np.argmin(local))  # lowest index wins ties
    j = int(np.argmin(r[i]))
    tau = float(local[i])
    return ThicknessReport(
        tau=tau,
        argmin=(i, j),
        local=local,
        length=K.length,
        ropelength=K.length / tau if tau > 0 else math.inf,
        near_singular=tau < 1e-9 * K.length,
    )


def ropelength(K: PolyKnot) -> float:
    return thickness(K).ropelength


def gm_local_thickness(K: PolyKnot, i: int) -> Witnessed:
    """Gonzalez-Maddocks global radius of curvature at vertex ``i``: min over vertex triples."""
    _check_index(K, i)
    R = circumradii_with(K.vertices, i)
    k = int(np.argmin(R))
    return Witnessed(float(R.flat[k]), divmod(k, K.n))


def bialy_clearance(K: PolyKnot, i: int, r: float, densify: bool = False) -> bool:
    """Whether the open bialy of radius ``r`` with neck ``x_i`` and axis ``t_i`` avoids ``K``.

    A point ``q`` lies inside that bialy exactly when ``r(x_i, t_i, q) < r``. By
    default only vertices are tested, the same footprint as :func:`thickness`. With
    ``densify`` edges not incident to ``x_i`` are also sampled at spacing ``<= r/20``.
    """
    _check_index(K, i)
    if not r > 0:
        raise DomainError("bialy radius must be positive")
    n = K.n
    pts = [np.delete(K.vertices, i, axis=0)]
    if densify:
        for k in range(n):
            if k in (i, (i - 1) % n):
                continue
            m = max(1, int(math.ceil(K.edge_lengths[k] / (r / 20.0))))
            s = (np.arange(1, m) / m)[:, None]
            pts.append(K.vertices[k] + s * K.edges[k])
    Q = np.vstack(pts)
    d = Q - K.vertices[i]
    d2 = np.einsum("ij,ij->i", d, d)
    c = np.cross(K.tangents[i], d)
    q = np.einsum("ij,ij->i", c, c)
    # r(x, t, q) < r  <=>  d2 < 2 r sqrt(q)
    return not bool(np.any(d2 < 2.0 * r * np.sqrt(q)))


# -- local feature size --------------------------------------------------------


@dataclass(frozen=True)
class MedialSample:
    p: np.ndarray
    d: float
    witnesses: int


@dataclass(frozen=True)
class FeatureSizeEstimate:
    value: float
    conclusive: bool
    sample: MedialSample | None


def _segment_distances(P, A, E, EE):
    """Distances from points ``P`` (..., 3) to segments ``A + s E`` (n, 3), plus foot params."""
    rel = P[..., None, :] - A
    s = np.clip(np.einsum("...nk,nk->...n", rel, E) / EE, 0.0, 1.0)
    diff = rel - s[..., None] * E
    return np.sqrt(np.einsum("...k,...k->...", diff, diff)), s


def local_feature_size_oracle(K: PolyKnot, i: int, spacing: float | None = None,
                              directions: int = 72, refine: bool = True,
                              max_radius: float | None = None) -> FeatureSizeEstimate:
    """Brute-force local feature size at vertex ``i``.

    Candidate centres ``p = x_i + rho n`` march outwards along ``directions`` rays
    normal to ``t_i`` in steps of ``spacing``. A sample is medial for ``x_i`` when
    ``x_i`` is within ``spacing`` of the nearest point of ``K`` and the part of ``K``
    more than four mean edge lengths away from ``x_i`` (in arclength) is at least as
    close as the part near it. The smallest distance to ``K`` over such samples is
    returned; with ``refine`` the equidistance point is located by bisection inside
    the last step. Spacings above a tenth of the thickness give an inconclusive result.
    """
    _check_index(K, i)
    n = K.n
    tau = thickness(K).tau
    if spacing is None:
        spacing = tau / 20.0
    if not spacing > 0:
        raise DomainError("spacing must be positive")
    if spacing > tau / 10.0:
        # Witness tolerances this loose cannot tell x_i from its neighbours.
        return FeatureSizeEstimate(math.inf, False, None)
    if max_radius is None:
        max_radius = float(np.ptp(K.vertices, axis=0).max())
    steps = int(math.ceil(max_radius / spacing))

    A, E = K.vertices, K.edges
    EE = np.einsum("ij,ij->i", E, E)
    s_vert = K.arclength()
    L = K.length
    window = 4.0 * L / n

    # A segment is near when it meets the arclength window [s_i - w, s_i + w].
    start = s_vert[i] - window
    seg_far = ((s_vert - start) % L > 2 * window) & ((start - s_vert) % L > K.edge_lengths)
    if not seg_far.any():
        return FeatureSizeEstimate(math.inf, False, None)

    t = K.tangents[i]
    ref = np.eye(3)[int(np.argmin(np.abs(t)))]
    u = np.cross(t, ref)
    u /= np.linalg.norm(u)
    v = np.cross(t, u)
    ang = 2 * np.pi * np.arange(directions) / directions
    N = np.cos(ang)[:, None] * u + np.sin(ang)[:, None] * v
    rho = spacing * np.arange(1, steps + 1)
    P = K.vertices[i] + rho[None, :, None] * N[:, None, :]  # (dirs, steps, 3)
    D, _ = _segment_distances(P, A, E, EE)
    dmin = D.min(axis=-1)
    far = np.where(seg_far, D, np.inf).min(axis=-1)
    near = np.where(seg_far, np.inf, D).min(axis=-1)
    xi_witness = rho[None, :] <= dmin + spacing
    crossed = far <= near

    def gap(point_rho, nvec):
        p = K.vertices[i] + point_rho * nvec
        d, _ = _segment_distances(p[None, :], A, E, EE)
        d = d[0]
        return float(np.where(seg_far, d, np.inf).min() - np.where(seg_far, np.inf, d).min())

    best = None
    for a in range(directions):
        hits = np.flatnonzero(crossed[a])
        if not hits.size:
            continue
        k = int(hits[0])
        # x_i must stay a nearest point all the way up to the bracketing step.
        if k > 0 and not xi_witness[a, :k].all():
            continue
        r_hit = rho[k]
        if refine:
            lo, hi = (rho[k - 1] if k > 0 else 0.0), rho[k]
            for _ in range(40):
                mid = 0.5 * (lo + hi)
                if gap(mid, N[a]) > 0:
                    lo = mid
                else:
                    hi = mid
            r_hit = hi
        p = K.vertices[i] + r_hit * N[a]
        dist, _ = _segment_distances(p[None, :], A, E, EE)
        dist = dist[0]
        d = float(dist.min())
        if r_hit > d + spacing:
            continue
        count = int(np.sum(dist <= d + spacing))
        if best is None or d < best.d:
            best = MedialSample(p, d, max(count, 2))
    if best is None:
        return FeatureSizeEstimate(math.inf, False, None)
    return FeatureSizeEstimate(best.d, True, best)
