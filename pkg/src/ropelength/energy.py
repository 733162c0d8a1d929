"""Discrete scale-invariant R^p energy, its gradient, and the clasp divergence experiment.

For a closed polygon with vertex weights ``w_i`` (half the adjacent edge lengths),
length ``l`` and tangent-point radii ``r_ij`` the energy is

    R^p = l * ( sum_{i != j} w_i w_j r_ij^-p  /  sum_{i != j} w_i w_j ) ** (1/p)

i.e. the length times the L^p mean of ``1/r`` over the off-diagonal pair measure.
It is invariant under similarities, equals the ropelength ``l / min r_ij`` in the
limit ``p -> inf`` and never exceeds it. Everything is accumulated in the log domain
so ``p = 4096`` is routine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .exceptions import DomainError, ResolutionError, SingularConfigurationError
from ._parallel import blocks, map_blocks, set_num_threads  # noqa: F401
from .geom import REL_TOL, pairwise_tangent_point_radii
from .knot import PolyKnot, circumcircle_tangents, resample_uniform

def check_exponent(p) -> float:
    p = float(p)
    if not (p >= 1.0 and math.isfinite(p)):
        raise DomainError(f"exponent p must be a finite real >= 1, got {p!r}")
    return p


@dataclass(frozen=True)
class EnergyValue:
    """An energy carried in the log domain; ``value`` may be ``inf`` when out of range."""

    log_value: float
    value: float

    @classmethod
    def from_log(cls, log_value):
        with np.errstate(over="ignore"):
            return cls(float(log_value), float(np.exp(log_value)))

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class GradientField:
    """Partial derivatives of ``log R^p`` with respect to every vertex coordinate.

    ``norm`` is the dimensionless L2(ds) norm ``l^{3/2} sqrt(sum_i |g_i|^2 / w_i)``,
    which is independent of the resolution.
    """

    vectors: np.ndarray
    norm: float
    energy: EnergyValue


# -- core evaluation ----------------------------------------------------------


def _edge_data(X):
    e = np.roll(X, -1, axis=0) - X
    lens = np.linalg.norm(e, axis=1)
    if np.any(lens == 0.0):
        raise SingularConfigurationError(f"edge {int(np.argmin(lens))} has zero length")
    w = 0.5 * (np.roll(lens, 1) + lens)
    return e, lens, w


def log_energy(X: np.ndarray, p: float, threads=None, gradient=False):
    """Evaluate ``log R^p`` (and optionally its gradient) for raw vertex coordinates.

    Returns ``(log_R, info)`` where ``info`` carries ``length``, ``log_rmin``,
    ``log_mean`` and, when requested, ``grad``.
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    e, lens, w = _edge_data(X)
    T, m = circumcircle_tangents(X)
    length = float(lens.sum())
    r = pairwise_tangent_point_radii(X, T, threads)
    k = int(np.argmin(r))
    rmin = float(r.flat[k])
    if not rmin > 0.0:
        i, j = divmod(k, n)
        raise SingularConfigurationError(f"vertices {i} and {j} coincide")
    if rmin == np.inf:
        raise SingularConfigurationError("all tangent-point radii are infinite")
    with np.errstate(divide="ignore"):
        logr = np.log(r)
    log_rmin = math.log(rmin)
    logw = np.log(w)
    # Pair log-weights relative to the largest term; the diagonal and collinear pairs vanish.
    L = logw[:, None] + logw[None, :] - p * (logr - log_rmin)
    log_num = float(logsumexp(L))
    W = length * length - float(np.dot(w, w))
    log_mean = min(log_num - math.log(W), 0.0)
    log_R = math.log(length) - log_rmin + log_mean / p
    info = {"length": length, "rmin": rmin, "log_rmin": log_rmin, "log_mean": log_mean, "W": W,
            "argmin": divmod(k, n)}
    if not gradient:
        return log_R, info

    P = np.exp(L - log_num)
    a = P.sum(axis=1) + P.sum(axis=0)

    def block(b):
        d = X[None, :, :] - X[b, None, :]
        d2 = np.einsum("ijk,ijk->ij", d, d)
        Tb = T[b]
        td = np.einsum("ik,ijk->ij", Tb, d)
        c = np.cross(Tb[:, None, :], d)
        q = np.einsum("ijk,ijk->ij", c, c)
        Pb = P[b]
        live = Pb > 0.0
        safe_q = np.where(live, q, 1.0)
        safe_d2 = np.where(live, d2, 1.0)
        # d(log r)/dd = (2/d2 - 1/q) d + (t.d / q) t ;  d(log r)/dt = (t.d / q) d
        alpha = np.where(live, -Pb * (2.0 / safe_d2 - 1.0 / safe_q), 0.0)
        beta = np.where(live, -Pb * td / safe_q, 0.0)
        Gd = alpha[..., None] * d + beta[..., None] * Tb[:, None, :]
        col = Gd.sum(axis=0)  # contributes to x_j
        row = Gd.sum(axis=1)  # contributes -to x_i
        Gt = np.einsum("ij,ijk->ik", beta, d)
        return col, row, Gt

    parts = map_blocks(block, n, threads)
    grad = np.zeros_like(X)
    Gt = np.zeros_like(X)
    for b, (col, row, gt) in zip(blocks(n), parts):
        grad += col
        grad[b] -= row
        Gt[b] = gt

    # Back through t = m / |m|,  m = |v|^2 u + |u|^2 v  with u = e_{i-1}, v = e_i.
    mn = np.linalg.norm(m, axis=1)
    gm = (Gt - T * np.einsum("ij,ij->i", T, Gt)[:, None]) / mn[:, None]
    u = np.roll(e, 1, axis=0)
    v = e
    uu = np.einsum("ij,ij->i", u, u)
    vv = np.einsum("ij,ij->i", v, v)
    gu = vv[:, None] * gm + 2.0 * np.einsum("ij,ij->i", gm, v)[:, None] * u
    gv = uu[:, None] * gm + 2.0 * np.einsum("ij,ij->i", gm, u)[:, None] * v
    grad += gu - gv
    grad -= np.roll(gu, -1, axis=0)  # u_{i+1} = x_{i+1} - x_i involves x_i with sign -
    grad += np.roll(gv, 1, axis=0)   # v_{i-1} = x_i - x_{i-1} involves x_i with sign +

    # Edge lengths enter through the weights, the total length and the pair mass W.
    aw = a / w
    w_next = np.roll(w, -1)
    g_len = (1.0 / length
             + 0.5 * (aw + np.roll(aw, -1)) / p
             - (2.0 * length - w - w_next) / (p * W))
    ge = (g_len / lens)[:, None] * e
    grad -= ge
    grad += np.roll(ge, 1, axis=0)
    info["grad"] = grad
    info["weights"] = w
    return log_R, info


def gradient_norm(grad: np.ndarray, weights: np.ndarray, length: float) -> float:
    return float(length**1.5 * math.sqrt(np.sum(np.einsum("ij,ij->i", grad, grad) / weights)))


# -- public operations --------------------------------------------------------


def rp_local(K: PolyKnot, i: int, p) -> EnergyValue:
    """``sum_{j != i} w_j r(x_i, t_i, x_j)^-p`` on the unit-length rescaling of ``K``."""
    p = check_exponent(p)
    if not 0 <= i < K.n:
        raise DomainError(f"vertex index {i} out of range")
    X = K.vertices / K.length
    d = X - X[i]
    d2 = np.einsum("ij,ij->i", d, d)
    c = np.cross(K.tangents[i], d)
    q = np.einsum("ij,ij->i", c, c)
    mask = np.arange(K.n) != i
    if np.any(d2[mask] == 0.0):
        raise SingularConfigurationError(f"a vertex coincides with vertex {i}")
    live = mask & (q >= REL_TOL * d2)
    if not np.any(live):
        return EnergyValue(-math.inf, 0.0)
    logr = np.log(d2[live]) - math.log(2.0) - 0.5 * np.log(q[live])
    w = K.weights[live] / K.length
    log_rmin = logr.min()
    total = float(logsumexp(np.log(w) - p * (logr - log_rmin)))
    return EnergyValue.from_log(-p * log_rmin + total)


def rp_energy(K: PolyKnot, p, threads=None, cross_check=True) -> EnergyValue:
    """Scale-invariant energy ``R^p(K)``.

    ``value`` is formed as ``ropelength * mean_factor`` with ``mean_factor <= 1`` so
    that ``R^p <= ropelength`` holds exactly in floating point. With ``cross_check``
    the unit-length path is evaluated too and must agree to 1e-10 relative.
    """
    p = check_exponent(p)
    log_R, info = log_energy(K.vertices, p, threads)
    if cross_check:
        unit, _ = log_energy(K.vertices / K.length, p, threads)
        if abs(unit - log_R) > 1e-10:
            raise ArithmeticError(f"unit-length and scaled evaluations disagree: {unit} vs {log_R}")
    ropelength = K.length / info["rmin"]
    value = ropelength * math.exp(info["log_mean"] / p)
    return EnergyValue(log_R, value)


def rp_gradient(K: PolyKnot, p, threads=None) -> GradientField:
    """Gradient of ``log R^p`` with respect to the vertex coordinates."""
    p = check_exponent(p)
    if p >= 8192:
        raise DomainError("rp_gradient supports p < 8192")
    log_R, info = log_energy(K.vertices, p, threads, gradient=True)
    g = info["grad"]
    return GradientField(g, gradient_norm(g, info["weights"], info["length"]), EnergyValue.from_log(log_R))


# -- crossing divergence --------------------------------------------------------


def clasp_curve(gap: float, n: int = 2048, size: float = 1.0) -> PolyKnot:
    """Lifted lemniscate whose two strands cross at right angles ``gap`` apart.

    The planar lemniscate of Bernoulli with half-width ``size`` crosses itself at a
    right angle; the height ``(gap/2) sin t`` separates the strands at the crossing
    by exactly ``gap`` with the connecting chord normal to both. Curvature stays
    bounded as ``gap -> 0``.
    """
    t = np.linspace(0.0, 2 * np.pi, 40 * n, endpoint=False)
    den = 1.0 + np.sin(t) ** 2
    X = np.column_stack([size * np.cos(t) / den,
                         size * np.sin(t) * np.cos(t) / den,
                         0.5 * gap * np.sin(t)])
    return resample_uniform(PolyKnot(X), n)


def clasp_divergence_series(p, gaps, n: int = 2048, size: float = 1.0, threads=None) -> list[EnergyValue]:
    """``R^p`` of the clasp family for each gap (gaps must strictly decrease)."""
    p = check_exponent(p)
    gaps = [float(g) for g in gaps]
    if not gaps or any(g <= 0 for g in gaps) or any(b >= a for a, b in zip(gaps, gaps[1:])):
        raise DomainError("gaps must be positive and strictly decreasing")
    out = []
    for g in gaps:
        K = clasp_curve(g, n, size)
        h = float(K.edge_lengths.max())
        if g < 4 * h:
            raise ResolutionError(f"gap {g} is below 4 edge lengths ({4 * h:.3g}); resample first")
        out.append(rp_energy(K, p, threads))
    return out


def loglog_slope(gaps, energies) -> float:
    """Least-squares slope of ``log R^p`` against ``log gap``."""
    x = np.log(np.asarray(gaps, dtype=float))
    y = np.array([e.log_value for e in energies])
    return float(np.polyfit(x, y, 1)[0])
