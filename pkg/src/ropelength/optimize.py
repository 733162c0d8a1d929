"""Gradient descent on log R^p with p-continuation, 222 symmetry and a stability probe."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .energy import check_exponent, log_energy
from .exceptions import DomainError, RopelengthError
from .knot import (
    CurveProfile,
    PolyKnot,
    SymmetryGroup222,
    circumcircle_tangents,
    resample_uniform,
    symmetrize_222,
)

logger = logging.getLogger(__name__)


@dataclass
class OptimizerConfig:
    """Settings for :func:`minimize_rp`.

    ``metric`` selects the inner product that turns the differential into a descent
    direction: ``"sobolev"`` damps mode ``k`` of the vertex sequence by
    ``1 / (1 + (k / smoothing_modes)^4)``, ``"l2"`` divides by the vertex weights.
    Each step moves no vertex further than ``max_displacement`` mean edge lengths.
    """

    max_iter: int = 300
    tol: float = 1e-6
    contraction: float = 0.5
    armijo: float = 1e-4
    resample_every: int = 50
    symmetry: SymmetryGroup222 | None = None
    metric: str = "sobolev"
    smoothing_modes: float = 6.0
    normal_motion: bool = True
    max_displacement: float = 0.3
    max_backtracks: int = 60
    threads: int | None = None

    def __post_init__(self):
        if self.tol <= 0 or self.max_iter < 0:
            raise DomainError("tol must be positive and max_iter non-negative")
        if not (0 < self.contraction < 1 and 0 < self.armijo < 1):
            raise DomainError("contraction and armijo constants must lie in (0, 1)")
        if self.metric not in ("sobolev", "l2"):
            raise DomainError(f"unknown metric {self.metric!r}")


def default_schedule(lo: int = 2, hi: int = 4096) -> list[int]:
    """Powers of two from ``lo`` to ``hi`` inclusive."""
    if lo < 1 or hi < lo or lo & (lo - 1) or hi & (hi - 1):
        raise DomainError(f"schedule bounds must be powers of two with lo <= hi, got {lo}:{hi}")
    out = []
    p = lo
    while p <= hi:
        out.append(p)
        p *= 2
    return out


@dataclass
class StageRecord:
    p: float
    iterations: int
    initial_energy: float
    energy: float
    gradient_norm: float
    ropelength: float
    termination: str
    trajectory: list = field(default_factory=list)
    resamples: list = field(default_factory=list)

    def summary(self) -> dict:
        return {
            "p": self.p,
            "iterations": self.iterations,
            "initial_energy": self.initial_energy,
            "energy": self.energy,
            "gradient_norm": self.gradient_norm,
            "ropelength": self.ropelength,
            "termination": self.termination,
        }


@dataclass
class RunReport:
    stages: list[StageRecord]
    knot: PolyKnot
    seed: int | None = None
    failure: str | None = None

    @property
    def final(self) -> StageRecord:
        return self.stages[-1]


@dataclass(frozen=True)
class StabilityVerdict:
    classification: str
    escape_gap: float
    trials: int
    energy: float
    trial_energies: tuple
    seed: int


# -- helpers ------------------------------------------------------------------


def _normalize(X):
    X = X - X.mean(axis=0)
    return X / np.linalg.norm(np.roll(X, -1, axis=0) - X, axis=1).sum()


def rigid_modes(X: np.ndarray) -> np.ndarray:
    """Orthonormal basis (rows, flattened) of translations, rotations and scaling at ``X``."""
    c = X - X.mean(axis=0)
    modes = []
    for k in range(3):
        t = np.zeros_like(X)
        t[:, k] = 1.0
        modes.append(t.ravel())
    for k in range(3):
        axis = np.zeros(3)
        axis[k] = 1.0
        modes.append(np.cross(axis, c).ravel())
    modes.append(c.ravel())
    Q, _ = np.linalg.qr(np.array(modes).T)
    return Q.T


def project_rigid(X: np.ndarray, g: np.ndarray) -> np.ndarray:
    Q = rigid_modes(X)
    v = g.ravel()
    return (v - Q.T @ (Q @ v)).reshape(g.shape)


def criticality(K: PolyKnot | np.ndarray, p, cfg: OptimizerConfig | None = None) -> float:
    """Dimensionless size of the gradient of ``log R^p`` in the metric of ``cfg``.

    This is ``l^{3/2} sqrt(-g . d)`` where ``d`` is the descent direction, with the
    similarity modes removed first. With ``metric="l2"`` and ``normal_motion=False``
    it is the plain L2(ds) gradient norm.
    """
    cfg = cfg or OptimizerConfig()
    X = K.vertices if isinstance(K, PolyKnot) else np.asarray(K, dtype=float)
    _, info = log_energy(X, check_exponent(p), cfg.threads, gradient=True)
    return _metric_norm(X, info, cfg)


def _direction(X, grad, weights, cfg: OptimizerConfig):
    # d = -W^-1/2 P S P W^-1/2 g with P the normal projector and S the smoothing
    # operator: symmetric positive semidefinite, so d is always a descent direction.
    root = np.sqrt(weights)[:, None]
    g = grad / root
    if cfg.normal_motion:
        T, _ = circumcircle_tangents(X)
        g = g - T * np.einsum("ij,ij->i", g, T)[:, None]
    if cfg.metric == "sobolev":
        n = X.shape[0]
        k = np.fft.rfftfreq(n) * n
        damp = 1.0 / (1.0 + (k / cfg.smoothing_modes) ** 4)
        g = np.fft.irfft(np.fft.rfft(g, axis=0) * damp[:, None], n=n, axis=0)
        if cfg.normal_motion:
            g = g - T * np.einsum("ij,ij->i", g, T)[:, None]
    return -g / root


def _metric_norm(X, info, cfg, d=None) -> float:
    g = project_rigid(X, info["grad"])
    if d is None:
        d = _direction(X, g, info["weights"], cfg)
    return float(info["length"] ** 1.5 * math.sqrt(max(-float(np.sum(g * d)), 0.0)))


def _ropelength(info) -> float:
    return info["length"] / info["rmin"]


# -- minimization ---------------------------------------------------------------


def minimize_rp(K: PolyKnot, p, cfg: OptimizerConfig | None = None) -> tuple[PolyKnot, StageRecord]:
    """Backtracking (Armijo) gradient descent on ``log R^p``.

    After every accepted step the curve is recentred, scaled to unit length and,
    when ``cfg.symmetry`` is set, projected onto the symmetric curves. Every
    ``cfg.resample_every`` iterations the vertices are redistributed uniformly.
    Line-search failure ends the stage with ``termination = "line_search"``.
    """
    cfg = cfg or OptimizerConfig()
    p = check_exponent(p)
    n = K.n
    sym = cfg.symmetry

    def prepare(X):
        if sym is not None:
            X = symmetrize_222(X, sym)
        return _normalize(X)

    X = prepare(K.vertices)
    F, info = log_energy(X, p, cfg.threads, gradient=True)
    F_start = F
    trajectory = [F]
    resamples = []
    termination = "max_iter"
    it = 0
    alpha = 1.0
    gnorm = _metric_norm(X, info, cfg)
    while True:
        if gnorm <= cfg.tol:
            termination = "tolerance"
            break
        if it >= cfg.max_iter:
            break
        if cfg.resample_every and it and it % cfg.resample_every == 0:
            X = prepare(resample_uniform(PolyKnot(X), n).vertices)
            F, info = log_energy(X, p, cfg.threads, gradient=True)
            resamples.append((it, F))
        d = _direction(X, info["grad"], info["weights"], cfg)
        slope = float(np.sum(info["grad"] * d))
        if not slope < 0.0:
            termination = "stationary"
            break
        cap = cfg.max_displacement * info["length"] / n / float(np.abs(d).max())
        a = min(2.0 * alpha, cap)
        accepted = False
        for _ in range(cfg.max_backtracks):
            Y = prepare(X + a * d)
            try:
                F_new, _ = log_energy(Y, p, cfg.threads)
            except (RopelengthError, FloatingPointError):
                F_new = math.inf
            if F_new <= F + cfg.armijo * a * slope:
                accepted = True
                break
            a *= cfg.contraction
        if not accepted:
            termination = "line_search"
            break
        alpha = a
        X = Y
        F, info = log_energy(X, p, cfg.threads, gradient=True)
        trajectory.append(F)
        it += 1
        gnorm = _metric_norm(X, info, cfg)

    out = PolyKnot(X, K.metadata)
    if F > F_start:
        # Only resampling can raise the energy; never hand back something worse.
        out, F, termination = K, F_start, termination + "+restored"
        _, info = log_energy(K.vertices, p, cfg.threads, gradient=True)
        gnorm = _metric_norm(K.vertices, info, cfg)
    record = StageRecord(
        p=p,
        iterations=it,
        initial_energy=math.exp(F_start),
        energy=math.exp(F),
        gradient_norm=gnorm,
        ropelength=_ropelength(info),
        termination=termination,
        trajectory=[math.exp(v) for v in trajectory],
        resamples=[(i, math.exp(v)) for i, v in resamples],
    )
    logger.info("p=%g: %d iterations, R^p=%.6f, ropelength=%.4f (%s)",
                p, it, record.energy, record.ropelength, termination)
    return out, record


def polish_critical(K: PolyKnot, p, cfg: OptimizerConfig | None = None, iterations: int = 1500,
                    check_every: int = 25) -> tuple[PolyKnot, float]:
    """Descend without resampling and keep the most critical iterate seen.

    At large ``p`` first-order descent oscillates across a stiff valley, so the
    criticality of the last iterate is noisy; every ``check_every`` iterations the
    current curve is measured and the best one is returned with its criticality.
    Energies along the path only decrease.
    """
    cfg = cfg or OptimizerConfig()
    chunk = OptimizerConfig(**{**cfg.__dict__, "max_iter": check_every, "resample_every": 0})
    best, best_c = K, criticality(K, p, cfg)
    for _ in range(max(iterations // check_every, 0)):
        K, rec = minimize_rp(K, p, chunk)
        c = criticality(K, p, cfg)
        if c < best_c:
            best, best_c = K, c
        if rec.termination != "max_iter":
            break
    return best, best_c


def run_continuation(K: PolyKnot, schedule=None, cfg: OptimizerConfig | None = None) -> RunReport:
    """Minimize at each exponent in turn, warm-starting from the previous stage."""
    schedule = list(schedule or default_schedule())
    if any(b <= a for a, b in zip(schedule, schedule[1:])) or any(p < 1 for p in schedule):
        raise DomainError("schedule must be strictly increasing with every p >= 1")
    stages = []
    current = K
    for p in schedule:
        try:
            current, rec = minimize_rp(current, p, cfg)
        except RopelengthError as exc:
            return RunReport(stages, current, failure=f"p={p}: {exc}")
        stages.append(rec)
    return RunReport(stages, current)


# -- stability ----------------------------------------------------------------


def smooth_normal_perturbation(K: PolyKnot, amplitude: float, rng: np.random.Generator, modes: int = 8) -> PolyKnot:
    """Random smooth displacement normal to ``K`` with maximal size ``amplitude``."""
    n = K.n
    t = 2 * np.pi * np.arange(n) / n
    D = np.zeros((n, 3))
    for k in range(1, modes + 1):
        a, b = rng.normal(size=(2, 3)) / k
        D += np.outer(np.cos(k * t), a) + np.outer(np.sin(k * t), b)
    T = K.tangents
    D -= T * np.einsum("ij,ij->i", D, T)[:, None]
    D *= amplitude / np.linalg.norm(D, axis=1).max()
    return PolyKnot(K.vertices + D, K.metadata)


def stability_probe(K: PolyKnot, p, epsilon: float = 0.02, trials: int = 5,
                    cfg: OptimizerConfig | None = None, seed: int = 0,
                    escape_threshold: float = 1e-3, critical_tol: float = 0.05) -> StabilityVerdict:
    """Classify a critical curve as ``minimum``, ``saddle`` or ``inconclusive``.

    Each trial displaces ``K`` by a smooth random normal field whose largest vertex
    displacement is ``epsilon`` times the length of ``K``, then re-minimizes *without*
    symmetry. A trial ending more than ``escape_threshold`` (relative) below the
    unperturbed energy witnesses a saddle; if every trial returns to within the
    threshold the curve is a minimum. ``K`` counts as critical when
    :func:`criticality` is at most ``10 * critical_tol``.
    """
    cfg = cfg or OptimizerConfig()
    p = check_exponent(p)
    if trials < 1:
        raise DomainError("at least one trial is needed")
    gnorm = criticality(K, p, cfg)
    if gnorm > 10 * critical_tol:
        raise DomainError(f"curve is not critical at p={p:g}: gradient norm {gnorm:.3g} > {10 * critical_tol:g}")
    E0 = math.exp(log_energy(K.vertices, p, cfg.threads)[0])
    free = OptimizerConfig(**{**cfg.__dict__, "symmetry": None})
    rng = np.random.default_rng(seed)
    energies = []
    for _ in range(trials):
        start = smooth_normal_perturbation(K, epsilon * K.length, rng)
        _, rec = minimize_rp(start, p, free)
        energies.append(rec.energy)
    rel = [(e - E0) / E0 for e in energies]
    if min(rel) < -escape_threshold:
        verdict = "saddle"
    elif max(abs(r) for r in rel) <= escape_threshold:
        verdict = "minimum"
    else:
        verdict = "inconclusive"
    return StabilityVerdict(verdict, -min(rel), trials, E0, tuple(energies), seed)


# -- straight segments ------------------------------------------------------------


@dataclass(frozen=True)
class StraightSegment:
    start: float
    end: float
    jump_before: float
    jump_after: float

    period: float = math.inf

    @property
    def length(self) -> float:
        return (self.end - self.start) % self.period


def straight_segment_detector(profile: CurveProfile, thickness: float, threshold: float = 0.2,
                              min_run: float | None = None) -> list[StraightSegment]:
    """Maximal arcs where ``kappa * thickness < threshold``.

    An arc runs from its first to its last flat vertex; arcs shorter than ``min_run``
    (default: half the thickness) are dropped. The jump on each side is the mean of
    ``kappa * thickness`` over the vertices between half and one and a half
    thicknesses beyond the arc. An arc through vertex 0 has ``end < start``.
    """
    if min_run is None:
        min_run = 0.5 * thickness
    kt = profile.kappa * thickness
    n = len(kt)
    s = profile.s
    L = profile.length
    flat = kt < threshold
    if flat.all():
        return [StraightSegment(0.0, float(s[-1]), 0.0, 0.0, L)]
    if not flat.any():
        return []
    # Start scanning just after a curved vertex so no run wraps past the scan origin.
    origin = int(np.flatnonzero(~flat)[0])
    runs = []
    i = 0
    while i < n:
        k = (origin + i) % n
        if flat[k]:
            j = i
            while j + 1 < n and flat[(origin + j + 1) % n]:
                j += 1
            runs.append(((origin + i) % n, (origin + j) % n))
            i = j + 1
        else:
            i += 1

    def arc(a, b):
        return (s[b] - s[a]) % L

    def jump(k, step):
        # Mean level reached between 0.5 and 1.5 thicknesses beyond vertex k.
        vals = []
        j = k
        for _ in range(n - 1):
            j = (j + step) % n
            dist = arc(k, j) if step > 0 else arc(j, k)
            if dist > 1.5 * thickness:
                break
            if dist > 0.5 * thickness:
                vals.append(kt[j])
        return float(np.mean(vals)) if vals else float(kt[(k + step) % n])

    out = []
    for a, b in runs:
        if arc(a, b) < min_run:
            continue
        out.append(StraightSegment(float(s[a]), float(s[b]), jump(a, -1), jump(b, +1), L))
    return out
