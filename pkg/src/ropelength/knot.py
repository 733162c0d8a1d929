"""Closed polygonal curves: construction, generators, tangents, resampling, profiles, 222 symmetry."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError, SingularConfigurationError


def check_vertices(X, min_vertices=4) -> np.ndarray:
    """Validate an ``(n, 3)`` array of closed-polygon vertices and return it as floats.

    Raises :class:`DomainError` naming the first offending vertex.
    """
    X = np.array(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != 3:
        raise DomainError(f"vertices must have shape (n, 3), got {X.shape}")
    n = X.shape[0]
    if n < min_vertices:
        raise DomainError(f"a closed polygon needs n >= {min_vertices} vertices, got {n}")
    bad = np.flatnonzero(~np.all(np.isfinite(X), axis=1))
    if bad.size:
        raise DomainError(f"vertex {bad[0]} has non-finite coordinates")
    lengths = np.linalg.norm(np.roll(X, -1, axis=0) - X, axis=1)
    scale = float(np.abs(X).max()) or 1.0
    dup = np.flatnonzero(lengths <= 1e-14 * scale)
    if dup.size:
        i = int(dup[0])
        raise DomainError(f"vertex {(i + 1) % n} coincides with vertex {i}")
    return X


def circumcircle_tangents(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unit tangents of the circle through each vertex and its two neighbours.

    With ``u = x_i - x_{i-1}`` and ``v = x_{i+1} - x_i`` the tangent at ``x_i`` is
    parallel to ``|v|^2 u + |u|^2 v``; on collinear triples this is the chord
    direction. Returns ``(tangents, unnormalized)``.
    """
    u = X - np.roll(X, 1, axis=0)
    v = np.roll(X, -1, axis=0) - X
    uu = np.einsum("ij,ij->i", u, u)
    vv = np.einsum("ij,ij->i", v, v)
    m = vv[:, None] * u + uu[:, None] * v
    norm = np.linalg.norm(m, axis=1)
    if np.any(norm <= 1e-300):
        i = int(np.flatnonzero(norm <= 1e-300)[0])
        raise SingularConfigurationError(f"tangent undefined at vertex {i} (polygon folds back)")
    return m / norm[:, None], m


class PolyKnot:
    """An immutable closed polygon with cached edges, arclength weights and tangents.

    Parameters
    ----------
    vertices : array_like, shape (n, 3)
        Ordered vertices; the edge from the last vertex back to the first is implied.
    """

    def __init__(self, vertices, metadata=None):
        X = check_vertices(vertices)
        X.setflags(write=False)
        self.vertices = X
        self.metadata = dict(metadata or {})
        e = np.roll(X, -1, axis=0) - X
        e.setflags(write=False)
        self.edges = e
        self.edge_lengths = np.linalg.norm(e, axis=1)
        self.weights = 0.5 * (np.roll(self.edge_lengths, 1) + self.edge_lengths)
        self.length = float(self.edge_lengths.sum())
        self.tangents, _ = circumcircle_tangents(X)
        for a in (self.edge_lengths, self.weights, self.tangents):
            a.setflags(write=False)

    @property
    def n(self) -> int:
        return self.vertices.shape[0]

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"PolyKnot(n={self.n}, length={self.length:.6g})"

    def transformed(self, rotation=None, translation=None, scale=1.0) -> "PolyKnot":
        X = self.vertices * scale
        if rotation is not None:
            X = X @ np.asarray(rotation, dtype=float).T
        if translation is not None:
            X = X + np.asarray(translation, dtype=float)
        return PolyKnot(X, self.metadata)

    def normalized(self) -> "PolyKnot":
        """Copy recentred at the vertex centroid and scaled to unit length."""
        X = self.vertices - self.vertices.mean(axis=0)
        return PolyKnot(X / self.length, self.metadata)

    def shifted(self, k: int) -> "PolyKnot":
        return PolyKnot(np.roll(self.vertices, -k, axis=0), self.metadata)

    def reversed(self) -> "PolyKnot":
        return PolyKnot(self.vertices[::-1], self.metadata)

    def arclength(self) -> np.ndarray:
        """Arclength from vertex 0 to each vertex."""
        return np.concatenate([[0.0], np.cumsum(self.edge_lengths[:-1])])


def estimate_tangents(K: PolyKnot) -> np.ndarray:
    return K.tangents.copy()


# -- generators ---------------------------------------------------------------


def generate_circle(n: int, radius: float = 1.0) -> PolyKnot:
    if n < 4:
        raise DomainError(f"n must be >= 4, got {n}")
    if radius <= 0:
        raise DomainError("radius must be positive")
    theta = 2 * np.pi * np.arange(n) / n
    X = np.column_stack([radius * np.cos(theta), radius * np.sin(theta), np.zeros(n)])
    return PolyKnot(X, {"name": f"circle n={n}"})


def generate_torus_knot(p: int, q: int, major: float = 2.0, minor: float = 1.0, n: int = 200) -> PolyKnot:
    """Sample the ``(p, q)`` torus knot uniformly in its angle parameter.

    The curve is ``((major + minor cos q t) cos p t, (major + minor cos q t) sin p t,
    minor sin q t)``.
    """
    if p <= 0 or q <= 0 or math.gcd(p, q) != 1:
        raise DomainError(f"(p, q) = ({p}, {q}) is not a torus knot: need positive coprime p, q")
    if not 0 < minor < major:
        raise DomainError("need 0 < minor < major")
    if n < 8 * max(p, q):
        raise DomainError(f"n must be >= 8 max(p, q) = {8 * max(p, q)}")
    t = 2 * np.pi * np.arange(n) / n
    rho = major + minor * np.cos(q * t)
    X = np.column_stack([rho * np.cos(p * t), rho * np.sin(p * t), minor * np.sin(q * t)])
    return PolyKnot(X, {"name": f"torus knot ({p},{q})"})


def generate_stadium(n: int, radius: float = 1.0, straight: float = 2.0) -> PolyKnot:
    """Two semicircles of ``radius`` joined by straight segments of length ``straight``.

    Vertices are equally spaced in arclength starting at the first straight segment.
    """
    if n < 4:
        raise DomainError(f"n must be >= 4, got {n}")
    arc = np.pi * radius
    total = 2 * straight + 2 * arc
    s = total * np.arange(n) / n
    X = np.zeros((n, 3))
    for k, sk in enumerate(s):
        if sk < straight:  # bottom straight, heading +x
            X[k] = (-straight / 2 + sk, -radius, 0.0)
        elif sk < straight + arc:
            a = -np.pi / 2 + (sk - straight) / radius
            X[k] = (straight / 2 + radius * np.cos(a), radius * np.sin(a), 0.0)
        elif sk < 2 * straight + arc:
            X[k] = (straight / 2 - (sk - straight - arc), radius, 0.0)
        else:
            a = np.pi / 2 + (sk - 2 * straight - arc) / radius
            X[k] = (-straight / 2 + radius * np.cos(a), radius * np.sin(a), 0.0)
    return PolyKnot(X, {"name": "stadium"})


def generate_perturbed_circle(n: int, amplitude: float = 0.05, modes: int = 4, seed: int = 0) -> PolyKnot:
    """Unit circle with a smooth random radial and vertical perturbation of low frequency."""
    rng = np.random.default_rng(seed)
    t = 2 * np.pi * np.arange(n) / n
    rad = np.ones(n)
    z = np.zeros(n)
    for k in range(2, modes + 2):
        a, b, c, d = rng.normal(size=4) * amplitude / k
        rad += a * np.cos(k * t) + b * np.sin(k * t)
        z += c * np.cos(k * t) + d * np.sin(k * t)
    X = np.column_stack([rad * np.cos(t), rad * np.sin(t), z])
    return PolyKnot(X, {"name": f"perturbed circle seed={seed}"})


def projection_crossings(K: PolyKnot, direction=(0.123, 0.456, 0.881)) -> int:
    """Number of crossings in the projection of ``K`` along a (generic) direction."""
    d = np.asarray(direction, dtype=float)
    d /= np.linalg.norm(d)
    a = np.cross(d, [1.0, 0.0, 0.0] if abs(d[0]) < 0.9 else [0.0, 1.0, 0.0])
    a /= np.linalg.norm(a)
    b = np.cross(d, a)
    P = np.column_stack([K.vertices @ a, K.vertices @ b])
    A, B = P, np.roll(P, -1, axis=0)
    r = B - A
    n = K.n
    # Segment i: A_i + s r_i, segment j: A_j + t r_j.
    denom = r[:, None, 0] * r[None, :, 1] - r[:, None, 1] * r[None, :, 0]
    diff = A[None, :, :] - A[:, None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (diff[..., 0] * r[None, :, 1] - diff[..., 1] * r[None, :, 0]) / denom
        t = (diff[..., 0] * r[:, None, 1] - diff[..., 1] * r[:, None, 0]) / denom
    hit = (s > 0) & (s < 1) & (t > 0) & (t < 1) & (np.abs(denom) > 0)
    i, j = np.nonzero(np.triu(hit, k=2))
    keep = ~((i == 0) & (j == n - 1))
    return int(keep.sum())


# -- resampling ---------------------------------------------------------------


def resample_uniform(K: PolyKnot, m: int) -> PolyKnot:
    """Place ``m`` vertices at equal arclength along ``K`` by linear interpolation.

    Vertex 0 is preserved.
    """
    if m < 4:
        raise DomainError(f"m must be >= 4, got {m}")
    s = np.concatenate([K.arclength(), [K.length]])
    X = np.vstack([K.vertices, K.vertices[:1]])
    target = K.length * np.arange(m) / m
    Y = np.column_stack([np.interp(target, s, X[:, k]) for k in range(3)])
    Y[0] = K.vertices[0]
    return PolyKnot(Y, K.metadata)


# -- curvature and torsion ----------------------------------------------------


@dataclass(frozen=True)
class CurveProfile:
    """Per-vertex arclength, curvature and signed torsion."""

    s: np.ndarray
    kappa: np.ndarray
    torsion: np.ndarray
    length: float

    def __len__(self):
        return len(self.s)


def turning_angles(X: np.ndarray) -> np.ndarray:
    e_prev = X - np.roll(X, 1, axis=0)
    e_next = np.roll(X, -1, axis=0) - X
    cr = np.linalg.norm(np.cross(e_prev, e_next), axis=1)
    dot = np.einsum("ij,ij->i", e_prev, e_next)
    return np.arctan2(cr, dot)


def curvature_torsion_profile(K: PolyKnot, collinear_tol=1e-12) -> CurveProfile:
    """Discrete curvature ``turning angle / w_i`` and torsion ``dihedral angle / |e_i|``.

    Torsion at vertex ``i`` is the signed angle between the planes of
    ``(x_{i-1}, x_i, x_{i+1})`` and ``(x_i, x_{i+1}, x_{i+2})``, positive for a
    right-handed helix. It is recorded as 0 where either plane is undefined.
    """
    X = K.vertices
    e = K.edges
    e_prev = np.roll(e, 1, axis=0)
    kappa = turning_angles(X) / K.weights
    b = np.cross(e_prev, e)  # binormal direction at each vertex
    b_next = np.roll(b, -1, axis=0)
    eh = e / K.edge_lengths[:, None]
    sin_part = np.einsum("ij,ij->i", np.cross(b, b_next), eh)
    cos_part = np.einsum("ij,ij->i", b, b_next)
    phi = np.arctan2(sin_part, cos_part)
    bn = np.linalg.norm(b, axis=1)
    scale = K.edge_lengths * np.roll(K.edge_lengths, 1)
    flat = bn <= collinear_tol * scale
    degenerate = flat | np.roll(flat, -1)
    torsion = np.where(degenerate, 0.0, phi / K.edge_lengths)
    kappa = np.where(flat, 0.0, kappa)
    return CurveProfile(K.arclength(), kappa, torsion, K.length)


# -- 222 symmetry -------------------------------------------------------------


def half_turn(axis) -> np.ndarray:
    a = np.asarray(axis, dtype=float)
    return 2.0 * np.outer(a, a) - np.eye(3)


@dataclass(frozen=True)
class SymmetryGroup222:
    """Half-turns about three orthogonal axes acting on vertex indices.

    ``axes[0]`` acts by ``i -> i + n/2``, ``axes[1]`` by ``i -> offset - i`` and
    ``axes[2]`` (their product) by ``i -> offset - i + n/2``. The default matches
    :func:`generate_torus_knot` with ``q = 2``.
    """

    axes: np.ndarray = field(default_factory=lambda: np.array([[0.0, 0, 1], [1, 0, 0], [0, 1, 0]]))
    offset: int = 0

    def __post_init__(self):
        A = np.asarray(self.axes, dtype=float)
        if A.shape != (3, 3):
            raise DomainError("222 group needs three axes")
        A = A / np.linalg.norm(A, axis=1, keepdims=True)
        G = A @ A.T
        if np.max(np.abs(G - np.eye(3))) >= 1e-10:
            raise DomainError("222 group axes must be mutually orthogonal")
        object.__setattr__(self, "axes", A)

    def actions(self, n: int):
        """Yield ``(rotation, index_map)`` for the four group elements."""
        if n % 4:
            raise DomainError(f"222 symmetrization needs n divisible by 4, got {n}")
        i = np.arange(n)
        h = n // 2
        c = self.offset
        yield np.eye(3), i
        yield half_turn(self.axes[0]), (i + h) % n
        yield half_turn(self.axes[1]), (c - i) % n
        yield half_turn(self.axes[2]), (c - i + h) % n


def symmetrize_222(K: PolyKnot | np.ndarray, G: SymmetryGroup222 | None = None):
    """Orthogonal projection onto curves invariant under ``G``.

    Each vertex is replaced by the average of the group images that land on it:
    ``x_i <- mean_g R_g x_{sigma_g(i)}``. Returns the same type it was given.
    """
    G = G or SymmetryGroup222()
    X = K.vertices if isinstance(K, PolyKnot) else np.asarray(K, dtype=float)
    Y = np.zeros_like(X)
    for R, sigma in G.actions(X.shape[0]):
        Y += X[sigma] @ R.T
    Y /= 4.0
    if isinstance(K, PolyKnot):
        return PolyKnot(Y, K.metadata)
    return Y


def symmetry_defect(K: PolyKnot | np.ndarray, G: SymmetryGroup222 | None = None) -> float:
    """Largest ``|x_{sigma_g(i)} - R_g x_i|`` over group elements and vertices."""
    G = G or SymmetryGroup222()
    X = K.vertices if isinstance(K, PolyKnot) else np.asarray(K, dtype=float)
    return max(float(np.abs(X[sigma] - X @ R.T).max()) for R, sigma in G.actions(X.shape[0]))
