"""Geometry of the three constant-curvature model spaces.

A space of curvature kappa is realized in an ambient embedding:

* kappa = 0: R^n with the Euclidean metric.
* kappa > 0: unit vectors in R^(n+1); distances are angles divided by
  sqrt(kappa).
* kappa < 0: the upper hyperboloid sheet in R^(n+1) with the Minkowski
  form <x,y> = -x0*y0 + x1*y1 + ... ; distances are arccosh(-<x,y>)
  divided by sqrt(-kappa).

Interpolation convention: ``geodesic_point(space, x, y, t)`` returns the
point z on the geodesic [x, y] with d(x, z) = t * d(x, y).  The weight t
multiplies the second argument, which is the convention every iteration
formula in this package relies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AntipodalPoints,
    EmbeddingViolation,
    EpsilonOutOfRange,
    InfeasibleConstraints,
)

EMBED_TOL = 1e-12
CLAMP_TOL = 1e-9
SMALL_ANGLE = 1e-8


@dataclass(frozen=True, eq=False)
class Point:
    """An immutable point given by its ambient coordinates."""

    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", np.asarray(self.coords, dtype=float))
        self.coords.setflags(write=False)

    def __repr__(self):
        return f"Point({np.array2string(self.coords, precision=6)})"


@dataclass(frozen=True)
class ModelSpace:
    """Constant-curvature model space of dimension ``dim``."""

    kappa: float
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")

    @property
    def model(self) -> str:
        if self.kappa > 0:
            return "sphere"
        if self.kappa < 0:
            return "hyperboloid"
        return "euclidean"

    @property
    def ambient_dim(self) -> int:
        return self.dim if self.kappa == 0 else self.dim + 1

    @property
    def diameter_bound(self) -> float:
        """Distance bound beyond which geodesics need not be unique."""
        if self.kappa > 0:
            return math.pi / math.sqrt(self.kappa)
        return math.inf

    def point(self, coords) -> Point:
        """Validate coordinates and wrap them as a Point."""
        c = np.asarray(coords, dtype=float)
        if c.shape != (self.ambient_dim,):
            raise EmbeddingViolation(
                f"expected {self.ambient_dim} coordinates, got shape {c.shape}"
            )
        _check_embedding(self, c[np.newaxis, :])
        return Point(c)

    def base_point(self) -> Point:
        """A canonical point: the origin, or the pole (1, 0, ..., 0)."""
        c = np.zeros(self.ambient_dim)
        if self.kappa != 0:
            c[0] = 1.0
        return Point(c)


@dataclass(frozen=True)
class ConvexityConstants:
    """R-convexity constant derived from a separation angle epsilon."""

    epsilon: float
    R: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "R", (math.pi - 2.0 * self.epsilon) * math.tan(self.epsilon)
        )

    def diam_bound(self, kappa: float) -> float:
        """Diameter bound (pi - epsilon) / (2 sqrt(kappa)) for kappa > 0."""
        if kappa > 0:
            return (math.pi - self.epsilon) / (2.0 * math.sqrt(kappa))
        return math.inf

    def convexity_diam_bound(self, kappa: float) -> float:
        """Diameter bound (pi - 2 epsilon) / (2 sqrt(kappa)) under which the
        R-convexity inequality with this R provably holds for kappa > 0.

        Strictly tighter than ``diam_bound``: sampled counterexamples show
        the inequality can fail between the two bounds.
        """
        if kappa > 0:
            return (math.pi - 2.0 * self.epsilon) / (2.0 * math.sqrt(kappa))
        return math.inf


def r_constant(epsilon: float) -> ConvexityConstants:
    """Convexity constant R = (pi - 2*eps) * tan(eps) for eps in (0, pi/2)."""
    if not 0.0 < epsilon < math.pi / 2.0:
        raise EpsilonOutOfRange(f"epsilon={epsilon} not in (0, pi/2)")
    return ConvexityConstants(epsilon)


# ---------------------------------------------------------------------------
# Array-level primitives.  All accept stacked coordinates of shape (..., m)
# where m is the ambient dimension, and broadcast over leading axes.
# ---------------------------------------------------------------------------


def minkowski_dot(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return -x[..., 0] * y[..., 0] + np.sum(x[..., 1:] * y[..., 1:], axis=-1)


def _check_embedding(space: ModelSpace, x: np.ndarray, tol: float = EMBED_TOL):
    if space.kappa > 0:
        err = np.abs(np.linalg.norm(x, axis=-1) - 1.0)
        if np.any(err > tol):
            raise EmbeddingViolation(
                f"sphere point off the unit sphere by {float(np.max(err)):.3e}"
            )
    elif space.kappa < 0:
        err = np.abs(minkowski_dot(x, x) + 1.0)
        if np.any(err > tol) or np.any(x[..., 0] <= 0):
            raise EmbeddingViolation("hyperboloid constraint <x,x> = -1, x0 > 0 violated")


def _renormalize(space: ModelSpace, x: np.ndarray) -> np.ndarray:
    if space.kappa > 0:
        return x / np.linalg.norm(x, axis=-1, keepdims=True)
    if space.kappa < 0:
        return x / np.sqrt(-minkowski_dot(x, x))[..., np.newaxis]
    return x


def dist_arrays(space: ModelSpace, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Geodesic distance on stacked coordinates (no embedding validation).

    Curved spaces use the half-chord forms (2 arcsin, 2 arcsinh), which
    are exact at zero separation, instead of arccos/arccosh of the inner
    product, whose conditioning degrades to sqrt(machine eps) there.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if space.kappa == 0:
        return np.linalg.norm(x - y, axis=-1)
    if space.kappa > 0:
        c = np.sum(x * y, axis=-1)
        if np.any(c > 1.0 + CLAMP_TOL):
            raise EmbeddingViolation("spherical inner product above 1 beyond tolerance")
        if np.any(c <= -1.0 + EMBED_TOL):
            raise AntipodalPoints("antipodal pair: spherical distance not unique")
        half_chord = 0.5 * np.linalg.norm(x - y, axis=-1)
        theta = np.where(
            c >= 0.0,
            2.0 * np.arcsin(np.clip(half_chord, 0.0, 1.0)),
            np.arccos(np.clip(c, -1.0, 1.0)),
        )
        return theta / math.sqrt(space.kappa)
    m = -minkowski_dot(x, y)
    if np.any(m < 1.0 - CLAMP_TOL):
        raise EmbeddingViolation("Minkowski product implies imaginary distance")
    diff = x - y
    q = np.maximum(minkowski_dot(diff, diff), 0.0)
    return 2.0 * np.arcsinh(0.5 * np.sqrt(q)) / math.sqrt(-space.kappa)


def geodesic_arrays(space: ModelSpace, x: np.ndarray, y: np.ndarray, t) -> np.ndarray:
    """Point at parameter t along the geodesic from x to y (stacked).

    Sphere and hyperboloid use sin/sinh-weighted combinations; angles below
    SMALL_ANGLE fall back to linear interpolation plus renormalization,
    which agrees with the exact formula to second order and avoids the
    cancellation in sin(t*theta)/sin(theta).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    t = np.asarray(t, dtype=float)[..., np.newaxis]
    if space.kappa == 0:
        return x + t * (y - x)
    if space.kappa > 0:
        c = np.sum(x * y, axis=-1)
        if np.any(c <= -1.0 + EMBED_TOL):
            raise AntipodalPoints("antipodal pair: geodesic not unique")
        theta = np.arccos(np.clip(c, -1.0, 1.0))[..., np.newaxis]
        small = theta < SMALL_ANGLE
        safe = np.where(small, 1.0, theta)
        z = np.where(
            small,
            (1.0 - t) * x + t * y,
            (np.sin((1.0 - t) * safe) * x + np.sin(t * safe) * y)
            / np.sin(np.where(small, 1.0, safe)),
        )
        return _renormalize(space, z)
    m = -minkowski_dot(x, y)
    eta = np.arccosh(np.maximum(m, 1.0))[..., np.newaxis]
    small = eta < SMALL_ANGLE
    safe = np.where(small, 1.0, eta)
    z = np.where(
        small,
        (1.0 - t) * x + t * y,
        (np.sinh((1.0 - t) * safe) * x + np.sinh(t * safe) * y) / np.sinh(safe),
    )
    return _renormalize(space, z)


def tangent_project(space: ModelSpace, base: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Project ambient vectors g onto the tangent space at base."""
    if space.kappa == 0:
        return np.asarray(g, dtype=float)
    if space.kappa > 0:
        return g - np.sum(g * base, axis=-1, keepdims=True) * base
    return g + minkowski_dot(g, base)[..., np.newaxis] * base


def tangent_norm(space: ModelSpace, base: np.ndarray, v: np.ndarray) -> np.ndarray:
    if space.kappa < 0:
        return np.sqrt(minkowski_dot(v, v))
    return np.linalg.norm(v, axis=-1)


def exp_arrays(space: ModelSpace, base: np.ndarray, unit: np.ndarray, s) -> np.ndarray:
    """Exponential map: move distance s from base along unit tangent."""
    s = np.asarray(s, dtype=float)[..., np.newaxis]
    if space.kappa == 0:
        return base + s * unit
    if space.kappa > 0:
        theta = s * math.sqrt(space.kappa)
        return _renormalize(space, np.cos(theta) * base + np.sin(theta) * unit)
    theta = s * math.sqrt(-space.kappa)
    return _renormalize(space, np.cosh(theta) * base + np.sinh(theta) * unit)


def random_tangent(space: ModelSpace, base: np.ndarray, n: int, rng) -> np.ndarray:
    """n unit tangent vectors at base (base of shape (m,))."""
    g = rng.standard_normal((n, space.ambient_dim))
    v = tangent_project(space, base[np.newaxis, :], g)
    norms = tangent_norm(space, base, v)
    norms = np.where(norms < 1e-30, 1.0, norms)
    return v / norms[:, np.newaxis]


def sample_ball_arrays(
    space: ModelSpace, center: Point, radius: float, n: int, rng
) -> np.ndarray:
    """n random points within geodesic distance radius of center.

    Radii are uniform in [0, radius]; directions uniform on the tangent
    sphere.  Not volume-uniform, which none of the sampled checks need.
    """
    u = random_tangent(space, center.coords, n, rng)
    s = radius * rng.random(n)
    return exp_arrays(space, center.coords[np.newaxis, :], u, s)


# ---------------------------------------------------------------------------
# Point-level operations.
# ---------------------------------------------------------------------------


def distance(space: ModelSpace, x: Point, y: Point) -> float:
    """Geodesic distance between validated points."""
    _check_embedding(space, x.coords[np.newaxis, :])
    _check_embedding(space, y.coords[np.newaxis, :])
    return float(dist_arrays(space, x.coords, y.coords))


def geodesic_point(space: ModelSpace, x: Point, y: Point, t: float) -> Point:
    """The point z = (1-t)x (+) ty with d(x, z) = t * d(x, y)."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t={t} outside [0, 1]")
    _check_embedding(space, x.coords[np.newaxis, :])
    _check_embedding(space, y.coords[np.newaxis, :])
    if np.array_equal(x.coords, y.coords):
        return x
    return Point(geodesic_arrays(space, x.coords, y.coords, t))


def check_convexity_inequality(
    space: ModelSpace, x: Point, y: Point, z: Point, t: float, R: float
) -> float:
    """Signed slack of the R-convexity (CN*-type) inequality.

    Returns RHS - LHS of

        d^2(x, (1-t)y (+) tz) <= (1-t)d^2(x,y) + t d^2(x,z)
                                  - (R/2) t (1-t) d^2(y,z)

    so a nonnegative value means the inequality holds at (x, y, z, t).
    """
    m = geodesic_point(space, y, z, t)
    dxm = distance(space, x, m)
    dxy = distance(space, x, y)
    dxz = distance(space, x, z)
    dyz = distance(space, y, z)
    rhs = (1.0 - t) * dxy**2 + t * dxz**2 - 0.5 * R * t * (1.0 - t) * dyz**2
    return rhs - dxm**2


def convexity_slack_samples(
    space: ModelSpace,
    center: Point,
    radius: float,
    R: float,
    n: int,
    seed: int = 0,
) -> np.ndarray:
    """Vectorized Monte-Carlo slacks of the R-convexity inequality.

    Samples n quadruples (x, y, z, t) with x, y, z in the ball of the given
    radius around center and t uniform in [0, 1].
    """
    rng = np.random.default_rng(seed)
    x = sample_ball_arrays(space, center, radius, n, rng)
    y = sample_ball_arrays(space, center, radius, n, rng)
    z = sample_ball_arrays(space, center, radius, n, rng)
    t = rng.random(n)
    m = geodesic_arrays(space, y, z, t)
    rhs = (
        (1.0 - t) * dist_arrays(space, x, y) ** 2
        + t * dist_arrays(space, x, z) ** 2
        - 0.5 * R * t * (1.0 - t) * dist_arrays(space, y, z) ** 2
    )
    return rhs - dist_arrays(space, x, m) ** 2


def _chord_angle(space: ModelSpace, r: float, eps: float) -> float:
    """Tangent angle at the apex putting two radius-r legs eps apart."""
    if space.kappa > 0:
        sk = math.sqrt(space.kappa)
        a, c = sk * r, sk * eps
        cos_phi = (math.cos(c) - math.cos(a) ** 2) / math.sin(a) ** 2
    elif space.kappa < 0:
        sk = math.sqrt(-space.kappa)
        a, c = sk * r, sk * eps
        cos_phi = (math.cosh(a) ** 2 - math.cosh(c)) / math.sinh(a) ** 2
    else:
        cos_phi = 1.0 - eps**2 / (2.0 * r**2)
    if not -1.0 <= cos_phi <= 1.0:
        raise InfeasibleConstraints(
            f"no two points at distance {eps} on the radius-{r} sphere"
        )
    return math.acos(cos_phi)


def estimate_modulus(
    space: ModelSpace, r: float, eps: float, samples: int = 10_000, rng_seed: int = 0
) -> float:
    """Sampling upper bound for the modulus of convexity at (r, eps).

    Minimizes 1 - d(a, m)/r over sampled triples (a, x, y) with
    d(a, x) <= r, d(a, y) <= r, d(x, y) >= eps, where m is the midpoint of
    [x, y].  Half the draws place x and y exactly on the radius-r sphere
    at separation exactly eps (the extremal configuration); the rest are
    uniform in the ball with rejection on the separation constraint.
    Under a fixed seed the estimate is nonincreasing in ``samples``.
    """
    if r <= 0:
        raise ValueError("radius must be positive")
    if space.kappa > 0 and r >= math.pi / (2.0 * math.sqrt(space.kappa)):
        raise ValueError("radius must be below pi / (2 sqrt(kappa))")
    if eps < 0:
        raise ValueError("separation must be nonnegative")
    a = space.base_point()
    if eps > 2.0 * r + 1e-12:
        raise InfeasibleConstraints("separation exceeds the ball diameter 2r")
    rng = np.random.default_rng(rng_seed)
    best = math.inf
    found = False
    structured_ok = space.dim >= 2
    for i in range(samples):
        if structured_ok and i % 2 == 0:
            u = random_tangent(space, a.coords, 2, rng)
            u1 = u[0]
            w = u[1] - np.sum(u[1] * u[0]) * u[0] if space.kappa >= 0 else None
            if space.kappa < 0:
                w = u[1] - minkowski_dot(u[1][np.newaxis], u[0][np.newaxis])[0] * u[0]
            wn = tangent_norm(space, a.coords, w[np.newaxis, :])[0]
            if wn < 1e-12:
                continue
            w = w / wn
            phi = _chord_angle(space, r, min(eps, 2.0 * r))
            u2 = math.cos(phi) * u1 + math.sin(phi) * w
            x = exp_arrays(space, a.coords, u1, r)
            y = exp_arrays(space, a.coords, u2, r)
        else:
            pts = sample_ball_arrays(space, a, r, 2, rng)
            x, y = pts[0], pts[1]
            if float(dist_arrays(space, x, y)) < eps - 1e-12:
                continue
        m = geodesic_arrays(space, x, y, 0.5)
        val = 1.0 - float(dist_arrays(space, a.coords, m)) / r
        found = True
        if val < best:
            best = val
    if not found:
        raise InfeasibleConstraints("no admissible triple found in the sample budget")
    return best
