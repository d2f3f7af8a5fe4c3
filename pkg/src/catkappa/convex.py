"""Geodesically convex sets and the metric projection onto them.

Supported shapes: single geodesic balls, finite intersections of balls
(with a supplied interior witness), and the whole space.  Single-ball
projection is closed form: clip the geodesic from the center through the
query point at the radius.  Euclidean intersections use Dykstra's
alternating projections (the true metric projection); curved
intersections run plain cyclic single-ball sweeps until the iterate
stabilizes, and the limit of these nonexpansive sweeps is itself
nonexpansive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ProjectionDidNotConverge
from .model_space import (
    ModelSpace,
    Point,
    dist_arrays,
    distance,
    geodesic_arrays,
    geodesic_point,
)

CONTAIN_TOL = 1e-9
SWEEP_TOL = 1e-10
MAX_SWEEPS = 500


@dataclass(frozen=True)
class ConvexSet:
    """A convex subset of a model space.

    ``kind`` is one of "ball", "intersection", "whole_space".  ``balls``
    holds (center, radius) pairs; ``witness`` is an interior point
    required for intersections.
    """

    space: ModelSpace
    kind: str
    balls: tuple = ()
    witness: Point | None = None

    def __post_init__(self):
        if self.kind not in ("ball", "intersection", "whole_space"):
            raise ValueError(f"unknown set kind {self.kind!r}")
        for center, radius in self.balls:
            if radius <= 0:
                raise ValueError("ball radius must be positive")
            if self.space.kappa > 0 and radius >= math.pi / (
                2.0 * math.sqrt(self.space.kappa)
            ):
                raise ValueError(
                    "ball radius must be below pi / (2 sqrt(kappa)) for convexity"
                )
        if self.kind == "intersection":
            if not self.balls:
                raise ValueError("intersection needs at least one ball")
            if self.witness is None:
                raise ValueError("intersection needs an interior witness point")
            for center, radius in self.balls:
                if distance(self.space, center, self.witness) > radius:
                    raise ValueError("witness does not lie in every ball")

    def radius_bound(self) -> float:
        """Upper bound on rad(K): max distance from the best known center."""
        if self.kind == "whole_space":
            return self.space.diameter_bound
        return min(radius for _, radius in self.balls)

    def diameter_bound(self) -> float:
        """Upper bound on diam(K), capped by the ambient diameter bound."""
        if self.kind == "whole_space":
            return self.space.diameter_bound
        return min(
            min(2.0 * radius for _, radius in self.balls), self.space.diameter_bound
        )


def ball(space: ModelSpace, center: Point, radius: float) -> ConvexSet:
    return ConvexSet(space, "ball", ((center, radius),))


def intersection(space: ModelSpace, balls, witness: Point) -> ConvexSet:
    return ConvexSet(space, "intersection", tuple(balls), witness)


def whole_space(space: ModelSpace) -> ConvexSet:
    return ConvexSet(space, "whole_space")


def contains(K: ConvexSet, x: Point, tol: float = CONTAIN_TOL) -> bool:
    """True iff x satisfies every defining ball constraint within tol."""
    if K.kind == "whole_space":
        return True
    return all(
        distance(K.space, center, x) <= radius + tol for center, radius in K.balls
    )


def _project_ball(space: ModelSpace, center: Point, radius: float, x: Point) -> Point:
    d = distance(space, center, x)
    if d <= radius:
        return x
    return geodesic_point(space, center, x, radius / d)


def _dykstra_euclidean(K: ConvexSet, x: Point) -> Point:
    """Dykstra's alternating projections: converges to the true metric
    projection onto an intersection of convex sets in Euclidean space,
    unlike plain cyclic sweeps which only reach feasibility."""
    space = K.space
    p = np.array(x.coords, dtype=float)
    corrections = [np.zeros_like(p) for _ in K.balls]
    for _ in range(MAX_SWEEPS):
        prev = p
        for i, (center, radius) in enumerate(K.balls):
            y = p + corrections[i]
            p = _project_ball(space, center, radius, Point(y)).coords.copy()
            corrections[i] = y - p
        if float(np.linalg.norm(prev - p)) < SWEEP_TOL:
            return Point(p)
    raise ProjectionDidNotConverge(
        f"Dykstra projection did not stabilize in {MAX_SWEEPS} sweeps"
    )


def project(K: ConvexSet, x: Point) -> Point:
    """Nearest point of K to x.

    Exact for balls and the whole space.  Euclidean intersections use
    Dykstra's algorithm (true metric projection); curved intersections
    fall back to cyclic single-ball sweeps, whose limit is feasible and
    nonexpansive in x but may not be nearest.  Both run until successive
    sweeps move less than SWEEP_TOL or the sweep budget is exhausted.
    """
    if K.kind == "whole_space" or contains(K, x, 1e-12):
        return x
    if K.kind == "ball":
        center, radius = K.balls[0]
        return _project_ball(K.space, center, radius, x)
    if K.space.kappa == 0:
        return _dykstra_euclidean(K, x)
    p = x
    for _ in range(MAX_SWEEPS):
        prev = p
        for center, radius in K.balls:
            p = _project_ball(K.space, center, radius, p)
        if distance(K.space, prev, p) < SWEEP_TOL:
            return p
    raise ProjectionDidNotConverge(
        f"cyclic projection did not stabilize in {MAX_SWEEPS} sweeps"
    )


def _project_ball_arrays(
    space: ModelSpace, center: Point, radius: float, xs: np.ndarray
) -> np.ndarray:
    c = center.coords[np.newaxis, :]
    d = dist_arrays(space, c, xs)
    inside = d <= radius
    t = np.where(inside, 1.0, radius / np.where(inside, 1.0, d))
    clipped = geodesic_arrays(space, np.broadcast_to(c, xs.shape), xs, t)
    return np.where(inside[:, np.newaxis], xs, clipped)


def project_arrays(K: ConvexSet, xs: np.ndarray) -> np.ndarray:
    """Vectorized ``project`` over stacked coordinates of shape (n, m)."""
    xs = np.asarray(xs, dtype=float)
    if K.kind == "whole_space":
        return xs
    if K.kind == "ball":
        center, radius = K.balls[0]
        return _project_ball_arrays(K.space, center, radius, xs)
    p = xs
    corrections = None
    if K.space.kappa == 0:
        corrections = [np.zeros_like(xs) for _ in K.balls]
    for _ in range(MAX_SWEEPS):
        prev = p
        for i, (center, radius) in enumerate(K.balls):
            y = p if corrections is None else p + corrections[i]
            nxt = _project_ball_arrays(K.space, center, radius, y)
            if corrections is not None:
                corrections[i] = y - nxt
            p = nxt
        if float(np.max(dist_arrays(K.space, prev, p))) < SWEEP_TOL:
            return p
    raise ProjectionDidNotConverge(
        f"cyclic projection did not stabilize in {MAX_SWEEPS} sweeps"
    )
