"""Finite compact point sets, the Hausdorff metric, and set-valued maps.

Compact sets are nonempty finite point lists; every distance, Hausdorff
value, and nearest-point selection is exact (attained) on them.  Ties are
broken by lowest construction index so traces are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .convex import ConvexSet
from .model_space import ModelSpace, Point, distance

DEDUP_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class CompactSet:
    """A nonempty finite set of points in one model space."""

    space: ModelSpace
    points: tuple

    def __len__(self):
        return len(self.points)


def compact_set(space: ModelSpace, points) -> CompactSet:
    """Build a CompactSet, collapsing duplicates closer than DEDUP_TOL."""
    pts = list(points)
    if not pts:
        raise ValueError("compact set must be nonempty")
    kept: list[Point] = []
    for p in pts:
        if not isinstance(p, Point):
            p = space.point(p)
        if all(distance(space, p, q) >= DEDUP_TOL for q in kept):
            kept.append(p)
    return CompactSet(space, tuple(kept))


@dataclass(frozen=True, eq=False)
class MultivaluedMap:
    """A point-to-compact-set map over a convex domain.

    ``eval_fn`` must be deterministic; ``tags`` records declared class
    memberships and coefficient metadata (never verified here).
    """

    domain: ConvexSet
    eval_fn: Callable[[Point], CompactSet]
    tags: dict = field(default_factory=dict)

    def __call__(self, x: Point) -> CompactSet:
        return self.eval_fn(x)


def multivalued_map(domain: ConvexSet, eval_fn, tags=None, check_points=()) -> MultivaluedMap:
    """Register a map, spot-checking nonemptiness and determinism."""
    m = MultivaluedMap(domain, eval_fn, dict(tags or {}))
    for x in check_points:
        image = m(x)
        if len(image) == 0:
            raise ValueError("map image is empty at a sampled domain point")
        again = m(x)
        if len(again) != len(image) or any(
            distance(domain.space, a, b) > DEDUP_TOL
            for a, b in zip(image.points, again.points)
        ):
            raise ValueError("map is not deterministic at a sampled domain point")
    return m


def nearest_index(x: Point, A: CompactSet) -> int:
    """Index of the member of A nearest to x (lowest index wins ties)."""
    best_i = 0
    best_d = distance(A.space, x, A.points[0])
    for i, q in enumerate(A.points[1:], start=1):
        d = distance(A.space, x, q)
        if d < best_d:
            best_i, best_d = i, d
    return best_i


def dist_point_set(x: Point, A: CompactSet) -> float:
    """min_{y in A} d(x, y); the minimum is attained (finite set)."""
    return min(distance(A.space, x, q) for q in A.points)


def nearest_selection(x: Point, A: CompactSet) -> Point:
    """A member of A attaining dist_point_set(x, A), stable under ties."""
    return A.points[nearest_index(x, A)]


def hausdorff(A: CompactSet, B: CompactSet) -> float:
    """Hausdorff distance max(sup_A d(., B), sup_B d(., A)), exact."""
    forward = max(dist_point_set(a, B) for a in A.points)
    backward = max(dist_point_set(b, A) for b in B.points)
    return max(forward, backward)
