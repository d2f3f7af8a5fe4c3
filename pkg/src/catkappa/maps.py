"""Builtin set-valued maps used by experiments and the acceptance suite."""

from __future__ import annotations

from .convex import ConvexSet
from .model_space import (
    ModelSpace,
    Point,
    distance,
    exp_arrays,
    geodesic_point,
    tangent_norm,
    tangent_project,
)
from .setmap import CompactSet, MultivaluedMap, compact_set, multivalued_map


def _singleton(space, p: Point) -> CompactSet:
    return CompactSet(space, (p,))


def contraction_to_point(domain: ConvexSet, target: Point, rate: float) -> MultivaluedMap:
    """T(x) = {point a fraction ``rate`` of the way from x toward target}.

    rate = 0.5 halves the distance to target each application; target is
    the unique fixed point and an endpoint (T target = {target}).
    """
    space = domain.space

    def ev(x: Point) -> CompactSet:
        return _singleton(space, geodesic_point(space, x, target, rate))

    return multivalued_map(domain, ev, tags={"id": "contraction_to_point"})


def constant_map(domain: ConvexSet, c: Point) -> MultivaluedMap:
    space = domain.space
    image = _singleton(space, c)
    return multivalued_map(domain, lambda x: image, tags={"id": "constant"})


def identity_map(domain: ConvexSet) -> MultivaluedMap:
    space = domain.space
    return multivalued_map(
        domain, lambda x: _singleton(space, x), tags={"id": "identity"}
    )


def expansion_from_point(domain: ConvexSet, center: Point, factor: float) -> MultivaluedMap:
    """T(x) = {point at distance factor * d(center, x) from center through x}."""
    if factor < 1.0:
        raise ValueError("expansion factor must be >= 1")
    space = domain.space

    def ev(x: Point) -> CompactSet:
        d = distance(space, center, x)
        if d == 0.0:
            return _singleton(space, x)
        v = tangent_project(space, center.coords, x.coords - center.coords)
        if space.kappa != 0:
            # direction of the geodesic center -> x in the tangent space
            v = tangent_project(
                space,
                center.coords,
                geodesic_point(space, center, x, 1e-6).coords - center.coords,
            )
        n = float(tangent_norm(space, center.coords, v))
        u = v / n
        return _singleton(space, Point(exp_arrays(space, center.coords, u, factor * d)))

    return multivalued_map(domain, ev, tags={"id": "expansion_from_point"})


def pair_with_midpoint(domain: ConvexSet, c: Point) -> MultivaluedMap:
    """Two-point map T(x) = {x, midpoint of [x, c]}.

    Every domain point is a fixed point, but only c is an endpoint.
    """
    space = domain.space

    def ev(x: Point) -> CompactSet:
        return compact_set(space, [x, geodesic_point(space, x, c, 0.5)])

    return multivalued_map(domain, ev, tags={"id": "pair_with_midpoint"})


def table_map(domain: ConvexSet, entries) -> MultivaluedMap:
    """Finite lookup map: eval(x) is the image of the nearest table key.

    ``entries`` is a sequence of (key_point, [image_points]); ties go to
    the earliest entry, so evaluation is deterministic.
    """
    space = domain.space
    table = [
        (k, compact_set(space, imgs)) for k, imgs in entries
    ]
    if not table:
        raise ValueError("table map needs at least one entry")

    def ev(x: Point) -> CompactSet:
        best = None
        best_d = None
        for key, image in table:
            d = distance(space, key, x)
            if best_d is None or d < best_d:
                best, best_d = image, d
        return best

    return multivalued_map(domain, ev, tags={"id": "table"})


MAP_BUILDERS = {
    "contraction_to_point": contraction_to_point,
    "constant": constant_map,
    "identity": identity_map,
    "expansion_from_point": expansion_from_point,
    "pair_with_midpoint": pair_with_midpoint,
    "table": table_map,
}
