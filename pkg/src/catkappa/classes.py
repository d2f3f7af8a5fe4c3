"""Inequality verifiers for single- and set-valued hybrid mapping classes.

Each verifier evaluates its class inequality on a finite sample of ordered
point pairs and reports the worst signed slack (RHS - LHS).  A sample
verdict of ``satisfied_on_sample`` is a heuristic certificate; a
``violated`` verdict is a sound refutation with a witness pair.

Coefficient functions a1, a2, a3, b1, b2, k1, k2 may be constants or
callables of the first argument x.  All inequalities are evaluated with
geodesic distances in place of norms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainSamplerEmpty, MissingParam
from .model_space import ModelSpace, Point, distance, sample_ball_arrays
from .setmap import CompactSet, MultivaluedMap, dist_point_set, hausdorff

DEFAULT_TOL = 1e-10

CLASSICAL_IDS = (
    "nonexpansive",
    "nonspreading",
    "hybrid",
    "lambda_hybrid",
    "alpha_nonexpansive",
    "ab_generalized_hybrid",
    "lin_generalized_hybrid",
)
MULTIVALUED_IDS = ("type1", "generalized_type1", "type2", "generalized_type2")


@dataclass
class HybridParams:
    """Coefficients for the hybrid-class inequalities; unused ones stay None."""

    a1: object = None
    a2: object = None
    a3: object = None
    b1: object = None
    b2: object = None
    k1: object = None
    k2: object = None
    lam: Optional[float] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None

    def coeff(self, name: str, x: Point) -> float:
        v = getattr(self, name)
        if v is None:
            raise MissingParam(f"coefficient {name!r} required but not supplied")
        if callable(v):
            return float(v(x))
        return float(v)

    def scalar(self, name: str) -> float:
        v = getattr(self, name)
        if v is None:
            raise MissingParam(f"parameter {name!r} required but not supplied")
        return float(v)


@dataclass
class ClassReport:
    class_id: str
    sampled_pairs: int
    worst_slack: float
    witness: object
    verdict: str

    @property
    def satisfied(self) -> bool:
        return self.verdict == "satisfied_on_sample"


def pair_sampler(
    space: ModelSpace, center: Point, radius: float, n: int = 2000, seed: int = 0
):
    """n ordered point pairs uniform in the ball around center."""
    rng = np.random.default_rng(seed)
    xs = sample_ball_arrays(space, center, radius, n, rng)
    ys = sample_ball_arrays(space, center, radius, n, rng)
    return [(Point(x), Point(y)) for x, y in zip(xs, ys)]


def _report(class_id, evaluations, tol):
    """Fold per-pair (slack, scale, witness) triples into a ClassReport."""
    if not evaluations:
        raise DomainSamplerEmpty("sampler produced no pairs")
    worst_slack = np.inf
    worst_witness = None
    violated = False
    for slack, scale, witness in evaluations:
        if slack < worst_slack:
            worst_slack = slack
            worst_witness = witness
        if slack < -tol * scale:
            violated = True
    if violated:
        return ClassReport(
            class_id, len(evaluations), worst_slack, worst_witness, "violated"
        )
    return ClassReport(class_id, len(evaluations), worst_slack, None, "satisfied_on_sample")


def _classical_slack(space, T, class_id, params, x, y):
    d = distance
    tx, ty = T(x), T(y)
    dtt = d(space, tx, ty)
    dxy = d(space, x, y)
    if class_id == "nonexpansive":
        return dxy - dtt, 1.0 + abs(dxy)
    dtxy = d(space, tx, y)
    dxty = d(space, x, ty)
    if class_id == "nonspreading":
        rhs = dtxy**2 + dxty**2
        return rhs - 2.0 * dtt**2, 1.0 + abs(rhs)
    if class_id == "hybrid":
        rhs = dxy**2 + dtxy**2 + dxty**2
        return rhs - 3.0 * dtt**2, 1.0 + abs(rhs)
    if class_id == "lambda_hybrid":
        lam = params.scalar("lam")
        lhs = (1.0 + lam) * dtt**2 - lam * dxty**2
        rhs = (1.0 - lam) * dxy**2 + lam * dtxy**2
        return rhs - lhs, 1.0 + abs(rhs)
    if class_id == "alpha_nonexpansive":
        alpha = params.scalar("alpha")
        rhs = (1.0 - 2.0 * alpha) * dxy**2 + alpha * dtxy**2 + alpha * dxty**2
        return rhs - dtt**2, 1.0 + abs(rhs)
    if class_id == "ab_generalized_hybrid":
        alpha = params.scalar("alpha")
        beta = params.scalar("beta")
        lhs = alpha * dtt**2 + (1.0 - alpha) * dxty**2
        rhs = beta * dtxy**2 + (1.0 - beta) * dxy**2
        return rhs - lhs, 1.0 + abs(rhs)
    if class_id == "lin_generalized_hybrid":
        dtxx = d(space, tx, x)
        dtyy = d(space, ty, y)
        rhs = (
            params.coeff("a1", x) * dxy**2
            + params.coeff("a2", x) * dtxy**2
            + params.coeff("a3", x) * dxty**2
            + params.coeff("k1", x) * dtxx**2
            + params.coeff("k2", x) * dtyy**2
        )
        return rhs - dtt**2, 1.0 + abs(rhs)
    raise ValueError(f"unknown classical class id {class_id!r}")


def check_classical(
    T: Callable[[Point], Point],
    class_id: str,
    params: HybridParams,
    pairs,
    space: ModelSpace,
    tol: float = DEFAULT_TOL,
) -> ClassReport:
    """Verify one of the single-valued class inequalities on sampled pairs."""
    evaluations = []
    for x, y in pairs:
        slack, scale = _classical_slack(space, T, class_id, params, x, y)
        evaluations.append((slack, scale, (x, y)))
    return _report(class_id, evaluations, tol)


def _type1_pair_slack(space, params, x, y, u, v):
    lhs = (
        params.coeff("a1", x) * distance(space, u, v) ** 2
        + params.coeff("a2", x) * distance(space, u, y) ** 2
    )
    rhs = (
        params.coeff("b1", x) * distance(space, x, v) ** 2
        + params.coeff("b2", x) * distance(space, x, y) ** 2
    )
    return rhs - lhs, 1.0 + abs(rhs)


def _gen_type1_pair_slack(space, params, x, y, u, v):
    lhs = distance(space, u, v) ** 2
    rhs = (
        params.coeff("a1", x) * distance(space, x, y) ** 2
        + params.coeff("a2", x) * distance(space, u, y) ** 2
        + params.coeff("a3", x) * distance(space, x, v) ** 2
        + params.coeff("k1", x) * distance(space, u, x) ** 2
        + params.coeff("k2", x) * distance(space, v, y) ** 2
    )
    return rhs - lhs, 1.0 + abs(rhs)


def _quantified(space, T, params, pairs, pair_slack, quantifier_mode):
    evaluations = []
    for x, y in pairs:
        tx, ty = T(x), T(y)
        best = None
        for u in tx.points:
            for v in ty.points:
                slack, scale = pair_slack(space, params, x, y, u, v)
                item = (slack, scale, (x, y, u, v))
                if best is None:
                    best = item
                elif quantifier_mode == "forall" and slack < best[0]:
                    best = item
                elif quantifier_mode == "exists" and slack > best[0]:
                    best = item
        evaluations.append(best)
    return evaluations


def check_type1(
    T: MultivaluedMap,
    params: HybridParams,
    pairs,
    quantifier_mode: str = "forall",
    tol: float = DEFAULT_TOL,
) -> ClassReport:
    """(a1,a2,b1,b2)-multivalued hybrid type I inequality over image pairs.

    forall mode requires the inequality for every u in Tx, v in Ty (the
    definition's literal reading); exists mode only for some pair.
    """
    space = T.domain.space
    evaluations = _quantified(space, T, params, pairs, _type1_pair_slack, quantifier_mode)
    return _report("type1", evaluations, tol)


def check_generalized_type1(
    T: MultivaluedMap,
    params: HybridParams,
    pairs,
    quantifier_mode: str = "exists",
    tol: float = DEFAULT_TOL,
) -> ClassReport:
    """Generalized multivalued hybrid type I; default quantifier is exists,
    matching the definition's "there are u in Tx and v in Ty"."""
    space = T.domain.space
    evaluations = _quantified(
        space, T, params, pairs, _gen_type1_pair_slack, quantifier_mode
    )
    return _report("generalized_type1", evaluations, tol)


def check_type2(
    T: MultivaluedMap,
    params: HybridParams,
    pairs,
    tol: float = DEFAULT_TOL,
) -> ClassReport:
    """(a1,a2,b1,b2)-multivalued hybrid type II (set-level, Hausdorff)."""
    space = T.domain.space
    evaluations = []
    for x, y in pairs:
        tx, ty = T(x), T(y)
        lhs = (
            params.coeff("a1", x) * hausdorff(tx, ty) ** 2
            + params.coeff("a2", x) * dist_point_set(y, tx) ** 2
        )
        rhs = (
            params.coeff("b1", x) * dist_point_set(x, ty) ** 2
            + params.coeff("b2", x) * distance(space, x, y) ** 2
        )
        evaluations.append((rhs - lhs, 1.0 + abs(rhs), (x, y)))
    return _report("type2", evaluations, tol)


def check_generalized_type2(
    T: MultivaluedMap,
    params: HybridParams,
    pairs,
    tol: float = DEFAULT_TOL,
) -> ClassReport:
    """Generalized multivalued hybrid type II (set-level, Hausdorff)."""
    space = T.domain.space
    evaluations = []
    for x, y in pairs:
        tx, ty = T(x), T(y)
        lhs = hausdorff(tx, ty) ** 2
        rhs = (
            params.coeff("a1", x) * distance(space, x, y) ** 2
            + params.coeff("a2", x) * dist_point_set(y, tx) ** 2
            + params.coeff("a3", x) * dist_point_set(x, ty) ** 2
            + params.coeff("k1", x) * dist_point_set(x, tx) ** 2
            + params.coeff("k2", x) * dist_point_set(y, ty) ** 2
        )
        evaluations.append((rhs - lhs, 1.0 + abs(rhs), (x, y)))
    return _report("generalized_type2", evaluations, tol)


def _not_in_open_unit(v: float) -> bool:
    return v <= 0.0 or v >= 1.0


def validate_params(class_id: str, params: HybridParams, sample_points):
    """Check the definitional coefficient constraints at every sampled x.

    Returns (ok, first_violation_message).
    """
    pts = list(sample_points)
    if class_id in ("generalized_type1", "generalized_type2", "lin_generalized_hybrid"):
        for x in pts:
            vals = {n: params.coeff(n, x) for n in ("a1", "a2", "a3", "k1", "k2")}
            for n, v in vals.items():
                if not 0.0 <= v <= 1.0:
                    return False, f"{n}(x)={v} outside [0, 1]"
            if vals["a1"] + vals["a2"] + vals["a3"] >= 1.0:
                return (
                    False,
                    f"a1+a2+a3 = {vals['a1'] + vals['a2'] + vals['a3']} >= 1",
                )
            if 2.0 * vals["k1"] >= 1.0 - vals["a2"]:
                return False, f"2*k1 = {2 * vals['k1']} >= 1 - a2 = {1 - vals['a2']}"
            if 2.0 * vals["k2"] >= 1.0 - vals["a3"]:
                return False, f"2*k2 = {2 * vals['k2']} >= 1 - a3 = {1 - vals['a3']}"
        return True, None
    if class_id == "type1":
        for x in pts:
            vals = {n: params.coeff(n, x) for n in ("a1", "a2", "b1", "b2")}
            for n in ("a1", "a2"):
                if not _not_in_open_unit(vals[n]):
                    return False, f"{n}(x)={vals[n]} lies in the excluded interval (0, 1)"
            for n in ("b1", "b2"):
                if not 0.0 <= vals[n] <= 1.0:
                    return False, f"{n}(x)={vals[n]} outside [0, 1]"
            if vals["a1"] + vals["a2"] < 1.0:
                return False, f"a1+a2 = {vals['a1'] + vals['a2']} < 1"
            if vals["b1"] + vals["b2"] > 1.0:
                return False, f"b1+b2 = {vals['b1'] + vals['b2']} > 1"
        return True, None
    if class_id == "type2":
        for x in pts:
            vals = {n: params.coeff(n, x) for n in ("a1", "a2", "b1", "b2")}
            if vals["a1"] + vals["a2"] < 1.0:
                return False, f"a1+a2 = {vals['a1'] + vals['a2']} < 1"
            if vals["b1"] + vals["b2"] > 1.0:
                return False, f"b1+b2 = {vals['b1'] + vals['b2']} > 1"
        return True, None
    if class_id == "alpha_nonexpansive":
        if params.scalar("alpha") >= 1.0:
            return False, f"alpha = {params.scalar('alpha')} >= 1"
        return True, None
    if class_id == "lambda_hybrid":
        params.scalar("lam")
        return True, None
    if class_id == "ab_generalized_hybrid":
        params.scalar("alpha")
        params.scalar("beta")
        return True, None
    if class_id in ("nonexpansive", "nonspreading", "hybrid"):
        return True, None
    raise ValueError(f"unknown class id {class_id!r}")
