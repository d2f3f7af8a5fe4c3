"""Fixed-point iteration schemes on model spaces.

Single-valued catalogue: picard, mann, ishikawa, agarwal_s, thianwan,
noor, sp, cr, picard_s.  Projected multivalued schemes: mv_thianwan and
mv_picard_s, which project every combination step back into the domain
and pick image points by a selection rule (nearest point by default).

Every run records the full trace: iterates, per-step residuals
d(x_n, Tx_n), and the scheme's intermediate points.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .convex import ConvexSet, project
from .errors import NotConverged, SchemeUnknown
from .model_space import ModelSpace, Point, distance, geodesic_point
from .setmap import CompactSet, MultivaluedMap, dist_point_set, nearest_selection

SINGLE_VALUED_SCHEMES = (
    "picard",
    "mann",
    "ishikawa",
    "agarwal_s",
    "thianwan",
    "noor",
    "sp",
    "cr",
    "picard_s",
)
MULTIVALUED_SCHEMES = ("mv_thianwan", "mv_picard_s")
ALL_SCHEMES = SINGLE_VALUED_SCHEMES + MULTIVALUED_SCHEMES


@dataclass(frozen=True)
class StepSequences:
    """Deterministic step-size generators alpha, beta, gamma into [0, 1]."""

    alpha: Callable[[int], float]
    beta: Callable[[int], float] = None
    gamma: Callable[[int], float] = None

    def __post_init__(self):
        if self.beta is None:
            object.__setattr__(self, "beta", self.alpha)
        if self.gamma is None:
            object.__setattr__(self, "gamma", self.beta)


def constant(c: float) -> Callable[[int], float]:
    if not 0.0 <= c <= 1.0:
        raise ValueError("constant step must lie in [0, 1]")
    return lambda n: c


def harmonic() -> Callable[[int], float]:
    return lambda n: 1.0 / (n + 2)


def affine_clamped(a: float, b: float) -> Callable[[int], float]:
    return lambda n: min(1.0, max(0.0, a + b * n))


def from_table(values) -> Callable[[int], float]:
    """Step sequence from an explicit table; the last entry repeats."""
    vals = [float(v) for v in values]
    if not vals or any(not 0.0 <= v <= 1.0 for v in vals):
        raise ValueError("table values must be a nonempty sequence in [0, 1]")
    return lambda n: vals[n] if n < len(vals) else vals[-1]


STEP_FAMILIES = {
    "constant": lambda value: constant(value),
    "harmonic": lambda: harmonic(),
    "affine_clamped": lambda a, b: affine_clamped(a, b),
    "table": lambda values: from_table(values),
}


@dataclass(frozen=True)
class StopRule:
    max_iters: int = 100_000
    residual_tol: float = 1e-8
    stall_tol: float = 1e-12

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.residual_tol <= 0 or self.stall_tol <= 0:
            raise ValueError("tolerances must be positive")


@dataclass
class IterationTrace:
    scheme_id: str
    iterates: list
    residuals: list
    aux: dict = field(default_factory=dict)
    stop_reason: str = "max_iters"
    metadata: dict = field(default_factory=dict)
    extra_series: dict = field(default_factory=dict)

    @property
    def terminal(self) -> Point:
        return self.iterates[-1]

    def __len__(self):
        return len(self.iterates)


def nearest_rule(x: Point, A: CompactSet, rng=None) -> Point:
    return nearest_selection(x, A)


def random_rule(seed: int):
    """Seeded random member selection, for stressing selection robustness."""
    rng = np.random.default_rng(seed)

    def rule(x: Point, A: CompactSet, _rng=rng) -> Point:
        return A.points[int(_rng.integers(len(A.points)))]

    return rule


def _wrap_single(space, T, K: Optional[ConvexSet]):
    if K is None:
        return T
    return lambda x: project(K, T(x))


def run_single_valued(
    scheme_id: str,
    T: Callable[[Point], Point],
    x0: Point,
    seqs: StepSequences,
    stop: StopRule,
    space: ModelSpace,
    project_into: Optional[ConvexSet] = None,
) -> IterationTrace:
    """Run one single-valued scheme from the catalogue.

    ``project_into`` optionally replaces T with P_K o T for domains T does
    not leave invariant; its use is recorded in the trace metadata.
    """
    if scheme_id not in SINGLE_VALUED_SCHEMES:
        raise SchemeUnknown(f"unknown single-valued scheme {scheme_id!r}")
    Tw = _wrap_single(space, T, project_into)
    geo = lambda a, b, t: geodesic_point(space, a, b, t)

    trace = IterationTrace(
        scheme_id,
        [x0],
        [],
        aux={"y": [], "z": []},
        metadata={"projected": project_into is not None, "space": space},
    )
    x = x0
    for n in range(stop.max_iters):
        tx = Tw(x)
        res = distance(space, x, tx)
        trace.residuals.append(res)
        if res <= stop.residual_tol:
            trace.stop_reason = "residual_tol"
            return trace
        a, b, g = seqs.alpha(n), seqs.beta(n), seqs.gamma(n)
        y = z = None
        if scheme_id == "picard":
            nxt = tx
        elif scheme_id == "mann":
            nxt = geo(x, tx, a)
        elif scheme_id == "ishikawa":
            y = geo(x, tx, b)
            nxt = geo(x, Tw(y), a)
        elif scheme_id == "agarwal_s":
            y = geo(x, tx, b)
            nxt = geo(tx, Tw(y), a)
        elif scheme_id == "thianwan":
            y = geo(x, tx, b)
            nxt = geo(y, Tw(y), a)
        elif scheme_id == "noor":
            z = geo(x, tx, g)
            y = geo(x, Tw(z), b)
            nxt = geo(x, Tw(y), a)
        elif scheme_id == "sp":
            z = geo(x, tx, g)
            y = geo(z, Tw(z), b)
            nxt = geo(y, Tw(y), a)
        elif scheme_id == "cr":
            z = geo(x, tx, g)
            y = geo(tx, Tw(z), b)
            nxt = geo(y, Tw(y), a)
        else:  # picard_s
            z = geo(x, tx, b)
            y = geo(tx, Tw(z), a)
            nxt = Tw(y)
        trace.aux["y"].append(y)
        trace.aux["z"].append(z)
        step = distance(space, x, nxt)
        trace.iterates.append(nxt)
        x = nxt
        if step <= stop.stall_tol:
            trace.stop_reason = "stall_tol"
            trace.residuals.append(distance(space, x, Tw(x)))
            return trace
    trace.residuals.append(distance(space, x, Tw(x)))
    trace.stop_reason = "max_iters"
    return trace


def run_multivalued_thianwan(
    T: MultivaluedMap,
    K: ConvexSet,
    x0: Point,
    seqs: StepSequences,
    stop: StopRule,
    selection_rule=nearest_rule,
) -> IterationTrace:
    """Projected two-step scheme:

        y_n = P_K((1-beta_n) x_n (+) beta_n v_n),  v_n in T x_n
        x_{n+1} = P_K((1-alpha_n) y_n (+) alpha_n u_n),  u_n in T y_n
    """
    space = K.space
    trace = IterationTrace(
        "mv_thianwan", [x0], [], aux={"y": [], "u": [], "v": []},
        metadata={"space": space},
    )
    x = x0
    for n in range(stop.max_iters):
        tx = T(x)
        res = dist_point_set(x, tx)
        trace.residuals.append(res)
        if res <= stop.residual_tol:
            trace.stop_reason = "residual_tol"
            return trace
        a, b = seqs.alpha(n), seqs.beta(n)
        v = selection_rule(x, tx)
        y = project(K, geodesic_point(space, x, v, b))
        u = selection_rule(y, T(y))
        nxt = project(K, geodesic_point(space, y, u, a))
        trace.aux["y"].append(y)
        trace.aux["u"].append(u)
        trace.aux["v"].append(v)
        step = distance(space, x, nxt)
        trace.iterates.append(nxt)
        x = nxt
        if step <= stop.stall_tol:
            trace.stop_reason = "stall_tol"
            trace.residuals.append(dist_point_set(x, T(x)))
            return trace
    trace.residuals.append(dist_point_set(x, T(x)))
    trace.stop_reason = "max_iters"
    return trace


def run_multivalued_picard_s(
    T: MultivaluedMap,
    K: ConvexSet,
    x0: Point,
    seqs: StepSequences,
    stop: StopRule,
    selection_rule=nearest_rule,
) -> IterationTrace:
    """Projected three-step scheme:

        z_n = P_K((1-beta_n) x_n (+) beta_n w_n),  w_n in T x_n
        y_n = P_K((1-alpha_n) w_n (+) alpha_n v_n),  v_n in T z_n
        x_{n+1} = P_K(u_n),  u_n in T y_n
    """
    space = K.space
    trace = IterationTrace(
        "mv_picard_s", [x0], [], aux={"y": [], "z": [], "u": [], "v": [], "w": []},
        metadata={"space": space},
    )
    x = x0
    for n in range(stop.max_iters):
        tx = T(x)
        res = dist_point_set(x, tx)
        trace.residuals.append(res)
        if res <= stop.residual_tol:
            trace.stop_reason = "residual_tol"
            return trace
        a, b = seqs.alpha(n), seqs.beta(n)
        w = selection_rule(x, tx)
        z = project(K, geodesic_point(space, x, w, b))
        v = selection_rule(z, T(z))
        y = project(K, geodesic_point(space, w, v, a))
        u = selection_rule(y, T(y))
        nxt = project(K, u)
        for key, val in (("y", y), ("z", z), ("u", u), ("v", v), ("w", w)):
            trace.aux[key].append(val)
        step = distance(space, x, nxt)
        trace.iterates.append(nxt)
        x = nxt
        if step <= stop.stall_tol:
            trace.stop_reason = "stall_tol"
            trace.residuals.append(dist_point_set(x, T(x)))
            return trace
    trace.residuals.append(dist_point_set(x, T(x)))
    trace.stop_reason = "max_iters"
    return trace


def picard_nearest_search(
    T: MultivaluedMap, x0: Point, stop: StopRule
) -> tuple[Point, IterationTrace, float]:
    """Orbit x_{n+1} = nearest point of T x_n, with a contraction estimate.

    Realizes d(x_{n+1}, x_n) = d(T x_n, x_n) at every step.  Returns the
    terminal point, the trace, and k_hat, the largest observed ratio of
    consecutive step lengths (zero denominators skipped).  Raises
    NotConverged (carrying the trace and k_hat) if the budget runs out
    with the residual above tolerance.
    """
    space = T.domain.space
    trace = IterationTrace("picard_nearest", [x0], [], metadata={"space": space})
    x = x0
    k_hat = 0.0
    prev_step = None
    for n in range(stop.max_iters):
        tx = T(x)
        res = dist_point_set(x, tx)
        trace.residuals.append(res)
        if res <= stop.residual_tol:
            trace.stop_reason = "residual_tol"
            trace.metadata["k_hat"] = k_hat
            return x, trace, k_hat
        nxt = nearest_selection(x, tx)
        step = distance(space, x, nxt)
        if prev_step is not None and prev_step > 0:
            k_hat = max(k_hat, step / prev_step)
        prev_step = step
        trace.iterates.append(nxt)
        x = nxt
    trace.residuals.append(dist_point_set(x, T(x)))
    trace.metadata["k_hat"] = k_hat
    raise NotConverged(
        f"residual {trace.residuals[-1]:.3e} above tolerance after "
        f"{stop.max_iters} steps",
        trace=trace,
        k_estimate=k_hat,
    )


def check_step_condition(
    seqs: StepSequences,
    R: float,
    ratio: float,
    horizon: int = 10_000,
    sequence: str = "alpha",
) -> tuple[bool, float]:
    """Finite-horizon surrogate for liminf a_n[(1-a_n) R/2 - ratio] > 0.

    Evaluates the bracket over the tail half of the horizon and reports
    whether its minimum exceeds 1e-9, together with that minimum.
    """
    if horizon < 100:
        raise ValueError("horizon must be at least 100")
    gen = getattr(seqs, sequence)
    vals = [
        gen(n) * ((1.0 - gen(n)) * R / 2.0 - ratio)
        for n in range(horizon // 2, horizon)
    ]
    m = min(vals)
    return m > 1e-9, m
