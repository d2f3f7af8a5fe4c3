"""Convergence diagnostics over iteration traces.

limsup quantities are approximated by maxima over tail windows of a
finite trace; asymptotic centers are located by seeded multi-start
sampling plus golden-section refinement along geodesics.  Agreement of
centers across subsequence windows is reported as numerical evidence of
a Delta-limit, never as a verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .convex import ConvexSet, project
from .iterate import IterationTrace
from .model_space import Point, distance, geodesic_point, sample_ball_arrays
from .setmap import CompactSet, MultivaluedMap, compact_set, dist_point_set, hausdorff

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class TailWindow:
    """A tail slice of a trace, optionally thinned to a subsequence.

    ``indices`` selects the iterates used to approximate limsup
    quantities; windows must contain at least 2 points.
    """

    trace: IterationTrace
    indices: tuple

    def points(self):
        return [self.trace.iterates[i] for i in self.indices]


def tail_window(trace: IterationTrace, start: int | None = None, stride: int = 1,
                offset: int = 0) -> TailWindow:
    """Window over the trace tail; default start is the final 25 percent
    (at least 50 points, clipped to the trace length)."""
    n = len(trace.iterates)
    if start is None:
        start = max(0, min(n - 50, (3 * n) // 4))
    if start >= n:
        raise ValueError("window start beyond trace length")
    idx = tuple(range(start + offset, n, stride))
    if len(idx) < 2:
        raise ValueError("window too short")
    return TailWindow(trace, idx)


def default_windows(trace: IterationTrace) -> list:
    """Full tail plus even- and odd-index subsequence windows."""
    n = len(trace.iterates)
    start = max(0, min(n - 50, (3 * n) // 4))
    full = tail_window(trace, start)
    even = tail_window(trace, start, stride=2, offset=0)
    odd_offset = 1 if n - start > 1 else 0
    odd = tail_window(trace, start, stride=2, offset=odd_offset)
    return [full, even, odd]


def asymptotic_radius(window: TailWindow, x: Point) -> float:
    """Finite-tail surrogate max_n d(x, x_n) for limsup d(x, x_n)."""
    space = window.trace.metadata["space"]
    return max(distance(space, x, q) for q in window.points())


@dataclass
class CenterEstimate:
    point: Point
    radius: float
    method: str
    certified_gap: float


def asymptotic_center(
    window: TailWindow,
    K: ConvexSet,
    budget: int = 2000,
    seed: int = 0,
) -> CenterEstimate:
    """Approximate minimizer of the window radius over K.

    Multi-start candidates (seeded samples in K, the tail points
    themselves, and their projections) are refined by repeated
    golden-section searches along the geodesic toward the current
    farthest tail point.  ``certified_gap`` is the margin of the refined
    radius over the best unrefined candidate.
    """
    space = K.space
    tail = window.points()
    rng = np.random.default_rng(seed)
    evals = 0

    def radius_at(p: Point) -> float:
        nonlocal evals
        evals += len(tail)
        return max(distance(space, p, q) for q in tail)

    candidates = [project(K, q) for q in tail[: min(len(tail), 20)]]
    if K.kind != "whole_space":
        center, rad = K.balls[0]
        n_samp = max(4, min(64, budget // max(1, len(tail))))
        for c in sample_ball_arrays(space, center, rad, n_samp, rng):
            candidates.append(project(K, Point(c)))
    best = min(candidates, key=radius_at)
    best_r = radius_at(best)
    unrefined_r = best_r

    def golden_toward(origin, target):
        lo, hi = 0.0, 1.0
        f = lambda t: radius_at(project(K, geodesic_point(space, origin, target, t)))
        a, b = lo + (1 - GOLDEN) * (hi - lo), lo + GOLDEN * (hi - lo)
        fa, fb = f(a), f(b)
        for _ in range(60):
            if fa <= fb:
                hi, b, fb = b, a, fa
                a = lo + (1 - GOLDEN) * (hi - lo)
                fa = f(a)
            else:
                lo, a, fa = a, b, fb
                b = lo + GOLDEN * (hi - lo)
                fb = f(b)
            if hi - lo < 1e-12:
                break
        t_star = 0.5 * (lo + hi)
        cand = project(K, geodesic_point(space, origin, target, t_star))
        return cand, radius_at(cand)

    exhausted = False
    for _ in range(200):
        if evals >= budget * len(tail):
            exhausted = True
            break
        # search toward the farthest tail point and toward the midpoint
        # of the two farthest: the first direction stalls as soon as two
        # tail points are equidistant, the second resolves that tie
        ranked = sorted(tail, key=lambda q: -distance(space, best, q))
        targets = [ranked[0]]
        second = next(
            (q for q in ranked[1:] if distance(space, ranked[0], q) > 1e-15), None
        )
        if second is not None:
            targets.append(geodesic_point(space, ranked[0], second, 0.5))
        cand, cand_r = min(
            (golden_toward(best, tgt) for tgt in targets), key=lambda cr: cr[1]
        )
        if cand_r < best_r - 1e-14:
            best, best_r = cand, cand_r
        else:
            break
    method = "budget_exhausted" if exhausted else "geodesic_refine"
    return CenterEstimate(best, best_r, method, unrefined_r - best_r)


def fixed_point_check(T: MultivaluedMap, x: Point, tol: float = 1e-9) -> bool:
    """True iff d(x, Tx) <= tol, i.e. x is (numerically) in Tx."""
    return dist_point_set(x, T(x)) <= tol


def endpoint_check(T: MultivaluedMap, p: Point, tol: float = 1e-9) -> bool:
    """True iff Tp = {p} within tol, measured by the Hausdorff distance."""
    singleton = compact_set(T.domain.space, [p])
    return hausdorff(T(p), singleton) <= tol


def fejer_check(trace: IterationTrace, p: Point, tol: float = 1e-9):
    """Max over n of d(x_{n+1}, p) - d(x_n, p); pass iff <= tol."""
    space = trace.metadata.get("space")
    dists = [distance(space, x, p) for x in trace.iterates]
    violation = max(
        (b - a for a, b in zip(dists, dists[1:])), default=0.0
    )
    return violation <= tol, violation


def delta_limit_estimate(
    trace: IterationTrace,
    K: ConvexSet,
    windows=None,
    budget: int = 2000,
    seed: int = 0,
):
    """Center per subsequence window plus an agreement score.

    The score is the max pairwise distance between window centers; a
    small score is numerical evidence (not proof) of Delta-convergence.
    Returns (estimate_for_first_window, agreement_score, all_estimates).
    """
    if windows is None:
        windows = default_windows(trace)
    if len(windows) < 2:
        raise ValueError("need at least two windows")
    space = K.space
    ests = [asymptotic_center(w, K, budget=budget, seed=seed) for w in windows]
    score = max(
        distance(space, a.point, b.point)
        for i, a in enumerate(ests)
        for b in ests[i + 1 :]
    )
    return ests[0], score, ests


def condition_I_check(
    T: MultivaluedMap,
    sample_points,
    F: CompactSet,
    bins: int = 10,
):
    """Binned check for a nondecreasing residual gauge d(x, Tx) >= f(d(x, F)).

    Samples are binned by distance to the fixed-point set F; the check
    passes iff every bin with a strictly positive lower edge has a
    strictly positive minimum residual.  The reported envelope is the
    running minimum from the farthest bin down, which is nondecreasing
    by construction.
    """
    pts = list(sample_points)
    dF = [dist_point_set(x, F) for x in pts]
    res = [dist_point_set(x, T(x)) for x in pts]
    top = max(dF) if dF else 0.0
    if top == 0.0:
        return {"passed": True, "bins": [], "envelope": []}
    edges = [top * i / bins for i in range(bins + 1)]
    bin_min = [math.inf] * bins
    for dval, rval in zip(dF, res):
        i = min(bins - 1, int(dval / top * bins))
        bin_min[i] = min(bin_min[i], rval)
    passed = all(
        not (edges[i] > 0.0 and bin_min[i] != math.inf and bin_min[i] <= 0.0)
        for i in range(bins)
    )
    envelope = []
    running = math.inf
    for i in range(bins - 1, -1, -1):
        if bin_min[i] != math.inf:
            running = min(running, bin_min[i])
        envelope.append((edges[i], None if running == math.inf else running))
    envelope.reverse()
    return {
        "passed": passed,
        "bins": [
            {"low": edges[i], "high": edges[i + 1],
             "min_residual": None if bin_min[i] == math.inf else bin_min[i]}
            for i in range(bins)
        ],
        "envelope": envelope,
    }
