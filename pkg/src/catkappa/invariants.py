"""Randomized invariant suites over the geometry and set layers.

Each suite draws seeded samples and returns a list of
``{"name", "passed", "worst"}`` records, where ``worst`` is the most
adverse observed margin (signed so that nonnegative means the invariant
held with room to spare).  The CLI surfaces these as pass/fail lines;
the acceptance tests pin the sample counts and tolerances.
"""

from __future__ import annotations

import math

import numpy as np

from .convex import ball, intersection, project_arrays
from .model_space import (
    ModelSpace,
    Point,
    _check_embedding,
    convexity_slack_samples,
    dist_arrays,
    geodesic_arrays,
    r_constant,
    sample_ball_arrays,
)
from .setmap import compact_set, hausdorff

GEOMETRY_KAPPAS = (0.0, 1.0, 4.0, -1.0)


def _sampling_radius(space: ModelSpace) -> float:
    if space.kappa > 0:
        return 0.4 * math.pi / math.sqrt(space.kappa)
    return 2.0


def geometry_suite(seed: int = 0, samples: int = 10_000, tol: float = 1e-9):
    """Metric and geodesic invariants per curvature sign."""
    records = []
    for kappa in GEOMETRY_KAPPAS:
        space = ModelSpace(kappa, 2)
        rng = np.random.default_rng(seed)
        c = space.base_point()
        rad = _sampling_radius(space)
        x = sample_ball_arrays(space, c, rad, samples, rng)
        y = sample_ball_arrays(space, c, rad, samples, rng)
        z = sample_ball_arrays(space, c, rad, samples, rng)
        t = rng.random(samples)
        dxy = dist_arrays(space, x, y)
        dyx = dist_arrays(space, y, x)
        label = f"kappa={kappa:g}"

        records.append(
            {
                "name": f"{label}: d(x,y) = d(y,x)",
                "worst": -float(np.max(np.abs(dxy - dyx))),
                "passed": bool(np.max(np.abs(dxy - dyx)) <= tol),
            }
        )
        dxx = dist_arrays(space, x, x)
        records.append(
            {
                "name": f"{label}: d(x,x) = 0",
                "worst": -float(np.max(np.abs(dxx))),
                "passed": bool(np.max(np.abs(dxx)) <= tol),
            }
        )
        tri = dxy + dist_arrays(space, y, z) - dist_arrays(space, x, z)
        records.append(
            {
                "name": f"{label}: triangle inequality",
                "worst": float(np.min(tri)),
                "passed": bool(np.min(tri) >= -tol),
            }
        )
        m = geodesic_arrays(space, x, y, t)
        err = np.maximum(
            np.abs(dist_arrays(space, x, m) - t * dxy),
            np.abs(dist_arrays(space, m, y) - (1.0 - t) * dxy),
        )
        records.append(
            {
                "name": f"{label}: geodesic length split d(x,m)=t d(x,y)",
                "worst": -float(np.max(err)),
                "passed": bool(np.max(err) <= tol),
            }
        )
        ok = True
        try:
            _check_embedding(space, m, tol=tol)
        except Exception:
            ok = False
        records.append(
            {"name": f"{label}: interpolation stays embedded", "worst": 0.0, "passed": ok}
        )
        # convexity of the distance function: d((1-t)x (+) ty, z) is
        # bounded by the affine combination; for kappa > 0 this needs all
        # points within a set of diameter below half the model diameter.
        if kappa > 0:
            rad_c = 0.245 * space.diameter_bound
        else:
            rad_c = rad
        xc = sample_ball_arrays(space, c, rad_c, samples, rng)
        yc = sample_ball_arrays(space, c, rad_c, samples, rng)
        zc = sample_ball_arrays(space, c, rad_c, samples, rng)
        tc = rng.random(samples)
        mc = geodesic_arrays(space, xc, yc, tc)
        slack = (
            (1.0 - tc) * dist_arrays(space, xc, zc)
            + tc * dist_arrays(space, yc, zc)
            - dist_arrays(space, mc, zc)
        )
        records.append(
            {
                "name": f"{label}: distance convexity along geodesics",
                "worst": float(np.min(slack)),
                "passed": bool(np.min(slack) >= -tol),
            }
        )
    return records


def comparison_suite(seed: int = 0, samples: int = 100_000, tol: float = 1e-9):
    """R-convexity comparison inequality per curvature sign.

    Nonpositive curvature uses R = 2; positive curvature uses the
    separation-angle constant on a domain within the diameter cap.
    """
    records = []
    for kappa in GEOMETRY_KAPPAS:
        space = ModelSpace(kappa, 2)
        if kappa > 0:
            for eps in (math.pi / 6.0, math.pi / 4.0, math.pi / 3.0):
                cc = r_constant(eps)
                rad = 0.5 * cc.convexity_diam_bound(kappa)
                slacks = convexity_slack_samples(
                    space, space.base_point(), rad, cc.R, samples, seed=seed
                )
                records.append(
                    {
                        "name": (
                            f"kappa={kappa:g}, eps={eps:.4g}: "
                            f"R-convexity slack >= 0 (R={cc.R:.4g})"
                        ),
                        "worst": float(np.min(slacks)),
                        "passed": bool(np.min(slacks) >= -tol),
                    }
                )
            continue
        slacks = convexity_slack_samples(
            space, space.base_point(), 2.0, 2.0, samples, seed=seed
        )
        records.append(
            {
                "name": f"kappa={kappa:g}: CN* slack >= 0 (R=2)",
                "worst": float(np.min(slacks)),
                "passed": bool(np.min(slacks) >= -tol),
            }
        )
    return records


def _projection_instances():
    insts = []
    for kappa in GEOMETRY_KAPPAS:
        space = ModelSpace(kappa, 2)
        c = space.base_point()
        rad = 0.8 / math.sqrt(kappa) if kappa > 0 else 1.5
        insts.append((f"ball kappa={kappa:g}", space, ball(space, c, rad)))
    space = ModelSpace(0.0, 2)
    b1 = (space.point([0.0, 0.0]), 1.5)
    b2 = (space.point([1.0, 0.0]), 1.5)
    K = intersection(space, [b1, b2], space.point([0.5, 0.0]))
    insts.append(("intersection kappa=0", space, K))
    return insts


def projection_suite(seed: int = 0, samples: int = 10_000, tol: float = 1e-9):
    """Projection identity, idempotence, nonexpansiveness, optimality."""
    records = []
    for label, space, K in _projection_instances():
        rng = np.random.default_rng(seed)
        center, rad = K.balls[0]
        outer = min(2.5 * rad, 0.95 * space.diameter_bound / 2.0)
        xs = sample_ball_arrays(space, center, outer, samples, rng)
        ys = sample_ball_arrays(space, center, outer, samples, rng)
        px = project_arrays(K, xs)
        py = project_arrays(K, ys)

        member = np.ones(samples, dtype=bool)
        for bc, br in K.balls:
            member &= dist_arrays(space, bc.coords[np.newaxis, :], xs) <= br
        moved = dist_arrays(space, xs, px)
        worst_ident = float(np.max(moved[member])) if np.any(member) else 0.0
        worst_idem = float(np.max(dist_arrays(space, project_arrays(K, px), px)))
        worst_nonexp = float(
            np.min(dist_arrays(space, xs, ys) - dist_arrays(space, px, py))
        )
        records.append(
            {
                "name": f"{label}: P(x) = x on members",
                "worst": -worst_ident,
                "passed": worst_ident <= tol,
            }
        )
        records.append(
            {
                "name": f"{label}: P(P(x)) = P(x)",
                "worst": -worst_idem,
                "passed": worst_idem <= tol,
            }
        )
        records.append(
            {
                "name": f"{label}: d(Px, Py) <= d(x, y)",
                "worst": worst_nonexp,
                "passed": worst_nonexp >= -tol,
            }
        )
        if K.kind == "ball" or space.kappa == 0:
            # optimality against dense sampling of candidate members
            cand = sample_ball_arrays(space, center, rad, 600, rng)
            if K.kind == "intersection":
                member_c = np.ones(len(cand), dtype=bool)
                for bc, br in K.balls:
                    member_c &= dist_arrays(space, bc.coords[np.newaxis, :], cand) <= br
                cand = cand[member_c]
            sub = xs[:200]
            dpx = dist_arrays(space, sub, px[:200])
            dq = np.min(
                dist_arrays(space, sub[:, np.newaxis, :], cand[np.newaxis, :, :]),
                axis=1,
            )
            worst_opt = float(np.min(dq - dpx))
            records.append(
                {
                    "name": f"{label}: d(x, Px) <= d(x, q) for sampled q in K",
                    "worst": worst_opt,
                    "passed": worst_opt >= -tol,
                }
            )
    return records


def _hausdorff_oracle(A: np.ndarray, B: np.ndarray) -> float:
    d = np.linalg.norm(A[:, np.newaxis, :] - B[np.newaxis, :, :], axis=-1)
    return max(float(np.max(np.min(d, axis=1))), float(np.max(np.min(d, axis=0))))


def hausdorff_suite(seed: int = 0, samples: int = 1000, tol: float = 1e-12):
    """Hausdorff metric axioms plus agreement with a brute-force oracle."""
    space = ModelSpace(0.0, 2)
    rng = np.random.default_rng(seed)
    worst_oracle = 0.0
    worst_sym = 0.0
    worst_self = 0.0
    worst_tri = math.inf
    for _ in range(samples):
        sizes = rng.integers(1, 21, size=3)
        raw = [rng.normal(size=(s, 2)) for s in sizes]
        sets = [compact_set(space, [Point(r) for r in arr]) for arr in raw]
        A, B, C = sets
        hab, hba = hausdorff(A, B), hausdorff(B, A)
        worst_sym = max(worst_sym, abs(hab - hba))
        worst_self = max(worst_self, hausdorff(A, A))
        worst_tri = min(worst_tri, hab + hausdorff(B, C) - hausdorff(A, C))
        arrA = np.array([p.coords for p in A.points])
        arrB = np.array([p.coords for p in B.points])
        worst_oracle = max(worst_oracle, abs(hab - _hausdorff_oracle(arrA, arrB)))
    return [
        {"name": "H(A,A) = 0", "worst": -worst_self, "passed": worst_self <= tol},
        {"name": "H(A,B) = H(B,A)", "worst": -worst_sym, "passed": worst_sym <= tol},
        {
            "name": "H(A,C) <= H(A,B) + H(B,C)",
            "worst": worst_tri,
            "passed": worst_tri >= -1e-9,
        },
        {
            "name": "H agrees with brute-force oracle",
            "worst": -worst_oracle,
            "passed": worst_oracle <= tol,
        },
    ]


SUITES = {
    "geometry": geometry_suite,
    "comparison": comparison_suite,
    "projection": projection_suite,
    "hausdorff": hausdorff_suite,
}


def run_suites(names, seed: int = 0):
    """Run the named suites (or all); returns (all_passed, records)."""
    records = []
    for name in names:
        if name not in SUITES:
            raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
        records.extend(SUITES[name](seed=seed))
    return all(r["passed"] for r in records), records
