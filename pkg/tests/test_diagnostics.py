import math

import numpy as np
import pytest

from catkappa.convex import ball, whole_space
from catkappa.diagnostics import (
    asymptotic_center,
    asymptotic_radius,
    condition_I_check,
    default_windows,
    delta_limit_estimate,
    endpoint_check,
    fejer_check,
    fixed_point_check,
    tail_window,
)
from catkappa.iterate import (
    IterationTrace,
    StepSequences,
    StopRule,
    constant,
    run_multivalued_thianwan,
)
from catkappa.maps import contraction_to_point, pair_with_midpoint
from catkappa.model_space import ModelSpace, Point, distance

E2 = ModelSpace(0.0, 2)


def make_trace(points, space=E2, scheme_id="picard"):
    pts = [space.point(list(p)) for p in points]
    return IterationTrace(
        scheme_id, pts, [0.0] * len(pts), metadata={"space": space}
    )


class TestTailWindow:
    def test_default_start_is_late_tail(self):
        trace = make_trace([[float(i), 0.0] for i in range(400)])
        w = tail_window(trace)
        assert w.indices[0] == 300
        assert w.indices[-1] == 399

    def test_short_traces_use_everything(self):
        trace = make_trace([[float(i), 0.0] for i in range(30)])
        w = tail_window(trace)
        assert w.indices[0] == 0

    def test_stride_and_offset(self):
        trace = make_trace([[float(i), 0.0] for i in range(100)])
        even = tail_window(trace, start=0, stride=2)
        odd = tail_window(trace, start=0, stride=2, offset=1)
        assert all(i % 2 == 0 for i in even.indices)
        assert all(i % 2 == 1 for i in odd.indices)

    def test_bad_start(self):
        trace = make_trace([[0.0, 0.0]] * 20)
        with pytest.raises(ValueError):
            tail_window(trace, start=25)

    def test_default_windows_cover_parities(self):
        trace = make_trace([[float(i), 0.0] for i in range(200)])
        full, even, odd = default_windows(trace)
        assert set(even.indices).isdisjoint(odd.indices)
        assert set(even.indices) | set(odd.indices) == set(full.indices)


class TestAsymptoticCenter:
    def test_radius_is_max_over_window(self):
        trace = make_trace([[0.0, 0.0], [4.0, 0.0]] * 10)
        w = tail_window(trace, start=0)
        assert asymptotic_radius(w, E2.point([0.0, 0.0])) == 4.0
        assert asymptotic_radius(w, E2.point([2.0, 0.0])) == 2.0

    def test_center_of_two_point_window(self):
        # the minimizer of the max distance to {(0,0), (4,0)} is (2,0)
        trace = make_trace([[0.0, 0.0], [4.0, 0.0]] * 10)
        w = tail_window(trace, start=0)
        K = ball(E2, E2.point([2.0, 0.0]), 5.0)
        est = asymptotic_center(w, K, budget=3000, seed=0)
        assert est.radius == pytest.approx(2.0, abs=1e-6)
        assert np.allclose(est.point.coords, [2.0, 0.0], atol=1e-5)

    def test_center_respects_constraint(self):
        # same window but K only reaches x = 1: the constrained center is
        # the boundary point (1, 0) with radius 3
        trace = make_trace([[0.0, 0.0], [4.0, 0.0]] * 10)
        w = tail_window(trace, start=0)
        K = ball(E2, E2.point([0.0, 0.0]), 1.0)
        est = asymptotic_center(w, K, budget=3000, seed=0)
        assert est.radius == pytest.approx(3.0, abs=1e-6)
        assert np.allclose(est.point.coords, [1.0, 0.0], atol=1e-5)


class TestChecks:
    def test_fixed_point_and_endpoint_differ(self):
        K = ball(E2, E2.base_point(), 1.0)
        c = E2.point([0.5, 0.0])
        T = pair_with_midpoint(K, c)
        x = E2.point([0.2, 0.2])
        # every x is a fixed point (x is in its own image) ...
        assert fixed_point_check(T, x, tol=1e-12)
        # ... but only c has a singleton image
        assert not endpoint_check(T, x, tol=1e-6)
        assert endpoint_check(T, c, tol=1e-12)

    def test_fejer_monotone_trace_passes(self):
        trace = make_trace([[1.0 / (i + 1.0), 0.0] for i in range(50)])
        ok, violation = fejer_check(trace, E2.base_point())
        assert ok
        assert violation <= 0.0

    def test_fejer_detects_violation(self):
        trace = make_trace([[1.0, 0.0], [0.5, 0.0], [0.8, 0.0]])
        ok, violation = fejer_check(trace, E2.base_point())
        assert not ok
        assert violation == pytest.approx(0.3, abs=1e-12)


class TestDeltaLimit:
    def test_converged_run_has_tight_agreement(self):
        K = ball(E2, E2.base_point(), 1.0)
        T = contraction_to_point(K, E2.base_point(), 0.5)
        trace = run_multivalued_thianwan(
            T, K, E2.point([0.9, 0.0]),
            StepSequences(constant(0.5)), StopRule(500, 1e-12),
        )
        n = len(trace.iterates)
        windows = [
            tail_window(trace, start=n - 12),
            tail_window(trace, start=n - 12, stride=2),
            tail_window(trace, start=n - 12, stride=2, offset=1),
        ]
        est, score, ests = delta_limit_estimate(
            trace, K, windows=windows, budget=500, seed=0
        )
        assert score < 1e-6
        assert distance(E2, est.point, E2.base_point()) < 1e-6
        assert fixed_point_check(T, est.point, tol=1e-6)

    def test_needs_two_windows(self):
        trace = make_trace([[0.0, 0.0]] * 60)
        with pytest.raises(ValueError):
            delta_limit_estimate(
                trace, whole_space(E2), windows=[tail_window(trace)]
            )


class TestConditionI:
    def sample(self, n=200, seed=0):
        rng = np.random.default_rng(seed)
        return [E2.point(c) for c in rng.uniform(-1.0, 1.0, size=(n, 2))]

    def test_contraction_satisfies_gauge(self):
        K = whole_space(E2)
        T = contraction_to_point(K, E2.base_point(), 0.5)
        from catkappa.setmap import compact_set

        F = compact_set(E2, [E2.base_point()])
        result = condition_I_check(T, self.sample(), F)
        assert result["passed"]
        # residual is half the distance to the fixed-point set here, so
        # the nondecreasing envelope should be strictly positive away
        # from zero
        positive = [v for edge, v in result["envelope"] if edge > 0 and v is not None]
        assert all(v > 0 for v in positive)

    def test_identity_fails_gauge(self):
        K = whole_space(E2)
        from catkappa.maps import identity_map
        from catkappa.setmap import compact_set

        T = identity_map(K)
        F = compact_set(E2, [E2.base_point()])
        result = condition_I_check(T, self.sample(), F)
        assert not result["passed"]
