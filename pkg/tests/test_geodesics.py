import math

import numpy as np
import pytest
from hypothesis import given, settings

from geostrain import ConvergenceError, DomainError, MetricParams
from geostrain.geodesics import (
    GeodesicSpec,
    curve_length,
    endpoint_map,
    geodesic_distance_estimate,
    geodesic_point,
    geodesic_velocity,
    solve_endpoint,
    start_schedule,
)
from geostrain.linalg import mat_exp, random_glp
from geostrain.metric import riemannian_metric_at, weighted_norm, weighted_norm_sq
from geostrain.strain import geodesic_dist_sq_to_SO, lower_bound_scan

from conftest import J, dims, seeds

GRID = [0.5, 1.0, 2.0]
SPIN = [0.1, 1.0, 10.0]


def random_spec(rng, n, xi_norm=1.0, params=None):
    F = random_glp(n, rng, 20)
    xi = rng.standard_normal((n, n))
    xi *= rng.uniform(0.05, xi_norm) / np.linalg.norm(xi)
    if params is None:
        params = MetricParams(rng.choice(GRID), rng.choice(SPIN), rng.choice(GRID))
    return GeodesicSpec(F, xi, params)


class TestGeodesicPoint:
    def test_start(self, rng):
        s = random_spec(rng, 3)
        np.testing.assert_allclose(geodesic_point(s, 0.0), s.F, rtol=1e-15)

    def test_symmetric_tangent(self, rng):
        S = rng.standard_normal((3, 3))
        S = S + S.T
        F = random_glp(3, rng)
        s = GeodesicSpec(F, S, MetricParams(1.0, 5.0, 2.0))
        for t in (-0.5, 0.3, 1.7):
            np.testing.assert_allclose(geodesic_point(s, t), F @ mat_exp(t * S), rtol=1e-13, atol=1e-13)

    def test_skew_tangent_equal_moduli(self, rng):
        F = random_glp(2, rng)
        s = GeodesicSpec(F, J, MetricParams(1.0, 1.0, 1.0))
        # exp(-J) exp(2J) = exp(J) because the factors commute
        np.testing.assert_allclose(endpoint_map(s), F @ mat_exp(-J) @ mat_exp(2 * J), atol=1e-14)
        np.testing.assert_allclose(endpoint_map(s), F @ mat_exp(J), atol=1e-14)

    def test_positive_determinant(self, rng):
        s = random_spec(rng, 3, xi_norm=5.0)
        for t in np.linspace(-2, 2, 9):
            assert np.linalg.det(geodesic_point(s, t)) > 0

    def test_rejects_bad_base(self):
        with pytest.raises(DomainError):
            GeodesicSpec(np.diag([1.0, -1.0]), np.zeros((2, 2)))


class TestVelocity:
    def test_at_zero(self, rng):
        s = random_spec(rng, 3)
        np.testing.assert_allclose(geodesic_velocity(s, 0.0), s.F @ s.xi, rtol=1e-13, atol=1e-14)

    def test_zero_tangent(self, rng):
        s = GeodesicSpec(random_glp(2, rng), np.zeros((2, 2)))
        for t in (0.0, 0.5, 3.0):
            np.testing.assert_array_equal(geodesic_velocity(s, t), 0)

    @given(dims, seeds)
    def test_finite_difference(self, n, seed):
        s = random_spec(np.random.default_rng(seed), n)
        t, h = 0.37, 1e-6
        fd = (geodesic_point(s, t + h) - geodesic_point(s, t - h)) / (2 * h)
        assert np.max(np.abs(geodesic_velocity(s, t) - fd)) <= 1e-7


class TestCurveLength:
    def test_constant_curve(self):
        assert curve_length(MetricParams(), lambda t: np.eye(2), velocity=lambda t: np.zeros((2, 2))) == 0

    def test_geodesic(self, rng):
        s = random_spec(rng, 2)
        assert curve_length(s.params, s) == pytest.approx(weighted_norm(s.params, s.xi), rel=1e-10)

    def test_straight_segment(self):
        p = MetricParams(1, 1, 1)
        # speed = sqrt(kappa/2) * 2 / (1 + t)
        length = curve_length(p, lambda t: (1 + t) * np.eye(2), velocity=lambda t: np.eye(2))
        assert length == pytest.approx(math.sqrt(2) * math.log(2), rel=1e-12)
        fd_length = curve_length(p, lambda t: (1 + t) * np.eye(2))
        assert fd_length == pytest.approx(math.sqrt(2) * math.log(2), rel=1e-10)

    def test_sampled_piecewise_linear(self):
        p = MetricParams(1, 1, 1)
        ts = np.linspace(0, 1, 5)
        pts = np.array([(1 + t) * np.eye(2) for t in ts])
        assert curve_length(p, (ts, pts)) == pytest.approx(math.sqrt(2) * math.log(2), rel=1e-12)

    def test_corner_path(self):
        # two straight legs; total = sum of the legs' lengths
        p = MetricParams(1, 1, 1)
        pts = np.array([np.eye(2), np.diag([2.0, 1.0]), np.diag([2.0, 2.0])])
        # per leg H^-1 H' = diag(a, 0): |dev|^2 = a^2/2 and (kappa/2) tr^2 = a^2/2
        leg = math.log(2)
        assert curve_length(p, ([0.0, 1.0, 2.0], pts)) == pytest.approx(2 * leg, rel=1e-12)

    def test_non_invertible_sample(self):
        with pytest.raises(DomainError):
            curve_length(MetricParams(), ([0.0, 1.0, 2.0], [np.eye(2), np.diag([1.0, 0.0]), np.eye(2)]))


class TestInvariants:
    @settings(max_examples=25)
    @given(dims, seeds)
    def test_constant_speed(self, n, seed):
        s = random_spec(np.random.default_rng(seed), n)
        target = weighted_norm_sq(s.params, s.xi)
        for t in np.linspace(-1, 2, 20):
            G, V = geodesic_point(s, t), geodesic_velocity(s, t)
            assert riemannian_metric_at(s.params, G, V, V) == pytest.approx(target, rel=1e-9)

    @settings(max_examples=15)
    @given(dims, seeds)
    def test_length_is_tangent_norm(self, n, seed):
        s = random_spec(np.random.default_rng(seed), n)
        assert curve_length(s.params, s) == pytest.approx(s.length, rel=1e-9)

    @settings(max_examples=10)
    @given(dims, seeds)
    def test_left_invariance_of_length(self, n, seed):
        rng = np.random.default_rng(seed)
        s = random_spec(rng, n)
        A = random_glp(n, rng, 20)
        moved = curve_length(s.params, lambda t: A @ geodesic_point(s, t),
                             velocity=lambda t: A @ geodesic_velocity(s, t))
        assert moved == pytest.approx(curve_length(s.params, s), rel=1e-10)


class TestSolveEndpoint:
    def test_same_point(self, rng):
        F = random_glp(3, rng)
        rep = solve_endpoint(MetricParams(), F, F)
        assert rep.converged
        np.testing.assert_allclose(rep.xi, 0, atol=1e-12)
        assert rep.length == pytest.approx(0, abs=1e-12)

    def test_symmetric_recovery(self, rng):
        F = random_glp(3, rng)
        S = rng.standard_normal((3, 3))
        S = 0.2 * (S + S.T)
        rep = solve_endpoint(MetricParams(1, 3, 1), F, F @ mat_exp(S))
        assert rep.converged
        np.testing.assert_allclose(rep.xi, S, atol=1e-8)

    @pytest.mark.parametrize("n", [2, 3])
    def test_forward_map_oracle(self, n):
        rng = np.random.default_rng(11 + n)
        p = MetricParams()
        for _ in range(20):
            s = random_spec(rng, n, params=p)
            P = endpoint_map(s)
            rep = solve_endpoint(p, s.F, P)
            assert rep.converged
            assert rep.residual <= 1e-9 * max(1.0, np.linalg.norm(P))
            assert np.linalg.norm(endpoint_map(GeodesicSpec(s.F, rep.xi, p)) - P) <= 1e-9 * max(1.0, np.linalg.norm(P))
            assert rep.length <= s.length + 1e-8
            assert rep.length == pytest.approx(weighted_norm(p, rep.xi))

    def test_non_convergence_is_reported(self, rng):
        F = random_glp(2, rng)
        P = F @ mat_exp(np.array([[0.3, -2.0], [2.5, 0.1]]))
        rep = solve_endpoint(MetricParams(1, 10, 1), F, P, init=np.zeros((2, 2)), max_iter=1)
        assert not rep.converged and rep.iterations == 1

    def test_domain(self):
        with pytest.raises(DomainError):
            solve_endpoint(MetricParams(), np.eye(2), np.diag([1.0, -1.0]))


class TestDistanceEstimate:
    def test_same_point(self, rng):
        F = random_glp(2, rng)
        est = geodesic_distance_estimate(MetricParams(), F, F, n_starts=2)
        assert est.value == pytest.approx(0, abs=1e-12)

    def test_isochoric_stretch(self):
        p = MetricParams(1, 1, 1)
        P = mat_exp(np.diag([1.0, -1.0]))
        est = geodesic_distance_estimate(p, np.eye(2), P, n_starts=4)
        assert est.value == pytest.approx(math.sqrt(2), abs=1e-8)
        # the identity is a rotation, so dist(1, P) >= dist(P, SO(2))
        lower = math.sqrt(lower_bound_scan(p, P, 4000).value)
        assert lower <= est.value + 1e-6
        assert lower == pytest.approx(math.sqrt(geodesic_dist_sq_to_SO(p, P).value), abs=1e-6)
        assert not est.pseudometric

    def test_left_invariance(self, rng):
        p = MetricParams(2, 0.5, 1)
        s = random_spec(rng, 3, xi_norm=1.5, params=p)
        F, P, A = s.F, endpoint_map(s), random_glp(3, rng, 10)
        a = geodesic_distance_estimate(p, F, P, n_starts=4).value
        b = geodesic_distance_estimate(p, A @ F, A @ P, n_starts=4).value
        assert a == pytest.approx(b, abs=1e-7)

    def test_monotone_in_starts(self, rng):
        p = MetricParams(0.5, 10, 1)
        s = random_spec(rng, 2, xi_norm=2.0, params=p)
        F, P = s.F, endpoint_map(s)
        values = [geodesic_distance_estimate(p, F, P, n_starts=k, seed=3).value for k in (1, 3, 6)]
        assert values[0] >= values[1] >= values[2]

    def test_schedule_is_prefix_stable(self, rng):
        F, P = random_glp(2, rng), random_glp(2, rng)
        short, long = start_schedule(F, P, 4, seed=1), start_schedule(F, P, 9, seed=1)
        for a, b in zip(short, long):
            np.testing.assert_array_equal(a, b)

    def test_all_starts_fail(self, rng, monkeypatch):
        import geostrain.geodesics as g

        F, P = random_glp(2, rng), random_glp(2, rng)
        monkeypatch.setattr(g.tol, "LM_MAX_ITER", 0)
        with pytest.raises(ConvergenceError) as info:
            geodesic_distance_estimate(MetricParams(), F, P, n_starts=3)
        assert len(info.value.reports) == 3

    def test_pseudometric_flag(self, rng):
        F = random_glp(2, rng)
        est = geodesic_distance_estimate(MetricParams(1, 0, 1), F, F, n_starts=1)
        assert est.pseudometric
