import math

import numpy as np
import pytest
from conftest import disk_polygons, reuleaux_polygons, rigid_motion, unit_vectors
from hypothesis import given
from hypothesis import strategies as st

from reuleaux import sensitivity as sens
from reuleaux.acceptance import equalize_blaschke_pair
from reuleaux.area import area, disk_polygon_area
from reuleaux.errors import OutOfRange, SingularArc, StepTooLarge, TriangleImmovable
from reuleaux.geometry import DiskPolygon, ReuleauxPolygon, build_regular_reuleaux, perp
from reuleaux.optimize import random_reuleaux
from reuleaux.verify import arc_quadrature, fd_directional, fd_second_directional


def frame(theta, rotation=0.3):
    """Arc frame of a unit arc centred at the origin, bisector at ``rotation``."""
    a, b = rotation - theta / 2, rotation + theta / 2
    xi = np.array([math.cos(a), math.sin(a)])
    xj = np.array([math.cos(b), math.sin(b)])
    return sens.ArcFrame.from_arc(xi, xj, np.zeros(2))


class TestAverageNormal:
    def test_orthogonal_direction(self):
        b = np.array([0.6, 0.8])
        assert sens.avg_normal_on_arc(1.0, perp(b), b) == pytest.approx(0.0, abs=1e-16)

    def test_sixty_degree_arc(self):
        b = np.array([0.0, 1.0])
        quad = arc_quadrature(math.pi / 3, lambda nrm, tan: nrm @ b, m=64, bisector=b)
        assert sens.avg_normal_on_arc(math.pi / 3, b, b) == pytest.approx(1.0, abs=1e-15)
        assert abs(quad - 1.0) < 1e-10

    def test_linearity(self):
        b = np.array([1.0, 0.0])
        quad = arc_quadrature(math.pi / 5, lambda nrm, tan: nrm @ (2 * b), m=64, bisector=b)
        assert sens.avg_normal_on_arc(math.pi / 5, 2 * b, b) == pytest.approx(4 * math.sin(math.pi / 10))
        assert abs(quad - 4 * math.sin(math.pi / 10)) < 1e-10

    @pytest.mark.parametrize("theta", [0.0, math.pi, -1.0])
    def test_range(self, theta):
        with pytest.raises(OutOfRange):
            sens.avg_normal_on_arc(theta, (1, 0), (1, 0))


class TestCenterVelocity:
    def test_translation(self):
        fr = frame(0.7)
        t = np.array([0.3, -1.2])
        np.testing.assert_allclose(sens.center_velocity(fr, t, t), t, atol=1e-14)

    def test_right_angle_arc(self):
        fr = frame(math.pi / 2)
        c = sens.center_velocity(fr, fr.w_i, np.zeros(2))
        np.testing.assert_allclose(c, fr.w_i, atol=1e-14)
        # the differentiated constraints (x - c) . (v - c') = 0
        assert abs(fr.w_i @ (fr.w_i - c)) < 1e-12
        assert abs(fr.w_ip1 @ (np.zeros(2) - c)) < 1e-12

    def test_still_endpoints(self):
        assert not np.any(sens.center_velocity(frame(1.0), np.zeros(2), np.zeros(2)))

    def test_singular(self):
        with pytest.raises(SingularArc):
            sens.center_velocity(frame(1e-13), (1, 0), (0, 1))

    def test_frame_invariants(self):
        fr = frame(0.9, rotation=2.0)
        for v in (fr.w_i, fr.w_ip1, fr.bisector):
            assert abs(np.linalg.norm(v) - 1) < 1e-12
        assert fr.bisector @ fr.w_i == pytest.approx(fr.bisector @ fr.w_ip1, abs=1e-14)


class TestArcContribution:
    def test_zero_and_tangential(self):
        fr = frame(1.0)
        assert sens.arc_area_contribution(fr, np.zeros(2), np.zeros(2)) == 0.0
        assert sens.arc_area_contribution(fr, perp(fr.w_i), 2 * perp(fr.w_ip1)) == pytest.approx(0, abs=1e-15)

    def test_matches_center_velocity_route(self, rng):
        for _ in range(20):
            fr = frame(rng.uniform(0.1, 2.5), rng.uniform(0, 6))
            vi, vj = rng.normal(size=(2, 2))
            via_center = sens.avg_normal_on_arc(fr.theta, sens.center_velocity(fr, vi, vj), fr.bisector)
            assert sens.arc_area_contribution(fr, vi, vj) == pytest.approx(via_center, abs=1e-12)

    @given(disk_polygons(), st.integers(0, 100), st.integers(0, 2**32 - 1))
    def test_matches_area_fd(self, p, j, seed):
        j %= p.n
        vi, vj = np.random.default_rng(seed).normal(size=(2, 2))
        h = 1e-6
        x = np.array(p.vertices)

        def moved(t):
            y = x.copy()
            y[j] += t * vi
            y[(j + 1) % p.n] += t * vj
            return disk_polygon_area(y)

        fd = (moved(h) - moved(-h)) / (2 * h)
        # only the arc between the two moved vertices and its neighbours react
        field = np.zeros_like(x)
        field[j], field[(j + 1) % p.n] = vi, vj
        assert sens.area_rate_disk_polygon(p, field) == pytest.approx(fd, rel=1e-6, abs=1e-9)


class TestDiskGradient:
    def test_regular_equal_norms(self):
        g = sens.area_gradient_disk_polygon(build_regular_reuleaux(9))
        norms = np.linalg.norm(g, axis=1)
        assert np.ptp(norms) < 1e-14

    @given(disk_polygons())
    def test_zero_net_gradient(self, p):
        assert np.abs(sens.area_gradient_disk_polygon(p).sum(axis=0)).max() < 1e-10

    @given(disk_polygons())
    def test_translation_field_has_no_effect(self, p):
        field = np.tile([0.4, -0.7], (p.n, 1))
        assert abs(sens.area_rate_disk_polygon(p, field)) < 1e-10

    def test_fd_on_five_vertices(self, rng):
        centers = 0.3 * np.column_stack([np.cos(np.arange(5) * 1.2566 + rng.uniform(0, 0.2, 5)),
                                         np.sin(np.arange(5) * 1.2566 + rng.uniform(0, 0.2, 5))])
        p = DiskPolygon.from_centers(centers)
        g = sens.area_gradient_disk_polygon(p)
        h = 1e-6
        for j in range(5):
            for axis in range(2):
                e = np.zeros((5, 2))
                e[j, axis] = h
                fd = (disk_polygon_area(p.vertices + e) - disk_polygon_area(p.vertices - e)) / (2 * h)
                assert g[j, axis] == pytest.approx(fd, rel=1e-6)


class TestPropagation:
    def test_zero_step(self, random7):
        same = sens.propagate_vertex_perturbation(random7, 2, (1, 0), 0.0)
        np.testing.assert_allclose(same.vertices, random7.vertices, atol=1e-15)

    @pytest.mark.parametrize("i", range(7))
    def test_bisector_move_keeps_constraints(self, regular7, i):
        r = sens.propagate_vertex_perturbation(regular7, i, sens.bisector(regular7, i), 0.01)
        assert abs(r.theta.sum() - math.pi) < 1e-9
        assert np.linalg.norm(r.vertices[i] - regular7.vertices[i] - 0.01 * sens.bisector(regular7, i)) < 1e-15

    def test_triangle_is_rigid(self):
        with pytest.raises(TriangleImmovable):
            sens.propagate_vertex_perturbation(build_regular_reuleaux(3), 0, (1, 0), 1e-3)

    def test_large_step_rejected(self, regular7):
        with pytest.raises(StepTooLarge):
            sens.propagate_vertex_perturbation(regular7, 0, (0, 1), 0.8)

    def test_only_three_vertices_move(self, random7):
        r = sens.propagate_vertex_perturbation(random7, 1, (0.6, 0.8), 1e-3)
        moved = np.flatnonzero(np.linalg.norm(r.vertices - random7.vertices, axis=1) > 0)
        assert set(moved) == {1, 4, 5}


class TestDirectionalDerivative:
    @pytest.mark.parametrize("n", [5, 7, 9, 15])
    def test_regular_is_critical(self, n):
        r = build_regular_reuleaux(n)
        rng = np.random.default_rng(n)
        for i in range(n):
            v = rng.normal(size=2)
            v /= np.linalg.norm(v)
            assert abs(sens.directional_derivative_reuleaux(r, i, v)) < 1e-14
            assert abs(fd_directional(area, r, i, v)) < 1e-6

    @given(reuleaux_polygons(ns=(7,)), st.integers(0, 6), unit_vectors())
    def test_matches_constrained_fd(self, r, i, v):
        fd = fd_directional(area, r, i, v)
        assert sens.directional_derivative_reuleaux(r, i, v) == pytest.approx(fd, rel=1e-5, abs=1e-9)

    def test_fd_error_is_second_order(self, random7):
        v = np.array([0.6, 0.8])
        exact = sens.directional_derivative_reuleaux(random7, 3, v)
        errs = [abs(fd_directional(area, random7, 3, v, h) - exact) for h in (1e-2, 5e-3)]
        assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.1)

    def test_triangle(self):
        with pytest.raises(TriangleImmovable):
            sens.directional_derivative_reuleaux(build_regular_reuleaux(3), 0, (1, 0))

    @given(reuleaux_polygons(), st.integers(0, 100))
    def test_label_rotation(self, r, i):
        i %= r.n
        v = np.array([0.28, -0.96])
        rolled = r.rotated_labels(i)
        assert sens.directional_derivative_reuleaux(rolled, 0, v) == pytest.approx(
            sens.directional_derivative_reuleaux(r, i, v), abs=1e-15)


class TestGradient:
    @pytest.mark.parametrize("n", [5, 11])
    def test_regular_zero(self, n):
        assert np.abs(sens.gradient_field_reuleaux(build_regular_reuleaux(n))).max() < 1e-14

    def test_nine_gon_dot_consistency(self, rng):
        r = random_reuleaux(9, rng)
        for _ in range(32):
            i = int(rng.integers(9))
            v = rng.normal(size=2)
            v /= np.linalg.norm(v)
            assert abs(v @ sens.gradient_reuleaux(r, i) - sens.directional_derivative_reuleaux(r, i, v)) < 1e-12

    def test_parallel_when_two_arcs_agree(self):
        rng = np.random.default_rng(4)
        found = 0
        while found < 3:
            r = equalize_blaschke_pair(random_reuleaux(7, rng))
            if r is None or r.theta[r.k] <= r.theta[0]:
                continue
            found += 1
            g = sens.gradient_reuleaux(r, 0)
            d = r.vertices[0] - r.vertices[r.k]
            assert abs(g[0] * d[1] - g[1] * d[0]) < 1e-12 * max(1.0, np.linalg.norm(g))

    @given(reuleaux_polygons(), st.floats(0, 2 * math.pi), st.floats(-2, 2))
    def test_rotation_equivariance(self, r, angle, shift):
        moved = ReuleauxPolygon.from_vertices(rigid_motion(r.vertices, angle, (shift, -shift)))
        rotated = rigid_motion(sens.gradient_field_reuleaux(r), angle, (0, 0))
        np.testing.assert_allclose(sens.gradient_field_reuleaux(moved), rotated, atol=1e-12)

    @given(reuleaux_polygons(ns=(5, 7, 9, 11)))
    def test_zero_iff_equal_arcs(self, r):
        equal = np.ptp(r.theta) < 5e-9
        critical = np.abs(sens.gradient_field_reuleaux(r)).max() < 1e-10
        assert equal == critical


class TestBlaschke:
    @given(reuleaux_polygons(), st.integers(0, 100))
    def test_matches_directional_derivative(self, r, i):
        i %= r.n
        v = sens.blaschke_direction(r, i)
        assert sens.blaschke_derivative(r, i) == pytest.approx(
            sens.directional_derivative_reuleaux(r, i, v), abs=1e-12)

    def test_direction_is_tangent_and_grows_arc(self, random7):
        for i in range(7):
            v = sens.blaschke_direction(random7, i)
            assert abs(v @ (random7.vertices[(i + 3) % 7] - random7.vertices[i])) < 1e-14
            assert sens.theta_rates(random7, i, v)[0] > 0

    def test_sign_when_arc_dominates(self, rng):
        checked = 0
        while checked < 10:
            r = random_reuleaux(7, rng)
            i = int(rng.integers(7))
            if r.theta[i] > r.theta[(i + 4) % 7]:
                assert sens.blaschke_derivative(r, i) < 0
                checked += 1

    def test_zero_at_equal_arcs(self):
        rng = np.random.default_rng(9)
        r = None
        while r is None:
            r = equalize_blaschke_pair(random_reuleaux(9, rng))
        assert abs(sens.blaschke_derivative(r, 0)) < 1e-12

    def test_fd_along_tangential_path(self, random7):
        for i in range(7):
            v = sens.blaschke_direction(random7, i)
            fd = fd_directional(area, random7, i, v)
            assert sens.blaschke_derivative(random7, i) == pytest.approx(fd, rel=1e-5)


class TestSecondOrder:
    def test_signs(self):
        assert sens.bisector_second_derivative(math.pi / 5) < 0
        assert sens.bisector_second_derivative(math.pi / 3) > 0
        for theta in np.linspace(0.01, math.pi / 3, 300):
            neg = sens.bisector_second_derivative(theta) <= 0
            assert neg == (math.tan(theta / 2) * math.tan(theta) <= 0.5)

    @pytest.mark.parametrize("n", [5, 7, 9])
    def test_matches_second_difference(self, n):
        r = build_regular_reuleaux(n)
        fd = fd_second_directional(area, r, 2, sens.bisector(r, 2), h=1e-4)
        assert abs(fd - sens.bisector_second_derivative(math.pi / n)) < 1e-4

    @pytest.mark.parametrize("theta", [0.0, 1.1, -0.2])
    def test_range(self, theta):
        with pytest.raises(OutOfRange):
            sens.bisector_second_derivative(theta)

    def test_chord_window(self):
        assert abs(sens.critical_angle_bound_check(math.pi / 3) - 1) < 1e-12
        assert abs(sens.critical_angle_bound_check(math.pi / 5) - 1) < 1e-12
        assert sens.critical_angle_bound_check(math.pi / 4) > 1
        for theta in np.linspace(0, math.pi / 5, 200):
            assert sens.critical_angle_bound_check(theta) <= 1 + 1e-12


class TestThetaRates:
    @given(reuleaux_polygons(ns=(7, 9)), st.integers(0, 100), unit_vectors())
    def test_all_three_match_fd(self, r, i, v):
        i %= r.n
        k = r.k
        rates = sens.theta_rates(r, i, v)
        for idx, rate in zip((i, (i + k) % r.n, (i + k + 1) % r.n), rates):
            fd = fd_directional(lambda p: p.theta[idx], r, i, v)
            assert rate == pytest.approx(fd, rel=1e-5, abs=1e-8)

    def test_next_arc_closed_form(self, random7):
        # theta'_{k+1} = -cos(angle(w, x_0 x_1)) / cos(theta_{k+1} / 2)
        w = np.array([0.8, -0.6])
        x = random7.vertices
        e = (x[1] - x[0]) / np.linalg.norm(x[1] - x[0])
        closed = -(w @ e) / math.cos(random7.theta[4] / 2)
        assert sens.theta_rates(random7, 0, w)[2] == pytest.approx(closed, abs=1e-14)

    def test_quoted_opposite_chord_rate_disagrees_with_fd(self):
        # the closed form with cos(theta_{k+1} + theta_1/2) for the rate of
        # |x_k x_{k+1}|, evaluated at the regular pentagon along the bisector;
        # the linearisation used by theta_rates matches FD, the quoted form
        # does not (a known discrepancy reported by ``certify``)
        n, k = 5, 2
        r = build_regular_reuleaux(n)
        x, th = r.vertices, r.theta
        w = sens.bisector(r, 0)

        def cos_angle(a, b):
            return float(a @ b) / (np.linalg.norm(a) * np.linalg.norm(b))

        quoted = (
            -cos_angle(x[k] - x[1], w) / math.sin(th[k]) * math.cos(th[k + 1] + th[1] / 2)
            + cos_angle(x[k + 1] - x[1], w) / math.sin(th[k + 1]) * math.cos(th[k] + th[1] / 2)
        )
        fd = fd_directional(lambda p: np.linalg.norm(p.vertices[k] - p.vertices[k + 1]), r, 0, w)
        linearised = math.cos(th[0] / 2) * sens.theta_rates(r, 0, w)[0]
        assert linearised == pytest.approx(fd, rel=1e-6)
        assert abs(quoted - fd) > 1.0
