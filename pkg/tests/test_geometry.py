import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import polar

from rcmsim import ConvexityParams, Euclidean, SO3, hat, vee
from rcmsim.errors import CutLocusError, DegenerateMatrixError, GroupMismatchError


def rotation_about(axis, angle):
    axis = np.asarray(axis, dtype=float)
    return SO3().exp(angle * axis / np.linalg.norm(axis))


class TestHatVee:
    def test_roundtrip(self, rng):
        v = rng.standard_normal((50, 3))
        assert np.allclose(vee(hat(v)), v)

    def test_skew(self, rng):
        m = hat(rng.standard_normal(3))
        assert np.allclose(m, -m.T)


class TestExp:
    def test_zero_gives_identity(self, so3):
        assert np.allclose(so3.exp(np.zeros(3)), np.eye(3), atol=1e-15)

    def test_quarter_turn_about_x(self, so3):
        # independent evaluation of R = I + sin(t) K + (1 - cos(t)) K^2
        theta = math.pi / 2
        k = hat([1.0, 0.0, 0.0])
        expected = np.eye(3) + math.sin(theta) * k + (1 - math.cos(theta)) * (k @ k)
        r = so3.exp([theta, 0.0, 0.0])
        assert np.allclose(r, expected, atol=1e-14)
        assert np.allclose(r @ [0, 1, 0], [0, 0, 1], atol=1e-14)
        assert np.allclose(r @ [0, 0, 1], [0, -1, 0], atol=1e-14)

    def test_result_is_orthogonal(self, so3, rng):
        r = so3.exp(rng.uniform(-2, 2, size=(100, 3)))
        res = np.swapaxes(r, -1, -2) @ r - np.eye(3)
        assert np.max(np.abs(res)) < 1e-9
        assert np.all(np.linalg.det(r) > 0)

    def test_euclidean_exp_is_identity_map(self, r3, rng):
        v = rng.standard_normal(3)
        assert np.array_equal(r3.exp(v), v)


class TestLog:
    def test_identity(self, so3):
        assert np.allclose(so3.log(np.eye(3)), np.zeros(3), atol=1e-15)

    def test_roundtrip_below_injectivity_radius(self, so3):
        v = np.array([0.3, -0.2, 0.1])
        assert np.allclose(so3.log(so3.exp(v)), v, atol=1e-12)

    def test_roundtrip_sampled(self, so3, rng):
        # 1000 directions with angles up to pi - 1e-3
        u = rng.standard_normal((1000, 3))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        v = u * rng.uniform(0, math.pi - 1e-3, size=(1000, 1))
        assert np.max(np.abs(so3.log(so3.exp(v)) - v)) <= 1e-9

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=50, deadline=None)
    def test_roundtrip_property(self, seed):
        so3 = SO3()
        g = np.random.default_rng(seed)
        u = g.standard_normal(3)
        u /= np.linalg.norm(u)
        v = u * g.uniform(0, math.pi - 1e-3)
        assert np.max(np.abs(so3.log(so3.exp(v)) - v)) <= 1e-9

    def test_cut_locus_raises(self, so3):
        r = rotation_about([1, 0, 0], math.pi - 1e-12)
        with pytest.raises(CutLocusError):
            so3.log(r)

    def test_custom_margin(self, so3):
        r = rotation_about([1, 0, 0], math.pi - 1e-2)
        so3.log(r)  # fine with the default margin
        with pytest.raises(CutLocusError):
            so3.log(r, margin=1e-1)


class TestDistance:
    def test_self_distance(self, so3, rng):
        x = so3.random_point(rng)
        assert so3.distance(x, x) < 1e-10

    def test_angle_from_identity(self, so3, rng):
        axis = rng.standard_normal(3)
        r = rotation_about(axis, 0.7)
        assert abs(so3.distance(np.eye(3), r) - 0.7) < 1e-12

    def test_bi_invariance(self, so3, rng):
        for _ in range(20):
            g, x, y = (so3.random_point(rng) for _ in range(3))
            d = so3.distance(x, y)
            assert abs(so3.distance(g @ x, g @ y) - d) <= 1e-10
            assert abs(so3.distance(x @ g, y @ g) - d) <= 1e-10

    def test_norm_of_left_log_is_distance(self, so3, rng):
        for _ in range(50):
            x, y = so3.random_point(rng), so3.random_point(rng)
            assert abs(so3.norm(so3.left_log(x, y)) - so3.distance(x, y)) <= 1e-10


class TestLeftLog:
    def test_same_point(self, so3, rng):
        x = so3.random_point(rng)
        assert np.max(np.abs(so3.left_log(x, x))) < 1e-12

    def test_euclidean_is_difference(self, r3, rng):
        x, y = rng.standard_normal(3), rng.standard_normal(3)
        assert np.allclose(r3.left_log(x, y), y - x)

    def test_antisymmetric_norm(self, so3, rng):
        for _ in range(20):
            x, y = so3.random_point(rng), so3.random_point(rng)
            a, b = so3.left_log(x, y), so3.left_log(y, x)
            assert abs(np.linalg.norm(a) - np.linalg.norm(b)) <= 1e-10


class TestInner:
    def test_unit_algebra_vector(self, so3):
        xi = np.array([1.0, 0.0, 0.0])
        # tr(hat(e1)^T hat(e1)) / 2 = 1
        assert so3.inner(xi, xi) == pytest.approx(1.0)
        skew = hat(xi)
        assert np.trace(skew.T @ skew) / 2 == pytest.approx(1.0)

    def test_zero(self, so3, rng):
        assert so3.inner(rng.standard_normal(3), np.zeros(3)) == 0.0

    def test_euclidean_dot(self, r3, rng):
        a, b = rng.standard_normal(3), rng.standard_normal(3)
        assert r3.inner(a, b) == pytest.approx(a @ b)

    def test_dimension_mismatch(self, so3):
        with pytest.raises(GroupMismatchError):
            so3.inner(np.zeros(4), np.zeros(4))
        with pytest.raises(GroupMismatchError):
            Euclidean(2).inner(np.zeros(3), np.zeros(3))


class TestRetract:
    def test_zero_step(self, so3, rng):
        x = so3.random_point(rng)
        assert np.allclose(so3.retract(x, rng.standard_normal(3), 0.0), x, atol=1e-14)

    def test_euclidean(self, r3, rng):
        x, xi = rng.standard_normal(3), rng.standard_normal(3)
        assert np.allclose(r3.retract(x, xi, 0.25), x + 0.25 * xi)

    def test_from_identity(self, so3):
        xi = np.array([math.pi / 4, 0.0, 0.0])
        assert np.allclose(so3.retract(np.eye(3), xi, 1.0), so3.exp(xi), atol=1e-14)


class TestProject:
    def test_idempotent_on_rotations(self, so3, rng):
        r = so3.random_point(rng)
        assert np.allclose(so3.project(r), r, atol=1e-14)

    def test_perturbation_matches_polar_oracle(self, so3, rng):
        r = so3.random_point(rng) + 1e-6 * rng.standard_normal((3, 3))
        p = so3.project(r)
        assert np.max(np.abs(p.T @ p - np.eye(3))) <= 1e-12
        u, _ = polar(r)
        assert np.allclose(p, u, atol=1e-9)

    def test_rank_deficient(self, so3):
        with pytest.raises(DegenerateMatrixError):
            so3.project(np.zeros((3, 3)))

    def test_euclidean_identity_map(self, r3, rng):
        v = rng.standard_normal(3)
        assert np.array_equal(r3.project(v), v)


class TestSampleInBall:
    def test_zero_radius(self, so3, rng):
        c = so3.random_point(rng)
        assert np.array_equal(so3.sample_in_ball(c, 0.0, rng), c)

    def test_samples_stay_inside(self, so3, rng):
        c = so3.random_point(rng)
        pts = np.stack([so3.sample_in_ball(c, 0.5, rng) for _ in range(1000)])
        assert np.all(so3.distance(c, pts) < 0.5)

    def test_determinism(self, so3):
        c = np.eye(3)
        a = so3.sample_in_ball(c, 0.5, np.random.default_rng(7))
        b = so3.sample_in_ball(c, 0.5, np.random.default_rng(7))
        other = so3.sample_in_ball(c, 0.5, np.random.default_rng(8))
        assert np.array_equal(a, b)
        assert so3.distance(a, other) > 0

    def test_euclidean_inside(self, r3, rng):
        c = rng.standard_normal(3)
        pts = np.stack([r3.sample_in_ball(c, 0.3, rng) for _ in range(200)])
        assert np.all(r3.distance(c, pts) < 0.3)


class TestGroupAxioms:
    def test_inverse(self, so3, rng):
        x = so3.random_point(rng)
        assert np.max(np.abs(so3.compose(x, so3.inverse(x)) - np.eye(3))) <= 1e-12

    def test_associativity(self, so3, rng):
        for _ in range(20):
            a, b, c = (so3.random_point(rng) for _ in range(3))
            lhs = so3.compose(so3.compose(a, b), c)
            rhs = so3.compose(a, so3.compose(b, c))
            assert np.max(np.abs(lhs - rhs)) <= 1e-12


class TestGradientIdentity:
    def test_finite_difference(self, so3, rng):
        # d/de [ d(retract(x, eta, e), z)^2 / 2 ] at 0 equals <-left_log(x,z), eta>
        h = 1e-5
        for _ in range(100):
            x, z = so3.random_point(rng), so3.random_point(rng)
            if so3.distance(x, z) > 3.0:
                continue
            eta = rng.standard_normal(3)
            eta /= np.linalg.norm(eta)
            plus = 0.5 * so3.distance(so3.retract(x, eta, h), z) ** 2
            minus = 0.5 * so3.distance(so3.retract(x, eta, -h), z) ** 2
            fd = (plus - minus) / (2 * h)
            analytic = so3.inner(-so3.left_log(x, z), eta)
            assert abs(fd - analytic) <= 1e-5 * max(1.0, abs(analytic))


class TestConvexityParams:
    def test_so3_default(self):
        p = ConvexityParams.so3_default()
        assert p.r_star == pytest.approx(math.pi / 2)

    def test_formula(self):
        p = ConvexityParams(inj=1.0, curvature_upper=4.0)
        assert p.r_star == pytest.approx(0.5 * min(1.0, math.pi / 2.0))
