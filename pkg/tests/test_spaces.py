import math

import numpy as np
import pytest

from geometry import (
    DescriptorError,
    Space,
    SpaceMismatchError,
    SupportOverflowError,
    Vector,
    ZeroVectorError,
    dual_attainer,
    Functional,
    norm_eval,
    numeric_derivatives,
    one_sided_derivatives,
    sphere_sample,
    sphere_sample_array,
    support_extremes,
)

SPACES = ["lp:1", "lp:2", "lp:3", "lp:1.5", "linf"]


def vec(coords, descriptor):
    return Vector(coords, Space.from_descriptor(descriptor, len(coords)))


class TestDescriptors:
    @pytest.mark.parametrize("text", ["lp:1", "lp:2", "lp:3.5", "linf"])
    def test_round_trip(self, text):
        assert Space.from_descriptor(text, 3).descriptor == text

    def test_lp_inf_is_linf(self):
        assert Space.from_descriptor("lp:inf", 2) == Space.linf(2)

    @pytest.mark.parametrize("text", ["l2", "lp:", "lp:0.5", "lp:nan", "max"])
    def test_rejects_bad_descriptors(self, text):
        with pytest.raises(DescriptorError):
            Space.from_descriptor(text, 2)

    def test_rejects_bad_dimension(self):
        with pytest.raises(ValueError):
            Space.lp(0, 2)

    def test_duals(self):
        assert Space.lp(3, 1).dual() == Space.linf(3)
        assert Space.linf(3).dual() == Space.lp(3, 1)
        assert Space.lp(3, 3).dual().p == pytest.approx(1.5)
        assert Space.lp(3, 2).dual() == Space.lp(3, 2)


class TestNorms:
    def test_linf(self):
        assert norm_eval(Space.linf(2), vec([1, 0.5], "linf")) == 1.0

    def test_l1(self):
        assert norm_eval(Space.lp(3, 1), vec([1, -1, 1], "lp:1")) == 3.0

    @pytest.mark.parametrize("descriptor", SPACES)
    @pytest.mark.parametrize("alpha", [-2.5, -1.0, 0.0, 0.5, 3.0])
    def test_absolute_homogeneity(self, rng, descriptor, alpha):
        for _ in range(5):
            x = vec(rng.standard_normal(4), descriptor)
            scaled = Vector(alpha * x.coords, x.space)
            assert norm_eval(x.space, scaled) == pytest.approx(abs(alpha) * norm_eval(x.space, x), abs=1e-12)

    @pytest.mark.parametrize("descriptor", SPACES)
    def test_triangle_inequality(self, rng, descriptor):
        for _ in range(20):
            x = vec(rng.standard_normal(4), descriptor)
            y = vec(rng.standard_normal(4), descriptor)
            total = norm_eval(x.space, Vector(x.coords + y.coords, x.space))
            assert total <= norm_eval(x.space, x) + norm_eval(x.space, y) + 1e-12

    def test_l3(self):
        assert vec([1, 1], "lp:3").norm() == pytest.approx(2 ** (1 / 3), abs=1e-14)

    def test_lp_matches_summation(self, rng):
        space = Space.lp(4, 3.5)
        x = rng.standard_normal(4)
        assert space.norm(x) == pytest.approx(np.sum(np.abs(x) ** 3.5) ** (1 / 3.5), rel=1e-13)

    def test_large_exponent_does_not_overflow(self):
        assert Space.lp(2, 400).norm(np.array([1e3, 1e3])) == pytest.approx(1e3 * 2 ** (1 / 400))

    def test_space_mismatch(self):
        with pytest.raises(SpaceMismatchError):
            norm_eval(Space.lp(2, 2), vec([1, 0], "linf"))
        with pytest.raises(SpaceMismatchError):
            Vector([1, 2, 3], Space.lp(2, 2))

    def test_vector_is_read_only(self):
        v = vec([1, 2], "lp:2")
        with pytest.raises(ValueError):
            v.coords[0] = 5.0


class TestDerivatives:
    def test_euclidean_orthogonal_direction(self):
        d = one_sided_derivatives(vec([1, 0], "lp:2"), vec([0, 1], "lp:2"))
        assert (d.left, d.right) == pytest.approx((0.0, 0.0))

    def test_linf_corner(self):
        d = one_sided_derivatives(vec([1, 1], "linf"), vec([1, -1], "linf"))
        assert (d.left, d.right) == (-1.0, 1.0)

    def test_l1_zero_coordinate(self):
        d = one_sided_derivatives(vec([1, 0], "lp:1"), vec([0, 1], "lp:1"))
        assert (d.left, d.right) == (-1.0, 1.0)

    @pytest.mark.parametrize("descriptor", SPACES)
    def test_closed_forms_match_difference_quotients(self, rng, descriptor):
        for _ in range(20):
            x = vec(rng.standard_normal(3), descriptor)
            y = vec(rng.standard_normal(3), descriptor)
            d = one_sided_derivatives(x, y)
            q = numeric_derivatives(x, y)
            assert d.left <= d.right + 1e-12
            assert q.right == pytest.approx(d.right, abs=1e-6)
            assert q.left == pytest.approx(d.left, abs=1e-6)

    @pytest.mark.parametrize("descriptor", ["lp:1.5", "lp:2", "lp:3"])
    def test_smooth_spaces_have_equal_sides(self, rng, descriptor):
        x = vec(rng.standard_normal(4), descriptor)
        y = vec(rng.standard_normal(4), descriptor)
        d = one_sided_derivatives(x, y)
        assert d.left == d.right

    def test_difference_quotients_decrease_to_the_right_derivative(self):
        x, y = vec([1, 0], "lp:2"), vec([1, 1], "lp:2")
        quotients = [(x.space.norm(x.coords + t * y.coords) - 1.0) / t for t in (1e-1, 1e-2, 1e-3, 1e-4)]
        assert all(a > b for a, b in zip(quotients, quotients[1:]))
        assert quotients[-1] == pytest.approx(one_sided_derivatives(x, y).right, abs=1e-4)

    def test_zero_base_point(self):
        with pytest.raises(ZeroVectorError):
            one_sided_derivatives(vec([0, 0], "lp:2"), vec([1, 0], "lp:2"))


class TestSupportExtremes:
    def test_euclidean_self_duality(self):
        (f,) = support_extremes(vec([0.6, 0.8], "lp:2"))
        assert f.coords == pytest.approx([0.6, 0.8])

    def test_linf_corner(self):
        fs = support_extremes(vec([1, 1], "linf"))
        assert [f.to_list() for f in fs] == [[1.0, 0.0], [0.0, 1.0]]

    def test_l1_free_sign(self):
        fs = support_extremes(vec([1, 0], "lp:1"))
        assert [f.to_list() for f in fs] == [[1.0, 1.0], [1.0, -1.0]]

    def test_l1_negation_keeps_order(self):
        fs = support_extremes(vec([0, 2, 0], "lp:1"))
        gs = support_extremes(vec([0, -2, 0], "lp:1"))
        for f, g in zip(fs, gs):
            assert g.coords == pytest.approx(-f.coords)

    @pytest.mark.parametrize("descriptor", SPACES)
    def test_supporting_property(self, rng, descriptor):
        x = vec(rng.standard_normal(3), descriptor)
        for f in support_extremes(x):
            assert f.dual_norm() == pytest.approx(1.0, abs=1e-10)
            assert f(x) == pytest.approx(x.norm(), abs=1e-10)

    @pytest.mark.parametrize("descriptor", SPACES)
    def test_extremes_span_the_derivative_interval(self, rng, descriptor):
        for _ in range(10):
            c = rng.standard_normal(3)
            x = vec(c / Space.from_descriptor(descriptor, 3).norm(c), descriptor)
            y = vec(rng.standard_normal(3), descriptor)
            values = [f(y) for f in support_extremes(x)]
            d = one_sided_derivatives(x, y)
            assert max(values) == pytest.approx(d.right, abs=1e-8)
            assert min(values) == pytest.approx(d.left, abs=1e-8)

    def test_l1_cap(self):
        x = vec(np.eye(12)[0], "lp:1")
        with pytest.raises(SupportOverflowError):
            support_extremes(x)

    def test_zero_vector(self):
        with pytest.raises(ZeroVectorError):
            support_extremes(vec([0, 0], "linf"))


class TestDualAttainer:
    @pytest.mark.parametrize("descriptor", SPACES)
    def test_attains_the_dual_norm(self, rng, descriptor):
        space = Space.from_descriptor(descriptor, 3)
        f = Functional(rng.standard_normal(3), space)
        y = dual_attainer(f)
        assert y.norm() == pytest.approx(1.0, abs=1e-12)
        assert f(y) == pytest.approx(f.dual_norm(), abs=1e-10)

    def test_zero_functional(self):
        with pytest.raises(ZeroVectorError):
            dual_attainer(Functional([0, 0], Space.lp(2, 2)))


class TestSphereSampling:
    @pytest.mark.parametrize("descriptor", SPACES)
    def test_unit_norm(self, descriptor):
        space = Space.from_descriptor(descriptor, 3)
        for v in sphere_sample(space, 50, seed=7):
            assert v.norm() == pytest.approx(1.0, abs=1e-12)

    def test_deterministic(self):
        space = Space.lp(3, 3)
        a = sphere_sample_array(space, 100, 11)
        b = sphere_sample_array(space, 100, 11)
        assert np.array_equal(a, b)

    def test_symmetric(self):
        pts = sphere_sample_array(Space.lp(3, 2), 10_000, 3)
        assert np.all(np.abs(pts.mean(axis=0)) < 0.05)

    def test_count_must_be_positive(self):
        with pytest.raises(ValueError):
            sphere_sample_array(Space.lp(2, 2), 0, 1)

    def test_linf_points_lie_on_faces(self):
        pts = sphere_sample_array(Space.linf(2), 200, 5)
        assert np.allclose(np.abs(pts).max(axis=1), 1.0)
        assert math.isclose(float(np.abs(pts).max()), 1.0)
