import numpy as np
import pytest

from geometry import Space, SpaceMismatchError, Vector, ZeroVectorError
from operators import (
    NormEstimate,
    Operator,
    antipodal_structure,
    apply,
    attainment_sample,
    get_solver,
    op_norm,
    op_norm_estimate,
)
from operators.solvers import SampledSolver
from harness.oracles import hausdorff, remark_segments


class TestOperator:
    def test_identity(self, rng):
        x = Vector(rng.standard_normal(3), Space.lp(3, 2))
        assert apply(Operator.from_rows(np.eye(3)), x).coords == pytest.approx(x.coords)

    def test_images_are_columns(self, example_ops):
        T, A1, _ = example_ops
        e = np.eye(3)
        assert apply(T, Vector(e[0], T.domain)).to_list() == [1.0, 0.0, 0.0]
        assert apply(A1, Vector(e[1], A1.domain)).to_list() == [1.0, 0.0, 0.0]
        assert apply(A1, Vector(e[0], A1.domain)).to_list() == [0.0, 1.0, 0.0]

    def test_fixture_files_match(self, example_ops, load_fixture, remark_op, four_point_op):
        for name, op in zip(("example_T", "example_A1", "example_A2"), example_ops):
            assert np.array_equal(load_fixture(name).matrix, op.matrix)
        assert np.array_equal(load_fixture("remark_linf").matrix, remark_op.matrix)
        assert load_fixture("linf_four_point").domain == Space.linf(2)
        assert np.array_equal(load_fixture("linf_four_point").matrix, four_point_op.matrix)

    def test_domain_mismatch(self):
        T = Operator.from_rows(np.eye(2))
        with pytest.raises(SpaceMismatchError):
            apply(T, Vector([1, 0], Space.linf(2)))
        with pytest.raises(SpaceMismatchError):
            apply(T, Vector([1, 0, 0], Space.lp(3, 2)))

    def test_shape_mismatch(self):
        with pytest.raises(SpaceMismatchError):
            Operator(np.eye(2), Space.lp(3, 2), Space.lp(2, 2))

    def test_arithmetic(self):
        T = Operator.from_rows([[1, 2], [3, 4]])
        A = Operator.from_rows([[0, 1], [1, 0]])
        assert T.plus(A, -2.0).to_rows() == [[1.0, 0.0], [1.0, 4.0]]
        assert (T - A + 2 * A).to_rows() == (T + A).to_rows()
        with pytest.raises(SpaceMismatchError):
            T + Operator.from_rows([[1, 0], [0, 1]], "linf")

    def test_matrix_is_read_only(self):
        T = Operator.from_rows(np.eye(2))
        with pytest.raises(ValueError):
            T.matrix[0, 0] = 3.0


class TestOpNorm:
    def test_example_operator(self, example_ops):
        assert op_norm(example_ops[0]) == pytest.approx(1.0, abs=1e-12)

    def test_spectral(self):
        est = op_norm_estimate(Operator.from_rows(np.diag([2.0, 1.0])))
        assert est.value == pytest.approx(2.0)
        assert est.method == "spectral"
        assert est.exact

    def test_remark_operator_is_exact(self, remark_op):
        est = op_norm_estimate(remark_op)
        assert est.value == 1.0
        assert est.method == "sign-vectors"

    def test_l1_domain_column_norms(self, rng):
        m = rng.standard_normal((3, 3))
        T = Operator.from_rows(m, "lp:1", "lp:3")
        est = op_norm_estimate(T)
        assert est.method == "columns"
        assert est.value == pytest.approx(max(Space.lp(3, 3).norm(m[:, j]) for j in range(3)))

    def test_linf_to_linf_is_max_row_sum(self, rng):
        m = rng.standard_normal((4, 4))
        T = Operator.from_rows(m, "linf")
        assert op_norm(T) == pytest.approx(np.abs(m).sum(axis=1).max())

    def test_linf_codomain_rows(self, rng):
        m = rng.standard_normal((3, 3))
        T = Operator.from_rows(m, "lp:3", "linf")
        est = op_norm_estimate(T)
        assert est.method == "rows"
        assert est.value == pytest.approx(max(Space.lp(3, 1.5).norm(row) for row in m))
        assert T.image_norms(est.maximizer)[0] == pytest.approx(est.value)

    def test_sampled_fallback(self, rng):
        T = Operator.from_rows(rng.standard_normal((3, 3)), "lp:3", "lp:1.5")
        assert get_solver(T.domain, T.codomain).name == "sampled"
        est = op_norm_estimate(T)
        assert est.value > 0
        assert T.image_norms(est.maximizer)[0] == pytest.approx(est.value, rel=1e-9)

    def test_sampling_agrees_with_spectral(self, rng):
        for _ in range(5):
            T = Operator.from_rows(rng.standard_normal((3, 3)))
            exact = op_norm(T)
            sampled = SampledSolver().estimate(T)
            assert sampled.value <= exact + 1e-9
            assert sampled.value == pytest.approx(exact, abs=max(sampled.accuracy, 1e-6))

    def test_zero_operator(self):
        est = op_norm_estimate(Operator.from_rows(np.zeros((2, 2)), "lp:3"))
        assert est.value == 0.0
        assert est.method == "zero"

    def test_norm_estimate_validation(self):
        with pytest.raises(ValueError):
            NormEstimate(value=-1.0, accuracy=0.0, method="x", maximizer=np.zeros(2))


class TestAttainment:
    def test_example_concentrates_on_e1(self, example_ops):
        s = attainment_sample(example_ops[0], tol=1e-6)
        e1 = np.eye(3)[0]
        near = np.minimum(np.linalg.norm(s.points - e1, axis=1), np.linalg.norm(s.points + e1, axis=1))
        assert np.all(near <= 1e-4)
        assert antipodal_structure(s)

    def test_remark_operator_fills_two_segments(self, remark_op):
        s = attainment_sample(remark_op, budget=2**13)
        assert hausdorff(s.points, remark_segments()) < 0.05
        assert s.component_count == 2
        assert antipodal_structure(s)
        assert not s.is_subspace_sphere

    def test_four_point_operator(self, four_point_op):
        s = attainment_sample(four_point_op)
        corners = np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]], dtype=float)
        assert hausdorff(s.points, corners) < 1e-3
        assert not antipodal_structure(s)
        assert s.quotient_component_count == 2
        assert s.kind == "other"

    def test_euclidean_is_a_subspace_sphere(self, rng):
        for _ in range(5):
            s = attainment_sample(Operator.from_rows(rng.standard_normal((3, 3))))
            assert s.is_subspace_sphere
            assert antipodal_structure(s)

    def test_repeated_singular_value_gives_a_great_circle(self):
        s = attainment_sample(Operator.from_rows(np.diag([2.0, 2.0, 1.0])), budget=512)
        assert s.subspace_basis.shape[0] == 2
        assert s.kind == "connected"
        assert np.allclose(s.points[:, 2], 0.0, atol=1e-12)

    @pytest.mark.parametrize("descriptor", ["lp:1", "lp:3", "linf"])
    def test_points_attain_within_tol(self, rng, descriptor):
        T = Operator.from_rows(rng.standard_normal((3, 3)), descriptor)
        s = attainment_sample(T, budget=2048)
        assert np.all(T.image_norms(s.points) >= s.norm_value - s.tol - 1e-12)
        assert np.allclose(s.points[s.antipode], -s.points)

    def test_zero_operator(self):
        with pytest.raises(ZeroVectorError):
            attainment_sample(Operator.from_rows(np.zeros((2, 2))))
