import numpy as np
import pytest

from geometry import DerivativePair, Space, SpaceMismatchError, Vector, ZeroVectorError
from harness.oracles import bj_grid_oracle, operator_line_oracle
from operators import Operator, antipodal_structure, attainment_sample
from theorems import (
    InconclusiveError,
    OrthoCertificate,
    bj_op,
    bj_vec,
    convex_line_min,
    line_min,
    quadratic_witness,
    witness_search,
)


def vec(coords, descriptor):
    return Vector(coords, Space.from_descriptor(descriptor, len(coords)))


class TestConvexLineMin:
    def test_smooth(self):
        lam, value = convex_line_min(lambda t: (t - 3.0) ** 2 + 1.0)
        assert lam == pytest.approx(3.0, abs=1e-6)
        assert value == pytest.approx(1.0, abs=1e-10)

    def test_kink_at_origin(self):
        lam, value = convex_line_min(lambda t: abs(t) + 2.0)
        assert lam == 0.0
        assert value == 2.0

    def test_far_minimizer(self):
        lam, _ = convex_line_min(lambda t: abs(t + 1000.0))
        assert lam == pytest.approx(-1000.0, abs=1e-3)


class TestBjVec:
    def test_linf_corner(self):
        assert bj_vec(vec([1, 1], "linf"), vec([1, -1], "linf"))

    @pytest.mark.parametrize("descriptor", ["lp:1", "lp:2", "lp:3", "linf"])
    def test_not_orthogonal_to_itself(self, descriptor):
        assert not bj_vec(vec([1, 0], descriptor), vec([1, 0], descriptor))

    def test_zero_base(self):
        verdict = bj_vec(vec([0, 0], "lp:2"), vec([1, 2], "lp:2"))
        assert verdict
        assert verdict.zero_base

    def test_euclidean_is_inner_product_orthogonality(self, rng):
        for _ in range(20):
            x = vec(rng.standard_normal(3), "lp:2")
            y = vec(rng.standard_normal(3), "lp:2")
            y_perp = Vector(y.coords - (x.coords @ y.coords) / (x.coords @ x.coords) * x.coords, x.space)
            assert bj_vec(x, y_perp, tol=1e-9)
            assert bool(bj_vec(x, y)) == bj_grid_oracle(x, y)

    def test_not_symmetric_in_l1(self):
        x, y = vec([1, 0], "lp:1"), vec([1, 1], "lp:1")
        assert bj_vec(x, y)
        assert not bj_vec(y, x)


class TestBjOp:
    def test_example_orthogonal_to_a1(self, example_ops):
        T, A1, _ = example_ops
        cert = bj_op(T, A1)
        assert cert.verdict is True
        assert cert.status == "orthogonal"
        assert cert.min_value == pytest.approx(1.0, abs=1e-9)

    def test_example_not_orthogonal_to_a2(self, example_ops):
        T, _, A2 = example_ops
        cert = bj_op(T, A2)
        assert cert.verdict is False
        assert cert.min_value < 1.0
        lam_grid, grid_min = operator_line_oracle(T, A2)
        assert cert.min_value <= grid_min + 1e-9
        assert cert.min_value == pytest.approx(grid_min, abs=2e-3)
        assert cert.lambda_star == pytest.approx(lam_grid, abs=5e-2)

    def test_reflection_and_identity(self):
        T = Operator.from_rows(np.diag([1.0, -1.0]))
        A = Operator.from_rows(np.eye(2))
        assert bj_op(T, A).verdict is True

    def test_asymmetric_fixture_pair(self, load_fixture):
        T, A = load_fixture("asymmetric_T"), load_fixture("asymmetric_A")
        forward = bj_op(T, A)
        assert forward.verdict is True
        assert forward.left_right_derivs.left == pytest.approx(-0.5, abs=1e-6)
        assert forward.left_right_derivs.right == pytest.approx(1.0, abs=1e-6)
        backward = bj_op(A, T)
        assert backward.verdict is False
        assert backward.lambda_star == pytest.approx(-0.25, abs=1e-5)
        assert backward.min_value == pytest.approx(0.75, abs=1e-6)

    def test_verdict_survives_scaling(self):
        rng = np.random.default_rng(2024)

        def rotation():
            q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
            return q

        for trial in range(50):
            if trial % 2 == 0:
                # top singular value 1 of multiplicity two, A splits it with opposite signs
                U, V = rotation(), rotation()
                r = rng.uniform(0.0, 0.5)
                a, b = rng.uniform(0.5, 2.0), -rng.uniform(0.5, 2.0)
                T = Operator.from_rows(U @ np.diag([1.0, 1.0, r]) @ V.T)
                A = Operator.from_rows(U @ np.diag([a, b, 0.0]) @ V.T)
            else:
                T = Operator.from_rows(rng.standard_normal((3, 3)))
                A = Operator.from_rows(rng.standard_normal((3, 3)))
            verdict = bj_op(T, A).verdict
            if trial % 2 == 0:
                assert verdict is True
            c_pos = rng.uniform(0.25, 4.0)
            c_any = float(rng.choice([-1.0, 1.0])) * rng.uniform(0.25, 4.0)
            assert bj_op(T, c_pos * A).verdict is verdict
            assert bj_op(c_any * T, A).verdict is verdict
            assert bj_op(-1.0 * T, A).verdict is verdict

    def test_sampled_solver_is_conclusive_after_line_minimization(self, rng):
        for _ in range(3):
            T = Operator.from_rows(rng.standard_normal((2, 2)), "lp:3")
            A = Operator.from_rows(rng.standard_normal((2, 2)), "lp:3")
            assert bj_op(T, A).status == "not-orthogonal"
            lam, _ = line_min(T, A)
            cert = bj_op(T.plus(A, lam), A)
            assert cert.method == "sampled"
            assert cert.status == "orthogonal"
            assert cert.verdict is True

    def test_identity_not_orthogonal_to_itself(self):
        T = Operator.from_rows(np.eye(3), "linf")
        cert = bj_op(T, T)
        assert cert.verdict is False
        assert cert.lambda_star == pytest.approx(-1.0, abs=1e-6)
        assert cert.min_value == pytest.approx(0.0, abs=1e-6)

    def test_zero_direction(self, example_ops):
        T = example_ops[0]
        assert bj_op(T, 0.0 * T).verdict is True

    def test_zero_operator(self, example_ops):
        A = example_ops[1]
        with pytest.raises(ZeroVectorError):
            bj_op(0.0 * A, A)

    def test_space_mismatch(self, example_ops):
        with pytest.raises(SpaceMismatchError):
            bj_op(example_ops[0], Operator.from_rows(np.eye(3), "linf"))

    def test_line_minimum_gives_orthogonality(self, rng):
        for descriptor in ("lp:2", "linf", "lp:1"):
            T = Operator.from_rows(rng.standard_normal((3, 3)), descriptor)
            A = Operator.from_rows(rng.standard_normal((3, 3)), descriptor)
            lam, _ = line_min(T, A)
            assert bj_op(T.plus(A, lam), A).verdict is True

    def test_certificate_validation(self):
        with pytest.raises(ValueError):
            OrthoCertificate(
                verdict=True,
                status="orthogonal",
                lambda_star=0.0,
                min_value=1.0,
                left_right_derivs=DerivativePair(0.5, 1.0),
                norm_T=1.0,
                norm_A=1.0,
                tol=1e-7,
                accuracy=0.0,
                method="spectral",
            )

    def test_inconclusive_certificate(self):
        cert = OrthoCertificate(
            verdict=None,
            status="inconclusive",
            lambda_star=0.0,
            min_value=1.0,
            left_right_derivs=DerivativePair(0.0, 0.0),
            norm_T=1.0,
            norm_A=1.0,
            tol=1e-7,
            accuracy=1e-3,
            method="sampled",
        )
        with pytest.raises(InconclusiveError):
            cert.require_verdict()


class TestWitness:
    def test_example_witness_is_e1(self, example_ops):
        T, A1, _ = example_ops
        cert = bj_op(T, A1, find_witness=True)
        assert cert.witness is not None
        assert cert.witness.coords == pytest.approx([1.0, 0.0, 0.0])

    def test_example_has_no_witness_for_a2(self, example_ops):
        T, _, A2 = example_ops
        assert witness_search(T, A2, attainment_sample(T)) is None

    def test_quadratic_form_sign_change(self):
        T = Operator.from_rows(np.eye(2))
        A = Operator.from_rows(np.diag([1.0, -1.0]))
        x = quadratic_witness(T, A, np.eye(2), qtol=1e-12)
        assert x is not None
        assert float(x @ A.matrix @ x) == pytest.approx(0.0, abs=1e-12)
        assert quadratic_witness(T, T, np.eye(2), qtol=1e-12) is None

    def test_hilbert_equivalence(self, rng):
        for trial in range(20):
            T = Operator.from_rows(rng.standard_normal((3, 3)))
            A = Operator.from_rows(rng.standard_normal((3, 3)))
            if trial % 2 == 0:
                lam, _ = line_min(T, A)
                T = T.plus(A, lam)
            cert = bj_op(T, A)
            witness = witness_search(T, A, attainment_sample(T), tol=1e-7)
            assert cert.verdict == (witness is not None)

    def test_remark_operator_witness(self, remark_op):
        # Ax = (a, 0) is orthogonal to Tx = (0, a) in the max norm
        A = Operator.from_rows([[1, 0], [0, 0]], "linf")
        s = attainment_sample(remark_op)
        assert antipodal_structure(s)
        cert = bj_op(remark_op, A)
        witness = witness_search(remark_op, A, s)
        assert cert.verdict is True
        assert witness is not None
        Tx = remark_op.matrix @ witness.coords
        Ax = A.matrix @ witness.coords
        assert bj_vec(Vector(Tx, remark_op.codomain), Vector(Ax, remark_op.codomain))
