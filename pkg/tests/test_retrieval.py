import numpy as np
import pytest

from base_reports import SuiteConfig
from geometry import EpsilonRangeError, Functional, Space, SpaceMismatchError
from harness import gen_instance
from harness.oracles import functional_duality_oracle
from operators import Operator, op_norm
from theorems import (
    HypothesisViolationError,
    RetrievalReport,
    line_min,
    norm_retrieval_functional,
    norm_retrieval_op,
    norm_retrieval_op_eps,
    operator_sup,
)


class TestOperatorRetrieval:
    def test_reflection_against_identity(self):
        T = Operator.from_rows(np.diag([1.0, -1.0]))
        A = Operator.from_rows(np.eye(2))
        report = norm_retrieval_op(T, A, seed=3)
        assert report.holds
        assert report.sup_pos == pytest.approx(1.0, abs=report.tol)
        assert report.sup_neg == pytest.approx(1.0, abs=report.tol)

    def test_example_pair(self, example_ops):
        T, A1, _ = example_ops
        report = norm_retrieval_op(T, A1, seed=5)
        assert report.norm == pytest.approx(1.0)
        assert report.holds

    def test_max_norm_codomain(self, remark_op):
        A = Operator.from_rows([[1, 0], [0, 0]], "linf")
        report = norm_retrieval_op(remark_op, A, seed=7)
        assert report.holds

    @pytest.mark.parametrize("descriptor", ["lp:2", "linf"])
    def test_zero_direction_recovers_the_norm(self, rng, descriptor):
        T = Operator.from_rows(rng.standard_normal((3, 3)), descriptor)
        report = norm_retrieval_op(T, 0.0 * T, seed=3)
        assert report.holds
        assert report.sup_pos == pytest.approx(report.norm, abs=report.tol)
        assert report.sup_neg == pytest.approx(report.norm, abs=report.tol)
        assert operator_sup(T, 0.0 * T, "pos", seed=3).value == pytest.approx(op_norm(T), abs=report.tol)

    def test_hypothesis_violation(self, example_ops):
        T, _, A2 = example_ops
        with pytest.raises(HypothesisViolationError):
            norm_retrieval_op(T, A2)


class TestOperatorRetrievalEps:
    def test_example_at_half(self, example_ops):
        T, A1, _ = example_ops
        report = norm_retrieval_op_eps(T, A1, 0.5, seed=11)
        assert report.holds
        assert max(report.l1_eps, report.l2_eps) == pytest.approx(1.0, abs=2e-3)
        assert max(report.l1_eps, report.l3_eps) == pytest.approx(1.0, abs=2e-3)

    def test_large_eps_reports_only_the_band(self, example_ops):
        T, A1, _ = example_ops
        report = norm_retrieval_op_eps(T, A1, 1.5, seed=11)
        assert report.l2_eps is None and report.l3_eps is None
        assert report.identities == {}

    def test_band_sup_grows_with_eps(self, example_ops, rng):
        T, A1, _ = example_ops
        pairs = [(T, A1)]
        for _ in range(2):
            U = Operator.from_rows(rng.standard_normal((3, 3)))
            B = Operator.from_rows(rng.standard_normal((3, 3)))
            lam, _ = line_min(U, B)
            pairs.append((U.plus(B, lam), B))
        for U, B in pairs:
            reports = [norm_retrieval_op_eps(U, B, eps, check=False, seed=13) for eps in (0.1, 0.2, 0.4, 0.8)]
            l1s = [r.l1_eps for r in reports]
            slack = reports[0].tol
            assert all(later >= earlier - slack for earlier, later in zip(l1s, l1s[1:]))
            assert l1s[-1] <= reports[0].norm + slack

    @pytest.mark.parametrize("eps", [0.0, -0.25])
    def test_eps_must_be_positive(self, example_ops, eps):
        T, A1, _ = example_ops
        with pytest.raises(EpsilonRangeError):
            norm_retrieval_op_eps(T, A1, eps)


class TestFunctionalRetrieval:
    def test_strictly_convex_dual(self):
        space = Space.lp(2, 3)
        report = norm_retrieval_functional(Functional([1, 0], space), Functional([0, 1], space), seed=2)
        assert report.exact_identity
        assert report.holds
        assert report.k1 == pytest.approx(1.0, abs=report.tol)
        assert report.k2 == pytest.approx(1.0, abs=report.tol)

    def test_l1_falls_back_to_the_eps_identity(self):
        space = Space.lp(2, 1)
        f, g = Functional([1, 1], space), Functional([1, -1], space)
        report = norm_retrieval_functional(f, g, seed=2)
        assert not report.exact_identity
        assert report.eps == pytest.approx(0.1)
        assert set(report.identities) == {"max_l_k1"}
        assert report.holds

    def test_explicit_eps(self):
        space = Space.lp(2, 1)
        report = norm_retrieval_functional(Functional([1, 1], space), Functional([1, -1], space), eps=0.3, seed=4)
        assert report.l_eps is not None
        assert max(report.l_eps, report.k1) == pytest.approx(report.norm, abs=report.tol)

    @pytest.mark.parametrize("descriptor", ["lp:1.5", "lp:3"])
    def test_sups_match_the_duality_oracle(self, rng, descriptor):
        space = Space.from_descriptor(descriptor, 2)
        for _ in range(3):
            f = Functional(rng.standard_normal(2), space)
            g = Functional(rng.standard_normal(2), space)
            report = norm_retrieval_functional(f, g, check=False, seed=9)
            assert report.k1 == pytest.approx(functional_duality_oracle(f, g, 1.0), abs=2e-3)
            assert report.k2 == pytest.approx(functional_duality_oracle(f, g, -1.0), abs=2e-3)

    def test_line_minimized_pair_in_l3(self):
        cfg = SuiteConfig(suite="thm-norm-retrieval-functional", dims=[3], domain="lp:3", seed=5)
        for trial in range(3):
            inst = gen_instance("orthogonal-functional-pair", cfg, trial)
            report = norm_retrieval_functional(inst.f, inst.g, seed=trial)
            assert report.exact_identity
            assert report.norm == pytest.approx(float(np.sum(np.abs(inst.f.coords) ** 1.5) ** (2.0 / 3.0)))
            assert report.k1 == pytest.approx(report.norm, abs=1e-4)
            assert report.k2 == pytest.approx(report.norm, abs=1e-4)

    def test_not_orthogonal(self):
        space = Space.lp(2, 2)
        with pytest.raises(HypothesisViolationError):
            norm_retrieval_functional(Functional([1, 0], space), Functional([1, 1], space))

    def test_space_mismatch(self):
        with pytest.raises(SpaceMismatchError):
            norm_retrieval_functional(Functional([1, 0], Space.lp(2, 2)), Functional([0, 1], Space.lp(2, 3)))

    def test_eps_must_be_positive(self):
        space = Space.lp(2, 2)
        with pytest.raises(EpsilonRangeError):
            norm_retrieval_functional(Functional([1, 0], space), Functional([0, 1], space), eps=0.0)


def test_report_rejects_sups_above_the_norm():
    with pytest.raises(ValueError):
        RetrievalReport(norm=1.0, tol=1e-3, sup_pos=1.1)
