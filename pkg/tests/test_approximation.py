import numpy as np
import pytest

from geometry import Space, ZeroVectorError
from harness.oracles import grid_descent_oracle
from operators import Operator
from theorems import (
    CounterexampleReport,
    DependentBasisError,
    counterexample_report,
    dist_subspace,
    dist_sup_formula,
    euclidean_experiment,
    experiment_operator,
    four_point_operator,
    line_min,
)


class TestLineMin:
    def test_operator_against_itself(self, example_ops):
        T = example_ops[0]
        lam, value = line_min(T, T)
        assert lam == pytest.approx(-1.0, abs=1e-6)
        assert value == pytest.approx(0.0, abs=1e-6)

    def test_diagonal_midpoint(self):
        lam, value = line_min(Operator.from_rows(np.diag([2.0, 1.0])), Operator.from_rows(np.eye(2)))
        assert lam == pytest.approx(-1.5, abs=1e-6)
        assert value == pytest.approx(0.5, abs=1e-6)

    def test_example_pair_is_already_minimal(self, example_ops):
        T, A1, _ = example_ops
        lam, value = line_min(T, A1)
        assert lam == pytest.approx(0.0, abs=1e-6)
        assert value == pytest.approx(1.0, abs=1e-9)

    def test_zero_direction(self, example_ops):
        T = example_ops[0]
        with pytest.raises(ZeroVectorError):
            line_min(T, 0.0 * T)


class TestDistSubspace:
    def test_single_operator_basis(self, example_ops):
        T, A1, _ = example_ops
        report = dist_subspace(T, [A1], seed=1)
        assert report.lambda0 == pytest.approx(0.0, abs=1e-6)
        assert report.dist_min == pytest.approx(1.0, abs=1e-9)
        assert report.formula_guaranteed
        assert report.agreement <= report.tol

    def test_two_operator_basis_matches_grid(self, rng):
        for _ in range(2):
            T = Operator.from_rows(rng.standard_normal((2, 2)))
            basis = [Operator.from_rows(rng.standard_normal((2, 2))) for _ in range(2)]
            report = dist_subspace(T, basis, seed=1)
            _, grid_value = grid_descent_oracle(T, basis)
            assert report.dist_min == pytest.approx(grid_value, abs=1e-4)
            assert report.dist_sup <= report.dist_min + report.tol

    def test_operator_in_the_span(self, example_ops):
        _, A1, A2 = example_ops
        report = dist_subspace(A1 + 2.0 * A2, [A1, A2], seed=1)
        assert report.dist_min == pytest.approx(0.0, abs=1e-5)
        assert report.coefficients == pytest.approx([1.0, 2.0], abs=1e-4)

    def test_counterexample_distance_is_below_one(self, example_ops):
        T, A1, A2 = example_ops
        assert dist_subspace(T, [A1, A2], seed=1).dist_min < 1.0 - 1e-3

    def test_unchecked_hypothesis_is_not_guaranteed(self):
        T = Operator.from_rows(np.diag([1.0, -1.0]), "linf")
        report = dist_subspace(T, [Operator.from_rows(np.eye(2), "linf")], check_hypothesis=False)
        assert not report.formula_guaranteed
        assert report.hypothesis_grid == []
        assert report.dist_min == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("basis", [[], "dependent"])
    def test_dependent_basis(self, example_ops, basis):
        T, A1, _ = example_ops
        if basis == "dependent":
            basis = [A1, 2.0 * A1]
        with pytest.raises(DependentBasisError):
            dist_subspace(T, basis)

    def test_sup_formula_on_the_example(self, example_ops):
        T, A1, _ = example_ops
        assert dist_sup_formula(T, A1, seed=3) == pytest.approx(1.0, abs=2e-3)


class TestCounterexample:
    def test_report_holds(self):
        report = counterexample_report()
        assert report.holds
        assert report.norm_T_exact == "1"
        assert report.outside_span
        assert report.ortho_A1 and not report.ortho_A2
        assert report.lhs < 1.0 - 1e-3
        assert report.rhs == 1.0
        assert report.witness_x == [1.0, 0.0, 0.0]
        assert "holds" in report.table()

    def test_gap_must_match(self):
        report = counterexample_report()
        with pytest.raises(ValueError):
            CounterexampleReport(**{**report.__dict__, "strict_gap": report.strict_gap + 0.1})


class TestEuclideanExperiment:
    def test_euclidean_attainment_sets_are_subspace_spheres(self):
        summary = euclidean_experiment(Space.lp(3, 2), trials=5, seed=1)
        assert summary.subspace_rate == 1.0
        assert summary.antipodal_rate == 1.0
        assert summary.violators == []
        assert not summary.fixture_injected

    def test_max_norm_fixture_is_a_violator(self):
        summary = euclidean_experiment(Space.linf(2), trials=2, seed=1)
        assert summary.fixture_injected
        assert 0 in summary.violators

    def test_trial_zero_on_max_norm_is_the_four_point_operator(self):
        T, _ = experiment_operator(Space.linf(2), seed=5, trial=0)
        assert np.array_equal(T.matrix, four_point_operator().matrix)
        U, _ = experiment_operator(Space.linf(2), seed=5, trial=1)
        assert not np.array_equal(U.matrix, T.matrix)

    def test_pointwise_counts(self):
        summary = euclidean_experiment(Space.lp(2, 2), trials=3, seed=2, pointwise=True)
        assert summary.pointwise_orthogonal == summary.pointwise_witnessed

    @pytest.mark.parametrize("dim,trials", [(5, 1), (3, 0)])
    def test_argument_ranges(self, dim, trials):
        with pytest.raises(ValueError):
            euclidean_experiment(Space.lp(dim, 2), trials=trials, seed=0)
