"""
Best approximation of an operator in a subspace: distances by direct convex
minimization and by the semi-inner-product sup-formula, the counterexample
to the Kolmogorov-type characterization in Hilbert spaces, and the
attainment-structure experiment that singles out Euclidean spaces.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import sympy
from scipy.optimize import minimize

from config import settings
from geometry import Space, ZeroVectorError, make_rng
from operators import EmptyAttainmentError, Operator, attainment_sample, op_norm

from .linesearch import convex_line_min
from .orthogonality import bj_op, witness_search
from .retrieval import operator_sup

logger = logging.getLogger(__name__)


class DependentBasisError(ValueError):
    """Raised when the operators spanning a subspace are linearly dependent."""

    pass


@dataclass(frozen=True)
class HypothesisPoint:
    """Attainment-structure check of M_{T + lam A0} at one grid value."""

    lam: float
    antipodal_ok: bool


@dataclass(frozen=True)
class DistanceReport:
    """
    dist(T, span basis) computed twice: by minimizing c -> ||T - sum c_i B_i||
    and by the sup-formula at the minimizer A0 = sum c_i B_i.
    """

    dist_min: float
    dist_sup: float
    coefficients: List[float]
    norm_T: float
    tol: float
    lambda0: Optional[float] = None  # single-operator basis: T + lambda0 A is the best approximation residual
    formula_guaranteed: bool = True
    hypothesis_grid: List[HypothesisPoint] = field(default_factory=list)

    def __post_init__(self):
        if self.dist_min < 0.0:
            raise ValueError(f"distance must be nonnegative, got {self.dist_min}")
        if self.dist_min > self.norm_T + self.tol:
            raise ValueError(f"distance {self.dist_min} exceeds ||T|| = {self.norm_T}")

    @property
    def agreement(self) -> float:
        return abs(self.dist_min - self.dist_sup)


@dataclass(frozen=True)
class CounterexampleReport:
    """Numeric and exact checks on the three-operator counterexample in Euclidean R^3."""

    norm_T: float
    norm_T_exact: str
    attainment_exact: List[List[str]]
    attainment_ok: bool
    ortho_A1: bool
    ortho_A2: bool
    outside_span: bool
    lhs: float
    rhs: float
    strict_gap: float
    coefficients: List[float]
    witness_x: List[float]
    witness_y: List[float]

    def __post_init__(self):
        if abs(self.strict_gap - (self.rhs - self.lhs)) > 1e-12:
            raise ValueError("strict_gap must equal rhs - lhs")

    @property
    def holds(self) -> bool:
        return (
            self.attainment_ok
            and self.ortho_A1
            and not self.ortho_A2
            and self.outside_span
            and self.strict_gap > 0.0
        )

    def table(self) -> str:
        rows = [
            ("||T||", f"{self.norm_T:.12f}", f"exact {self.norm_T_exact}"),
            ("M_T", "{+-(1,0,0)}" if self.attainment_ok else "MISMATCH", f"exact {self.attainment_exact}"),
            ("T _|_B A1", str(self.ortho_A1), "expected True"),
            ("T _|_B A2", str(self.ortho_A2), "expected False"),
            ("T not in span{A1,A2}", str(self.outside_span), "rational rank 3"),
            ("dist(T, Z)", f"{self.lhs:.9f}", f"A0 = {self.coefficients[0]:+.9f} A1 {self.coefficients[1]:+.9f} A2"),
            ("sup with y _|_ Bx", f"{self.rhs:.9f}", "x = y = (1,0,0), B = A1"),
            ("gap", f"{self.strict_gap:.9f}", "holds" if self.holds else "FAILS"),
        ]
        width = max(len(r[0]) for r in rows)
        return "\n".join(f"{name:<{width}}  {value:<20}  {note}" for name, value, note in rows)


@dataclass(frozen=True)
class EuclideanExperimentSummary:
    """Tallies of attainment structure over random operators on one space."""

    space: str
    dim: int
    trials: int
    antipodal_ok: int
    subspace_sphere: int
    violators: List[int]
    fixture_injected: bool
    pointwise_pairs: int = 0
    pointwise_orthogonal: int = 0
    pointwise_witnessed: int = 0

    def __post_init__(self):
        if not 0 <= self.antipodal_ok <= self.trials or not 0 <= self.subspace_sphere <= self.trials:
            raise ValueError("tallies must lie between 0 and the number of trials")

    @property
    def antipodal_rate(self) -> float:
        return self.antipodal_ok / self.trials

    @property
    def subspace_rate(self) -> float:
        return self.subspace_sphere / self.trials


# ---------------------------------------------------------------------------
# Distances
# ---------------------------------------------------------------------------


def line_min(T: Operator, A: Operator) -> Tuple[float, float]:
    """(lambda0, ||T + lambda0 A||) minimizing the convex map lambda -> ||T + lambda A||."""
    T.check_compatible(A)
    if A.is_zero():
        raise ZeroVectorError("line minimization needs A != 0")
    return convex_line_min(lambda lam: op_norm(T.plus(A, lam)))


def _combination(basis: Sequence[Operator], coeffs: np.ndarray) -> Operator:
    first = basis[0]
    matrix = sum(c * B.matrix for c, B in zip(coeffs, basis))
    return Operator(matrix, first.domain, first.codomain)


def _check_basis(T: Operator, basis: Sequence[Operator]) -> None:
    if not basis:
        raise DependentBasisError("basis must be nonempty")
    for B in basis:
        T.check_compatible(B)
    stacked = np.array([B.matrix.reshape(-1) for B in basis])
    if np.linalg.matrix_rank(stacked) < len(basis):
        raise DependentBasisError(f"{len(basis)} basis operators span a space of lower dimension")


def _coordinate_descent(objective, size: int) -> Tuple[np.ndarray, float]:
    """
    Cyclic coordinate line searches, a pattern move along each cycle's total
    displacement, and a Nelder-Mead polish; repeated until a round improves
    by less than DESCENT_CYCLE_TOL.
    """
    c = np.zeros(size)
    value = objective(c)
    for cycle in range(settings.DESCENT_MAX_CYCLES):
        start_c, start_value = c.copy(), value
        for i in range(size):
            e = np.eye(size)[i]
            t, v = convex_line_min(lambda s: objective(c + s * e), xatol=settings.LINE_XATOL)
            if v < value:
                c, value = c + t * e, v
        d = c - start_c
        if np.any(d):
            t, v = convex_line_min(lambda s: objective(c + s * d))
            if v < value:
                c, value = c + t * d, v
        if size > 1:
            res = minimize(
                objective,
                c,
                method="Nelder-Mead",
                options={"xatol": 1e-12, "fatol": settings.DESCENT_RTOL * 1e-6, "maxiter": 400 * size},
            )
            if res.fun < value:
                c, value = np.asarray(res.x, dtype=float), float(res.fun)
        if start_value - value < settings.DESCENT_CYCLE_TOL:
            logger.debug(f"descent converged after {cycle + 1} rounds at {value:.12g}")
            break
    return c, value


def dist_sup_formula(T: Operator, A: Operator, seed: Optional[int] = None) -> float:
    """
    sup{[Tx, y] : x, y unit, [Ax, y] = 0}.

    Euclidean codomain: sup over x of ||Tx - <Tx, u> u||, u = Ax / ||Ax||.
    Otherwise: sup over x of dist(Tx, span{Ax}) (the dual form of the same
    constrained sup). Ax = 0 leaves y unconstrained.
    """
    return operator_sup(T, A, "eq", seed=seed).value


def attainment_hypothesis_grid(
    T: Operator,
    A: Operator,
    center: float,
    points: Optional[int] = None,
    half_width: Optional[float] = None,
) -> List[HypothesisPoint]:
    """Antipodal structure of M_{T + lam A} for lam on an even grid around ``center``."""
    points = settings.HYPOTHESIS_GRID_POINTS if points is None else points
    half_width = settings.HYPOTHESIS_GRID_HALF_WIDTH if half_width is None else half_width
    grid = []
    for lam in np.linspace(center - half_width, center + half_width, points):
        S = T.plus(A, float(lam))
        if S.is_zero():
            grid.append(HypothesisPoint(lam=float(lam), antipodal_ok=True))
            continue
        try:
            ok = attainment_sample(S).antipodal_ok
        except EmptyAttainmentError:
            logger.warning(f"empty attainment sample at lambda={lam:.6g}; counted as a hypothesis failure")
            ok = False
        grid.append(HypothesisPoint(lam=float(lam), antipodal_ok=ok))
    return grid


def dist_subspace(
    T: Operator,
    basis: Sequence[Operator],
    check_hypothesis: bool = True,
    seed: Optional[int] = None,
) -> DistanceReport:
    """
    dist(T, span basis) with its best approximation A0 and the sup-formula at A0.

    Args:
        T: operator to approximate.
        basis: linearly independent operators between the same spaces.
        check_hypothesis: certify the attainment hypothesis of the sup-formula
            on a grid of T + lam A0 around lam = -1 (skipped for L2 -> L2,
            where it always holds).

    Raises:
        DependentBasisError: empty or dependent basis.
    """
    _check_basis(T, basis)
    norm_T = op_norm(T)

    def objective(c: np.ndarray) -> float:
        return op_norm(T - _combination(basis, np.asarray(c, dtype=float)))

    if len(basis) == 1:
        lam, value = line_min(T, basis[0])
        coeffs = np.array([-lam])
    else:
        coeffs, value = _coordinate_descent(objective, len(basis))
    value = min(value, norm_T)
    A0 = _combination(basis, coeffs)

    hilbert = T.domain.is_euclidean and T.codomain.is_euclidean
    grid: List[HypothesisPoint] = []
    guaranteed = hilbert
    if not hilbert and check_hypothesis:
        direction = A0 if not A0.is_zero() else basis[0]
        center = -1.0 if not A0.is_zero() else 0.0
        grid = attainment_hypothesis_grid(T, direction, center)
        guaranteed = all(p.antipodal_ok for p in grid)
        if not guaranteed:
            logger.warning("attainment hypothesis fails on the grid; sup-formula not guaranteed")

    if A0.is_zero():
        dist_sup = op_norm(T)
    else:
        dist_sup = dist_sup_formula(T, A0, seed=seed)

    logger.debug(f"dist: min {value:.12g}, sup-formula {dist_sup:.12g}, coefficients {coeffs}")
    return DistanceReport(
        dist_min=float(value),
        dist_sup=float(dist_sup),
        coefficients=[float(c) for c in coeffs],
        norm_T=norm_T,
        tol=settings.RETRIEVAL_TOL * max(norm_T, 1.0),
        lambda0=float(-coeffs[0]) if len(basis) == 1 else None,
        formula_guaranteed=guaranteed,
        hypothesis_grid=grid,
    )


# ---------------------------------------------------------------------------
# Fixed examples
# ---------------------------------------------------------------------------

# images of e1, e2, e3 (matrix columns)
_EXAMPLE_T = [[1, 0, 0], [0, 0, 0], [0, 0, 0]]
_EXAMPLE_A1 = [[0, 1, 0], [1, 0, 0], [0, 1, 0]]
_EXAMPLE_A2 = [[1, 0, 0], [0, 1, 0], [1, 0, 0]]


def example_operators() -> Tuple[Operator, Operator, Operator]:
    """T, A1, A2 on Euclidean R^3, given by the images of the standard basis."""
    return (
        Operator.from_images(_EXAMPLE_T, "lp:2"),
        Operator.from_images(_EXAMPLE_A1, "lp:2"),
        Operator.from_images(_EXAMPLE_A2, "lp:2"),
    )


def remark_operator() -> Operator:
    """T(a, b) = (0, a) on Linf^2; M_T = {+-(1, b) : |b| <= 1}."""
    return Operator.from_rows([[0, 0], [1, 0]], "linf")


def four_point_operator(dim: int = 2) -> Operator:
    """[[.5, .5], [.5, -.5]] on Linf^dim (zero-padded); M_T has four pieces."""
    m = np.zeros((dim, dim))
    m[:2, :2] = [[0.5, 0.5], [0.5, -0.5]]
    return Operator(m, Space.linf(dim), Space.linf(dim))


def _exact_checks() -> Tuple[str, List[List[str]], bool]:
    """||T||, M_T and T notin span{A1, A2} in exact rational arithmetic."""
    T = sympy.Matrix(_EXAMPLE_T).T
    A1 = sympy.Matrix(_EXAMPLE_A1).T
    A2 = sympy.Matrix(_EXAMPLE_A2).T
    gram = T.T * T
    eigen = gram.eigenvals()
    top = max(eigen)
    norm = sympy.sqrt(top)
    attainers = []
    for value, _, vectors in gram.eigenvects():
        if value == top:
            for v in vectors:
                u = v / v.norm()
                attainers.extend([[str(c) for c in u], [str(-c) for c in u]])
    stacked = sympy.Matrix([list(M) for M in (T, A1, A2)])
    outside = stacked.rank() == 3
    return str(norm), attainers, outside


def counterexample_report() -> CounterexampleReport:
    """
    dist(T, span{A1, A2}) < sup{|<Tx, y>| : x, y unit, B in span{A1, A2}, y _|_ Bx}.

    The right side is at least |<Te1, e1>| = 1 with B = A1 since A1 e1 = e2 _|_ e1;
    it is at most ||T|| = 1. The left side is below 1 because T is not
    orthogonal to A2.
    """
    T, A1, A2 = example_operators()
    norm_T = op_norm(T)
    norm_exact, attainers, outside = _exact_checks()

    s = attainment_sample(T)
    e1 = np.eye(3)[0]
    near = np.minimum(np.linalg.norm(s.points - e1, axis=1), np.linalg.norm(s.points + e1, axis=1))
    attainment_ok = bool(np.all(near <= 1e-4))

    ortho_A1 = bj_op(T, A1).verdict is True
    ortho_A2 = bj_op(T, A2).verdict is True

    dist = dist_subspace(T, [A1, A2])
    x = y = e1
    if abs(float(y @ (A1.matrix @ x))) > 1e-15:
        raise AssertionError("A1 e1 must be orthogonal to e1")
    rhs = abs(float((T.matrix @ x) @ y))
    lhs = dist.dist_min

    report = CounterexampleReport(
        norm_T=norm_T,
        norm_T_exact=norm_exact,
        attainment_exact=attainers,
        attainment_ok=attainment_ok,
        ortho_A1=ortho_A1,
        ortho_A2=ortho_A2,
        outside_span=outside,
        lhs=lhs,
        rhs=rhs,
        strict_gap=rhs - lhs,
        coefficients=dist.coefficients,
        witness_x=x.tolist(),
        witness_y=y.tolist(),
    )
    logger.info(f"counterexample: lhs {lhs:.9f}, rhs {rhs:.9f}, gap {report.strict_gap:.9f}")
    return report


# ---------------------------------------------------------------------------
# Euclidean characterization experiment
# ---------------------------------------------------------------------------


def experiment_operator(space: Space, seed: int, trial: int) -> Tuple[Operator, np.random.Generator]:
    """Random operator of one experiment trial (the four-point operator at trial 0 on Linf) and its generator."""
    rng = make_rng(np.random.SeedSequence([seed, trial]))
    if space.is_linf and trial == 0:
        return four_point_operator(space.dim), rng
    return Operator(rng.standard_normal((space.dim, space.dim)), space, space), rng


def euclidean_experiment(
    space: Space,
    trials: int,
    seed: int,
    pointwise: bool = False,
) -> EuclideanExperimentSummary:
    """
    Tally antipodal_ok and is_subspace_sphere of M_T over random operators on ``space``.

    On Euclidean spaces both hold for every T. Linf spaces get the four-point
    operator as trial 0, a guaranteed violator. With ``pointwise`` each trial
    also draws A, replaces T by T + lambda0 A (so T is orthogonal to A) and
    counts whether some x in M_T has Tx orthogonal to Ax.
    """
    if not 2 <= space.dim <= 4:
        raise ValueError(f"experiment runs in dimensions 2-4, got {space.dim}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")

    antipodal = subspace = 0
    violators: List[int] = []
    orthogonal = witnessed = 0
    injected = space.is_linf

    for trial in range(trials):
        T, rng = experiment_operator(space, seed, trial)
        s = attainment_sample(T, seed=int(rng.integers(2**32)))
        antipodal += int(s.antipodal_ok)
        subspace += int(s.is_subspace_sphere)
        if not (s.antipodal_ok and s.is_subspace_sphere):
            violators.append(trial)

        if pointwise:
            A = Operator(rng.standard_normal((space.dim, space.dim)), space, space)
            lam, _ = line_min(T, A)
            T0 = T.plus(A, lam)
            if bj_op(T0, A).verdict:
                orthogonal += 1
                if witness_search(T0, A, attainment_sample(T0, seed=int(rng.integers(2**32)))) is not None:
                    witnessed += 1

    if not space.is_euclidean and not violators:
        logger.info(f"no violator in {trials} trials on {space.descriptor}^{space.dim}")
    return EuclideanExperimentSummary(
        space=space.descriptor,
        dim=space.dim,
        trials=trials,
        antipodal_ok=antipodal,
        subspace_sphere=subspace,
        violators=violators,
        fixture_injected=injected,
        pointwise_pairs=trials if pointwise else 0,
        pointwise_orthogonal=orthogonal,
        pointwise_witnessed=witnessed,
    )
