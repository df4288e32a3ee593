"""
Theorem suites.

Every runner takes (config, trial), builds its own deterministic inputs and
returns a TrialResult: the outcome that goes into the report and the
serialized inputs that go into a failure record.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from base_reports import CounterexampleRecord, OperatorFile, SuiteConfig, TrialOutcome, TrialStatus
from config import settings
from geometry import Space, Vector, direction_class, one_sided_derivatives, sip_eval
from operators import antipodal_structure, attainment_sample, op_norm_estimate
from theorems import (
    HypothesisViolationError,
    InconclusiveError,
    bj_op,
    counterexample_report,
    dist_subspace,
    example_operators,
    experiment_operator,
    norm_retrieval_functional,
    norm_retrieval_op,
    norm_retrieval_op_eps,
    quadratic_witness,
    remark_operator,
    witness_search,
)

from .instances import gen_instance
from .oracles import grid_descent_oracle, hausdorff, minus_oracle, operator_line_oracle, plus_oracle, remark_segments

logger = logging.getLogger(__name__)

# Acceptance thresholds of the fixed examples
COUNTEREXAMPLE_NORM_TOL = 1e-9
COUNTEREXAMPLE_LHS_MARGIN = 1e-3
COUNTEREXAMPLE_RHS_MARGIN = 1e-6
REMARK_HAUSDORFF_TOL = 0.05
SUBSPACE_ORACLE_TOL = 1e-4
SUBSPACE_ORACLE_POINTS = 101
SUBSPACE_ORACLE_POINTS_SAMPLED = 21
LINE_ORACLE_POINTS = 2001
LINE_ORACLE_POINTS_SAMPLED = 201


@dataclass
class TrialResult:
    """One trial: the reported outcome plus the inputs needed to replay it."""

    outcome: TrialOutcome
    inputs: Dict[str, Any] = field(default_factory=dict)


def _result(
    trial: int,
    status: TrialStatus,
    dim: Optional[int] = None,
    metrics: Optional[Dict[str, Any]] = None,
    message: Optional[str] = None,
    inputs: Optional[Dict[str, Any]] = None,
) -> TrialResult:
    outcome = TrialOutcome(trial=trial, status=status, dim=dim, metrics=metrics or {}, message=message)
    return TrialResult(outcome=outcome, inputs=inputs or {})


def _tol(config: SuiteConfig, default: float) -> float:
    return default if config.tol is None else config.tol


def _sample_seed(config: SuiteConfig, trial: int) -> int:
    """Attainment-sampling seed of one trial, independent of the instance stream."""
    return int(np.random.SeedSequence([config.seed, trial, 1]).generate_state(1)[0])


def _hilbert(config: SuiteConfig) -> SuiteConfig:
    if config.domain == "lp:2" and config.codomain_descriptor == "lp:2":
        return config
    logger.info(f"{config.suite} runs on lp:2 -> lp:2; ignoring {config.domain} -> {config.codomain_descriptor}")
    return config.model_copy(update={"domain": "lp:2", "codomain": None})


def _status(ok: bool) -> TrialStatus:
    return "pass" if ok else "fail"


# ---------------------------------------------------------------------------
# Attainment and orthogonality
# ---------------------------------------------------------------------------


def run_connected_attainment(config: SuiteConfig, trial: int) -> TrialResult:
    """
    T orthogonal to A iff some x in M_T has Tx orthogonal to Ax, whenever
    M_T = D u (-D) with D connected. Even trials use orthogonalized pairs.

    Without the antipodal structure only the direction "witness implies
    orthogonal" is asserted.
    """
    kind = "orthogonal-operator-pair" if trial % 2 == 0 else "operator-pair"
    inst = gen_instance(kind, config, trial)
    inputs = inst.inputs()
    T, A = inst.T, inst.A

    cert = bj_op(T, A, tol=_tol(config, settings.BJ_OP_TOL))
    if cert.verdict is None:
        message = "operator-norm estimates cannot decide orthogonality"
        return _result(trial, "inconclusive", inst.dim, {"status": cert.status}, message, inputs)

    s = attainment_sample(T, budget=config.budget, seed=_sample_seed(config, trial))
    antipodal = antipodal_structure(s)
    witness = witness_search(T, A, s)
    metrics = {
        "verdict": cert.verdict,
        "antipodal_ok": antipodal,
        "attainment_kind": s.kind,
        "components": s.component_count,
        "witness": None if witness is None else witness.to_list(),
        "lambda_star": cert.lambda_star,
    }

    if witness is not None and not cert.verdict:
        return _result(trial, "fail", inst.dim, metrics, "pointwise witness found but T is not orthogonal to A", inputs)
    if antipodal and cert.verdict and witness is None:
        return _result(trial, "fail", inst.dim, metrics, "T orthogonal to A but no x in M_T with Tx orthogonal to Ax", inputs)
    message = None if antipodal else "attainment set not of the form D u -D; only the witness direction checked"
    return _result(trial, "pass", inst.dim, metrics, message, inputs)


def run_hilbert_bhatia_semrl(config: SuiteConfig, trial: int) -> TrialResult:
    """
    L2 -> L2: T orthogonal to A iff the quadratic form of sym(T^T A) on the
    top singular subspace takes both signs (x in M_T with <Tx, Ax> = 0).
    """
    config = _hilbert(config)
    kind = "orthogonal-operator-pair" if trial % 2 == 0 else "operator-pair"
    inst = gen_instance(kind, config, trial)
    inputs = inst.inputs()
    T, A = inst.T, inst.A
    tol = _tol(config, settings.BJ_OP_TOL)

    cert = bj_op(T, A, tol=tol)
    s = attainment_sample(T, budget=config.budget)
    basis = s.subspace_basis
    sym = 0.5 * (T.matrix.T @ A.matrix + A.matrix.T @ T.matrix)
    eigs = np.linalg.eigvalsh(basis @ sym @ basis.T)
    witness = quadratic_witness(T, A, basis, qtol=tol * cert.norm_T * cert.norm_A)

    metrics = {
        "verdict": cert.verdict,
        "witness_exists": witness is not None,
        "top_multiplicity": int(basis.shape[0]),
        "form_min": float(eigs.min()),
        "form_max": float(eigs.max()),
    }
    if cert.verdict is None:
        return _result(trial, "inconclusive", inst.dim, metrics, "certificate inconclusive", inputs)
    agree = cert.verdict == (witness is not None)
    message = None if agree else "orthogonality verdict and quadratic-form witness disagree"
    return _result(trial, _status(agree), inst.dim, metrics, message, inputs)


def run_sip_plus(config: SuiteConfig, trial: int) -> TrialResult:
    """
    y in x+ (x-) by the derivative signs agrees with the lambda-grid oracle.

    Trials cycle over the norms of SIP_SUITE_NORMS and the configured
    dimensions; x is unit-normalized so both tolerances are absolute. The
    canonical semi-inner product must lie between the one-sided derivatives
    and every y must fall in x+ or x-.
    """
    norms = settings.get_sip_norms()
    norm = norms[(trial // len(config.dims)) % len(norms)]
    inst = gen_instance("vector-pair", config.model_copy(update={"domain": norm, "codomain": None}), trial)
    x = Vector(inst.x.coords / inst.x.norm(), inst.x.space)
    y = inst.y
    inputs = inst.inputs()
    tol = _tol(config, settings.DERIV_TOL)

    cls = direction_class(x, y, tol=tol)
    d = one_sided_derivatives(x, y)
    grid_plus = plus_oracle(x, y, tol=tol)
    grid_minus = minus_oracle(x, y, tol=tol)
    sip = sip_eval(y, x)
    metrics = {
        "space": norm,
        "left": d.left,
        "right": d.right,
        "in_plus": cls.in_plus,
        "in_minus": cls.in_minus,
        "grid_plus": grid_plus,
        "grid_minus": grid_minus,
        "sip": sip,
    }

    errors = []
    if not (cls.in_plus or cls.in_minus):
        errors.append("y in neither x+ nor x-")
    if not d.left - 1e-9 <= sip <= d.right + 1e-9:
        errors.append("semi-inner product outside the derivative interval")

    # a derivative this close to 0 moves the norm by less than the grid can see
    resolution = np.sqrt(tol) * max(y.norm(), 1.0)
    blind = (abs(d.right) < resolution and cls.in_plus != grid_plus) or (
        abs(d.left) < resolution and cls.in_minus != grid_minus
    )
    if cls.in_plus != grid_plus or cls.in_minus != grid_minus:
        if blind and not errors:
            return _result(trial, "inconclusive", inst.dim, metrics, "derivative below grid resolution", inputs)
        errors.append("derivative classification disagrees with the grid oracle")
    return _result(trial, _status(not errors), inst.dim, metrics, "; ".join(errors) or None, inputs)


# ---------------------------------------------------------------------------
# Norm retrieval
# ---------------------------------------------------------------------------


def _identities_ok(report, values: Dict[str, Optional[float]], tol: Optional[float]) -> bool:
    if tol is None:
        return report.holds
    return all(abs(v - report.norm) <= tol for v in values.values() if v is not None)


def run_norm_retrieval_op(config: SuiteConfig, trial: int) -> TrialResult:
    """||T|| = sup over [Ax, y] >= 0 = sup over [Ax, y] <= 0 on constructed orthogonal pairs."""
    inst = gen_instance("orthogonal-operator-pair", config, trial)
    inputs = inst.inputs()
    try:
        report = norm_retrieval_op(inst.T, inst.A, seed=_sample_seed(config, trial))
    except InconclusiveError as e:
        return _result(trial, "inconclusive", inst.dim, {}, str(e), inputs)
    except HypothesisViolationError as e:
        return _result(trial, "fail", inst.dim, {}, f"constructed pair not orthogonal: {e}", inputs)

    values = {"sup_pos": report.sup_pos, "sup_neg": report.sup_neg}
    ok = _identities_ok(report, values, config.tol)
    metrics = {"norm": report.norm, "tol": report.tol, **values}
    return _result(trial, _status(ok), inst.dim, metrics, None if ok else "sup differs from ||T||", inputs)


def run_norm_retrieval_op_eps(config: SuiteConfig, trial: int) -> TrialResult:
    """||T|| = max{l1(eps), l2(eps)} = max{l1(eps), l3(eps)} for every configured eps."""
    inst = gen_instance("orthogonal-operator-pair", config, trial)
    inputs = inst.inputs()
    metrics: Dict[str, Any] = {}
    failed = []
    band: List[Tuple[float, float]] = []
    for eps in config.eps_values:
        try:
            report = norm_retrieval_op_eps(inst.T, inst.A, eps, check=not metrics, seed=_sample_seed(config, trial))
        except InconclusiveError as e:
            return _result(trial, "inconclusive", inst.dim, metrics, str(e), inputs)
        except HypothesisViolationError as e:
            return _result(trial, "fail", inst.dim, metrics, f"constructed pair not orthogonal: {e}", inputs)
        l1 = report.l1_eps
        values = {
            "max_l1_l2": None if report.l2_eps is None else max(l1, report.l2_eps),
            "max_l1_l3": None if report.l3_eps is None else max(l1, report.l3_eps),
        }
        metrics[f"eps={eps:g}"] = {"norm": report.norm, "l1": l1, "l2": report.l2_eps, "l3": report.l3_eps}
        band.append((eps, l1))
        if not _identities_ok(report, values, config.tol):
            failed.append(f"identity fails at eps {eps:g}")

    # the band constraint only loosens as eps grows
    band.sort()
    slack = _tol(config, report.tol)
    monotone = all(later >= earlier - slack for (_, earlier), (_, later) in zip(band, band[1:]))
    metrics["l1_monotone"] = monotone
    if not monotone:
        failed.append("l1(eps) decreases in eps")
    message = "; ".join(failed) or None
    return _result(trial, _status(not failed), inst.dim, metrics, message, inputs)


def run_norm_retrieval_functional(config: SuiteConfig, trial: int) -> TrialResult:
    """||f|| = k1 = k2 for f orthogonal to g when the dual is strictly convex."""
    inst = gen_instance("orthogonal-functional-pair", config, trial)
    inputs = inst.inputs()
    try:
        report = norm_retrieval_functional(inst.f, inst.g, seed=_sample_seed(config, trial))
    except HypothesisViolationError as e:
        return _result(trial, "fail", inst.dim, {}, f"constructed pair not orthogonal: {e}", inputs)

    values = {"k1": report.k1, "k2": report.k2} if report.exact_identity else {"max_l_k1": max(report.l_eps, report.k1)}
    ok = _identities_ok(report, values, config.tol)
    metrics = {
        "norm": report.norm,
        "exact_identity": report.exact_identity,
        "k1": report.k1,
        "k2": report.k2,
        "l_eps": report.l_eps,
    }
    message = None if report.exact_identity else f"dual not strictly convex; eps-identity at eps={report.eps:g}"
    if not ok:
        message = "sup differs from ||f||"
    return _result(trial, _status(ok), inst.dim, metrics, message, inputs)


def run_norm_retrieval_functional_eps(config: SuiteConfig, trial: int) -> TrialResult:
    """||f|| = max{l(eps), k1} for every configured eps, in any normed space."""
    inst = gen_instance("orthogonal-functional-pair", config, trial)
    inputs = inst.inputs()
    metrics: Dict[str, Any] = {}
    failed = []
    for eps in config.eps_values:
        try:
            report = norm_retrieval_functional(inst.f, inst.g, eps=eps, check=not metrics, seed=_sample_seed(config, trial))
        except HypothesisViolationError as e:
            return _result(trial, "fail", inst.dim, metrics, f"constructed pair not orthogonal: {e}", inputs)
        value = max(report.l_eps, report.k1)
        metrics[f"eps={eps:g}"] = {"norm": report.norm, "k1": report.k1, "l_eps": report.l_eps}
        ok = abs(value - report.norm) <= (report.tol if config.tol is None else config.tol)
        if not ok:
            failed.append(f"{eps:g}")
    message = f"identity fails at eps {', '.join(failed)}" if failed else None
    return _result(trial, _status(not failed), inst.dim, metrics, message, inputs)


# ---------------------------------------------------------------------------
# Best approximation
# ---------------------------------------------------------------------------


def run_dist_span(config: SuiteConfig, trial: int) -> TrialResult:
    """
    dist(T, span{A}) by line minimization against a lambda grid, the
    sup-formula at the minimizer, and T + lambda0 A orthogonal to A.
    """
    inst = gen_instance("operator-pair", config, trial)
    inputs = inst.inputs()
    T, A = inst.T, inst.A
    report = dist_subspace(T, [A], seed=_sample_seed(config, trial))
    tol = _tol(config, report.tol)
    points = LINE_ORACLE_POINTS if op_norm_estimate(T).exact else LINE_ORACLE_POINTS_SAMPLED
    _, grid_min = operator_line_oracle(T, A, points=points)
    metrics = {
        "dist_min": report.dist_min,
        "dist_sup": report.dist_sup,
        "grid_min": grid_min,
        "lambda0": report.lambda0,
        "formula_guaranteed": report.formula_guaranteed,
    }

    errors = []
    slack = 1e-9 * max(report.norm_T, 1.0)
    if report.dist_min > grid_min + slack:
        errors.append("line minimum above the grid minimum")
    if report.dist_sup > report.dist_min + tol:
        errors.append("sup-formula exceeds the distance")
    if report.formula_guaranteed and report.agreement > tol:
        errors.append("sup-formula disagrees with the distance")

    cert = bj_op(T.plus(A, report.lambda0), A)
    metrics["best_approximation_orthogonal"] = cert.verdict
    if cert.verdict is False:
        errors.append("T + lambda0 A not orthogonal to A")
    if errors:
        return _result(trial, "fail", inst.dim, metrics, "; ".join(errors), inputs)
    if cert.verdict is None:
        return _result(trial, "inconclusive", inst.dim, metrics, "orthogonality of the residual undecided", inputs)
    message = None if report.formula_guaranteed else "attainment hypothesis fails; sup-formula only bounded"
    return _result(trial, "pass", inst.dim, metrics, message, inputs)


def run_dist_subspace(config: SuiteConfig, trial: int) -> TrialResult:
    """dist(T, span{A, B}) by coordinate descent against a grid-plus-descent oracle."""
    inst = gen_instance("operator-triple", config, trial)
    inputs = inst.inputs()
    T, basis = inst.T, [inst.A, inst.B]
    report = dist_subspace(T, basis, seed=_sample_seed(config, trial))
    single = dist_subspace(T, basis[:1], check_hypothesis=False, seed=_sample_seed(config, trial))

    exact = op_norm_estimate(T).exact
    points = SUBSPACE_ORACLE_POINTS if exact else SUBSPACE_ORACLE_POINTS_SAMPLED
    _, oracle = grid_descent_oracle(T, basis, points=points)
    tol = _tol(config, SUBSPACE_ORACLE_TOL * max(report.norm_T, 1.0))
    metrics = {
        "dist_min": report.dist_min,
        "dist_sup": report.dist_sup,
        "oracle": oracle,
        "dist_single": single.dist_min,
        "coefficients": report.coefficients,
        "formula_guaranteed": report.formula_guaranteed,
    }

    errors = []
    if abs(report.dist_min - oracle) > tol:
        errors.append("descent disagrees with the grid oracle")
    if report.dist_min > single.dist_min + tol:
        errors.append("distance grew when the subspace grew")
    if report.dist_sup > report.dist_min + report.tol:
        errors.append("sup-formula exceeds the distance")
    if report.formula_guaranteed and report.agreement > report.tol:
        errors.append("sup-formula disagrees with the distance")
    return _result(trial, _status(not errors), inst.dim, metrics, "; ".join(errors) or None, inputs)


# ---------------------------------------------------------------------------
# Fixed examples and the characterization experiment
# ---------------------------------------------------------------------------


def run_euclidean_characterization(config: SuiteConfig, trial: int) -> TrialResult:
    """
    Euclidean spaces: every M_T is the unit sphere of a subspace. On Linf the
    four-point operator of trial 0 must violate the D u (-D) structure.
    """
    space = Space.from_descriptor(config.domain, config.dim_for(trial))
    T, rng = experiment_operator(space, config.seed, trial)
    inputs = {"T": OperatorFile.from_operator(T).model_dump(mode="json")}
    s = attainment_sample(T, budget=config.budget, seed=int(rng.integers(2**32)))
    antipodal = antipodal_structure(s)
    metrics = {
        "space": space.descriptor,
        "antipodal_ok": antipodal,
        "subspace_sphere": s.is_subspace_sphere,
        "attainment_kind": s.kind,
    }

    if space.is_euclidean:
        ok = antipodal and s.is_subspace_sphere
        return _result(trial, _status(ok), space.dim, metrics, None if ok else "M_T is not a subspace sphere", inputs)
    if space.is_linf and trial == 0:
        metrics["fixture"] = "four-point"
        message = "four-point operator violates the D u -D structure" if not antipodal else "four-point operator shows D u -D"
        return _result(trial, _status(not antipodal), space.dim, metrics, message, inputs)
    return _result(trial, "pass", space.dim, metrics, None, inputs)


def run_example_counterexample(config: SuiteConfig, trial: int) -> TrialResult:
    """The three-dimensional counterexample: dist(T, span{A1, A2}) strictly below the sup."""
    T, A1, A2 = example_operators()
    inputs = {name: OperatorFile.from_operator(op).model_dump(mode="json") for name, op in (("T", T), ("A1", A1), ("A2", A2))}
    report = counterexample_report()
    metrics = CounterexampleRecord.from_report(report).model_dump(mode="json")

    errors = []
    if not report.holds:
        errors.append("counterexample checks fail")
    if abs(report.norm_T - 1.0) > COUNTEREXAMPLE_NORM_TOL:
        errors.append("||T|| != 1")
    if report.lhs > 1.0 - COUNTEREXAMPLE_LHS_MARGIN:
        errors.append("distance not below 1")
    if report.rhs < 1.0 - COUNTEREXAMPLE_RHS_MARGIN:
        errors.append("sup below 1")
    return _result(trial, _status(not errors), 3, metrics, "; ".join(errors) or None, inputs)


def run_remark_linf_attainment(config: SuiteConfig, trial: int) -> TrialResult:
    """T(a, b) = (0, a) on Linf^2: ||T|| = 1 and M_T = {+-(1, b) : |b| <= 1}."""
    T = remark_operator()
    inputs = {"T": OperatorFile.from_operator(T).model_dump(mode="json")}
    est = op_norm_estimate(T)
    s = attainment_sample(T, budget=config.budget, seed=config.seed)
    distance = hausdorff(s.points, remark_segments())
    antipodal = antipodal_structure(s)
    metrics = {
        "norm": est.value,
        "method": est.method,
        "hausdorff": distance,
        "antipodal_ok": antipodal,
        "components": s.component_count,
        "sample_size": int(s.points.shape[0]),
    }

    errors = []
    if est.value != 1.0:
        errors.append("||T|| != 1")
    if distance >= _tol(config, REMARK_HAUSDORFF_TOL):
        errors.append("sample does not fill the two segments")
    if not antipodal:
        errors.append("antipodal structure missing")
    if s.component_count != 2:
        errors.append(f"{s.component_count} components instead of 2")
    return _result(trial, _status(not errors), 2, metrics, "; ".join(errors) or None, inputs)
