"""
Norm retrieval: recovering ||T|| (or ||f||) as a constrained supremum of
semi-inner-product values when T is orthogonal to A (f to g).

Suprema over all semi-inner products reduce to suprema over the extreme
supporting functionals (f -> f(y) is linear). Every unit dual vector
supports the unit ball at some unit y, so for fixed x the inner supremum
runs over the dual unit sphere:

* Hilbert codomain: y = gamma u + sqrt(1 - gamma^2) w with u = Ax / ||Ax||
  and the constraint confines gamma to an interval; the concave inner
  objective is maximized in closed form.
* other codomains, sign and band constraints: by duality
  sup{f(b) : ||f||* = 1, f(a) in C} = min over mu of ||b + mu a|| + eps |mu|,
  a convex problem in one variable (golden section, vectorized over x).
* other codomains, relaxed-membership constraints: joint sampling of (x, y)
  with objective rho'_+(y, Tx), the largest supporting-functional value at y.

The outer supremum over x is sampled, refined on the sphere and polished
with Nelder-Mead.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Literal, Optional, Tuple

import numpy as np
from scipy.optimize import minimize

from config import settings
from geometry import (
    EpsilonRangeError,
    Functional,
    SpaceMismatchError,
    candidate_pool,
    derivative_arrays,
    dual_attainer_array,
    make_rng,
    refine_on_sphere,
    refine_on_spheres,
    relaxed_plus_mask,
    sphere_sample_array,
)
from operators import Operator, op_norm_estimate

from .orthogonality import HypothesisViolationError, bj_op, bj_vec

logger = logging.getLogger(__name__)

Constraint = Literal["pos", "neg", "eq", "band", "plus_eps", "minus_eps"]

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_GOLDEN_STEPS = 60


@dataclass(frozen=True)
class SupResult:
    """Constrained supremum with the maximizing x (and y where it is computed)."""

    value: float
    x: np.ndarray
    y: Optional[np.ndarray] = None


@dataclass(frozen=True)
class RetrievalReport:
    """
    Suprema of one retrieval theorem and the identities it asserts.

    ``norm`` is ||T|| or ||f||*; ``tol`` the absolute tolerance used both for
    the identities and for the bound every sup must respect.
    """

    norm: float
    tol: float
    sup_pos: Optional[float] = None
    sup_neg: Optional[float] = None
    l1_eps: Optional[float] = None
    l2_eps: Optional[float] = None
    l3_eps: Optional[float] = None
    k1: Optional[float] = None
    k2: Optional[float] = None
    l_eps: Optional[float] = None
    eps: Optional[float] = None
    exact_identity: bool = True
    identities: Dict[str, bool] = field(default_factory=dict)
    witness_x: Optional[np.ndarray] = None
    witness_y: Optional[np.ndarray] = None

    def __post_init__(self):
        for name in ("sup_pos", "sup_neg", "l1_eps", "l2_eps", "l3_eps", "k1", "k2", "l_eps"):
            value = getattr(self, name)
            if value is not None and value > self.norm + self.tol:
                raise ValueError(f"{name} = {value} exceeds the norm {self.norm} by more than {self.tol}")

    @property
    def holds(self) -> bool:
        return all(self.identities.values())


# ---------------------------------------------------------------------------
# Inner suprema over y
# ---------------------------------------------------------------------------


def _gamma_interval(constraint: Constraint, na: np.ndarray, eps: float) -> Tuple[np.ndarray, np.ndarray]:
    ones = np.ones_like(na)
    if constraint == "pos":
        return 0.0 * ones, ones
    if constraint == "neg":
        return -ones, 0.0 * ones
    if constraint == "eq":
        return 0.0 * ones, 0.0 * ones
    if constraint == "band":
        half = np.minimum(eps / np.where(na > 0, na, 1.0), 1.0)
        return -half, half
    if constraint == "plus_eps":
        return -min(eps, 1.0) * ones, ones
    return -ones, min(eps, 1.0) * ones


def _hilbert_inner(B: np.ndarray, AX: np.ndarray, constraint: Constraint, eps: float):
    """Closed-form inner sup for a Euclidean codomain; returns (values, gamma, beta, perp, u)."""
    nb = np.linalg.norm(B, axis=1)
    na = np.linalg.norm(AX, axis=1)
    u = AX / np.where(na > 0, na, 1.0)[:, None]
    beta = np.sum(B * u, axis=1)
    perp = np.sqrt(np.maximum(nb**2 - beta**2, 0.0))
    gstar = np.where(nb > 0, beta / np.where(nb > 0, nb, 1.0), 0.0)
    lo, hi = _gamma_interval(constraint, na, eps)
    gamma = np.clip(gstar, lo, hi)
    values = gamma * beta + np.sqrt(np.maximum(1.0 - gamma**2, 0.0)) * perp
    values = np.where(na > 0, values, nb)
    return values, gamma, beta, perp, u


def _hilbert_witness_y(b: np.ndarray, a: np.ndarray, constraint: Constraint, eps: float) -> np.ndarray:
    """A unit y attaining the closed-form inner sup at b = Tx, a = Ax."""
    if not np.any(a):
        return b / np.linalg.norm(b) if np.any(b) else np.eye(b.size)[0]
    _, gamma, beta, _, u = _hilbert_inner(b[None, :], a[None, :], constraint, eps)
    g, u = float(gamma[0]), u[0]
    w = b - float(beta[0]) * u
    if np.linalg.norm(w) < 1e-14:
        # any unit direction orthogonal to u
        k = int(np.abs(u).argmin())
        w = np.eye(b.size)[k] - u[k] * u
    w = w / np.linalg.norm(w)
    return g * u + math.sqrt(max(1.0 - g * g, 0.0)) * w


def _dual_inner(codomain, B: np.ndarray, AX: np.ndarray, constraint: Constraint, eps: float) -> np.ndarray:
    """min over mu in the constraint's half-line or line of ||b + mu a|| + eps_band |mu|, row-wise."""
    nb = np.asarray(codomain.norm(B), dtype=float)
    na = np.asarray(codomain.norm(AX), dtype=float)
    reach = 2.0 * nb / np.where(na > 0, na, 1.0)
    lo = np.where(constraint == "pos", 0.0, -reach)
    hi = np.where(constraint == "neg", 0.0, reach)
    penalty = eps if constraint == "band" else 0.0

    def h(mu: np.ndarray) -> np.ndarray:
        return np.asarray(codomain.norm(B + mu[:, None] * AX)) + penalty * np.abs(mu)

    a, b = lo.copy(), hi.copy()
    for _ in range(_GOLDEN_STEPS):
        c = b - _INV_PHI * (b - a)
        d = a + _INV_PHI * (b - a)
        shrink_right = h(c) < h(d)
        b = np.where(shrink_right, d, b)
        a = np.where(shrink_right, a, c)
    values = np.minimum(np.minimum(h(lo), h(hi)), h(0.5 * (a + b)))
    return np.where(na > 0, values, nb)


# ---------------------------------------------------------------------------
# Outer suprema over x
# ---------------------------------------------------------------------------


def _polish(objective, x0: np.ndarray, domain) -> Tuple[np.ndarray, float]:
    """Nelder-Mead on the scale-free objective z -> objective(z / ||z||)."""

    def neg(z: np.ndarray) -> float:
        if not np.any(z):
            return 0.0
        return -float(objective(domain.normalize(z)[None, :])[0])

    res = minimize(neg, x0, method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 400 * domain.dim})
    return domain.normalize(res.x), -float(res.fun)


def _sup_over_x(objective, T: Operator, rng: np.random.Generator, seeds: Optional[np.ndarray] = None) -> Tuple[np.ndarray, float]:
    domain = T.domain
    extra = [op_norm_estimate(T).maximizer[None, :]]
    if seeds is not None:
        extra.append(seeds)
    pool = np.vstack([candidate_pool(domain, settings.SUP_PAIRS, rng)] + extra)
    vals = objective(pool)
    keep = np.argsort(-vals, kind="stable")[: settings.SUP_KEEP]
    refined, rvals = refine_on_sphere(objective, pool[keep], domain, rng)
    k = int(rvals.argmax())
    best_x, best = refined[k], float(rvals[k])
    px, pval = _polish(objective, best_x, domain)
    if pval > best:
        best_x, best = px, pval
    return best_x, best


def _joint_sup(T: Operator, A: Operator, constraint: Constraint, eps: float, rng: np.random.Generator) -> SupResult:
    """Relaxed-membership constraints on a general codomain: sample (x, y) jointly."""
    domain, codomain = T.domain, T.codomain
    sign = 1.0 if constraint == "plus_eps" else -1.0

    def objective(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        _, right = derivative_arrays(codomain, Y, X @ T.matrix.T)
        return right

    def feasible(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        return relaxed_plus_mask(codomain, Y, sign * (X @ A.matrix.T), eps)

    X = candidate_pool(domain, settings.SUP_PAIRS, rng)
    TX = X @ T.matrix.T
    natural = np.where(np.any(TX, axis=1)[:, None], TX, sphere_sample_array(codomain, X.shape[0], rng))
    Y = np.vstack([codomain.normalize(natural), sphere_sample_array(codomain, X.shape[0], rng)])
    X = np.vstack([X, X])
    vals = np.where(feasible(X, Y), objective(X, Y), -np.inf)
    keep = np.argsort(-vals, kind="stable")[: settings.SUP_KEEP]
    keep = keep[np.isfinite(vals[keep])]
    if keep.size == 0:
        raise RuntimeError(f"no feasible pair sampled for constraint {constraint} at eps={eps}")
    (Xr, Yr), rvals = refine_on_spheres(objective, [X[keep], Y[keep]], [domain, codomain], rng, feasible=feasible)
    k = int(rvals.argmax())
    return SupResult(value=float(rvals[k]), x=Xr[k], y=Yr[k])


def operator_sup(
    T: Operator,
    A: Operator,
    constraint: Constraint,
    eps: float = 0.0,
    seed: Optional[int] = None,
) -> SupResult:
    """
    sup of [Tx, y] over unit x, unit y and semi-inner products with the
    constraint on [Ax, y]:

    pos: [Ax, y] >= 0; neg: <= 0; eq: = 0; band: |[Ax, y]| < eps;
    plus_eps: Ax in y^{+eps}; minus_eps: Ax in y^{-eps}.
    """
    T.check_compatible(A)
    rng = make_rng(settings.SAMPLING_SEED if seed is None else seed)
    codomain = T.codomain

    if codomain.is_euclidean:

        def objective(X: np.ndarray) -> np.ndarray:
            return _hilbert_inner(X @ T.matrix.T, X @ A.matrix.T, constraint, eps)[0]

        x, value = _sup_over_x(objective, T, rng)
        y = _hilbert_witness_y(T.matrix @ x, A.matrix @ x, constraint, eps)
        return SupResult(value=value, x=x, y=y)

    if constraint in ("plus_eps", "minus_eps"):
        return _joint_sup(T, A, constraint, eps, rng)

    def objective(X: np.ndarray) -> np.ndarray:
        return _dual_inner(codomain, X @ T.matrix.T, X @ A.matrix.T, constraint, eps)

    x, value = _sup_over_x(objective, T, rng)
    return SupResult(value=value, x=x)


def _require_orthogonal(T: Operator, A: Operator) -> None:
    cert = bj_op(T, A)
    if not cert.require_verdict():
        raise HypothesisViolationError(
            f"T is not orthogonal to A: g'(0-) = {cert.left_right_derivs.left:.3g}, "
            f"g'(0+) = {cert.left_right_derivs.right:.3g}"
        )


def norm_retrieval_op(T: Operator, A: Operator, check: bool = True, seed: Optional[int] = None) -> RetrievalReport:
    """
    ||T|| = sup{[Tx, y] : [Ax, y] >= 0} = sup{[Tx, y] : [Ax, y] <= 0} for T orthogonal to A.

    Raises:
        HypothesisViolationError: T not orthogonal to A (when ``check``).
        InconclusiveError: orthogonality cannot be decided from the norm estimates.
    """
    if check:
        _require_orthogonal(T, A)
    norm = op_norm_estimate(T).value
    tol = settings.RETRIEVAL_TOL * max(norm, 1.0)
    pos = operator_sup(T, A, "pos", seed=seed)
    neg = operator_sup(T, A, "neg", seed=seed)
    identities = {
        "sup_pos": abs(pos.value - norm) <= tol,
        "sup_neg": abs(neg.value - norm) <= tol,
    }
    logger.debug(f"retrieval: ||T|| {norm:.9g}, sup_pos {pos.value:.9g}, sup_neg {neg.value:.9g}")
    return RetrievalReport(
        norm=norm,
        tol=tol,
        sup_pos=pos.value,
        sup_neg=neg.value,
        identities=identities,
        witness_x=pos.x,
        witness_y=pos.y,
    )


def norm_retrieval_op_eps(
    T: Operator,
    A: Operator,
    eps: float,
    check: bool = True,
    seed: Optional[int] = None,
) -> RetrievalReport:
    """
    ||T|| = max{l1(eps), l2(eps)} = max{l1(eps), l3(eps)}.

    l1: |[Ax, y]| < eps. l2: Ax in y^{+eps}. l3: Ax in y^{-eps}. The relaxed
    memberships need eps < 1; for eps >= 1 only l1 is reported.
    """
    if not eps > 0.0:
        raise EpsilonRangeError(f"eps must be positive, got {eps}")
    if check:
        _require_orthogonal(T, A)
    norm = op_norm_estimate(T).value
    tol = settings.RETRIEVAL_TOL * max(norm, 1.0)
    l1 = operator_sup(T, A, "band", eps=eps, seed=seed)
    identities: Dict[str, bool] = {}
    l2 = l3 = None
    if eps < 1.0:
        l2 = operator_sup(T, A, "plus_eps", eps=eps, seed=seed).value
        l3 = operator_sup(T, A, "minus_eps", eps=eps, seed=seed).value
        identities["max_l1_l2"] = abs(max(l1.value, l2) - norm) <= tol
        identities["max_l1_l3"] = abs(max(l1.value, l3) - norm) <= tol
    return RetrievalReport(
        norm=norm,
        tol=tol,
        l1_eps=l1.value,
        l2_eps=l2,
        l3_eps=l3,
        eps=eps,
        identities=identities,
        witness_x=l1.x,
        witness_y=l1.y,
    )


def _functional_seeds(f: Functional, g: Functional) -> np.ndarray:
    """Norming vector of f, nudged toward both sides of ker g."""
    space = f.predual
    if not np.any(f.coords):
        return np.empty((0, space.dim))
    x0 = dual_attainer_array(space, f.coords)[0]
    rows = [x0, -x0]
    if np.any(g.coords):
        yg = dual_attainer_array(space, g.coords)[0]
        for delta in (1e-4, 1e-3, 1e-2, 0.1, 0.5):
            rows.extend([x0 + delta * yg, x0 - delta * yg])
    return space.normalize(np.array(rows))


def _functional_sup(f: Functional, g: Functional, constraint: Constraint, eps: float, rng: np.random.Generator) -> SupResult:
    space = f.predual
    fc, gc = f.coords, g.coords
    slack = 1e-12 * max(g.dual_norm(), 1.0)

    def objective(X: np.ndarray) -> np.ndarray:
        return X @ fc

    def feasible(X: np.ndarray) -> np.ndarray:
        gx = X @ gc
        if constraint == "pos":
            return gx >= -slack
        if constraint == "neg":
            return gx <= slack
        return np.abs(gx) < eps

    pool = np.vstack([candidate_pool(space, settings.SUP_PAIRS, rng), _functional_seeds(f, g)])
    vals = np.where(feasible(pool), objective(pool), -np.inf)
    keep = np.argsort(-vals, kind="stable")[: settings.SUP_KEEP]
    keep = keep[np.isfinite(vals[keep])]
    if keep.size == 0:
        raise RuntimeError(f"no feasible point sampled for constraint {constraint}")
    refined, rvals = refine_on_sphere(objective, pool[keep], space, rng, feasible=feasible)
    k = int(rvals.argmax())
    best_x, best = refined[k], float(rvals[k])

    # exact penalty with weight above the constraint multiplier
    weight = 10.0 * (1.0 + f.dual_norm()) / max(g.dual_norm(), 1e-12)

    def penalized(X: np.ndarray) -> np.ndarray:
        gx = X @ gc
        if constraint == "pos":
            viol = np.maximum(-gx, 0.0)
        elif constraint == "neg":
            viol = np.maximum(gx, 0.0)
        else:
            viol = np.maximum(np.abs(gx) - eps, 0.0)
        return objective(X) - weight * viol

    px, pval = _polish(penalized, best_x, space)
    if feasible(px[None, :])[0] and float(objective(px[None, :])[0]) > best:
        best_x, best = px, float(objective(px[None, :])[0])
    return SupResult(value=best, x=best_x)


def norm_retrieval_functional(
    f: Functional,
    g: Functional,
    eps: Optional[float] = None,
    check: bool = True,
    seed: Optional[int] = None,
) -> RetrievalReport:
    """
    ||f|| = sup{f(x) : g(x) >= 0} = sup{f(x) : g(x) <= 0} when f is orthogonal
    to g and the dual space is strictly convex; ||f|| = max{l(eps), k1} in any
    normed space, l(eps) = sup{f(x) : |g(x)| < eps}.

    Without strict convexity and without eps the exact identity is not
    asserted; the eps-identity at DEFAULT_EPS is checked instead.

    Raises:
        HypothesisViolationError: f not orthogonal to g in the dual norm (when ``check``).
    """
    if f.predual != g.predual:
        raise SpaceMismatchError("functionals on different spaces")
    if eps is not None and not eps > 0.0:
        raise EpsilonRangeError(f"eps must be positive, got {eps}")
    if check and not bj_vec(f.as_vector(), g.as_vector()):
        raise HypothesisViolationError("f is not orthogonal to g in the dual norm")

    exact = f.predual.is_strictly_convex
    if not exact and eps is None:
        eps = settings.DEFAULT_EPS
        logger.warning(
            f"dual of {f.predual.descriptor} is not strictly convex; checking the eps-identity at eps={eps} instead"
        )

    rng = make_rng(settings.SAMPLING_SEED if seed is None else seed)
    norm = f.dual_norm()
    tol = settings.FUNCTIONAL_TOL * max(norm, 1.0)
    k1 = _functional_sup(f, g, "pos", 0.0, rng)
    k2 = _functional_sup(f, g, "neg", 0.0, rng)
    identities: Dict[str, bool] = {}
    if exact:
        identities["k1"] = abs(k1.value - norm) <= tol
        identities["k2"] = abs(k2.value - norm) <= tol
    l_eps = None
    if eps is not None:
        l_eps = _functional_sup(f, g, "band", eps, rng).value
        identities["max_l_k1"] = abs(max(l_eps, k1.value) - norm) <= tol
    return RetrievalReport(
        norm=norm,
        tol=tol,
        k1=k1.value,
        k2=k2.value,
        l_eps=l_eps,
        eps=eps,
        exact_identity=exact,
        identities=identities,
        witness_x=k1.x,
    )
