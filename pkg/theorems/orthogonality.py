"""
Birkhoff-James orthogonality certificates for vectors and operators, and
the search for a pointwise witness x in M_T with Tx orthogonal to Ax.
"""

import logging
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np
from scipy.spatial import cKDTree

from config import settings
from geometry import DerivativePair, Vector, ZeroVectorError, derivative_arrays, direction_class
from operators import AttainmentSample, Operator, attainment_sample, op_norm, op_norm_estimate

from .linesearch import convex_line_min

logger = logging.getLogger(__name__)

# difference-quotient steps for the derivatives of lambda -> ||T + lambda A||
_STEPS = (1e-3, 5e-4, 2.5e-4)

_BISECTION_EDGES = 64
_BISECTION_STEPS = 60

OrthoStatus = Literal["orthogonal", "not-orthogonal", "inconclusive"]


class InconclusiveError(RuntimeError):
    """Raised when a definite orthogonality verdict is required but the norm estimates cannot give one."""

    pass


class HypothesisViolationError(ValueError):
    """Raised when a retrieval theorem is applied to a non-orthogonal pair."""

    pass


@dataclass(frozen=True)
class VectorVerdict:
    """Truthy result of bj_vec; ``zero_base`` flags the convention that 0 is orthogonal to everything."""

    orthogonal: bool
    zero_base: bool = False

    def __bool__(self) -> bool:
        return self.orthogonal


@dataclass(frozen=True)
class OrthoCertificate:
    """
    Certificate for T orthogonal to A, read off the convex map
    g(lambda) = ||T + lambda A||.

    ``verdict`` is None exactly when ``status`` is "inconclusive".
    """

    verdict: Optional[bool]
    status: OrthoStatus
    lambda_star: float
    min_value: float
    left_right_derivs: DerivativePair
    norm_T: float
    norm_A: float
    tol: float
    accuracy: float
    method: str
    witness: Optional[Vector] = None

    def __post_init__(self):
        if self.min_value > self.norm_T + 1e-12 * max(1.0, self.norm_T):
            raise ValueError(f"min_value {self.min_value} exceeds ||T|| = {self.norm_T}")
        if self.status == "inconclusive":
            if self.verdict is not None:
                raise ValueError("inconclusive certificate cannot carry a verdict")
            return
        d = self.left_right_derivs
        expected = d.left <= self.tol and d.right >= -self.tol
        if self.verdict != expected:
            raise ValueError("verdict disagrees with the derivative signs")
        if self.status != ("orthogonal" if expected else "not-orthogonal"):
            raise ValueError(f"status {self.status!r} disagrees with verdict {self.verdict}")

    def require_verdict(self) -> bool:
        """Definite verdict, or InconclusiveError."""
        if self.verdict is None:
            raise InconclusiveError(
                f"operator norm accuracy {self.accuracy:.3g} too coarse for tolerance {self.tol:.3g}"
            )
        return self.verdict


def bj_vec(x: Vector, y: Vector, tol: Optional[float] = None) -> VectorVerdict:
    """
    x orthogonal to y iff rho'_-(x, y) <= tol and rho'_+(x, y) >= -tol.

    Convexity of t -> ||x + t y|| makes the derivative sign test exact.
    x = 0 is orthogonal to every y; the result then carries ``zero_base``.
    """
    if x.is_zero():
        logger.debug("bj_vec: zero base point, orthogonal by convention")
        return VectorVerdict(orthogonal=True, zero_base=True)
    return VectorVerdict(orthogonal=direction_class(x, y, tol).orthogonal)


def _richardson(quotients) -> float:
    d1, d2, d3 = quotients
    r1 = 2.0 * d2 - d1
    r2 = 2.0 * d3 - d2
    return (4.0 * r2 - r1) / 3.0


def bj_op(
    T: Operator,
    A: Operator,
    tol: Optional[float] = None,
    find_witness: bool = False,
) -> OrthoCertificate:
    """
    Certify T orthogonal to A in the operator norm.

    One-sided derivatives of g(lambda) = ||T + lambda A|| at 0 come from
    difference quotients at three shrinking steps with two Richardson
    levels, clipped by convexity (right <= every right quotient, left >=
    every left quotient). The global minimizer lambda* of g comes from the
    convex line search.

    When the norms are sampled estimates, the verdict must survive a
    perturbation of the derivatives by 4 * accuracy / t_min; otherwise the
    certificate is inconclusive.

    Args:
        T: nonzero operator.
        A: operator between the same spaces.
        tol: verdict tolerance relative to ||A|| (default BJ_OP_TOL).
        find_witness: also run witness_search on a fresh attainment sample.

    Raises:
        ZeroVectorError: T = 0.
        SpaceMismatchError: T and A act between different spaces.
    """
    T.check_compatible(A)
    if T.is_zero():
        raise ZeroVectorError("orthogonality certificate needs T != 0")
    rel_tol = settings.BJ_OP_TOL if tol is None else tol

    est0 = op_norm_estimate(T)
    norm_T = est0.value
    norm_A = op_norm(A)
    abs_tol = rel_tol * norm_A

    if A.is_zero():
        return OrthoCertificate(
            verdict=True,
            status="orthogonal",
            lambda_star=0.0,
            min_value=norm_T,
            left_right_derivs=DerivativePair(0.0, 0.0),
            norm_T=norm_T,
            norm_A=0.0,
            tol=0.0,
            accuracy=est0.accuracy,
            method=est0.method,
        )

    accuracy = est0.accuracy

    def g(lam: float) -> float:
        nonlocal accuracy
        est = op_norm_estimate(T.plus(A, lam))
        accuracy = max(accuracy, est.accuracy)
        return est.value

    right_q = [(g(t) - norm_T) / t for t in _STEPS]
    left_q = [(norm_T - g(-t)) / t for t in _STEPS]
    right = min(_richardson(right_q), right_q[-1])
    left = max(_richardson(left_q), left_q[-1])
    if left > right:
        left = right = 0.5 * (left + right)
    derivs = DerivativePair(left=left, right=right)

    lam_star, g_min = convex_line_min(g)
    min_value = min(g_min, norm_T)

    err = 4.0 * accuracy / _STEPS[-1]
    loose = (left - err <= abs_tol) and (right + err >= -abs_tol)
    strict = (left + err <= abs_tol) and (right - err >= -abs_tol)

    witness = None
    if find_witness:
        witness = witness_search(T, A, attainment_sample(T))

    if loose != strict:
        logger.warning(
            f"bj_op inconclusive: derivatives ({left:.3g}, {right:.3g}) within {err:.3g} of tolerance {abs_tol:.3g}"
        )
        return OrthoCertificate(
            verdict=None,
            status="inconclusive",
            lambda_star=lam_star,
            min_value=min_value,
            left_right_derivs=derivs,
            norm_T=norm_T,
            norm_A=norm_A,
            tol=abs_tol,
            accuracy=accuracy,
            method=est0.method,
            witness=witness,
        )

    verdict = left <= abs_tol and right >= -abs_tol
    logger.debug(f"bj_op: derivatives ({left:.3g}, {right:.3g}), lambda* {lam_star:.6g}, verdict {verdict}")
    return OrthoCertificate(
        verdict=verdict,
        status="orthogonal" if verdict else "not-orthogonal",
        lambda_star=lam_star,
        min_value=min_value,
        left_right_derivs=derivs,
        norm_T=norm_T,
        norm_A=norm_A,
        tol=abs_tol,
        accuracy=accuracy,
        method=est0.method,
        witness=witness,
    )


def _orient(z: np.ndarray) -> np.ndarray:
    """Sign fixed so that the largest-magnitude coordinate is positive."""
    k = int(np.abs(z).argmax())
    return z if z[k] >= 0 else -z


def quadratic_witness(T: Operator, A: Operator, basis: np.ndarray, qtol: float) -> Optional[np.ndarray]:
    """
    Zero of x -> <Tx, Ax> on the unit sphere of span(basis rows), or None.

    On the top singular subspace the form is z^T Q z with Q the restriction
    of sym(T^T A); a zero exists iff lambda_min <= 0 <= lambda_max, and
    mixing the two extreme eigenvectors with weights sqrt(w1 / (w1 - w0))
    and sqrt(-w0 / (w1 - w0)) gives one explicitly.
    """
    M = T.matrix.T @ A.matrix
    Q = basis @ (0.5 * (M + M.T)) @ basis.T
    w, E = np.linalg.eigh(Q)
    w0, w1 = float(w[0]), float(w[-1])
    e0 = _orient(E[:, 0])
    e1 = _orient(E[:, -1])
    if abs(w0) <= qtol:
        z = e0
    elif abs(w1) <= qtol:
        z = e1
    elif w0 < 0.0 < w1:
        z = np.sqrt(w1 / (w1 - w0)) * e0 + np.sqrt(-w0 / (w1 - w0)) * e1
    else:
        return None
    x = basis.T @ z
    return _orient(x / np.linalg.norm(x))


def _bisect_edge(T: Operator, A: Operator, xi: np.ndarray, xj: np.ndarray, wtol: float) -> np.ndarray:
    """Walk the normalized segment from a (Tx)+-only point to a (Tx)--only point to where both hold."""
    domain, codomain = T.domain, T.codomain

    def classify(theta: float):
        z = domain.normalize((1.0 - theta) * xi + theta * xj)
        left, right = derivative_arrays(codomain, T.matrix @ z, A.matrix @ z)
        return z, bool(right >= -wtol), bool(left <= wtol)

    lo, hi = 0.0, 1.0
    z = xi
    for _ in range(_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        z, plus, minus = classify(mid)
        if plus and minus:
            return z
        if plus:
            lo = mid
        else:
            hi = mid
    return z


def witness_search(
    T: Operator,
    A: Operator,
    s: AttainmentSample,
    tol: Optional[float] = None,
) -> Optional[Vector]:
    """
    Find x in M_T with Tx orthogonal to Ax.

    Samples carrying a top singular subspace use the exact quadratic-form
    test. Otherwise the sample points are scanned; failing that, sample-graph
    edges joining W1 = {Ax in (Tx)+ only} to W2 = {Ax in (Tx)- only} are
    bisected, shortest first, since a connected piece of M_T meeting both
    sets must meet their common boundary. A bisection point counts only if
    it still attains ||T|| within the sample tolerance.

    Returns:
        A unit witness, or None; absence is a valid answer.
    """
    T.check_compatible(A)
    rel = settings.WITNESS_TOL if tol is None else tol
    norm_A = op_norm(A)

    if s.subspace_basis is not None:
        x = quadratic_witness(T, A, s.subspace_basis, rel * s.norm_value * norm_A)
        return None if x is None else Vector(x, T.domain)

    if A.is_zero():
        return Vector(s.points[0], T.domain)

    wtol = rel * norm_A
    TX = s.points @ T.matrix.T
    AX = s.points @ A.matrix.T
    left, right = derivative_arrays(T.codomain, TX, AX)
    plus = right >= -wtol
    minus = left <= wtol
    both = np.flatnonzero(plus & minus)
    if both.size:
        return Vector(s.points[both[0]], T.domain)

    w1 = plus & ~minus
    w2 = minus & ~plus
    tree = cKDTree(s.points)
    edges = [(i, j) for i, j in tree.query_pairs(s.resolution) if (w1[i] and w2[j]) or (w2[i] and w1[j])]
    edges.sort(key=lambda e: (float(np.linalg.norm(s.points[e[0]] - s.points[e[1]])), e))
    for i, j in edges[:_BISECTION_EDGES]:
        a, b = (i, j) if w1[i] else (j, i)
        z = _bisect_edge(T, A, s.points[a], s.points[b], wtol)
        left_z, right_z = derivative_arrays(T.codomain, T.matrix @ z, A.matrix @ z)
        value = float(T.codomain.norm(T.matrix @ z))
        if left_z <= wtol and right_z >= -wtol and value >= s.norm_value - s.tol:
            logger.debug(f"witness found by bisecting edge ({a}, {b})")
            return Vector(z, T.domain)
    return None
