"""
Semi-inner products and the x+ / x- classification of directions.

A semi-inner product is realized as a selection v -> f_v of supporting
functionals: [y, x] = ||x|| f(y) with f in J(x / ||x||). Suprema over the
family of all semi-inner products reduce to suprema over the extreme points
of J, since f -> f(y) is linear; in particular
max over J(x) of f(y) = rho'_+(x, y) for unit x.
"""

import logging
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from config import settings

from .spaces import (
    Space,
    SpaceMismatchError,
    Vector,
    ZeroVectorError,
    derivative_arrays,
    one_sided_derivatives,
    support_extremes,
)

logger = logging.getLogger(__name__)


class SelectorError(ValueError):
    """Raised when an extreme-index selector is out of range."""

    pass


class EpsilonRangeError(ValueError):
    """Raised when a relaxation parameter lies outside [0, 1)."""

    pass


@dataclass(frozen=True)
class SipSelector:
    """
    Which supporting functional a semi-inner product picks at each point.

    canonical-smooth: the unique functional in smooth spaces, the barycenter
    of the extreme functionals elsewhere. extreme-index: the k-th extreme
    functional of support_extremes.
    """

    mode: Literal["canonical-smooth", "extreme-index"] = "canonical-smooth"
    index: int = 0

    @classmethod
    def canonical(cls) -> "SipSelector":
        return cls()

    @classmethod
    def extreme(cls, index: int) -> "SipSelector":
        return cls(mode="extreme-index", index=index)


@dataclass(frozen=True)
class DirectionClass:
    """Membership of y in x+ and x-; both together mean x is BJ-orthogonal to y."""

    in_plus: bool
    in_minus: bool

    @property
    def orthogonal(self) -> bool:
        return self.in_plus and self.in_minus


def _selected_functional(x: Vector, sel: SipSelector) -> np.ndarray:
    extremes = support_extremes(x)
    if sel.mode == "extreme-index":
        if not 0 <= sel.index < len(extremes):
            raise SelectorError(
                f"selector index {sel.index} out of range for {len(extremes)} extreme functionals"
            )
        return extremes[sel.index].coords
    return np.mean([f.coords for f in extremes], axis=0)


def sip_eval(y: Vector, x: Vector, sel: Optional[SipSelector] = None) -> float:
    """[y, x] = ||x|| f(y) for the selected supporting functional f at x; [y, 0] = 0."""
    if x.space != y.space:
        raise SpaceMismatchError("semi-inner product of vectors from different spaces")
    if x.is_zero():
        return 0.0
    f = _selected_functional(x, sel or SipSelector.canonical())
    return float(x.norm() * (f @ y.coords))


def sip_is_unique(x: Vector) -> bool:
    """Only one supporting functional at x, hence only one semi-inner product value [., x]."""
    return len(support_extremes(x)) == 1


def direction_class(x: Vector, y: Vector, tol: Optional[float] = None) -> DirectionClass:
    """
    y in x+ iff rho'_+(x, y) >= -tol; y in x- iff rho'_-(x, y) <= tol.

    By convexity of the norm these derivative signs decide the "for all
    lambda >= 0" (resp. <= 0) conditions exactly, and rho'_+ is the largest
    value [y, x] / ||x|| over all semi-inner products.
    """
    tol = settings.DERIV_TOL if tol is None else tol
    d = one_sided_derivatives(x, y)
    return DirectionClass(in_plus=d.right >= -tol, in_minus=d.left <= tol)


def relaxed_plus_mask(space: Space, X: np.ndarray, Y: np.ndarray, eps: float, tol: Optional[float] = None) -> np.ndarray:
    """
    Row-wise y in x^{+eps}, via rho'_+(x, y) >= -eps ||y||.

    The map phi(l) = ||x + l y||^2 - ||x||^2 + 2 eps ||x|| ||l y|| is convex
    with phi(0) = 0, so it stays nonnegative on l >= 0 exactly when its right
    derivative 2 ||x|| (rho'_+(x, y) + eps ||y||) at 0 is nonnegative.
    """
    tol = settings.DERIV_TOL if tol is None else tol
    _, right = derivative_arrays(space, X, Y)
    return right >= -eps * np.asarray(space.norm(Y)) - tol


def _relaxed_margin(x: Vector, y: Vector, eps: float) -> float:
    """min over l >= 0 of phi(l), by doubling bracket, 2^12 grid and bounded refinement."""
    space = x.space
    nx = x.norm()
    ny = y.norm()
    if ny == 0.0:
        return 0.0

    def phi(lam: np.ndarray) -> np.ndarray:
        pts = x.coords + np.multiply.outer(lam, y.coords)
        return space.norm(pts) ** 2 - nx**2 + 2.0 * eps * nx * ny * lam

    hi = 1.0
    for _ in range(64):
        if phi(np.array([2.0 * hi]))[0] >= phi(np.array([hi]))[0]:
            break
        hi *= 2.0
    hi *= 2.0

    grid = np.linspace(0.0, hi, settings.EPS_GRID_POINTS)
    values = phi(grid)
    k = int(values.argmin())
    lo_b = grid[max(k - 1, 0)]
    hi_b = grid[min(k + 1, grid.size - 1)]
    res = minimize_scalar(
        lambda t: float(phi(np.array([t]))[0]),
        bounds=(lo_b, hi_b),
        method="bounded",
        options={"xatol": 1e-12 * max(hi, 1.0)},
    )
    return float(min(values[k], res.fun))


def direction_class_eps(x: Vector, y: Vector, eps: float) -> DirectionClass:
    """
    Relaxed classification: y in x^{+eps} iff for all l >= 0
    ||x + l y||^2 >= ||x||^2 - 2 eps ||x|| ||l y||; x^{-eps} likewise for l <= 0.

    At eps = 0 the relaxation is x+ / x- itself and the derivative test decides it.
    """
    if not 0.0 <= eps < 1.0:
        raise EpsilonRangeError(f"eps must lie in [0, 1), got {eps}")
    if x.is_zero():
        raise ZeroVectorError("relaxed classification needs a nonzero base point")
    if x.space != y.space:
        raise SpaceMismatchError("relaxed classification of vectors from different spaces")
    if eps == 0.0:
        return direction_class(x, y)

    tol = settings.EPS_MARGIN_TOL * x.norm() ** 2
    neg_y = Vector(-y.coords, y.space)
    plus = _relaxed_margin(x, y, eps) >= -tol
    minus = _relaxed_margin(x, neg_y, eps) >= -tol
    logger.debug(f"relaxed classification eps={eps}: plus={plus}, minus={minus}")
    return DirectionClass(in_plus=plus, in_minus=minus)
