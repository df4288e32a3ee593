"""
Minimization of convex functions of one real variable.
"""

import logging
from typing import Callable, Optional, Tuple

from scipy.optimize import minimize_scalar

from config import settings

logger = logging.getLogger(__name__)

_MAX_DOUBLINGS = 60


def _expand(g: Callable[[float], float], direction: float) -> float:
    """Smallest L = 2^k >= 1 with g(direction * L) >= g(direction * L / 2)."""
    length = 1.0
    for _ in range(_MAX_DOUBLINGS):
        if g(direction * length) >= g(direction * length / 2.0):
            return length
        length *= 2.0
    return length


def convex_line_min(
    g: Callable[[float], float],
    xatol: Optional[float] = None,
) -> Tuple[float, float]:
    """
    Global minimizer of a convex g on the real line.

    The bracket starts at [-1, 1] and each end doubles outward until g stops
    decreasing there; convexity then puts the minimizer inside. Bounded
    Brent search (golden-section steps where parabolic steps fail) finishes
    to ``xatol``. The origin is kept as a candidate so an exact minimum at
    a kink in 0 is never lost to the final bracket width.

    Returns:
        (argmin, min value)
    """
    xatol = settings.LINE_XATOL if xatol is None else xatol
    cache = {}

    def cached(lam: float) -> float:
        if lam not in cache:
            cache[lam] = float(g(lam))
        return cache[lam]

    left = _expand(cached, -1.0)
    right = _expand(cached, 1.0)
    res = minimize_scalar(cached, bounds=(-left, right), method="bounded", options={"xatol": xatol})

    best_lam, best_val = 0.0, cached(0.0)
    if float(res.fun) < best_val:
        best_lam, best_val = float(res.x), float(res.fun)
    logger.debug(f"line search: bracket [-{left:g}, {right:g}], argmin {best_lam:.12g}, value {best_val:.12g}")
    return best_lam, best_val
