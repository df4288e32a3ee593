"""
Independent oracles shared by the suites and the tests: dense grids with
local refinement, never the closed forms they check.
"""

from typing import Callable, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize, minimize_scalar
from scipy.spatial import cKDTree

from geometry import Functional, Vector
from operators import Operator, op_norm
from theorems import convex_line_min

GRID_POINTS = 4096


def _bracket(phi: Callable[[float], float], start: float = 1.0) -> float:
    length = start
    for _ in range(60):
        if phi(length) >= phi(length / 2.0):
            break
        length *= 2.0
    return 2.0 * length


def half_line_min(x: Vector, y: Vector, points: int = GRID_POINTS) -> float:
    """
    inf over lambda >= 0 of ||x + lambda y||: expanding bracket, a linear
    grid joined with a geometric one near 0, and bounded refinement at the
    best grid point.
    """
    space = x.space

    def phi(lam):
        return space.norm(x.coords + np.multiply.outer(np.atleast_1d(lam), y.coords))

    length = _bracket(lambda t: float(phi(t)[0]))
    grid = np.unique(np.concatenate([np.linspace(0.0, length, points), np.geomspace(1e-12 * length, length, 512)]))
    values = phi(grid)
    k = int(values.argmin())
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)]
    res = minimize_scalar(lambda t: float(phi(t)[0]), bounds=(lo, hi), method="bounded", options={"xatol": 1e-14})
    return float(min(values[k], res.fun))


def plus_oracle(x: Vector, y: Vector, tol: float = 1e-9) -> bool:
    """y in x+ by the grid: inf over lambda >= 0 of ||x + lambda y|| >= ||x|| - tol."""
    return half_line_min(x, y) >= x.norm() - tol


def minus_oracle(x: Vector, y: Vector, tol: float = 1e-9) -> bool:
    """y in x- by the grid."""
    return half_line_min(x, Vector(-y.coords, y.space)) >= x.norm() - tol


def bj_grid_oracle(x: Vector, y: Vector, tol: float = 1e-9) -> bool:
    """x orthogonal to y by the grid on both half-lines."""
    return plus_oracle(x, y, tol) and minus_oracle(x, y, tol)


def relaxed_plus_oracle(x: Vector, y: Vector, eps: float, points: int = GRID_POINTS) -> bool:
    """||x + l y||^2 >= ||x||^2 - 2 eps ||x|| ||l y|| on a dense grid of l >= 0."""
    nx, ny = x.norm(), y.norm()
    grid = np.concatenate([np.geomspace(1e-10, 1e-2, 256), np.linspace(1e-2, 50.0 * max(nx, 1.0) / max(ny, 1e-12), points)])
    values = x.space.norm(x.coords + np.multiply.outer(grid, y.coords)) ** 2
    return bool(np.all(values >= nx**2 - 2.0 * eps * nx * ny * grid - 1e-12 * nx**2))


def operator_line_oracle(T: Operator, A: Operator, lo: float = -2.0, hi: float = 2.0, points: int = 2001) -> Tuple[float, float]:
    """(argmin, min) of ||T + lambda A|| over a uniform grid."""
    grid = np.linspace(lo, hi, points)
    values = np.array([op_norm(T.plus(A, float(lam))) for lam in grid])
    k = int(values.argmin())
    return float(grid[k]), float(values[k])


def grid_descent_oracle(T: Operator, basis: Sequence[Operator], points: int = 101) -> Tuple[np.ndarray, float]:
    """
    min over c of ||T - c1 B1 - c2 B2||: a points x points grid around the
    Frobenius projection, then Nelder-Mead from the best node.
    """
    if len(basis) != 2:
        raise ValueError("grid oracle takes a two-element basis")
    stacked = np.array([B.matrix.reshape(-1) for B in basis]).T
    c_frob, *_ = np.linalg.lstsq(stacked, T.matrix.reshape(-1), rcond=None)
    radius = max(1.0, 2.0 * float(np.abs(c_frob).max()))

    def objective(c: np.ndarray) -> float:
        return op_norm(T - (basis[0] * float(c[0]) + basis[1] * float(c[1])))

    axes = [np.linspace(c - radius, c + radius, points) for c in c_frob]
    best_c, best = None, np.inf
    for a in axes[0]:
        for b in axes[1]:
            v = objective(np.array([a, b]))
            if v < best:
                best_c, best = np.array([a, b]), v
    res = minimize(objective, best_c, method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 2000})
    if res.fun < best:
        return np.asarray(res.x), float(res.fun)
    return best_c, best


def functional_duality_oracle(f: Functional, g: Functional, sign: float = 1.0) -> float:
    """
    sup{f(x) : ||x|| = 1, sign * g(x) >= 0} = min over mu >= 0 of ||f + sign mu g||*.

    The unconstrained minimizer of the convex map, clamped to mu >= 0.
    """
    dual = f.predual.dual()

    def h(mu: float) -> float:
        return float(dual.norm(f.coords + sign * mu * g.coords))

    mu, value = convex_line_min(h)
    return value if mu >= 0.0 else h(0.0)


def hausdorff(points: np.ndarray, reference: np.ndarray) -> float:
    """Symmetric Hausdorff distance between two point clouds."""
    d_pr, _ = cKDTree(reference).query(points)
    d_rp, _ = cKDTree(points).query(reference)
    return float(max(d_pr.max(), d_rp.max()))


def remark_segments(samples: int = 4001) -> np.ndarray:
    """Dense sampling of {+-(1, b) : |b| <= 1}."""
    b = np.linspace(-1.0, 1.0, samples)
    seg = np.column_stack([np.ones_like(b), b])
    return np.vstack([seg, -seg])
