"""
Unit-sphere sampling and derivative-free refinement on products of spheres.
"""

import itertools
import logging
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from config import settings

from .spaces import Space, Vector

logger = logging.getLogger(__name__)

SeedLike = Union[int, np.random.Generator, np.random.SeedSequence, Sequence[int]]


def make_rng(seed: SeedLike) -> np.random.Generator:
    """Generator from an int, a seed sequence, an entropy list or an existing generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sphere_sample_array(space: Space, count: int, seed: SeedLike) -> np.ndarray:
    """(count, dim) array of Gaussian directions normalized in the space's norm."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    rng = make_rng(seed)
    g = rng.standard_normal((count, space.dim))
    # a zero Gaussian row has probability zero; guard anyway
    g[~np.any(g, axis=1), 0] = 1.0
    return space.normalize(g)


def sphere_sample(space: Space, count: int, seed: int) -> List[Vector]:
    """Deterministic pseudo-random unit vectors, reproducible from seed."""
    return [Vector(row, space) for row in sphere_sample_array(space, count, seed)]


def sphere_vertices(space: Space) -> np.ndarray:
    """Extreme points of the unit ball for L1 (+-e_i) and Linf (sign vectors); empty otherwise."""
    if space.is_l1:
        eye = np.eye(space.dim)
        return np.vstack([eye, -eye])
    if space.is_linf and space.dim <= settings.VERTEX_POOL_MAX_DIM:
        return np.array(list(itertools.product((1.0, -1.0), repeat=space.dim)))
    return np.empty((0, space.dim))


def candidate_pool(space: Space, budget: int, rng: np.random.Generator) -> np.ndarray:
    """Sphere sample of size ``budget`` plus the ball's vertices for polyhedral norms."""
    return np.vstack([sphere_sample_array(space, budget, rng), sphere_vertices(space)])


def refine_on_spheres(
    objective: Callable[..., np.ndarray],
    blocks: Sequence[np.ndarray],
    spaces: Sequence[Space],
    rng: np.random.Generator,
    steps: Optional[int] = None,
    initial_step: Optional[float] = None,
    feasible: Optional[Callable[..., np.ndarray]] = None,
) -> Tuple[List[np.ndarray], np.ndarray]:
    """
    Maximize ``objective`` over a product of unit spheres by random axis moves.

    Each row is an independent start. A move perturbs one random coordinate of
    one block by +-step, renormalizes that block in its own norm, and is kept
    when the objective increases (and the point stays feasible). A row halves
    its step after 2 * (total dimension) consecutive rejections. Kinks of
    L1/Linf norms are handled since no gradients are used.

    Args:
        objective: maps the block arrays (n, d_k) to values (n,).
        blocks: starting points, one array per sphere, equal row counts.
        spaces: the space of each block.
        rng: generator driving the moves.
        feasible: optional mask function with the same signature.

    Returns:
        (refined blocks, objective values); infeasible rows keep -inf.
    """
    steps = settings.REFINE_STEPS if steps is None else steps
    initial_step = settings.REFINE_INITIAL_STEP if initial_step is None else initial_step

    pts = [np.array(b, dtype=float, copy=True) for b in blocks]
    n = pts[0].shape[0]
    dims = [b.shape[1] for b in pts]
    offsets = np.cumsum([0] + dims)
    total = int(offsets[-1])
    patience = 2 * total

    def evaluate(candidate: List[np.ndarray]) -> np.ndarray:
        vals = np.asarray(objective(*candidate), dtype=float)
        if feasible is not None:
            vals = np.where(feasible(*candidate), vals, -np.inf)
        return vals

    vals = evaluate(pts)
    step = np.full(n, float(initial_step))
    fails = np.zeros(n, dtype=int)
    rows = np.arange(n)

    for _ in range(steps):
        axis = rng.integers(total, size=n)
        sign = rng.choice((-1.0, 1.0), size=n)
        proposal = [b.copy() for b in pts]
        for k, space in enumerate(spaces):
            hit = (axis >= offsets[k]) & (axis < offsets[k + 1])
            if not np.any(hit):
                continue
            r = rows[hit]
            proposal[k][r, axis[hit] - offsets[k]] += sign[hit] * step[hit]
            proposal[k][r] = space.normalize(proposal[k][r])
        new_vals = evaluate(proposal)
        better = new_vals > vals
        for k in range(len(pts)):
            pts[k][better] = proposal[k][better]
        vals = np.where(better, new_vals, vals)
        fails = np.where(better, 0, fails + 1)
        stalled = fails >= patience
        step = np.where(stalled, step * 0.5, step)
        fails = np.where(stalled, 0, fails)

    return pts, vals


def refine_on_sphere(
    objective: Callable[[np.ndarray], np.ndarray],
    points: np.ndarray,
    space: Space,
    rng: np.random.Generator,
    steps: Optional[int] = None,
    feasible: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Single-sphere form of :func:`refine_on_spheres`."""
    blocks, vals = refine_on_spheres(
        objective, [points], [space], rng, steps=steps, feasible=feasible
    )
    return blocks[0], vals
