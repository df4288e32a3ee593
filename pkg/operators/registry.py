"""
Norm-solver registry - singleton chain of solvers, first match wins.
"""

import logging
from typing import List, Optional, Set, Tuple

import numpy as np

from geometry import Space

from .base import BaseNormSolver, NormEstimate, Operator

logger = logging.getLogger(__name__)

# Singleton solver chain
_solver_chain: Optional[List[BaseNormSolver]] = None

# (domain, codomain) pairs already warned about falling back to sampling
_sampled_pairs: Set[Tuple[str, str]] = set()


def initialize_solvers() -> List[BaseNormSolver]:
    """
    Build the solver chain in priority order: exact closed forms first,
    sampled maximization last.

    Returns:
        The initialized chain.
    """
    global _solver_chain

    from .solvers import ColumnSolver, RowSolver, SampledSolver, SignVectorSolver, SpectralSolver

    _solver_chain = [SpectralSolver(), ColumnSolver(), SignVectorSolver(), RowSolver(), SampledSolver()]
    logger.debug(f"Norm solvers initialized: {[s.name for s in _solver_chain]}")
    return _solver_chain


def get_solver(domain: Space, codomain: Space) -> BaseNormSolver:
    """
    First solver of the chain that supports the pair; initializes lazily.

    The sampled solver accepts every pair, so this never fails.
    """
    chain = _solver_chain if _solver_chain is not None else initialize_solvers()
    for solver in chain:
        if solver.supports(domain, codomain):
            return solver
    raise RuntimeError(f"No norm solver for {domain.descriptor} -> {codomain.descriptor}")


def reset_solvers() -> None:
    """Reset the solver chain (primarily for testing)."""
    global _solver_chain
    _solver_chain = None
    _sampled_pairs.clear()


def op_norm_estimate(T: Operator) -> NormEstimate:
    """||T|| with accuracy estimate, method name and unit maximizer."""
    if T.is_zero():
        x = T.domain.normalize(np.eye(T.domain.dim)[0])
        return NormEstimate(value=0.0, accuracy=0.0, method="zero", maximizer=x)

    solver = get_solver(T.domain, T.codomain)
    if solver.name == "sampled":
        pair = (f"{T.domain.descriptor}^{T.domain.dim}", f"{T.codomain.descriptor}^{T.codomain.dim}")
        if pair not in _sampled_pairs:
            _sampled_pairs.add(pair)
            logger.warning(f"No closed form for {pair[0]} -> {pair[1]}; operator norms are sampled estimates")
    return solver.estimate(T)


def op_norm(T: Operator) -> float:
    """Operator norm value."""
    return op_norm_estimate(T).value
