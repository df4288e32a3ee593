"""Operators between finite-dimensional normed spaces: norms and norm-attainment sets."""

from .attainment import AttainmentSample, EmptyAttainmentError, antipodal_structure, attainment_sample
from .base import BaseNormSolver, NormEstimate, Operator, apply
from .registry import get_solver, initialize_solvers, op_norm, op_norm_estimate, reset_solvers

__all__ = [
    "AttainmentSample",
    "BaseNormSolver",
    "EmptyAttainmentError",
    "NormEstimate",
    "Operator",
    "antipodal_structure",
    "apply",
    "attainment_sample",
    "get_solver",
    "initialize_solvers",
    "op_norm",
    "op_norm_estimate",
    "reset_solvers",
]
