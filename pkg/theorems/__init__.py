"""Orthogonality certificates, norm retrieval and best approximation."""

from .approximation import (
    CounterexampleReport,
    DependentBasisError,
    DistanceReport,
    EuclideanExperimentSummary,
    HypothesisPoint,
    attainment_hypothesis_grid,
    counterexample_report,
    dist_subspace,
    dist_sup_formula,
    euclidean_experiment,
    experiment_operator,
    example_operators,
    four_point_operator,
    line_min,
    remark_operator,
)
from .linesearch import convex_line_min
from .orthogonality import (
    HypothesisViolationError,
    InconclusiveError,
    OrthoCertificate,
    VectorVerdict,
    bj_op,
    bj_vec,
    quadratic_witness,
    witness_search,
)
from .retrieval import (
    RetrievalReport,
    SupResult,
    norm_retrieval_functional,
    norm_retrieval_op,
    norm_retrieval_op_eps,
    operator_sup,
)

__all__ = [
    "CounterexampleReport",
    "DependentBasisError",
    "DistanceReport",
    "EuclideanExperimentSummary",
    "HypothesisPoint",
    "HypothesisViolationError",
    "InconclusiveError",
    "OrthoCertificate",
    "RetrievalReport",
    "SupResult",
    "VectorVerdict",
    "attainment_hypothesis_grid",
    "bj_op",
    "bj_vec",
    "convex_line_min",
    "counterexample_report",
    "dist_subspace",
    "dist_sup_formula",
    "euclidean_experiment",
    "experiment_operator",
    "example_operators",
    "four_point_operator",
    "line_min",
    "norm_retrieval_functional",
    "norm_retrieval_op",
    "norm_retrieval_op_eps",
    "operator_sup",
    "quadratic_witness",
    "remark_operator",
    "witness_search",
]
