"""
Suite registry - maps suite names to their trial runners.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

from base_reports import SuiteConfig

from . import suites
from .suites import TrialResult

logger = logging.getLogger(__name__)

TrialRunner = Callable[[SuiteConfig, int], TrialResult]


class UnknownSuiteError(KeyError):
    """Raised when a suite name is not registered."""

    pass


@dataclass(frozen=True)
class Suite:
    """A registered suite; ``fixed_trials`` pins the trial count of exact examples."""

    name: str
    runner: TrialRunner
    fixed_trials: Optional[int] = None

    @property
    def description(self) -> str:
        doc = (self.runner.__doc__ or "").strip()
        return doc.splitlines()[0] if doc else ""


_SUITES: Dict[str, Suite] = {
    s.name: s
    for s in (
        Suite("thm-connected-attainment", suites.run_connected_attainment),
        Suite("cor-hilbert-bhatia-semrl", suites.run_hilbert_bhatia_semrl),
        Suite("thm-sip-plus", suites.run_sip_plus),
        Suite("thm-norm-retrieval-op", suites.run_norm_retrieval_op),
        Suite("thm-norm-retrieval-op-eps", suites.run_norm_retrieval_op_eps),
        Suite("thm-norm-retrieval-functional", suites.run_norm_retrieval_functional),
        Suite("thm-norm-retrieval-functional-eps", suites.run_norm_retrieval_functional_eps),
        Suite("thm-dist-span", suites.run_dist_span),
        Suite("thm-dist-subspace", suites.run_dist_subspace),
        Suite("euclidean-characterization", suites.run_euclidean_characterization),
        Suite("example-counterexample", suites.run_example_counterexample, fixed_trials=1),
        Suite("remark-linf-attainment", suites.run_remark_linf_attainment, fixed_trials=1),
    )
}


def get_suite(name: str) -> Suite:
    """
    Look up a suite by name.

    Raises:
        UnknownSuiteError: If no suite has that name.
    """
    try:
        return _SUITES[name]
    except KeyError:
        raise UnknownSuiteError(f"Unknown suite {name!r}; known suites: {', '.join(list_suites())}") from None


def list_suites() -> List[str]:
    """Registered suite names in registration order."""
    return list(_SUITES)
