"""Random instances, grid oracles and the theorem suites."""

from .instances import Instance, gen_instance, trial_rng
from .registry import Suite, UnknownSuiteError, get_suite, list_suites
from .suites import TrialResult

__all__ = [
    "Instance",
    "Suite",
    "TrialResult",
    "UnknownSuiteError",
    "gen_instance",
    "get_suite",
    "list_suites",
    "trial_rng",
]
