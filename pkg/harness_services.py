"""
Harness Services - theorem-suite pipeline: run, emit, load and replay.
"""

import asyncio
import json
import logging
import time
import uuid
from pathlib import Path
from typing import List, Optional, Tuple, Union

from base_reports import FailureRecord, SuiteConfig, SuiteReport, SuiteSummary, TrialOutcome
from config import settings
from harness import Suite, TrialResult, get_suite
from operators import initialize_solvers

logger = logging.getLogger(__name__)


def _run_trial(suite: Suite, config: SuiteConfig, trial: int, run_id: str) -> Tuple[TrialOutcome, Optional[FailureRecord]]:
    """
    Run one trial synchronously - runs in the thread pool.

    Exceptions never escape: the trial is recorded as failed with its seed,
    so a crash in one trial leaves the rest of the run intact.
    """
    try:
        result: TrialResult = suite.runner(config, trial)
    except Exception as e:
        logger.exception(f"[{run_id}] Trial {trial} raised")
        outcome = TrialOutcome(trial=trial, status="fail", dim=config.dim_for(trial), message=f"{type(e).__name__}: {e}")
        failure = FailureRecord(
            suite=suite.name,
            trial=trial,
            seed=config.seed,
            config=config,
            inputs={"seed": [config.seed, trial]},
            message=outcome.message,
        )
        return outcome, failure

    outcome = result.outcome
    if outcome.status == "fail":
        logger.warning(f"[{run_id}] Trial {trial} failed: {outcome.message}")
        failure = FailureRecord(
            suite=suite.name,
            trial=trial,
            seed=config.seed,
            config=config,
            inputs=result.inputs,
            message=outcome.message or "trial failed",
        )
        return outcome, failure
    if outcome.status == "inconclusive":
        logger.info(f"[{run_id}] Trial {trial} inconclusive: {outcome.message}")
    return outcome, None


async def run_suite_async(config: SuiteConfig) -> SuiteReport:
    """
    Fan the trials of one suite out to worker threads and assemble the report.

    Outcomes and failures are sorted by trial index, so the report does not
    depend on completion order.

    Raises:
        UnknownSuiteError: If the suite name is not registered.
    """
    run_id = str(uuid.uuid4())[:8]
    start_time = time.time()

    # Step 1: Resolve the suite and pin the trial count of exact examples
    suite = get_suite(config.suite)
    if suite.fixed_trials is not None and config.trials != suite.fixed_trials:
        logger.info(f"[{run_id}] Suite {suite.name} runs {suite.fixed_trials} trial(s); ignoring trials={config.trials}")
        config = config.model_copy(update={"trials": suite.fixed_trials})
    logger.info(
        f"[{run_id}] Suite run: suite={suite.name}, domain={config.domain}, "
        f"codomain={config.codomain_descriptor}, dims={config.dims}, trials={config.trials}, seed={config.seed}"
    )

    # Step 2: Build the solver chain once, before threads race for it
    initialize_solvers()

    # Step 3: Run the trials off the event loop
    semaphore = asyncio.Semaphore(settings.SUITE_WORKERS)

    async def bounded(trial: int):
        async with semaphore:
            return await asyncio.to_thread(_run_trial, suite, config, trial, run_id)

    results = await asyncio.gather(*(bounded(t) for t in range(config.trials)))
    logger.info(f"[{run_id}] {len(results)} trials complete")

    # Step 4: Assemble the report
    results = sorted(results, key=lambda r: r[0].trial)
    outcomes: List[TrialOutcome] = [o for o, _ in results]
    failures: List[FailureRecord] = [f for _, f in results if f is not None]
    summary = SuiteSummary(
        trials=len(outcomes),
        passes=sum(o.status == "pass" for o in outcomes),
        failures=sum(o.status == "fail" for o in outcomes),
        inconclusive=sum(o.status == "inconclusive" for o in outcomes),
    )
    wall_clock = time.time() - start_time
    report = SuiteReport(
        config=config,
        outcomes=outcomes,
        failures=failures,
        summary=summary,
        wall_clock_seconds=wall_clock,
    )

    logger.info(
        f"[{run_id}] Completed: passes={summary.passes}, failures={summary.failures}, "
        f"inconclusive={summary.inconclusive}, latency={wall_clock * 1000:.0f}ms"
    )
    return report


def run_suite(config: SuiteConfig) -> SuiteReport:
    """Synchronous entry to run_suite_async."""
    return asyncio.run(run_suite_async(config))


def report_json(report: SuiteReport) -> str:
    """Byte-stable JSON text of a report: sorted keys, two-space indent."""
    return json.dumps(report.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"


def emit_report(report: SuiteReport, path: Union[str, Path]) -> None:
    """
    Write a report as JSON.

    Raises:
        OSError: If the path is not writable.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report_json(report), encoding="utf-8")
    logger.info(f"Report written to {path}")


def load_report(path: Union[str, Path]) -> SuiteReport:
    """Parse a report written by emit_report."""
    return SuiteReport.model_validate_json(Path(path).read_text(encoding="utf-8"))


def load_failure(path: Union[str, Path]) -> FailureRecord:
    """
    Read a failure record: either a bare record or a full report (first failure).

    Raises:
        ValueError: If the file holds a report without failures.
    """
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if "failures" in data and "summary" in data:
        report = SuiteReport.model_validate(data)
        if not report.failures:
            raise ValueError(f"{path} has no failures to replay")
        return report.failures[0]
    return FailureRecord.model_validate(data)


def replay(failure: FailureRecord) -> TrialResult:
    """
    Re-run one recorded trial from its config and trial index.

    The regenerated inputs are compared with the recorded ones; a mismatch
    means the instance stream changed since the report was written.
    """
    suite = get_suite(failure.suite)
    logger.info(f"Replaying {suite.name} trial {failure.trial} (seed {failure.seed})")
    initialize_solvers()
    result = suite.runner(failure.config, failure.trial)
    regenerated = FailureRecord(
        suite=failure.suite,
        trial=failure.trial,
        seed=failure.seed,
        config=failure.config,
        inputs=result.inputs,
        message=failure.message,
    )
    # crashed trials record only their seed
    if set(failure.inputs) != {"seed"} and regenerated.inputs != failure.inputs:
        logger.warning("Replayed inputs differ from the recorded ones")
    logger.info(f"Replay status: {result.outcome.status} ({result.outcome.message})")
    return result
