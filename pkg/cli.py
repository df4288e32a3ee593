"""
bjortho command line.

Exit codes: 0 all pass, 1 failures, 2 inconclusive only, 3 usage error.
"""

import json
import logging
import sys
from pathlib import Path
from typing import Optional, Tuple

import click

from base_reports import CertificateRecord, CounterexampleRecord, DistanceRecord, OperatorFile, SuiteConfig
from config import settings
from harness import UnknownSuiteError, get_suite, list_suites
from harness_services import emit_report, load_failure, replay, report_json, run_suite
from operators import Operator
from theorems import bj_op, counterexample_report, dist_subspace

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURES = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 3

_STATUS_EXIT = {"pass": EXIT_OK, "fail": EXIT_FAILURES, "inconclusive": EXIT_INCONCLUSIVE}


def _load_operator(path: str) -> Operator:
    return OperatorFile.model_validate_json(Path(path).read_text(encoding="utf-8")).to_operator()


def _echo_json(data) -> None:
    click.echo(json.dumps(data, sort_keys=True, indent=2))


@click.group()
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default="INFO",
    show_default=True,
)
def cli(log_level: str) -> None:
    """Birkhoff-James orthogonality in finite-dimensional normed spaces."""
    logging.basicConfig(
        level=getattr(logging, log_level.upper()),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )


@cli.command()
@click.argument("name")
@click.option("--dim", "dims", type=int, multiple=True, help="Dimension (repeatable; cycled over trials)")
@click.option("--domain", default="lp:2", show_default=True, help="Domain norm, e.g. lp:1, lp:3.5, linf")
@click.option("--codomain", default=None, help="Codomain norm (defaults to the domain's)")
@click.option("--trials", type=int, default=settings.SUITE_TRIALS, show_default=True)
@click.option("--seed", type=int, default=settings.SEED, show_default=True)
@click.option("--tol", type=float, default=None, help="Suite tolerance override")
@click.option("--budget", type=int, default=settings.ATTAINMENT_BUDGET, show_default=True, help="Attainment sample budget")
@click.option("--eps", "eps_values", type=float, multiple=True, help="Relaxation parameter (repeatable)")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Report path (stdout when omitted)")
def suite(
    name: str,
    dims: Tuple[int, ...],
    domain: str,
    codomain: Optional[str],
    trials: int,
    seed: int,
    tol: Optional[float],
    budget: int,
    eps_values: Tuple[float, ...],
    out: Optional[str],
) -> int:
    """Run one theorem suite and write its JSON report."""
    get_suite(name)
    fields = dict(suite=name, domain=domain, codomain=codomain, trials=trials, seed=seed, tol=tol, budget=budget, out=out)
    if dims:
        fields["dims"] = list(dims)
    if eps_values:
        fields["eps_values"] = list(eps_values)
    config = SuiteConfig(**fields)

    report = run_suite(config)
    if out:
        emit_report(report, out)
    else:
        click.echo(report_json(report), nl=False)
    return report.exit_code


@cli.command("check-op")
@click.option("--t", "t_path", required=True, type=click.Path(exists=True, dir_okay=False), help="Operator T")
@click.option("--a", "a_path", required=True, type=click.Path(exists=True, dir_okay=False), help="Operator A")
@click.option("--tol", type=float, default=None, help="Verdict tolerance relative to ||A||")
@click.option("--witness/--no-witness", default=False, help="Search M_T for x with Tx orthogonal to Ax")
def check_op(t_path: str, a_path: str, tol: Optional[float], witness: bool) -> int:
    """Certify T orthogonal to A; exit 0 orthogonal, 1 not, 2 undecided."""
    cert = bj_op(_load_operator(t_path), _load_operator(a_path), tol=tol, find_witness=witness)
    _echo_json(CertificateRecord.from_certificate(cert).model_dump(mode="json"))
    if cert.verdict is None:
        return EXIT_INCONCLUSIVE
    return EXIT_OK if cert.verdict else EXIT_FAILURES


@cli.command()
@click.option("--t", "t_path", required=True, type=click.Path(exists=True, dir_okay=False), help="Operator T")
@click.option("--basis", "basis_paths", multiple=True, type=click.Path(exists=True, dir_okay=False), help="Basis operator")
@click.argument("more", nargs=-1, type=click.Path(exists=True, dir_okay=False))
@click.option("--no-hypothesis", is_flag=True, default=False, help="Skip the attainment-hypothesis grid")
def dist(t_path: str, basis_paths: Tuple[str, ...], more: Tuple[str, ...], no_hypothesis: bool) -> int:
    """dist(T, span basis) with the sup-formula at the best approximation."""
    paths = list(basis_paths) + list(more)
    if not paths:
        raise click.UsageError("at least one --basis operator is required")
    report = dist_subspace(_load_operator(t_path), [_load_operator(p) for p in paths], check_hypothesis=not no_hypothesis)
    _echo_json(DistanceRecord.from_report(report).model_dump(mode="json"))
    return EXIT_OK


@cli.command("replay")
@click.option(
    "--failure",
    "failure_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
    help="Failure record or report",
)
def replay_cmd(failure_path: str) -> int:
    """Re-run one failed trial from its recorded seed."""
    result = replay(load_failure(failure_path))
    _echo_json(result.outcome.model_dump(mode="json"))
    return _STATUS_EXIT[result.outcome.status]


@cli.command()
def counterexample() -> int:
    """The three-dimensional distance counterexample: table, then JSON."""
    report = counterexample_report()
    click.echo(report.table())
    _echo_json(CounterexampleRecord.from_report(report).model_dump(mode="json"))
    return EXIT_OK if report.holds else EXIT_FAILURES


@cli.command("suites")
def suites_cmd() -> int:
    """List the theorem suites."""
    for name in list_suites():
        click.echo(f"{name:36s} {get_suite(name).description}")
    return EXIT_OK


def main(argv=None) -> int:
    """Console entry point; maps usage and input errors to exit code 3."""
    try:
        code = cli.main(args=argv, prog_name=settings.PROJECT_NAME, standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE
    except click.Abort:
        click.echo("Aborted", err=True)
        return EXIT_USAGE
    except (UnknownSuiteError, ValueError, OSError) as e:
        click.echo(f"Error: {e}", err=True)
        return EXIT_USAGE
    return code if isinstance(code, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
