"""Command-line front end.

Examples:

    lelong profile --current s_eps.json --eps 0.5 --weight pow:k=2

    lelong limit --current s_eps.json --eps 0.5 --weight pow:k=2

    lelong check-c --current log.json

    lelong verify lelong_jensen --current s_eps.json --eps 0.5 --r1 0.1 --r2 0.2

    lelong panel --format csv

Exit codes: 0 success, 1 verification failure, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import functools
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, Sequence

import click

from lelong import __version__
from lelong.analysis import ConditionCReport, LimitEstimate
from lelong.config import Config
from lelong.error_handling import ErrorCategory, ErrorType, InvalidInputError, exit_code_for
from lelong.graph import run
from lelong.identity_suite import IDENTITY_IDS, IdentityReport
from lelong.reporting import (
    PROFILE_FORMATS,
    REPORT_FORMATS,
    dumps,
    format_condition,
    format_limit,
    format_profile,
    format_reports,
)
from lelong.schemas import CurrentSpec, WeightSpec
from lelong.state import RunRequest

logger = logging.getLogger(__name__)

ENGINES = ("auto", "closed", "quad", "mc")
QUANTITIES = ("nu", "nu-ddc", "f", "ring")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")

SCHEMAS = {
    "current": CurrentSpec,
    "weight": WeightSpec,
    "limit": LimitEstimate,
    "condition": ConditionCReport,
    "report": IdentityReport,
}


def _configure_logging(level: str | None) -> None:
    logging.basicConfig(
        level=(level or Config.LOG_LEVEL).upper(),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )


def _fail(error_type: ErrorType, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(exit_code_for(error_type))


def _read_spec(value: str | None, what: str) -> str | None:
    """A spec option is a file path or inline JSON."""
    if value is None:
        return None
    path = Path(value)
    if path.is_file():
        return path.read_text()
    if value.lstrip().startswith("{"):
        return value
    raise InvalidInputError(f"{what} spec {value!r} is neither a file nor inline JSON")


def _read_weight(value: str) -> str:
    path = Path(value)
    return path.read_text() if path.is_file() else value


def _parse_params(eps: float | None, params: Sequence[str]) -> Dict[str, float]:
    values: Dict[str, float] = {}
    for item in params:
        name, sep, raw = item.partition("=")
        if not sep or not name.strip():
            raise InvalidInputError(f"--param expects NAME=VALUE, got {item!r}")
        try:
            values[name.strip()] = float(raw)
        except ValueError as e:
            raise InvalidInputError(f"--param {name.strip()}: {raw!r} is not a number") from e
    if eps is not None:
        values["eps"] = eps
    return values


def _parse_ks(text: str | None) -> list[float] | None:
    if text is None:
        return None
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise InvalidInputError(f"--ks expects a comma separated list of numbers, got {text!r}") from e


def _request(command: str, opts: Dict[str, Any], **extra: Any) -> RunRequest:
    request: RunRequest = {
        "command": command,
        "current_text": _read_spec(opts.get("current"), "current"),
        "weight_text": _read_weight(opts.get("weight") or "pow:k=1"),
        "params": _parse_params(opts.get("eps"), opts.get("param") or ()),
        "engine": opts.get("engine") or "auto",
        "grid": {"r_min": opts.get("r_min"), "r_max": opts.get("r_max"), "points": opts.get("points")},
        "mc": {"samples": opts.get("samples"), "seed": opts.get("seed")},
        "tolerances": {"deterministic": opts.get("tol"), "limit": opts.get("tol_limit"), "sigmas": opts.get("sigmas")},
    }
    request.update(extra)  # type: ignore[typeddict-item]
    return request


def _execute(request: RunRequest) -> Dict[str, Any]:
    """Run the graph; on a recorded error print the first diagnostic and exit."""
    state = run(request)
    errors = state.get("error_details") or []
    outputs = state.get("outputs") or {}
    if errors and request["command"] != "panel":
        first = errors[0]
        _fail(ErrorType(first["type"]), first["message"])
    return {"outputs": outputs, "errors": errors}


def _guarded(fn: Callable[..., None]) -> Callable[..., None]:
    """Map exceptions raised while building the request to exit codes."""

    @functools.wraps(fn)
    def wrapper(*args: Any, **kwargs: Any) -> None:
        try:
            fn(*args, **kwargs)
        except (click.exceptions.Exit, click.ClickException, SystemExit):
            raise
        except Exception as e:
            detail = ErrorCategory.create_error_dict(e, fn.__name__)
            _fail(ErrorType(detail["type"]), detail["message"])

    return wrapper


def _spec_options(fn: Callable[..., Any]) -> Callable[..., Any]:
    decorators = [
        click.option("--current", "current", type=str, default=None, help="Current spec: JSON file or inline JSON"),
        click.option("--eps", type=float, default=None, help='Value of the "eps" placeholder'),
        click.option("--param", multiple=True, metavar="NAME=VALUE", help="Placeholder value (repeatable)"),
        click.option("--weight", default="pow:k=1", show_default=True, help="Weight: micro-syntax, JSON or file"),
    ]
    return functools.reduce(lambda f, d: d(f), reversed(decorators), fn)


def _run_options(fn: Callable[..., Any]) -> Callable[..., Any]:
    decorators = [
        click.option("--engine", type=click.Choice(ENGINES), default="auto", show_default=True),
        click.option("--samples", type=int, default=None, help=f"Monte Carlo samples [default: {Config.MC_SAMPLES}]"),
        click.option("--seed", type=int, default=0, show_default=True, help="Monte Carlo seed"),
        click.option("--tol", type=float, default=None, help="Deterministic tolerance override"),
        click.option("--tol-limit", "tol_limit", type=float, default=None, help="Tolerance for extrapolated limits"),
        click.option("--sigmas", type=float, default=None, help="Monte Carlo sigma multiplier"),
        click.option("--log-level", "log_level", type=click.Choice(LOG_LEVELS, case_sensitive=False), default=None),
    ]
    return functools.reduce(lambda f, d: d(f), reversed(decorators), fn)


def _grid_options(fn: Callable[..., Any]) -> Callable[..., Any]:
    decorators = [
        click.option("--r-min", "r_min", type=float, default=1e-6, show_default=True),
        click.option("--r-max", "r_max", type=float, default=1e-1, show_default=True),
        click.option("--points", type=int, default=32, show_default=True),
    ]
    return functools.reduce(lambda f, d: d(f), reversed(decorators), fn)


@click.group()
@click.version_option(version=__version__, prog_name="lelong")
def cli() -> None:
    """Generalized Lelong numbers of model currents: profiles, limits and identity checks."""


@cli.command()
@_spec_options
@_grid_options
@_run_options
@click.option("--quantity", type=click.Choice(QUANTITIES), default="nu", show_default=True)
@click.option("--format", "fmt", type=click.Choice(PROFILE_FORMATS), default="csv", show_default=True)
@click.option("--classical", is_flag=True, help="Divide by 2^p (dd^c = (i/2π)∂∂̄ convention)")
@_guarded
def profile(fmt: str, classical: bool, quantity: str, **opts: Any) -> None:
    """Sample ν (or ν(dd^cT), f, ring α-masses) on a geometric radius grid."""
    _configure_logging(opts.get("log_level"))
    result = _execute(_request("profile", opts, quantity=quantity))
    click.echo(format_profile(result["outputs"]["profile"], fmt, classical), nl=False)


@cli.command()
@_spec_options
@_grid_options
@_run_options
@click.option("--classical", is_flag=True, help="Divide by 2^p (dd^c = (i/2π)∂∂̄ convention)")
@_guarded
def limit(classical: bool, **opts: Any) -> None:
    """Extrapolate ν(T, φ) = lim ν(T, φ, r) as r → 0⁺."""
    _configure_logging(opts.get("log_level"))
    result = _execute(_request("limit", opts, quantity="nu"))
    outputs = result["outputs"]
    click.echo(format_limit(outputs["limit"], outputs["profile"].bidim, classical))


@cli.command("check-c")
@_spec_options
@_run_options
@_guarded
def check_c(**opts: Any) -> None:
    """Decide whether ν(dd^cT, φ, t)/t is integrable near 0."""
    _configure_logging(opts.get("log_level"))
    result = _execute(_request("check-c", opts))
    click.echo(format_condition(result["outputs"]["condition"]))


@cli.command()
@click.argument("identity", type=click.Choice(IDENTITY_IDS))
@_spec_options
@_grid_options
@_run_options
@click.option("--r1", type=float, default=None)
@click.option("--r2", type=float, default=None)
@click.option("--r", "radius", type=float, default=None)
@click.option("--r0", type=float, default=None)
@click.option("--k", type=float, default=None)
@click.option("--s", type=float, default=None)
@click.option("--ell", type=float, default=None)
@click.option("--psi", type=str, default=None, help="Second weight (comparison)")
@click.option("--ks", type=str, default=None, help="Comma separated exponents (power_monotone)")
@click.option("--format", "fmt", type=click.Choice(REPORT_FORMATS), default="json", show_default=True)
@_guarded
def verify(identity: str, fmt: str, r1, r2, radius, r0, k, s, ell, psi, ks, **opts: Any) -> None:
    """Check one identity on one (current, weight) pair."""
    _configure_logging(opts.get("log_level"))
    identity_options = {
        "r1": r1,
        "r2": r2,
        "r": radius,
        "r0": r0,
        "k": k,
        "s": s,
        "ell": ell,
        "psi": _read_weight(psi) if psi else None,
        "ks": _parse_ks(ks),
    }
    request = _request(
        "verify",
        opts,
        identity=identity,
        identity_options={key: value for key, value in identity_options.items() if value is not None},
    )
    reports = _execute(request)["outputs"]["reports"]
    click.echo(format_reports(reports, fmt), nl=fmt == "json")
    for report in reports:
        if report.message:
            click.echo(f"{report.identity_id}: {report.verdict.value}: {report.message}", err=True)
    if any(report.failed for report in reports):
        sys.exit(exit_code_for(ErrorType.VERIFICATION))


@cli.command()
@_run_options
@click.option("--mc", "include_mc", is_flag=True, help="Add the Monte Carlo cases")
@click.option("--format", "fmt", type=click.Choice(REPORT_FORMATS), default="json", show_default=True)
@_guarded
def panel(include_mc: bool, fmt: str, **opts: Any) -> None:
    """Run every catalog case against the identities it satisfies."""
    _configure_logging(opts.get("log_level"))
    request: RunRequest = {
        "command": "panel",
        "engine": opts.get("engine") or "auto",
        "mc": {"samples": opts.get("samples"), "seed": opts.get("seed")},
        "tolerances": {"deterministic": opts.get("tol"), "limit": opts.get("tol_limit"), "sigmas": opts.get("sigmas")},
        "include_mc_panel": include_mc,
    }
    result = _execute(request)
    reports = result["outputs"]["reports"]
    click.echo(format_reports(reports, fmt), nl=fmt == "json")
    failed = [report for report in reports if report.failed]
    for report in failed:
        click.echo(f"FAIL {report.identity_id} {report.details.get('case_id', '')}: residual {report.residual!r}, tolerance {report.tolerance!r}", err=True)
    if result["errors"]:
        first = result["errors"][0]
        for error in result["errors"]:
            click.echo(f"error: {error['node']}: {error['message']}", err=True)
        sys.exit(exit_code_for(first["type"]))
    if failed:
        sys.exit(exit_code_for(ErrorType.VERIFICATION))


@cli.command()
@click.argument("name", type=click.Choice(sorted(SCHEMAS)))
def schema(name: str) -> None:
    """Print the JSON schema of an input spec or an output document."""
    click.echo(dumps(SCHEMAS[name].model_json_schema()))


def main() -> None:
    cli()


if __name__ == "__main__":
    main()
