#!/usr/bin/env python3
"""fano-mck command line: run scenarios, normalize cycle expressions, run single checks."""

import json
from pathlib import Path
from typing import Any, Optional

import typer
from pycomfort.logging import to_nice_file, to_nice_stdout

from fano_mck import __version__
from fano_mck.algebra.cohomology import model_from_spec, model_integrity
from fano_mck.algebra.tautological import basis as normal_basis
from fano_mck.algebra.tautological import relation_table
from fano_mck.datatypes import CHECK_OPERATIONS, VARIETY_LABELS, OutputFormat
from fano_mck.errors import FanoMckError
from fano_mck.verification import Report, Scenario, ScenarioRunner, load_scenario, load_settings, render
from fano_mck.verification.items import jsonable

EXIT_USAGE = 2

app = typer.Typer(
    name="fano-mck",
    help="Exact verification of the tautological ring and MCK calculus of genus 10 prime Fano threefolds",
    add_completion=False,
)


def version_callback(value: bool):
    """Show version information."""
    if value:
        typer.echo(f"fano-mck version {__version__}")
        raise typer.Exit()


@app.callback()
def main(
    version: Optional[bool] = typer.Option(
        None,
        "--version",
        "-V",
        callback=version_callback,
        is_eager=True,
        help="Show version and exit",
    )
):
    """Exact verification of the tautological ring and MCK calculus of genus 10 prime Fano threefolds."""


FormatOption = typer.Option(None, "--format", "-f", help="Output format: text or json")
OutOption = typer.Option(None, "--out", "-o", help="Write the output to this file instead of stdout")
LogFileOption = typer.Option(None, "--log-file", help="Write eliot logs to PATH.json and a rendered PATH.log")
VerboseOption = typer.Option(False, "--verbose", help="Render eliot logs to stdout")
VarietyOption = typer.Option("y18", "--variety", help="y18, z4, curve2, ab2 or custom(n,d,b)")


def _configure_logging(log_file: Optional[Path], verbose: bool) -> None:
    configured = load_settings().log_file
    target = log_file or (Path(configured) if configured else None)
    if target is not None:
        target.parent.mkdir(parents=True, exist_ok=True)
        to_nice_file(target.with_suffix(".json"), target.with_suffix(".log"))
    if verbose:
        to_nice_stdout()


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        typer.echo(text, nl=not text.endswith("\n"))
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")


def _usage_error(error: Exception) -> typer.Exit:
    typer.echo(f"error: {error}", err=True)
    return typer.Exit(EXIT_USAGE)


def _check_format(value: Optional[str]) -> Optional[OutputFormat]:
    if value is None or value in ("text", "json"):
        return value
    raise typer.BadParameter(f"unknown format {value!r}, use text or json", param_hint="--format")


def _run_scenario(scenario: Scenario, output_format: OutputFormat, out: Optional[Path]) -> Report:
    report = ScenarioRunner().run_sync(scenario)
    _emit(render(report, output_format), out)
    return report


@app.command("run")
def run(
    scenario_file: Path = typer.Argument(..., help="Scenario file (INI sections)"),
    output_format: Optional[str] = FormatOption,
    out: Optional[Path] = OutOption,
    log_file: Optional[Path] = LogFileOption,
    verbose: bool = VerboseOption,
):
    """Run every check of a scenario file; exit 0 when all pass, 1 on a failure, 2 on a malformed scenario."""
    output_format = _check_format(output_format)
    _configure_logging(log_file, verbose)
    try:
        scenario = load_scenario(scenario_file)
    except FanoMckError as e:
        raise _usage_error(e)
    report = _run_scenario(scenario, output_format or scenario.format, out)
    raise typer.Exit(report.exit_code)


def _single_check(name: str, variety: str, **parameters: Any) -> Scenario:
    try:
        return Scenario.model_validate(
            {
                "name": name,
                "variety": variety,
                "checks": [{"label": name, **{key: value for key, value in parameters.items() if value is not None}}],
            }
        )
    except ValueError as e:
        raise _usage_error(e)


@app.command("normalize")
def normalize_command(
    m: int = typer.Option(..., "--m", help="Ambient power X^m"),
    expr: str = typer.Option(..., "--expr", help="Expression in h(i), o(i), tau(i,j)"),
    variety: str = VarietyOption,
    output_format: Optional[str] = FormatOption,
    out: Optional[Path] = OutOption,
    log_file: Optional[Path] = LogFileOption,
    verbose: bool = VerboseOption,
):
    """Print the normal form of a tautological expression on X^m."""
    output_format = _check_format(output_format)
    _configure_logging(log_file, verbose)
    scenario = _single_check("normalize", variety, kind="normalize", m=m, expr=expr)
    report = _run_scenario(scenario, output_format or "text", out)
    raise typer.Exit(report.exit_code)


@app.command("verify")
def verify(
    check: str = typer.Argument(..., help=f"One of: {', '.join(CHECK_OPERATIONS)}"),
    variety: str = VarietyOption,
    m: Optional[int] = typer.Option(None, "--m", help="Ambient power (injectivity, normalize)"),
    k: Optional[int] = typer.Option(None, "--k", help="Half the number of slots (matching-sum)"),
    b: Optional[int] = typer.Option(None, "--b", help="Odd rank (matching-sum)"),
    total: Optional[int] = typer.Option(None, "--total", help="Expected weight total (pure-degree)"),
    expr: Optional[str] = typer.Option(None, "--expr", help="Expression (normalize)"),
    output_format: Optional[str] = FormatOption,
    out: Optional[Path] = OutOption,
    log_file: Optional[Path] = LogFileOption,
    verbose: bool = VerboseOption,
):
    """Run one check against a variety."""
    output_format = _check_format(output_format)
    if check not in CHECK_OPERATIONS:
        raise _usage_error(ValueError(f"unknown check {check!r}; use one of {', '.join(CHECK_OPERATIONS)}"))
    _configure_logging(log_file, verbose)
    scenario = _single_check(check, variety, kind=check, m=m, k=k, b=b, total=total, expr=expr)
    report = _run_scenario(scenario, output_format or "text", out)
    raise typer.Exit(report.exit_code)


def _emit_values(values: dict[str, Any], output_format: OutputFormat, out: Optional[Path]) -> None:
    if output_format == "json":
        _emit(json.dumps(jsonable(values), indent=2, ensure_ascii=False) + "\n", out)
        return
    lines = [f"{key}: {value}" for key, value in values.items() if not isinstance(value, list) or key != "monomials"]
    lines += [f"  {item}" for item in values.get("monomials", [])]
    _emit("\n".join(lines) + "\n", out)


@app.command("basis")
def basis_command(
    m: int = typer.Option(..., "--m", help="Ambient power X^m"),
    codim: int = typer.Option(..., "--codim", help="Codimension"),
    variety: str = VarietyOption,
    output_format: Optional[str] = FormatOption,
    out: Optional[Path] = OutOption,
):
    """List the normal monomials of a codimension on X^m."""
    output_format = _check_format(output_format)
    try:
        model = model_from_spec(variety)
        monomials = normal_basis(m, codim, relation_table(model))
    except (FanoMckError, ValueError) as e:
        raise _usage_error(e)
    values = {
        "variety": model.display_name,
        "m": m,
        "codim": codim,
        "count": len(monomials),
        "monomials": [monomial.pretty() for monomial in monomials],
    }
    _emit_values(values, output_format or "text", out)


@app.command("model-info")
def model_info(
    variety: str = VarietyOption,
    output_format: Optional[str] = FormatOption,
    out: Optional[Path] = OutOption,
):
    """Describe a variety model: basis, Betti numbers, Euler characteristic, top integral."""
    output_format = _check_format(output_format)
    try:
        model = model_from_spec(variety)
    except (FanoMckError, ValueError) as e:
        raise _usage_error(e)
    values = {
        "variety": model.display_name,
        "description": VARIETY_LABELS.get(model.name, "custom tate-odd model"),
        "kind": model.kind,
        "dimension": model.dimension,
        "degree": model.degree,
        "odd_rank": model.odd_rank,
        "basis": [f"{element.label} (deg {element.degree})" for element in model.basis],
        **model_integrity(model),
    }
    _emit_values(values, output_format or "text", out)


if __name__ == "__main__":
    app()
