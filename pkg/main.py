#!/usr/bin/env python3
"""
KMS Trace Classifier - Equilibrium states of Nica-Toeplitz algebras over
right-angled Artin monoids
Main CLI entry point using the modular architecture
"""

import logging
from pathlib import Path
from typing import Any, Dict, Optional

import typer

# Import configuration
from config import config

# Import utilities
from utils.logger import setup_logging, get_logger
from utils.output_formatter import format_output, OutputFormat

# Import commands
from commands.atoms import AtomsCommand
from commands.base_command import BaseCommand
from commands.check import CheckCommand
from commands.critical import CriticalCommand
from commands.decompose import DecomposeCommand
from commands.sweep import SweepCommand
from commands.verify_example import VerifyExampleCommand
from commands.wold import WoldCommand

# Setup logging
setup_logging(config.log_level)
logger = get_logger(__name__)

# Create Typer app
app = typer.Typer(
    help="KMS Trace Classifier - subinvariance, Wold decompositions and critical temperatures "
         "for transfer systems over right-angled Artin monoids",
    add_completion=False,
)


class CommandFactory:
    """Factory to create command instances by name"""

    command_map = {
        "check": CheckCommand,
        "wold": WoldCommand,
        "critical": CriticalCommand,
        "sweep": SweepCommand,
        "decompose": DecomposeCommand,
        "atoms": AtomsCommand,
        "verify-example": VerifyExampleCommand,
    }

    @classmethod
    def create_command(cls, name: str, params: Dict[str, Any]) -> BaseCommand:
        """Create a command instance by name"""
        command_class = cls.command_map.get(name)
        if command_class is None:
            raise typer.BadParameter(f"Unknown command {name!r}")
        return command_class(params)


MODEL = typer.Option(..., "--model", help="Path to the JSON model file")
TRACE = typer.Option(None, "--trace", help="Name of a trace stored in the model file")
TRACE_INLINE = typer.Option(None, "--trace-inline", help="Trace as comma-separated decimals")
BETA = typer.Option(..., "--beta", help="Inverse temperature")
TOL = typer.Option(None, "--tol", help="Positivity tolerance, relative to the trace mass")
BUDGET = typer.Option(None, "--budget", help="Work budget for Gibbs series (automaton steps)")
OUT = typer.Option(None, "--out", help="Write the report to this file instead of stdout")
FORMAT = typer.Option("json", "--format", help="Output format (json|csv|text|table)")
VERBOSE = typer.Option(False, "--verbose", "-v", help="Log progress to stderr")


def _run(name: str, params: Dict[str, Any], output_format: str, out: Optional[Path], verbose: bool) -> None:
    """Execute a command, emit its report and exit with the verdict's code"""
    if verbose:
        logging.getLogger().setLevel(logging.INFO)

    try:
        output_fmt = OutputFormat(output_format.lower())
    except ValueError:
        typer.echo(f"Unknown output format {output_format!r}; use json, csv, text or table", err=True)
        raise typer.Exit(code=2)

    cmd = CommandFactory.create_command(name, params)
    result = cmd.run()
    formatted_output = format_output(result, output_fmt)

    if out is not None:
        out.write_text(formatted_output + "\n", encoding="utf-8")
        logger.info("Report written to %s", out)
    else:
        typer.echo(formatted_output)
    raise typer.Exit(code=cmd.exit_code)


@app.command()
def check(
    model: Path = MODEL,
    trace: Optional[str] = TRACE,
    trace_inline: Optional[str] = TRACE_INLINE,
    beta: float = BETA,
    general_length: Optional[int] = typer.Option(
        None, "--general-length", help="Also check every J of elements up to this length"
    ),
    extended: bool = typer.Option(
        False, "--extended", help="Also report the NO condition, gauge evidence and monotonicity in beta"
    ),
    tol: Optional[float] = TOL,
    budget: Optional[int] = BUDGET,
    out: Optional[Path] = OUT,
    output_format: str = FORMAT,
    verbose: bool = VERBOSE,
):
    """Check the subinvariance inequalities of a trace at one beta"""
    params = {"model": str(model), "trace": trace, "trace_inline": trace_inline, "beta": beta,
              "general_length": general_length, "extended": extended, "tol": tol, "budget": budget}
    _run("check", params, output_format, out, verbose)


@app.command()
def wold(
    model: Path = MODEL,
    trace: Optional[str] = TRACE,
    trace_inline: Optional[str] = TRACE_INLINE,
    beta: float = BETA,
    tol: Optional[float] = TOL,
    budget: Optional[int] = BUDGET,
    out: Optional[Path] = OUT,
    output_format: str = FORMAT,
    verbose: bool = VERBOSE,
):
    """Split a subinvariant trace into its finite and infinite parts"""
    params = {"model": str(model), "trace": trace, "trace_inline": trace_inline, "beta": beta,
              "tol": tol, "budget": budget}
    _run("wold", params, output_format, out, verbose)


@app.command()
def critical(
    model: Path = MODEL,
    out: Optional[Path] = OUT,
    output_format: str = FORMAT,
    verbose: bool = VERBOSE,
):
    """Report the critical inverse temperature and a witness trace at it"""
    _run("critical", {"model": str(model)}, output_format, out, verbose)


@app.command()
def sweep(
    model: Path = MODEL,
    trace: Optional[str] = TRACE,
    trace_inline: Optional[str] = TRACE_INLINE,
    beta_range: str = typer.Option(..., "--beta-range", help="Grid A:B:N with A < B and N >= 2"),
    workers: int = typer.Option(1, "--workers", help="Threads computing rows"),
    tol: Optional[float] = TOL,
    budget: Optional[int] = BUDGET,
    out: Optional[Path] = OUT,
    output_format: str = typer.Option("csv", "--format", help="Output format (csv|json|text|table)"),
    verbose: bool = VERBOSE,
):
    """Tabulate subinvariance, Wold masses and the smallest singular value of T_beta over a beta grid"""
    params = {"model": str(model), "trace": trace, "trace_inline": trace_inline,
              "beta_range": beta_range, "workers": workers, "tol": tol, "budget": budget}
    _run("sweep", params, output_format, out, verbose)


@app.command()
def decompose(
    model: Path = MODEL,
    trace: Optional[str] = TRACE,
    trace_inline: Optional[str] = TRACE_INLINE,
    beta: float = BETA,
    tol: Optional[float] = TOL,
    budget: Optional[int] = BUDGET,
    out: Optional[Path] = OUT,
    output_format: str = FORMAT,
    verbose: bool = VERBOSE,
):
    """Emit the 2^n finite/infinite product components of a trace (complete graphs)"""
    params = {"model": str(model), "trace": trace, "trace_inline": trace_inline, "beta": beta,
              "tol": tol, "budget": budget}
    _run("decompose", params, output_format, out, verbose)


@app.command()
def atoms(
    model: Path = MODEL,
    trace: Optional[str] = TRACE,
    trace_inline: Optional[str] = TRACE_INLINE,
    beta: float = BETA,
    length: Optional[int] = typer.Option(None, "--length", help="Largest word length listed"),
    tol: Optional[float] = TOL,
    budget: Optional[int] = BUDGET,
    out: Optional[Path] = OUT,
    output_format: str = FORMAT,
    verbose: bool = VERBOSE,
):
    """List the atom weights of the measure attached to a subinvariant trace"""
    params = {"model": str(model), "trace": trace, "trace_inline": trace_inline, "beta": beta,
              "length": length, "tol": tol, "budget": budget}
    _run("atoms", params, output_format, out, verbose)


@app.command("verify-example")
def verify_example(
    example: str = typer.Argument(..., help="optimal | kgraph | blrs (alias free-semigroup)"),
    n: Optional[int] = typer.Option(None, "--n", help="Generators for the optimal example"),
    subset: Optional[str] = typer.Option(None, "--subset", help="1-based index set I, e.g. 1,2"),
    alpha: Optional[float] = typer.Option(None, "--alpha", help="Weight on I, greater than 2"),
    samples: Optional[int] = typer.Option(None, "--samples", help="Random k-graphs to test"),
    seed: int = typer.Option(0, "--seed", help="Seed for random k-graphs"),
    out: Optional[Path] = OUT,
    output_format: str = FORMAT,
    verbose: bool = VERBOSE,
):
    """Rerun a reference scenario and report whether it reproduces"""
    params = {"example": example, "n": n, "subset": subset, "alpha": alpha,
              "samples": samples, "seed": seed}
    _run("verify-example", params, output_format, out, verbose)


@app.command()
def setup():
    """Write a .env template with the numerical settings"""
    typer.echo("🚀 Setting up KMS Trace Classifier...")

    env_template = """# KMS Trace Classifier configuration (all optional)
KMS_POSITIVITY_TOL=1e-9
KMS_RESIDUAL_TOL=1e-8
KMS_COMMUTATION_TOL=1e-9
KMS_TRACE_SLACK=1e-12

# Gibbs series
KMS_SERIES_TOL=1e-13
KMS_SERIES_BUDGET=1000000
KMS_SERIES_MAX_LEVELS=10000

# Subset enumeration
KMS_SUBSET_CAP=20
KMS_GENERAL_SUBSET_SIZE=4
KMS_GENERAL_MAX_SUBSETS=2000000
KMS_AUDIT_LENGTH=6

# Spectral analysis
KMS_SPECTRAL_TOL=1e-10
KMS_SPECTRAL_MAX_ITER=10000
KMS_BISECTION_TOL=1e-6
KMS_CONDITION_MAX=1e12

# Gauge check and atoms
KMS_GAUGE_DELTA=0.1
KMS_DECAY_LENGTH=8
KMS_ATOM_LENGTH=8

KMS_LOG_LEVEL=WARNING
"""

    env_file = Path('.env')
    if not env_file.exists():
        env_file.write_text(env_template, encoding='utf-8')
        typer.echo("✅ Created .env file template")
    else:
        typer.echo("⚠️  .env file already exists")

    if config.validate():
        typer.echo("✅ Configuration validation passed")
    else:
        typer.echo("❌ Configuration validation failed")
        typer.echo("   Please check your .env file settings")
        raise typer.Exit(code=2)


if __name__ == "__main__":
    app()
