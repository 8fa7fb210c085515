"""Command line interface for gfsdro."""

import sys
from pathlib import Path

import click
from rich.markup import escape

from gfsdro.core import compare_methods, run_experiment, run_gradcheck, run_oracle_suite
from gfsdro.display import (
    console,
    display_artifact,
    display_errors,
    display_gradcheck,
    display_spec,
    display_table,
)
from gfsdro.harness import load_spec, serialize_spec, validate_spec
from gfsdro.utils import Error, SpecValidationError, get_logger, setup_logging

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_FAILURE = 2


def _fail(error: Exception):
    if isinstance(error, SpecValidationError):
        display_errors(error.errors, Path("spec"))
        sys.exit(EXIT_INVALID)
    if not isinstance(error, Error):
        logger.debug(f"Unexpected failure: {error!r}", exc_info=True)
    console.print(f"[red bold]Error:[/red bold] {escape(str(error))}")
    sys.exit(EXIT_FAILURE)


@click.group()
@click.option("--debug", is_flag=True, help="Enable debug logging")
@click.option("--no-log-file", is_flag=True, help="Log to the console only")
@click.pass_context
def main(ctx, debug, no_log_file):
    """Gradient-flow samplers for entropic Wasserstein DRO."""
    # Initialize logging early
    logger = setup_logging(debug=debug, log_to_file=not no_log_file)

    # Store debug setting in context for subcommands
    ctx.ensure_object(dict)
    ctx.obj["DEBUG"] = debug
    ctx.obj["LOGGER"] = logger


@main.command("run")
@click.argument("spec", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--output-dir", type=click.Path(path_type=Path), help="Override the spec's output directory")
@click.option("--progress/--no-progress", default=True, help="Show a progress bar")
def run_command(spec: Path, output_dir: Path, progress: bool):
    """Run one experiment spec and write its CSV tables"""
    try:
        artifact = run_experiment(load_spec(spec), output_dir, progress)
    except Exception as e:
        _fail(e)
    display_artifact(artifact)


@main.command("compare")
@click.argument("specs", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--output-dir", type=click.Path(path_type=Path), help="Directory for comparison.csv")
@click.option("--progress/--no-progress", default=True, help="Show progress bars")
def compare_command(specs, output_dir: Path, progress: bool):
    """Run several specs on the same data and join their metrics"""
    try:
        loaded = [load_spec(path) for path in specs]
        table = compare_methods(loaded, output_dir, progress)
    except Exception as e:
        _fail(e)
    display_table(table, "comparison.csv")


@main.command("validate")
@click.argument("spec", type=click.Path(exists=True, dir_okay=False, path_type=Path))
def validate_command(spec: Path):
    """Validate a spec without running it"""
    result = validate_spec(spec.read_text(encoding="utf-8"))
    if result.is_err():
        display_errors(result.err_value, spec)
        sys.exit(EXIT_INVALID)
    display_spec(result.ok_value, spec)
    # plain echo: rich markup would swallow the [section] headers
    click.echo(serialize_spec(result.ok_value))


@main.command("gradcheck")
@click.option("--points", type=int, default=20, help="Random points per loss family")
@click.option("--seed", type=int, default=0, help="Seed of the random points")
@click.option("--tolerance", type=float, default=1e-5, help="Largest accepted relative error")
def gradcheck_command(points: int, seed: int, tolerance: float):
    """Compare analytic loss gradients with central differences"""
    reports = run_gradcheck(points, seed)
    display_gradcheck(reports, tolerance)
    if not all(report.passed(tolerance) for report in reports):
        sys.exit(EXIT_FAILURE)


@main.command("oracle")
@click.option("--output-dir", type=click.Path(path_type=Path), help="Directory for sampler_oracle.csv")
@click.option("--seed", type=int, default=0, help="Sampler seed")
def oracle_command(output_dir: Path, seed: int):
    """Check the samplers against the closed-form Gaussian worst case"""
    try:
        table = run_oracle_suite(output_dir, seed)
    except Exception as e:
        _fail(e)
    display_table(table, "sampler_oracle.csv")
    if not (table["mean_ok"].all() and table["variance_ok"].all()):
        sys.exit(EXIT_FAILURE)


if __name__ == "__main__":
    main()
