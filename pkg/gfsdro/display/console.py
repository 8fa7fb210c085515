"""Console rendering for gfsdro runs."""

from pathlib import Path
from typing import List, Sequence

import pandas as pd
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from gfsdro.harness import ExperimentSpec, RunArtifact
from gfsdro.losses import GradCheckReport
from gfsdro.utils import get_logger

# Setup console for rich output
console = Console()
logger = get_logger(__name__)


def display_spec(spec: ExperimentSpec, source: Path):
    """Summarize a validated spec"""
    lines = [
        f"[bold blue]Spec file:[/bold blue] [cyan]{source}[/cyan]",
        f"[bold blue]Experiment:[/bold blue] [yellow]{spec.experiment}[/yellow]",
        f"[bold blue]Method:[/bold blue] [yellow]{spec.method}[/yellow]",
        f"[bold blue]tau / epsilon:[/bold blue] [green]{spec.params.tau} / {spec.params.epsilon}[/green]",
        f"[bold blue]Seed:[/bold blue] [magenta]{spec.seed}[/magenta]",
    ]
    if spec.sampler is not None:
        lines.append(
            f"[bold blue]Inner loop:[/bold blue] eta={spec.sampler.eta}, T={spec.sampler.T}, m={spec.sampler.m}"
        )
    console.print(Panel("\n".join(lines), title="Valid spec", border_style="bright_blue"))


def display_errors(errors: Sequence[str], source: Path):
    console.print(f"[red bold]Invalid spec {source}[/red bold]")
    for error in errors:
        console.print(f"  [red]-[/red] {error}")


def display_table(frame: pd.DataFrame, title: str, max_rows: int = 20):
    """Render a metric table with 6 significant digits"""
    table = Table(
        title=title,
        title_style="bold blue",
        header_style="bold cyan",
        border_style="bright_blue",
    )
    for column in frame.columns:
        table.add_column(str(column), justify="right")

    for _, row in frame.head(max_rows).iterrows():
        table.add_row(*[_format_cell(value) for value in row.tolist()])

    console.print(table)
    if len(frame) > max_rows:
        console.print(f"[dim italic](Showing {max_rows} of {len(frame)} rows)[/dim italic]")


def _format_cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def display_artifact(artifact: RunArtifact):
    for name, frame in artifact.tables.items():
        display_table(frame, name)
    console.print(f"[green]Artifacts in[/green] [cyan]{artifact.output_dir}[/cyan]")


def display_gradcheck(reports: List[GradCheckReport], tolerance: float = 1e-5):
    table = Table(title="Gradient check", title_style="bold blue", header_style="bold cyan")
    table.add_column("Family")
    table.add_column("Points", justify="right")
    table.add_column("max rel. err grad_theta", justify="right")
    table.add_column("max rel. err grad_input", justify="right")
    table.add_column("Status", justify="center")

    for report in reports:
        status = "[green]ok[/green]" if report.passed(tolerance) else "[red]FAIL[/red]"
        table.add_row(
            report.family,
            str(report.n_points),
            _format_error(report.max_theta_error),
            _format_error(report.max_input_error),
            status,
        )
    console.print(table)


def _format_error(value) -> str:
    return "-" if value is None else f"{value:.2e}"
