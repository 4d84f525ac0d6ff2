"""Command-line entry point: run, verify and sweep priority constructions"""

import logging
from pathlib import Path
from typing import Annotated, Optional

import typer

from .config import settings
from .harness import cmd_run, cmd_sweep, cmd_verify

logging.basicConfig(
    level=getattr(logging, settings.log_level.upper(), logging.INFO),
    format="%(asctime)s %(levelname)s %(name)s: %(message)s",
)
logger = logging.getLogger(__name__)

app = typer.Typer(
    help="Finite-injury priority construction of an isolated d.c.e. degree, with an independent verifier.",
    no_args_is_help=True,
    add_completion=False,
)


@app.command()
def run(
    config: Annotated[Path, typer.Option("--config", help="Run configuration (YAML)")],
    trace_out: Annotated[Path, typer.Option("--trace-out", help="Where to write the trace")],
    seed: Annotated[Optional[int], typer.Option("--seed", help="Override the config seed")] = None,
):
    """Run a construction and print its manifest."""
    code, manifest = cmd_run(config, trace_out, seed)
    if manifest is not None:
        typer.echo(manifest.to_json())
    raise typer.Exit(code)


@app.command()
def verify(
    trace: Annotated[Path, typer.Option("--trace", help="Trace produced by `run`")],
    config: Annotated[Path, typer.Option("--config", help="Run configuration the trace came from")],
    report_out: Annotated[Optional[Path], typer.Option("--report-out", help="Write CHK lines here")] = None,
):
    """Re-derive every invariant from a trace; exit 1 on any FAIL."""
    code, report = cmd_verify(trace, config, report_out)
    if report is not None:
        typer.echo(report.summary_table(), nl=False)
    raise typer.Exit(code)


@app.command()
def sweep(
    grid: Annotated[Path, typer.Option("--grid", help="Sweep grid (YAML)")],
    out: Annotated[Path, typer.Option("--out", help="Output directory for traces, manifests and summary.tsv")],
):
    """Run and verify every cell of a parameter grid, then print the aggregate table."""
    code, table = cmd_sweep(grid, out)
    if table is not None:
        typer.echo(table, nl=False)
    raise typer.Exit(code)


if __name__ == "__main__":
    app()
