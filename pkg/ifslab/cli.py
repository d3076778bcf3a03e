"""CLI interface for ifslab."""

import json
import sys
import time
from datetime import datetime
from pathlib import Path
from typing import Optional

import click
from rich import box
from rich.console import Console
from rich.markup import escape
from rich.panel import Panel
from rich.table import Table

from . import __version__
from .config import SystemSpec, emit_config, load_config, spec_hash
from .database import init_db, recent_runs, record_run
from .errors import IFSLabError
from .log import configure_logging
from .reports import summary_items
from .runner import SUBCOMMANDS, RunOutcome, exit_code, run

console = Console()

U64 = click.IntRange(0, 2**64 - 1)


@click.group()
@click.version_option(version=__version__)
@click.option("--verbose", "-v", is_flag=True, help="Debug logging")
def main(verbose: bool):
    """ifslab - numerical experiments for random circle homeomorphisms."""
    configure_logging(verbose)


def _format_value(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, list):
        return ", ".join(_format_value(v) for v in value)
    return "-" if value is None else str(value)


def _summary(outcome: RunOutcome) -> None:
    table = Table(box=box.ROUNDED, show_header=False)
    table.add_column("Field", style="cyan")
    table.add_column("Value")
    for key, value in summary_items(outcome.payload):
        if key == "verdict":
            continue
        if isinstance(value, list) and len(value) > 8:
            value = f"[{len(value)} values]"
        table.add_row(key, _format_value(value))
    console.print(Panel(table, title=f"[bold]{outcome.subcommand}[/bold]: {outcome.verdict}", border_style="green"))
    for path in outcome.files:
        console.print(f"  [dim]wrote[/dim] {path}")


def _fail(exc: Exception) -> None:
    console.print(f"[red]Error:[/red] {escape(str(exc))}")
    hint = getattr(exc, "hint", None)
    if hint:
        console.print(f"[yellow]Hint:[/yellow] {escape(hint)}")


def _execute(subcommand: str, config: str, out: str, seed: int, fmt: str, workers: int) -> None:
    started_at = datetime.utcnow()
    started = time.perf_counter()
    spec: Optional[SystemSpec] = None
    outcome: Optional[RunOutcome] = None
    error: Optional[Exception] = None
    try:
        spec = load_config(config)
        outcome = run(subcommand, spec, Path(out), fmt, seed, workers)
    except IFSLabError as exc:
        error = exc
    except (OSError, ValueError) as exc:
        error = exc

    code = exit_code(error)
    if error is None:
        _summary(outcome)
    else:
        _fail(error)

    try:
        record_run(
            subcommand,
            code,
            spec_hash=None if spec is None else spec_hash(spec),
            master_seed=seed,
            workers=workers,
            output_format=fmt,
            out_dir=str(out),
            verdict=outcome.verdict if outcome else str(error),
            output_files=[str(p) for p in outcome.files] if outcome else [],
            started_at=started_at,
            duration_s=time.perf_counter() - started,
        )
    except Exception as exc:  # the ledger never changes the exit code
        console.print(f"[dim]run ledger unavailable: {escape(str(exc))}[/dim]")
    sys.exit(code)


def _experiment(name: str, help_text: str) -> None:
    @main.command(name, help=help_text)
    @click.option("--config", "-c", "config", required=True, type=click.Path(dir_okay=False), help="System config (JSON)")
    @click.option("--out", "-o", "out", default="results", show_default=True, type=click.Path(file_okay=False),
                  help="Output directory")
    @click.option("--seed", "-s", default=0, type=U64, show_default=True, help="Master seed (u64)")
    @click.option("--format", "-f", "fmt", default="json", show_default=True, type=click.Choice(["csv", "json"]))
    @click.option("--workers", "-w", default=1, show_default=True, type=click.IntRange(min=1),
                  help="Worker processes; results do not depend on it")
    def command(config: str, out: str, seed: int, fmt: str, workers: int):
        _execute(name, config, out, seed, fmt, workers)


HELP = {
    "validate": "Check maps, probabilities and observables.",
    "simulate": "Sample one trajectory of the chain.",
    "stationary": "Estimate the invariant measure and its support.",
    "dual": "Evaluate U^n f at a point, exactly and by Monte Carlo.",
    "eprop": "Equicontinuity profile of the iterates U^n f.",
    "sync": "Contraction certificate, hitting parameters and minimality evidence.",
    "stability": "Distance between the laws started at two points.",
    "unique": "Evidence that the invariant measure is unique.",
    "mw": "Growth of the uniform partial sums and the Maxwell-Woodroofe series.",
    "clt": "Normality of normalized Birkhoff sums.",
    "couple": "Pair symbol sequences from two starts and check the partial-sum bound.",
    "chi": "Non-expansiveness of U in the metric built from the inverse system.",
}

for _name in SUBCOMMANDS:
    _experiment(_name, HELP[_name])


@main.command("emit-config")
@click.option("--config", "-c", "config", required=True, type=click.Path(dir_okay=False), help="System config (JSON)")
def emit_config_cmd(config: str):
    """Print the config with every default filled in."""
    try:
        spec = load_config(config)
    except (IFSLabError, OSError) as exc:
        _fail(exc)
        sys.exit(1)
    click.echo(emit_config(spec), nl=False)


@main.command()
@click.option("--limit", "-n", default=20, show_default=True, help="Number of runs to show")
@click.option("--json", "as_json", is_flag=True, help="Output as JSON")
def history(limit: int, as_json: bool):
    """Show recent runs from the ledger."""
    init_db()
    runs = recent_runs(limit)

    if as_json:
        click.echo(json.dumps([r.to_dict() for r in runs], indent=2))
        return

    if not runs:
        console.print("[yellow]No runs recorded yet.[/yellow]")
        return

    table = Table(title="Recent runs", box=box.ROUNDED)
    table.add_column("#", justify="right")
    table.add_column("Subcommand", style="cyan")
    table.add_column("Exit", justify="right")
    table.add_column("Seed")
    table.add_column("Spec", style="dim")
    table.add_column("Started")
    table.add_column("Time", justify="right")
    table.add_column("Verdict")

    for r in runs:
        color = {0: "green", 2: "yellow"}.get(r.exit_code, "red")
        table.add_row(
            str(r.id),
            r.subcommand,
            f"[{color}]{r.exit_code}[/{color}]",
            r.master_seed or "-",
            (r.spec_hash or "-")[:12],
            r.started_at.strftime("%Y-%m-%d %H:%M") if r.started_at else "-",
            f"{r.duration_s:.1f}s" if r.duration_s is not None else "-",
            escape((r.verdict or "")[:60]),
        )
    console.print(table)


if __name__ == "__main__":
    main()
