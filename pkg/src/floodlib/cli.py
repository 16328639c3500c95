"""Typer-based CLI for floodlib."""

import json
import logging
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Callable, Iterator, List, Optional

import typer
from pydantic import ValidationError as PydanticValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from rich.progress import BarColumn, Progress, TextColumn, TimeElapsedColumn
from rich.table import Table

from .errors import ConfigError, FloodlibError, SchemaError
from .ledger import read_ledger_tail

app = typer.Typer(
    name="floodlib",
    help="floodlib - Flood, iFlood and AdaFlood training with auxiliary flood-level estimation",
    add_completion=False,
)

console = Console()

EXIT_CONFIG = 2
EXIT_RUNTIME = 3

ConfigOption = typer.Option(..., "--config", "-c", help="Experiment config (JSON)")
SeedOption = typer.Option(None, "--seed", help="Run a single seed instead of the config's seed list")
OutOption = typer.Option(None, "--out", help="Output directory (overrides FLOODLIB_OUT_DIR and config)")
WorkersOption = typer.Option(None, "--workers", help="Concurrent fold/seed runs")
SetOption = typer.Option(None, "--set", help="Override a top-level config key: key=value (JSON values accepted)")
VerboseOption = typer.Option(False, "--verbose", help="Debug logging")


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


@contextmanager
def _progress() -> Iterator[Callable[[int, int, str], None]]:
    with Progress(
        TextColumn("{task.description}"),
        BarColumn(),
        TextColumn("{task.completed}/{task.total}"),
        TimeElapsedColumn(),
        console=console,
        transient=True,
    ) as progress:
        tasks: dict[str, int] = {}

        def _on_progress(done: int, total: int, label: str) -> None:
            if label not in tasks:
                tasks[label] = progress.add_task(label, total=total)
            progress.update(tasks[label], completed=done, total=total)

        yield _on_progress


def _run(
    command: Callable,
    config: Path,
    *,
    seed: Optional[int],
    out: Optional[str],
    workers: Optional[int],
    overrides: Optional[List[str]],
    verbose: bool,
):
    """Load config, run ``command(ctx)``, and map failures to exit codes."""
    from .config import load_experiment_config
    from .experiments.runner import ExperimentContext

    _configure_logging(verbose)
    try:
        cfg = load_experiment_config(config, seed=seed, out_dir=out, workers=workers, overrides=overrides)
        with _progress() as on_progress:
            ctx = ExperimentContext.create(cfg, on_progress=on_progress)
            return ctx, command(ctx)
    except (ConfigError, SchemaError, PydanticValidationError) as e:
        console.print(f"[red]Error:[/red] {escape(str(e))}")
        raise typer.Exit(code=EXIT_CONFIG)
    except FloodlibError as e:
        fold = getattr(e, "fold_index", None)
        suffix = f" (fold {fold})" if fold is not None else ""
        console.print(f"[red]Error:[/red] {escape(str(e))}{suffix}")
        raise typer.Exit(code=EXIT_RUNTIME)
    except OSError as e:
        console.print(f"[red]Error:[/red] {escape(str(e))}")
        raise typer.Exit(code=EXIT_RUNTIME)


@app.command("gen-data")
def gen_data(
    config: Path = ConfigOption,
    seed: Optional[int] = SeedOption,
    out: Optional[str] = OutOption,
    workers: Optional[int] = WorkersOption,
    overrides: Optional[List[str]] = SetOption,
    verbose: bool = VerboseOption,
):
    """Generate or ingest the dataset and export every split as CSV."""
    from .experiments.runner import cmd_gen_data

    ctx, manifest = _run(cmd_gen_data, config, seed=seed, out=out, workers=workers, overrides=overrides, verbose=verbose)
    for name, info in manifest["splits"].items():
        console.print(f"[green]✓[/green] {name}: {info['rows']} rows ({info['noisy']} noisy) -> {ctx.paths.data_csv(name)}")
    console.print(f"[dim]Manifest: {ctx.paths.data_manifest}[/dim]")


@app.command("train-aux")
def train_aux(
    config: Path = ConfigOption,
    seed: Optional[int] = SeedOption,
    out: Optional[str] = OutOption,
    workers: Optional[int] = WorkersOption,
    overrides: Optional[List[str]] = SetOption,
    verbose: bool = VerboseOption,
):
    """Train fold auxiliary models and write the flood table."""
    from .experiments.runner import cmd_train_aux

    ctx, run = _run(cmd_train_aux, config, seed=seed, out=out, workers=workers, overrides=overrides, verbose=verbose)
    stats = run.table.describe()
    console.print(f"[green]✓[/green] Flood table: {ctx.paths.aux.flood_table_csv}")
    console.print(
        f"  samples={stats['count']} mean={stats.get('mean', 0.0):.4f} "
        f"median={stats.get('quantiles', {}).get('p50', 0.0):.4f} mode={run.table.created_by.mode}"
    )
    console.print(f"[dim]Auxiliary training took {run.aux.seconds:.2f}s[/dim]")


@app.command("train")
def train_cmd(
    config: Path = ConfigOption,
    seed: Optional[int] = SeedOption,
    out: Optional[str] = OutOption,
    workers: Optional[int] = WorkersOption,
    overrides: Optional[List[str]] = SetOption,
    verbose: bool = VerboseOption,
):
    """Train the main model for every configured method and seed."""
    from .experiments.runner import cmd_train

    ctx, result = _run(cmd_train, config, seed=seed, out=out, workers=workers, overrides=overrides, verbose=verbose)
    table = Table(title=f"{result.name} ({result.task})")
    table.add_column("Method", style="cyan")
    table.add_column("Variant", style="magenta")
    table.add_column("Selected", style="yellow")
    metric_names = list(result.methods[0].mean) if result.methods else []
    for name in metric_names:
        table.add_column(name)
    for method in result.methods:
        selected = "-" if method.selected is None else f"{method.selected:g}"
        cells = [f"{method.mean[n]:.4f} ± {method.stderr[n]:.4f}" for n in metric_names]
        table.add_row(method.name, method.variant, selected, *cells)
    console.print(table)
    console.print(f"[dim]Summary: {ctx.paths.summary_file}[/dim]")


@app.command("evaluate")
def evaluate(
    config: Path = ConfigOption,
    seed: Optional[int] = SeedOption,
    out: Optional[str] = OutOption,
    workers: Optional[int] = WorkersOption,
    overrides: Optional[List[str]] = SetOption,
    verbose: bool = VerboseOption,
):
    """Evaluate trained checkpoints on the clean test split."""
    from .experiments.runner import cmd_evaluate

    ctx, report = _run(cmd_evaluate, config, seed=seed, out=out, workers=workers, overrides=overrides, verbose=verbose)
    for name, entry in report["methods"].items():
        values = ", ".join(f"{k}={v:.4f}" for k, v in entry["mean"].items())
        console.print(f"[cyan]{name}[/cyan]: {values}")
    console.print(f"[dim]Evaluation: {ctx.paths.evaluation_file}[/dim]")


@app.command("calibrate")
def calibrate(
    config: Path = ConfigOption,
    seed: Optional[int] = SeedOption,
    out: Optional[str] = OutOption,
    workers: Optional[int] = WorkersOption,
    overrides: Optional[List[str]] = SetOption,
    verbose: bool = VerboseOption,
):
    """Write reliability data and ECE per method and seed."""
    from .experiments.calibration import cmd_calibrate

    ctx, summary = _run(cmd_calibrate, config, seed=seed, out=out, workers=workers, overrides=overrides, verbose=verbose)
    table = Table(title=f"ECE ({summary['bins']} bins)")
    table.add_column("Method", style="cyan")
    table.add_column("Mean ECE")
    table.add_column("Std. error")
    for row in summary["methods"]:
        table.add_row(row["method"], f"{row['mean_ece']:.4f}", f"{row['stderr_ece']:.4f}")
    console.print(table)
    console.print(f"[dim]Summary: {ctx.paths.calibration_summary_file}[/dim]")


@app.command("proposition-check")
def proposition_check(
    config: Path = ConfigOption,
    seed: Optional[int] = SeedOption,
    out: Optional[str] = OutOption,
    workers: Optional[int] = WorkersOption,
    overrides: Optional[List[str]] = SetOption,
    verbose: bool = VerboseOption,
):
    """Check the AdaFlood minimizer relations on lookup-table models."""
    from .experiments.proposition import cmd_proposition_check

    ctx, report = _run(
        cmd_proposition_check, config, seed=seed, out=out, workers=workers, overrides=overrides, verbose=verbose
    )
    for seed_key, entry in report["seeds"].items():
        mark = "[green]✓[/green]" if entry["passed"] else "[red]✗[/red]"
        console.print(
            f"{mark} seed {seed_key}: L_ada(erm)/L(bayes)={entry['erm_to_bayes_ratio']:.6f} "
            f"doubled={entry['doubled_ratio']:.6f}"
        )
        for check, ok in entry["checks"].items():
            if not ok:
                console.print(f"    [red]failed:[/red] {check}")
    console.print(f"[dim]Report: {ctx.paths.proposition_file}[/dim]")
    if not report["passed"]:
        raise typer.Exit(code=EXIT_RUNTIME)


@app.command("ablate-finetune")
def ablate_finetune(
    config: Path = ConfigOption,
    seed: Optional[int] = SeedOption,
    out: Optional[str] = OutOption,
    workers: Optional[int] = WorkersOption,
    overrides: Optional[List[str]] = SetOption,
    verbose: bool = VerboseOption,
):
    """Compare fine-tuned and scratch auxiliary models."""
    from .experiments.ablation import cmd_ablation_finetune
    from .jsonio import read_json

    ctx, report = _run(
        cmd_ablation_finetune, config, seed=seed, out=out, workers=workers, overrides=overrides, verbose=verbose
    )
    seconds = read_json(ctx.paths.ablation_timings_file)["seconds"]
    table = Table(title=f"Auxiliary modes (gamma={report['gamma']})")
    table.add_column("Mode", style="cyan")
    table.add_column("Seconds")
    table.add_column("Spearman vs scratch")
    for label, entry in report["modes"].items():
        table.add_row(label, f"{seconds[label]:.2f}", f"{entry['spearman_vs_scratch']:.3f}")
    console.print(table)
    console.print(f"[dim]Report: {ctx.paths.ablation_file}[/dim]")


@app.command("motivation")
def motivation(
    config: Path = ConfigOption,
    seed: Optional[int] = SeedOption,
    out: Optional[str] = OutOption,
    workers: Optional[int] = WorkersOption,
    overrides: Optional[List[str]] = SetOption,
    verbose: bool = VerboseOption,
):
    """Memorized versus held-out per-sample losses on the toy Gaussian."""
    from .experiments.motivation import cmd_motivation

    ctx, report = _run(cmd_motivation, config, seed=seed, out=out, workers=workers, overrides=overrides, verbose=verbose)
    counts = ", ".join(f"{name}={count}" for name, count in report["counts"].items())
    table = Table(title=f"Median mislabeled vs regular losses ({counts})")
    table.add_column("Seed", style="cyan")
    table.add_column("Memorized (mislabeled)")
    table.add_column("Held out (mislabeled)")
    table.add_column("CV theta regular")
    table.add_column("CV theta mislabeled")
    table.add_column("Margin", style="magenta")

    def _fmt(value: Optional[float]) -> str:
        return "-" if value is None else f"{value:.4f}"

    for run in report["seeds"]:
        theta = run["cv_theta"]["median"]
        table.add_row(
            str(run["seed"]),
            _fmt(run["memorized"]["final_median"].get("mislabeled")),
            _fmt(run["held_out"]["final_median"].get("mislabeled")),
            _fmt(theta.get("regular")),
            _fmt(theta.get("mislabeled")),
            _fmt(run["cv_theta"]["margin"]),
        )
    console.print(table)
    worst = report["worst_case"]
    console.print(
        f"Worst case: memorized mislabeled {_fmt(worst['memorized_mislabeled_final'])}, "
        f"CV theta margin {_fmt(worst['cv_theta_margin'])}"
    )
    console.print(f"[dim]Report: {ctx.paths.motivation_file}[/dim]")


ledger_app = typer.Typer(help="Ledger commands")
app.add_typer(ledger_app, name="ledger")


@ledger_app.command("tail")
def ledger_tail(
    config: Path = ConfigOption,
    out: Optional[str] = OutOption,
    n: int = typer.Option(20, "--n", help="Number of recent events to display"),
    full: bool = typer.Option(False, "--full", help="Show full payloads with JSON pretty-print"),
    event_type: Optional[str] = typer.Option(None, "--type", help="Only show events of this type"),
):
    """Display the last N events from an experiment's ledger."""
    from .config import load_experiment_config
    from .paths import ExperimentPaths

    try:
        cfg = load_experiment_config(config, out_dir=out)
    except ConfigError as e:
        console.print(f"[red]Error:[/red] {escape(str(e))}")
        raise typer.Exit(code=EXIT_CONFIG)

    events = read_ledger_tail(ExperimentPaths(cfg.out_dir, cfg.name).ledger_file, n=n, event_type=event_type)
    if not events:
        console.print("[dim]No events in ledger[/dim]")
        return

    if full:
        for i, event in enumerate(events, 1):
            console.print(f"[cyan]Event {i}/{len(events)}[/cyan] [magenta]{event.event_type}[/magenta]")
            console.print(f"  [dim]Timestamp:[/dim] {event.ts.strftime('%Y-%m-%d %H:%M:%S')} UTC")
            for line in json.dumps(event.payload, indent=2, sort_keys=True).split("\n"):
                console.print(f"    {line}")
        return

    table = Table(title=f"Last {len(events)} Ledger Event(s)")
    table.add_column("Timestamp (UTC)", style="cyan", no_wrap=True)
    table.add_column("Event Type", style="magenta")
    table.add_column("Payload", style="dim")
    for event in events:
        payload_str = str(event.payload)
        if len(payload_str) > 60:
            payload_str = payload_str[:57] + "..."
        table.add_row(event.ts.strftime("%Y-%m-%d %H:%M:%S"), event.event_type, payload_str)
    console.print(table)


@app.command()
def version():
    """Print the floodlib version."""
    from . import __version__

    console.print(f"floodlib v{__version__}")


def main():
    """Entry point for the CLI."""
    if len(sys.argv) == 2 and sys.argv[1] in ("--version", "-v"):
        from . import __version__

        console.print(f"floodlib v{__version__}")
        sys.exit(0)

    app()


if __name__ == "__main__":
    main()
