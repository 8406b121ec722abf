"""CLI interface for PointPatchRL - train, evaluate, reconstruct, benchmark"""

import functools
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

import click
from rich.console import Console
from rich.panel import Panel
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table

from src.api import (
    create_stub,
    run_benchmark,
    run_evaluation,
    run_export_trace,
    run_pretrain_aux,
    run_reconstruction,
    run_training,
)
from src.errors import ConfigError, PPRLError
from src.models.config import EnvName
from src.models.settings import RuntimeSettings, apply_thread_cap
from src.orchestrator import KERNELS

console = Console()
logger = logging.getLogger(__name__)

EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _configure_logging(level: str):
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )


def handle_errors(command):
    """Map library errors to exit codes: 2 for config problems, 3 for everything else"""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except ConfigError as e:
            console.print(f"[red]Config error: {e}[/red]")
            logger.error(f"Config error: {e}")
            sys.exit(EXIT_CONFIG)
        except PPRLError as e:
            console.print(f"[red]Error: {e}[/red]")
            logger.error(f"{type(e).__name__}: {e}")
            sys.exit(EXIT_RUNTIME)
        except (OSError, RuntimeError, ValueError) as e:
            console.print(f"[red]Error: {e}[/red]")
            logger.exception("Unexpected failure")
            sys.exit(EXIT_RUNTIME)

    return wrapper


def _parse_sizes(ctx, param, value: str) -> List[int]:
    try:
        sizes = [int(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got {value!r}")
    if not sizes:
        raise click.BadParameter("at least one size is required")
    if any(size < 1 for size in sizes):
        raise click.BadParameter("sizes must be >= 1")
    return sizes


def _ci(interval) -> str:
    return f"[{interval[0]:.3f}, {interval[1]:.3f}]"


@click.group()
@click.option(
    '--log-level',
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default=None,
    help="Log level (default: PPRL_LOG_LEVEL or INFO)"
)
def cli(log_level: Optional[str]):
    """PointPatchRL - reinforcement learning on point-cloud patches

    Example:
        pprl train --config config/desk_point_reach.yaml
    """
    settings = RuntimeSettings()
    _configure_logging(log_level or settings.log_level)
    threads = apply_thread_cap(settings)
    logger.debug(f"Using {threads} numba threads")


@cli.command()
@click.option('--config', 'config_path', required=True, type=click.Path(exists=True, path_type=Path),
              help="Run config YAML")
@click.option('--resume', type=click.Path(exists=True, path_type=Path), help="Run checkpoint to continue from")
@click.option('--output', type=click.Path(path_type=Path), help="Overrides output_dir from the config")
@handle_errors
def train(config_path: Path, resume: Optional[Path], output: Optional[Path]):
    """Train an agent; writes metrics.csv, manifest.json, summary.json and checkpoints"""
    console.print(Panel(f"[bold blue]Training[/bold blue] {config_path}", border_style="blue"))
    with Progress(SpinnerColumn(), TextColumn("[progress.description]{task.description}"), console=console) as progress:
        task = progress.add_task("Training...", total=None)
        summary = run_training(config_path, resume=resume, output_dir=output)
        progress.update(task, description="Complete!")

    final = summary.get("final_eval")
    lines = [f"Steps: {summary['steps']}", f"Episodes: {summary['episodes']}"]
    if final:
        lines.append(f"Final success: {final['success_rate']:.3f} {_ci(final['success_ci'])}")
    console.print(Panel("\n".join(lines), title="Run complete", border_style="green"))


@cli.command(name="eval")
@click.option('--checkpoint', required=True, type=click.Path(exists=True, path_type=Path))
@click.option('--episodes', required=True, type=int)
@click.option('--seed', default=0, show_default=True, type=int)
@click.option('--env', 'env_name', type=click.Choice([e.value for e in EnvName]), help="Override the environment")
@click.option('--json', 'json_out', type=click.Path(path_type=Path), help="Also write the result as JSON")
@handle_errors
def evaluate(checkpoint: Path, episodes: int, seed: int, env_name: Optional[str], json_out: Optional[Path]):
    """Evaluate a checkpoint in deterministic mode with bootstrap 95% intervals"""
    result = run_evaluation(checkpoint, episodes, seed, env_name)

    table = Table(title=f"Evaluation of {checkpoint.name} ({episodes} episodes)")
    table.add_column("Metric", style="cyan")
    table.add_column("Mean", style="green")
    table.add_column("95% CI")
    table.add_row("Success rate", f"{result.success_rate:.3f}", _ci(result.success_ci))
    table.add_row("Return", f"{result.return_mean:.3f}", _ci(result.return_ci))
    console.print(table)

    if json_out:
        json_out.parent.mkdir(parents=True, exist_ok=True)
        json_out.write_text(json.dumps(result.to_dict(include_outcomes=True), indent=2), encoding="utf-8")


@cli.command()
@click.option('--checkpoint', required=True, type=click.Path(exists=True, path_type=Path))
@click.option('--cloud', required=True, type=click.Path(exists=True, path_type=Path), help="Point-cloud text file")
@click.option('--out', required=True, type=click.Path(path_type=Path), help="Output directory")
@click.option('--seed', default=0, show_default=True, type=int)
@handle_errors
def reconstruct(checkpoint: Path, cloud: Path, out: Path, seed: int):
    """Mask and reconstruct one cloud; prints per-patch Chamfer"""
    report = run_reconstruction(checkpoint, cloud, out, seed)

    table = Table(title=f"Reconstruction of {cloud.name}")
    table.add_column("Patch", justify="right")
    table.add_column("Hidden")
    table.add_column("Chamfer", style="green")
    if report.color is not None:
        table.add_column("Color", style="magenta")
    hidden = set(report.hidden_tokens)
    for i, value in enumerate(report.chamfer):
        row = [str(i), "yes" if i in hidden else "", f"{value:.6g}"]
        if report.color is not None:
            row.append(f"{report.color[i]:.6g}")
        table.add_row(*row)
    console.print(table)
    console.print(f"Mean Chamfer: [bold]{report.mean_chamfer:.6g}[/bold]  (files in [cyan]{out}[/cyan])")


@cli.command()
@click.option('--kernel', required=True, type=click.Choice(sorted(KERNELS)))
@click.option('--sizes', required=True, callback=_parse_sizes, help="Comma-separated point counts, e.g. 256,512,1024")
@click.option('--out', type=click.Path(path_type=Path), help="CSV output path")
@handle_errors
def bench(kernel: str, sizes: List[int], out: Optional[Path]):
    """Median-of-7 wall time of a kernel per size"""
    rows = run_benchmark(kernel, sizes, out)
    table = Table(title=f"{kernel} timings")
    table.add_column("Size", justify="right")
    table.add_column("Median (s)", style="green")
    table.add_column("Min (s)")
    table.add_column("Max (s)")
    for row in rows:
        table.add_row(str(row.size), f"{row.median_seconds:.3e}", f"{row.min_seconds:.3e}", f"{row.max_seconds:.3e}")
    console.print(table)


@cli.command()
@click.option('--out', required=True, type=click.Path(path_type=Path))
@click.option('--env', 'env_name', default=EnvName.POINT_REACH.value, type=click.Choice([e.value for e in EnvName]))
@click.option('--policy', default="scripted", type=click.Choice(["scripted", "random"]), show_default=True)
@click.option('--seed', default=0, show_default=True, type=int)
@handle_errors
def stub(out: Path, env_name: str, policy: str, seed: int):
    """Write a checkpoint holding a scripted-oracle or random policy"""
    path = create_stub(out, env_name, policy, seed)
    console.print(f"[green]Wrote {policy} stub for {env_name} to[/green] [cyan]{path}[/cyan]")


@cli.command(name="export-trace")
@click.option('--config', 'config_path', required=True, type=click.Path(exists=True, path_type=Path))
@click.option('--episodes', default=1, show_default=True, type=click.IntRange(min=1))
@click.option('--out', required=True, type=click.Path(path_type=Path))
@click.option('--checkpoint', type=click.Path(exists=True, path_type=Path), help="Policy (default: uniform random)")
@click.option('--seed', default=0, show_default=True, type=int)
@handle_errors
def export_trace(config_path: Path, episodes: int, out: Path, checkpoint: Optional[Path], seed: int):
    """Write every observation of some episodes as point-cloud files"""
    written = run_export_trace(config_path, out, episodes, checkpoint, seed)
    console.print(f"[green]Wrote {len(written)} observation files to[/green] [cyan]{out}[/cyan]")


@cli.command(name="pretrain-aux")
@click.option('--config', 'config_path', required=True, type=click.Path(exists=True, path_type=Path))
@click.option('--shapes', default=32, show_default=True, type=click.IntRange(min=1))
@click.option('--steps', default=2000, show_default=True, type=click.IntRange(min=0))
@click.option('--points', default=512, show_default=True, type=click.IntRange(min=1))
@click.option('--out', type=click.Path(path_type=Path), help="Encoder checkpoint to write")
@handle_errors
def pretrain_aux(config_path: Path, shapes: int, steps: int, points: int, out: Optional[Path]):
    """Train the reconstruction objective alone on synthetic shapes"""
    result = run_pretrain_aux(config_path, shapes, steps, points, out)
    console.print(Panel(
        f"Mean Chamfer: {result.initial_chamfer:.6g} -> {result.final_chamfer:.6g} "
        f"({100.0 * result.reduction:.1f}% lower)",
        title=f"Pretrained {steps} steps on {shapes} shapes",
        border_style="green"
    ))


def main():
    cli(prog_name="pprl")


if __name__ == "__main__":
    main()
