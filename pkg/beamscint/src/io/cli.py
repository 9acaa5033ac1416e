"""
Command-line entry point: run a sweep from a config file, a preset or a
metadata sidecar and write the CSV plus its sidecar.

Usage: python -m beamscint.src --preset fig2 --output fig2.csv
"""

from __future__ import annotations

import argparse
import time
from collections.abc import Sequence
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import logfire
import orjson
import structlog
from pydantic import ValidationError
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from .. import __version__
from ..errors import CacheError, ConfigError, ParameterError
from ..logs import configure_logging
from ..pipeline.models import SweepRow
from ..pipeline.scintillation import row_seed, series, sweep
from .cache import ResultCache
from .output import RowFailure, RunMetadata, read_metadata, sidecar_path, write_csv, write_metadata
from .presets import DESCRIPTIONS, PRESETS
from .runconfig import RunConfig, parse_config, render_config

UTC = timezone.utc

logger = structlog.get_logger(__name__).bind(component="cli-io")

console = Console()

EXIT_OK = 0
EXIT_ROW_FAILURES = 1
EXIT_CONFIG = 2
EXIT_IO = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beamscint",
        description="On-axis scintillation index of a Gaussian beam in weak-to-moderate turbulence",
    )
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--config", type=Path, help="flat key = value run configuration")
    source.add_argument("--replay", type=Path, help="regenerate a run from its .meta.json sidecar")
    parser.add_argument("--preset", choices=sorted(PRESETS), help="figure parameter set")
    parser.add_argument("--output", type=Path, help="CSV path (sidecar goes next to it)")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--tol", type=float, help="relative tolerance")
    parser.add_argument("--mc-samples", type=int, help="Monte Carlo samples for the cross term")
    parser.add_argument("--cache", type=Path, help="result cache directory")
    parser.add_argument("--no-cache", action="store_true", help="disable the result cache")
    parser.add_argument("--threads", type=int, help="worker threads")
    return parser


def _load(args: argparse.Namespace) -> RunConfig:
    if args.replay is not None and args.preset is not None:
        raise ConfigError(["--preset cannot be combined with --replay"])
    if args.replay is not None:
        metadata = read_metadata(args.replay)
        text = metadata.config_text
        if args.output is None:
            args.output = Path(metadata.output)
    elif args.config is not None:
        text = args.config.read_text(encoding="utf-8")
        if args.preset is not None:
            text = f"preset = {args.preset}\n{text}"
    elif args.preset is not None:
        text = f"preset = {args.preset}\n"
    else:
        raise ConfigError(["one of --config, --preset or --replay is required"])
    return parse_config(text)


def _apply_flags(config: RunConfig, args: argparse.Namespace) -> RunConfig:
    updates: dict[str, Any] = {
        "seed": args.seed,
        "tol": args.tol,
        "mc_samples": args.mc_samples,
        "threads": args.threads,
        "output": str(args.output) if args.output is not None else None,
        "cache_dir": str(args.cache) if args.cache is not None else None,
    }
    updates = {key: value for key, value in updates.items() if value is not None}
    if args.no_cache:
        updates["cache"] = False
    if not updates:
        return config
    try:
        return RunConfig.model_validate({**config.model_dump(), **updates})
    except ValidationError as e:
        raise ConfigError([f"{'.'.join(map(str, err['loc']))}: {err['msg']}" for err in e.errors()]) from e


def _run(config: RunConfig, cache: ResultCache | None) -> list[SweepRow]:
    options = {
        "tol": config.tol,
        "seed": config.seed,
        "mc_samples": config.mc_samples,
        "cache": cache,
        "workers": config.threads,
    }
    if config.r0_series:
        return series(config.params, config.axis, config.grid, config.r0_series, **options)
    if config.cn2_series:
        return series(
            config.params, config.axis, config.grid, config.cn2_series, **options, field="cn2"
        )
    return sweep(config.params, config.axis, config.grid, **options)


def _show(rows: list[SweepRow], config: RunConfig, output: Path) -> None:
    title = f"σ² sweep over {config.axis.value}"
    if config.preset is not None:
        title += f" ({config.preset}: {DESCRIPTIONS[config.preset]})"
    table = Table(title=title)
    table.add_column(config.axis.value, justify="right")
    table.add_column("r0", justify="right")
    table.add_column("Cn²", justify="right")
    table.add_column("σ1²", justify="right")
    table.add_column("σ1²L", justify="right")
    table.add_column("no δf₂", justify="right")
    table.add_column("full", justify="right")
    table.add_column("i1", justify="right")
    table.add_column("x2", justify="right")
    table.add_column("status")
    for row in rows:
        if row.error is not None:
            status = "[red]failed[/red]"
        elif row.flagged:
            status = "[yellow]beyond moderate[/yellow]"
        elif row.x2_precision_ok is False:
            status = "[yellow]x2 imprecise[/yellow]"
        else:
            status = "[green]ok[/green]"
        table.add_row(
            f"{row.value:.4g}",
            f"{row.r0:.3g}",
            f"{row.cn2:.3g}",
            f"{row.sigma1_sq:.4f}",
            f"{row.sigma2_rytov_like:.4f}",
            f"{row.sigma2_no_df2:.4f}",
            f"{row.sigma2_full:.4f}",
            f"{row.i1_ratio:.4f}",
            f"{row.x2_ratio:.4f}",
            status,
        )
    console.print(table)
    console.print(f"[green]Wrote {output} and {sidecar_path(output)}[/green]")


def _failures(rows: list[SweepRow], points: int) -> list[RowFailure]:
    return [
        RowFailure(index=i % points, value=row.value, r0=row.r0, cn2=row.cn2, error=row.error)
        for i, row in enumerate(rows)
        if row.error is not None
    ]


@logfire.instrument("run_cli")
def run_cli(argv: Sequence[str] | None = None) -> int:
    """Run the CLI and return its exit status.

    0 success, 1 some rows failed, 2 configuration error, 3 I/O error.
    """
    args = build_parser().parse_args(argv)
    configure_logging()

    try:
        config = _apply_flags(_load(args), args)
    except ConfigError as e:
        console.print(Panel(str(e), title="Configuration error", border_style="red"))
        return EXIT_CONFIG
    except (ValidationError, orjson.JSONDecodeError) as e:
        console.print(Panel(str(e), title="Unreadable metadata sidecar", border_style="red"))
        return EXIT_CONFIG
    except OSError as e:
        console.print(Panel(str(e), title="I/O error", border_style="red"))
        return EXIT_IO

    output = Path(config.output or f"{config.preset or 'sweep'}.csv")
    try:
        cache = ResultCache(config.cache_dir) if config.cache else None
    except CacheError as e:
        console.print(Panel(str(e), title="I/O error", border_style="red"))
        return EXIT_IO

    started_at = datetime.now(UTC)
    start = time.perf_counter()
    try:
        rows = _run(config, cache)
    except ParameterError as e:
        console.print(Panel(str(e), title="Configuration error", border_style="red"))
        return EXIT_CONFIG
    wall_time = time.perf_counter() - start

    failures = _failures(rows, len(config.grid))
    metadata = RunMetadata(
        code_version=__version__,
        config_text=render_config(config),
        preset=config.preset,
        seed=config.seed,
        row_seeds=[row_seed(config.seed, i) for i in range(len(config.grid))],
        tol=config.tol,
        mc_samples=config.mc_samples,
        threads=config.threads,
        output=str(output),
        started_at=started_at,
        wall_time_s=wall_time,
        rows=len(rows),
        failures=failures,
    )
    try:
        write_csv(rows, output)
        write_metadata(metadata, sidecar_path(output))
    except OSError as e:
        logfire.exception("Writing results failed")
        console.print(Panel(str(e), title="I/O error", border_style="red"))
        return EXIT_IO

    _show(rows, config, output)
    logger.info("Run finished", rows=len(rows), failures=len(failures), wall_time_s=wall_time)
    if failures:
        summary = "\n".join(f"{f.value:.6g} (r0={f.r0:g}, cn2={f.cn2:g}): {f.error}" for f in failures)
        console.print(Panel(summary, title=f"{len(failures)} row(s) failed", border_style="red"))
        return EXIT_ROW_FAILURES
    return EXIT_OK
