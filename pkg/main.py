"""Onsager energy-conservation lab.

Command-line entry point: reads a run configuration, generates fixture
fields, runs the Besov, mollification, commutator and energy-defect sweeps
and summarizes every acceptance criterion.

Exit status is 0 on success, 1 when the summary holds a failing criterion
and 2 on configuration, manifest or numerical-input errors.
"""

from __future__ import annotations

import argparse
import sys
from collections.abc import Sequence
from pathlib import Path

from loguru import logger

from analysis.errors import LabError
from config.logging_config import add_run_log, setup_logging
from config.settings import settings
from experiments.manifest import ManifestError
from experiments.report import report
from experiments.run_config import (
    DEFAULT_BV_FLOOR_FACTOR,
    DEFAULT_DECOMPOSITION_TOLERANCE,
    ConfigError,
    RunConfig,
    load_config,
)
from experiments.sweeps import STAGES, run_stage
from visualization.chart_rates import plot_rate_curves

EXIT_OK = 0
EXIT_FAILED_CRITERIA = 1
EXIT_ERROR = 2

CHARTS_DIR = "charts"
CHART_TABLES = ("commutators", "defect_series")


def build_parser() -> argparse.ArgumentParser:
    """Create the argument parser with one subcommand per stage."""
    parser = argparse.ArgumentParser(
        prog="onsagerlab",
        description="Numerical checks of energy conservation for weak Euler solutions.",
    )
    parser.add_argument("--log-level", default=None, help="loguru level (default from settings)")
    commands = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str, needs_config: bool = True) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument("--config", type=Path, required=needs_config, help="run configuration")
        sub.add_argument("--out", type=Path, default=None, help="output directory")
        sub.add_argument("--workers", type=int, default=None, help="worker processes")
        sub.add_argument("--seed", type=int, default=None, help="override profile seeds")
        return sub

    add("generate", "sample fixture fields and serialize them")
    add("besov-fit", "fit Besov exponents and estimate Besov norms")
    add("mollify-rates", "measure mollification rates of scalar fixtures")
    add("commutator-sweep", "evaluate commutator terms over the epsilon sweep")
    add("energy-defect", "measure weak energy residuals and energy series")
    for sub in (
        add("report", "summarize a completed run", needs_config=False),
        add("run", "run every stage, then report"),
    ):
        sub.add_argument(
            "--charts", action="store_true", help="also write log-log rate charts"
        )
    return parser


def resolve_output_dir(out: Path | None, config: RunConfig | None) -> Path:
    """``--out`` wins over the configuration, which wins over ``ONSAGERLAB_OUT``."""
    if out is not None:
        return out
    if config is not None and config.output.dir:
        return Path(config.output.dir)
    return settings.get_output_dir_path()


def prepare_config(path: Path, seed: int | None) -> RunConfig:
    """Load a configuration, apply the seed override and resolve tolerances."""
    config = load_config(path)
    if seed is not None:
        config = config.with_seed(seed)
    return config.with_tolerances(
        slope=settings.slope_tolerance,
        dissipation=settings.dissipation_tolerance,
        exponent=settings.exponent_tolerance,
    )


def write_charts(out_dir: Path) -> list[Path]:
    """Render the commutator and defect series of a run under ``charts/``."""
    written = []
    for table in CHART_TABLES:
        csv_path = out_dir / f"{table}.csv"
        if not csv_path.is_file():
            continue
        chart = plot_rate_curves(csv_path, out_dir / CHARTS_DIR / f"{table}.png")
        if chart is not None:
            written.append(chart)
    return written


def run_report(out_dir: Path, config: RunConfig | None, charts: bool = False) -> int:
    if config is not None:
        decomposition = config.tolerances.decomposition
        bv_floor_factor = config.tolerances.bv_floor_factor
    else:
        decomposition = DEFAULT_DECOMPOSITION_TOLERANCE
        bv_floor_factor = DEFAULT_BV_FLOOR_FACTOR
    summary = report(out_dir, decomposition, bv_floor_factor)
    print(summary.text)
    if charts:
        write_charts(out_dir)
    return EXIT_OK if summary.passed else EXIT_FAILED_CRITERIA


def dispatch(args: argparse.Namespace) -> int:
    config = prepare_config(args.config, args.seed) if args.config is not None else None
    out_dir = resolve_output_dir(args.out, config)
    workers = args.workers if args.workers is not None else settings.workers
    if workers < 1:
        raise ConfigError("--workers", f"must be at least 1, got {workers}")
    if args.command == "report" and not out_dir.is_dir():
        raise ManifestError(f"No run in {out_dir}; run a stage first.")

    handler = add_run_log(out_dir, args.log_level or settings.log_level)
    try:
        return _run_command(args, config, out_dir, workers)
    finally:
        logger.remove(handler)


def _run_command(
    args: argparse.Namespace, config: RunConfig | None, out_dir: Path, workers: int
) -> int:
    if args.command == "report":
        return run_report(out_dir, config, args.charts)

    assert config is not None
    stages = STAGES if args.command == "run" else (args.command,)
    for step, stage in enumerate(stages, start=1):
        logger.info(f"Step {step} - {stage} ({out_dir})")
        run_stage(config, stage, out_dir, workers)
    if args.command == "run":
        logger.info(f"Step {len(stages) + 1} - report")
        return run_report(out_dir, config, args.charts)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    """Parse arguments, run the requested command and return the exit status."""
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level or settings.log_level)
    try:
        return dispatch(args)
    except (LabError, ConfigError, ManifestError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
