#!/usr/bin/env python3
"""
Command-line entry point for the NOVA simulator experiments.

Usage:
    uv run python run.py fit --config data/default_experiment.json
    uv run python run.py sim --config data/default_experiment.json --trace
    uv run python run.py report --config data/default_experiment.json --against-paper
    uv run python run.py sweep --config data/default_experiment.json --seed 3 -v

Exit codes: 0 success, 1 usage or config error, 2 claim or equivalence failure.
"""
import asyncio
import argparse
import os
import sys
from pathlib import Path
from dotenv import load_dotenv
import logging

# Add the project root to the Python path
project_root = Path(__file__).parent.absolute()
sys.path.append(str(project_root))

# Load environment variables
load_dotenv()

from rich.console import Console

from src.experiments.config import load_experiment_config
from src.experiments.workflow import (
    cmd_fit,
    cmd_report,
    cmd_sim,
    cmd_sweep,
    fit_table,
    format_sim_outcome,
    print_report,
)
from src.lib.errors import ClaimCheckError, NovaError

DEFAULT_CONFIG = project_root / "data" / "default_experiment.json"

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_CHECK = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="NOVA broadcast NoC simulator and cost model")
    parser.add_argument("-v", "--verbose", action="store_true", help="Verbose output")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("fit", "Fit PWL approximators and the direct-fit oracle"),
        ("sim", "Simulate one approximation transaction on the NoC and LUT baselines"),
        ("report", "Energy and area comparison for a profile"),
        ("sweep", "Run sim over profiles x breakpoints x seeds"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", type=Path, default=DEFAULT_CONFIG, help="Experiment config JSON")
        cmd.add_argument("--seed", type=int, default=None, help="Override the config seed")
        cmd.add_argument("--out-dir", type=str, default=None, help="Override the artifact directory")
        if name == "sim":
            cmd.add_argument("--trace", action="store_true", help="Write the per-flit delivery trace")
        if name == "report":
            cmd.add_argument("--against-paper", action="store_true",
                             help="Check computed ratios against the published claims")
    return parser


async def main(argv=None) -> int:
    """Run one subcommand and map its outcome to an exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_CONFIG

    # Configure logging based on verbosity
    if args.verbose:
        log_level = logging.DEBUG
    else:
        log_level = getattr(logging, os.getenv("NOVA_LOG_LEVEL", "INFO").upper(), logging.INFO)
    logging.basicConfig(level=log_level)
    logger = logging.getLogger(__name__)
    console = Console()

    try:
        config = load_experiment_config(args.config).with_overrides(seed=args.seed, out_dir=args.out_dir)
        logger.info(f"Running {args.command} (seed={config.seed}, out_dir={config.out_dir})")

        if args.command == "fit":
            outcome = cmd_fit(config)
            if outcome.reports:
                console.print(fit_table(outcome))
        elif args.command == "sim":
            outcome = cmd_sim(config, trace=args.trace)
            print(format_sim_outcome(outcome))
        elif args.command == "report":
            outcome = cmd_report(config, against_paper=args.against_paper)
            print_report(outcome, console)
            if not outcome.claims_passed:
                logger.error("Computed ratios do not reproduce every claim")
                return EXIT_CHECK
        else:
            outcome = await cmd_sweep(config)
            outcome.aggregator.print_summary(console)
            if outcome.diverged:
                logger.error(f"{outcome.diverged} experiment(s) produced diverging outputs")
                return EXIT_CHECK
            if outcome.failed:
                logger.error(f"{outcome.failed} experiment(s) failed")
                return EXIT_CONFIG

        return EXIT_OK

    except ClaimCheckError as e:
        logger.error(str(e))
        return EXIT_CHECK
    except NovaError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(asyncio.run(main()))
