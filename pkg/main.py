"""
Main Application Module for psro-rrd

This module provides the command-line entry point: batch PSRO experiments
(run, compare, sweep, bps-demo) driven by INI files, and one-shot equilibrium
solving on a game file (solve).
"""

import argparse
import dataclasses
import logging
import sys

import numpy as np
from tabulate import tabulate

from src.exceptions import ConfigError, EgtaError
from src.experiment import DEFAULT_SWEEP, compare_preset, load_config, run_experiment, savings_table, summary_table
from src.game_core import MixedProfile, max_social_welfare, regret
from src.game_factory import load_game
from src.meta_strategy import RRD
from src.solvers import (
    DEFAULT_MAX_STEPS,
    DEFAULT_MRCP_RESTARTS,
    DEFAULT_NASH_RESTARTS,
    DEFAULT_PRD_FLOOR,
    DEFAULT_STEP_SIZE,
    RdConfig,
    mrcp,
    nash_np,
    prd,
    qre_logit,
    rrd,
)

logger = logging.getLogger(__name__)

SOLVERS = ("nash", "rrd", "prd", "qre", "mrcp", "sw")
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


class CommandParser(argparse.ArgumentParser):
    """Argument parser that exits with status 1 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(1)


def setup_logging(quiet: bool = False, verbose: bool = False) -> None:
    """
    Configure the root logger.

    Args:
        quiet: Only warnings and errors
        verbose: Include solver internals
    """
    level = logging.INFO
    if quiet:
        level = logging.WARNING
    elif verbose:
        level = logging.DEBUG
    logging.basicConfig(level=level, format=LOG_FORMAT, force=True)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--quiet", action="store_true", help="Only log warnings and errors")
    common.add_argument("--verbose", action="store_true", help="Log solver internals")

    batch = argparse.ArgumentParser(add_help=False)
    batch.add_argument("config", help="Experiment INI file")
    batch.add_argument("--jobs", type=int, default=1, help="Cells run in parallel")
    batch.add_argument("--output", default=None, help="Output directory (overrides the config)")

    parser = CommandParser(prog="psro-rrd", description="PSRO with regularized replicator dynamics")
    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True
    commands.add_parser("run", parents=[common, batch], help="Run an experiment grid")
    commands.add_parser("compare", parents=[common, batch], help="Compare meta-strategy solvers (preset if none given)")
    commands.add_parser("sweep", parents=[common, batch], help="Sweep the RRD regret threshold")
    commands.add_parser("bps-demo", parents=[common, batch], help="Run with backward profile search and print savings")

    solve = commands.add_parser("solve", parents=[common], help="Solve a game file once")
    solve.add_argument("game", help="Game file")
    solve.add_argument("--solver", choices=SOLVERS, default="nash")
    solve.add_argument("--lambda", dest="threshold", type=float, default=0.0, help="RRD regret threshold")
    solve.add_argument("--alpha", type=float, default=DEFAULT_STEP_SIZE, help="Replicator step size")
    solve.add_argument("--steps", type=int, default=DEFAULT_MAX_STEPS, help="Replicator step cap / QRE iterations")
    solve.add_argument("--floor", type=float, default=DEFAULT_PRD_FLOOR, help="PRD probability floor")
    solve.add_argument("--tau", type=float, default=1.0, help="QRE rationality")
    solve.add_argument("--restarts", type=int, default=None, help="Random restarts (nash, mrcp)")
    solve.add_argument(
        "--subset",
        action="append",
        default=None,
        help="Comma-separated strategies of one player for mrcp (repeat per player)",
    )
    return parser


def print_profile(profile: MixedProfile, per_player) -> None:
    rows = [
        [player + 1, " ".join(f"{p:.6g}" for p in probs), f"{per_player[player]:.6g}"]
        for player, probs in enumerate(profile)
    ]
    print(tabulate(rows, headers=["Player", "Profile", "Regret"], tablefmt="grid"))


def solve_command(args) -> int:
    game = load_game(args.game)
    if args.solver == "sw":
        profile, welfare = max_social_welfare(game)
        print(tabulate([[" ".join(str(s) for s in profile), f"{welfare:.6g}"]], headers=["Profile", "Welfare"], tablefmt="grid"))
        return 0

    cfg = RdConfig(args.threshold, args.alpha, args.steps, args.floor)
    extra = []
    if args.solver == "nash":
        profile = nash_np(game, args.restarts or DEFAULT_NASH_RESTARTS)
    elif args.solver == "rrd":
        result = rrd(game, cfg)
        profile = result.profile
        extra.append(f"Steps: {result.steps_used}, threshold met: {result.hit_threshold}")
    elif args.solver == "prd":
        profile = prd(game, cfg).profile
    elif args.solver == "qre":
        result = qre_logit(game, args.tau, args.steps)
        profile = result.profile
        extra.append(f"Residual: {result.residual:.3g}")
    else:
        if args.subset:
            subsets = [[int(s) for s in text.split(",") if s.strip()] for text in args.subset]
        else:
            subsets = [list(range(k)) for k in game.strategy_counts]
        if len(subsets) != game.num_players:
            raise ConfigError(f"--subset given for {len(subsets)} players, the game has {game.num_players}")
        result = mrcp(game, subsets, args.restarts or DEFAULT_MRCP_RESTARTS)
        vectors = []
        for player, probs in enumerate(result.profile):
            vector = np.zeros(game.strategy_counts[player])
            vector[subsets[player]] = probs
            vectors.append(vector)
        profile = MixedProfile(vectors)

    report = regret(game, profile)
    print_profile(profile, report.per_player)
    print(f"Total regret: {report.total:.6g}")
    for line in extra:
        print(line)
    return 0


def batch_command(args) -> int:
    if args.command == "compare":
        config = load_config(args.config, preset=compare_preset)
        config = dataclasses.replace(config, lambda_sweep=None)
    else:
        config = load_config(args.config)
    if args.command == "sweep":
        if not any(spec.kind == RRD for spec in config.mss):
            raise ConfigError("sweep needs an [mss <label>] section with kind = RRD")
        config = dataclasses.replace(config, lambda_sweep=config.lambda_sweep or DEFAULT_SWEEP)
    if args.command == "bps-demo":
        config = dataclasses.replace(config, bps_enabled=True, psro=dataclasses.replace(config.psro, use_bps=True))

    status, results = run_experiment(config, jobs=max(1, args.jobs), output_dir=args.output)
    if args.command == "bps-demo":
        print(savings_table(results))
    elif args.command == "sweep":
        print(summary_table(results, by="lambda"))
    else:
        print(summary_table(results, by="mss"))
    return status


def main(argv=None) -> int:
    """
    Main function to run psro-rrd.

    Returns:
        0 on success, 1 on configuration or input errors, 2 if a cell failed
    """
    args = build_parser().parse_args(argv)
    setup_logging(args.quiet, args.verbose)
    try:
        if args.command == "solve":
            return solve_command(args)
        return batch_command(args)
    except (EgtaError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
