"""
Experiment Module for psro-rrd

This module turns an INI experiment file into a grid of PSRO runs, one per
(meta-strategy solver, regret threshold, seed) cell, runs the cells (optionally
in parallel) and writes the CSV traces, serialized targets and a run manifest.
It also provides the summary tables printed by the command-line interface.
"""

import configparser
import dataclasses
import logging
import multiprocessing
import os
import re
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import pandas as pd
from tabulate import tabulate

from src.empirical import PayoffEstimator, StrategySets
from src.exceptions import ConfigError, EgtaError, PsroRunError
from src.game_core import Game
from src.game_factory import game_from_config
from src.meta_strategy import (
    CONSTANT,
    DO_NASH,
    FP_UNIFORM,
    PRD,
    QRE,
    RRD,
    LambdaSchedule,
    MssSpec,
)
from src.psro import CLOSURE_FALLBACKS, MIXTURE, NO_FALLBACK, ORACLE_MODES, PsroConfig, RunTrace, psro_run, stream_seed
from src.solvers import DEFAULT_MAX_STEPS, DEFAULT_PRD_FLOOR, DEFAULT_STEP_SIZE, RdConfig

logger = logging.getLogger(__name__)

SEED_ENV_VAR = "EGTA_SEED"
DEFAULT_SWEEP = (0.0, 0.05, 0.1, 0.2, 0.35, 0.5, 0.6)

SECTION_KEYS = {
    "experiment": {"name", "seed", "seeds", "output", "lambda_sweep", "bps", "initial"},
    "game": {"constructor", "n", "path", "num_players", "sizes", "distribution", "zero_sum", "symmetric", "seed", "per_seed"},
    "psro": {
        "max_iterations",
        "epsilon_stop",
        "track_ne_regret",
        "force_outside",
        "closure_fallback",
        "switch_to_do_at",
        "oracle_mode",
        "oracle_samples",
        "bps_tol",
    },
    "estimator": {"noise_std", "samples_per_profile"},
    "rd": {"step_size", "max_steps", "prd_lower_bound"},
}
MSS_KEYS = {
    "kind",
    "lambda",
    "lambda_mode",
    "lambda_end",
    "lambda_horizon",
    "fixed_steps",
    "tau",
    "qre_iters",
    "qre_damping",
    "mix_probability",
    "nash_restarts",
    "mrcp_restarts",
    "nash_on_miss",
    "step_size",
    "max_steps",
    "prd_lower_bound",
}

TRACE_FIXED = ["game", "mss", "seed", "lambda", "iteration"]
TRACE_TAIL = ["target_regret_full", "ne_regret_full", "profiles_evaluated", "terminated_by"]
DIAGNOSTIC_COLUMNS = ["game", "mss", "seed", "lambda", "iteration", "lambda_used", "solver_steps", "hit_threshold", "qre_residual"]
SAVINGS_COLUMNS = ["game", "mss", "seed", "lambda", "iteration", "evaluated", "total_box", "savings_fraction"]


def trace_columns(num_players: int) -> List[str]:
    return TRACE_FIXED + [f"num_strategies_p{p + 1}" for p in range(num_players)] + TRACE_TAIL


@dataclass(frozen=True)
class ExperimentConfig:
    """
    A resolved experiment.

    Attributes:
        name: Game label written to the CSV files
        game_constructor: Name understood by game_from_config
        game_params: Constructor arguments
        game_per_seed: Redraw a random game from each cell's seed
        mss: Meta-strategy solvers to compare
        seeds: Replicate seeds
        root_seed: Root of every random stream
        initial: Initial strategies per player
        psro: Run parameters shared by all cells (its mss is replaced per cell)
        bps_enabled: Compute targets with backward profile search
        output_dir: Where files are written
        lambda_sweep: Constant RRD thresholds to sweep, if any
    """

    name: str
    game_constructor: str
    game_params: Dict[str, object]
    mss: Tuple[MssSpec, ...]
    seeds: Tuple[int, ...]
    root_seed: int = 0
    game_per_seed: bool = False
    initial: Tuple[Tuple[int, ...], ...] = ((0,),)
    psro: Optional[PsroConfig] = None
    bps_enabled: bool = False
    output_dir: str = "results"
    lambda_sweep: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if not self.mss:
            raise ConfigError("the experiment needs at least one [mss <label>] section")
        if not self.seeds:
            raise ConfigError("the experiment needs at least one seed")
        labels = [spec.label for spec in self.mss]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"duplicate solver labels in {labels}")


@dataclass(frozen=True)
class Cell:
    index: int
    mss: MssSpec
    seed: int
    sweep_lambda: Optional[float]


@dataclass
class CellResult:
    """Everything a cell contributes to the output files."""

    cell: Cell
    trace_rows: List[dict] = field(default_factory=list)
    diagnostic_rows: List[dict] = field(default_factory=list)
    savings_rows: List[dict] = field(default_factory=list)
    targets: Dict[int, str] = field(default_factory=dict)
    terminated_by: Optional[str] = None
    error: Optional[str] = None
    wall_time: float = 0.0


# -- parsing -----------------------------------------------------------------


def _line_of(lines: Sequence[str], section: str, key: Optional[str] = None) -> Optional[int]:
    """1-based line of a section header, or of a key inside that section."""
    current = None
    for number, raw in enumerate(lines, start=1):
        stripped = raw.strip()
        header = re.match(r"^\[(.+)\]$", stripped)
        if header:
            current = header.group(1).strip()
            if key is None and current == section:
                return number
            continue
        if key is not None and current == section:
            name = re.split(r"[=:]", stripped, maxsplit=1)[0].strip().lower()
            if name == key:
                return number
    return None


class _Section:
    """Typed access to one config section with line-aware errors."""

    def __init__(self, parser: configparser.ConfigParser, name: str, lines: Sequence[str]):
        self.name = name
        self.values = dict(parser[name]) if parser.has_section(name) else {}
        self.lines = lines

    def error(self, key: str, message: str) -> ConfigError:
        return ConfigError(f"[{self.name}] {key}: {message}", line=_line_of(self.lines, self.name, key))

    def has(self, key: str) -> bool:
        return key in self.values

    def _convert(self, key, default, convert):
        if key not in self.values:
            return default
        try:
            return convert(self.values[key])
        except ValueError as exc:
            raise self.error(key, str(exc))

    def get_str(self, key: str, default: Optional[str] = None) -> Optional[str]:
        return self.values.get(key, default)

    def get_int(self, key: str, default: Optional[int] = None) -> Optional[int]:
        return self._convert(key, default, int)

    def get_float(self, key: str, default: Optional[float] = None) -> Optional[float]:
        return self._convert(key, default, float)

    def get_bool(self, key: str, default: bool = False) -> bool:
        def convert(text):
            lowered = text.strip().lower()
            if lowered not in configparser.ConfigParser.BOOLEAN_STATES:
                raise ValueError(f"not a boolean: {text!r}")
            return configparser.ConfigParser.BOOLEAN_STATES[lowered]

        return self._convert(key, default, convert)

    def get_floats(self, key: str) -> Optional[Tuple[float, ...]]:
        return self._convert(key, None, lambda text: tuple(float(t) for t in re.split(r"[,\s]+", text.strip()) if t))

    def get_ints(self, key: str) -> Optional[Tuple[int, ...]]:
        return self._convert(key, None, lambda text: tuple(int(t) for t in re.split(r"[,\s]+", text.strip()) if t))


def _check_keys(parser: configparser.ConfigParser, lines: Sequence[str]) -> None:
    for section in parser.sections():
        allowed = MSS_KEYS if section.startswith("mss ") else SECTION_KEYS.get(section)
        if allowed is None:
            raise ConfigError(f"unknown section [{section}]", line=_line_of(lines, section))
        for key in parser[section]:
            if key not in allowed:
                raise ConfigError(f"[{section}] unknown key {key!r}", line=_line_of(lines, section, key))


def _parse_initial(section: _Section) -> Tuple[Tuple[int, ...], ...]:
    text = section.get_str("initial", "0")
    try:
        groups = tuple(tuple(int(t) for t in group.split()) for group in text.split("|"))
    except ValueError as exc:
        raise section.error("initial", str(exc))
    if any(not group for group in groups):
        raise section.error("initial", "every player needs at least one initial strategy")
    return groups


def _parse_mss(parser, section_name: str, lines, rd: RdConfig) -> MssSpec:
    section = _Section(parser, section_name, lines)
    label = section_name[len("mss "):].strip()
    kind = section.get_str("kind")
    if kind is None:
        raise ConfigError(f"[{section_name}] missing key 'kind'", line=_line_of(lines, section_name))
    try:
        rd_cfg = RdConfig(
            regret_threshold=0.0,
            step_size=section.get_float("step_size", rd.step_size),
            max_steps=section.get_int("max_steps", rd.max_steps),
            prd_lower_bound=section.get_float("prd_lower_bound", rd.prd_lower_bound),
        )
        start = section.get_float("lambda", 0.0)
        schedule = LambdaSchedule(
            mode=section.get_str("lambda_mode", CONSTANT),
            start=start,
            end=section.get_float("lambda_end", start),
            horizon=section.get_int("lambda_horizon", 1),
        )
        return MssSpec(
            kind=kind,
            label=label,
            schedule=schedule,
            rd=rd_cfg,
            fixed_steps=section.get_int("fixed_steps", 1000),
            tau=section.get_float("tau", 1.0),
            qre_iters=section.get_int("qre_iters", 10_000),
            qre_damping=section.get_float("qre_damping", 0.5),
            mix_probability=section.get_float("mix_probability", 0.5),
            nash_restarts=section.get_int("nash_restarts", 8),
            mrcp_restarts=section.get_int("mrcp_restarts", 16),
            nash_on_miss=section.get_bool("nash_on_miss", True),
        )
    except ConfigError:
        raise
    except EgtaError as exc:
        raise ConfigError(f"[{section_name}] {exc}", line=_line_of(lines, section_name))


def _game_params(section: _Section) -> Dict[str, object]:
    constructor = section.get_str("constructor")
    params: Dict[str, object] = {}
    if constructor == "long_path":
        params["n"] = section.get_int("n", 1000)
    elif constructor == "file":
        if not section.has("path"):
            raise section.error("path", "the file constructor needs a path")
        params["path"] = section.get_str("path")
    elif constructor == "random":
        sizes = section.get_ints("sizes")
        num_players = section.get_int("num_players", len(sizes) if sizes else 2)
        if sizes is None:
            raise section.error("sizes", "random games need sizes")
        if len(sizes) == 1:
            sizes = sizes * num_players
        params.update(
            num_players=num_players,
            sizes=sizes,
            distribution=section.get_str("distribution", "uniform01"),
            zero_sum=section.get_bool("zero_sum"),
            symmetric=section.get_bool("symmetric"),
            seed=section.get_int("seed", 0),
        )
    elif constructor not in ("mrcp_closed", "matching_pennies"):
        raise ConfigError(f"[game] unknown constructor {constructor!r}", line=_line_of(section.lines, "game", "constructor"))
    return params


def parse_config(
    text: str,
    path: Optional[str] = None,
    preset: Optional[Callable[[RdConfig], Tuple[MssSpec, ...]]] = None,
) -> ExperimentConfig:
    """
    Parse an INI experiment description.

    preset supplies the solvers when the file has no [mss <label>] sections.

    Raises:
        ConfigError: with the offending line where it can be located
    """
    lines = text.splitlines()
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    try:
        parser.read_string(text, source=path or "<config>")
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("missing section header", line=exc.lineno)
    except (configparser.DuplicateOptionError, configparser.DuplicateSectionError) as exc:
        raise ConfigError(exc.message.split("\n")[0], line=exc.lineno)
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] if exc.errors else None
        raise ConfigError("malformed line", line=lineno)
    _check_keys(parser, lines)

    experiment = _Section(parser, "experiment", lines)
    game = _Section(parser, "game", lines)
    psro = _Section(parser, "psro", lines)
    estimator = _Section(parser, "estimator", lines)
    rd_section = _Section(parser, "rd", lines)

    if not parser.has_section("game") or not game.has("constructor"):
        raise ConfigError("[game] constructor is required", line=_line_of(lines, "game"))

    root_seed = experiment.get_int("seed", 0)
    override = os.environ.get(SEED_ENV_VAR)
    if override is not None:
        try:
            root_seed = int(override)
        except ValueError:
            raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {override!r}")

    try:
        rd = RdConfig(
            step_size=rd_section.get_float("step_size", DEFAULT_STEP_SIZE),
            max_steps=rd_section.get_int("max_steps", DEFAULT_MAX_STEPS),
            prd_lower_bound=rd_section.get_float("prd_lower_bound", DEFAULT_PRD_FLOOR),
        )
    except EgtaError as exc:
        raise ConfigError(f"[rd] {exc}", line=_line_of(lines, "rd"))

    mss = tuple(_parse_mss(parser, s, lines, rd) for s in parser.sections() if s.startswith("mss "))
    if not mss and preset is not None:
        mss = preset(rd)

    closure = psro.get_str("closure_fallback", NO_FALLBACK)
    if closure not in CLOSURE_FALLBACKS:
        raise psro.error("closure_fallback", f"expected one of {CLOSURE_FALLBACKS}")
    oracle_mode = psro.get_str("oracle_mode", MIXTURE)
    if oracle_mode not in ORACLE_MODES:
        raise psro.error("oracle_mode", f"expected one of {ORACLE_MODES}")
    bps_enabled = experiment.get_bool("bps")
    try:
        template = PsroConfig(
            max_iterations=psro.get_int("max_iterations", 100),
            mss=mss[0] if mss else MssSpec(FP_UNIFORM),
            estimator=PayoffEstimator(
                noise_std=estimator.get_float("noise_std", 0.0),
                samples_per_profile=estimator.get_int("samples_per_profile", 1),
            ),
            epsilon_stop=psro.get_float("epsilon_stop", 0.0),
            track_ne_regret=psro.get_bool("track_ne_regret"),
            force_outside=psro.get_bool("force_outside"),
            closure_fallback=closure,
            switch_to_do_at=psro.get_int("switch_to_do_at"),
            oracle_mode=oracle_mode,
            oracle_samples=psro.get_int("oracle_samples", 100),
            use_bps=bps_enabled,
            bps_tol=psro.get_float("bps_tol", 1e-6),
        )
    except ConfigError:
        raise
    except EgtaError as exc:
        raise ConfigError(f"[psro] {exc}", line=_line_of(lines, "psro"))

    seeds = experiment.get_ints("seeds") or (0,)
    return ExperimentConfig(
        name=experiment.get_str("name", game.get_str("constructor")),
        game_constructor=game.get_str("constructor"),
        game_params=_game_params(game),
        game_per_seed=game.get_bool("per_seed"),
        mss=mss,
        seeds=seeds,
        root_seed=root_seed,
        initial=_parse_initial(experiment),
        psro=template,
        bps_enabled=bps_enabled,
        output_dir=experiment.get_str("output", "results"),
        lambda_sweep=experiment.get_floats("lambda_sweep"),
    )


def load_config(path: str, preset=None) -> ExperimentConfig:
    with open(path, "r") as f:
        return parse_config(f.read(), path=path, preset=preset)


# -- running -----------------------------------------------------------------


def build_cells(config: ExperimentConfig) -> List[Cell]:
    """Cells in the fixed order solver, threshold, seed."""
    cells = []
    for spec in config.mss:
        sweep = config.lambda_sweep if (config.lambda_sweep and spec.kind == RRD) else (None,)
        for value in sweep:
            for seed in config.seeds:
                cells.append(Cell(len(cells), spec, seed, value))
    return cells


def _stream_int(*parts) -> int:
    return int(stream_seed(*parts).generate_state(1)[0])


def build_game(config: ExperimentConfig, seed: int) -> Game:
    params = dict(config.game_params)
    if config.game_constructor == "random" and config.game_per_seed:
        params["seed"] = _stream_int(config.root_seed, seed, "game")
    return game_from_config(config.game_constructor, params)


def initial_sets(config: ExperimentConfig, game: Game) -> StrategySets:
    groups = config.initial
    if len(groups) == 1:
        groups = groups * game.num_players
    if len(groups) != game.num_players:
        raise ConfigError(f"initial strategies given for {len(groups)} players, the game has {game.num_players}")
    sets = StrategySets([list(g) for g in groups])
    try:
        sets.check_against(game)
    except EgtaError as exc:
        raise ConfigError(f"initial strategies: {exc}")
    return sets


def cell_psro_config(config: ExperimentConfig, cell: Cell) -> PsroConfig:
    """The shared template with the cell's solver, threshold and derived seeds."""
    spec = cell.mss
    if cell.sweep_lambda is not None:
        spec = spec.with_threshold(cell.sweep_lambda)
    spec = dataclasses.replace(spec, seed=_stream_int(config.root_seed, cell.seed, "mss"))
    estimator = dataclasses.replace(config.psro.estimator, seed=_stream_int(config.root_seed, cell.seed, "estimator"))
    return dataclasses.replace(
        config.psro,
        mss=spec,
        estimator=estimator,
        seed=_stream_int(config.root_seed, cell.seed, "psro"),
    )


def cell_name(cell: Cell) -> str:
    name = f"{cell.index:03d}_{cell.mss.label}_seed{cell.seed}"
    if cell.sweep_lambda is not None:
        name += f"_lambda{cell.sweep_lambda:g}"
    return re.sub(r"[^A-Za-z0-9_.-]", "_", name)


def format_profile(profile) -> str:
    """One line of whitespace-separated probabilities per player."""
    return "".join(" ".join(f"{p:.17g}" for p in probs) + "\n" for probs in profile)


def _rows(config: ExperimentConfig, cell: Cell, trace: RunTrace, terminated_by: str, result: CellResult) -> None:
    for record in trace.records:
        lam = cell.sweep_lambda if cell.sweep_lambda is not None else record.lambda_used
        key = {"game": config.name, "mss": cell.mss.label, "seed": cell.seed, "lambda": lam, "iteration": record.iteration}
        row = dict(key)
        for p, count in enumerate(record.strategy_counts):
            row[f"num_strategies_p{p + 1}"] = count
        row.update(
            target_regret_full=record.target_regret_full,
            ne_regret_full=record.ne_regret_full,
            profiles_evaluated=record.profiles_evaluated_cum,
            terminated_by=terminated_by,
        )
        result.trace_rows.append(row)
        result.diagnostic_rows.append(
            dict(
                key,
                lambda_used=record.lambda_used,
                solver_steps=record.solver_steps,
                hit_threshold=record.hit_threshold,
                qre_residual=record.qre_residual,
            )
        )
        if record.savings is not None:
            result.savings_rows.append(
                dict(
                    key,
                    evaluated=record.savings.evaluated,
                    total_box=record.savings.total_box,
                    savings_fraction=record.savings.savings_fraction,
                )
            )
        result.targets[record.iteration] = format_profile(record.target_full)


def run_cell(job: Tuple[ExperimentConfig, Cell]) -> CellResult:
    """Run one cell; failures are captured in the result, never raised."""
    config, cell = job
    result = CellResult(cell)
    started = time.perf_counter()
    try:
        game = build_game(config, cell.seed)
        trace = psro_run(game, initial_sets(config, game), cell_psro_config(config, cell))
        result.terminated_by = trace.terminated_by
        _rows(config, cell, trace, trace.terminated_by, result)
    except PsroRunError as exc:
        logger.error("Cell %s failed: %s", cell_name(cell), exc)
        result.error = str(exc)
        result.terminated_by = "ERROR"
        if exc.trace is not None:
            _rows(config, cell, exc.trace, "ERROR", result)
    except (EgtaError, OSError, ValueError) as exc:
        logger.error("Cell %s failed: %s", cell_name(cell), exc)
        result.error = str(exc)
        result.terminated_by = "ERROR"
    result.wall_time = time.perf_counter() - started
    logger.info("Cell %s finished (%s) in %.2fs", cell_name(cell), result.terminated_by, result.wall_time)
    return result


def run_cells(config: ExperimentConfig, jobs: int = 1) -> List[CellResult]:
    """Run every cell, up to jobs at a time; results come back in cell order."""
    work = [(config, cell) for cell in build_cells(config)]
    if jobs > 1 and len(work) > 1:
        with multiprocessing.Pool(min(jobs, len(work))) as pool:
            return list(pool.imap(run_cell, work))
    return [run_cell(job) for job in work]


def _write_csv(rows: List[dict], columns: List[str], path: str) -> None:
    frame = pd.DataFrame(rows, columns=columns)
    frame.to_csv(path, index=False, float_format="%.17g", na_rep="")


def describe_config(config: ExperimentConfig) -> List[str]:
    lines = []
    for key, value in dataclasses.asdict(config).items():
        if key in ("mss", "psro"):
            continue
        lines.append(f"{key} = {value}")
    psro = dataclasses.asdict(config.psro)
    psro.pop("mss")
    for key, value in psro.items():
        lines.append(f"psro.{key} = {value}")
    for spec in config.mss:
        lines.append(f"mss.{spec.label} = {dataclasses.asdict(spec)}")
    return lines


def write_outputs(config: ExperimentConfig, results: List[CellResult], output_dir: str) -> None:
    """Write trace.csv, diagnostics.csv, savings.csv (with BPS), targets/ and manifest.txt."""
    os.makedirs(output_dir, exist_ok=True)
    num_players = 0
    for result in results:
        for row in result.trace_rows:
            num_players = max(num_players, sum(1 for k in row if k.startswith("num_strategies_p")))
    if num_players == 0:
        num_players = len(config.initial)

    _write_csv([r for res in results for r in res.trace_rows], trace_columns(num_players), os.path.join(output_dir, "trace.csv"))
    _write_csv(
        [r for res in results for r in res.diagnostic_rows], DIAGNOSTIC_COLUMNS, os.path.join(output_dir, "diagnostics.csv")
    )
    if config.bps_enabled:
        _write_csv([r for res in results for r in res.savings_rows], SAVINGS_COLUMNS, os.path.join(output_dir, "savings.csv"))

    for result in results:
        directory = os.path.join(output_dir, "targets", cell_name(result.cell))
        os.makedirs(directory, exist_ok=True)
        for iteration, text in result.targets.items():
            with open(os.path.join(directory, f"{iteration}.profile"), "w") as f:
                f.write(text)

    with open(os.path.join(output_dir, "manifest.txt"), "w") as f:
        f.write("# resolved configuration\n")
        for line in describe_config(config):
            f.write(line + "\n")
        f.write("# cells\n")
        for result in results:
            status = result.terminated_by if result.error is None else f"ERROR {result.error}"
            f.write(f"{cell_name(result.cell)}\t{result.wall_time:.3f}s\t{status}\n")


def run_experiment(config: ExperimentConfig, jobs: int = 1, output_dir: Optional[str] = None) -> Tuple[int, List[CellResult]]:
    """
    Run the whole grid and write its files.

    Returns:
        (exit status, cell results): 0 if every cell succeeded, 2 otherwise
    """
    output_dir = output_dir or config.output_dir
    cells = build_cells(config)
    logger.info("Running %d cells into %s", len(cells), output_dir)
    results = run_cells(config, jobs)
    write_outputs(config, results, output_dir)
    failed = [r for r in results if r.error is not None]
    if failed:
        logger.error("%d of %d cells failed", len(failed), len(results))
        return 2, results
    return 0, results


# -- presets and reports -------------------------------------------------------


def compare_preset(rd: RdConfig) -> Tuple[MssSpec, ...]:
    """Solvers compared when a config lists none: DO, uniform, PRD, RRD at 0.35 and logit QRE."""
    return (
        MssSpec(DO_NASH, label="do"),
        MssSpec(FP_UNIFORM, label="fp"),
        MssSpec(PRD, label="prd", rd=rd),
        MssSpec(RRD, label="rrd", rd=rd, schedule=LambdaSchedule(CONSTANT, 0.35, 0.35, 1)),
        MssSpec(QRE, label="qre", tau=1.0),
    )


def final_rows(results: List[CellResult]) -> pd.DataFrame:
    """One row per cell: its last iteration."""
    rows = []
    for result in results:
        if not result.trace_rows:
            continue
        last = result.trace_rows[-1]
        rows.append(
            {
                "mss": last["mss"],
                "lambda": last["lambda"],
                "seed": last["seed"],
                "iterations": last["iteration"],
                "final_regret": last["target_regret_full"],
                "profiles_evaluated": last["profiles_evaluated"],
                "terminated_by": result.terminated_by,
            }
        )
    return pd.DataFrame(rows, columns=["mss", "lambda", "seed", "iterations", "final_regret", "profiles_evaluated", "terminated_by"])


def summary_table(results: List[CellResult], by: str = "mss") -> str:
    """Mean final regret, iterations and evaluations grouped by solver or threshold."""
    frame = final_rows(results)
    if frame.empty:
        return "(no completed cells)"
    grouped = frame.groupby(by, sort=False, dropna=False).agg(
        runs=("seed", "count"),
        mean_final_regret=("final_regret", "mean"),
        max_final_regret=("final_regret", "max"),
        mean_iterations=("iterations", "mean"),
        mean_profiles=("profiles_evaluated", "mean"),
    )
    return tabulate(grouped.reset_index(), headers="keys", tablefmt="grid", showindex=False, floatfmt=".6g")


def savings_table(results: List[CellResult]) -> str:
    """Per-iteration BPS savings of every cell."""
    rows = [
        [r["mss"], r["seed"], r["iteration"], r["evaluated"], r["total_box"], f"{100 * r['savings_fraction']:.1f}%"]
        for result in results
        for r in result.savings_rows
    ]
    headers = ["MSS", "Seed", "Iteration", "Evaluated", "Total box", "Savings"]
    return tabulate(rows, headers=headers, tablefmt="grid")

