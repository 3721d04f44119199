"""
Meta-Strategy Module for psro-rrd

This module maps an empirical game to the profile the next best responses are
computed against. Each meta-strategy solver is described by an MssSpec; the
regret threshold of regularized replicator dynamics can follow an annealing
schedule over PSRO iterations.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from src.empirical import EmpiricalGame
from src.exceptions import InvalidStrategyError
from src.game_core import Game, MixedProfile
from src.solvers import (
    DEFAULT_MRCP_RESTARTS,
    DEFAULT_NASH_RESTARTS,
    DEFAULT_QRE_DAMPING,
    RdConfig,
    fixed_rd,
    mrcp,
    nash_np,
    prd,
    qre_logit,
    rrd,
)

logger = logging.getLogger(__name__)

DO_NASH = "DO_NASH"
FP_UNIFORM = "FP_UNIFORM"
PRD = "PRD"
RRD = "RRD"
FIXED_RD = "FIXED_RD"
QRE = "QRE"
MRCP_ORACLE = "MRCP_ORACLE"
LAST_STRATEGY = "LAST_STRATEGY"
NASH_UNIFORM_MIX = "NASH_UNIFORM_MIX"
MSS_KINDS = (DO_NASH, FP_UNIFORM, PRD, RRD, FIXED_RD, QRE, MRCP_ORACLE, LAST_STRATEGY, NASH_UNIFORM_MIX)
# Kinds that read payoffs only through the empirical game
PAYOFF_KINDS = (DO_NASH, PRD, RRD, FIXED_RD, QRE, NASH_UNIFORM_MIX)

CONSTANT = "CONSTANT"
LINEAR_DECAY = "LINEAR_DECAY"
EXP_DECAY = "EXP_DECAY"
SCHEDULE_MODES = (CONSTANT, LINEAR_DECAY, EXP_DECAY)
# exp(-3) < 0.05: the decay is within 5% of its end value at the horizon
EXP_DECAY_RATE = 3.0


@dataclass(frozen=True)
class LambdaSchedule:
    """Regret threshold as a function of the PSRO iteration."""

    mode: str = CONSTANT
    start: float = 0.0
    end: float = 0.0
    horizon: int = 1

    def __post_init__(self):
        object.__setattr__(self, "mode", self.mode.upper())
        if self.mode not in SCHEDULE_MODES:
            raise InvalidStrategyError(f"unknown schedule mode {self.mode!r}; expected one of {SCHEDULE_MODES}")
        if not self.start >= 0 or not self.end >= 0:
            raise InvalidStrategyError("schedule thresholds must be non-negative")
        if self.horizon < 1:
            raise InvalidStrategyError(f"schedule horizon must be positive, got {self.horizon}")
        if self.mode != CONSTANT and self.start < self.end:
            raise InvalidStrategyError(f"decaying schedule needs start >= end, got {self.start} < {self.end}")


def lambda_at(schedule: LambdaSchedule, iteration: int) -> float:
    """Regret threshold in force at the given iteration."""
    if iteration < 0:
        raise InvalidStrategyError(f"iteration must be non-negative, got {iteration}")
    if schedule.mode == CONSTANT:
        return schedule.start
    if schedule.mode == LINEAR_DECAY:
        return schedule.start + (schedule.end - schedule.start) * min(iteration / schedule.horizon, 1.0)
    return schedule.end + (schedule.start - schedule.end) * math.exp(-EXP_DECAY_RATE * iteration / schedule.horizon)


@dataclass(frozen=True)
class MssSpec:
    """
    A meta-strategy solver and its parameters.

    Only the fields relevant to kind are read: schedule for RRD, rd for the
    replicator kinds, fixed_steps for FIXED_RD, tau/qre_iters/qre_damping for
    QRE, mix_probability for NASH_UNIFORM_MIX, nash_restarts for the Nash
    kinds and mrcp_restarts for MRCP_ORACLE. With nash_on_miss, an RRD run that
    exhausts its step cap above the threshold is replaced by the Nash target.
    """

    kind: str
    label: str = ""
    schedule: LambdaSchedule = field(default_factory=LambdaSchedule)
    rd: RdConfig = field(default_factory=RdConfig)
    fixed_steps: int = 1000
    tau: float = 1.0
    qre_iters: int = 10_000
    qre_damping: float = DEFAULT_QRE_DAMPING
    mix_probability: float = 0.5
    nash_restarts: int = DEFAULT_NASH_RESTARTS
    mrcp_restarts: int = DEFAULT_MRCP_RESTARTS
    nash_on_miss: bool = True
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", self.kind.upper())
        if self.kind not in MSS_KINDS:
            raise InvalidStrategyError(f"unknown meta-strategy solver {self.kind!r}; expected one of {MSS_KINDS}")
        if not self.label:
            object.__setattr__(self, "label", self.kind.lower())
        if self.fixed_steps < 0:
            raise InvalidStrategyError(f"fixed_steps must be non-negative, got {self.fixed_steps}")
        if not self.tau >= 0:
            raise InvalidStrategyError(f"tau must be non-negative, got {self.tau}")
        if not 0 < self.qre_damping <= 1:
            raise InvalidStrategyError(f"qre_damping must lie in (0, 1], got {self.qre_damping}")
        if self.qre_iters < 1:
            raise InvalidStrategyError(f"qre_iters must be positive, got {self.qre_iters}")
        if not 0 <= self.mix_probability <= 1:
            raise InvalidStrategyError(f"mix_probability must lie in [0, 1], got {self.mix_probability}")
        if self.nash_restarts < 1 or self.mrcp_restarts < 1:
            raise InvalidStrategyError("restart counts must be positive")

    @property
    def payoff_dependent(self) -> bool:
        return self.kind in PAYOFF_KINDS

    def with_threshold(self, value: float) -> "MssSpec":
        """Copy with a constant RRD threshold (for threshold sweeps)."""
        return replace(self, schedule=LambdaSchedule(CONSTANT, value, value, 1))


@dataclass(frozen=True)
class MssOutcome:
    """A target profile plus the diagnostics of the solver that produced it."""

    profile: MixedProfile
    lambda_used: Optional[float] = None
    solver_steps: Optional[int] = None
    hit_threshold: Optional[bool] = None
    qre_residual: Optional[float] = None


def solve_target(spec: MssSpec, game: Game, iteration: int = 0) -> MssOutcome:
    """
    Run a payoff-dependent solver on a complete game.

    Args:
        spec: The solver description
        game: Complete game to solve (the empirical game's box or a sub-box of it)
        iteration: PSRO iteration, used for the RRD schedule and the mixing draw
    """
    kind = spec.kind
    if kind == NASH_UNIFORM_MIX:
        rng = np.random.default_rng(np.random.SeedSequence([spec.seed % 2 ** 63, iteration]))
        if rng.random() < spec.mix_probability:
            return MssOutcome(nash_np(game, spec.nash_restarts, spec.seed))
        return MssOutcome(MixedProfile.uniform(game.strategy_counts))
    if kind == DO_NASH:
        return MssOutcome(nash_np(game, spec.nash_restarts, spec.seed))
    if kind == RRD:
        threshold = lambda_at(spec.schedule, iteration)
        cfg = RdConfig(threshold, spec.rd.step_size, spec.rd.max_steps, spec.rd.prd_lower_bound)
        result = rrd(game, cfg)
        profile = result.profile
        if not result.hit_threshold and spec.nash_on_miss:
            logger.warning(
                "RRD stopped at regret %.4g above threshold %.4g; using the Nash target", result.regret_total, threshold
            )
            profile = nash_np(game, spec.nash_restarts, spec.seed)
        return MssOutcome(profile, threshold, result.steps_used, result.hit_threshold)
    if kind == PRD:
        result = prd(game, spec.rd)
        return MssOutcome(result.profile, None, result.steps_used, result.hit_threshold)
    if kind == FIXED_RD:
        result = fixed_rd(game, spec.fixed_steps, spec.rd)
        return MssOutcome(result.profile, None, result.steps_used, result.hit_threshold)
    if kind == QRE:
        result = qre_logit(game, spec.tau, spec.qre_iters, spec.qre_damping)
        logger.debug("QRE residual %.3g after %d steps", result.residual, result.steps_used)
        return MssOutcome(result.profile, None, result.steps_used, result.hit_threshold, result.residual)
    raise InvalidStrategyError(f"{kind} does not solve a game")


def solve_mss_detailed(spec: MssSpec, emp: EmpiricalGame, iteration: int) -> MssOutcome:
    """
    Target profile over the empirical game's current sets, with diagnostics.

    Raises:
        MissingProfileError: if a payoff-dependent kind meets an incomplete box
    """
    if iteration < 0:
        raise InvalidStrategyError(f"iteration must be non-negative, got {iteration}")
    counts = emp.sets.counts
    if spec.kind == FP_UNIFORM:
        return MssOutcome(MixedProfile.uniform(counts))
    if spec.kind == LAST_STRATEGY:
        latest = [emp.sets.position(p, emp.sets.latest(p)) for p in range(emp.sets.num_players)]
        return MssOutcome(MixedProfile.pure(counts, latest))
    if spec.kind == MRCP_ORACLE:
        result = mrcp(emp.full_game, emp.sets.per_player, spec.mrcp_restarts, spec.seed)
        logger.debug("MRCP target full-game regret %.4g", result.regret_total)
        return MssOutcome(result.profile)
    return solve_target(spec, emp.subgame(), iteration)


def solve_mss(spec: MssSpec, emp: EmpiricalGame, iteration: int) -> MixedProfile:
    """Target profile over the empirical game's current sets."""
    return solve_mss_detailed(spec, emp, iteration).profile
