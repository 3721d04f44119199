"""
PSRO Module for psro-rrd

This module runs the policy-space response oracle loop: compute a target
profile on the empirical game, add each player's exact full-game best response
to it, evaluate the new profiles, and stop once the empirical game is closed
under best responses at an epsilon-equilibrium.
"""

import logging
import zlib
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

import numpy as np

from src.bps import DEFAULT_BPS_TOL, SavingsReport, bps, bps_target, savings_report
from src.empirical import EmpiricalGame, PayoffEstimator, StrategySets
from src.exceptions import EgtaError, InvalidStrategyError, PsroRunError
from src.game_core import Game, MixedProfile, best_response, deviation_payoffs, regret
from src.meta_strategy import DO_NASH, MssOutcome, MssSpec, solve_mss_detailed
from src.solvers import nash_np

logger = logging.getLogger(__name__)

EPS_CLOSED = "EPS_CLOSED"
MAX_ITERATIONS = "MAX_ITERATIONS"

MIXTURE = "mixture"
SAMPLE = "sample"
ORACLE_MODES = (MIXTURE, SAMPLE)

NO_FALLBACK = "none"
SWITCH_TO_DO = "switch_to_do"
CLOSURE_FALLBACKS = (NO_FALLBACK, SWITCH_TO_DO)


def stream_seed(*parts) -> np.random.SeedSequence:
    """Seed sequence from integers and stream names (names hashed with CRC32)."""
    entropy = [zlib.crc32(p.encode("utf-8")) if isinstance(p, str) else int(p) % 2 ** 63 for p in parts]
    return np.random.SeedSequence(entropy)


@dataclass(frozen=True)
class PsroConfig:
    """
    PSRO run parameters.

    Attributes:
        max_iterations: Iteration cap
        mss: Meta-strategy solver
        estimator: Payoff estimator for new profiles
        epsilon_stop: Regret at which a closed empirical game stops the run
        track_ne_regret: Also record the full-game regret of the empirical NE
        seed: Root seed of the run
        force_outside: Respond with the best strategy outside X when the best response is already in X
        closure_fallback: "switch_to_do" replaces a closed but too-regretful target with the DO target
        switch_to_do_at: Iteration from which the solver is DO_NASH
        oracle_mode: "mixture" (exact) or "sample" (respond to sampled opponent profiles)
        oracle_samples: Opponent profiles drawn in sample mode
        use_bps: Compute targets with backward profile search instead of filling the box
        bps_tol: Confirmation tolerance of the search
    """

    max_iterations: int
    mss: MssSpec
    estimator: PayoffEstimator = field(default_factory=PayoffEstimator)
    epsilon_stop: float = 0.0
    track_ne_regret: bool = False
    seed: int = 0
    force_outside: bool = False
    closure_fallback: str = NO_FALLBACK
    switch_to_do_at: Optional[int] = None
    oracle_mode: str = MIXTURE
    oracle_samples: int = 100
    use_bps: bool = False
    bps_tol: float = DEFAULT_BPS_TOL

    def __post_init__(self):
        if self.max_iterations < 1:
            raise InvalidStrategyError(f"max_iterations must be at least 1, got {self.max_iterations}")
        if not self.epsilon_stop >= 0:
            raise InvalidStrategyError(f"epsilon_stop must be non-negative, got {self.epsilon_stop}")
        if self.closure_fallback not in CLOSURE_FALLBACKS:
            raise InvalidStrategyError(f"closure_fallback must be one of {CLOSURE_FALLBACKS}")
        if self.oracle_mode not in ORACLE_MODES:
            raise InvalidStrategyError(f"oracle_mode must be one of {ORACLE_MODES}")
        if self.oracle_samples < 1:
            raise InvalidStrategyError(f"oracle_samples must be positive, got {self.oracle_samples}")
        if self.switch_to_do_at is not None and self.switch_to_do_at < 1:
            raise InvalidStrategyError(f"switch_to_do_at must be at least 1, got {self.switch_to_do_at}")


@dataclass(frozen=True)
class IterationRecord:
    """Instrumentation of one PSRO iteration; target is the profile computed at its end."""

    iteration: int
    strategy_counts: Tuple[int, ...]
    target: MixedProfile
    target_full: MixedProfile
    target_regret_full: float
    ne_regret_full: Optional[float]
    new_strategies: Tuple[Optional[int], ...]
    profiles_evaluated_cum: int
    lambda_used: Optional[float] = None
    solver_steps: Optional[int] = None
    hit_threshold: Optional[bool] = None
    qre_residual: Optional[float] = None
    savings: Optional[SavingsReport] = None


@dataclass
class RunTrace:
    """Records of a run and why it stopped."""

    records: List[IterationRecord] = field(default_factory=list)
    terminated_by: Optional[str] = None
    final_sets: Optional[StrategySets] = None

    @property
    def final_record(self) -> Optional[IterationRecord]:
        return self.records[-1] if self.records else None


def epsilon_closed(full: Game, emp: EmpiricalGame, target: MixedProfile, epsilon: float) -> bool:
    """
    True iff every player's exact best response to target already lies in X and
    target's regret over X (true payoffs) is at most epsilon.
    """
    lifted = emp.lift(target)
    for player in range(full.num_players):
        if not emp.sets.contains(player, best_response(full, lifted, player)):
            return False
    return regret(full.restrict(emp.sets.per_player), target).total <= epsilon


def _sampled_response(full: Game, lifted: MixedProfile, player: int, samples: int, rng) -> int:
    moved = np.moveaxis(full.player_payoffs(player), player, -1)
    index = tuple(
        rng.choice(len(lifted[q]), size=samples, p=lifted[q]) for q in range(full.num_players) if q != player
    )
    return int(np.argmax(moved[index].mean(axis=0)))


def _respond(full: Game, emp: EmpiricalGame, lifted: MixedProfile, player: int, cfg: PsroConfig, rng) -> int:
    if cfg.oracle_mode == SAMPLE:
        response = _sampled_response(full, lifted, player, cfg.oracle_samples, rng)
    else:
        response = best_response(full, lifted, player)
    if cfg.force_outside and emp.sets.contains(player, response):
        outside = [s for s in range(full.strategy_counts[player]) if not emp.sets.contains(player, s)]
        if outside:
            payoffs = deviation_payoffs(full, lifted, player)
            response = max(outside, key=lambda s: (payoffs[s], -s))
    return response


def _solve(emp: EmpiricalGame, spec: MssSpec, iteration: int, cfg: PsroConfig):
    """Target over X plus the BPS profile when the search is on."""
    if cfg.use_bps and spec.payoff_dependent:
        profile, outcome, found = bps_target(emp, cfg.estimator, spec, iteration, cfg.bps_tol)
        if outcome is None:
            return MssOutcome(profile), found.profile
        return replace(outcome, profile=profile), found.profile
    return solve_mss_detailed(spec, emp, iteration), None


def _empirical_ne(emp: EmpiricalGame, cfg: PsroConfig, bps_profile: Optional[MixedProfile]) -> MixedProfile:
    if bps_profile is not None:
        return bps_profile
    if cfg.use_bps:
        return bps(emp, cfg.estimator, cfg.bps_tol, cfg.mss.nash_restarts, cfg.mss.seed).profile
    return nash_np(emp.subgame(), cfg.mss.nash_restarts, cfg.mss.seed)


def psro_run(full: Game, initial: StrategySets, cfg: PsroConfig) -> RunTrace:
    """
    Run PSRO from the initial strategy sets.

    Iteration t responds to the target current at its start (uniform over the
    initial sets when t = 1), adds the responses, evaluates the new profiles,
    computes and records the next target, then stops if the empirical game is
    epsilon-closed at that target.

    Raises:
        PsroRunError: wrapping any failure, with the partial trace attached
    """
    trace = RunTrace()
    emp = EmpiricalGame(full, initial)
    try:
        if not cfg.use_bps:
            emp.fill_missing(cfg.estimator)
        target = MixedProfile.uniform(emp.sets.counts)
        do_spec = MssSpec(DO_NASH, nash_restarts=cfg.mss.nash_restarts, seed=cfg.mss.seed)

        for iteration in range(1, cfg.max_iterations + 1):
            spec = cfg.mss
            if cfg.switch_to_do_at is not None and iteration >= cfg.switch_to_do_at:
                spec = do_spec

            lifted = emp.lift(target)
            rng = np.random.default_rng(stream_seed(cfg.seed, iteration, "oracle"))
            responses = [_respond(full, emp, lifted, p, cfg, rng) for p in range(full.num_players)]
            new_strategies = tuple(
                r if emp.add_strategy(p, r, iteration) else None for p, r in enumerate(responses)
            )
            if not cfg.use_bps:
                emp.fill_missing(cfg.estimator)

            outcome, bps_profile = _solve(emp, spec, iteration, cfg)
            target = outcome.profile
            target_full = emp.lift(target)
            target_regret = regret(full, target_full).total

            if cfg.closure_fallback == SWITCH_TO_DO and spec.kind != DO_NASH and target_regret > cfg.epsilon_stop:
                inside = all(
                    emp.sets.contains(p, best_response(full, target_full, p)) for p in range(full.num_players)
                )
                if inside:
                    logger.info("Iteration %d: target is closed at regret %.4g; switching to DO", iteration, target_regret)
                    outcome, bps_profile = _solve(emp, do_spec, iteration, cfg)
                    target = outcome.profile
                    target_full = emp.lift(target)
                    target_regret = regret(full, target_full).total
                    spec = do_spec

            ne_regret = None
            if cfg.track_ne_regret:
                if spec.kind == DO_NASH:
                    ne_regret = target_regret
                else:
                    ne_regret = regret(full, emp.lift(_empirical_ne(emp, cfg, bps_profile))).total

            record = IterationRecord(
                iteration=iteration,
                strategy_counts=emp.sets.counts,
                target=target,
                target_full=target_full,
                target_regret_full=target_regret,
                ne_regret_full=ne_regret,
                new_strategies=new_strategies,
                profiles_evaluated_cum=emp.evaluated_count,
                lambda_used=outcome.lambda_used,
                solver_steps=outcome.solver_steps,
                hit_threshold=outcome.hit_threshold,
                qre_residual=outcome.qre_residual,
                savings=savings_report(emp) if cfg.use_bps else None,
            )
            trace.records.append(record)
            logger.info(
                "Iteration %d: strategies %s, target regret %.6g, %d profiles evaluated%s",
                iteration,
                record.strategy_counts,
                target_regret,
                record.profiles_evaluated_cum,
                f", lambda {outcome.lambda_used:.4g}" if outcome.lambda_used is not None else "",
            )

            if epsilon_closed(full, emp, target, cfg.epsilon_stop):
                trace.terminated_by = EPS_CLOSED
                break
        else:
            trace.terminated_by = MAX_ITERATIONS
    except (EgtaError, ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        trace.final_sets = emp.sets.copy()
        raise PsroRunError(f"PSRO run failed after {len(trace.records)} iterations: {exc}", trace) from exc

    trace.final_sets = emp.sets.copy()
    logger.info("PSRO stopped (%s) after %d iterations", trace.terminated_by, len(trace.records))
    return trace
