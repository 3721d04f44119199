"""
Backward Profile Search Module for psro-rrd

This module confirms an equilibrium of the empirical game without evaluating
its whole payoff box. The search starts from the subgame of the most recently
added strategies and grows it only where a profitable deviation points.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import List, NamedTuple, Tuple

import numpy as np

from src.empirical import EmpiricalGame, PayoffEstimator, StrategySets, embed_profile
from src.game_core import MixedProfile, regret
from src.meta_strategy import DO_NASH, MssSpec, solve_target
from src.solvers import DEFAULT_NASH_RESTARTS, RdConfig, SolverResult, nash_np, rrd

logger = logging.getLogger(__name__)

DEFAULT_BPS_TOL = 1e-6


@dataclass(frozen=True)
class Subgame:
    """Strategy sets Z inside the empirical sets X, and whether Z's box is fully evaluated."""

    sets: StrategySets
    complete: bool


@dataclass(frozen=True)
class BpsResult:
    """
    Outcome of a backward profile search.

    Attributes:
        profile: Profile over X, zero outside the final Z
        subgame: The final Z
        evaluations_this_call: Profiles newly evaluated by the search
        confirmed: No player gains more than tol by deviating anywhere in X
        max_gain: Summed best deviation gain over X at the returned profile
    """

    profile: MixedProfile
    subgame: Subgame
    evaluations_this_call: int
    confirmed: bool
    max_gain: float


class SavingsReport(NamedTuple):
    evaluated: int
    total_box: int
    savings_fraction: float


def savings_report(emp: EmpiricalGame) -> SavingsReport:
    """Evaluated profiles against the size of the empirical box."""
    evaluated, total, fraction = emp.savings()
    return SavingsReport(evaluated, total, fraction)


def _deviation_gains(emp: EmpiricalGame, est: PayoffEstimator, profile: MixedProfile) -> List[np.ndarray]:
    """
    Gain of each player's pure deviation over X against profile (indexed over X).

    Evaluates every missing profile (s_i, s_-i) with s_-i in the support product
    of the other players.
    """
    sets = emp.sets
    gains = []
    for player in range(sets.num_players):
        others = [
            [(sets[q][i], profile[q][i]) for i in profile.support(q)] if q != player else None
            for q in range(sets.num_players)
        ]
        support_product = list(itertools.product(*[o for o in others if o is not None]))
        payoffs = np.zeros(len(sets[player]))
        for position, strategy in enumerate(sets[player]):
            total = 0.0
            for combo in support_product:
                full = [c[0] for c in combo]
                full.insert(player, strategy)
                weight = float(np.prod([c[1] for c in combo]))
                total += weight * emp.payoff(full, est)[player]
            payoffs[position] = total
        value = float(payoffs @ profile[player])
        gains.append(payoffs - value)
    return gains


def bps(
    emp: EmpiricalGame,
    est: PayoffEstimator,
    tol: float = DEFAULT_BPS_TOL,
    restarts: int = DEFAULT_NASH_RESTARTS,
    seed: int = 0,
) -> BpsResult:
    """
    Backward profile search.

    Z starts as each player's most recently added strategy. Each pass evaluates
    Z's box, solves the Z-subgame, and evaluates the deviations from that
    solution to every strategy in X. Players whose best deviation lies outside Z
    and gains more than tol get it added to Z; with no such player the solution
    is confirmed or, if a profitable deviation stays inside Z, the Z-subgame is
    re-solved once with twice the restarts. Every expansion of Z allows one more
    such re-solve.

    Args:
        emp: Empirical game (mutated: profiles get evaluated)
        est: Estimator for newly evaluated profiles
        tol: Deviation gain treated as zero
        restarts: nash_np restarts per Z-subgame
        seed: nash_np seed

    Returns:
        The search result
    """
    start_count = emp.evaluated_count
    x_sets = emp.sets
    z_sets = StrategySets([[x_sets.latest(p)] for p in range(x_sets.num_players)])
    base_restarts = restarts
    resolved = False
    expansions = 0

    while True:
        emp.fill_missing(est, z_sets)
        z_game = emp.subgame(z_sets)
        solution = nash_np(z_game, restarts, seed)
        z_regret = regret(z_game, solution).total
        if z_regret > 10 * tol:
            logger.warning("Z-subgame solution regret %.3g exceeds %.3g", z_regret, 10 * tol)
        profile = embed_profile(solution, z_sets, x_sets)

        gains = _deviation_gains(emp, est, profile)
        best_gain = [float(g.max()) for g in gains]
        added = False
        for player, player_gains in enumerate(gains):
            best = x_sets[player][int(np.argmax(player_gains))]
            if not z_sets.contains(player, best) and best_gain[player] > tol:
                z_sets.add(player, best, expansions + 1)
                added = True
        total_gain = float(sum(max(g, 0.0) for g in best_gain))
        if added:
            expansions += 1
            resolved, restarts = False, base_restarts
            logger.debug("BPS expanded Z to %s", z_sets.counts)
            continue
        if total_gain <= tol:
            return _finish(emp, profile, z_sets, start_count, True, total_gain)
        if not resolved:
            resolved = True
            restarts *= 2
            logger.debug("Profitable deviation inside Z (gain %.3g); re-solving", total_gain)
            continue
        outside = [
            (float(g[i]), player, x_sets[player][i])
            for player, g in enumerate(gains)
            for i in range(len(g))
            if g[i] > tol and not z_sets.contains(player, x_sets[player][i])
        ]
        if outside:
            _, player, strategy = max(outside, key=lambda item: item[0])
            z_sets.add(player, strategy, expansions + 1)
            expansions += 1
            resolved, restarts = False, base_restarts
            continue
        logger.warning("BPS returns an unconfirmed profile (deviation gain %.3g)", total_gain)
        return _finish(emp, profile, z_sets, start_count, False, total_gain)


def _finish(emp, profile, z_sets, start_count, confirmed, gain) -> BpsResult:
    evaluations = emp.evaluated_count - start_count
    logger.debug("BPS %s after %d evaluations, Z sizes %s", "confirmed" if confirmed else "stopped", evaluations, z_sets.counts)
    return BpsResult(profile, Subgame(z_sets, emp.is_complete(z_sets)), evaluations, confirmed, gain)


def support_sets(emp: EmpiricalGame, profile: MixedProfile) -> StrategySets:
    """Full-game indices of the profile's support, in X order."""
    return StrategySets([[emp.sets[p][i] for i in profile.support(p)] for p in range(emp.sets.num_players)])


def bps_rrd_detailed(
    emp: EmpiricalGame,
    est: PayoffEstimator,
    cfg: RdConfig,
    tol: float = DEFAULT_BPS_TOL,
    seed: int = 0,
) -> Tuple[MixedProfile, SolverResult, BpsResult]:
    """bps_rrd_target that also returns the RRD and BPS results."""
    found = bps(emp, est, tol, seed=seed)
    support = support_sets(emp, found.profile)
    result = rrd(emp.subgame(support), cfg)
    return embed_profile(result.profile, support, emp.sets), result, found


def bps_rrd_target(
    emp: EmpiricalGame,
    est: PayoffEstimator,
    cfg: RdConfig,
    tol: float = DEFAULT_BPS_TOL,
) -> MixedProfile:
    """
    RRD on the support of the profile confirmed by BPS, embedded back into X.

    Returns:
        Profile over X, zero off the support
    """
    return bps_rrd_detailed(emp, est, cfg, tol)[0]


def bps_target(emp: EmpiricalGame, est: PayoffEstimator, spec: MssSpec, iteration: int, tol: float = DEFAULT_BPS_TOL):
    """
    Meta-strategy target computed without filling the empirical box.

    DO_NASH returns the BPS profile itself; other payoff-dependent kinds run
    on the BPS support sub-box.

    Returns:
        (target over X, MssOutcome of the support solve or None, BpsResult)
    """
    found = bps(emp, est, tol, spec.nash_restarts, spec.seed)
    if spec.kind == DO_NASH:
        return found.profile, None, found
    support = support_sets(emp, found.profile)
    outcome = solve_target(spec, emp.subgame(support), iteration)
    return embed_profile(outcome.profile, support, emp.sets), outcome, found
