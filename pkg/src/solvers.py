"""
Solvers Module for psro-rrd

This module contains the equilibrium solvers that run on complete games:
discrete replicator dynamics (plain, regularized and projected), exact and
approximate Nash equilibrium search, the logit quantal response fixed point,
and the minimum-regret constrained profile search.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linprog, minimize
from scipy.special import softmax

from src.exceptions import GameShapeError, InvalidStrategyError, SolverError
from src.game_core import (
    REGRET_CLAMP,
    Game,
    MixedProfile,
    contract,
    project_to_simplex,
    pure_equilibria,
    pure_regret_tensor,
    regret,
)

logger = logging.getLogger(__name__)

DEFAULT_STEP_SIZE = 1e-3
DEFAULT_MAX_STEPS = 100_000
DEFAULT_PRD_FLOOR = 1e-10
NASH_TOL = 1e-8
QRE_TOL = 1e-8
DEFAULT_QRE_DAMPING = 0.5
DEFAULT_NASH_RESTARTS = 8
DEFAULT_NASH_STEPS = 2000
DEFAULT_MRCP_RESTARTS = 16
# Pure profiles are scanned exhaustively only up to this box size.
PURE_SCAN_LIMIT = 4096
# MRCP candidates closer than this in regret count as equal.
MRCP_ROUNDING = 1e-12


@dataclass(frozen=True)
class RdConfig:
    """Replicator dynamics parameters: threshold λ, step size α, step cap M and the PRD floor."""

    regret_threshold: float = 0.0
    step_size: float = DEFAULT_STEP_SIZE
    max_steps: int = DEFAULT_MAX_STEPS
    prd_lower_bound: float = DEFAULT_PRD_FLOOR

    def __post_init__(self):
        if not self.step_size > 0:
            raise InvalidStrategyError(f"step_size must be positive, got {self.step_size}")
        if self.max_steps < 1:
            raise InvalidStrategyError(f"max_steps must be at least 1, got {self.max_steps}")
        if not self.regret_threshold >= 0:
            raise InvalidStrategyError(f"regret_threshold must be non-negative, got {self.regret_threshold}")
        if not 0 <= self.prd_lower_bound < 1:
            raise InvalidStrategyError(f"prd_lower_bound must lie in [0, 1), got {self.prd_lower_bound}")


@dataclass(frozen=True)
class SolverResult:
    """
    Outcome of an iterative solver.

    Attributes:
        profile: The returned profile
        regret_total: Its regret in the game it was solved on
        steps_used: Update steps performed
        hit_threshold: Whether the solver's stopping criterion was met; None for
            solvers that run a fixed number of steps
        residual: Logit residual of the profile (QRE only)
    """

    profile: MixedProfile
    regret_total: float
    steps_used: int
    hit_threshold: Optional[bool]
    residual: Optional[float] = None


def _deviations(game: Game, vectors: Sequence[np.ndarray]) -> List[np.ndarray]:
    return [contract(game.player_payoffs(p), vectors, keep=(p,)) for p in range(game.num_players)]


def _regret_from(deviations: Sequence[np.ndarray], vectors: Sequence[np.ndarray]) -> float:
    total = 0.0
    for dev, probs in zip(deviations, vectors):
        gain = float(dev.max() - dev @ probs)
        if gain >= REGRET_CLAMP:
            total += gain
    return total


def _uniform(counts: Sequence[int]) -> List[np.ndarray]:
    return [np.full(k, 1.0 / k) for k in counts]


def _normalized(vector: np.ndarray) -> np.ndarray:
    vector = np.maximum(vector, 0.0)
    total = vector.sum()
    if total <= 0:
        return np.full(vector.size, 1.0 / vector.size)
    return vector / total


def _result(
    game: Game, vectors: Sequence[np.ndarray], steps: int, hit: Optional[bool], residual: Optional[float] = None
):
    profile = MixedProfile(vectors)
    return SolverResult(profile, regret(game, profile).total, steps, hit, residual)


def project_truncated(v: np.ndarray, floor: float) -> np.ndarray:
    """
    Euclidean projection onto {x >= floor, sum(x) = 1}.

    Shifts by the floor and projects the remaining mass onto the standard simplex.
    """
    k = v.size
    mass = 1.0 - k * floor
    if mass < -1e-12:
        raise InvalidStrategyError(f"floor {floor} is infeasible for {k} strategies")
    if mass <= 1e-15:
        return np.full(k, 1.0 / k)
    if floor == 0:
        return project_to_simplex(v)
    return project_to_simplex(v - floor, mass=mass) + floor


def replicator_derivative(game: Game, profile: MixedProfile) -> Tuple[np.ndarray, ...]:
    """Per-player replicator derivative σ_i(s)(u_i(s, σ_-i) - u_i(σ)) before any projection."""
    profile.check_against(game)
    vectors = profile.strategies
    return tuple(probs * (dev - dev @ probs) for dev, probs in zip(_deviations(game, vectors), vectors))


def _rd_update(vectors, deviations, alpha: float, floor: float = 0.0) -> List[np.ndarray]:
    return [
        project_truncated(probs + alpha * probs * (dev - dev @ probs), floor)
        for dev, probs in zip(deviations, vectors)
    ]


def rd_step(game: Game, profile: MixedProfile, step_size: float) -> MixedProfile:
    """
    One projected replicator update, all players moving simultaneously.

    Args:
        game: The game
        profile: Current profile
        step_size: Euler step α

    Returns:
        The updated profile
    """
    profile.check_against(game)
    vectors = profile.strategies
    return MixedProfile(_rd_update(vectors, _deviations(game, vectors), step_size))


def rrd(game: Game, cfg: RdConfig) -> SolverResult:
    """
    Regularized replicator dynamics.

    Runs replicator updates from uniform until the regret drops to
    cfg.regret_threshold. If max_steps runs out first, the lowest-regret
    iterate of the whole trajectory is returned with hit_threshold false.
    """
    vectors = _uniform(game.strategy_counts)
    deviations = _deviations(game, vectors)
    current = _regret_from(deviations, vectors)
    best_regret, best_vectors = current, vectors
    steps = 0
    while current > cfg.regret_threshold:
        if steps >= cfg.max_steps:
            logger.warning(
                "RRD did not reach regret %.4g in %d steps; returning trajectory minimum %.4g",
                cfg.regret_threshold,
                cfg.max_steps,
                best_regret,
            )
            return _result(game, best_vectors, steps, False)
        vectors = _rd_update(vectors, deviations, cfg.step_size)
        steps += 1
        deviations = _deviations(game, vectors)
        current = _regret_from(deviations, vectors)
        if current < best_regret:
            best_regret, best_vectors = current, vectors
    logger.debug("RRD reached regret %.4g after %d steps", current, steps)
    return _result(game, vectors, steps, True)


def fixed_rd(game: Game, steps: int, cfg: RdConfig) -> SolverResult:
    """Replicator dynamics for a fixed number of steps from uniform; the final iterate is returned."""
    if steps < 0:
        raise InvalidStrategyError(f"step count must be non-negative, got {steps}")
    vectors = _uniform(game.strategy_counts)
    for _ in range(steps):
        vectors = _rd_update(vectors, _deviations(game, vectors), cfg.step_size)
    return _result(game, vectors, steps, None)


def prd(game: Game, cfg: RdConfig) -> SolverResult:
    """
    Projected replicator dynamics on the truncated simplex.

    Every strategy keeps at least cfg.prd_lower_bound probability. Runs
    cfg.max_steps updates and returns the final iterate.

    Raises:
        InvalidStrategyError: if the floor times a player's strategy count exceeds 1
    """
    floor = cfg.prd_lower_bound
    for player, count in enumerate(game.strategy_counts):
        if floor * count > 1.0 + 1e-12:
            raise InvalidStrategyError(f"player {player}: floor {floor} is infeasible for {count} strategies")
    vectors = [project_truncated(v, floor) for v in _uniform(game.strategy_counts)]
    for _ in range(cfg.max_steps):
        vectors = _rd_update(vectors, _deviations(game, vectors), cfg.step_size, floor)
    return _result(game, vectors, cfg.max_steps, None)


def _zero_sum_lp(matrix: np.ndarray) -> np.ndarray:
    """Maximin strategy of the row player of a zero-sum matrix game."""
    rows, cols = matrix.shape
    c = np.zeros(rows + 1)
    c[-1] = -1.0
    a_ub = np.zeros((cols, rows + 1))
    a_ub[:, :rows] = -matrix.T
    a_ub[:, -1] = 1.0
    a_eq = np.zeros((1, rows + 1))
    a_eq[0, :rows] = 1.0
    bounds = [(0, None)] * rows + [(None, None)]
    result = linprog(c, A_ub=a_ub, b_ub=np.zeros(cols), A_eq=a_eq, b_eq=np.array([1.0]), bounds=bounds, method="highs")
    if not result.success:
        raise SolverError(f"linear program failed: {result.message}")
    return _normalized(result.x[:rows])


def _indifference(matrix: np.ndarray, rows: Sequence[int], cols: Sequence[int]) -> Optional[np.ndarray]:
    """
    Mixture over rows making the opponent indifferent among cols.

    matrix holds the opponent's payoffs indexed (row strategy, opponent strategy).
    Returns None if the system has no non-negative solution.
    """
    block = matrix[np.ix_(rows, cols)]
    n = len(rows)
    # unknowns: probabilities on rows, then the common value
    system = np.zeros((len(cols) + 1, n + 1))
    system[: len(cols), :n] = block.T
    system[: len(cols), n] = -1.0
    system[len(cols), :n] = 1.0
    target = np.zeros(len(cols) + 1)
    target[-1] = 1.0
    solution, *_ = np.linalg.lstsq(system, target, rcond=None)
    if not np.all(np.isfinite(solution)):
        return None
    if np.max(np.abs(system @ solution - target)) > 1e-9:
        return None
    probs = solution[:n]
    if np.any(probs < -1e-12):
        return None
    vector = np.zeros(matrix.shape[0])
    vector[list(rows)] = np.maximum(probs, 0.0)
    if vector.sum() <= 0:
        return None
    return vector / vector.sum()


def _support_profile(game: Game, rows: Sequence[int], cols: Sequence[int]) -> Optional[MixedProfile]:
    first = _indifference(game.player_payoffs(1), rows, cols)
    second = _indifference(game.player_payoffs(0).T, cols, rows)
    if first is None or second is None:
        return None
    return MixedProfile([first, second])


def nash_2p(game: Game) -> MixedProfile:
    """
    Exact Nash equilibrium of a two-player game.

    Tries a pure scan, then the linear program for constant-sum games, then
    support enumeration (by total support size, then player one's size, then
    lexicographically). Every candidate is accepted only with regret <= 1e-8.

    Raises:
        GameShapeError: if the game does not have exactly two players
        SolverError: if no support yields an equilibrium
    """
    if game.num_players != 2:
        raise GameShapeError(f"nash_2p needs exactly 2 players, got {game.num_players}")
    counts = game.strategy_counts

    pure = pure_equilibria(game, NASH_TOL)
    if pure:
        return MixedProfile.pure(counts, pure[0])

    if game.is_constant_sum(tol=1e-9):
        try:
            first = _zero_sum_lp(game.player_payoffs(0))
            second = _zero_sum_lp(game.player_payoffs(1).T)
            candidate = MixedProfile([first, second])
            polished = _support_profile(game, candidate.support(0), candidate.support(1))
            for option in (polished, candidate):
                if option is not None and regret(game, option).total <= NASH_TOL:
                    return option
            logger.debug("LP solution regret %.3g above tolerance; enumerating supports", regret(game, candidate).total)
        except SolverError as exc:
            logger.debug("Zero-sum LP failed (%s); enumerating supports", exc)

    for total in range(2, counts[0] + counts[1] + 1):
        for size in range(max(1, total - counts[1]), min(counts[0], total - 1) + 1):
            for rows in itertools.combinations(range(counts[0]), size):
                for cols in itertools.combinations(range(counts[1]), total - size):
                    candidate = _support_profile(game, rows, cols)
                    if candidate is not None and regret(game, candidate).total <= NASH_TOL:
                        return candidate
    raise SolverError(f"support enumeration found no equilibrium in a {counts[0]}x{counts[1]} game")


def _multiplicative_rd(
    game: Game, vectors: List[np.ndarray], max_steps: int, tol: float
) -> Tuple[float, List[np.ndarray]]:
    """Multiplicative replicator run keeping the lowest-regret iterate; stops once regret <= tol."""
    floors = [game.player_payoffs(p).min() for p in range(game.num_players)]
    best_regret, best_vectors = np.inf, vectors
    for _ in range(max_steps):
        deviations = _deviations(game, vectors)
        current = _regret_from(deviations, vectors)
        if current < best_regret:
            best_regret, best_vectors = current, vectors
        if current <= tol:
            break
        updated = [_normalized((dev - low + 1e-12) * probs) for dev, probs, low in zip(deviations, vectors, floors)]
        change = max(float(np.abs(a - b).max()) for a, b in zip(updated, vectors))
        vectors = updated
        if change < 1e-14:
            break
    return best_regret, best_vectors


def _pruned(vectors: Sequence[np.ndarray], cutoff: float = 1e-4) -> List[np.ndarray]:
    return [_normalized(np.where(v < cutoff, 0.0, v)) for v in vectors]


def _pair_payoffs(game: Game, vectors: Sequence[np.ndarray], payee: int, first: int, second: int) -> np.ndarray:
    """Payee's payoff matrix over (first, second) strategies, the other players mixing."""
    matrix = contract(game.player_payoffs(payee), vectors, keep=(first, second))
    return matrix if first < second else matrix.T


def min_regret_polish(
    game: Game,
    index_sets: Sequence[Sequence[int]],
    start: Sequence[np.ndarray],
) -> Optional[List[np.ndarray]]:
    """
    Local minimization of full-game regret over mixtures supported on index_sets.

    Uses the epigraph form: minimize sum(t_i) - sum(u_i) subject to
    t_i >= u_i(s, σ_-i) for every pure s, solved with SLSQP.

    Args:
        game: The game regret is measured in
        index_sets: Per-player strategy indices the mixture may use
        start: Full-length starting vectors supported on index_sets

    Returns:
        Full-length vectors, or None if the optimizer failed
    """
    n = game.num_players
    counts = game.strategy_counts
    sizes = [len(s) for s in index_sets]
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    num_probs = int(offsets[-1])

    def unpack(x):
        vectors = []
        for p in range(n):
            vector = np.zeros(counts[p])
            vector[list(index_sets[p])] = x[offsets[p]: offsets[p + 1]]
            vectors.append(vector)
        return vectors

    def objective(x):
        vectors = unpack(x)
        values = sum(dev @ probs for dev, probs in zip(_deviations(game, vectors), vectors))
        return float(x[num_probs:].sum() - values)

    def objective_grad(x):
        vectors = unpack(x)
        grad = np.zeros_like(x)
        for j in range(n):
            block = np.zeros(counts[j])
            for i in range(n):
                block += contract(game.player_payoffs(i), vectors, keep=(j,))
            grad[offsets[j]: offsets[j + 1]] = -block[list(index_sets[j])]
        grad[num_probs:] = 1.0
        return grad

    def gaps(x):
        vectors = unpack(x)
        return np.concatenate([x[num_probs + i] - dev for i, dev in enumerate(_deviations(game, vectors))])

    def gaps_jac(x):
        vectors = unpack(x)
        rows = []
        for i in range(n):
            block = np.zeros((counts[i], x.size))
            block[:, num_probs + i] = 1.0
            for j in range(n):
                if j == i:
                    continue
                matrix = _pair_payoffs(game, vectors, i, i, j)
                block[:, offsets[j]: offsets[j + 1]] = -matrix[:, list(index_sets[j])]
            rows.append(block)
        return np.vstack(rows)

    def simplex(x):
        return np.array([x[offsets[p]: offsets[p + 1]].sum() - 1.0 for p in range(n)])

    def simplex_jac(x):
        jac = np.zeros((n, x.size))
        for p in range(n):
            jac[p, offsets[p]: offsets[p + 1]] = 1.0
        return jac

    x0 = np.concatenate([np.asarray(start[p])[list(index_sets[p])] for p in range(n)])
    x0 = np.concatenate([x0, [dev.max() for dev in _deviations(game, list(start))]])
    bounds = [(0.0, 1.0)] * num_probs + [(None, None)] * n
    try:
        result = minimize(
            objective,
            x0,
            jac=objective_grad,
            method="SLSQP",
            bounds=bounds,
            constraints=[
                {"type": "ineq", "fun": gaps, "jac": gaps_jac},
                {"type": "eq", "fun": simplex, "jac": simplex_jac},
            ],
            options={"maxiter": 500, "ftol": 1e-14},
        )
    except (ValueError, np.linalg.LinAlgError) as exc:
        logger.debug("Regret polish failed: %s", exc)
        return None
    if not np.all(np.isfinite(result.x)):
        return None
    return [_normalized(v) for v in unpack(result.x)]


def nash_np(
    game: Game,
    restarts: int = DEFAULT_NASH_RESTARTS,
    seed: int = 0,
    max_steps: int = DEFAULT_NASH_STEPS,
    tol: float = NASH_TOL,
) -> MixedProfile:
    """
    Approximate Nash equilibrium for any number of players.

    Two-player games go to nash_2p. Otherwise candidates are compared by regret:
    the best pure profile (small boxes only), then multiplicative replicator runs
    from uniform and Dirichlet starts, each pruned of tiny probabilities and
    polished locally. The search stops at the first candidate with regret at
    most tol; otherwise the lowest regret wins and earlier candidates win ties.

    Args:
        game: The game
        restarts: Number of random Dirichlet starts
        seed: Seed of the start generator
        max_steps: Replicator steps per run
        tol: Regret accepted as an equilibrium

    Returns:
        The minimum-regret profile found
    """
    if restarts < 1:
        raise InvalidStrategyError(f"restarts must be positive, got {restarts}")
    if game.num_players == 2:
        return nash_2p(game)
    counts = game.strategy_counts
    everything = [list(range(k)) for k in counts]

    best_regret, best_vectors = np.inf, None
    if game.num_profiles <= PURE_SCAN_LIMIT:
        regrets = pure_regret_tensor(game)
        index = np.unravel_index(int(np.argmin(regrets)), regrets.shape)
        best_regret = float(regrets[index])
        best_vectors = list(MixedProfile.pure(counts, index).strategies)
        if best_regret <= tol:
            return MixedProfile(best_vectors)

    rng = np.random.default_rng(seed)
    starts = [_uniform(counts)] + [[rng.dirichlet(np.ones(k)) for k in counts] for _ in range(restarts)]
    for number, start in enumerate(starts):
        value, vectors = _multiplicative_rd(game, start, max_steps, tol)
        pruned = _pruned(vectors)
        pruned_value = _regret_from(_deviations(game, pruned), pruned)
        if pruned_value < value:
            value, vectors = pruned_value, pruned
        if value > tol:
            polished = min_regret_polish(game, everything, vectors)
            if polished is not None:
                polished_value = _regret_from(_deviations(game, polished), polished)
                if polished_value < value:
                    value, vectors = polished_value, polished
        logger.debug("nash_np start %d reached regret %.3g", number, value)
        if value < best_regret:
            best_regret, best_vectors = value, vectors
        if best_regret <= tol:
            break
    logger.debug("nash_np best regret %.3g", best_regret)
    return MixedProfile(best_vectors)


def qre_logit(game: Game, tau: float, iters: int = 10_000, damping: float = DEFAULT_QRE_DAMPING) -> SolverResult:
    """
    Logit quantal response equilibrium by damped fixed-point iteration.

    Starting from uniform, each step moves a damping fraction of the way to the
    logit response softmax(tau * u_i(., σ_-i)). The residual is the max-norm
    distance between the profile and its logit image; below 1e-8 counts as converged.

    Args:
        game: The game
        tau: Rationality parameter (0 gives uniform play)
        iters: Maximum number of updates
        damping: Step fraction in (0, 1]
    """
    if not tau >= 0:
        raise InvalidStrategyError(f"tau must be non-negative, got {tau}")
    if not 0 < damping <= 1:
        raise InvalidStrategyError(f"damping must lie in (0, 1], got {damping}")
    if iters < 1:
        raise InvalidStrategyError(f"iters must be positive, got {iters}")

    def logit_image(vectors):
        return [softmax(tau * dev) for dev in _deviations(game, vectors)]

    vectors = _uniform(game.strategy_counts)
    steps = 0
    image = logit_image(vectors)
    residual = max(float(np.abs(a - b).max()) for a, b in zip(image, vectors))
    while residual >= QRE_TOL and steps < iters:
        vectors = [(1 - damping) * v + damping * w for v, w in zip(vectors, image)]
        vectors = [v / v.sum() for v in vectors]
        steps += 1
        image = logit_image(vectors)
        residual = max(float(np.abs(a - b).max()) for a, b in zip(image, vectors))
    converged = residual < QRE_TOL
    if not converged:
        logger.warning("QRE (tau=%.4g) did not converge in %d steps; residual %.3g", tau, iters, residual)
    return _result(game, vectors, steps, converged, residual)


def _regret_subgradient(game: Game, vectors: Sequence[np.ndarray]) -> List[np.ndarray]:
    """Subgradient of the total regret with respect to each player's full-length vector."""
    n = game.num_players
    deviations = _deviations(game, vectors)
    grads = [np.zeros(len(v)) for v in vectors]
    for i in range(n):
        best = int(np.argmax(deviations[i]))
        for j in range(n):
            # d/dσ_j of -u_i(σ)
            grads[j] -= contract(game.player_payoffs(i), vectors, keep=(j,))
            if j != i:
                grads[j] += _pair_payoffs(game, vectors, i, i, j)[best]
    return grads


def _constant_sum_mrcp(full: Game, index_sets: Sequence[Sequence[int]]) -> Optional[List[np.ndarray]]:
    """
    Exact minimum-regret constrained profile of a two-player constant-sum game.

    The values cancel, so the regret separates into one restricted minimax LP
    per player against every full-game deviation of the opponent.
    """
    try:
        first = _zero_sum_lp(-full.player_payoffs(1)[index_sets[0], :])
        second = _zero_sum_lp(-full.player_payoffs(0)[:, index_sets[1]].T)
    except SolverError as exc:
        logger.debug("Constant-sum MRCP program failed: %s", exc)
        return None
    return [first, second]


def mrcp(
    full: Game,
    index_sets: Sequence[Sequence[int]],
    restarts: int = DEFAULT_MRCP_RESTARTS,
    seed: int = 0,
    steps: int = 1000,
) -> SolverResult:
    """
    Minimum-regret constrained profile.

    Searches mixtures over the restricted strategies for the lowest regret in
    the full game, deviations ranging over every full-game strategy. Candidates:
    the exact restricted minimax solution (two-player constant-sum games only),
    the restricted game's Nash equilibrium, the best restricted pure profile,
    and projected normalized-subgradient descent (step 0.5/sqrt(t)) from uniform
    and Dirichlet starts; the winner is polished locally.

    Args:
        full: The full game
        index_sets: Per-player full-game indices of the restricted strategies
        restarts: Random starts besides uniform
        seed: Seed of the start generator
        steps: Subgradient steps per start

    Returns:
        A result whose profile is over the restricted strategies and whose
        regret_total is measured in the full game
    """
    if restarts < 1:
        raise InvalidStrategyError(f"restarts must be positive, got {restarts}")
    index_sets = [list(s) for s in index_sets]
    counts = full.strategy_counts
    restricted_counts = [len(s) for s in index_sets]

    def lift(restricted):
        vectors = []
        for p, probs in enumerate(restricted):
            vector = np.zeros(counts[p])
            vector[index_sets[p]] = probs
            vectors.append(vector)
        return vectors

    def score(restricted):
        lifted = lift(restricted)
        return _regret_from(_deviations(full, lifted), lifted)

    candidates = []
    if full.num_players == 2 and full.is_constant_sum(tol=1e-9):
        exact = _constant_sum_mrcp(full, index_sets)
        if exact is not None:
            candidates.append(exact)
    sub = full.restrict(index_sets)
    equilibrium = nash_np(sub, seed=seed)
    candidates.append(list(equilibrium.strategies))
    if sub.num_profiles <= PURE_SCAN_LIMIT:
        regrets = pure_regret_tensor(full)[np.ix_(*index_sets)]
        index = np.unravel_index(int(np.argmin(regrets)), regrets.shape)
        candidates.append(list(MixedProfile.pure(restricted_counts, index).strategies))

    rng = np.random.default_rng(seed)
    starts = [_uniform(restricted_counts)] + [[rng.dirichlet(np.ones(k)) for k in restricted_counts] for _ in range(restarts)]
    for start in starts:
        vectors, best_value, best = start, score(start), start
        for t in range(1, steps + 1):
            grads = [g[index_sets[p]] for p, g in enumerate(_regret_subgradient(full, lift(vectors)))]
            norm = np.sqrt(sum(float(g @ g) for g in grads))
            if norm == 0:
                break
            eta = 0.5 / np.sqrt(t)
            vectors = [project_to_simplex(v - eta * g / norm) for v, g in zip(vectors, grads)]
            value = score(vectors)
            if value < best_value:
                best_value, best = value, vectors
        candidates.append(best)

    values = [score(c) for c in candidates]
    # earliest candidate within rounding of the minimum
    winner = next(i for i, v in enumerate(values) if v <= min(values) + MRCP_ROUNDING)
    best_value, best = values[winner], candidates[winner]
    logger.debug("MRCP candidate regrets: %s", ", ".join(f"{v:.4g}" for v in values))

    polished = min_regret_polish(full, index_sets, lift(best))
    if polished is not None:
        restricted = [_normalized(v[index_sets[p]]) for p, v in enumerate(polished)]
        value = score(restricted)
        if value < best_value - MRCP_ROUNDING:
            best_value, best = value, restricted

    profile = MixedProfile(best)
    lifted = MixedProfile(lift(best))
    return SolverResult(profile, regret(full, lifted).total, steps, None)
