"""
Game Core Module for psro-rrd

This module holds the normal-form game representation and the exact
game-theoretic primitives everything else is built on: expected payoffs,
deviation payoffs, regret, best responses, simplex projection and social welfare.
It also defines the plain-text game format used by the loaders.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from src.exceptions import GameFormatError, GameShapeError, InvalidStrategyError

logger = logging.getLogger(__name__)

# Tolerance on the sum of a probability vector.
SIMPLEX_TOL = 1e-9
# Regret magnitudes below this are reported as exactly zero.
REGRET_CLAMP = 1e-12
# Deviation payoffs this close to the maximum count as tied best responses.
BEST_RESPONSE_TIE_TOL = 1e-9

PureProfile = Tuple[int, ...]


class Game:
    """
    Dense n-player normal-form game.

    The payoff tensor has one axis per player (sized by that player's strategy
    count) plus a trailing axis of length num_players holding the payoff vector.
    Games are immutable once built.
    """

    def __init__(self, payoffs: np.ndarray):
        """
        Build a game from a payoff tensor.

        Args:
            payoffs: Array of shape (k_1, ..., k_N, N)

        Raises:
            GameShapeError: if the trailing axis does not match the player count
                or any entry is not finite
        """
        array = np.array(payoffs, dtype=float)
        if array.ndim < 2:
            raise GameShapeError(f"payoff tensor needs at least 2 axes, got {array.ndim}")
        num_players = array.ndim - 1
        if array.shape[-1] != num_players:
            raise GameShapeError(
                f"payoff vectors have length {array.shape[-1]} but the tensor has {num_players} player axes"
            )
        for player, count in enumerate(array.shape[:-1]):
            if count < 1:
                raise GameShapeError("strategy count must be positive", player=player)
        if not np.all(np.isfinite(array)):
            raise GameShapeError("payoff tensor contains non-finite entries")
        array.setflags(write=False)
        self._payoffs = array

    @classmethod
    def from_matrices(cls, *matrices: np.ndarray) -> "Game":
        """Build a game from one payoff array per player (e.g. a bimatrix)."""
        stacked = np.stack([np.asarray(m, dtype=float) for m in matrices], axis=-1)
        return cls(stacked)

    @property
    def payoffs(self) -> np.ndarray:
        return self._payoffs

    @property
    def num_players(self) -> int:
        return self._payoffs.ndim - 1

    @property
    def strategy_counts(self) -> Tuple[int, ...]:
        return tuple(self._payoffs.shape[:-1])

    @property
    def num_profiles(self) -> int:
        return int(np.prod(self.strategy_counts))

    def player_payoffs(self, player: int) -> np.ndarray:
        """Payoff tensor of a single player."""
        self._check_player(player)
        return self._payoffs[..., player]

    def payoff(self, profile: Sequence[int]) -> np.ndarray:
        """Payoff vector of a pure profile."""
        profile = tuple(int(s) for s in profile)
        if len(profile) != self.num_players:
            raise GameShapeError(f"profile has {len(profile)} entries for {self.num_players} players")
        for player, (strategy, count) in enumerate(zip(profile, self.strategy_counts)):
            if not 0 <= strategy < count:
                raise GameShapeError(f"strategy {strategy} out of range [0, {count})", player=player)
        return self._payoffs[profile]

    def profiles(self) -> Iterator[PureProfile]:
        """All pure profiles in row-major order (last player fastest)."""
        return itertools.product(*(range(k) for k in self.strategy_counts))

    def restrict(self, index_lists: Sequence[Sequence[int]]) -> "Game":
        """Sub-game over the given per-player strategy indices (in the given order)."""
        if len(index_lists) != self.num_players:
            raise GameShapeError(f"got {len(index_lists)} index lists for {self.num_players} players")
        for player, indices in enumerate(index_lists):
            if len(indices) == 0:
                raise GameShapeError("empty strategy subset", player=player)
        return Game(self._payoffs[np.ix_(*[np.asarray(ix, dtype=int) for ix in index_lists])])

    def is_constant_sum(self, tol: float = 1e-12) -> bool:
        """True when every profile's payoffs sum to the same constant."""
        totals = self._payoffs.sum(axis=-1)
        return bool(np.ptp(totals) <= tol * max(1.0, float(np.abs(totals).max())))

    def _check_player(self, player: int) -> None:
        if not 0 <= player < self.num_players:
            raise GameShapeError(f"invalid player index {player} for a {self.num_players}-player game")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Game):
            return NotImplemented
        return self._payoffs.shape == other._payoffs.shape and np.array_equal(self._payoffs, other._payoffs)

    def __hash__(self) -> int:
        return hash((self._payoffs.shape, self._payoffs.tobytes()))

    def __repr__(self) -> str:
        return f"Game(players={self.num_players}, strategies={self.strategy_counts})"


class MixedProfile:
    """
    One probability vector per player.

    Vectors are validated on construction (non-negative, summing to one within
    SIMPLEX_TOL) and stored read-only.
    """

    def __init__(self, strategies: Sequence[Sequence[float]]):
        vectors = []
        for player, probs in enumerate(strategies):
            vectors.append(check_strategy(probs, player=player))
        if not vectors:
            raise GameShapeError("a profile needs at least one player")
        self._strategies = tuple(vectors)

    @classmethod
    def uniform(cls, counts: Sequence[int]) -> "MixedProfile":
        return cls([np.full(k, 1.0 / k) for k in counts])

    @classmethod
    def pure(cls, counts: Sequence[int], profile: Sequence[int]) -> "MixedProfile":
        vectors = []
        for count, strategy in zip(counts, profile):
            vector = np.zeros(count)
            vector[strategy] = 1.0
            vectors.append(vector)
        return cls(vectors)

    @property
    def strategies(self) -> Tuple[np.ndarray, ...]:
        return self._strategies

    @property
    def num_players(self) -> int:
        return len(self._strategies)

    @property
    def strategy_counts(self) -> Tuple[int, ...]:
        return tuple(len(s) for s in self._strategies)

    def __getitem__(self, player: int) -> np.ndarray:
        return self._strategies[player]

    def __iter__(self):
        return iter(self._strategies)

    def __len__(self) -> int:
        return len(self._strategies)

    def support(self, player: int) -> List[int]:
        """Indices the player plays with positive probability."""
        return [int(i) for i in np.flatnonzero(self._strategies[player] > 0)]

    def pure_profile(self) -> Optional[PureProfile]:
        """The pure profile this mixture puts all mass on, if any."""
        result = []
        for probs in self._strategies:
            support = np.flatnonzero(probs > 0)
            if len(support) != 1:
                return None
            result.append(int(support[0]))
        return tuple(result)

    def check_against(self, game: Game) -> None:
        """Raise GameShapeError naming the first player whose vector does not fit."""
        if self.num_players != game.num_players:
            raise GameShapeError(
                f"profile has {self.num_players} players but the game has {game.num_players}"
            )
        for player, (probs, count) in enumerate(zip(self._strategies, game.strategy_counts)):
            if len(probs) != count:
                raise GameShapeError(f"strategy vector has length {len(probs)}, expected {count}", player=player)

    def allclose(self, other: "MixedProfile", atol: float = 1e-9) -> bool:
        if self.strategy_counts != other.strategy_counts:
            return False
        return all(np.allclose(a, b, atol=atol, rtol=0) for a, b in zip(self, other))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MixedProfile):
            return NotImplemented
        return self.strategy_counts == other.strategy_counts and all(
            np.array_equal(a, b) for a, b in zip(self, other)
        )

    def __repr__(self) -> str:
        body = ", ".join(np.array2string(s, precision=4, separator=",") for s in self._strategies)
        return f"MixedProfile({body})"


@dataclass(frozen=True)
class RegretReport:
    """Per-player regrets of a profile and their sum."""

    per_player: np.ndarray
    total: float


def check_strategy(probs: Sequence[float], player: Optional[int] = None) -> np.ndarray:
    """
    Validate a mixed strategy and return it as a read-only float array.

    Raises:
        InvalidStrategyError: on negative, non-finite or non-normalized input
    """
    vector = np.array(probs, dtype=float).reshape(-1)
    where = f"player {player}: " if player is not None else ""
    if vector.size == 0:
        raise InvalidStrategyError(f"{where}empty strategy vector")
    if not np.all(np.isfinite(vector)):
        raise InvalidStrategyError(f"{where}strategy contains non-finite entries")
    if np.any(vector < 0):
        raise InvalidStrategyError(f"{where}strategy has negative entries {vector}")
    if abs(vector.sum() - 1.0) > SIMPLEX_TOL:
        raise InvalidStrategyError(f"{where}strategy sums to {vector.sum():.12g}, not 1")
    vector.setflags(write=False)
    return vector


def contract(tensor: np.ndarray, strategies: Sequence[np.ndarray], keep: Sequence[int] = ()) -> np.ndarray:
    """
    Contract the leading player axes of tensor against the mixed strategies,
    leaving the axes listed in keep (and any trailing axes) untouched.
    """
    result = tensor
    # reverse order keeps the remaining axis numbers valid
    for axis in reversed(range(len(strategies))):
        if axis in keep:
            continue
        result = np.tensordot(result, strategies[axis], axes=([axis], [0]))
    return result


def expected_payoff(game: Game, profile: MixedProfile) -> np.ndarray:
    """
    Expected payoff vector of a mixed profile.

    Args:
        game: The game
        profile: Mixed profile matching the game

    Returns:
        Array of length num_players
    """
    profile.check_against(game)
    return contract(game.payoffs, profile.strategies)


def deviation_payoffs(game: Game, profile: MixedProfile, player: int) -> np.ndarray:
    """
    Payoff to player of each of its pure strategies against the others' mixture.

    Args:
        game: The game
        profile: Mixed profile matching the game
        player: Index of the deviating player

    Returns:
        Array over the player's pure strategies
    """
    game._check_player(player)
    profile.check_against(game)
    return contract(game.player_payoffs(player), profile.strategies, keep=(player,))


def _clamp(values: np.ndarray) -> np.ndarray:
    values = np.where(np.abs(values) < REGRET_CLAMP, 0.0, values)
    return np.maximum(values, 0.0)


def regret(game: Game, profile: MixedProfile) -> RegretReport:
    """
    Regret of a profile: each player's best pure-deviation gain, and their sum.

    Raises:
        GameShapeError: if the profile does not match the game
    """
    profile.check_against(game)
    values = expected_payoff(game, profile)
    gains = np.array(
        [deviation_payoffs(game, profile, player).max() - values[player] for player in range(game.num_players)]
    )
    per_player = _clamp(gains)
    per_player.setflags(write=False)
    return RegretReport(per_player=per_player, total=float(per_player.sum()))


def best_response(game: Game, profile: MixedProfile, player: int) -> int:
    """
    Pure best response of player to the others' mixture.

    Payoffs within BEST_RESPONSE_TIE_TOL of the maximum are tied; the lowest
    index wins ties.
    """
    payoffs = deviation_payoffs(game, profile, player)
    return int(np.flatnonzero(payoffs >= payoffs.max() - BEST_RESPONSE_TIE_TOL)[0])


def pure_regret_tensor(game: Game) -> np.ndarray:
    """Total regret of every pure profile, shaped like the strategy grid."""
    total = np.zeros(game.strategy_counts)
    for player in range(game.num_players):
        payoffs = game.player_payoffs(player)
        total += payoffs.max(axis=player, keepdims=True) - payoffs
    return _clamp(total)


def pure_equilibria(game: Game, epsilon: float = 0.0) -> List[PureProfile]:
    """Pure profiles whose regret is at most epsilon, in row-major order."""
    regrets = pure_regret_tensor(game)
    return [tuple(int(i) for i in index) for index in np.argwhere(regrets <= epsilon)]


def project_to_simplex(v: Sequence[float], mass: float = 1.0) -> np.ndarray:
    """
    Euclidean projection onto {x >= 0, sum(x) = mass} by sort-and-threshold.

    Args:
        v: Finite vector of length >= 1
        mass: Total mass of the target simplex (positive)

    Returns:
        The projected vector

    Raises:
        InvalidStrategyError: on empty or non-finite input
    """
    vector = np.asarray(v, dtype=float).reshape(-1)
    if vector.size == 0:
        raise InvalidStrategyError("cannot project an empty vector")
    if not np.all(np.isfinite(vector)):
        raise InvalidStrategyError("cannot project a non-finite vector")
    ordered = np.sort(vector)[::-1]
    cumulative = np.cumsum(ordered) - mass
    ranks = np.arange(1, vector.size + 1)
    rho = np.nonzero(ordered * ranks > cumulative)[0][-1]
    theta = cumulative[rho] / (rho + 1.0)
    result = np.maximum(vector - theta, 0.0)
    # renormalize the float residue so the sum is exact to ~1 ulp
    total = result.sum()
    if total > 0:
        result *= mass / total
    return result


def max_social_welfare(game: Game) -> Tuple[PureProfile, float]:
    """Pure profile with the largest payoff sum; lexicographically smallest on ties."""
    welfare = game.payoffs.sum(axis=-1)
    flat = int(np.argmax(welfare))
    profile = tuple(int(i) for i in np.unravel_index(flat, welfare.shape))
    return profile, float(welfare[profile])


def format_game(game: Game) -> str:
    """Render a game in the plain-text game format."""
    lines = [f"players {game.num_players}", "shape " + " ".join(str(k) for k in game.strategy_counts)]
    flat = game.payoffs.reshape(-1, game.num_players)
    for row in flat:
        lines.append(" ".join(f"{value:.17g}" for value in row))
    return "\n".join(lines) + "\n"


def parse_game(text: str, path: Optional[str] = None) -> Game:
    """
    Parse the plain-text game format.

    Raises:
        GameFormatError: on a malformed header, wrong payoff count or bad token
    """
    entries = []
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped and not stripped.startswith("#"):
            entries.append((number, stripped))

    if len(entries) < 2:
        raise GameFormatError("missing 'players' and 'shape' header lines", path=path, line=len(text.splitlines()) or 1)

    number, header = entries[0]
    tokens = header.split()
    if len(tokens) != 2 or tokens[0] != "players":
        raise GameFormatError(f"expected 'players <N>', found {header!r}", path=path, line=number)
    try:
        num_players = int(tokens[1])
    except ValueError:
        raise GameFormatError(f"player count {tokens[1]!r} is not an integer", path=path, line=number)
    if num_players < 1:
        raise GameFormatError("player count must be positive", path=path, line=number)

    number, header = entries[1]
    tokens = header.split()
    if not tokens or tokens[0] != "shape" or len(tokens) != num_players + 1:
        raise GameFormatError(f"expected 'shape' followed by {num_players} sizes, found {header!r}", path=path, line=number)
    try:
        shape = tuple(int(t) for t in tokens[1:])
    except ValueError:
        raise GameFormatError(f"non-integer size in {header!r}", path=path, line=number)
    if any(k < 1 for k in shape):
        raise GameFormatError("strategy counts must be positive", path=path, line=number)

    expected = int(np.prod(shape))
    rows = entries[2:]
    if len(rows) != expected:
        raise GameFormatError(
            f"expected {expected} payoff lines, found {len(rows)}",
            path=path,
            line=rows[-1][0] if rows else number,
        )

    values = np.empty((expected, num_players))
    for index, (number, row) in enumerate(rows):
        tokens = row.split()
        if len(tokens) != num_players:
            raise GameFormatError(f"expected {num_players} payoffs, found {len(tokens)}", path=path, line=number)
        for column, token in enumerate(tokens):
            try:
                values[index, column] = float(token)
            except ValueError:
                raise GameFormatError(f"non-numeric payoff {token!r}", path=path, line=number)
    if not np.all(np.isfinite(values)):
        raise GameFormatError("payoffs must be finite", path=path)
    return Game(values.reshape(shape + (num_players,)))
