"""
Empirical Game Module for psro-rrd

This module manages restricted views of a full game: the per-player strategy
subsets generated so far, a sparse tensor of estimated payoffs with its
evaluation bookkeeping, and a seeded noisy estimator standing in for simulation.
"""

import itertools
import logging
import os
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from src.exceptions import GameFormatError, GameShapeError, InvalidStrategyError, MissingProfileError
from src.game_core import Game, MixedProfile, PureProfile

logger = logging.getLogger(__name__)


class StrategySets:
    """
    Ordered per-player subsets of full-game strategy indices.

    Each strategy remembers the PSRO iteration that added it; insertion order is
    the order of the restricted game's axes.
    """

    def __init__(self, per_player: Sequence[Sequence[int]], added_at: Optional[Sequence[Sequence[int]]] = None):
        """
        Args:
            per_player: Full-game strategy indices for each player
            added_at: Iteration at which each strategy was added (defaults to 0)
        """
        self.per_player: List[List[int]] = []
        self.added_at: List[List[int]] = []
        for player, strategies in enumerate(per_player):
            strategies = [int(s) for s in strategies]
            if len(set(strategies)) != len(strategies):
                raise InvalidStrategyError(f"player {player}: duplicate strategies in {strategies}")
            if any(s < 0 for s in strategies):
                raise InvalidStrategyError(f"player {player}: negative strategy index in {strategies}")
            self.per_player.append(strategies)
            if added_at is None:
                self.added_at.append([0] * len(strategies))
            else:
                stamps = [int(t) for t in added_at[player]]
                if len(stamps) != len(strategies):
                    raise InvalidStrategyError(f"player {player}: {len(stamps)} stamps for {len(strategies)} strategies")
                self.added_at.append(stamps)
        if not self.per_player:
            raise InvalidStrategyError("strategy sets need at least one player")

    @classmethod
    def full(cls, counts: Sequence[int]) -> "StrategySets":
        """Every strategy of every player."""
        return cls([list(range(k)) for k in counts])

    @property
    def num_players(self) -> int:
        return len(self.per_player)

    @property
    def counts(self) -> Tuple[int, ...]:
        return tuple(len(s) for s in self.per_player)

    @property
    def box_size(self) -> int:
        return int(np.prod(self.counts))

    def __getitem__(self, player: int) -> List[int]:
        return self.per_player[player]

    def contains(self, player: int, strategy: int) -> bool:
        return int(strategy) in self.per_player[player]

    def position(self, player: int, strategy: int) -> int:
        """Restricted index of a full-game strategy."""
        return self.per_player[player].index(int(strategy))

    def add(self, player: int, strategy: int, iteration: int) -> bool:
        """
        Append a strategy unless it is already present.

        Returns:
            True if the strategy was added
        """
        strategy = int(strategy)
        if strategy < 0:
            raise InvalidStrategyError(f"player {player}: negative strategy index {strategy}")
        if strategy in self.per_player[player]:
            return False
        self.per_player[player].append(strategy)
        self.added_at[player].append(int(iteration))
        return True

    def latest(self, player: int) -> int:
        """Most recently added strategy of a player (last inserted among the newest iteration)."""
        stamps = self.added_at[player]
        newest = max(stamps)
        position = max(i for i, t in enumerate(stamps) if t == newest)
        return self.per_player[player][position]

    def box(self) -> Iterator[PureProfile]:
        """Full-index pure profiles of the box, row-major over insertion order."""
        return itertools.product(*self.per_player)

    def issubset(self, other: "StrategySets") -> bool:
        if self.num_players != other.num_players:
            return False
        return all(set(mine) <= set(theirs) for mine, theirs in zip(self.per_player, other.per_player))

    def check_against(self, game: Game) -> None:
        if self.num_players != game.num_players:
            raise GameShapeError(f"strategy sets cover {self.num_players} players, game has {game.num_players}")
        for player, (strategies, count) in enumerate(zip(self.per_player, game.strategy_counts)):
            if not strategies:
                raise GameShapeError("empty strategy set", player=player)
            if max(strategies) >= count:
                raise GameShapeError(f"strategy {max(strategies)} out of range [0, {count})", player=player)

    def copy(self) -> "StrategySets":
        return StrategySets([list(s) for s in self.per_player], [list(t) for t in self.added_at])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StrategySets):
            return NotImplemented
        return self.per_player == other.per_player and self.added_at == other.added_at

    def __repr__(self) -> str:
        return f"StrategySets({self.per_player})"


class PartialTensor:
    """Sparse map from evaluated pure profiles (full-game indices) to payoff estimates."""

    def __init__(self, num_players: int):
        self.num_players = num_players
        self.estimates: Dict[PureProfile, np.ndarray] = {}
        self.sample_counts: Dict[PureProfile, int] = {}

    def record(self, profile: Sequence[int], payoff: np.ndarray, samples: int) -> None:
        profile = tuple(int(s) for s in profile)
        payoff = np.asarray(payoff, dtype=float).reshape(-1)
        if payoff.size != self.num_players:
            raise GameShapeError(f"payoff vector of length {payoff.size} for {self.num_players} players")
        if samples < 1:
            raise InvalidStrategyError(f"sample count must be positive, got {samples}")
        payoff.setflags(write=False)
        self.estimates[profile] = payoff
        self.sample_counts[profile] = int(samples)

    def get(self, profile: Sequence[int]) -> np.ndarray:
        key = tuple(int(s) for s in profile)
        try:
            return self.estimates[key]
        except KeyError:
            raise MissingProfileError(key)

    def __contains__(self, profile: object) -> bool:
        return tuple(profile) in self.estimates

    def __len__(self) -> int:
        return len(self.estimates)

    def export_lines(self) -> List[str]:
        """One `<indices> : <payoffs> : <samples>` line per profile, lexicographic order."""
        lines = []
        for profile in sorted(self.estimates):
            indices = " ".join(str(s) for s in profile)
            payoffs = " ".join(f"{v:.17g}" for v in self.estimates[profile])
            lines.append(f"{indices} : {payoffs} : {self.sample_counts[profile]}")
        return lines

    @classmethod
    def parse_lines(cls, lines: Sequence[str], num_players: int, path: Optional[str] = None) -> "PartialTensor":
        tensor = cls(num_players)
        for number, raw in enumerate(lines, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(":")]
            if len(parts) != 3:
                raise GameFormatError("expected '<indices> : <payoffs> : <samples>'", path=path, line=number)
            try:
                profile = tuple(int(t) for t in parts[0].split())
                payoff = np.array([float(t) for t in parts[1].split()])
                samples = int(parts[2])
            except ValueError as exc:
                raise GameFormatError(f"bad token ({exc})", path=path, line=number)
            if len(profile) != num_players or payoff.size != num_players:
                raise GameFormatError(f"expected {num_players} indices and payoffs", path=path, line=number)
            tensor.record(profile, payoff, samples)
        return tensor


@dataclass(frozen=True)
class PayoffEstimator:
    """
    Simulation stand-in: the true payoff plus averaged i.i.d. Gaussian noise.

    Each profile draws from its own stream derived from (seed, profile), so an
    estimate never depends on the order in which profiles are evaluated.
    """

    noise_std: float = 0.0
    samples_per_profile: int = 1
    seed: int = 0

    def __post_init__(self):
        if not self.noise_std >= 0:
            raise InvalidStrategyError(f"noise_std must be non-negative, got {self.noise_std}")
        if self.samples_per_profile < 1:
            raise InvalidStrategyError(f"samples_per_profile must be positive, got {self.samples_per_profile}")

    def sample(self, full: Game, profile: Sequence[int]) -> np.ndarray:
        truth = np.array(full.payoff(profile), dtype=float)
        if self.noise_std == 0:
            return truth
        rng = np.random.default_rng(np.random.SeedSequence([self.seed % 2 ** 63] + [int(s) for s in profile]))
        noise = rng.normal(0.0, self.noise_std, size=(self.samples_per_profile, full.num_players))
        return truth + noise.mean(axis=0)


def evaluate_profile(
    estimator: PayoffEstimator,
    full: Game,
    profile: Sequence[int],
    tensor: Optional[PartialTensor] = None,
) -> np.ndarray:
    """
    Estimate the payoff of a pure profile, recording it in tensor when given.

    Args:
        estimator: Noise model and sample budget
        full: The full game supplying true payoffs
        profile: Full-game pure profile
        tensor: Optional partial tensor to record the estimate in

    Returns:
        The estimated payoff vector
    """
    payoff = estimator.sample(full, profile)
    if tensor is not None:
        tensor.record(profile, payoff, estimator.samples_per_profile)
    return payoff


def restrict(full: Game, sets: StrategySets, tensor: Optional[PartialTensor] = None) -> Game:
    """
    Standalone game over the restricted index space.

    Payoffs are copied from the full game, or from tensor when one is given
    (which then must cover the whole box).

    Raises:
        MissingProfileError: naming the first unevaluated profile of the box
    """
    sets.check_against(full)
    if tensor is None:
        return full.restrict(sets.per_player)
    payoffs = np.empty(sets.counts + (full.num_players,))
    for position, profile in zip(itertools.product(*(range(k) for k in sets.counts)), sets.box()):
        if profile not in tensor.estimates:
            raise MissingProfileError(profile, f"restricted box is incomplete: profile {profile} has not been evaluated")
        payoffs[position] = tensor.estimates[profile]
    return Game(payoffs)


def lift_profile(profile: MixedProfile, sets: StrategySets, counts: Sequence[int]) -> MixedProfile:
    """Embed a profile over sets into a space of the given per-player sizes."""
    vectors = []
    for player, probs in enumerate(profile):
        if len(probs) != len(sets[player]):
            raise GameShapeError(f"vector of length {len(probs)} for {len(sets[player])} strategies", player=player)
        vector = np.zeros(counts[player])
        vector[sets[player]] = probs
        vectors.append(vector)
    return MixedProfile(vectors)


def embed_profile(profile: MixedProfile, inner: StrategySets, outer: StrategySets) -> MixedProfile:
    """Re-index a profile over inner (a subset of outer) into outer's restricted space."""
    vectors = []
    for player, probs in enumerate(profile):
        vector = np.zeros(len(outer[player]))
        for probability, strategy in zip(probs, inner[player]):
            vector[outer.position(player, strategy)] = probability
        vectors.append(vector)
    return MixedProfile(vectors)


class EmpiricalGame:
    """
    A full game seen through restricted strategy sets and estimated payoffs.

    Profiles are simulated at most once; the tensor only ever grows.
    """

    def __init__(self, full_game: Game, sets: StrategySets, tensor: Optional[PartialTensor] = None):
        """
        Args:
            full_game: The game supplying true payoffs to the estimator
            sets: Initial restricted strategy sets (copied)
            tensor: Optional existing estimates
        """
        sets.check_against(full_game)
        self.full_game = full_game
        self.sets = sets.copy()
        self.tensor = tensor if tensor is not None else PartialTensor(full_game.num_players)

    @property
    def evaluated_count(self) -> int:
        return len(self.tensor)

    def add_strategy(self, player: int, strategy: int, iteration: int) -> bool:
        if not 0 <= int(strategy) < self.full_game.strategy_counts[player]:
            raise GameShapeError(f"strategy {strategy} out of range", player=player)
        return self.sets.add(player, strategy, iteration)

    def ensure(self, profile: Sequence[int], estimator: PayoffEstimator) -> bool:
        """
        Evaluate a profile unless it already has an estimate.

        Returns:
            True if the profile was newly evaluated
        """
        key = tuple(int(s) for s in profile)
        if key in self.tensor.estimates:
            return False
        evaluate_profile(estimator, self.full_game, key, self.tensor)
        return True

    def payoff(self, profile: Sequence[int], estimator: Optional[PayoffEstimator] = None) -> np.ndarray:
        """Estimated payoff of a profile, evaluating it first when an estimator is given."""
        if estimator is not None:
            self.ensure(profile, estimator)
        return self.tensor.get(profile)

    def _resolve(self, sub: Optional[StrategySets]) -> StrategySets:
        if sub is None:
            return self.sets
        if not sub.issubset(self.sets):
            raise InvalidStrategyError(f"{sub} is not contained in the empirical sets {self.sets}")
        return sub

    def is_complete(self, sub: Optional[StrategySets] = None) -> bool:
        """True iff every profile of the (sub-)box has been evaluated."""
        return all(p in self.tensor.estimates for p in self._resolve(sub).box())

    def fill_missing(self, estimator: PayoffEstimator, sub: Optional[StrategySets] = None) -> int:
        """
        Evaluate every missing profile of the current box (or of sub).

        Returns:
            Number of profiles evaluated by this call
        """
        count = 0
        for profile in self._resolve(sub).box():
            if self.ensure(profile, estimator):
                count += 1
        if count:
            logger.debug("Evaluated %d new profiles (%d total)", count, self.evaluated_count)
        return count

    def subgame(self, sub: Optional[StrategySets] = None) -> Game:
        """Game over the (sub-)box built from estimated payoffs."""
        return restrict(self.full_game, self._resolve(sub), self.tensor)

    def lift(self, profile: MixedProfile, sub: Optional[StrategySets] = None) -> MixedProfile:
        """Embed a restricted profile into the full game's strategy space."""
        return lift_profile(profile, self._resolve(sub), self.full_game.strategy_counts)

    def savings(self) -> Tuple[int, int, float]:
        evaluated = self.evaluated_count
        total = self.sets.box_size
        return evaluated, total, 1.0 - evaluated / total

    def save_tensor(self, path: str) -> str:
        """Write the evaluated profiles in the partial tensor text format."""
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, "w") as f:
            for line in self.tensor.export_lines():
                f.write(line + "\n")
        return path

    def load_tensor(self, path: str) -> int:
        """
        Merge estimates from a tensor file; existing estimates are kept.

        Returns:
            Number of profiles taken from the file
        """
        with open(path, "r") as f:
            loaded = PartialTensor.parse_lines(f.read().splitlines(), self.full_game.num_players, path=path)
        count = 0
        for profile, payoff in loaded.estimates.items():
            if profile not in self.tensor.estimates:
                self.tensor.record(profile, payoff, loaded.sample_counts[profile])
                count += 1
        return count
