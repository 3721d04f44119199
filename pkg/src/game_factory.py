"""
Game Factory Module for psro-rrd

This module builds the benchmark games used in experiments: the small
zero-sum game on which the minimum-regret constrained profile never grows the
empirical game, the long equilibrium path game, seeded random game families,
and game files in the plain-text format.
"""

import itertools
import logging
import math
import os
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.exceptions import GameShapeError
from src.game_core import Game, format_game, parse_game

logger = logging.getLogger(__name__)

UNIFORM01 = "uniform01"
GAUSSIAN = "gaussian"
DISTRIBUTIONS = (UNIFORM01, GAUSSIAN)


def make_mrcp_closed_game() -> Game:
    """
    Symmetric 3x3 zero-sum game whose pure NE is (a3, a3).

    Restricted to {a1, a2} per player, the minimum-regret constrained profile
    has both best responses inside the restricted sets, so PSRO with that
    solver never adds a3.
    """
    row = np.array(
        [
            [0.0, -1.0, -0.5],
            [1.0, 0.0, -5.0],
            [0.5, 5.0, 0.0],
        ]
    )
    return Game.from_matrices(row, -row)


def make_long_path_game(n: int) -> Game:
    """
    Symmetric n x n game with a long double-oracle path.

    The best response to s_k is s_{k+1}, so double oracle started at (s1, s1)
    walks the whole diagonal before reaching the only pure NE (s_n, s_n).
    Against a near-uniform mixture of s1 and s2 the best response jumps to s_n.

    Args:
        n: Number of strategies per player (at least 4)
    """
    if n < 4:
        raise GameShapeError(f"the long path game needs n >= 4, got {n}")
    u = np.zeros((n, n))

    def put(row: int, col: int, mine: float, theirs: float) -> None:
        # 1-based strategy indices; entry (s_row, s_col) and its transpose
        u[row - 1, col - 1] = mine
        u[col - 1, row - 1] = theirs

    for k in range(2, n):
        u[k - 1, k - 1] = 0.1 * (k - 1)
        put(k + 1, k, 0.1 * k, 0.1 * (k - 1))
    put(math.ceil(n / 2), 1, 0.01, 0.0)
    put(2, 1, 0.011, 0.0)
    put(n, 1, 0.005, 0.0)
    put(n, 2, 0.199, 0.0)
    u[n - 1, n - 1] = 100.0
    return Game.from_matrices(u, u.T)


@dataclass(frozen=True)
class RandomGameSpec:
    """
    Parameters of a seeded random game.

    Attributes:
        num_players: Number of players (at least 2)
        sizes: Strategy count per player
        distribution: "uniform01" or "gaussian"
        zero_sum: Set the second player's payoffs to minus the first's (2 players only)
        symmetric: Make every player face the same payoff function (equal sizes only)
        seed: Seed of the payoff stream
    """

    num_players: int
    sizes: Tuple[int, ...]
    distribution: str = UNIFORM01
    zero_sum: bool = False
    symmetric: bool = False
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(k) for k in self.sizes))
        object.__setattr__(self, "distribution", self.distribution.lower())
        if self.num_players < 2:
            raise GameShapeError(f"random games need at least 2 players, got {self.num_players}")
        if len(self.sizes) != self.num_players:
            raise GameShapeError(f"{len(self.sizes)} sizes given for {self.num_players} players")
        for player, size in enumerate(self.sizes):
            if size < 1:
                raise GameShapeError(f"strategy count must be positive, got {size}", player=player)
        if self.distribution not in DISTRIBUTIONS:
            raise GameShapeError(f"unknown distribution {self.distribution!r}; expected one of {DISTRIBUTIONS}")
        if self.zero_sum and self.num_players != 2:
            raise GameShapeError("zero-sum random games must have exactly 2 players")
        if self.symmetric and len(set(self.sizes)) != 1:
            raise GameShapeError(f"symmetric random games need equal sizes, got {self.sizes}")


def make_random_game(spec: RandomGameSpec) -> Game:
    """
    Draw a random game deterministically from spec.seed.

    Zero-sum games draw the first player's payoffs and negate them for the
    second. Symmetric games draw one payoff function, symmetrized over the
    opponents' axes, and give it to every player.
    """
    rng = np.random.default_rng(np.random.SeedSequence(spec.seed % 2 ** 63))

    def draw(shape):
        if spec.distribution == UNIFORM01:
            return rng.random(shape)
        return rng.standard_normal(shape)

    n = spec.num_players
    if spec.symmetric:
        base = draw(spec.sizes)
        if n > 2:
            # average over orderings of the opponents' axes
            perms = list(itertools.permutations(range(1, n)))
            base = sum(np.transpose(base, (0,) + p) for p in perms) / len(perms)
        if spec.zero_sum:
            base = base - base.T
        payoffs = [np.moveaxis(base, 0, player) for player in range(n)]
    elif spec.zero_sum:
        first = draw(spec.sizes)
        payoffs = [first, -first]
    else:
        payoffs = [draw(spec.sizes) for _ in range(n)]
    return Game(np.stack(payoffs, axis=-1))


def load_game(path: str) -> Game:
    """
    Read a game file.

    Raises:
        GameFormatError: with the offending line number
    """
    with open(path, "r") as f:
        text = f.read()
    game = parse_game(text, path=path)
    logger.debug("Loaded %s game from %s", "x".join(str(k) for k in game.strategy_counts), path)
    return game


def save_game(game: Game, path: str) -> str:
    """Write a game file; values round-trip exactly."""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w") as f:
        f.write(format_game(game))
    return path


def matching_pennies() -> Game:
    """Two-player zero-sum game with the unique NE ((1/2, 1/2), (1/2, 1/2))."""
    row = np.array([[1.0, -1.0], [-1.0, 1.0]])
    return Game.from_matrices(row, -row)


def game_from_config(name: str, params: dict) -> Game:
    """
    Build a named game.

    Args:
        name: "mrcp_closed", "long_path", "matching_pennies", "random" or "file"
        params: Constructor arguments (n for long_path; the RandomGameSpec fields
            for random; path for file)
    """
    if name == "mrcp_closed":
        return make_mrcp_closed_game()
    if name == "long_path":
        return make_long_path_game(int(params["n"]))
    if name == "matching_pennies":
        return matching_pennies()
    if name == "random":
        return make_random_game(RandomGameSpec(**params))
    if name == "file":
        return load_game(params["path"])
    raise GameShapeError(f"unknown game constructor {name!r}")
