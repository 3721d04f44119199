"""
Exception types shared by the psro-rrd modules.

Every error raised on purpose by the library derives from EgtaError, so callers
(the experiment runner in particular) can tell expected failures apart from bugs.
"""

from typing import Any, Optional, Tuple


class EgtaError(Exception):
    """Root of all library errors."""


class GameShapeError(EgtaError, ValueError):
    """A profile or tensor does not match the game's dimensions."""

    def __init__(self, message: str, player: Optional[int] = None):
        if player is not None:
            message = f"player {player}: {message}"
        super().__init__(message)
        self.player = player


class InvalidStrategyError(EgtaError, ValueError):
    """A probability vector or strategy index is outside its valid range."""


class MissingProfileError(EgtaError, ValueError):
    """A payoff lookup hit a profile that has not been evaluated."""

    def __init__(self, profile: Tuple[int, ...], message: Optional[str] = None):
        super().__init__(message or f"profile {profile} has not been evaluated")
        self.profile = tuple(profile)


class GameFormatError(EgtaError, ValueError):
    """A game or tensor file could not be parsed."""

    def __init__(self, message: str, path: Any = None, line: Optional[int] = None):
        location = ""
        if path is not None:
            location = f"{path}"
        if line is not None:
            location = f"{location}:{line}" if location else f"line {line}"
        super().__init__(f"{location}: {message}" if location else message)
        self.path = path
        self.line = line


class ConfigError(EgtaError, ValueError):
    """An experiment configuration is invalid."""

    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


class SolverError(EgtaError):
    """An equilibrium solver failed numerically."""


class PsroRunError(EgtaError):
    """A PSRO run aborted; the partial trace is attached."""

    def __init__(self, message: str, trace: Any = None):
        super().__init__(message)
        self.trace = trace
