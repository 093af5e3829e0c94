"""Exception types shared across the package."""

from __future__ import annotations


class RotorLabError(Exception):
    """Base class for all rotorlab errors."""


class InvalidParameters(RotorLabError):
    """Graph family parameters do not describe a realizable graph."""


class WrongFamily(RotorLabError):
    """A configuration builder was applied to an incompatible graph family."""


class GraphTooSmall(RotorLabError):
    """The construction needs more vertices than the graph has."""


class EvenSide(RotorLabError):
    """The origin-pointing torus construction requires an odd side length."""


class DivisibilityError(RotorLabError):
    """Rotor sequence lengths cannot be scaled to the lazy walk exactly."""


class ChainMismatch(RotorLabError):
    """Rotor sequence multiplicities disagree with the declared chain."""


class DimensionMismatch(RotorLabError):
    """Array arguments have inconsistent shapes."""


class SingularSystem(RotorLabError):
    """A linear solve failed; signals a broken chain or disconnected graph."""


class NonConvergent(RotorLabError):
    """A series evaluation did not converge (periodic chain without Cesaro mode)."""


class CapExceeded(RotorLabError):
    """A walk hit its step cap before reaching the stopping set.

    Carries the partial walk state so the caller can inspect counters.
    """

    def __init__(self, message: str, state=None, steps: int | None = None):
        super().__init__(message)
        self.state = state
        self.steps = steps
