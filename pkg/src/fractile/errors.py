"""Exception types shared across the package."""

from __future__ import annotations


class FractileError(Exception):
    """Base class for all errors raised by this package."""


class GeometryError(FractileError):
    """Invalid or unsupported geometric input (mixed dimensions, non-convex
    input to a convex-only routine, empty input where nonempty is required)."""


class UnsupportedSystemError(FractileError):
    """Operation not defined for this system (e.g. a dimension or zeta
    computation on a general affine system)."""


class BudgetExceededError(FractileError):
    """A configured enumeration/point/cell budget would be exceeded."""


class TrivialSystemError(FractileError):
    """The system tiles its base set exactly, so no tiles exist."""


class IncompatibleSystemError(FractileError):
    """The parallel-set decomposition does not hold for this system, so the
    tiling cannot be used to describe its parallel volumes directly."""


class SpecError(FractileError):
    """A system-spec document failed to parse or validate.

    ``field`` carries a dotted path to the offending entry when known.
    """

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(message if field is None else f"{field}: {message}")
