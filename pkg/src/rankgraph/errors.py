"""Exception hierarchy for rankgraph.

Validation failures subclass ``ValueError`` so callers can catch them the
usual way; the CLI maps them to exit code 2 and everything else to 3.
"""

from __future__ import annotations


class RankGraphError(Exception):
    """Base class for all rankgraph errors."""


class ValidationError(RankGraphError, ValueError):
    """Input rejected before any computation started."""


class InvalidPairError(ValidationError):
    """A node pair is not of the form 0 <= u < v < n."""

    def __init__(self, u: int, v: int, n: int | None = None) -> None:
        self.u = u
        self.v = v
        self.n = n
        bound = f" < {n}" if n is not None else ""
        super().__init__(f"Invalid node pair ({u}, {v}): expected 0 <= u < v{bound}")


class NonFiniteCostError(ValidationError):
    """A cost function returned NaN or infinity for some pair."""

    def __init__(self, u: int, v: int, value: float) -> None:
        self.u = u
        self.v = v
        self.value = value
        super().__init__(f"Cost for pair ({u}, {v}) is not finite: {value!r}")


class InfeasibleDensityError(ValidationError):
    """The requested edge count does not fit in the available node pairs."""

    def __init__(self, m: float, pair_count: int) -> None:
        self.m = m
        self.pair_count = pair_count
        super().__init__(
            f"Cannot place m={m:g} expected edges among L={pair_count} node pairs "
            f"(need 0 <= m <= L)"
        )


class UnknownStructureError(ValidationError):
    """A structure name is not in the zoo."""

    def __init__(self, name: str, available: list[str]) -> None:
        self.name = name
        self.available = available
        super().__init__(f"Unknown structure {name!r}. Available: {', '.join(available)}")


class ConfigurationError(ValidationError):
    """Inconsistent run configuration or mismatched model/profile."""


class NumericError(RankGraphError, ArithmeticError):
    """A numerical routine failed to produce a valid result."""
