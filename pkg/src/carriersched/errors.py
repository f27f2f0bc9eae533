"""Exception hierarchy shared across the package."""

from __future__ import annotations


class SchedulingError(Exception):
    """Base class for every error raised by carriersched."""


class StructureError(SchedulingError):
    """Schedule/instance dimensions do not line up.

    Structural mismatches are not constraint violations: the validator
    refuses to score such a schedule at all.
    """


class InfeasibleInstanceError(SchedulingError):
    """A tag can never be interrogated (its host has no potential carrier)."""

    def __init__(self, tag_id: int, message: str | None = None):
        self.tag_id = tag_id
        super().__init__(message or f"tag {tag_id} cannot be interrogated: "
                         "its host has no neighbor to provide a carrier")


class GenerationError(SchedulingError):
    """Instance generation exhausted its retry budget."""


class NumericalError(SchedulingError):
    """An iterative numerical routine failed to converge within budget."""


class BudgetExceededError(SchedulingError):
    """Instance is larger than the solver budget permits; refused up front."""


class SolverTimeoutError(SchedulingError):
    """Solver ran out of time/expansions. Carries the best incumbent found."""

    def __init__(self, message: str, incumbent=None):
        self.incumbent = incumbent
        super().__init__(message)


class SlotFailure(SchedulingError):
    """A single inference step produced no usable timeslot under the policy."""


class ScheduleFailureError(SchedulingError):
    """The iterative scheduler gave up before interrogating every tag.

    Carries the slots produced so far for diagnostics; counts as a failed
    schedule regardless of partial progress.
    """

    def __init__(self, message: str, partial_slots=()):
        self.partial_slots = tuple(partial_slots)
        super().__init__(message)


class ConfigError(SchedulingError):
    """A configuration violates one of its invariants."""


class WeightFormatError(SchedulingError):
    """Weight file is not in the expected container format (magic/version)."""


class WeightIntegrityError(SchedulingError):
    """Weight file parses but its payload is inconsistent (shapes, truncation)."""


class ParseError(SchedulingError):
    """Input JSON is malformed or violates a domain invariant."""

    def __init__(self, field: str, rule: str):
        self.field = field
        self.rule = rule
        super().__init__(f"{field}: {rule}")


class UndefinedRatioError(SchedulingError):
    """A percentage metric was requested with a zero denominator."""


class BenchmarkError(SchedulingError):
    """A scheduler under benchmark emitted an invalid schedule."""
