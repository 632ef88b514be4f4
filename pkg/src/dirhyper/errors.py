"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    """A parameter lies outside the range an operation accepts."""


class CapacityError(RuntimeError):
    """An exact (dense 2^d) computation was requested above the configured size cap."""


class DomainError(ValueError):
    """A point lies outside a Bregman generator's domain."""


class NotApplicable(Exception):
    """A verification case whose preconditions do not hold.

    Raised instead of reporting pass or fail, so that sweeps can count and
    list skipped cells.
    """
