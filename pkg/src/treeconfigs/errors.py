"""Shared exception types."""


class CapacityError(Exception):
    """Requested size exceeds a configured capacity cap."""


class DataError(Exception):
    """Invalid input data."""


class NewickError(DataError):
    """Malformed Newick text, with the offending position when known."""

    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = "%s (at position %d)" % (message, position)
        super().__init__(message)


class TreeDomainError(DataError):
    """A node reference or size argument outside the tree's domain."""


class DegenerateDistributionError(DataError):
    """A distribution with zero spread where spread is required."""
