"""Exception types shared across the package."""


class OrbitsepError(Exception):
    """Base class for all package errors."""


class InvalidInputError(OrbitsepError, ValueError):
    """Malformed parameters, points, schemas, or violated preconditions."""


class BudgetExhaustedError(OrbitsepError):
    """An orbit search ran out of budget (or the orbit closed) before success.

    This is a report of "unknown", not a disproof: the searched hypothesis may
    still hold beyond the explored horizon.
    """

    def __init__(self, message, explored=0):
        super().__init__(message)
        self.explored = explored
        # Populated as the error unwinds a recursive separation: one entry per
        # completed-or-started level, innermost first.
        self.partial_levels = []


class TraceReplayError(OrbitsepError):
    """A recorded separation trace is inconsistent with its instance."""
