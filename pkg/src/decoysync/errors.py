"""Exception types raised across the package."""


class DecoySyncError(Exception):
    """Base class for all package errors."""


class InvalidConfig(DecoySyncError, ValueError):
    """A configuration value violates a documented constraint."""


class InvalidInput(DecoySyncError, ValueError):
    """An input array has the wrong shape or too few samples."""


class DegenerateSeries(DecoySyncError, ValueError):
    """A correlation series has zero spread outside the peak."""


class Infeasible(DecoySyncError, ValueError):
    """A hardware budget cannot accommodate the requested block."""


class UndefinedQBER(DecoySyncError, ValueError):
    """Neither signal nor background can produce a click."""
