"""Exceptions raised by the henon_morse package."""

from __future__ import annotations


class HenonMorseError(Exception):
    """Base class for henon_morse errors."""


class GridError(HenonMorseError):
    """Raised for invalid grids or values that do not match a grid."""


class DomainError(HenonMorseError):
    """Raised for invalid ball or annulus radii."""


class NonlinearityError(HenonMorseError):
    """Raised when sampled evaluators contradict a nonlinearity's metadata."""


class SolverError(HenonMorseError):
    """Raised when a radial boundary value problem cannot be solved."""


class NoBracketError(SolverError):
    """Raised when the shooting parameter cannot be bracketed."""


class SearchFailedError(SolverError):
    """Raised when bisection exhausts its budget."""


class ZeroNotFoundError(SolverError):
    """Raised when an initial value solution has too few zeros."""


class DiscretizationAlarm(HenonMorseError):
    """Raised when a discrete counterpart of a proved bound fails."""


class UsageError(HenonMorseError):
    """Raised for invalid command line or configuration input."""


class ReportError(HenonMorseError):
    """Raised when an artifact cannot be written or read."""
