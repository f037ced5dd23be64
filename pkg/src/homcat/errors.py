"""Exception hierarchy.

Two families matter to callers: configuration/usage problems
(ValidationError, CLI exit code 1) and refusals to compute in a numeric
regime the grids cannot support (NumericRegimeError subclasses, CLI exit
code 2). Everything derives from HomcatError.
"""

from __future__ import annotations


class HomcatError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(HomcatError):
    """Invalid value, inconsistent configuration, or misuse of an API."""


class NumericRegimeError(HomcatError):
    """The requested computation is outside the supported numeric regime."""


class GridResolutionError(NumericRegimeError):
    """A sampling grid is too coarse or too narrow for the state on it."""


class NyquistLimitError(NumericRegimeError):
    """A phase factor oscillates faster than the sampling step resolves."""


class DetectorRegimeError(NumericRegimeError):
    """Detector window and wavepacket duration are not cleanly separated."""


class FarFieldError(NumericRegimeError):
    """Screen distance too short for far-field propagation."""
