"""Exception hierarchy.

Two families: :class:`ValidationError` for bad input (CLI exit code 2) and
:class:`DiagnosticError` for mathematical diagnostics such as a violated
admissibility guarantee (CLI exit code 3).
"""

from __future__ import annotations


class NonScatterError(Exception):
    """Base class for all package errors."""


class ValidationError(NonScatterError, ValueError):
    """Input rejected before any numerics ran."""


class InvalidDomainError(ValidationError):
    pass


class UnsupportedParameterError(ValidationError):
    pass


class DiagnosticError(NonScatterError, ArithmeticError):
    """A numerical check established that a hypothesis fails."""


class EvaluationError(DiagnosticError):
    def __init__(self, message: str, theta=None):
        super().__init__(message)
        self.theta = theta


class BranchViolationError(DiagnosticError):
    pass


class AdmissibilityError(DiagnosticError):
    pass


class DegenerateStationaryPointError(DiagnosticError):
    pass


class AliasingError(DiagnosticError):
    """Spectral tail too heavy; refine the eta grid."""


class RangeError(DiagnosticError):
    pass
