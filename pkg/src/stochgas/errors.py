"""Exception hierarchy.

Every error carries an ``exit_code`` so the command-line front end can map
failures without a lookup table.
"""

from __future__ import annotations


class StochGasError(Exception):
    exit_code = 1


class ConfigError(StochGasError, ValueError):
    """Invalid parameters or configuration."""

    exit_code = 2


class ConstraintError(ConfigError):
    """A domain-type invariant (e.g. positive density) is violated by the input."""


class ToleranceError(StochGasError, ArithmeticError):
    """Adaptive quadrature or root polishing did not reach the requested accuracy."""

    exit_code = 3

    def __init__(self, message: str, achieved: float | None = None):
        super().__init__(message)
        self.achieved = achieved


class DomainError(StochGasError, ValueError):
    exit_code = 4


class VacuumError(DomainError):
    """Density vanishes on the whole effective integration domain."""


class DegenerateRootError(DomainError):
    """A characteristic root sits on a focal point (vanishing Jacobian)."""


class IndeterminateError(DomainError):
    """A closed-form inversion has a vanishing coefficient."""


class WindowError(DomainError):
    """Integration window does not contain the effective support."""
