# Standard imports
from typing import Optional


class PMDInterferometryError(Exception):
    """Base class for every error raised by pmd_interferometry."""


class InputDomainError(PMDInterferometryError, ValueError):
    """A numeric input lies outside the domain of an operation."""


class ConfigurationError(PMDInterferometryError, ValueError):
    """
    A configuration is invalid or an operation precondition on it is unmet.

    Args:
        message: Human readable description.
        field_path: Dotted path of the offending field, if any.
    """

    def __init__(self, message: str, field_path: Optional[str] = None):
        self.field_path = field_path
        if field_path:
            message = f"{field_path}: {message}"
        super().__init__(message)


class ClosedFormInapplicableError(PMDInterferometryError, ValueError):
    """A closed form was requested for a configuration with beta or gamma terms."""


class QuadratureConvergenceError(PMDInterferometryError, ArithmeticError):
    """
    Adaptive quadrature ran out of its evaluation budget.

    Attributes:
        estimate: Best estimate of the integral when the budget ran out.
        error_bound: Error bound attached to that estimate.
        evaluations: Number of integrand evaluations spent.
        scan_point: Swept delay value being evaluated, when raised from a scan.
    """

    def __init__(self, message: str, estimate: complex, error_bound: float,
                 evaluations: int, scan_point: Optional[float] = None):
        self.estimate = estimate
        self.error_bound = error_bound
        self.evaluations = evaluations
        self.scan_point = scan_point
        super().__init__(message)

    def at_scan_point(self, scan_point: float) -> "QuadratureConvergenceError":
        """Returns a copy that names the scan point being evaluated."""
        return QuadratureConvergenceError(
            f"{self.args[0]} (scan point {scan_point:.6g})",
            self.estimate, self.error_bound, self.evaluations, scan_point
        )


class FitDivergenceError(PMDInterferometryError, ArithmeticError):
    """A fit did not converge; `residual` holds the last residual norm."""

    def __init__(self, message: str, residual: Optional[float] = None):
        self.residual = residual
        if residual is not None:
            message = f"{message} (residual {residual:.3e})"
        super().__init__(message)


class ProtocolError(PMDInterferometryError):
    """A recovery protocol could not be carried out on the supplied scans."""


class PairingError(ProtocolError):
    """Features of a two-scan protocol could not be paired unambiguously."""


class ConsistencyError(ProtocolError):
    """Scans disagree on shared source or geometry metadata."""
