"""This module handles mixfb errors."""
from __future__ import annotations

from enum import IntEnum
from typing import Any, Dict, Optional


class ExitCode(IntEnum):
    """Enumerates the process exit codes of the CLI."""

    Ok = 0
    Config = 2
    Numerical = 3
    Infeasible = 4
    InertiaMismatch = 5
    ResidualViolation = 6


ExitCodeMessage: Dict[int, str] = {
    ExitCode.Ok: "Success",
    ExitCode.Config: "The configuration or certificate could not be used",
    ExitCode.Numerical: "A numerical computation failed",
    ExitCode.Infeasible: "The LMI problem has no strictly feasible point",
    ExitCode.InertiaMismatch: "The certificate has the wrong inertia",
    ExitCode.ResidualViolation: "A certificate residual is violated",
}


class MixfbError(Exception):
    """Base class of all mixfb errors."""

    exit_code: ExitCode = ExitCode.Numerical


class InvalidInput(MixfbError, ValueError):
    """Raise when an argument violates the documented preconditions."""

    exit_code = ExitCode.Config


class ConfigError(InvalidInput):
    """Raise when a configuration document fails validation."""


class NumericalSingularity(MixfbError):
    """Raise when evaluating a system at (or numerically at) one of its poles."""


class ShiftedAxisPole(NumericalSingularity):
    """Raise when a pole lies on the shifted imaginary axis Re(s) = -lambda."""


class PreconditionFailed(MixfbError):
    """Raise when a theorem's hypothesis does not hold for the given data."""


class MarginalEquilibrium(MixfbError):
    """Raise when an equilibrium has an eigenvalue in the stability dead-zone."""

    def __init__(self, y: float, max_real: float) -> None:
        """Init.

        Args:
            y: The scalar equilibrium output.
            max_real: The largest real part of the linearization spectrum.
        """
        self.y = y
        self.max_real = max_real
        super().__init__(
            f"Equilibrium at y={y:.6g} is marginal (max Re = {max_real:.3g})"
        )


class Infeasible(MixfbError):
    """Raise when an LMI problem has no strictly feasible point."""

    exit_code = ExitCode.Infeasible

    def __init__(
        self, best_residual: float, diagnostics: Optional[Dict[str, Any]] = None
    ) -> None:
        """Init.

        Args:
            best_residual: Smallest max-eigenvalue residual that was achieved.
            diagnostics: Solver status and per-constraint details.
        """
        self.best_residual = best_residual
        self.diagnostics = diagnostics or {}
        super().__init__(f"LMI infeasible (best residual {best_residual:.6g})")


class InertiaMismatch(MixfbError):
    """Raise when a solution matrix does not have the required inertia."""

    exit_code = ExitCode.InertiaMismatch


class UncontrollablePair(MixfbError):
    """Raise when (A, B) fails the controllability rank test."""

    exit_code = ExitCode.Infeasible


class IntegrationFailure(MixfbError):
    """Raise when the integrator cannot complete the requested horizon."""

    def __init__(self, msg: str, partial: Any = None) -> None:
        """Init.

        Args:
            msg: The error message.
            partial: The trace computed up to the failure.
        """
        self.partial = partial
        super().__init__(msg)


class ResidualViolation(MixfbError):
    """Raise when re-verifying a certificate finds a violated inequality."""

    exit_code = ExitCode.ResidualViolation
