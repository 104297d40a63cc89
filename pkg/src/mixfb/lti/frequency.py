"""Frequency responses on shifted imaginary axes and their extrema."""
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from mixfb.error import NumericalSingularity, ShiftedAxisPole
from mixfb.lti.linalg import eig_general
from mixfb.lti.systems import LTI, StateSpace, TransferFunction

OMEGA_MIN = 1e-4
OMEGA_MAX = 1e6
OMEGA_POINTS = 4000
REFINE_TOL = 1e-8
POLE_DISTANCE = 1e-9
AXIS_TOL = 1e-6


def frequency_grid(
    lo: float = OMEGA_MIN, hi: float = OMEGA_MAX, points: int = OMEGA_POINTS
) -> np.ndarray:
    """Log-spaced grid on ``[lo, hi]`` with ``omega = 0`` prepended."""
    return np.concatenate([[0.0], np.logspace(np.log10(lo), np.log10(hi), points)])


def poles_of(sys: LTI) -> np.ndarray:
    """Poles of a transfer function or eigenvalues of a realization."""
    return sys.poles()


def _evaluate(sys: LTI, s: np.ndarray) -> np.ndarray:
    if isinstance(sys, TransferFunction):
        return np.asarray(sys(s), dtype=complex)
    n = sys.n_states
    shifted = s[:, None, None] * np.eye(n) - sys.A[None, :, :]
    try:
        x = np.linalg.solve(shifted, np.broadcast_to(sys.B, (len(s), n, 1)))
    except np.linalg.LinAlgError as exc:
        raise NumericalSingularity("Frequency response evaluated at a pole") from exc
    return (sys.C[0] @ x[..., 0].T) + sys.D[0, 0]


def _response(sys: LTI, omega: np.ndarray, lam: float) -> np.ndarray:
    s = 1j * np.asarray(omega, dtype=float) - lam
    poles = poles_of(sys)
    if poles.size and np.min(np.abs(s[:, None] - poles[None, :])) <= POLE_DISTANCE:
        raise NumericalSingularity(f"Evaluation point within {POLE_DISTANCE} of a pole")
    return _evaluate(sys, s)


def freq_response(sys: LTI, omega, lam: float = 0.0):
    """Evaluate ``G(j omega - lam)``.

    Args:
        sys: A transfer function or SISO realization.
        omega: Frequency in rad/s (scalar or array).
        lam: Shift of the imaginary axis.

    Raises:
        NumericalSingularity: If an evaluation point is (numerically) a pole.

    Returns:
        Complex value(s) with the shape of ``omega``.
    """
    values = _response(sys, np.atleast_1d(omega), lam)
    return complex(values[0]) if np.ndim(omega) == 0 else values


def _check_axis(sys: LTI, lam: float) -> None:
    poles = poles_of(sys)
    if poles.size and np.any(np.abs(poles.real + lam) <= AXIS_TOL):
        raise ShiftedAxisPole(f"A pole lies on the axis Re(s) = {-lam:g}")


def _grid_extremum(
    objective: Callable[[np.ndarray], np.ndarray], grid: np.ndarray
) -> Tuple[float, float]:
    """Minimize ``objective`` on ``grid`` then refine around the grid optimum."""
    values = objective(grid)
    i = int(np.argmin(values))
    best_w, best_v = float(grid[i]), float(values[i])
    # golden section needs a strict bracket
    if 0 < i < len(grid) - 1 and values[i] < min(values[i - 1], values[i + 1]):
        lo, mid, hi = float(grid[i - 1]), float(grid[i]), float(grid[i + 1])
        res = minimize_scalar(
            lambda w: float(objective(np.array([w]))[0]),
            bracket=(lo, mid, hi),
            method="golden",
            tol=REFINE_TOL,
        )
        w = float(res.x)
        if lo <= w <= hi and float(res.fun) < best_v:
            best_w, best_v = w, float(res.fun)
    return best_w, best_v


def shifted_min_real(
    sys: LTI, lam: float = 0.0, omega: Optional[np.ndarray] = None
) -> Tuple[float, float]:
    """Minimum of ``Re G(j omega - lam)`` over a frequency grid.

    The grid always contains ``omega = 0`` and both endpoints; the grid
    optimum is refined by golden-section search inside its bracketing cell.

    Args:
        sys: A transfer function or SISO realization.
        lam: Shift of the imaginary axis.
        omega: Frequency grid; defaults to :func:`frequency_grid`.

    Raises:
        ShiftedAxisPole: If a pole lies within 1e-6 of ``Re(s) = -lam``.

    Returns:
        The minimizing frequency and the minimum.
    """
    _check_axis(sys, lam)
    grid = frequency_grid() if omega is None else np.asarray(omega, dtype=float)
    return _grid_extremum(lambda w: _response(sys, w, lam).real, grid)


def shifted_sup_mag(
    sys: LTI, lam: float = 0.0, omega: Optional[np.ndarray] = None
) -> float:
    """Supremum of ``|G(j omega - lam)|`` over a frequency grid.

    Args:
        sys: A transfer function or SISO realization.
        lam: Shift of the imaginary axis.
        omega: Frequency grid; defaults to :func:`frequency_grid`.

    Raises:
        ShiftedAxisPole: If a pole lies within 1e-6 of ``Re(s) = -lam``.

    Returns:
        The peak magnitude.
    """
    _check_axis(sys, lam)
    grid = frequency_grid() if omega is None else np.asarray(omega, dtype=float)
    _, neg_peak = _grid_extremum(lambda w: -np.abs(_response(sys, w, lam)), grid)
    return -neg_peak


def shifted_min_ratio(
    sys: LTI, lam: float = 0.0, omega: Optional[np.ndarray] = None
) -> float:
    """Infimum of ``Re G / |G|^2`` (= ``Re 1/G``) along the shifted axis."""
    _check_axis(sys, lam)
    grid = frequency_grid() if omega is None else np.asarray(omega, dtype=float)

    def ratio(w: np.ndarray) -> np.ndarray:
        values = _response(sys, w, lam)
        return values.real / np.abs(values) ** 2

    return _grid_extremum(ratio, grid)[1]


def count_poles_right_of(sys: LTI, axis: float) -> int:
    """Count poles with real part strictly greater than ``axis``.

    Args:
        sys: A transfer function or realization.
        axis: The vertical line ``Re(s) = axis`` (``-lam`` for rate ``lam``).

    Raises:
        ShiftedAxisPole: If a pole lies within 1e-6 of the line.

    Returns:
        The count, with multiplicity.
    """
    poles = poles_of(sys)
    if np.any(np.abs(poles.real - axis) <= AXIS_TOL):
        raise ShiftedAxisPole(f"A pole lies on the axis Re(s) = {axis:g}")
    return int(np.sum(poles.real > axis))


def is_hurwitz(sys_or_matrix, rate: float = 0.0) -> bool:
    """Whether every pole (or eigenvalue) lies strictly left of ``-rate``."""
    if isinstance(sys_or_matrix, (TransferFunction, StateSpace)):
        poles = poles_of(sys_or_matrix)
    else:
        poles = eig_general(sys_or_matrix)
    return bool(np.all(poles.real < -rate))
