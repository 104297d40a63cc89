"""The mixed-feedback controller and the loop transfer function."""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from mixfb.error import InvalidInput
from mixfb.lti import Polynomial, TransferFunction, poly_roots
from mixfb.loop.closed_loop import MixedFeedbackParams, plant_tf

_CRITICAL_TOL = 1e-12


@dataclass(frozen=True)
class ControllerInfo:
    """The controller ``C(s, k, beta)`` together with its pole/zero data.

    Attributes:
        tf: The controller transfer function.
        pole_p: Pole of the positive path, ``-1/tau_p``.
        pole_n: Pole of the negative path, ``-1/tau_n``.
        zero: The zero ``z_beta``, or ``None`` when it sits at infinity.
        beta_star: Critical balance ``tau_p / (tau_p + tau_n)``.
        zero_at_infinity: Whether ``beta == beta_star``.
        regime: ``"positive_locus"`` for ``beta > beta_star``,
            ``"negative_locus"`` for ``beta < beta_star``, else ``"critical"``.
        fast_positive: Whether the positive path is the faster one.
    """

    tf: TransferFunction
    pole_p: float
    pole_n: float
    zero: Optional[float]
    beta_star: float
    zero_at_infinity: bool
    regime: str
    fast_positive: bool


def _check_controller_args(k: float, beta: float, tau_p: float, tau_n: float) -> None:
    if not k >= 0:
        raise InvalidInput(f"Gain k must be non-negative, got {k}")
    if not 0.0 <= beta <= 1.0:
        raise InvalidInput(f"Balance beta must lie in [0, 1], got {beta}")
    if not (tau_p > 0 and tau_n > 0):
        raise InvalidInput("Time constants tau_p and tau_n must be positive")
    if tau_p == tau_n:
        raise InvalidInput("tau_p and tau_n must differ")


def make_controller(k: float, beta: float, tau_p: float, tau_n: float) -> ControllerInfo:
    """Build ``C(s,k,beta) = k (beta/(tau_p s+1) - (1-beta)/(tau_n s+1))``.

    Args:
        k: Overall gain.
        beta: Balance between positive and negative feedback.
        tau_p: Time constant of the positive path.
        tau_n: Time constant of the negative path.

    Raises:
        InvalidInput: If the arguments are out of range.

    Returns:
        The controller and its pole/zero report.
    """
    _check_controller_args(k, beta, tau_p, tau_n)
    beta_star = tau_p / (tau_p + tau_n)
    slope = beta * (tau_n + tau_p) - tau_p
    at_infinity = abs(slope) <= _CRITICAL_TOL * (tau_p + tau_n)
    if at_infinity:
        slope = 0.0
    offset = 2 * beta - 1
    num = Polynomial(np.array([offset, slope]) * k)
    den = Polynomial([1.0, tau_p + tau_n, tau_p * tau_n])
    zero = None if at_infinity else -offset / slope + 0.0
    if at_infinity:
        regime = "critical"
    elif beta > beta_star:
        regime = "positive_locus"
    else:
        regime = "negative_locus"
    return ControllerInfo(
        tf=TransferFunction(num, den),
        pole_p=-1.0 / tau_p,
        pole_n=-1.0 / tau_n,
        zero=zero,
        beta_star=beta_star,
        zero_at_infinity=at_infinity,
        regime=regime,
        fast_positive=tau_p < tau_n,
    )


def make_loop_tf(params: MixedFeedbackParams) -> TransferFunction:
    """Loop transfer function ``G(s,k,beta) = -C(s,k,beta) P(s)``.

    The result is built as ``k * G(s,1,beta)`` so that it is exactly linear in k.
    """
    unit = make_controller(1.0, params.beta, params.tau_p, params.tau_n).tf
    return (-(unit * plant_tf(params.plant))).scale(params.k)


def default_rate(params: MixedFeedbackParams) -> float:
    """Geometric mean of the slowest plant pole and the fastest controller pole."""
    plant_poles = poly_roots(plant_tf(params.plant).den)
    slowest_plant = float(np.min(np.abs(plant_poles.real)))
    fastest_controller = max(1.0 / params.tau_p, 1.0 / params.tau_n)
    return float(np.sqrt(slowest_plant * fastest_controller))
