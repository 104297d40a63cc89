"""Robustness of 2-dominance and of the instability of the origin."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from mixfb.analysis.dominance import CircleFailure, DominanceCertificate, circle_criterion
from mixfb.analysis.equilibria import Equilibrium, find_equilibria
from mixfb.error import InvalidInput, PreconditionFailed
from mixfb.lti import (
    LTI,
    StateSpace,
    TransferFunction,
    eig_general,
    freq_response,
    frequency_grid,
    shifted_sup_mag,
)
from mixfb.loop import (
    MixedFeedbackParams,
    assemble_closed_loop,
    make_controller,
    make_loop_tf,
    plant_tf,
    scale_plant,
)
from mixfb.loop.saturation import DEFAULT_SATURATION, Saturation

logger = logging.getLogger(__name__)

HYPERBOLIC_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class InstabilityGain:
    """Gain of the linearization at an unstable equilibrium.

    Attributes:
        gamma: ``sup |C2 (j omega I - A)^-1 B2|``.
        unstable: Number of eigenvalues in the open right half-plane.
        preserved: Small-gain verdict against the declared perturbation gain.
        certified_gamma: Gain certified by the LMI route, when requested.
    """

    gamma: float
    unstable: int
    preserved: Optional[bool] = None
    certified_gamma: Optional[float] = None


@dataclass(frozen=True, eq=False)
class RobustnessReport:
    """Robustness figures for one design point.

    Attributes:
        delta_max: Admissible inflation radius of the shifted Nyquist locus.
        omega: Frequencies of the weight curve.
        weight: ``delta / |C(j omega - lambda)|`` samples.
        instability: Instability-preservation gain, when computed.
        perturbed: Equilibria under a DC perturbation, when computed.
    """

    delta_max: float
    omega: np.ndarray
    weight: np.ndarray
    instability: Optional[InstabilityGain] = None
    perturbed: List[Equilibrium] = field(default_factory=list)


def _two_dominance(
    params: MixedFeedbackParams, rate: float, omega: Optional[np.ndarray] = None
) -> DominanceCertificate:
    result = circle_criterion(make_loop_tf(params), rate, omega=omega)
    if isinstance(result, CircleFailure) or result.p != 2:
        raise PreconditionFailed(
            f"No nominal 2-dominance certificate at k={params.k:g}, "
            f"beta={params.beta:g}, rate={rate:g}"
        )
    return result


def dominance_margin(
    params: MixedFeedbackParams, rate: float, omega: Optional[np.ndarray] = None
) -> float:
    """Distance from the shifted Nyquist locus to the line ``Re = -1``.

    Args:
        params: The nominal design.
        rate: The rate ``lambda``.
        omega: Optional frequency grid.

    Raises:
        PreconditionFailed: If the nominal loop has no 2-dominance certificate.

    Returns:
        ``delta_max = 1 + min Re G(j omega - rate)``.
    """
    return 1.0 + _two_dominance(params, rate, omega).details["min_real"]


def _weight(
    params: MixedFeedbackParams, rate: float, delta: float, grid: np.ndarray, margin: float
) -> np.ndarray:
    if delta > margin:
        raise PreconditionFailed(f"delta={delta:g} exceeds delta_max={margin:g}")
    controller = make_controller(params.k, params.beta, params.tau_p, params.tau_n).tf
    return delta / np.abs(freq_response(controller, grid, rate))


def uncertainty_weight(
    params: MixedFeedbackParams,
    rate: float,
    delta: float,
    omega: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Pointwise admissible magnitude ``delta / |C(j omega - rate)|`` of a plant perturbation.

    Args:
        params: The nominal design.
        rate: The rate ``lambda``.
        delta: Radius, at most :func:`dominance_margin`.
        omega: Frequency grid; defaults to the standard grid.

    Raises:
        PreconditionFailed: If ``delta`` exceeds the margin.

    Returns:
        The bound at each frequency.
    """
    grid = frequency_grid() if omega is None else np.asarray(omega, dtype=float)
    if delta < 0:
        raise InvalidInput("delta must be non-negative")
    margin = dominance_margin(params, rate, omega) if delta > 0 else 0.0
    return _weight(params, rate, delta, grid, margin)


def check_fast(delta: LTI, rate: float) -> None:
    """Reject perturbations with a pole at or right of ``-rate``.

    Raises:
        InvalidInput: If ``delta`` is not fast.
    """
    poles = delta.poles()
    if poles.size and not np.all(poles.real < -rate):
        raise InvalidInput("The perturbation must have every pole left of -rate")


def perturbed_loop_tf(params: MixedFeedbackParams, delta: TransferFunction) -> TransferFunction:
    """``G_delta = -C (P + delta)`` for an additive plant perturbation."""
    controller = make_controller(params.k, params.beta, params.tau_p, params.tau_n).tf
    return -(controller * (plant_tf(params.plant) + delta))


def perturbed_certificate(
    params: MixedFeedbackParams, rate: float, delta: TransferFunction
) -> DominanceCertificate:
    """Re-run the circle test on the perturbed loop.

    Raises:
        InvalidInput: If ``delta`` is not fast.
        PreconditionFailed: If the perturbed loop is not certified 2-dominant.
    """
    check_fast(delta, rate)
    result = circle_criterion(perturbed_loop_tf(params, delta), rate)
    if isinstance(result, CircleFailure) or result.p != 2:
        raise PreconditionFailed("The perturbation destroys the 2-dominance certificate")
    return result


def instability_gain(
    A_bar: np.ndarray,
    B2: np.ndarray,
    C2: np.ndarray,
    declared_gain: Optional[float] = None,
    certify: bool = False,
    omega: Optional[np.ndarray] = None,
) -> InstabilityGain:
    """Gain of the linearization at an unstable equilibrium.

    By the small-gain argument the instability survives every perturbation
    whose gain is below ``1 / gamma``.

    Args:
        A_bar: Linearization at the equilibrium.
        B2: Perturbation input column.
        C2: Perturbation output row.
        declared_gain: Gain of the perturbation class, for the verdict.
        certify: Also locate the LMI-certified gain by bisection.
        omega: Optional frequency grid.

    Raises:
        PreconditionFailed: If ``A_bar`` has an eigenvalue on the imaginary axis.

    Returns:
        The gain and the verdict.
    """
    A_bar = np.atleast_2d(np.asarray(A_bar, dtype=float))
    eigs = eig_general(A_bar)
    if np.any(np.abs(eigs.real) <= HYPERBOLIC_TOL):
        raise PreconditionFailed("The linearization is not hyperbolic")
    unstable = int(np.sum(eigs.real > 0))
    n = A_bar.shape[0]
    B2 = np.asarray(B2, dtype=float).reshape(n, -1)
    C2 = np.asarray(C2, dtype=float).reshape(-1, n)
    system = StateSpace(A_bar, B2, C2, np.zeros((C2.shape[0], B2.shape[1])))
    gamma = 0.0 if not np.any(B2) or not np.any(C2) else shifted_sup_mag(system, 0.0, omega)
    certified = None
    if certify and gamma > 0:
        from mixfb.lmi.verify import gain_floor

        certified = gain_floor([A_bar], B2, C2, system.D, 0.0, (unstable, 0, n - unstable), gamma)
    preserved = None if declared_gain is None else gamma * declared_gain < 1
    return InstabilityGain(
        gamma=gamma, unstable=unstable, preserved=preserved, certified_gamma=certified
    )


def perturbed_equilibria(
    params: MixedFeedbackParams,
    delta0: float,
    r: float = 0.0,
    saturation: Optional[Saturation] = None,
) -> List[Equilibrium]:
    """Equilibria when the loop DC gain ``k P(0)`` is shifted by ``delta0``.

    The plant is rescaled so that ``k P'(0) = k P(0) + delta0``; stability is
    classified on the rescaled loop.

    Raises:
        InvalidInput: If ``k P(0) = 0`` (the shift has no nominal structure to scale).
    """
    nominal = params.k * params.plant_dc_gain
    if nominal == 0:
        raise InvalidInput("Cannot shift the DC gain of a loop with k P(0) = 0")
    factor = (nominal + delta0) / nominal
    shifted = params if delta0 == 0 else _with_plant(params, scale_plant(params.plant, factor))
    return find_equilibria(shifted, r, saturation)


def _with_plant(params: MixedFeedbackParams, plant: LTI) -> MixedFeedbackParams:
    return MixedFeedbackParams(
        k=params.k,
        beta=params.beta,
        tau_p=params.tau_p,
        tau_n=params.tau_n,
        plant=plant,
        check_time_scale=params.check_time_scale,
    )


def robustness_report(
    params: MixedFeedbackParams,
    rate: float,
    delta: Optional[float] = None,
    omega: Optional[np.ndarray] = None,
    ports: Optional[Tuple[np.ndarray, np.ndarray]] = None,
    declared_gain: Optional[float] = None,
    delta0: Optional[float] = None,
    r: float = 0.0,
    saturation: Optional[Saturation] = None,
) -> RobustnessReport:
    """Robustness figures for one design point.

    Args:
        params: The nominal design.
        rate: The rate ``lambda``.
        delta: Radius of the weight curve; the margin by default.
        omega: Frequency grid of the margin and the weight curve.
        ports: ``(B2, C2)`` of the perturbation channel; with them the
            instability gain is taken at the unstable equilibrium.
        declared_gain: Gain of the perturbation class, for the verdict.
        delta0: DC perturbation of ``k P(0)``; with it the perturbed
            equilibria are reported.
        r: Constant reference.
        saturation: The actuation stage.

    Raises:
        PreconditionFailed: If the nominal loop is not certified 2-dominant or
            ``delta`` exceeds the margin.

    Returns:
        The report; ``instability`` stays ``None`` without ports or without
        an unstable equilibrium.
    """
    grid = frequency_grid() if omega is None else np.asarray(omega, dtype=float)
    if delta is not None and delta < 0:
        raise InvalidInput("delta must be non-negative")
    margin = dominance_margin(params, rate, omega)
    weight = _weight(params, rate, margin if delta is None else delta, grid, margin)
    instability = None
    if ports is not None:
        system = assemble_closed_loop(params, saturation=saturation or DEFAULT_SATURATION)
        unstable = [eq for eq in find_equilibria(system, r) if not eq.stable]
        if unstable:
            A_bar = system.jacobian(unstable[0].x)
            instability = instability_gain(A_bar, ports[0], ports[1], declared_gain, omega=omega)
        else:
            logger.info("No unstable equilibrium at k=%g beta=%g", params.k, params.beta)
    perturbed = [] if delta0 is None else perturbed_equilibria(params, delta0, r, saturation)
    return RobustnessReport(
        delta_max=margin,
        omega=grid,
        weight=weight,
        instability=instability,
        perturbed=perturbed,
    )
