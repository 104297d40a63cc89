"""Closed-loop equilibria from the scalar fixed-point equation."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy.optimize import brentq

from mixfb.analysis.dominance import TIE_TOL, RegionLabel, k0, k2
from mixfb.error import MarginalEquilibrium, MixfbError, PreconditionFailed
from mixfb.lti import eig_general
from mixfb.loop import ClosedLoopSystem, MixedFeedbackParams, assemble_closed_loop
from mixfb.loop.saturation import Saturation

logger = logging.getLogger(__name__)

SCAN_POINTS = 10_000
ROOT_XTOL = 1e-12
DEAD_ZONE = 1e-8


@dataclass(frozen=True, eq=False)
class Equilibrium:
    """A closed-loop equilibrium.

    Attributes:
        y: Scalar equilibrium value ``K x`` at the input of the saturation.
        x: Full equilibrium state.
        stable: Whether the linearization is Hurwitz.
        eigenvalues: Spectrum of the linearization.
    """

    y: float
    x: np.ndarray
    stable: bool
    eigenvalues: np.ndarray

    @property
    def max_real(self) -> float:
        """Largest real part of the spectrum."""
        return float(np.max(self.eigenvalues.real))


def classify_equilibrium(
    system: ClosedLoopSystem, x: np.ndarray
) -> Tuple[bool, np.ndarray]:
    """Local stability of an equilibrium from the spectrum of the linearization.

    Args:
        system: The closed loop.
        x: The equilibrium state.

    Raises:
        MarginalEquilibrium: If the largest real part is within 1e-8 of zero.

    Returns:
        Whether the equilibrium is stable, and the spectrum.
    """
    eigs = eig_general(system.jacobian(x))
    top = float(np.max(eigs.real))
    if abs(top) <= DEAD_ZONE:
        raise MarginalEquilibrium(float(system.K[0] @ x), top)
    return top < 0, eigs


def _fixed_point_roots(g: float, r: float, saturation: Saturation) -> List[float]:
    """Real roots of ``y - g (phi(y) - r)`` by grid scan and Brent refinement."""
    half_width = abs(g) * (saturation.bound + abs(r)) + 1.0

    def residual(y):
        return y - g * (saturation(y) - r)

    grid = np.linspace(-half_width, half_width, SCAN_POINTS + 1)
    values = residual(grid)
    roots = [float(y) for y, v in zip(grid, values) if v == 0.0]
    for i in np.flatnonzero(values[:-1] * values[1:] < 0):
        roots.append(brentq(residual, grid[i], grid[i + 1], xtol=ROOT_XTOL))
    return sorted(roots)


def find_equilibria(
    system: Union[ClosedLoopSystem, MixedFeedbackParams],
    r: float = 0.0,
    saturation: Optional[Saturation] = None,
) -> List[Equilibrium]:
    """All equilibria of the closed loop for a constant reference.

    Equilibria solve ``y = g (phi(y) - r)`` with ``g = -K A^-1 B1``.

    Args:
        system: A closed loop, or parameters to assemble one.
        r: Constant reference.
        saturation: Saturation used when assembling from parameters.

    Raises:
        MarginalEquilibrium: If an equilibrium is in the stability dead-zone.

    Returns:
        The equilibria sorted by ``y``.
    """
    if isinstance(system, MixedFeedbackParams):
        kwargs = {} if saturation is None else {"saturation": saturation}
        system = assemble_closed_loop(system, **kwargs)
    g = system.dc_loop_gain()
    found = []
    for y in _fixed_point_roots(g, r, system.saturation):
        x = system.equilibrium_state(y, r)
        stable, eigs = classify_equilibrium(system, x)
        found.append(Equilibrium(y=y, x=x, stable=stable, eigenvalues=eigs))
    logger.debug("g=%.6g r=%.3g: %d equilibria", g, r, len(found))
    return found


def classify_region(
    params: MixedFeedbackParams,
    rate: float,
    r: float = 0.0,
    saturation: Optional[Saturation] = None,
    bounds: Optional[Tuple[float, float]] = None,
) -> RegionLabel:
    """Combine the k0/k2 certificates with the equilibrium analysis.

    Args:
        params: The point ``(k, beta)`` and the plant.
        rate: Rate used for 2-dominance.
        r: Constant reference.
        saturation: The actuation stage.
        bounds: Precomputed ``(k0, k2)`` for ``params.beta``; ``k2 = nan``
            marks a rate that does not split two poles.

    Returns:
        The region label; failures inside the 2-dominant band give ``NoCertificate``.
    """
    sector = 1.0 if saturation is None else saturation.max_slope
    if bounds is None:
        low = k0(params.beta, params, sector)
        try:
            high = k2(params.beta, rate, params, sector)
        except PreconditionFailed:
            high = math.nan
    else:
        low, high = bounds
    k = params.k
    if k <= low * (1 + TIE_TOL):
        return RegionLabel.ZeroDominant
    if math.isnan(high) or not k < high * (1 - TIE_TOL):
        return RegionLabel.NoCertificate
    try:
        equilibria = find_equilibria(params, r, saturation)
    except MixfbError as err:
        logger.debug("k=%g beta=%g: %s", k, params.beta, err)
        return RegionLabel.NoCertificate
    stable = [eq for eq in equilibria if eq.stable]
    if not stable:
        return RegionLabel.Oscillation
    if len(equilibria) >= 3:
        return RegionLabel.OscillationPlusFixedPoints
    if len(equilibria) == 1:
        return RegionLabel.TwoDomStableEq
    return RegionLabel.NoCertificate
