"""Circle-criterion dominance certificates and the k0/k2 gain boundaries."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Union

import numpy as np

from mixfb.error import InertiaMismatch, InvalidInput, PreconditionFailed
from mixfb.lti import LTI, count_poles_right_of, eig_symmetric, shifted_min_real
from mixfb.loop import MixedFeedbackParams, make_loop_tf

TIE_TOL = 1e-9


@dataclass(frozen=True)
class DominanceCertificate:
    """Evidence that a system is p-dominant with rate ``rate``.

    Attributes:
        p: Degree of dominance.
        rate: The rate ``lambda >= 0``.
        method: ``"circle"`` or ``"lmi"``.
        margin: Strictness margin ``epsilon > 0``.
        P: Optional quadratic form, with inertia ``(p, 0, n - p)``.
        details: The attained minimum real part or the LMI residuals.
    """

    p: int
    rate: float
    method: str
    margin: float
    P: Optional[np.ndarray] = None
    details: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        """Check the inertia of ``P`` against ``p``."""
        if self.method not in ("circle", "lmi"):
            raise InvalidInput(f"Unknown certificate method {self.method!r}")
        if not self.margin > 0:
            raise InvalidInput("Certificate margin must be positive")
        if self.P is not None:
            _, inertia = eig_symmetric(self.P)
            n = inertia.dim
            if inertia != (self.p, 0, n - self.p):
                raise InertiaMismatch(
                    f"P has inertia {inertia}, expected ({self.p},0,{n - self.p})"
                )


@dataclass(frozen=True)
class CircleFailure:
    """A failed circle test.

    Attributes:
        rate: The rate that was tested.
        min_real: Attained minimum of ``Re G(j omega - rate)``.
        omega: Frequency attaining it.
        threshold: The required bound ``-1/K_sector``.
    """

    rate: float
    min_real: float
    omega: float
    threshold: float


CircleResult = Union[DominanceCertificate, CircleFailure]


def circle_criterion(
    G: LTI,
    rate: float = 0.0,
    sector: float = 1.0,
    omega: Optional[np.ndarray] = None,
) -> CircleResult:
    """Frequency-domain dominance test for ``G`` in feedback with a sector nonlinearity.

    The loop is p-dominant with rate ``rate`` when the shifted Nyquist locus of
    ``G`` stays right of the vertical line through ``-1/sector``; ``p`` is the
    number of poles of ``G`` right of ``-rate``.

    Args:
        G: The linear block of the Lure loop.
        rate: The rate ``lambda``.
        sector: Upper slope bound of the nonlinearity.
        omega: Optional frequency grid.

    Raises:
        InvalidInput: If ``sector <= 0``.
        ShiftedAxisPole: If a pole of ``G`` lies on ``Re(s) = -rate``.

    Returns:
        A certificate, or a :class:`CircleFailure` with the attained minimum.
    """
    if not sector > 0:
        raise InvalidInput(f"Sector bound must be positive, got {sector}")
    w, m = shifted_min_real(G, rate, omega)
    threshold = -1.0 / sector
    margin = m - threshold
    if margin <= TIE_TOL * max(1.0, abs(threshold)):
        return CircleFailure(rate=rate, min_real=m, omega=w, threshold=threshold)
    p = count_poles_right_of(G, -rate)
    return DominanceCertificate(
        p=p,
        rate=rate,
        method="circle",
        margin=margin,
        details={"min_real": m, "omega": w, "sector": sector},
    )


def _gain_bound(min_real: float, sector: float) -> float:
    if min_real >= 0:
        return math.inf
    return -1.0 / (sector * min_real)


def k0(
    beta: float,
    params: MixedFeedbackParams,
    sector: float = 1.0,
    omega: Optional[np.ndarray] = None,
) -> float:
    """Largest gain below which the loop is 0-dominant (stable) with rate 0.

    Args:
        beta: Balance.
        params: Parameters supplying the plant and time constants.
        sector: Slope bound of the saturation.
        omega: Optional frequency grid.

    Returns:
        ``inf`` when ``Re G(j omega, 1, beta) >= 0`` everywhere, else ``-1/min``.
    """
    unit = make_loop_tf(params.with_gain(1.0, beta))
    _, m = shifted_min_real(unit, 0.0, omega)
    return _gain_bound(m, sector)


def k2(
    beta: float,
    rate: float,
    params: MixedFeedbackParams,
    sector: float = 1.0,
    omega: Optional[np.ndarray] = None,
) -> float:
    """Largest gain below which the loop is 2-dominant with rate ``rate``.

    Args:
        beta: Balance.
        rate: The rate ``lambda``.
        params: Parameters supplying the plant and time constants.
        sector: Slope bound of the saturation.
        omega: Optional frequency grid.

    Raises:
        PreconditionFailed: If ``G(s - rate, 1, beta)`` does not have exactly two
            unstable poles.

    Returns:
        The gain bound, ``inf`` when the shifted locus never enters ``Re < 0``.
    """
    unit = make_loop_tf(params.with_gain(1.0, beta))
    split = count_poles_right_of(unit, -rate)
    if split != 2:
        raise PreconditionFailed(
            f"Rate {rate:g} leaves {split} poles to its right, 2 are required"
        )
    _, m = shifted_min_real(unit, rate, omega)
    return _gain_bound(m, sector)


class RegionLabel(Enum):
    """Label of a point of the ``(k, beta)`` plane for a fixed rate."""

    ZeroDominant = "zero_dominant"
    TwoDomStableEq = "two_dom_stable_eq"
    Oscillation = "oscillation"
    OscillationPlusFixedPoints = "oscillation_plus_fixed_points"
    NoCertificate = "no_certificate"
