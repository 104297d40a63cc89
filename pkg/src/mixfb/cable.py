"""Discretized cable loads: RC ladder admittance, realization and interconnection."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from mixfb.analysis.dominance import DominanceCertificate
from mixfb.error import InvalidInput, NumericalSingularity, PreconditionFailed
from mixfb.lti import (
    Polynomial,
    StateSpace,
    TransferFunction,
    eig_general,
    shifted_min_ratio,
    shifted_sup_mag,
)
from mixfb.loop import ClosedLoopSystem
from mixfb.simulation.integrate import SimTrace

logger = logging.getLogger(__name__)

CERTIFY_FACTOR = 0.95
AMPLITUDE_WINDOW = 0.25


@dataclass(frozen=True)
class CableParams:
    """An ``n``-segment ladder: series ``R1``, shunt ``R2`` parallel to ``Cm`` at every node.

    Raises:
        InvalidInput: If ``n < 1`` or a component value is not positive.
    """

    n: int
    R1: float
    R2: float
    Cm: float

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise InvalidInput(f"Cable segment count must be a positive integer, got {self.n}")
        for name in ("R1", "R2", "Cm"):
            if not getattr(self, name) > 0:
                raise InvalidInput(f"Cable {name} must be positive")

    @property
    def passive_rate_bound(self) -> float:
        """``1 / (Cm R2)``; the ladder is 0-passive for rates below it."""
        return 1.0 / (self.Cm * self.R2)


def cable_admittance(params: CableParams, s: complex) -> complex:
    """Continued-fraction admittance ``i0 / v0`` at ``s``.

    Raises:
        NumericalSingularity: If ``s`` is a pole of the admittance.
    """
    G: complex = 0.0
    for _ in range(params.n):
        shunt = params.Cm * s + 1.0 / params.R2 + G
        if shunt == 0:
            raise NumericalSingularity(f"Cable admittance is singular at s={s}")
        series = params.R1 + 1.0 / shunt
        if series == 0:
            raise NumericalSingularity(f"Cable admittance has a pole at s={s}")
        G = 1.0 / series
    return complex(G)


def cable_tf(params: CableParams) -> TransferFunction:
    """Rational admittance of degree ``n``.

    Each segment maps ``N/D`` to ``E / (R1 E + D)`` with ``E = (Cm s + 1/R2) D + N``;
    both are normalized by the leading denominator coefficient at every step.
    """
    shunt = Polynomial([1.0 / params.R2, params.Cm])
    num, den = Polynomial([0.0]), Polynomial([1.0])
    for _ in range(params.n):
        E = shunt * den + num
        num, den = E, E * params.R1 + den
        lead = den.leading
        num, den = num * (1.0 / lead), den * (1.0 / lead)
    return TransferFunction(num, den)


def cable_ss(params: CableParams) -> StateSpace:
    """Ladder realization with the capacitor voltages as states.

    Input is the voltage ``v0`` at the cable head; output is the current
    ``i0 = (v0 - v1) / R1`` drawn by the cable.
    """
    n, g1, g2 = params.n, 1.0 / params.R1, 1.0 / params.R2
    A = np.zeros((n, n))
    for i in range(n):
        A[i, i] = -(2.0 * g1 + g2) if i < n - 1 else -(g1 + g2)
        if i > 0:
            A[i, i - 1] = g1
        if i < n - 1:
            A[i, i + 1] = g1
    A /= params.Cm
    B = np.zeros((n, 1))
    B[0, 0] = g1 / params.Cm
    C = np.zeros((1, n))
    C[0, 0] = -g1
    return StateSpace(A, B, C, np.array([[g1]]))


@dataclass(frozen=True)
class PassivityExcess:
    """Output-passivity excess of a cable at a rate.

    Attributes:
        alpha: ``inf Re G(j omega - rate) / |G|^2`` over the grid.
        sup_gain: ``sup |G(j omega - rate)|``, bounded by ``1 / R1``.
        rate: The rate.
        certificate: Optional storage certificate at ``0.95 alpha``.
    """

    alpha: float
    sup_gain: float
    rate: float
    certificate: Optional[DominanceCertificate] = None


def passivity_excess(
    params: CableParams,
    rate: float,
    certify: bool = False,
    omega: Optional[np.ndarray] = None,
) -> PassivityExcess:
    """Estimate the excess of output passivity of the ladder at ``rate``.

    Args:
        params: The cable.
        rate: The rate ``lambda``; must be below ``1 / (Cm R2)``.
        certify: Also find a storage ``P > 0`` at ``0.95 alpha``.
        omega: Optional frequency grid.

    Raises:
        PreconditionFailed: If ``rate >= 1 / (Cm R2)``.

    Returns:
        The excess and the gain bound.
    """
    if not rate < params.passive_rate_bound:
        raise PreconditionFailed(
            f"Rate {rate:g} is not below 1/(Cm R2) = {params.passive_rate_bound:g}"
        )
    system = cable_ss(params)
    alpha = shifted_min_ratio(system, rate, omega)
    sup = shifted_sup_mag(system, rate, omega)
    certificate = None
    if certify:
        from mixfb.lmi.verify import verify_passivity

        certificate = verify_passivity(
            system.A, system.B, system.C, system.D, rate, CERTIFY_FACTOR * alpha
        )
    logger.debug("Cable n=%d R2=%g: alpha=%g sup=%g", params.n, params.R2, alpha, sup)
    return PassivityExcess(alpha=alpha, sup_gain=sup, rate=rate, certificate=certificate)


@dataclass(frozen=True, eq=False)
class InterconnectedSystem:
    """An oscillator loaded by a cable at its membrane node.

    Attributes:
        system: The combined closed loop, oscillator states first.
        n_oscillator: Oscillator state count.
        n_cable: Cable state count.
    """

    system: ClosedLoopSystem
    n_oscillator: int
    n_cable: int

    def node_voltages(self, X: np.ndarray) -> np.ndarray:
        """Columns ``v0, v1 .. vn`` for a batch of row states."""
        X = np.atleast_2d(X)
        head = self.system.output(X)[:, None]
        return np.hstack([head, X[:, self.n_oscillator :]])


def interconnect(osc: ClosedLoopSystem, cable: Optional[StateSpace]) -> InterconnectedSystem:
    """Load ``osc`` with ``cable`` so that ``v0`` is shared and the cable current is drawn.

    The current port of the oscillator is its control input column ``B1``
    (the membrane node), and ``v0 = C1 x``. ``cable=None`` returns the
    oscillator unchanged.

    Raises:
        InvalidInput: If the cable is not SISO.
    """
    n = osc.n_states
    if cable is None:
        return InterconnectedSystem(system=osc, n_oscillator=n, n_cable=0)
    if cable.shape != (1, 1):
        raise InvalidInput(f"The cable must be SISO, got shape {cable.shape}")
    m = cable.n_states
    B1, C1 = osc.B1, osc.C1
    A = np.block(
        [
            [osc.A - B1 @ cable.D @ C1, -B1 @ cable.C],
            [cable.B @ C1, cable.A],
        ]
    )
    pad = np.zeros((m, 1))
    cable_taus = tuple(float(1.0 / abs(p.real)) for p in eig_general(cable.A))
    combined = ClosedLoopSystem(
        A=A,
        B1=np.vstack([B1, pad]),
        C1=np.hstack([C1, pad.T]),
        K=np.hstack([osc.K, pad.T]),
        saturation=osc.saturation,
        r_inject=np.vstack([osc.r_inject, pad]),
        time_constants=(*osc.time_constants, *cable_taus),
        slow_time=osc.slow_time,
    )
    return InterconnectedSystem(system=combined, n_oscillator=n, n_cable=m)


def node_amplitudes(
    trace: SimTrace, inter: InterconnectedSystem, window: float = AMPLITUDE_WINDOW
) -> np.ndarray:
    """Peak-to-peak of ``v0 .. vn`` over the final ``window`` of the trace."""
    if not 0 < window <= 1:
        raise InvalidInput("window must lie in (0, 1]")
    tail = trace.t >= trace.t[-1] - window * trace.duration
    return np.ptp(inter.node_voltages(trace.X[tail]), axis=0)
