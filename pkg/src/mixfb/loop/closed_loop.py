"""Mixed-feedback parameters and the closed loop in Lure form."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from mixfb.error import InvalidInput, NumericalSingularity
from mixfb.lti import (
    LTI,
    StateSpace,
    TransferFunction,
    eig_general,
    ss_to_tf,
    tf_to_ss,
)
from mixfb.loop.saturation import DEFAULT_SATURATION, Saturation


def plant_tf(plant: LTI) -> TransferFunction:
    """Transfer function of a plant given in either representation."""
    return plant if isinstance(plant, TransferFunction) else ss_to_tf(plant)


def plant_ss(plant: LTI) -> StateSpace:
    """Realization of a plant with a unit output row for first-order lags.

    Transfer functions are realized in observable canonical form (the dual of
    the controllable form), so ``1/(tau s + 1)`` becomes
    ``A = -1/tau, B = 1/tau, C = 1``.
    """
    if isinstance(plant, StateSpace):
        return plant
    ctrb = tf_to_ss(plant)
    return StateSpace(ctrb.A.T, ctrb.C.T, ctrb.B.T, ctrb.D)


def scale_plant(plant: LTI, factor: float) -> LTI:
    """Multiply a plant by a static gain."""
    if isinstance(plant, TransferFunction):
        return plant.scale(factor)
    return StateSpace(plant.A, plant.B * factor, plant.C, plant.D)


def _check_loop(plant: LTI, tau_p: float, tau_n: float, check_time_scale: bool) -> None:
    """Reject bad time constants, unstable or proper plants and slow plant poles.

    Raises:
        InvalidInput: On any violation; the time-scale test is skipped when
            ``check_time_scale`` is false.
    """
    if not (tau_p > 0 and tau_n > 0):
        raise InvalidInput("Time constants tau_p and tau_n must be positive")
    if tau_p == tau_n:
        raise InvalidInput("tau_p and tau_n must differ")
    if not plant_tf(plant).is_strictly_proper:
        raise InvalidInput("The plant must be strictly proper")
    poles = plant.poles()
    if not np.all(poles.real < 0):
        raise InvalidInput("The plant must be asymptotically stable")
    controller_edge = -max(1.0 / tau_p, 1.0 / tau_n)
    if check_time_scale and not np.all(poles.real < controller_edge):
        raise InvalidInput(
            "Every plant pole must lie left of both controller poles "
            f"(Re < {controller_edge:g})"
        )


@dataclass(frozen=True)
class MixedFeedbackParams:
    """The design surface ``(k, beta, tau_p, tau_n)`` and the plant.

    Attributes:
        k: Overall gain, ``k >= 0``.
        beta: Balance, ``0 <= beta <= 1``.
        tau_p: Time constant of the positive path.
        tau_n: Time constant of the negative path.
        plant: Asymptotically stable, strictly proper SISO plant.
        check_time_scale: Require every plant pole to be faster than both
            controller poles.
    """

    k: float
    beta: float
    tau_p: float
    tau_n: float
    plant: LTI
    check_time_scale: bool = True

    def __post_init__(self) -> None:
        """Validate ranges, plant stability and the time-scale assumption."""
        if not self.k >= 0:
            raise InvalidInput(f"Gain k must be non-negative, got {self.k}")
        if not 0.0 <= self.beta <= 1.0:
            raise InvalidInput(f"Balance beta must lie in [0, 1], got {self.beta}")
        _check_loop(self.plant, self.tau_p, self.tau_n, self.check_time_scale)

    @property
    def plant_dc_gain(self) -> float:
        """``P(0)``."""
        return plant_tf(self.plant).dc_gain()

    @property
    def loop_dc_gain(self) -> float:
        """``g = k P(0) (2 beta - 1)``, the slope of the fixed-point equation."""
        return self.k * self.plant_dc_gain * (2 * self.beta - 1)

    def with_gain(self, k: float, beta: Optional[float] = None) -> MixedFeedbackParams:
        """Copy with a new ``k`` (and optionally ``beta``)."""
        return replace(self, k=k, beta=self.beta if beta is None else beta)


@dataclass(frozen=True, eq=False)
class ClosedLoopSystem:
    """``x' = A x + B1 phi(K x) + r_inject r`` with output ``y = C1 x``.

    Attributes:
        A: Open-loop state matrix (plant states first, then ``x_p, x_n``).
        B1: Control input column.
        C1: Plant output row.
        K: Feedback row.
        saturation: The actuation stage.
        B2: Optional uncertainty input column.
        C2: Optional uncertainty output row.
        r_inject: Column mapping the reference into the state equation;
            defaults to ``-B1`` (reference at the input of ``G``).
        time_constants: Time constants bounding the integration step.
        slow_time: The slowest controller time constant.
    """

    A: np.ndarray
    B1: np.ndarray
    C1: np.ndarray
    K: np.ndarray
    saturation: Saturation = DEFAULT_SATURATION
    B2: Optional[np.ndarray] = None
    C2: Optional[np.ndarray] = None
    r_inject: Optional[np.ndarray] = None
    time_constants: Tuple[float, ...] = field(default_factory=tuple)
    slow_time: float = 1.0

    def __post_init__(self) -> None:
        """Shape the matrices and check the open loop is Hurwitz."""
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        n = A.shape[0]
        if A.shape != (n, n):
            raise InvalidInput(f"A must be square, got {A.shape}")
        B1 = np.asarray(self.B1, dtype=float).reshape(n, 1)
        C1 = np.asarray(self.C1, dtype=float).reshape(1, n)
        K = np.asarray(self.K, dtype=float).reshape(1, n)
        if not np.all(eig_general(A).real < 0):
            raise InvalidInput("The open-loop matrix A must be Hurwitz")
        r_inject = (
            -B1 if self.r_inject is None else np.asarray(self.r_inject, dtype=float).reshape(n, 1)
        )
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B1", B1)
        object.__setattr__(self, "C1", C1)
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "r_inject", r_inject)
        if self.B2 is not None:
            object.__setattr__(self, "B2", np.asarray(self.B2, dtype=float).reshape(n, -1))
        if self.C2 is not None:
            object.__setattr__(self, "C2", np.asarray(self.C2, dtype=float).reshape(-1, n))

    @property
    def n_states(self) -> int:
        """State dimension."""
        return self.A.shape[0]

    def with_feedback(self, K: np.ndarray) -> ClosedLoopSystem:
        """Copy with another feedback row."""
        return replace(self, K=np.asarray(K, dtype=float).reshape(1, self.n_states))

    def vector_field(self, x: np.ndarray, r: float = 0.0) -> np.ndarray:
        """Right-hand side ``A x + B1 phi(K x) + r_inject r``."""
        v = float(self.K[0] @ x)
        return self.A @ x + self.B1[:, 0] * self.saturation(v) + self.r_inject[:, 0] * r

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        """Linearization ``A + B1 phi'(K x) K``."""
        v = float(self.K[0] @ x)
        return self.A + self.saturation.slope(v) * (self.B1 @ self.K)

    def output(self, x: np.ndarray) -> np.ndarray:
        """Plant output ``C1 x`` for one state or a batch of row states."""
        return np.asarray(x) @ self.C1[0]

    def linear_loop(self) -> StateSpace:
        """The linear block ``G`` of the Lure loop, ``-K (sI - A)^-1 B1``."""
        return StateSpace(self.A, -self.B1, self.K, np.zeros((1, 1)))

    def dc_loop_gain(self) -> float:
        """``g = -K A^-1 B1``, the slope of the fixed-point equation."""
        try:
            return float(-(self.K @ np.linalg.solve(self.A, self.B1))[0, 0])
        except np.linalg.LinAlgError as exc:
            raise NumericalSingularity("A is singular; the DC gain is undefined") from exc

    def equilibrium_state(self, y: float, r: float = 0.0) -> np.ndarray:
        """State ``x`` with ``K x = y`` solving ``A x + B1 phi(y) + r_inject r = 0``."""
        rhs = self.B1[:, 0] * self.saturation(y) + self.r_inject[:, 0] * r
        return -np.linalg.solve(self.A, rhs)


def kbeta_to_K(k: float, beta: float, n_plant: int = 1) -> np.ndarray:
    """Feedback row reproducing ``(k, beta)`` on the states ``(plant, x_p, x_n)``.

    Args:
        k: Overall gain.
        beta: Balance.
        n_plant: Number of plant states.

    Returns:
        The row ``[0 ... 0, k beta, -k (1 - beta)]`` as a ``1 x (n_plant + 2)`` array.
    """
    K = np.zeros((1, n_plant + 2))
    K[0, -2] = k * beta
    K[0, -1] = -k * (1.0 - beta)
    return K + 0.0


def _controller_block(
    plant: StateSpace, tau_p: float, tau_n: float
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    if plant.shape != (1, 1):
        raise InvalidInput("Only SISO plants are supported")
    if np.any(plant.D != 0):
        raise InvalidInput("The plant must be strictly proper")
    n = plant.n_states
    A = np.zeros((n + 2, n + 2))
    A[:n, :n] = plant.A
    A[n, :n] = plant.C[0] / tau_p
    A[n, n] = -1.0 / tau_p
    A[n + 1, :n] = plant.C[0] / tau_n
    A[n + 1, n + 1] = -1.0 / tau_n
    B1 = np.zeros((n + 2, 1))
    B1[:n, 0] = plant.B[:, 0]
    C1 = np.zeros((1, n + 2))
    C1[0, :n] = plant.C[0]
    return A, B1, C1


def assemble_closed_loop(
    params: Optional[MixedFeedbackParams] = None,
    *,
    plant: Optional[LTI] = None,
    tau_p: Optional[float] = None,
    tau_n: Optional[float] = None,
    K: Optional[np.ndarray] = None,
    saturation: Saturation = DEFAULT_SATURATION,
    uncertainty_ports: bool = False,
    check_time_scale: bool = True,
) -> ClosedLoopSystem:
    """Stack the plant realization above the two lag states of the controller.

    Either pass ``params`` (the feedback row then comes from ``(k, beta)``) or
    the explicit ``plant, tau_p, tau_n`` and a feedback row ``K``.

    Args:
        params: Mixed-feedback parameters.
        plant: Plant, when ``params`` is not given.
        tau_p: Positive-path time constant, when ``params`` is not given.
        tau_n: Negative-path time constant, when ``params`` is not given.
        K: Feedback row; overrides the one derived from ``params``.
        saturation: The actuation stage.
        uncertainty_ports: Attach ``B2 = [0..0, 1/tau_p, 1/tau_n]`` and ``C2 = C1``.
        check_time_scale: Require plant poles left of both controller poles on
            the explicit path; ``params`` carries its own flag.

    Raises:
        InvalidInput: On missing arguments, or a plant and time constants that
            fail the checks of :class:`MixedFeedbackParams`.

    Returns:
        The closed loop.
    """
    if params is not None:
        plant, tau_p, tau_n = params.plant, params.tau_p, params.tau_n
    if plant is None or tau_p is None or tau_n is None:
        raise InvalidInput("Pass either params or plant, tau_p and tau_n")
    if params is None:
        _check_loop(plant, tau_p, tau_n, check_time_scale)
    realization = plant_ss(plant)
    A, B1, C1 = _controller_block(realization, tau_p, tau_n)
    n = realization.n_states
    if K is None:
        if params is None:
            raise InvalidInput("A feedback row K is required without params")
        K = kbeta_to_K(params.k, params.beta, n)
    B2 = C2 = None
    if uncertainty_ports:
        B2 = np.zeros((n + 2, 1))
        B2[n, 0] = 1.0 / tau_p
        B2[n + 1, 0] = 1.0 / tau_n
        C2 = C1.copy()
    plant_taus = tuple(float(1.0 / abs(p.real)) for p in eig_general(realization.A))
    return ClosedLoopSystem(
        A=A,
        B1=B1,
        C1=C1,
        K=K,
        saturation=saturation,
        B2=B2,
        C2=C2,
        time_constants=(tau_p, tau_n, *plant_taus),
        slow_time=max(tau_p, tau_n),
    )


def parametric_vertices(
    plant: LTI,
    tau_p_range: Sequence[float],
    tau_n_range: Sequence[float],
) -> List[np.ndarray]:
    """State matrices at the corners of a ``(tau_p, tau_n)`` box.

    Args:
        plant: The plant.
        tau_p_range: ``(low, high)`` for ``tau_p``.
        tau_n_range: ``(low, high)`` for ``tau_n``.

    Returns:
        One ``A`` per corner, ordered ``(lo,lo), (lo,hi), (hi,lo), (hi,hi)``.
    """
    realization = plant_ss(plant)
    return [
        _controller_block(realization, tp, tn)[0]
        for tp, tn in itertools.product(tau_p_range, tau_n_range)
    ]
