"""Explicit Runge-Kutta integration of closed loops with step restarts at reference edges."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Protocol, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from mixfb.error import IntegrationFailure, InvalidInput
from mixfb.simulation.reference import ConstantReference, Reference, sample

logger = logging.getLogger(__name__)

METHOD = "RK45"
DEFAULT_TOL = 1e-8
DEFAULT_SAMPLES = 20_000
STEP_FRACTION = 0.1


class Simulable(Protocol):
    """What :func:`integrate` needs from a system."""

    time_constants: Tuple[float, ...]
    slow_time: float

    @property
    def n_states(self) -> int:
        ...

    def vector_field(self, x: np.ndarray, r: float = 0.0) -> np.ndarray:
        ...

    def output(self, x: np.ndarray) -> np.ndarray:
        ...


@dataclass(frozen=True, eq=False)
class SimTrace:
    """Sampled trajectory.

    Attributes:
        t: Strictly increasing sample times.
        X: States, one row per sample.
        y: Outputs.
        r: Reference values.
        metadata: Method, step policy, tolerance, breakpoints and slow time.
    """

    t: np.ndarray
    X: np.ndarray
    y: np.ndarray
    r: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        n = len(self.t)
        if not len(self.X) == len(self.y) == len(self.r) == n:
            raise InvalidInput("Trace arrays differ in length")

    @property
    def duration(self) -> float:
        return float(self.t[-1] - self.t[0]) if len(self.t) else 0.0

    def columns(self) -> Tuple[List[str], np.ndarray]:
        """Header and rows for CSV export: ``t, y, r, x1 .. xn``."""
        n = self.X.shape[1]
        header = ["t", "y", "r"] + [f"x{i + 1}" for i in range(n)]
        rows = np.column_stack([self.t, self.y, self.r, self.X])
        return header, rows


def max_step(time_constants: Sequence[float]) -> float:
    """A tenth of the fastest time constant."""
    if not time_constants:
        raise InvalidInput("At least one time constant is needed to bound the step")
    return STEP_FRACTION * min(time_constants)


def _segments(horizon: float, edges: Sequence[float]) -> List[Tuple[float, float]]:
    cuts = [0.0, *edges, horizon]
    return list(zip(cuts, cuts[1:]))


def integrate(
    system: Simulable,
    x0: Sequence[float],
    reference: Optional[Reference] = None,
    horizon: Optional[float] = None,
    tol: float = DEFAULT_TOL,
    samples: int = DEFAULT_SAMPLES,
) -> SimTrace:
    """Integrate ``system`` from ``x0`` under ``reference``.

    The solver is restarted at every reference edge, so each segment sees a
    constant input. Samples are uniform over ``[0, horizon]``.

    Args:
        system: The closed loop (or an interconnection).
        x0: Initial state.
        reference: Reference signal, zero by default.
        horizon: Final time, ``200 slow_time`` by default.
        tol: Relative and absolute local error tolerance.
        samples: Number of sample intervals.

    Raises:
        InvalidInput: On a non-positive horizon or tolerance, or a wrong ``x0``.
        IntegrationFailure: If the step size underflows or the state blows up.

    Returns:
        The sampled trace.
    """
    reference = reference or ConstantReference()
    horizon = 200.0 * system.slow_time if horizon is None else float(horizon)
    if not horizon > 0 or not tol > 0:
        raise InvalidInput("Horizon and tolerance must be positive")
    x = np.asarray(x0, dtype=float).reshape(-1)
    if x.shape != (system.n_states,):
        raise InvalidInput(f"x0 has {x.size} entries, the system has {system.n_states} states")
    step = max_step(system.time_constants)
    grid = np.linspace(0.0, horizon, samples + 1)
    edges = reference.breakpoints(horizon)
    metadata = {
        "method": METHOD,
        "max_step": step,
        "tol": tol,
        "breakpoints": list(edges),
        "slow_time": system.slow_time,
        "reference": reference.to_dict(),
    }
    times: List[np.ndarray] = []
    states: List[np.ndarray] = []
    segments = _segments(horizon, edges)
    for i, (a, b) in enumerate(segments):
        last = i == len(segments) - 1
        inside = grid[(grid >= a) & (grid < b)]
        t_eval = np.append(inside, b)
        r = reference(a)
        sol = solve_ivp(
            lambda _t, z: system.vector_field(z, r),
            (a, b),
            x,
            method=METHOD,
            t_eval=t_eval,
            rtol=tol,
            atol=tol,
            max_step=step,
        )
        if sol.status == -1 or not np.all(np.isfinite(sol.y)):
            times.append(sol.t)
            states.append(sol.y.T)
            partial = _trace(system, times, states, reference, metadata)
            raise IntegrationFailure(
                f"Integration failed on [{a:g}, {b:g}]: {sol.message}", partial
            )
        keep = sol.t.size if last else inside.size
        times.append(sol.t[:keep])
        states.append(sol.y.T[:keep])
        x = sol.y[:, -1]
        logger.debug("Segment [%g, %g] with r=%g: %d samples", a, b, r, keep)
    return _trace(system, times, states, reference, metadata)


def _trace(
    system: Simulable,
    times: List[np.ndarray],
    states: List[np.ndarray],
    reference: Reference,
    metadata: Dict[str, Any],
) -> SimTrace:
    t = np.concatenate(times) if times else np.zeros(0)
    X = np.vstack(states) if states else np.zeros((0, system.n_states))
    finite = np.all(np.isfinite(X), axis=1)
    t, X = t[finite], X[finite]
    return SimTrace(t=t, X=X, y=system.output(X), r=sample(reference, t), metadata=metadata)
