"""Certificates in the ``P`` variable: gain and passivity at a rate."""
import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from mixfb.analysis.dominance import DominanceCertificate
from mixfb.error import InertiaMismatch, Infeasible, InvalidInput
from mixfb.lmi import constraints as lmis
from mixfb.lmi.problem import DEFAULT_SOLVER, Block, LMIProblem, solve_feasibility
from mixfb.lti import eig_symmetric

logger = logging.getLogger(__name__)

Inertia3 = Tuple[int, int, int]


def _shapes(
    vertices: Sequence[np.ndarray], B: np.ndarray, C: np.ndarray, D: Optional[np.ndarray]
) -> Tuple[list, np.ndarray, np.ndarray, np.ndarray]:
    vertices = [np.atleast_2d(np.asarray(V, dtype=float)) for V in vertices]
    if not vertices:
        raise InvalidInput("At least one vertex is required")
    n = vertices[0].shape[0]
    B = np.asarray(B, dtype=float).reshape(n, -1)
    C = np.asarray(C, dtype=float).reshape(-1, n)
    D = np.zeros((C.shape[0], B.shape[1])) if D is None else np.atleast_2d(D)
    if D.shape != (C.shape[0], B.shape[1]):
        raise InvalidInput(f"D has shape {D.shape}, expected {(C.shape[0], B.shape[1])}")
    return vertices, B, C, D.astype(float)


def _certify(
    problem: LMIProblem, p: int, inertia_target: Inertia3, extra: dict
) -> DominanceCertificate:
    solution = solve_feasibility(problem)
    P = solution["P"]
    _, inertia = eig_symmetric(P)
    if tuple(inertia) != tuple(inertia_target):
        raise InertiaMismatch(f"P has inertia {inertia}, expected {tuple(inertia_target)}")
    details = {"residuals": solution.residuals, **extra}
    return DominanceCertificate(
        p=p, rate=problem.rate, method="lmi", margin=problem.epsilon, P=P, details=details
    )


def _epsilon(vertices: Sequence[np.ndarray], epsilon: Optional[float]) -> float:
    if epsilon is not None:
        return epsilon
    return 1e-6 * max(1.0, max(float(np.linalg.norm(V, 2)) for V in vertices))


def verify_p_gain(
    vertices: Sequence[np.ndarray],
    B: np.ndarray,
    C: np.ndarray,
    D: Optional[np.ndarray],
    rate: float,
    gamma: float,
    inertia_target: Inertia3,
    epsilon: Optional[float] = None,
    solver: str = DEFAULT_SOLVER,
) -> DominanceCertificate:
    """Find ``P`` of the given inertia certifying gain below ``gamma`` at rate ``rate``.

    Args:
        vertices: State matrices, all sharing one ``P``.
        B: Input matrix.
        C: Output matrix.
        D: Feedthrough, zero when ``None``.
        rate: The rate ``lambda``.
        gamma: The gain bound.
        inertia_target: Required inertia ``(p, 0, n - p)`` of ``P``.
        epsilon: Strictness margin.
        solver: cvxpy solver name.

    Raises:
        Infeasible: If no such ``P`` exists.
        InertiaMismatch: If the solver's ``P`` has a different inertia.

    Returns:
        The certificate, with ``gamma`` in its details.
    """
    if not gamma > 0:
        raise InvalidInput(f"gamma must be positive, got {gamma}")
    vertices, B, C, D = _shapes(vertices, B, C, D)
    n = vertices[0].shape[0]
    problem = LMIProblem(
        blocks=[Block("P", n, n, symmetric=True)],
        constraints=[
            lmis.gain_verify(f"gain_{i}", V, rate, B, C, D, gamma)
            for i, V in enumerate(vertices)
        ],
        epsilon=_epsilon(vertices, epsilon),
        rate=rate,
        vertices=vertices,
        solver=solver,
    )
    return _certify(problem, inertia_target[0], inertia_target, {"gamma": gamma})


def verify_passivity(
    A: np.ndarray,
    B: np.ndarray,
    C: np.ndarray,
    D: Optional[np.ndarray],
    rate: float,
    alpha: float,
    mu: float = 0.0,
    inertia_target: Optional[Inertia3] = None,
    epsilon: Optional[float] = None,
    solver: str = DEFAULT_SOLVER,
) -> DominanceCertificate:
    """Certify dissipativity at rate ``rate`` for the supply ``-alpha |y|^2 + 2 y u + mu |u|^2``.

    ``alpha`` is an output-passivity excess, ``mu`` a shortage of input
    passivity. The default inertia target is ``(0, 0, n)``.

    Raises:
        InvalidInput: If ``alpha <= 0``.
        Infeasible: If the inequality has no strictly feasible ``P``.
        InertiaMismatch: If the solver's ``P`` has a different inertia.
    """
    if not alpha > 0:
        raise InvalidInput(f"alpha must be positive, got {alpha}")
    vertices, B, C, D = _shapes([A], B, C, D)
    n = vertices[0].shape[0]
    target = (0, 0, n) if inertia_target is None else inertia_target
    problem = LMIProblem(
        blocks=[Block("P", n, n, symmetric=True)],
        constraints=[lmis.passivity_verify("passivity", vertices[0], rate, B, C, D, alpha, mu)],
        epsilon=_epsilon(vertices, epsilon),
        rate=rate,
        vertices=vertices,
        solver=solver,
    )
    return _certify(problem, target[0], target, {"alpha": alpha, "mu": mu})


def gain_floor(
    vertices: Sequence[np.ndarray],
    B: np.ndarray,
    C: np.ndarray,
    D: Optional[np.ndarray],
    rate: float,
    inertia_target: Inertia3,
    start_gamma: float,
    iterations: int = 12,
    max_doublings: int = 20,
) -> Optional[float]:
    """Smallest LMI-certified gain bound, by bisection from ``start_gamma``.

    ``start_gamma`` should be a lower bound (the frequency-domain supremum).
    The bracket is widened by doubling until a bound is certified.

    Returns:
        The certified bound, or ``None`` if doubling never succeeds.
    """
    lo, hi = 0.0, max(start_gamma, 1e-12)
    for _ in range(max_doublings):
        try:
            verify_p_gain(vertices, B, C, D, rate, hi, inertia_target)
            break
        except (Infeasible, InertiaMismatch):
            lo, hi = hi, 2.0 * hi
    else:
        logger.warning("No certified gain bound below %g", hi)
        return None
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        try:
            verify_p_gain(vertices, B, C, D, rate, mid, inertia_target)
            hi = mid
        except (Infeasible, InertiaMismatch):
            lo = mid
    logger.debug("Certified gain floor in [%g, %g]", lo, hi)
    return hi
