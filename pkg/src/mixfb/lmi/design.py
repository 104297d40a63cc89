"""State-feedback synthesis of 2-dominant mixed-feedback loops."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from mixfb.analysis.dominance import DominanceCertificate
from mixfb.error import InertiaMismatch, InvalidInput, PreconditionFailed, UncontrollablePair
from mixfb.lmi import constraints as lmis
from mixfb.lmi.problem import (
    DEFAULT_SOLVER,
    Block,
    Constraint,
    LMIProblem,
    LMISolution,
    solve_feasibility,
)
from mixfb.lti import eig_general, eig_symmetric

logger = logging.getLogger(__name__)

DESIGN_KINDS = ("nominal", "robust", "passive", "precompensator")


@dataclass(frozen=True)
class DesignOptions:
    """Add-on constraints and solver settings shared by every design.

    Attributes:
        epsilon: Strictness margin; defaults to ``1e-6 max(1, max ||A_i||)``.
        instability: Append ``Y A^T + Z^T B^T + A Y + B Z <= -eps I`` so that
            the origin is unstable.
        nu: Bound on ``Z Z^T`` (Schur block); ``None`` disables it.
        extra_vertices: Hull vertices besides the nominal ``A``.
        robust_instability_gamma: Append the gain LMI on ``A + B K`` at rate 0,
            bounding the gain of the linearization at the origin.
        instability_ports: ``(B2, C2)`` for the robust-instability LMI; the
            robust and passive designs default to their own ports.
        solver: cvxpy solver name.
        seed: Seed of the affinity probe.
    """

    epsilon: Optional[float] = None
    instability: bool = True
    nu: Optional[float] = None
    extra_vertices: Sequence[np.ndarray] = field(default_factory=tuple)
    robust_instability_gamma: Optional[float] = None
    instability_ports: Optional[Tuple[np.ndarray, np.ndarray]] = None
    solver: str = DEFAULT_SOLVER
    seed: int = 0


@dataclass(frozen=True, eq=False)
class DesignResult:
    """A certified state-feedback design ``K = Z Y^-1``.

    Attributes:
        kind: One of :data:`DESIGN_KINDS`.
        Y: The transformed Lyapunov matrix.
        Z: The transformed gain.
        K: The feedback row.
        P: ``Y^-1``.
        certificate: The dominance certificate (``method="lmi"``).
        solution: The raw solver output.
        problem: The LMI problem that was solved.
        B: Control input column.
        ports: Port matrices and scalars needed to rebuild the problem.
    """

    kind: str
    Y: np.ndarray
    Z: np.ndarray
    K: np.ndarray
    P: np.ndarray
    certificate: DominanceCertificate
    solution: LMISolution
    problem: LMIProblem
    B: np.ndarray
    ports: Dict[str, Any] = field(default_factory=dict)

    @property
    def vertices(self) -> List[np.ndarray]:
        """Hull vertices the design holds for."""
        return self.problem.vertices

    def dc_gain(self, A: Optional[np.ndarray] = None) -> float:
        """``-K A^-1 B`` at ``A`` (the nominal vertex by default)."""
        A = self.vertices[0] if A is None else A
        return float(-(self.K @ np.linalg.solve(A, self.B))[0, 0])

    def closed_matrix(self, A: Optional[np.ndarray] = None) -> np.ndarray:
        """``A + B K`` at ``A`` (the nominal vertex by default)."""
        A = self.vertices[0] if A is None else A
        return A + self.B @ self.K


def default_epsilon(vertices: Sequence[np.ndarray]) -> float:
    """``1e-6 max(1, max_i ||A_i||)``."""
    return 1e-6 * max(1.0, max(float(np.linalg.norm(A, 2)) for A in vertices))


def _matrix(value: Any, rows: int, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.size == 0 or arr.size % rows:
        raise InvalidInput(f"{name} does not have {rows} rows")
    return arr.reshape(rows, -1)


def _row(value: Any, cols: int, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.size == 0 or arr.size % cols:
        raise InvalidInput(f"{name} does not have {cols} columns")
    return arr.reshape(-1, cols)


def _vertices(A: np.ndarray, extra: Sequence[np.ndarray]) -> List[np.ndarray]:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    out = [A] + [np.atleast_2d(np.asarray(V, dtype=float)) for V in extra]
    if A.shape[0] != A.shape[1] or any(V.shape != A.shape for V in out):
        raise InvalidInput("Vertex matrices must be square and share one shape")
    return out


def check_split(vertices: Sequence[np.ndarray], rate: float, p: int = 2) -> None:
    """Require exactly ``p`` eigenvalues right of ``-rate`` at every vertex.

    Raises:
        PreconditionFailed: If a vertex splits differently.
    """
    for i, V in enumerate(vertices):
        split = int(np.sum(eig_general(V).real > -rate))
        if split != p:
            raise PreconditionFailed(
                f"Vertex {i} has {split} eigenvalues right of {-rate:g}, "
                f"{p} are required"
            )


def check_controllable(A: np.ndarray, B: np.ndarray) -> None:
    """Kalman rank test.

    Raises:
        UncontrollablePair: If ``(A, B)`` is not controllable.
    """
    n = A.shape[0]
    blocks = [B]
    for _ in range(n - 1):
        blocks.append(A @ blocks[-1])
    if np.linalg.matrix_rank(np.hstack(blocks)) < n:
        raise UncontrollablePair("The pair (A, B) is not controllable")


def build_constraints(
    kind: str, vertices: Sequence[np.ndarray], B: np.ndarray, rate: float, ports: Dict[str, Any]
) -> List[Constraint]:
    """Constraint family of a design kind.

    Args:
        kind: One of :data:`DESIGN_KINDS`.
        vertices: Hull vertices.
        B: Control input column.
        rate: The rate ``lambda``.
        ports: Port matrices and scalars of the design.

    Raises:
        InvalidInput: On an unknown kind.

    Returns:
        The constraints, in a fixed order.
    """
    out: List[Constraint] = []
    for i, V in enumerate(vertices):
        if kind == "nominal":
            out.append(lmis.dominance(f"open_{i}", V, rate))
            out.append(lmis.dominance(f"closed_{i}", V, rate, B))
        elif kind == "robust":
            B2, C2, gamma = ports["B2"], ports["C2"], ports["gamma"]
            out.append(lmis.gain_design(f"open_{i}", V, rate, B2, C2, gamma))
            out.append(lmis.gain_design(f"closed_{i}", V, rate, B2, C2, gamma, B))
        elif kind == "passive":
            C, mu = ports["C"], ports["mu"]
            out.append(lmis.passivity_design(f"open_{i}", V, rate, B, C, mu, closed=False))
            out.append(lmis.passivity_design(f"closed_{i}", V, rate, B, C, mu, closed=True))
        elif kind == "precompensator":
            out.append(lmis.dominance(f"closed_{i}", V, rate, B))
            if ports.get("gamma") is not None:
                C0, gamma = ports["C"], ports["gamma"]
                out.append(lmis.gain_design(f"gain_{i}", V, rate, B, C0, gamma, B))
        else:
            raise InvalidInput(f"Unknown design kind {kind!r}")
        if ports.get("instability"):
            out.append(lmis.dominance(f"unstable_{i}", V, 0.0, B))
        if ports.get("robust_instability_gamma") is not None:
            out.append(
                lmis.gain_design(
                    f"robust_instability_{i}",
                    V,
                    0.0,
                    ports["instability_B2"],
                    ports["instability_C2"],
                    ports["robust_instability_gamma"],
                    B,
                )
            )
    if kind == "precompensator":
        out.append(lmis.positive("positive", "Y", vertices[0].shape[0]))
    if ports.get("nu") is not None:
        n, m = B.shape
        out.append(lmis.norm_bound("z_norm", ports["nu"], m, n))
    return out


def build_problem(
    kind: str,
    vertices: Sequence[np.ndarray],
    B: np.ndarray,
    rate: float,
    ports: Dict[str, Any],
    epsilon: Optional[float] = None,
    seed: int = 0,
    solver: str = DEFAULT_SOLVER,
) -> LMIProblem:
    """Assemble the LMI problem of a design kind (also used to re-verify certificates)."""
    vertices = list(vertices)
    n, m = B.shape
    return LMIProblem(
        blocks=[Block("Y", n, n, symmetric=True), Block("Z", m, n)],
        constraints=build_constraints(kind, vertices, B, rate, ports),
        epsilon=epsilon or default_epsilon(vertices),
        rate=rate,
        vertices=vertices,
        seed=seed,
        solver=solver,
    )


def _common_ports(
    options: DesignOptions, default_ports: Optional[Tuple[np.ndarray, np.ndarray]], n: int
) -> Dict[str, Any]:
    ports: Dict[str, Any] = {"instability": options.instability, "nu": options.nu}
    gamma = options.robust_instability_gamma
    if gamma is None:
        return ports
    chosen = options.instability_ports or default_ports
    if chosen is None:
        raise InvalidInput("robust_instability_gamma needs instability_ports")
    ports["robust_instability_gamma"] = float(gamma)
    ports["instability_B2"] = _matrix(chosen[0], n, "instability B2")
    ports["instability_C2"] = _row(chosen[1], n, "instability C2")
    return ports


def _solve_design(
    kind: str,
    vertices: List[np.ndarray],
    B: np.ndarray,
    rate: float,
    ports: Dict[str, Any],
    options: DesignOptions,
    p: int,
) -> DesignResult:
    problem = build_problem(
        kind, vertices, B, rate, ports, options.epsilon, options.seed, options.solver
    )
    solution = solve_feasibility(problem)
    Y, Z = solution["Y"], solution["Z"]
    n = Y.shape[0]
    _, inertia = eig_symmetric(Y)
    if inertia != (p, 0, n - p):
        raise InertiaMismatch(f"Y has inertia {inertia}, expected ({p},0,{n - p})")
    P = np.linalg.inv(Y)
    P = 0.5 * (P + P.T)
    K = Z @ P
    certificate = DominanceCertificate(
        p=p,
        rate=rate,
        method="lmi",
        margin=problem.epsilon,
        P=P,
        details={"residuals": solution.residuals},
    )
    logger.debug("%s design: inertia %s, K=%s", kind, inertia, K.tolist())
    return DesignResult(
        kind=kind,
        Y=Y,
        Z=Z,
        K=K,
        P=P,
        certificate=certificate,
        solution=solution,
        problem=problem,
        B=B,
        ports=ports,
    )


def design_2dominant(
    A: np.ndarray,
    B: np.ndarray,
    rate: float,
    options: Optional[DesignOptions] = None,
) -> DesignResult:
    """Feedback ``K`` making ``x' = A x + B phi(K x)`` 2-dominant with rate ``rate``.

    Solves ``Y A_i^T + A_i Y + 2 rate Y <= -eps I`` and the same with
    ``A_i + B K`` for every hull vertex, plus the add-ons of ``options``.

    Args:
        A: Nominal open-loop matrix.
        B: Control input column.
        rate: The rate ``lambda``.
        options: Add-on constraints and solver settings.

    Raises:
        PreconditionFailed: If a vertex does not have two eigenvalues right of ``-rate``.
        Infeasible: If the LMIs have no strictly feasible point.
        InertiaMismatch: If ``Y`` does not have inertia ``(2, 0, n - 2)``.

    Returns:
        The certified design.
    """
    options = options or DesignOptions()
    vertices = _vertices(A, options.extra_vertices)
    n = vertices[0].shape[0]
    B = _matrix(B, n, "B")
    check_split(vertices, rate)
    ports = _common_ports(options, None, n)
    return _solve_design("nominal", vertices, B, rate, ports, options, p=2)


def design_robust(
    A: np.ndarray,
    B1: np.ndarray,
    B2: np.ndarray,
    C2: np.ndarray,
    rate: float,
    gamma: float,
    options: Optional[DesignOptions] = None,
) -> DesignResult:
    """2-dominant design robust to perturbations ``w = Delta(z)`` of gain below ``1/gamma``.

    Args:
        A: Nominal open-loop matrix.
        B1: Control input column.
        B2: Perturbation input column.
        C2: Perturbation output row.
        rate: The rate ``lambda``.
        gamma: Bound on the closed-loop gain from ``w`` to ``z``.
        options: Add-on constraints and solver settings.

    Raises:
        InvalidInput: If ``gamma <= 0`` or a port has the wrong shape.
        PreconditionFailed: If a vertex does not have two eigenvalues right of ``-rate``.
        Infeasible: If the LMIs have no strictly feasible point.
        InertiaMismatch: If ``Y`` does not have inertia ``(2, 0, n - 2)``.

    Returns:
        The certified design.
    """
    if not gamma > 0:
        raise InvalidInput(f"gamma must be positive, got {gamma}")
    options = options or DesignOptions()
    vertices = _vertices(A, options.extra_vertices)
    n = vertices[0].shape[0]
    B1 = _matrix(B1, n, "B1")
    B2 = _matrix(B2, n, "B2")
    C2 = _row(C2, n, "C2")
    check_split(vertices, rate)
    ports = _common_ports(options, (B2, C2), n)
    ports.update({"B2": B2, "C2": C2, "gamma": float(gamma)})
    return _solve_design("robust", vertices, B1, rate, ports, options, p=2)


def design_passive(
    A: np.ndarray,
    B: np.ndarray,
    C: np.ndarray,
    rate: float,
    mu: float,
    options: Optional[DesignOptions] = None,
) -> DesignResult:
    """2-dominant design that stays 2-dominant in feedback with passive loads.

    The closed loop is 2-passive from the port input to ``C x`` with a shortage
    of input passivity at most ``mu``; any load with output-passivity excess
    above ``mu`` preserves 2-dominance.

    Args:
        A: Nominal open-loop matrix.
        B: Control input and port column.
        C: Port output row.
        rate: The rate ``lambda``.
        mu: Shortage of input passivity.
        options: Add-on constraints and solver settings.

    Raises:
        PreconditionFailed: If a vertex does not have two eigenvalues right of ``-rate``.
        Infeasible: If the LMIs have no strictly feasible point.
        InertiaMismatch: If ``Y`` does not have inertia ``(2, 0, n - 2)``.

    Returns:
        The certified design.
    """
    options = options or DesignOptions()
    vertices = _vertices(A, options.extra_vertices)
    n = vertices[0].shape[0]
    B = _matrix(B, n, "B")
    C = _row(C, n, "C")
    check_split(vertices, rate)
    ports = _common_ports(options, (B, C), n)
    ports.update({"C": C, "mu": float(mu)})
    return _solve_design("passive", vertices, B, rate, ports, options, p=2)


def design_precompensator(
    A0: np.ndarray,
    B0: np.ndarray,
    rate: float,
    gamma: Optional[float] = None,
    C0: Optional[np.ndarray] = None,
    options: Optional[DesignOptions] = None,
) -> DesignResult:
    """Pre-stabilizing feedback ``K0`` placing every plant pole left of ``-rate``.

    Args:
        A0: Plant state matrix.
        B0: Plant input column.
        rate: The rate ``lambda``.
        gamma: Optional gain bound from ``u0`` to ``C0 x0`` at rate ``rate``.
        C0: Plant output row, required with ``gamma``.
        options: Solver settings (add-on constraints are ignored).

    Raises:
        UncontrollablePair: If ``(A0, B0)`` is not controllable.
        InvalidInput: If ``gamma`` is given without ``C0``.
        Infeasible: If the LMIs have no strictly feasible point.

    Returns:
        The design; ``K`` is ``K0`` and ``Y`` is positive definite.
    """
    options = options or DesignOptions()
    A0 = np.atleast_2d(np.asarray(A0, dtype=float))
    n = A0.shape[0]
    B0 = _matrix(B0, n, "B0")
    check_controllable(A0, B0)
    ports: Dict[str, Any] = {"instability": False, "nu": None}
    if gamma is not None:
        if C0 is None:
            raise InvalidInput("C0 is required when gamma is given")
        ports.update({"C": _row(C0, n, "C0"), "gamma": float(gamma)})
    return _solve_design("precompensator", [A0], B0, rate, ports, options, p=0)
