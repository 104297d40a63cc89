"""Affine symmetric-matrix feasibility problems and their conic solution."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import cvxpy as cp
import numpy as np

from mixfb.error import Infeasible, InvalidInput
from mixfb.lti import Inertia, eig_symmetric, max_eig

logger = logging.getLogger(__name__)

DEFAULT_SOLVER = "CLARABEL"
_AFFINE_TOL = 1e-9
_ACCEPT_TOL = 1e-7
_FALLBACK_RADIUS = 1e6

Stacker = Callable[[Sequence[Sequence[Any]]], Any]
Builder = Callable[[Mapping[str, Any], Stacker], Any]


def numpy_stacker(blocks: Sequence[Sequence[Any]]) -> np.ndarray:
    """Assemble a block matrix from numpy blocks."""
    return np.block([[np.atleast_2d(b) for b in row] for row in blocks])


def cvxpy_stacker(blocks: Sequence[Sequence[Any]]) -> cp.Expression:
    """Assemble a block matrix from cvxpy expressions and constants."""
    return cp.bmat([list(row) for row in blocks])


@dataclass(frozen=True)
class Block:
    """A decision block.

    Attributes:
        name: Key under which builders receive the block.
        rows: Row count.
        cols: Column count.
        symmetric: Whether the block is a symmetric matrix.
    """

    name: str
    rows: int
    cols: int
    symmetric: bool = False

    def __post_init__(self) -> None:
        """Check the shape."""
        if self.rows < 1 or self.cols < 1:
            raise InvalidInput(f"Block {self.name} must have a positive shape")
        if self.symmetric and self.rows != self.cols:
            raise InvalidInput(f"Symmetric block {self.name} must be square")


@dataclass(frozen=True)
class Constraint:
    """An affine map ``F`` of the decision blocks, required to satisfy ``F + eps E <= 0``.

    ``E`` is the identity on the leading ``strict`` rows and columns and zero
    elsewhere, so the margin applies to the Lyapunov block of a dissipation
    inequality and the supply blocks only need to be semidefinite.

    Attributes:
        name: Label used in residual reports.
        build: ``build(values, stacker)`` returns ``F`` for numpy values
            (with :func:`numpy_stacker`) or cvxpy variables (with :func:`cvxpy_stacker`).
        size: Dimension of ``F``.
        strict: Size of the leading block carrying the margin; ``None`` is all of ``F``.
    """

    name: str
    build: Builder
    size: int
    strict: Optional[int] = None

    def weight(self) -> np.ndarray:
        """The margin pattern ``E``."""
        k = self.size if self.strict is None else self.strict
        return np.diag([1.0] * k + [0.0] * (self.size - k))


@dataclass
class LMIProblem:
    """A strict LMI feasibility problem.

    Attributes:
        blocks: Decision blocks.
        constraints: Constraints ``F_i(blocks) + epsilon E_i <= 0``.
        epsilon: Strictness margin.
        rate: The rate ``lambda`` the constraints were built for.
        vertices: Vertex state matrices of the convex-hull relaxation.
        seed: Seed of the affinity probe.
        solver: cvxpy solver name.
    """

    blocks: List[Block]
    constraints: List[Constraint]
    epsilon: float
    rate: float = 0.0
    vertices: List[np.ndarray] = field(default_factory=list)
    seed: int = 0
    solver: str = DEFAULT_SOLVER

    def __post_init__(self) -> None:
        """Validate the vertex list, the margin and the affinity of every constraint."""
        if not self.epsilon > 0:
            raise InvalidInput("The strictness margin epsilon must be positive")
        if not self.constraints:
            raise InvalidInput("An LMI problem needs at least one constraint")
        names = [b.name for b in self.blocks]
        if len(set(names)) != len(names):
            raise InvalidInput("Decision block names must be unique")
        for c in self.constraints:
            if c.strict is not None and not 0 < c.strict <= c.size:
                raise InvalidInput(f"Constraint {c.name} has a margin block of size {c.strict}")
        if self.vertices:
            shapes = {np.shape(v) for v in self.vertices}
            if len(shapes) != 1:
                raise InvalidInput(f"Vertex matrices differ in shape: {sorted(shapes)}")
        self._probe_affinity()

    def _random_point(self, rng: np.random.Generator) -> Dict[str, np.ndarray]:
        point = {}
        for b in self.blocks:
            value = rng.standard_normal((b.rows, b.cols))
            point[b.name] = 0.5 * (value + value.T) if b.symmetric else value
        return point

    def _probe_affinity(self) -> None:
        rng = np.random.default_rng(self.seed)
        u, v = self._random_point(rng), self._random_point(rng)
        mid = {name: 0.5 * (u[name] + v[name]) for name in u}
        for c in self.constraints:
            fu, fv, fm = (evaluate(c, point) for point in (u, v, mid))
            if fm.shape != (c.size, c.size):
                raise InvalidInput(
                    f"Constraint {c.name} has shape {fm.shape}, expected {c.size}"
                )
            scale = max(1.0, float(np.max(np.abs(fu))), float(np.max(np.abs(fv))))
            if np.max(np.abs(fm - 0.5 * (fu + fv))) > _AFFINE_TOL * scale:
                raise InvalidInput(f"Constraint {c.name} is not affine")
            if np.max(np.abs(fm - fm.T)) > _AFFINE_TOL * scale:
                raise InvalidInput(f"Constraint {c.name} is not symmetric")

    def residuals(self, values: Mapping[str, np.ndarray]) -> Dict[str, float]:
        """Largest eigenvalue of ``F_i + epsilon E_i`` at ``values``; feasible means ``<= 0``."""
        return {
            c.name: max_eig(evaluate(c, values) + self.epsilon * c.weight())
            for c in self.constraints
        }

    def violations(self, values: Mapping[str, np.ndarray]) -> Dict[str, float]:
        """Residuals above the acceptance tolerance, which scales with ``max |F_i|``."""
        out = {}
        for c in self.constraints:
            F = evaluate(c, values)
            r = max_eig(F + self.epsilon * c.weight())
            if r > _ACCEPT_TOL * max(1.0, float(np.max(np.abs(F)))):
                out[c.name] = r
        return out


def evaluate(constraint: Constraint, values: Mapping[str, np.ndarray]) -> np.ndarray:
    """Numeric value of a constraint."""
    return np.asarray(constraint.build(values, numpy_stacker), dtype=float)


@dataclass(frozen=True, eq=False)
class LMISolution:
    """A strictly feasible point.

    Attributes:
        values: Value of every decision block.
        residuals: Largest eigenvalue of every constraint plus its margin.
        margin: The optimal ``t`` of the margin-maximization stage.
        inertias: Inertia of every symmetric block.
        status: Final solver status.
    """

    values: Dict[str, np.ndarray]
    residuals: Dict[str, float]
    margin: float
    inertias: Dict[str, Inertia]
    status: str

    @property
    def max_residual(self) -> float:
        """Worst residual."""
        return max(self.residuals.values())

    def __getitem__(self, name: str) -> np.ndarray:
        return self.values[name]


def _variables(problem: LMIProblem) -> Dict[str, cp.Variable]:
    return {
        b.name: cp.Variable((b.rows, b.cols), symmetric=b.symmetric, name=b.name)
        for b in problem.blocks
    }


def _symmetric_expressions(
    problem: LMIProblem, variables: Mapping[str, cp.Variable]
) -> List[cp.Expression]:
    exprs = []
    for c in problem.constraints:
        F = c.build(variables, cvxpy_stacker)
        exprs.append(0.5 * (F + F.T))
    return exprs


def _solve(prob: cp.Problem, solver: str) -> str:
    try:
        prob.solve(solver=solver)
    except cp.error.SolverError as exc:
        logger.warning("Solver %s failed: %s", solver, exc)
        return "solver_error"
    if prob.status == cp.OPTIMAL_INACCURATE:
        logger.warning("Solver %s returned an inaccurate solution", solver)
    return str(prob.status)


def _flat(variables: Mapping[str, cp.Variable]) -> cp.Expression:
    return cp.hstack([cp.vec(v, order="F") for v in variables.values()])


def _best_margin(problem: LMIProblem) -> Tuple[float, Dict[str, Any]]:
    """Smallest achievable residual in a bounded ball, for infeasibility reports."""
    eps = problem.epsilon
    variables = _variables(problem)
    exprs = _symmetric_expressions(problem, variables)
    t = cp.Variable()
    cons = [
        F + eps * c.weight() << t * np.eye(c.size) for F, c in zip(exprs, problem.constraints)
    ]
    cons.append(cp.norm(_flat(variables), 2) <= _FALLBACK_RADIUS)
    prob = cp.Problem(cp.Minimize(t), cons)
    status = _solve(prob, problem.solver)
    best = float(t.value) if t.value is not None else float("inf")
    return best, {"status": status, "radius": _FALLBACK_RADIUS}


def _values(problem: LMIProblem, variables: Mapping[str, cp.Variable]) -> Dict[str, np.ndarray]:
    values = {name: np.array(v.value, dtype=float) for name, v in variables.items()}
    for b in problem.blocks:
        if b.symmetric:
            values[b.name] = 0.5 * (values[b.name] + values[b.name].T)
    return values


def solve_feasibility(problem: LMIProblem) -> LMISolution:
    """Find a strictly feasible point of ``problem``.

    The first stage finds the minimum-norm point with ``F_i + epsilon E_i <= 0``;
    the second stage pushes every margin block as far below zero as it can
    inside the ball of twice that norm. The answer is accepted only if every
    residual, recomputed in numpy, is within the acceptance tolerance of zero.

    Args:
        problem: The LMI problem.

    Raises:
        Infeasible: If no strictly feasible point is found.

    Returns:
        The feasible point with its residuals.
    """
    eps = problem.epsilon
    variables = _variables(problem)
    exprs = _symmetric_expressions(problem, variables)
    flat = _flat(variables)
    strict = [
        F + eps * c.weight() << np.zeros((c.size, c.size))
        for F, c in zip(exprs, problem.constraints)
    ]
    first = cp.Problem(cp.Minimize(cp.norm(flat, 2)), strict)
    status = _solve(first, problem.solver)
    logger.debug("Minimum-norm stage: %s", status)
    if status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
        best, diagnostics = _best_margin(problem)
        diagnostics["stage"] = "minimum_norm"
        diagnostics["first_status"] = status
        raise Infeasible(best, diagnostics)
    fallback = _values(problem, variables)
    radius = 2.0 * max(float(first.value), eps)
    t = cp.Variable()
    relaxed = [F << t * c.weight() for F, c in zip(exprs, problem.constraints)]
    relaxed.append(cp.norm(flat, 2) <= radius)
    second = cp.Problem(cp.Minimize(t), relaxed)
    second_status = _solve(second, problem.solver)
    logger.debug("Margin stage: %s (t=%s)", second_status, t.value)
    if second_status in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE) and t.value is not None:
        values, margin, status = _values(problem, variables), float(t.value), second_status
    else:
        logger.info("Margin stage failed (%s), keeping the minimum-norm point", second_status)
        values, margin = fallback, -eps
    residuals = problem.residuals(values)
    bad = problem.violations(values)
    if bad:
        raise Infeasible(
            max(bad.values()), {"status": status, "residuals": residuals, "violated": bad}
        )
    inertias = {
        b.name: eig_symmetric(values[b.name])[1] for b in problem.blocks if b.symmetric
    }
    return LMISolution(
        values=values,
        residuals=residuals,
        margin=margin,
        inertias=inertias,
        status=status,
    )
