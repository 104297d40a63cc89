"""Constraint builders for dominance, gain and passivity LMIs.

Every builder returns a :class:`~mixfb.lmi.problem.Constraint` whose matrix is
assembled with the stacker it is handed, so the same code produces numpy
matrices for verification and cvxpy expressions for solving. Gain and
passivity inequalities carry the strictness margin on their leading
Lyapunov block only.
"""
from typing import Optional

import numpy as np

from mixfb.lmi.problem import Constraint


def _closed(A: np.ndarray, B: Optional[np.ndarray], v):
    """``Y A^T + A Y`` (+ ``Z^T B^T + B Z`` when ``B`` is given)."""
    Y = v["Y"]
    out = Y @ A.T + A @ Y
    if B is not None:
        Z = v["Z"]
        out = out + Z.T @ B.T + B @ Z
    return out


def dominance(name: str, A: np.ndarray, rate: float, B: Optional[np.ndarray] = None) -> Constraint:
    """``Y A^T + A Y (+ Z^T B^T + B Z) + 2 rate Y``."""
    n = A.shape[0]

    def build(v, stack):
        return _closed(A, B, v) + 2 * rate * v["Y"]

    return Constraint(name, build, n)


def norm_bound(name: str, nu: float, m: int, n: int) -> Constraint:
    """Schur form of ``Z Z^T <= nu``: ``[[-nu I, Z], [Z^T, -I]]``."""

    def build(v, stack):
        Z = v["Z"]
        return stack([[-nu * np.eye(m), Z], [Z.T, -np.eye(n)]])

    return Constraint(name, build, m + n)


def gain_design(
    name: str,
    A: np.ndarray,
    rate: float,
    B2: np.ndarray,
    C2: np.ndarray,
    gamma: float,
    B: Optional[np.ndarray] = None,
    Y: str = "Y",
    Z: str = "Z",
) -> Constraint:
    """Congruence-transformed gain LMI in ``(Y, Z)``.

    ``[[Y A^T + A Y (+ Z^T B^T + B Z) + 2 rate Y, B2, Y C2^T],
    [B2^T, -gamma I, 0], [C2 Y, 0, -gamma I]]``.
    """
    n, m2 = B2.shape
    p2 = C2.shape[0]

    def build(v, stack):
        Yv = v[Y]
        top = Yv @ A.T + A @ Yv + 2 * rate * Yv
        if B is not None:
            top = top + v[Z].T @ B.T + B @ v[Z]
        return stack(
            [
                [top, B2, Yv @ C2.T],
                [B2.T, -gamma * np.eye(m2), np.zeros((m2, p2))],
                [C2 @ Yv, np.zeros((p2, m2)), -gamma * np.eye(p2)],
            ]
        )

    return Constraint(name, build, n + m2 + p2, strict=n)


def passivity_design(
    name: str,
    A: np.ndarray,
    rate: float,
    B: np.ndarray,
    C: np.ndarray,
    mu: float,
    closed: bool,
) -> Constraint:
    """``[[Y A^T + A Y (+ Z^T B^T + B Z) + 2 rate Y, B - Y C^T], [B^T - C Y, -mu I]]``."""
    n, m = B.shape

    def build(v, stack):
        Y = v["Y"]
        top = _closed(A, B if closed else None, v) + 2 * rate * Y
        off = B - Y @ C.T
        return stack([[top, off], [off.T, -mu * np.eye(m)]])

    return Constraint(name, build, n + m, strict=n)


def positive(name: str, block: str, n: int) -> Constraint:
    """``-X``, so that ``-X <= -eps I`` enforces ``X > 0``."""

    def build(v, stack):
        return -v[block]

    return Constraint(name, build, n)


def gain_verify(
    name: str,
    A: np.ndarray,
    rate: float,
    B: np.ndarray,
    C: np.ndarray,
    D: np.ndarray,
    gamma: float,
) -> Constraint:
    """Gain LMI in ``P``.

    ``[[A^T P + P A + 2 rate P, P B, C^T], [B^T P, -gamma I, D^T], [C, D, -gamma I]]``
    """
    n, m = B.shape
    p = C.shape[0]

    def build(v, stack):
        P = v["P"]
        return stack(
            [
                [A.T @ P + P @ A + 2 * rate * P, P @ B, C.T],
                [B.T @ P, -gamma * np.eye(m), D.T],
                [C, D, -gamma * np.eye(p)],
            ]
        )

    return Constraint(name, build, n + m + p, strict=n)


def passivity_verify(
    name: str,
    A: np.ndarray,
    rate: float,
    B: np.ndarray,
    C: np.ndarray,
    D: np.ndarray,
    alpha: float,
    mu: float,
) -> Constraint:
    """Passivity LMI in ``P`` for the supply ``-alpha |y|^2 + 2 y^T u + mu |u|^2``.

    ``[[A^T P + P A + 2 rate P, P B - C^T, C^T],
    [B^T P - C, -mu I - (D + D^T), D^T], [C, D, -I / alpha]]``.
    """
    n, m = B.shape
    p = C.shape[0]

    def build(v, stack):
        P = v["P"]
        off = P @ B - C.T
        return stack(
            [
                [A.T @ P + P @ A + 2 * rate * P, off, C.T],
                [off.T, -mu * np.eye(m) - (D + D.T), D.T],
                [C, D, -np.eye(p) / alpha],
            ]
        )

    return Constraint(name, build, n + m + p, strict=n)
