"""Dense eigenvalue kernels and symmetric inertia."""
from typing import NamedTuple, Tuple

import numpy as np
from scipy import linalg as sla

from mixfb.error import InvalidInput

DEFAULT_ZERO_TOL = 1e-8
_SYMMETRY_TOL = 1e-10


class Inertia(NamedTuple):
    """Signature of a symmetric matrix.

    Attributes:
        neg: Number of negative eigenvalues.
        zero: Number of (numerically) zero eigenvalues.
        pos: Number of positive eigenvalues.
    """

    neg: int
    zero: int
    pos: int

    @property
    def dim(self) -> int:
        """Matrix dimension."""
        return self.neg + self.zero + self.pos

    def __str__(self) -> str:
        return f"({self.neg},{self.zero},{self.pos})"


def _as_square(m: np.ndarray, name: str) -> np.ndarray:
    arr = np.atleast_2d(np.asarray(m, dtype=float))
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InvalidInput(f"{name} must be square, got shape {arr.shape}")
    return arr


def eig_general(m: np.ndarray) -> np.ndarray:
    """Eigenvalues of a real square matrix (Hessenberg reduction + shifted QR).

    Args:
        m: Square real matrix.

    Raises:
        InvalidInput: If ``m`` is not square.

    Returns:
        The eigenvalues sorted by real then imaginary part.
    """
    arr = _as_square(m, "Matrix")
    eigs = sla.eigvals(arr).astype(complex)
    return eigs[np.lexsort((eigs.imag, eigs.real))]


def eig_symmetric(
    s: np.ndarray, zero_tol: float = DEFAULT_ZERO_TOL
) -> Tuple[np.ndarray, Inertia]:
    """Eigenvalues and inertia of a symmetric matrix.

    Args:
        s: Symmetric real matrix.
        zero_tol: Eigenvalues with ``|v| <= zero_tol * max(1, ||S||)`` count as zero.

    Raises:
        InvalidInput: If ``s`` is not square or not symmetric.

    Returns:
        The ascending eigenvalues and the inertia triple.
    """
    arr = _as_square(s, "Symmetric matrix")
    norm = float(np.linalg.norm(arr))
    if np.linalg.norm(arr - arr.T) > _SYMMETRY_TOL * norm:
        raise InvalidInput("Matrix is not symmetric")
    eigs = sla.eigh(0.5 * (arr + arr.T), eigvals_only=True)
    threshold = zero_tol * max(1.0, float(np.max(np.abs(eigs))))
    inertia = Inertia(
        neg=int(np.sum(eigs < -threshold)),
        zero=int(np.sum(np.abs(eigs) <= threshold)),
        pos=int(np.sum(eigs > threshold)),
    )
    return eigs, inertia


def max_eig(s: np.ndarray) -> float:
    """Largest eigenvalue of the symmetric part of ``s``."""
    arr = _as_square(s, "Matrix")
    return float(sla.eigh(0.5 * (arr + arr.T), eigvals_only=True)[-1])
