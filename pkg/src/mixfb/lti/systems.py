"""Transfer-function and state-space representations of SISO LTI blocks."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from scipy import signal

from mixfb.error import InvalidInput
from mixfb.lti.linalg import eig_general
from mixfb.lti.polynomial import Polynomial, poly_roots

_DUST = 1e-12


@dataclass(frozen=True)
class TransferFunction:
    """A rational transfer function ``num(s) / den(s)`` with real coefficients.

    Attributes:
        num: Numerator polynomial.
        den: Denominator polynomial of degree >= 1.
    """

    num: Polynomial
    den: Polynomial

    def __post_init__(self) -> None:
        """Validate the denominator."""
        if self.den.degree < 1:
            raise InvalidInput("Transfer function denominator must have degree >= 1")

    @classmethod
    def from_coeffs(cls, num, den) -> TransferFunction:
        """Build from ascending coefficient sequences."""
        return cls(Polynomial(num), Polynomial(den))

    @property
    def is_strictly_proper(self) -> bool:
        """Whether ``deg(num) < deg(den)`` (the zero function counts)."""
        return self.num.is_zero or self.num.degree < self.den.degree

    @property
    def is_proper(self) -> bool:
        """Whether ``deg(num) <= deg(den)``."""
        return self.num.degree <= self.den.degree

    @property
    def order(self) -> int:
        """Denominator degree."""
        return self.den.degree

    def normalized(self) -> TransferFunction:
        """Return the same function with a monic denominator."""
        lead = self.den.leading
        return TransferFunction(self.num * (1.0 / lead), self.den * (1.0 / lead))

    def scale(self, c: float) -> TransferFunction:
        """Multiply the numerator by ``c``, leaving the denominator untouched."""
        return TransferFunction(Polynomial(self.num.coeffs * c), self.den)

    def poles(self) -> np.ndarray:
        """Roots of the denominator."""
        return poly_roots(self.den)

    def zeros(self) -> np.ndarray:
        """Finite roots of the numerator (empty for constants)."""
        if self.num.is_zero:
            return np.zeros(0, dtype=complex)
        return poly_roots(self.num)

    def dc_gain(self) -> float:
        """Value at ``s = 0``."""
        return float(self.num.coeffs[0] / self.den.coeffs[0])

    def __call__(self, s):
        """Evaluate at a scalar or array of complex points."""
        return self.num(s) / self.den(s)

    def __mul__(self, other: Union[TransferFunction, float]) -> TransferFunction:
        if isinstance(other, TransferFunction):
            return TransferFunction(self.num * other.num, self.den * other.den)
        return self.scale(float(other))

    __rmul__ = __mul__

    def __add__(self, other: TransferFunction) -> TransferFunction:
        return TransferFunction(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    def __sub__(self, other: TransferFunction) -> TransferFunction:
        return self + (-other)

    def __neg__(self) -> TransferFunction:
        return TransferFunction(-self.num, self.den)

    def allclose(self, other: TransferFunction, tol: float = 1e-8) -> bool:
        """Compare after normalizing both denominators to be monic."""
        a, b = self.normalized(), other.normalized()
        return a.num.allclose(b.num, tol) and a.den.allclose(b.den, tol)


@dataclass(frozen=True, eq=False)
class StateSpace:
    """A realization ``x' = A x + B u, y = C x + D u``.

    Attributes:
        A: The ``n x n`` state matrix.
        B: The ``n x m`` input matrix.
        C: The ``p x n`` output matrix.
        D: The ``p x m`` feedthrough matrix.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self) -> None:
        """Coerce to 2-D float arrays and check the dimensions agree."""
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        n = A.shape[0]
        if A.ndim != 2 or A.shape != (n, n) or n < 1:
            raise InvalidInput(f"A must be square with n >= 1, got {A.shape}")
        B = np.asarray(self.B, dtype=float).reshape(n, -1)
        C = np.asarray(self.C, dtype=float).reshape(-1, n)
        D = np.atleast_2d(np.asarray(self.D, dtype=float))
        if D.shape != (C.shape[0], B.shape[1]):
            raise InvalidInput(
                f"D must be {C.shape[0]}x{B.shape[1]}, got {D.shape}"
            )
        for name, value in zip("ABCD", (A, B, C, D)):
            if not np.all(np.isfinite(value)):
                raise InvalidInput(f"{name} has non-finite entries")
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def n_states(self) -> int:
        """State dimension."""
        return self.A.shape[0]

    @property
    def shape(self) -> Tuple[int, int]:
        """(outputs, inputs)."""
        return self.D.shape

    def poles(self) -> np.ndarray:
        """Eigenvalues of ``A``."""
        return eig_general(self.A)

    def __call__(self, s: complex) -> np.ndarray:
        """Evaluate ``C (sI - A)^-1 B + D`` at a single complex point."""
        eye = np.eye(self.n_states)
        return self.C @ np.linalg.solve(s * eye - self.A, self.B) + self.D


LTI = Union[TransferFunction, StateSpace]


def _require_siso(sys: StateSpace) -> None:
    if sys.shape != (1, 1):
        raise InvalidInput(f"Expected a SISO system, got shape {sys.shape}")


def tf_to_ss(g: TransferFunction) -> StateSpace:
    """Controllable canonical realization of a proper transfer function.

    Args:
        g: The transfer function.

    Raises:
        InvalidInput: If ``g`` is not proper.

    Returns:
        The realization, with ``B = e_n``.
    """
    if not g.is_proper:
        raise InvalidInput("Only proper transfer functions can be realized")
    g = g.normalized()
    n = g.order
    den = g.den.coeffs
    num = np.pad(g.num.coeffs, (0, n + 1 - len(g.num.coeffs)))
    d = num[n]
    residual = num[:n] - d * den[:n]
    A = np.zeros((n, n))
    A[:-1, 1:] = np.eye(n - 1)
    A[-1, :] = -den[:n]
    B = np.zeros((n, 1))
    B[-1, 0] = 1.0
    return StateSpace(A, B, residual.reshape(1, n), np.array([[d]]))


def ss_to_tf(sys: StateSpace) -> TransferFunction:
    """Transfer function of a SISO realization.

    Args:
        sys: The realization.

    Raises:
        InvalidInput: If ``sys`` is not SISO.

    Returns:
        The transfer function with monic denominator of degree ``n``.
    """
    _require_siso(sys)
    num, den = signal.ss2tf(sys.A, sys.B, sys.C, sys.D)
    num = np.asarray(num, dtype=float)[0][::-1]
    den = np.asarray(den, dtype=float)[::-1]
    scale = max(1.0, float(np.max(np.abs(num))))
    num = np.where(np.abs(num) <= _DUST * scale, 0.0, num)
    return TransferFunction(Polynomial(num), Polynomial(den))


def _as_ss(sys: LTI) -> StateSpace:
    return tf_to_ss(sys) if isinstance(sys, TransferFunction) else sys


def series(first: LTI, second: LTI) -> LTI:
    """Cascade ``first`` into ``second`` (the product ``second * first``).

    Two transfer functions give a transfer function; otherwise the result is a
    state-space realization with the states of ``first`` on top.

    Raises:
        InvalidInput: If the output of ``first`` does not fit the input of ``second``.
    """
    if isinstance(first, TransferFunction) and isinstance(second, TransferFunction):
        return second * first
    s1, s2 = _as_ss(first), _as_ss(second)
    if s1.shape[0] != s2.shape[1]:
        raise InvalidInput(
            f"Cannot cascade {s1.shape[0]} outputs into {s2.shape[1]} inputs"
        )
    n1, n2 = s1.n_states, s2.n_states
    A = np.block([[s1.A, np.zeros((n1, n2))], [s2.B @ s1.C, s2.A]])
    B = np.vstack([s1.B, s2.B @ s1.D])
    C = np.hstack([s2.D @ s1.C, s2.C])
    return StateSpace(A, B, C, s2.D @ s1.D)


def parallel(
    first: LTI, second: LTI, signs: Tuple[float, float] = (1.0, 1.0)
) -> LTI:
    """Weighted sum ``signs[0] * first + signs[1] * second`` of two blocks.

    Raises:
        InvalidInput: If the input/output dimensions differ.
    """
    w1, w2 = signs
    if isinstance(first, TransferFunction) and isinstance(second, TransferFunction):
        return first.scale(w1) + second.scale(w2)
    s1, s2 = _as_ss(first), _as_ss(second)
    if s1.shape != s2.shape:
        raise InvalidInput(f"Shape mismatch {s1.shape} vs {s2.shape}")
    n1, n2 = s1.n_states, s2.n_states
    A = np.block([[s1.A, np.zeros((n1, n2))], [np.zeros((n2, n1)), s2.A]])
    B = np.vstack([s1.B, s2.B])
    C = np.hstack([w1 * s1.C, w2 * s2.C])
    return StateSpace(A, B, C, w1 * s1.D + w2 * s2.D)


def negate(sys: LTI) -> LTI:
    """Flip the sign of the output."""
    if isinstance(sys, TransferFunction):
        return -sys
    return StateSpace(sys.A, sys.B, -sys.C, -sys.D)


def dc_gain(sys: LTI) -> float:
    """Static gain of a SISO block with no pole at the origin."""
    if isinstance(sys, TransferFunction):
        return sys.dc_gain()
    _require_siso(sys)
    return float((sys.D - sys.C @ np.linalg.solve(sys.A, sys.B))[0, 0])
