"""Real polynomials stored in ascending degree order."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from numpy.polynomial import polynomial as npoly

from mixfb.error import InvalidInput

Scalar = Union[float, complex]


def _trim(coeffs: np.ndarray) -> np.ndarray:
    nonzero = np.flatnonzero(coeffs)
    if nonzero.size == 0:
        return np.zeros(1)
    return coeffs[: nonzero[-1] + 1]


@dataclass(frozen=True, eq=False)
class Polynomial:
    """A real polynomial ``c[0] + c[1] s + ... + c[d] s^d``.

    Attributes:
        coeffs: Coefficients in ascending degree order, trailing zeros trimmed.
    """

    coeffs: np.ndarray

    def __post_init__(self) -> None:
        """Validate and normalize the coefficient array."""
        arr = np.atleast_1d(np.asarray(self.coeffs, dtype=float))
        if arr.ndim != 1:
            raise InvalidInput("Polynomial coefficients must be one-dimensional")
        if not np.all(np.isfinite(arr)):
            raise InvalidInput("Polynomial coefficients must be finite")
        trimmed = _trim(arr)
        trimmed.setflags(write=False)
        object.__setattr__(self, "coeffs", trimmed)

    @classmethod
    def from_roots(cls, roots: Sequence[Scalar], gain: float = 1.0) -> Polynomial:
        """Build ``gain * prod(s - r)``; complex roots must come in conjugate pairs.

        Args:
            roots: The polynomial roots.
            gain: Leading coefficient.

        Returns:
            The polynomial.
        """
        coeffs = npoly.polyfromroots(list(roots))
        return cls(gain * np.real_if_close(coeffs, tol=1000).real)

    @property
    def degree(self) -> int:
        """Degree after trimming (0 for constants, including the zero polynomial)."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        """Whether every coefficient is zero."""
        return self.degree == 0 and self.coeffs[0] == 0.0

    @property
    def leading(self) -> float:
        """Highest-degree coefficient."""
        return float(self.coeffs[-1])

    def __call__(self, s):
        """Evaluate at a scalar or array of (complex) points."""
        return npoly.polyval(s, self.coeffs)

    def __add__(self, other: Polynomial) -> Polynomial:
        return Polynomial(npoly.polyadd(self.coeffs, other.coeffs))

    def __sub__(self, other: Polynomial) -> Polynomial:
        return Polynomial(npoly.polysub(self.coeffs, other.coeffs))

    def __mul__(self, other: Union[Polynomial, float]) -> Polynomial:
        if isinstance(other, Polynomial):
            return Polynomial(npoly.polymul(self.coeffs, other.coeffs))
        return Polynomial(self.coeffs * float(other))

    __rmul__ = __mul__

    def __neg__(self) -> Polynomial:
        return Polynomial(-self.coeffs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self) -> int:
        return hash(self.coeffs.tobytes())

    def __repr__(self) -> str:
        return f"Polynomial({self.coeffs.tolist()})"

    def allclose(self, other: Polynomial, tol: float = 1e-8) -> bool:
        """Coefficientwise comparison with zero padding.

        Args:
            other: The polynomial to compare with.
            tol: Absolute tolerance relative to the largest coefficient.

        Returns:
            Whether the polynomials agree.
        """
        size = max(len(self.coeffs), len(other.coeffs))
        a = np.pad(self.coeffs, (0, size - len(self.coeffs)))
        b = np.pad(other.coeffs, (0, size - len(other.coeffs)))
        scale = max(1.0, float(np.max(np.abs(a))), float(np.max(np.abs(b))))
        return bool(np.all(np.abs(a - b) <= tol * scale))


def poly_roots(p: Polynomial) -> np.ndarray:
    """Return all roots of ``p`` as the eigenvalues of its companion matrix.

    Args:
        p: A polynomial of degree >= 1.

    Raises:
        InvalidInput: If ``p`` is the zero polynomial.

    Returns:
        The ``deg(p)`` roots, sorted by real then imaginary part.
    """
    if p.is_zero:
        raise InvalidInput("The zero polynomial has no well-defined roots")
    if p.degree == 0:
        return np.zeros(0, dtype=complex)
    roots = npoly.polyroots(p.coeffs).astype(complex)
    return roots[np.lexsort((roots.imag, roots.real))]
