"""Monotone, slope-restricted, bounded actuation stages."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

from mixfb.error import InvalidInput

_SLOPE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Saturation:
    """A sigmoid ``phi`` with ``0 <= phi' <= 1`` and ``|phi| <= bound``.

    The default is ``bound * tanh(y / bound)``. A table saturation is a
    monotone cubic (PCHIP) interpolant of the given points, held constant
    outside the table range.

    Attributes:
        kind: ``"tanh"`` or ``"table"``.
        bound: Saturation level ``M``.
        table_y: Abscissae of a table saturation.
        table_phi: Ordinates of a table saturation.
    """

    kind: str = "tanh"
    bound: float = 1.0
    table_y: Optional[Sequence[float]] = None
    table_phi: Optional[Sequence[float]] = None
    _interp: Optional[PchipInterpolator] = field(default=None, init=False, repr=False)
    _slope: Optional[PchipInterpolator] = field(default=None, init=False, repr=False)

    def __post_init__(self) -> None:
        """Validate the bound and, for tables, build the interpolant."""
        if self.kind == "tanh":
            if not self.bound > 0:
                raise InvalidInput(f"Saturation bound must be positive, got {self.bound}")
            return
        if self.kind != "table":
            raise InvalidInput(f"Unknown saturation kind {self.kind!r}")
        if self.table_y is None or self.table_phi is None:
            raise InvalidInput("Table saturation needs table_y and table_phi")
        ys = np.asarray(self.table_y, dtype=float)
        phis = np.asarray(self.table_phi, dtype=float)
        if ys.ndim != 1 or ys.shape != phis.shape or len(ys) < 2:
            raise InvalidInput("Saturation table needs two equal-length 1-D arrays")
        if np.any(np.diff(ys) <= 0):
            raise InvalidInput("Saturation table abscissae must be strictly increasing")
        secants = np.diff(phis) / np.diff(ys)
        if np.any(secants < 0) or np.any(secants > 1 + _SLOPE_TOL):
            raise InvalidInput("Saturation table slopes must lie in [0, 1]")
        interp = PchipInterpolator(ys, phis, extrapolate=False)
        slope = interp.derivative()
        if _max_piecewise_quadratic(slope) > 1 + _SLOPE_TOL:
            raise InvalidInput("Interpolated saturation slope exceeds 1")
        object.__setattr__(self, "bound", float(np.max(np.abs(phis))))
        object.__setattr__(self, "_interp", interp)
        object.__setattr__(self, "_slope", slope)

    @classmethod
    def from_table(cls, y: Sequence[float], phi: Sequence[float]) -> Saturation:
        """Table saturation through the points ``(y[i], phi[i])``."""
        return cls(kind="table", table_y=tuple(y), table_phi=tuple(phi))

    @property
    def max_slope(self) -> float:
        """Largest slope, the sector bound used by the circle criterion."""
        if self._slope is None:
            return 1.0
        return min(1.0, _max_piecewise_quadratic(self._slope))

    def __call__(self, y):
        """Evaluate ``phi(y)`` elementwise."""
        y = np.asarray(y, dtype=float)
        if self._interp is None:
            out = self.bound * np.tanh(y / self.bound)
        else:
            ys = self._interp.x
            out = self._interp(np.clip(y, ys[0], ys[-1]))
        return out if out.ndim else float(out)

    def slope(self, y):
        """Evaluate ``phi'(y)`` elementwise, clamped to ``[0, 1]``."""
        y = np.asarray(y, dtype=float)
        if self._slope is None:
            out = 1.0 - np.tanh(y / self.bound) ** 2
        else:
            ys = self._interp.x
            inside = (y >= ys[0]) & (y <= ys[-1])
            out = np.where(inside, self._slope(np.clip(y, ys[0], ys[-1])), 0.0)
        out = np.clip(out, 0.0, 1.0)
        return out if out.ndim else float(out)

    def to_dict(self) -> dict:
        """JSON-ready description."""
        if self.kind == "tanh":
            return {"kind": "tanh", "bound": self.bound}
        return {
            "kind": "table",
            "y": [float(v) for v in self.table_y or ()],
            "phi": [float(v) for v in self.table_phi or ()],
        }


def _max_piecewise_quadratic(poly: PchipInterpolator) -> float:
    """Exact maximum of a piecewise quadratic over its breakpoints."""
    c = poly.c  # (3, m): a h^2 + b h + c on [x_i, x_{i+1}]
    widths = np.diff(poly.x)
    a, b, c0 = c[0], c[1], c[2]
    candidates = [c0, a * widths**2 + b * widths + c0]
    with np.errstate(divide="ignore", invalid="ignore"):
        h = np.where(a != 0, -b / (2 * a), 0.0)
    inside = (h > 0) & (h < widths)
    candidates.append(np.where(inside, a * h**2 + b * h + c0, -np.inf))
    return float(np.max(np.concatenate(candidates)))


def phi(y, saturation: Optional[Saturation] = None):
    """The actuation stage, ``tanh`` unless another saturation is given."""
    return (saturation or DEFAULT_SATURATION)(y)


def dphi(y, saturation: Optional[Saturation] = None):
    """Derivative of :func:`phi`."""
    return (saturation or DEFAULT_SATURATION).slope(y)


DEFAULT_SATURATION = Saturation()
