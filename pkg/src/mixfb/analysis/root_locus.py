"""Eigenvalue sweeps of the linearized mixed-feedback loop."""
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from mixfb.error import InvalidInput
from mixfb.lti import eig_general
from mixfb.loop import MixedFeedbackParams, assemble_closed_loop, kbeta_to_K, plant_ss


@dataclass(frozen=True, eq=False)
class RootLocus:
    """Closed-loop eigenvalues along a gain grid.

    Attributes:
        beta: Balance.
        gains: Gain grid.
        slope: Slope ``sigma`` of the saturation at the linearization point.
        eigenvalues: ``eigenvalues[i]`` is the spectrum at ``gains[i]``, sorted
            by real part.
    """

    beta: float
    gains: np.ndarray
    slope: float
    eigenvalues: np.ndarray

    def rightmost(self) -> np.ndarray:
        """Largest real part per gain."""
        return self.eigenvalues.real.max(axis=1)

    def count_right_of(self, axis: float) -> np.ndarray:
        """Number of eigenvalues with real part above ``axis`` per gain."""
        return (self.eigenvalues.real > axis).sum(axis=1)


def root_locus(
    beta: float,
    params: MixedFeedbackParams,
    gains: Sequence[float],
    slope: float = 1.0,
) -> RootLocus:
    """Spectrum of ``A + B1 (k sigma) K(1, beta)`` for every ``k`` of the grid.

    Args:
        beta: Balance.
        params: Supplies the plant and time constants.
        gains: Ascending, finite gain grid.
        slope: Saturation slope ``sigma`` in ``[0, 1]``.

    Raises:
        InvalidInput: If the grid is not ascending and finite or ``slope`` is out of range.

    Returns:
        The sampled locus.
    """
    gains = np.asarray(gains, dtype=float)
    if gains.ndim != 1 or not np.all(np.isfinite(gains)) or np.any(np.diff(gains) < 0):
        raise InvalidInput("Gain grid must be finite and ascending")
    if not 0.0 <= slope <= 1.0:
        raise InvalidInput(f"Slope must lie in [0, 1], got {slope}")
    system = assemble_closed_loop(params)
    unit = kbeta_to_K(1.0, beta, plant_ss(params.plant).n_states)
    loop = system.B1 @ unit
    spectra = np.array([eig_general(system.A + (k * slope) * loop) for k in gains])
    return RootLocus(beta=beta, gains=gains, slope=slope, eigenvalues=spectra)
