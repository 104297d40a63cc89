"""Dominance maps over the ``(k, beta)`` plane."""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from toolz import concat, partition_all

from mixfb.analysis.dominance import RegionLabel, k0, k2
from mixfb.analysis.equilibria import classify_region
from mixfb.error import InvalidInput, PreconditionFailed
from mixfb.loop import MixedFeedbackParams
from mixfb.loop.saturation import Saturation

logger = logging.getLogger(__name__)

WORKERS_ENV = "MIXFB_WORKERS"
DEFAULT_BETA_POINTS = 100
DEFAULT_K_POINTS = 120
DEFAULT_K_RANGE = (0.1, 1000.0)
_BATCH = 10


@dataclass(frozen=True, eq=False)
class DominanceMap:
    """Region labels on a ``(beta, k)`` grid and the boundary curves.

    Attributes:
        betas: Balance grid.
        gains: Gain grid.
        labels: ``labels[i][j]`` is the label of ``(gains[j], betas[i])``.
        k0: ``k0(beta)`` per balance.
        k2: ``k2(beta)`` per balance, ``nan`` where the rate does not split two poles.
        rate: The rate used for 2-dominance.
        r: The constant reference.
    """

    betas: np.ndarray
    gains: np.ndarray
    labels: List[List[RegionLabel]]
    k0: np.ndarray
    k2: np.ndarray
    rate: float
    r: float

    def label_at(self, k: float, beta: float) -> RegionLabel:
        """Label of the grid point nearest to ``(k, beta)``."""
        i = int(np.argmin(np.abs(self.betas - beta)))
        j = int(np.argmin(np.abs(np.log(self.gains) - math.log(k))))
        return self.labels[i][j]


def default_grids(
    beta_points: int = DEFAULT_BETA_POINTS,
    k_points: int = DEFAULT_K_POINTS,
    k_range: Tuple[float, float] = DEFAULT_K_RANGE,
) -> Tuple[np.ndarray, np.ndarray]:
    """Uniform balance grid on ``[0, 1]`` and log-spaced gain grid."""
    betas = np.linspace(0.0, 1.0, beta_points)
    gains = np.logspace(np.log10(k_range[0]), np.log10(k_range[1]), k_points)
    return betas, gains


def _column(
    args: Tuple[MixedFeedbackParams, float, Sequence[float], float, float, Optional[Saturation]]
) -> Tuple[float, float, List[RegionLabel]]:
    params, beta, gains, rate, r, saturation = args
    sector = 1.0 if saturation is None else saturation.max_slope
    low = k0(beta, params, sector)
    try:
        high = k2(beta, rate, params, sector)
    except PreconditionFailed:
        high = math.nan
    labels = [
        classify_region(
            params.with_gain(float(k), beta), rate, r, saturation, bounds=(low, high)
        )
        for k in gains
    ]
    return low, high, labels


def _worker_count(workers: Optional[int]) -> int:
    if workers is not None:
        return max(1, workers)
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError as exc:
        raise InvalidInput(f"{WORKERS_ENV} must be an integer, got {raw!r}") from exc


def dominance_map(
    params: MixedFeedbackParams,
    betas: Sequence[float],
    gains: Sequence[float],
    rate: float,
    r: float = 0.0,
    saturation: Optional[Saturation] = None,
    workers: Optional[int] = None,
) -> DominanceMap:
    """Label every point of the ``(k, beta)`` grid.

    Columns (fixed beta) are independent; with more than one worker they are
    farmed out to a process pool in batches and merged by grid index.

    Args:
        params: Supplies the plant and time constants; ``k`` and ``beta`` are ignored.
        betas: Balance grid, at least two points in ``[0, 1]``.
        gains: Gain grid, at least two positive points.
        rate: Rate for 2-dominance.
        r: Constant reference.
        saturation: The actuation stage.
        workers: Worker processes; defaults to ``$MIXFB_WORKERS`` or 1.

    Raises:
        InvalidInput: If a grid has fewer than two points or leaves its range.

    Returns:
        The labelled map with its boundary curves.
    """
    betas = np.asarray(betas, dtype=float)
    gains = np.asarray(gains, dtype=float)
    if betas.size < 2 or gains.size < 2:
        raise InvalidInput("Map grids need at least two points each")
    if np.any((betas < 0) | (betas > 1)) or np.any(gains <= 0):
        raise InvalidInput("Balances must lie in [0, 1] and gains must be positive")
    jobs = [(params, float(b), gains, rate, r, saturation) for b in betas]
    n_workers = _worker_count(workers)
    logger.debug("Mapping %d x %d grid on %d worker(s)", betas.size, gains.size, n_workers)
    if n_workers == 1:
        columns = [_column(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            batches = [
                pool.map(_column, batch) for batch in partition_all(_BATCH, jobs)
            ]
            columns = list(concat(batches))
    return DominanceMap(
        betas=betas,
        gains=gains,
        labels=[col[2] for col in columns],
        k0=np.array([col[0] for col in columns]),
        k2=np.array([col[1] for col in columns]),
        rate=rate,
        r=r,
    )
