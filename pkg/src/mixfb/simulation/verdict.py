"""Classify traces as converged, oscillating or switched between equilibria."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np
from pyheck import snake
from scipy.signal import find_peaks

from mixfb.error import InvalidInput
from mixfb.simulation.integrate import SimTrace

MIN_DURATION = 20.0
PEAK_PROMINENCE = 1e-3
MIN_PEAKS = 6
MAX_PERIOD_CV = 0.05
AMPLITUDE_DRIFT = 0.1
SETTLE_TOL = 1e-3
TERMINAL_FRACTION = 0.1
SETTLED_FRACTION = 0.25
SWITCH_TOL = 1e-2


class VerdictKind(Enum):
    """Qualitative behaviour of a trace."""

    Converged = "converged"
    Oscillating = "oscillating"
    SwitchedEquilibrium = "switched_equilibrium"
    Undetermined = "undetermined"


@dataclass(frozen=True)
class OscillationVerdict:
    """Outcome of :func:`classify_trace`.

    Attributes:
        kind: The verdict.
        value: Settled output for ``Converged``.
        amplitude: Peak-to-peak amplitude for ``Oscillating``.
        period: Mean inter-peak interval for ``Oscillating``.
        old: Settled output before the last pulse for ``SwitchedEquilibrium``.
        new: Terminal settled output for ``SwitchedEquilibrium``.
        diagnostics: Peak counts, interval statistics and window bounds.
    """

    kind: VerdictKind
    value: Optional[float] = None
    amplitude: Optional[float] = None
    period: Optional[float] = None
    old: Optional[float] = None
    new: Optional[float] = None
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def summary(self) -> str:
        """One machine-parseable line, e.g. ``verdict=oscillating amplitude=... period=...``."""
        parts = [f"verdict={snake(self.kind.name)}"]
        for name in ("value", "amplitude", "period", "old", "new"):
            val = getattr(self, name)
            if val is not None:
                parts.append(f"{name}={val!r}")
        return " ".join(parts)


def settled(y: np.ndarray) -> Tuple[bool, float]:
    """Whether ``y`` stays within ``1e-3 max(1, |mean|)`` of its mean."""
    if y.size == 0:
        return False, float("nan")
    mean = float(np.mean(y))
    return bool(np.max(np.abs(y - mean)) < SETTLE_TOL * max(1.0, abs(mean))), mean


def _oscillation(
    t: np.ndarray, y: np.ndarray
) -> Tuple[Optional[OscillationVerdict], Dict[str, Any]]:
    peaks, _ = find_peaks(y, prominence=PEAK_PROMINENCE)
    diagnostics: Dict[str, Any] = {"peaks": int(peaks.size)}
    if peaks.size < MIN_PEAKS:
        return None, diagnostics
    intervals = np.diff(t[peaks])
    period = float(np.mean(intervals))
    cv = float(np.std(intervals) / period)
    diagnostics["period_cv"] = cv
    quarters = np.array_split(np.arange(t.size), 4)
    last = float(np.ptp(y[quarters[-1]]))
    previous = float(np.ptp(y[quarters[-2]]))
    drift = abs(last - previous) / max(previous, np.finfo(float).tiny)
    diagnostics["amplitude_drift"] = drift
    if cv >= MAX_PERIOD_CV or drift > AMPLITUDE_DRIFT:
        return None, diagnostics
    verdict = OscillationVerdict(
        VerdictKind.Oscillating, amplitude=last, period=period, diagnostics=diagnostics
    )
    return verdict, diagnostics


def _switch(trace: SimTrace) -> Optional[OscillationVerdict]:
    edges = [float(e) for e in trace.metadata.get("breakpoints", [])]
    onsets = [e for e in edges if trace.r[np.searchsorted(trace.t, e)] != trace.r[0]]
    if not onsets:
        return None
    t_on = onsets[-1]
    before = [e for e in edges if e < t_on]
    start = before[-1] if before else float(trace.t[0])
    gap = t_on - start
    window = (trace.t >= t_on - SETTLED_FRACTION * gap) & (trace.t < t_on)
    ok_old, old = settled(trace.y[window])
    n_tail = max(2, int(TERMINAL_FRACTION * trace.t.size))
    ok_new, new = settled(trace.y[-n_tail:])
    if not (ok_old and ok_new):
        return None
    if abs(new - old) <= SWITCH_TOL * max(1.0, abs(old), abs(new)):
        return None
    return OscillationVerdict(
        VerdictKind.SwitchedEquilibrium,
        old=old,
        new=new,
        diagnostics={"last_onset": t_on, "settled_from": t_on - SETTLED_FRACTION * gap},
    )


def classify_trace(
    trace: SimTrace,
    transient_fraction: float = 0.5,
    slow_time: Optional[float] = None,
) -> OscillationVerdict:
    """Verdict on a trace.

    A switch between settled levels around the last reference pulse wins;
    otherwise the part after the transient (and after the last reference
    edge) is tested for convergence, then for a steady oscillation.

    Args:
        trace: The trace.
        transient_fraction: Fraction of the trace discarded as transient.
        slow_time: Slowest time constant; read from the trace metadata by default.

    Raises:
        InvalidInput: If the trace is shorter than ``20 slow_time``.

    Returns:
        The verdict.
    """
    slow = float(trace.metadata.get("slow_time", 1.0) if slow_time is None else slow_time)
    if trace.duration < MIN_DURATION * slow:
        raise InvalidInput(
            f"Trace lasts {trace.duration:g}, at least {MIN_DURATION * slow:g} is needed"
        )
    if not 0 <= transient_fraction < 1:
        raise InvalidInput("transient_fraction must lie in [0, 1)")
    switched = _switch(trace)
    if switched is not None:
        return switched
    edges = trace.metadata.get("breakpoints", [])
    start = max(
        float(trace.t[0]) + transient_fraction * trace.duration,
        max(edges) if edges else float(trace.t[0]),
    )
    window = trace.t >= start
    t, y = trace.t[window], trace.y[window]
    n_tail = max(2, int(TERMINAL_FRACTION * t.size))
    ok, mean = settled(y[-n_tail:])
    if ok:
        return OscillationVerdict(
            VerdictKind.Converged, value=mean, diagnostics={"window_start": start}
        )
    verdict, diagnostics = _oscillation(t, y)
    if verdict is not None:
        return verdict
    diagnostics["window_start"] = start
    return OscillationVerdict(VerdictKind.Undetermined, diagnostics=diagnostics)
