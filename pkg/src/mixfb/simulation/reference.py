"""Right-continuous piecewise-constant reference signals."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple, Union

import numpy as np

from mixfb.error import InvalidInput

PROBE_AMPLITUDE = 2.0
PROBE_FIRST = 20.0
PROBE_DURATION = 5.0
PROBE_GAP = 20.0


@dataclass(frozen=True)
class ConstantReference:
    """``r(t) = value``."""

    value: float = 0.0

    def __call__(self, t: float) -> float:
        return self.value

    def breakpoints(self, horizon: float) -> List[float]:
        """Discontinuities inside ``(0, horizon)``; none for a constant."""
        return []

    def to_dict(self) -> dict:
        return {"constant": self.value}


@dataclass(frozen=True)
class Pulse:
    """``amplitude`` on ``[start, start + duration)``."""

    amplitude: float
    start: float
    duration: float

    @property
    def end(self) -> float:
        return self.start + self.duration


@dataclass(frozen=True)
class PulseTrain:
    """A sum of non-overlapping pulses on top of a constant offset.

    Attributes:
        pulses: The pulses, in any order.
        offset: Value outside every pulse.

    Raises:
        InvalidInput: If two pulses overlap or a duration is not positive.
    """

    pulses: Tuple[Pulse, ...] = field(default_factory=tuple)
    offset: float = 0.0

    def __post_init__(self) -> None:
        ordered = tuple(sorted(self.pulses, key=lambda p: p.start))
        for p in ordered:
            if not p.duration > 0:
                raise InvalidInput(f"Pulse at t={p.start} has non-positive duration")
            if p.start < 0:
                raise InvalidInput(f"Pulse starts before t=0: {p.start}")
        for a, b in zip(ordered, ordered[1:]):
            if b.start < a.end:
                raise InvalidInput(f"Pulses at t={a.start} and t={b.start} overlap")
        object.__setattr__(self, "pulses", ordered)

    @classmethod
    def from_lists(
        cls,
        amplitudes: Sequence[float],
        starts: Sequence[float],
        durations: Sequence[float],
        offset: float = 0.0,
    ) -> PulseTrain:
        """Build from parallel lists."""
        if not len(amplitudes) == len(starts) == len(durations):
            raise InvalidInput("Pulse amplitudes, starts and durations differ in length")
        return cls(
            tuple(
                Pulse(float(a), float(s), float(d))
                for a, s, d in zip(amplitudes, starts, durations)
            ),
            offset,
        )

    def __call__(self, t: float) -> float:
        for p in self.pulses:
            if p.start <= t < p.end:
                return self.offset + p.amplitude
        return self.offset

    def breakpoints(self, horizon: float) -> List[float]:
        """Pulse edges inside ``(0, horizon)``, ascending."""
        edges = sorted({e for p in self.pulses for e in (p.start, p.end)})
        return [e for e in edges if 0 < e < horizon]

    def onsets(self) -> List[float]:
        """Start times of the pulses."""
        return [p.start for p in self.pulses]

    def to_dict(self) -> dict:
        return {
            "pulses": [
                {"amplitude": p.amplitude, "start": p.start, "duration": p.duration}
                for p in self.pulses
            ],
            "offset": self.offset,
        }


Reference = Union[ConstantReference, PulseTrain]


def bistability_probe(slow_time: float, amplitude: float = PROBE_AMPLITUDE) -> PulseTrain:
    """``+amplitude`` then ``-amplitude`` pulses of ``5 slow_time``, ``20 slow_time`` apart.

    The first pulse starts at ``20 slow_time``.
    """
    first = PROBE_FIRST * slow_time
    duration = PROBE_DURATION * slow_time
    second = first + duration + PROBE_GAP * slow_time
    return PulseTrain(
        (Pulse(amplitude, first, duration), Pulse(-amplitude, second, duration))
    )


def sample(reference: Reference, t: np.ndarray) -> np.ndarray:
    """Reference values on a time grid."""
    return np.array([reference(float(ti)) for ti in t])
