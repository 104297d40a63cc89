"""Closed-loop simulation, reference signals and trace verdicts."""
from mixfb.simulation.integrate import SimTrace, integrate, max_step
from mixfb.simulation.reference import (
    ConstantReference,
    Pulse,
    PulseTrain,
    Reference,
    bistability_probe,
)
from mixfb.simulation.verdict import OscillationVerdict, VerdictKind, classify_trace

__all__ = [
    "ConstantReference",
    "OscillationVerdict",
    "Pulse",
    "PulseTrain",
    "Reference",
    "SimTrace",
    "VerdictKind",
    "bistability_probe",
    "classify_trace",
    "integrate",
    "max_step",
]
