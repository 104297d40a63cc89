"""Design, certify and simulate mixed-feedback oscillators."""
from mixfb import error, utils
from mixfb.analysis import (
    DominanceCertificate,
    RegionLabel,
    circle_criterion,
    dominance_map,
    find_equilibria,
    k0,
    k2,
)
from mixfb.cable import CableParams, cable_ss, cable_tf, interconnect
from mixfb.config import Config
from mixfb.lmi import Certificate, DesignOptions, design_2dominant, design_passive, design_robust
from mixfb.loop import ClosedLoopSystem, MixedFeedbackParams, Saturation, assemble_closed_loop
from mixfb.pytest_plugin import design_fixture, scenario_fixture
from mixfb.simulation import OscillationVerdict, classify_trace, integrate

__version__ = "0.1.0"

__all__ = [
    "CableParams",
    "Certificate",
    "ClosedLoopSystem",
    "Config",
    "DesignOptions",
    "DominanceCertificate",
    "MixedFeedbackParams",
    "OscillationVerdict",
    "RegionLabel",
    "Saturation",
    "assemble_closed_loop",
    "cable_ss",
    "cable_tf",
    "circle_criterion",
    "classify_trace",
    "design_2dominant",
    "design_fixture",
    "design_passive",
    "design_robust",
    "dominance_map",
    "error",
    "find_equilibria",
    "interconnect",
    "integrate",
    "k0",
    "k2",
    "scenario_fixture",
    "utils",
]
