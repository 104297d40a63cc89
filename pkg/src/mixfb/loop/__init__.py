"""The mixed-feedback controller, its saturation and the closed loop."""
from mixfb.loop.closed_loop import (
    ClosedLoopSystem,
    MixedFeedbackParams,
    assemble_closed_loop,
    kbeta_to_K,
    parametric_vertices,
    plant_ss,
    plant_tf,
    scale_plant,
)
from mixfb.loop.controller import (
    ControllerInfo,
    default_rate,
    make_controller,
    make_loop_tf,
)
from mixfb.loop.saturation import DEFAULT_SATURATION, Saturation, dphi, phi

__all__ = [
    "DEFAULT_SATURATION",
    "ClosedLoopSystem",
    "ControllerInfo",
    "MixedFeedbackParams",
    "Saturation",
    "assemble_closed_loop",
    "default_rate",
    "dphi",
    "kbeta_to_K",
    "make_controller",
    "make_loop_tf",
    "parametric_vertices",
    "phi",
    "plant_ss",
    "plant_tf",
    "scale_plant",
]
