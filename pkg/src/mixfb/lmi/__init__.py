"""Inertia-certified state-feedback synthesis with linear matrix inequalities."""
from mixfb.lmi.certificate import Certificate, VerificationReport, reverify
from mixfb.lmi.design import (
    DesignOptions,
    DesignResult,
    build_problem,
    design_2dominant,
    design_passive,
    design_precompensator,
    design_robust,
)
from mixfb.lmi.problem import (
    Block,
    Constraint,
    LMIProblem,
    LMISolution,
    solve_feasibility,
)
from mixfb.lmi.verify import gain_floor, verify_p_gain, verify_passivity

__all__ = [
    "Block",
    "Certificate",
    "Constraint",
    "DesignOptions",
    "DesignResult",
    "LMIProblem",
    "LMISolution",
    "VerificationReport",
    "build_problem",
    "design_2dominant",
    "design_passive",
    "design_precompensator",
    "design_robust",
    "gain_floor",
    "reverify",
    "solve_feasibility",
    "verify_p_gain",
    "verify_passivity",
]
