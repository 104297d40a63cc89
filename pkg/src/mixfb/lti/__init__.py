"""Numerical kernels for SISO LTI systems."""
from mixfb.lti.frequency import (
    count_poles_right_of,
    freq_response,
    frequency_grid,
    is_hurwitz,
    shifted_min_ratio,
    shifted_min_real,
    shifted_sup_mag,
)
from mixfb.lti.linalg import Inertia, eig_general, eig_symmetric, max_eig
from mixfb.lti.polynomial import Polynomial, poly_roots
from mixfb.lti.systems import (
    LTI,
    StateSpace,
    TransferFunction,
    dc_gain,
    negate,
    parallel,
    series,
    ss_to_tf,
    tf_to_ss,
)

__all__ = [
    "LTI",
    "Inertia",
    "Polynomial",
    "StateSpace",
    "TransferFunction",
    "count_poles_right_of",
    "dc_gain",
    "eig_general",
    "eig_symmetric",
    "freq_response",
    "frequency_grid",
    "is_hurwitz",
    "max_eig",
    "negate",
    "parallel",
    "poly_roots",
    "series",
    "shifted_min_ratio",
    "shifted_min_real",
    "shifted_sup_mag",
    "ss_to_tf",
    "tf_to_ss",
]
