import math

import numpy as np
from mixfb.analysis import (
    dominance_margin,
    find_equilibria,
    instability_gain,
    perturbed_certificate,
    perturbed_equilibria,
    robustness_report,
    uncertainty_weight,
)
from mixfb.error import InvalidInput, PreconditionFailed
from mixfb.lti import TransferFunction, freq_response
from mixfb.loop import MixedFeedbackParams, assemble_closed_loop, make_controller
from pytest import fixture, mark, raises

pytestmark = mark.unit

RATE = 50.0


@fixture(scope="module")
def params() -> MixedFeedbackParams:
    lag = TransferFunction.from_coeffs([1.0], [1.0, 0.01])
    return MixedFeedbackParams(k=5.0, beta=0.4, tau_p=0.1, tau_n=1.0, plant=lag)


def test_margin_of_oscillating_design(params: MixedFeedbackParams) -> None:
    assert dominance_margin(params, RATE) >= 0.93


def test_margin_needs_nominal_certificate(params: MixedFeedbackParams) -> None:
    with raises(PreconditionFailed):
        dominance_margin(params, 5.0)


def test_weight_vanishes_at_zero_radius(params: MixedFeedbackParams) -> None:
    weight = uncertainty_weight(params, RATE, 0.0, np.logspace(-1, 3, 20))
    assert np.all(weight == 0.0)


def test_weight_is_radius_over_controller(params: MixedFeedbackParams) -> None:
    omega = np.logspace(-1, 3, 20)
    weight = uncertainty_weight(params, RATE, 0.5, omega)
    controller = make_controller(5.0, 0.4, 0.1, 1.0).tf
    assert np.allclose(weight, 0.5 / np.abs(freq_response(controller, omega, RATE)))


def test_weight_radius_above_margin(params: MixedFeedbackParams) -> None:
    margin = dominance_margin(params, RATE)
    with raises(PreconditionFailed):
        uncertainty_weight(params, RATE, margin + 0.1)
    with raises(InvalidInput):
        uncertainty_weight(params, RATE, -0.1)


def test_fast_perturbation_keeps_certificate(params: MixedFeedbackParams) -> None:
    delta = TransferFunction.from_coeffs([1.0], [60.0, 1.0])
    cert = perturbed_certificate(params, RATE, delta)
    assert cert.p == 2


def test_slow_perturbation_rejected(params: MixedFeedbackParams) -> None:
    delta = TransferFunction.from_coeffs([1.0], [10.0, 1.0])
    with raises(InvalidInput):
        perturbed_certificate(params, RATE, delta)


def test_report_defaults_to_margin(params: MixedFeedbackParams) -> None:
    omega = np.logspace(0, 2, 5)
    report = robustness_report(params, RATE, omega=omega)
    assert report.omega.shape == report.weight.shape == (5,)
    assert report.delta_max == dominance_margin(params, RATE, omega)
    assert np.allclose(report.weight, uncertainty_weight(params, RATE, report.delta_max, omega))
    assert report.instability is None
    assert report.perturbed == []


def test_report_instability_and_dc_shift(params: MixedFeedbackParams) -> None:
    system = assemble_closed_loop(params, uncertainty_ports=True)
    ports = (system.B2, system.C2)
    report = robustness_report(params, RATE, ports=ports, declared_gain=1e-6, delta0=0.5)
    assert report.instability is not None
    assert report.instability.unstable == 2
    assert report.instability.preserved
    origin = instability_gain(system.jacobian(np.zeros(3)), *ports)
    assert math.isclose(report.instability.gamma, origin.gamma, rel_tol=1e-9)
    assert [eq.y for eq in report.perturbed] == [eq.y for eq in perturbed_equilibria(params, 0.5)]


def test_instability_gain_without_ports() -> None:
    result = instability_gain(np.diag([1.0, -2.0]), np.zeros(2), np.ones(2), declared_gain=5.0)
    assert result.gamma == 0.0
    assert result.unstable == 1
    assert result.preserved


def test_instability_gain_of_mixed_modes() -> None:
    result = instability_gain(np.diag([1.0, -2.0]), np.ones(2), np.ones(2), declared_gain=1.0)
    assert 0.71 < result.gamma < 0.72
    assert result.preserved


def test_instability_gain_certified_by_lmi() -> None:
    result = instability_gain(np.diag([1.0, -2.0]), np.ones(2), np.ones(2), certify=True)
    assert result.certified_gamma is not None
    assert result.gamma <= result.certified_gamma <= 1.01 * result.gamma


def test_instability_gain_needs_hyperbolic_point() -> None:
    with raises(PreconditionFailed):
        instability_gain(np.diag([0.0, -2.0]), np.ones(2), np.ones(2))


def test_zero_dc_perturbation_is_nominal(params: MixedFeedbackParams) -> None:
    point = params.with_gain(5.0, 0.8)
    nominal = [eq.y for eq in find_equilibria(point)]
    shifted = [eq.y for eq in perturbed_equilibria(point, 0.0)]
    assert nominal == shifted


def test_dc_perturbation_changes_equilibrium_count(params: MixedFeedbackParams) -> None:
    point = params.with_gain(5.0, 0.8)
    assert len(perturbed_equilibria(point, -2.5)) == 3
    single = perturbed_equilibria(point, -4.5)
    assert len(single) == 1
    assert math.isclose(single[0].y, 0.0, abs_tol=1e-9)


def test_dc_perturbation_needs_loop_gain(params: MixedFeedbackParams) -> None:
    with raises(InvalidInput):
        perturbed_equilibria(params.with_gain(0.0, 0.8), 1.0)
