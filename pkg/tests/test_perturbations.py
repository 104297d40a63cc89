"""Robustness of the oscillating lag design to fast plant perturbations."""
import numpy as np
from mixfb.analysis import dominance_margin, perturbed_certificate
from mixfb.config import Config
from mixfb.lti import TransferFunction, frequency_grid, shifted_sup_mag
from mixfb.loop import MixedFeedbackParams, make_controller
from pytest import fixture

RATE = 50.0


@fixture(scope="module")
def params(configs) -> MixedFeedbackParams:
    return Config.from_path(configs / "lag_oscillating.json").params()


@fixture(scope="module")
def margin(params: MixedFeedbackParams) -> float:
    return dominance_margin(params, RATE)


def _random_fast_delta(rng: np.random.Generator) -> TransferFunction:
    a, b = rng.uniform(60.0, 500.0, size=2)
    if rng.random() < 0.5:
        return TransferFunction.from_coeffs([rng.choice([-1.0, 1.0]) * a], [a, 1.0])
    return TransferFunction.from_coeffs([rng.normal() * a * b], [a * b, a + b, 1.0])


def _scaled(delta: TransferFunction, params: MixedFeedbackParams, radius: float):
    controller = make_controller(params.k, params.beta, params.tau_p, params.tau_n).tf
    size = shifted_sup_mag(controller * delta, RATE)
    return delta * (radius / size)


def test_margin_is_grid_independent(params: MixedFeedbackParams, margin: float) -> None:
    dense = dominance_margin(params, RATE, frequency_grid(1e-4, 1e6, 40_000))
    assert abs(dense - margin) <= 1e-3


def test_perturbations_inside_margin_keep_certificate(
    params: MixedFeedbackParams, margin: float
) -> None:
    rng = np.random.default_rng(0)
    for _ in range(20):
        delta = _scaled(_random_fast_delta(rng), params, 0.5 * margin)
        assert perturbed_certificate(params, RATE, delta).p == 2
