import math

import numpy as np
from mixfb.analysis import (
    CircleFailure,
    DominanceCertificate,
    RegionLabel,
    circle_criterion,
    classify_region,
    find_equilibria,
    k0,
    k2,
    root_locus,
)
from mixfb.error import InvalidInput, PreconditionFailed
from mixfb.lti import TransferFunction
from mixfb.loop import MixedFeedbackParams, Saturation, make_loop_tf
from pytest import fixture, mark, raises

pytestmark = mark.unit

RATE = 50.0


@fixture(scope="module")
def params() -> MixedFeedbackParams:
    lag = TransferFunction.from_coeffs([1.0], [1.0, 0.01])
    return MixedFeedbackParams(k=5.0, beta=0.4, tau_p=0.1, tau_n=1.0, plant=lag)


def test_k0_at_pure_positive_feedback(params: MixedFeedbackParams) -> None:
    assert math.isclose(k0(1.0, params), 1.0, rel_tol=1e-6)


def test_k0_at_pure_negative_feedback(params: MixedFeedbackParams) -> None:
    assert math.isclose(k0(0.0, params), 122.2, rel_tol=1e-3)


def test_k0_ordering(params: MixedFeedbackParams) -> None:
    assert k0(0.2, params) > 5.0
    assert k0(0.4, params) < 5.0
    assert k0(0.8, params) < 5.0


def test_k0_brackets_circle_test(params: MixedFeedbackParams) -> None:
    for beta in (0.0, 0.2, 0.6, 1.0):
        bound = k0(beta, params)
        below = circle_criterion(make_loop_tf(params.with_gain(0.99 * bound, beta)), 0.0)
        above = circle_criterion(make_loop_tf(params.with_gain(1.01 * bound, beta)), 0.0)
        assert isinstance(below, DominanceCertificate)
        assert below.p == 0
        assert isinstance(above, CircleFailure)


def test_k2_needs_two_slow_poles(params: MixedFeedbackParams) -> None:
    with raises(PreconditionFailed):
        k2(0.4, 5.0, params)


def test_k2_unbounded_for_positive_balance(params: MixedFeedbackParams) -> None:
    assert k2(0.4, RATE, params) == math.inf
    assert k2(0.8, RATE, params) == math.inf


def test_k2_finite_for_pure_negative_feedback(params: MixedFeedbackParams) -> None:
    bound = k2(0.0, RATE, params)
    assert 10.0 < bound < 100.0


def test_circle_certificate_counts_slow_poles(params: MixedFeedbackParams) -> None:
    result = circle_criterion(make_loop_tf(params), RATE)
    assert isinstance(result, DominanceCertificate)
    assert result.p == 2
    assert result.method == "circle"
    assert result.margin > 0


def test_circle_rejects_bad_sector(params: MixedFeedbackParams) -> None:
    with raises(InvalidInput):
        circle_criterion(make_loop_tf(params), RATE, sector=0.0)


def test_bistable_equilibria(params: MixedFeedbackParams) -> None:
    equilibria = find_equilibria(params.with_gain(5.0, 0.8))
    assert len(equilibria) == 3
    low, mid, high = equilibria
    assert abs(mid.y) < 1e-9
    assert not mid.stable
    assert math.isclose(high.y, 2.9847, abs_tol=1e-3)
    assert math.isclose(low.y, -high.y, abs_tol=1e-9)
    assert low.stable and high.stable


def test_single_unstable_equilibrium(params: MixedFeedbackParams) -> None:
    equilibria = find_equilibria(params)
    assert len(equilibria) == 1
    assert not equilibria[0].stable
    assert equilibria[0].max_real > 0


def test_equilibria_under_constant_reference(params: MixedFeedbackParams) -> None:
    sat = Saturation()
    point = params.with_gain(5.0, 0.8)
    g = point.loop_dc_gain
    for eq in find_equilibria(point, r=0.3):
        assert math.isclose(eq.y, g * (sat(eq.y) - 0.3), abs_tol=1e-9)


def test_region_labels(params: MixedFeedbackParams) -> None:
    assert classify_region(params.with_gain(5.0, 0.2), RATE) == RegionLabel.ZeroDominant
    assert classify_region(params.with_gain(5.0, 0.4), RATE) == RegionLabel.Oscillation
    assert (
        classify_region(params.with_gain(5.0, 0.8), RATE)
        == RegionLabel.OscillationPlusFixedPoints
    )


def test_region_without_rate_split(params: MixedFeedbackParams) -> None:
    assert classify_region(params.with_gain(5.0, 0.4), 5.0) == RegionLabel.NoCertificate


def test_root_locus_starts_at_open_loop(params: MixedFeedbackParams) -> None:
    locus = root_locus(0.4, params, [0.0, 5.0])
    assert np.allclose(np.sort(locus.eigenvalues[0].real), [-100.0, -10.0, -1.0])
    assert locus.count_right_of(0.0).tolist() == [0, 2]
    assert locus.rightmost()[1] > 0


def test_root_locus_rejects_descending_grid(params: MixedFeedbackParams) -> None:
    with raises(InvalidInput):
        root_locus(0.4, params, [5.0, 1.0])
    with raises(InvalidInput):
        root_locus(0.4, params, [1.0, 5.0], slope=2.0)


def test_gain_at_k0_counts_as_zero_dominant(params: MixedFeedbackParams) -> None:
    low = k0(0.4, params)
    bounds = (low, math.inf)
    for k in (low * (1 - 1e-10), low, low * (1 + 1e-10)):
        label = classify_region(params.with_gain(k, 0.4), RATE, bounds=bounds)
        assert label == RegionLabel.ZeroDominant, k
    above = classify_region(params.with_gain(1.01 * low, 0.4), RATE, bounds=bounds)
    assert above != RegionLabel.ZeroDominant


@mark.slow
@mark.parametrize(
    ("beta", "rate"), [(0.0, 0.0), (0.2, 0.0), (0.6, 0.0), (1.0, 0.0), (0.0, RATE)]
)
def test_gain_bounds_match_dense_circle_sweep(
    params: MixedFeedbackParams, beta: float, rate: float
) -> None:
    gains = 0.25 * np.arange(1, 1201)
    bound = k0(beta, params) if rate == 0 else k2(beta, rate, params)
    passed, failed = [], []
    for k in gains:
        result = circle_criterion(make_loop_tf(params.with_gain(k, beta)), rate)
        if isinstance(result, DominanceCertificate):
            assert result.p == (0 if rate == 0 else 2)
            passed.append(k)
        else:
            failed.append(k)
    assert failed and max(passed) < min(failed)
    assert min(failed) - 0.25 <= bound <= min(failed) * (1 + 1e-6)
