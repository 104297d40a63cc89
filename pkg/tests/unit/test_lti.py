import numpy as np
from mixfb.error import InvalidInput, NumericalSingularity, ShiftedAxisPole
from mixfb.lti import (
    Polynomial,
    StateSpace,
    TransferFunction,
    count_poles_right_of,
    dc_gain,
    eig_general,
    eig_symmetric,
    freq_response,
    is_hurwitz,
    parallel,
    poly_roots,
    series,
    shifted_min_real,
    shifted_sup_mag,
    ss_to_tf,
    tf_to_ss,
)
from numpy.polynomial import polynomial as npoly
from pytest import mark, raises
from scipy.optimize import linear_sum_assignment

pytestmark = mark.unit

# Y of the nominal lag design, as printed to four digits.
REFERENCE_Y = np.array(
    [
        [0.3788, -0.8923, -0.2650],
        [-0.8923, -0.5368, -0.2545],
        [-0.2650, -0.2545, -0.2053],
    ]
)


def test_roots_of_lag_product() -> None:
    p = Polynomial.from_roots([-100.0, -10.0, -1.0])
    assert np.allclose(poly_roots(p), [-100.0, -10.0, -1.0])


def test_zero_polynomial_has_no_roots() -> None:
    with raises(InvalidInput):
        poly_roots(Polynomial([0.0]))


def test_constant_polynomial_has_no_roots() -> None:
    assert poly_roots(Polynomial([3.0])).size == 0


def test_trailing_zeros_trimmed() -> None:
    assert Polynomial([1.0, 2.0, 0.0, 0.0]).degree == 1


def test_random_roots_come_in_conjugate_pairs() -> None:
    rng = np.random.default_rng(0)
    for _ in range(200):
        degree = int(rng.integers(1, 8))
        p = Polynomial(np.append(rng.standard_normal(degree), 1.0))
        roots = poly_roots(p)
        assert len(roots) == p.degree
        assert np.allclose(np.sort_complex(roots), np.sort_complex(roots.conj()), atol=1e-6)
        assert np.allclose(p(roots), 0.0, atol=1e-6 * max(1.0, np.max(np.abs(p.coeffs))))


def test_eig_general_sorted_by_real_part() -> None:
    A = np.array([[-1.0, 0.0, 0.0], [0.0, -100.0, 0.0], [0.0, 0.0, -10.0]])
    assert np.allclose(eig_general(A), [-100.0, -10.0, -1.0])


def _char_poly(A: np.ndarray) -> np.ndarray:
    """Ascending coefficients of ``det(s I - A)`` by cofactor expansion along the first row."""
    n = A.shape[0]
    entries = [[np.array([-A[i, j], 1.0 if i == j else 0.0]) for j in range(n)] for i in range(n)]

    def det(rows, cols):
        if len(rows) == 1:
            return entries[rows[0]][cols[0]]
        total = np.zeros(1)
        for k, c in enumerate(cols):
            minor = det(rows[1:], cols[:k] + cols[k + 1 :])
            term = npoly.polymul(entries[rows[0]][c], minor)
            total = npoly.polyadd(total, term) if k % 2 == 0 else npoly.polysub(total, term)
        return total

    return det(list(range(n)), list(range(n)))


def _matched_error(found: np.ndarray, expected: np.ndarray) -> float:
    cost = np.abs(found[:, None] - expected[None, :])
    rows, cols = linear_sum_assignment(cost)
    scale = np.maximum(1.0, np.abs(expected[cols]))
    return float(np.max(cost[rows, cols] / scale))


def test_eigenvalues_match_characteristic_polynomial() -> None:
    rng = np.random.default_rng(7)
    for _ in range(200):
        n = int(rng.integers(1, 7))
        A = rng.standard_normal((n, n))
        expected = poly_roots(Polynomial(_char_poly(A)))
        found = eig_general(A)
        assert len(found) == n
        assert _matched_error(found, expected) <= 1e-7, A


def test_roots_match_prescribed_roots() -> None:
    rng = np.random.default_rng(11)
    for _ in range(200):
        pairs = int(rng.integers(0, 4))
        real = rng.standard_normal(int(rng.integers(0 if pairs else 1, 7 - 2 * pairs)))
        centers = rng.standard_normal(pairs) + 1j * rng.uniform(0.1, 2.0, pairs)
        roots = np.concatenate([real, centers, centers.conj()])
        found = poly_roots(Polynomial.from_roots(roots))
        assert len(found) == len(roots)
        assert _matched_error(found, roots) <= 1e-7, roots


def test_eig_general_rejects_non_square() -> None:
    with raises(InvalidInput):
        eig_general(np.zeros((2, 3)))


def test_inertia_of_reference_y() -> None:
    _, inertia = eig_symmetric(REFERENCE_Y)
    assert inertia == (2, 0, 1)


def test_inertia_counts_zero() -> None:
    _, inertia = eig_symmetric(np.diag([-1.0, 0.0, 2.0]))
    assert inertia == (1, 1, 1)


def test_eig_symmetric_rejects_asymmetric() -> None:
    with raises(InvalidInput):
        eig_symmetric(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_inertia_invariant_under_congruence() -> None:
    rng = np.random.default_rng(1)
    for _ in range(100):
        n = int(rng.integers(2, 6))
        signs = rng.choice([-1.0, 1.0], size=n)
        S = np.diag(signs * rng.uniform(0.5, 2.0, size=n))
        T = rng.standard_normal((n, n)) + 3 * np.eye(n)
        if abs(np.linalg.det(T)) < 1e-3:
            continue
        _, before = eig_symmetric(S)
        _, after = eig_symmetric(T.T @ S @ T)
        assert before == after


def test_tf_ss_transfer_agrees() -> None:
    g = TransferFunction.from_coeffs([2.0, 1.0], [1.0, 0.3, 0.02])
    sys = tf_to_ss(g)
    for s in (1j, 0.5 + 2j, -3 + 0.1j):
        assert np.isclose(sys(s)[0, 0], g(s))
    assert ss_to_tf(sys).allclose(g)


def test_improper_tf_cannot_be_realized() -> None:
    with raises(InvalidInput):
        tf_to_ss(TransferFunction.from_coeffs([0.0, 0.0, 1.0], [1.0, 1.0]))


def test_series_and_parallel() -> None:
    a = TransferFunction.from_coeffs([1.0], [1.0, 1.0])
    b = TransferFunction.from_coeffs([2.0], [10.0, 1.0])
    s = 0.3 + 1.7j
    assert np.isclose(series(a, b)(s), a(s) * b(s))
    mixed = series(tf_to_ss(a), b)
    assert isinstance(mixed, StateSpace)
    assert np.isclose(mixed(s)[0, 0], a(s) * b(s))
    assert np.isclose(parallel(a, b, (1.0, -1.0))(s), a(s) - b(s))


def test_dc_gain_of_lag() -> None:
    assert dc_gain(TransferFunction.from_coeffs([3.0], [1.0, 0.01])) == 3.0
    assert np.isclose(dc_gain(StateSpace(-2.0, 1.0, 4.0, 0.5)), 2.5)


def test_freq_response_scalar_and_array() -> None:
    g = TransferFunction.from_coeffs([1.0], [1.0, 1.0])
    assert freq_response(g, 0.0) == 1.0
    values = freq_response(g, np.array([0.0, 1.0]), lam=0.5)
    assert values.shape == (2,)
    assert np.isclose(values[0], 2.0)


def test_freq_response_at_pole() -> None:
    g = TransferFunction.from_coeffs([1.0], [1.0, 1.0])
    with raises(NumericalSingularity):
        freq_response(g, 0.0, lam=1.0)


def test_shifted_min_real_of_lag() -> None:
    g = TransferFunction.from_coeffs([-1.0], [1.0, 1.0])
    w, m = shifted_min_real(g)
    assert w == 0.0
    assert np.isclose(m, -1.0)


def test_shifted_min_real_refines_interior_minimum() -> None:
    g = TransferFunction.from_coeffs([1.0], [1.0, 1.01, 0.01])
    _, m = shifted_min_real(g)
    dense = np.linspace(1.0, 100.0, 200_001)
    assert m <= float(np.min(freq_response(g, dense).real)) + 1e-9


def test_shifted_sup_mag() -> None:
    g = TransferFunction.from_coeffs([1.0], [2.0, 1.0])
    assert np.isclose(shifted_sup_mag(g), 0.5)
    assert np.isclose(shifted_sup_mag(g, lam=1.0), 1.0)


def test_golden_refinement_on_coarse_grid() -> None:
    zeta = 0.01
    g = TransferFunction.from_coeffs([1.0], [1.0, 2 * zeta, 1.0])
    peak = 1.0 / (2 * zeta * np.sqrt(1 - zeta**2))
    assert np.isclose(shifted_sup_mag(g, 0.0, np.logspace(-1, 1, 21)), peak, rtol=1e-7)


def test_pole_on_shifted_axis() -> None:
    g = TransferFunction.from_coeffs([1.0], [10.0, 1.0])
    with raises(ShiftedAxisPole):
        shifted_min_real(g, lam=10.0)
    with raises(ShiftedAxisPole):
        count_poles_right_of(g, -10.0)


def test_count_poles_right_of() -> None:
    g = TransferFunction(Polynomial([1.0]), Polynomial.from_roots([-100.0, -10.0, -1.0]))
    assert count_poles_right_of(g, -50.0) == 2
    assert count_poles_right_of(g, -5.0) == 1
    assert is_hurwitz(g)
    assert not is_hurwitz(g, rate=5.0)
