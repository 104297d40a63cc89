from dataclasses import replace

import numpy as np
from mixfb.error import (
    InertiaMismatch,
    Infeasible,
    InvalidInput,
    PreconditionFailed,
    ResidualViolation,
    UncontrollablePair,
)
from mixfb.lmi import (
    Block,
    Certificate,
    Constraint,
    DesignOptions,
    LMIProblem,
    design_2dominant,
    design_precompensator,
    design_robust,
    reverify,
    solve_feasibility,
    verify_p_gain,
    verify_passivity,
)
from mixfb.lti import Inertia, eig_general, eig_symmetric, max_eig
from pytest import fixture, mark, raises

pytestmark = mark.unit

A = np.array([[-100.0, 0.0, 0.0], [10.0, -10.0, 0.0], [1.0, 0.0, -1.0]])
B1 = np.array([[100.0], [0.0], [0.0]])
B2 = np.array([[0.0], [10.0], [1.0]])
C1 = np.array([[1.0, 0.0, 0.0]])
RATE = 50.0


def _scalar_problem(build) -> LMIProblem:
    return LMIProblem(
        blocks=[Block("Y", 1, 1, symmetric=True)],
        constraints=[Constraint("c", build, 1)],
        epsilon=1e-6,
    )


def test_scalar_problem() -> None:
    solution = solve_feasibility(_scalar_problem(lambda v, stack: v["Y"] + np.eye(1)))
    assert solution["Y"][0, 0] <= -1.0 - 1e-6
    assert solution.max_residual <= 0


def test_constant_problem_is_infeasible() -> None:
    with raises(Infeasible) as excinfo:
        solve_feasibility(_scalar_problem(lambda v, stack: 0.0 * v["Y"] + np.eye(1)))
    assert excinfo.value.best_residual > 0


def test_feasible_band_narrower_than_two_margins() -> None:
    # Y must sit in [-2e-6, -1e-6]
    problem = LMIProblem(
        blocks=[Block("Y", 1, 1, symmetric=True)],
        constraints=[
            Constraint("upper", lambda v, stack: v["Y"], 1),
            Constraint("lower", lambda v, stack: -v["Y"] - 3e-6 * np.eye(1), 1),
        ],
        epsilon=1e-6,
    )
    solution = solve_feasibility(problem)
    assert -2e-6 - 1e-8 <= solution["Y"][0, 0] <= -1e-6 + 1e-8
    assert solution.margin <= -1e-6


def _padded(v, stack):
    zero = np.zeros((1, 1))
    return stack([[v["Y"] - np.eye(1), zero], [zero, zero]])


def test_margin_on_leading_block_only() -> None:
    blocks = [Block("Y", 1, 1, symmetric=True)]
    solution = solve_feasibility(LMIProblem(blocks, [Constraint("c", _padded, 2, strict=1)], 1e-6))
    assert solution["Y"][0, 0] <= 1.0 - 1e-6
    assert solution.max_residual <= 1e-7
    with raises(Infeasible) as excinfo:
        solve_feasibility(LMIProblem(blocks, [Constraint("c", _padded, 2)], 1e-6))
    assert excinfo.value.best_residual > 0
    with raises(InvalidInput):
        LMIProblem(blocks, [Constraint("c", _padded, 2, strict=3)], 1e-6)


def test_non_affine_constraint_rejected() -> None:
    with raises(InvalidInput):
        _scalar_problem(lambda v, stack: v["Y"] @ v["Y"])


def test_problem_validation() -> None:
    with raises(InvalidInput):
        Block("Y", 2, 3, symmetric=True)
    with raises(InvalidInput):
        LMIProblem(blocks=[Block("Y", 1, 1)], constraints=[], epsilon=1e-6)
    with raises(InvalidInput):
        LMIProblem(
            blocks=[Block("Y", 1, 1)],
            constraints=[Constraint("c", lambda v, stack: v["Y"], 1)],
            epsilon=0.0,
        )


def test_gain_of_first_order_lag() -> None:
    cert = verify_p_gain([[[-2.0]]], [[1.0]], [[1.0]], None, 0.0, 0.6, (0, 0, 1))
    assert cert.p == 0
    assert cert.P[0, 0] > 0
    with raises(Infeasible):
        verify_p_gain([[[-2.0]]], [[1.0]], [[1.0]], None, 0.0, 0.4, (0, 0, 1))


def test_passivity_of_unit_lag() -> None:
    # with no input shortage the cross term forces P = 1
    cert = verify_passivity([[-1.0]], [[1.0]], [[1.0]], None, 0.0, alpha=0.5, mu=0.0)
    assert np.isclose(cert.P[0, 0], 1.0, atol=1e-3)
    cert = verify_passivity([[-1.0]], [[1.0]], [[1.0]], None, 0.0, alpha=0.5, mu=0.1)
    assert cert.P[0, 0] > 0
    with raises(Infeasible):
        verify_passivity([[-1.0]], [[1.0]], [[1.0]], None, 0.0, alpha=3.0, mu=0.1)
    with raises(InvalidInput):
        verify_passivity([[-1.0]], [[1.0]], [[1.0]], None, 0.0, alpha=0.0)


@fixture(scope="module")
def nominal():
    return design_2dominant(A, B1, RATE)


def test_nominal_design_inertia(nominal) -> None:
    _, inertia = eig_symmetric(nominal.Y)
    assert inertia == (2, 0, 1)
    assert nominal.certificate.p == 2
    assert nominal.solution.max_residual < 0


def test_nominal_design_in_p_form(nominal) -> None:
    P, K = nominal.P, nominal.K
    closed = A + B1 @ K
    assert max_eig(A.T @ P + P @ A + 2 * RATE * P) < 0
    assert max_eig(closed.T @ P + P @ closed + 2 * RATE * P) < 0
    assert max_eig(closed.T @ P + P @ closed) < 0


def test_nominal_design_destabilizes_origin(nominal) -> None:
    eigs = eig_general(nominal.closed_matrix())
    assert int(np.sum(eigs.real > 0)) == 2


def test_nominal_design_dc_gain_below_one(nominal) -> None:
    assert nominal.dc_gain() < 1.0
    assert np.allclose(nominal.K, nominal.Z @ np.linalg.inv(nominal.Y))


def test_design_needs_rate_split() -> None:
    with raises(PreconditionFailed):
        design_2dominant(A, B1, 5.0)


def test_norm_bound_add_on() -> None:
    result = design_2dominant(A, B1, RATE, DesignOptions(nu=1e4))
    assert "z_norm" in result.solution.residuals
    assert float(result.Z @ result.Z.T) < 1e4


def test_robust_design_with_loose_bound() -> None:
    result = design_robust(A, B1, B2, C1, RATE, 1e6)
    _, inertia = eig_symmetric(result.Y)
    assert inertia == (2, 0, 1)


def test_robust_design_below_open_loop_gain() -> None:
    # the open loop alone has gain 0.25 from B2 to the x_p state at this rate
    C2 = np.array([[0.0, 1.0, 0.0]])
    with raises(Infeasible):
        design_robust(A, B1, B2, C2, RATE, 0.1, DesignOptions(instability=False))


def test_robust_instability_needs_ports() -> None:
    with raises(InvalidInput):
        design_2dominant(A, B1, RATE, DesignOptions(robust_instability_gamma=10.0))


def test_precompensator_places_fast_pole() -> None:
    result = design_precompensator([[-1.0]], [[1.0]], RATE)
    assert result.Y[0, 0] > 0
    assert (-1.0 + result.K[0, 0]) < -RATE


def test_precompensator_with_gain_bound() -> None:
    result = design_precompensator([[-1.0]], [[1.0]], RATE, gamma=1.0, C0=[[1.0]])
    pole = -1.0 + result.K[0, 0]
    assert pole < -RATE
    assert 1.0 / abs(pole + RATE) < 1.0


def test_precompensator_rejects_uncontrollable_pair() -> None:
    with raises(UncontrollablePair):
        design_precompensator([[-1.0]], [[0.0]], RATE)
    with raises(InvalidInput):
        design_precompensator([[-1.0]], [[1.0]], RATE, gamma=1.0)


def test_certificate_round_trip(nominal) -> None:
    cert = Certificate.from_design(nominal)
    parsed = Certificate.from_json(cert.to_json())
    assert parsed.to_json() == cert.to_json()
    report = reverify(parsed)
    for name, value in report.residuals.items():
        assert abs(value - cert.residuals[name]) <= 1e-12 * max(1.0, abs(value))
    assert report.inertia == (2, 0, 1)


def test_corrupted_certificate(nominal) -> None:
    cert = Certificate.from_design(nominal)
    Y = cert.Y.copy()
    Y[0, 0] += 10.0 * abs(Y).max()
    with raises(ResidualViolation):
        reverify(replace(cert, Y=Y))
    with raises(ResidualViolation):
        reverify(replace(cert, K=2.0 * cert.K))


def test_certificate_inertia_claim(nominal) -> None:
    cert = Certificate.from_design(nominal)
    with raises(InertiaMismatch):
        reverify(replace(cert, inertia=Inertia(1, 0, 2)))


def test_certificate_dimension_mismatch(nominal) -> None:
    cert = Certificate.from_design(nominal)
    with raises(InvalidInput):
        reverify(cert, [np.eye(4)])


def test_malformed_certificate() -> None:
    with raises(InvalidInput):
        Certificate.from_json("[1, 2]")
    with raises(InvalidInput):
        Certificate.from_json("{not json")
    with raises(InvalidInput):
        Certificate.from_json('{"version": 1}')
