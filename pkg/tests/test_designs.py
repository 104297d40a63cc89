"""LMI designs of the lag example: nominal, parametric and robust."""
import json
from pathlib import Path

import numpy as np
from mixfb import Certificate, Config, design_fixture
from mixfb.error import Infeasible
from mixfb.lmi import reverify
from mixfb.lti import eig_general, eig_symmetric
from mixfb.simulation import VerdictKind, classify_trace, integrate
from pytest import fixture, mark, raises

CONFIGS = Path(__file__).parent / "configs"

nominal = design_fixture(CONFIGS / "lag_nominal.json")
parametric = design_fixture(CONFIGS / "lag_parametric.json", kind="parametric")


def _config(name: str, **lmi) -> Config:
    doc = json.loads((CONFIGS / name).read_text())
    doc["lmi"] = {**doc.get("lmi", {}), **lmi}
    return Config.from_dict(doc)


@fixture(scope="module")
def robust():
    return _config("lag_nominal.json", gamma=1e6).design("robust")


def _simulate(config_name: str, K: np.ndarray):
    cfg = Config.from_path(CONFIGS / config_name)
    system = cfg.closed_loop(K)
    return integrate(
        system,
        cfg.initial_state(system.n_states),
        horizon=cfg.simulation.horizon,
        samples=cfg.simulation.samples,
    )


def test_nominal_certificate(nominal) -> None:
    _, inertia = eig_symmetric(nominal.Y)
    assert inertia == (2, 0, 1)
    assert len(nominal.vertices) == 1
    assert nominal.dc_gain() < 1.0
    assert int(np.sum(eig_general(nominal.closed_matrix()).real > 0)) == 2


def test_parametric_covers_box(parametric) -> None:
    assert len(parametric.vertices) == 5
    assert parametric.certificate.p == 2
    for V in parametric.vertices:
        assert parametric.dc_gain(V) < 1.0
        unstable = eig_general(parametric.closed_matrix(V)).real > 0
        assert int(np.sum(unstable)) == 2


def test_parametric_certificate_reverifies(parametric) -> None:
    cert = Certificate.from_json(Certificate.from_design(parametric).to_json())
    report = reverify(cert)
    assert report.inertia == (2, 0, 1)
    assert report.gain_consistent
    assert report.max_residual < 0


def test_robust_design(robust) -> None:
    _, inertia = eig_symmetric(robust.Y)
    assert inertia == (2, 0, 1)
    assert "gamma" in robust.ports
    assert reverify(Certificate.from_design(robust)).max_residual < 0


def test_passive_design_needs_passivity_shortage() -> None:
    with raises(Infeasible) as excinfo:
        _config("lag_nominal.json", mu=-1.0).design("passive")
    assert excinfo.value.best_residual > 0


@mark.slow
def test_nominal_design_oscillates(nominal) -> None:
    verdict = classify_trace(_simulate("lag_nominal.json", nominal.K))
    assert verdict.kind == VerdictKind.Oscillating
    assert verdict.amplitude > 0.1


@mark.slow
def test_parametric_design_oscillates(parametric) -> None:
    verdict = classify_trace(_simulate("lag_parametric.json", parametric.K))
    assert verdict.kind == VerdictKind.Oscillating
