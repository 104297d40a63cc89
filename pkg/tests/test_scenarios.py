"""Closed-loop simulations of the three regimes of the lag example."""
from pathlib import Path

import numpy as np
from mixfb import Config, scenario_fixture
from mixfb.simulation import SimTrace, VerdictKind, classify_trace, integrate
from pytest import mark

pytestmark = mark.slow

CONFIGS = Path(__file__).parent / "configs"

converged = scenario_fixture(CONFIGS / "lag_converged.json")
oscillating = scenario_fixture(CONFIGS / "lag_oscillating.json")
bistable = scenario_fixture(CONFIGS / "lag_bistable.json")


def _run(name: str, system, tol: float = 1e-8) -> SimTrace:
    cfg = Config.from_path(CONFIGS / name)
    return integrate(
        system,
        cfg.initial_state(system.n_states),
        cfg.reference.to_reference(system.slow_time),
        cfg.simulation.horizon,
        tol,
        cfg.simulation.samples,
    )


def test_zero_dominant_loop_converges(converged) -> None:
    verdict = classify_trace(_run("lag_converged.json", converged))
    assert verdict.kind == VerdictKind.Converged
    assert abs(verdict.value) < 1e-3


def test_two_dominant_loop_oscillates(oscillating) -> None:
    trace = _run("lag_oscillating.json", oscillating)
    verdict = classify_trace(trace)
    assert verdict.kind == VerdictKind.Oscillating
    assert verdict.amplitude > 0.1
    assert verdict.period > 0


def test_oscillation_stable_under_tighter_tolerance(oscillating) -> None:
    coarse = classify_trace(_run("lag_oscillating.json", oscillating))
    fine = classify_trace(_run("lag_oscillating.json", oscillating, tol=5e-9))
    assert fine.kind == VerdictKind.Oscillating
    assert np.isclose(fine.amplitude, coarse.amplitude, rtol=1e-2)
    assert np.isclose(fine.period, coarse.period, rtol=1e-2)


def test_bistable_loop_switches(bistable) -> None:
    trace = _run("lag_bistable.json", bistable)
    verdict = classify_trace(trace)
    assert verdict.kind == VerdictKind.SwitchedEquilibrium
    assert np.sign(verdict.old) != np.sign(verdict.new)
    assert np.isclose(abs(verdict.new), 2.9847, atol=1e-2)
