"""An RC oscillator designed to keep oscillating when it drives a cable."""
from pathlib import Path
from typing import Dict, Tuple

import numpy as np
from mixfb import Config, design_fixture
from mixfb.analysis import instability_gain
from mixfb.cable import cable_ss, interconnect, node_amplitudes, passivity_excess
from mixfb.simulation import OscillationVerdict, VerdictKind, classify_trace, integrate
from pytest import fixture, mark

pytestmark = mark.slow

CONFIG = Path(__file__).parent / "configs" / "rc_passive.json"
SHUNTS = (300.0, 400.0, 500.0, 600.0)

passive = design_fixture(CONFIG, kind="passive")


@fixture(scope="module")
def config() -> Config:
    return Config.from_path(CONFIG)


def test_passive_design(passive, config: Config) -> None:
    assert passive.certificate.p == 2
    assert passive.ports["mu"] == config.lmi.mu
    for R2 in SHUNTS:
        excess = passivity_excess(config.cable.params(R2), config.effective_rate())
        assert excess.alpha >= config.lmi.mu


def test_origin_stays_unstable_under_loading(passive) -> None:
    B, C = passive.B, passive.ports["C"]
    result = instability_gain(passive.closed_matrix(), B, C, declared_gain=0.01)
    assert result.gamma < 100.0
    assert result.preserved


@fixture(scope="module")
def loaded(passive, config: Config) -> Dict[float, Tuple[OscillationVerdict, np.ndarray]]:
    system = config.closed_loop(passive.K)
    sim = config.simulation
    out = {}
    for R2 in SHUNTS:
        inter = interconnect(system, cable_ss(config.cable.params(R2)))
        x0 = np.zeros(inter.system.n_states)
        x0[: system.n_states] = config.initial_state(system.n_states)
        trace = integrate(inter.system, x0, horizon=sim.horizon, samples=sim.samples)
        out[R2] = (classify_trace(trace), node_amplitudes(trace, inter))
    return out


@mark.parametrize("R2", SHUNTS)
def test_loaded_oscillator_oscillates(loaded, config: Config, R2: float) -> None:
    verdict, amplitudes = loaded[R2]
    assert verdict.kind == VerdictKind.Oscillating
    assert amplitudes.shape == (config.cable.n + 1,)
    assert amplitudes[-1] > 0
    assert np.all(np.diff(amplitudes) <= 1e-6 * amplitudes[0])


def test_lower_shunt_resistance_decays_more(loaded) -> None:
    decay = {R2: amplitudes[-1] / amplitudes[0] for R2, (_, amplitudes) in loaded.items()}
    assert decay[300.0] < decay[600.0]
