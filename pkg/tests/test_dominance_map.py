"""Acceptance tests of the (k, beta) dominance map on the lag example."""

import numpy as np
from mixfb.analysis import RegionLabel, dominance_map, k0, k2
from mixfb.analysis.dominance_map import default_grids
from mixfb.config import Config
from pytest import fixture, mark

RATE = 50.0


@fixture(scope="module")
def config(configs) -> Config:
    return Config.from_path(configs / "lag_map.json")


@fixture(scope="module")
def coarse_map(config: Config):
    return dominance_map(
        config.params(), config.grid.beta_grid(), config.grid.gain_grid(), RATE
    )


def test_reference_points(coarse_map) -> None:
    assert coarse_map.label_at(5.0, 0.2) == RegionLabel.ZeroDominant
    assert coarse_map.label_at(5.0, 0.4) == RegionLabel.Oscillation
    assert coarse_map.label_at(5.0, 0.8) == RegionLabel.OscillationPlusFixedPoints


def test_low_gain_is_zero_dominant(coarse_map) -> None:
    for i, beta in enumerate(coarse_map.betas):
        for j, k in enumerate(coarse_map.gains):
            if k < coarse_map.k0[i] * 0.99:
                assert coarse_map.labels[i][j] == RegionLabel.ZeroDominant, (k, beta)


def test_k2_above_k0(config: Config) -> None:
    params = config.params()
    for beta in np.linspace(0.1, 1.0, 100):
        assert k2(beta, RATE, params) >= k0(beta, params)


def test_parallel_map_matches_serial(config: Config) -> None:
    args = (config.params(), config.grid.beta_grid(), config.grid.gain_grid(), RATE)
    serial = dominance_map(*args, workers=1)
    parallel = dominance_map(*args, workers=2)
    assert serial.labels == parallel.labels
    assert np.array_equal(serial.k0, parallel.k0)


def test_workers_from_environment(config: Config, monkeypatch) -> None:
    monkeypatch.setenv("MIXFB_WORKERS", "2")
    args = (config.params(), config.grid.beta_grid(), config.grid.gain_grid(), RATE)
    assert dominance_map(*args).labels == dominance_map(*args, workers=1).labels


@mark.slow
def test_full_grid(config: Config) -> None:
    betas, gains = default_grids()
    full = dominance_map(config.params(), betas, gains, RATE)
    labels = {label for column in full.labels for label in column}
    assert RegionLabel.ZeroDominant in labels
    assert RegionLabel.Oscillation in labels
    assert RegionLabel.OscillationPlusFixedPoints in labels
    # past the positive balance where k0 reaches 1, large gains keep a 2-dominant label
    high_beta = int(np.argmin(np.abs(betas - 0.9)))
    assert full.labels[high_beta][-1] != RegionLabel.ZeroDominant
