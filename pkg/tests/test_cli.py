"""Test that the CLI commands work."""
import json
from pathlib import Path

from mixfb.cli import app
from pytest import fixture, mark
from typer.testing import CliRunner

runner = CliRunner()


@fixture(scope="module")
def nominal_cert(tmp_path_factory, configs: Path) -> Path:
    out = tmp_path_factory.mktemp("certs") / "nominal.json"
    result = runner.invoke(
        app, ["design", "nominal", "--config", str(configs / "lag_nominal.json"), "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    assert "inertia=(2, 0, 1)" in result.stdout
    assert "dc_gain[0]=" in result.stdout
    return out


def test_map(tmp_path: Path, configs: Path) -> None:
    out = tmp_path / "map.csv"
    result = runner.invoke(
        app, ["analyze", "map", "--config", str(configs / "lag_map.json"), "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    lines = out.read_text().splitlines()
    assert lines[0] == "k,beta,label"
    assert len(lines) == 1 + 3 * 5
    assert (tmp_path / "map_bounds.csv").read_text().startswith("beta,k0,k2\n")


def test_map_rejects_empty_gain_grid(tmp_path: Path) -> None:
    config = tmp_path / "empty.json"
    config.write_text(json.dumps({"rate": 50.0, "grid": {"k_points": 0}}))
    result = runner.invoke(
        app, ["analyze", "map", "--config", str(config), "--out", str(tmp_path / "map.csv")]
    )
    assert result.exit_code == 2
    assert not (tmp_path / "map.csv").exists()


def test_margin(tmp_path: Path, configs: Path) -> None:
    out = tmp_path / "weight.csv"
    result = runner.invoke(
        app,
        ["analyze", "margin", "--config", str(configs / "lag_oscillating.json"), "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    lines = result.stdout.splitlines()
    assert float(lines[0].split("delta_max=")[1]) >= 0.93
    assert lines[1].startswith("gamma_ins=")
    assert "unstable=2 preserved=None" in lines[1]
    assert out.read_text().startswith("omega,weight\n")


def test_margin_with_declared_gain_and_dc_shift(tmp_path: Path, configs: Path) -> None:
    result = runner.invoke(
        app,
        [
            "analyze",
            "margin",
            "--config",
            str(configs / "lag_oscillating.json"),
            "--out",
            str(tmp_path / "weight.csv"),
            "--declared-gain",
            "1e-6",
            "--delta0",
            "0.5",
        ],
    )
    assert result.exit_code == 0, result.output
    lines = result.stdout.splitlines()
    assert lines[1].endswith("preserved=True")
    assert lines[2].startswith("equilibrium y=")
    assert lines[2].endswith("stable=False")


def test_locus(tmp_path: Path, configs: Path) -> None:
    out = tmp_path / "locus.csv"
    result = runner.invoke(
        app, ["analyze", "locus", "--config", str(configs / "lag_map.json"), "--out", str(out)]
    )
    # the map configuration has no balance of its own
    assert result.exit_code == 2
    result = runner.invoke(
        app,
        ["analyze", "locus", "--config", str(configs / "lag_oscillating.json"), "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    assert out.read_text().splitlines()[0] == "k,re1,im1,re2,im2,re3,im3"


def test_verify(nominal_cert: Path, configs: Path) -> None:
    result = runner.invoke(app, ["verify", "--cert", str(nominal_cert)])
    assert result.exit_code == 0, result.output
    assert result.stdout.startswith("verified max_residual=")
    result = runner.invoke(
        app,
        ["verify", "--cert", str(nominal_cert), "--config", str(configs / "lag_nominal.json")],
    )
    assert result.exit_code == 0, result.output


def test_verify_corrupted(nominal_cert: Path, tmp_path: Path) -> None:
    doc = json.loads(nominal_cert.read_text())
    doc["Y"][0][0] += 10.0 * max(abs(v) for row in doc["Y"] for v in row)
    corrupted = tmp_path / "corrupted.json"
    corrupted.write_text(json.dumps(doc))
    result = runner.invoke(app, ["verify", "--cert", str(corrupted)])
    assert result.exit_code == 6


def test_verify_against_other_loop(nominal_cert: Path, configs: Path) -> None:
    result = runner.invoke(
        app,
        ["verify", "--cert", str(nominal_cert), "--config", str(configs / "second_order.json")],
    )
    assert result.exit_code == 2


def test_design_without_rate_split(tmp_path: Path) -> None:
    config = tmp_path / "slow.json"
    config.write_text(json.dumps({"rate": 5.0}))
    result = runner.invoke(
        app, ["design", "nominal", "--config", str(config), "--out", str(tmp_path / "c.json")]
    )
    assert result.exit_code == 4
    assert not (tmp_path / "c.json").exists()


def test_design_missing_config(tmp_path: Path) -> None:
    result = runner.invoke(
        app,
        ["design", "nominal", "--config", str(tmp_path / "nope.json"), "--out", "c.json"],
    )
    assert result.exit_code == 2


@mark.slow
def test_simulate_converged(tmp_path: Path, configs: Path) -> None:
    out = tmp_path / "trace.csv"
    result = runner.invoke(
        app, ["simulate", "--config", str(configs / "lag_converged.json"), "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    assert "verdict=converged" in result.stdout
    assert out.read_text().startswith("t,y,r,x1,x2,x3\n")


@mark.slow
def test_simulate_with_certificate(nominal_cert: Path, tmp_path: Path, configs: Path) -> None:
    out = tmp_path / "trace.csv"
    result = runner.invoke(
        app,
        [
            "simulate",
            "--config",
            str(configs / "lag_nominal.json"),
            "--cert",
            str(nominal_cert),
            "--out",
            str(out),
        ],
    )
    assert result.exit_code == 0, result.output
    assert "verdict=oscillating" in result.stdout


def test_simulate_rejects_mismatched_certificate(
    nominal_cert: Path, tmp_path: Path, configs: Path
) -> None:
    result = runner.invoke(
        app,
        [
            "simulate",
            "--config",
            str(configs / "second_order.json"),
            "--cert",
            str(nominal_cert),
            "--out",
            str(tmp_path / "trace.csv"),
        ],
    )
    assert result.exit_code == 2
