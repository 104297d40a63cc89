import logging
from contextlib import contextmanager
from enum import Enum
from pathlib import Path
from typing import Iterator, Optional

import numpy as np
import typer

from mixfb.analysis import dominance_map, robustness_report, root_locus
from mixfb.cable import cable_ss, interconnect, node_amplitudes
from mixfb.config import Config
from mixfb.error import (
    ExitCode,
    ExitCodeMessage,
    InvalidInput,
    MixfbError,
    PreconditionFailed,
)
from mixfb.lmi import Certificate, reverify
from mixfb.lti import eig_symmetric
from mixfb.simulation import classify_trace, integrate
from mixfb.utils.io import write_atomic, write_csv

app = typer.Typer()
analyze = typer.Typer(help="Frequency-domain analysis of the (k, beta) plane.")
app.add_typer(analyze, name="analyze")

CONFIG_OPTION = typer.Option(..., "--config", help="JSON configuration file.")


class DesignKind(str, Enum):
    """Design variants of the ``design`` command."""

    nominal = "nominal"
    parametric = "parametric"
    robust = "robust"
    passive = "passive"


@contextmanager
def _reporting(precondition_code: Optional[ExitCode] = None) -> Iterator[None]:
    """Turn library errors into their exit codes.

    Args:
        precondition_code: Exit code of a failed theorem hypothesis, when the
            command treats it differently from other numerical failures.

    Yields:
        None
    """
    try:
        yield
    except MixfbError as exc:
        code = exc.exit_code
        if precondition_code is not None and isinstance(exc, PreconditionFailed):
            code = precondition_code
        typer.echo(f"{ExitCodeMessage[code]}: {exc}", err=True)
        raise typer.Exit(code=int(code))


@app.callback()
def callback(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log debug output."),
):
    """Mixed-feedback oscillator design CLI."""
    if verbose:
        logging.basicConfig(level=logging.DEBUG)


@analyze.command("map")
def analyze_map(
    config: Path = CONFIG_OPTION,
    out: Path = typer.Option(..., "--out", help="Label CSV (k, beta, label)."),
):
    """Label the (k, beta) grid and write the k0/k2 curves next to it."""
    with _reporting():
        cfg = Config.from_path(config)
        result = dominance_map(
            cfg.params(),
            cfg.grid.beta_grid(),
            cfg.grid.gain_grid(),
            cfg.effective_rate(),
            cfg.reference.constant,
            cfg.saturation.to_saturation(),
        )
        rows = (
            (k, beta, result.labels[i][j].value)
            for i, beta in enumerate(result.betas)
            for j, k in enumerate(result.gains)
        )
        write_csv(out, ["k", "beta", "label"], rows)
        bounds = out.with_name(f"{out.stem}_bounds.csv")
        write_csv(bounds, ["beta", "k0", "k2"], zip(result.betas, result.k0, result.k2))
    typer.echo(f"wrote {out} and {bounds}")


@analyze.command("margin")
def analyze_margin(
    config: Path = CONFIG_OPTION,
    out: Path = typer.Option(..., "--out", help="Weight CSV (omega, weight)."),
    delta: Optional[float] = typer.Option(None, help="Radius; the margin by default."),
    declared_gain: Optional[float] = typer.Option(
        None, help="Gain of the perturbation class for the instability verdict."
    ),
    delta0: Optional[float] = typer.Option(None, help="DC perturbation of k P(0)."),
):
    """Nyquist inflation margin, the uncertainty weight and instability robustness."""
    with _reporting():
        cfg = Config.from_path(config)
        cfg.require_point()
        system = cfg.closed_loop()
        report = robustness_report(
            cfg.params(),
            cfg.effective_rate(),
            delta,
            cfg.grid.omega(),
            ports=(system.B2, system.C2),
            declared_gain=declared_gain,
            delta0=delta0,
            r=cfg.reference.constant,
            saturation=system.saturation,
        )
        write_csv(out, ["omega", "weight"], zip(report.omega, report.weight))
    typer.echo(f"delta_max={report.delta_max!r}")
    if report.instability is not None:
        ins = report.instability
        typer.echo(
            f"gamma_ins={float(ins.gamma)!r} unstable={ins.unstable} preserved={ins.preserved}"
        )
    for eq in report.perturbed:
        typer.echo(f"equilibrium y={eq.y!r} stable={eq.stable}")


@analyze.command("locus")
def analyze_locus(
    config: Path = CONFIG_OPTION,
    out: Path = typer.Option(..., "--out", help="Locus CSV (k, re1, im1, ...)."),
):
    """Closed-loop eigenvalues along the gain grid at the configured balance."""
    with _reporting():
        cfg = Config.from_path(config)
        if cfg.beta is None:
            raise InvalidInput("analyze locus needs beta in the configuration")
        locus = root_locus(cfg.beta, cfg.params(), cfg.grid.gain_grid())
        n = locus.eigenvalues.shape[1]
        header = ["k"] + [f"{part}{i + 1}" for i in range(n) for part in ("re", "im")]
        rows = (
            [k, *np.column_stack([eigs.real, eigs.imag]).ravel()]
            for k, eigs in zip(locus.gains, locus.eigenvalues)
        )
        write_csv(out, header, rows)
    typer.echo(f"wrote {out}")


@app.command()
def design(
    kind: DesignKind = typer.Argument(..., help="Design variant."),
    config: Path = CONFIG_OPTION,
    out: Path = typer.Option(..., "--out", help="Certificate JSON file."),
):
    """Synthesize a certified 2-dominant state feedback K = Z Y^-1."""
    with _reporting(precondition_code=ExitCode.Infeasible):
        cfg = Config.from_path(config)
        result = cfg.design(kind.value)
        cert = Certificate.from_design(result)
        write_atomic(out, cert.to_json())
    signs = "".join("+" if v > 0 else "-" if v < 0 else "0" for v in result.K[0])
    typer.echo(f"kind={kind.value} inertia={tuple(cert.inertia)}")
    typer.echo(f"max_residual={result.solution.max_residual!r} epsilon={cert.epsilon!r}")
    for i, V in enumerate(result.vertices):
        typer.echo(f"dc_gain[{i}]={result.dc_gain(V)!r}")
    typer.echo(f"K={result.K[0].tolist()} signs={signs}")


def _load_certificate(path: Path) -> Certificate:
    try:
        text = path.read_text()
    except OSError as exc:
        raise InvalidInput(f"Cannot read certificate {path}: {exc}") from exc
    return Certificate.from_json(text)


@app.command()
def simulate(
    config: Path = CONFIG_OPTION,
    out: Path = typer.Option(..., "--out", help="Trace CSV file."),
    cert: Optional[Path] = typer.Option(None, "--cert", help="Use the certificate's K."),
):
    """Integrate the closed loop and print a machine-parseable verdict line."""
    with _reporting():
        cfg = Config.from_path(config)
        K = None
        if cert is not None:
            K = _load_certificate(cert).K
            n = cfg.state_dim()
            if K.shape != (1, n):
                raise InvalidInput(f"Certificate K has shape {K.shape}, the loop has {n} states")
        system = cfg.closed_loop(K)
        inter = interconnect(system, cable_ss(cfg.cable.params()) if cfg.cable else None)
        sim = cfg.simulation
        x0 = np.zeros(inter.system.n_states)
        x0[: system.n_states] = cfg.initial_state(system.n_states)
        reference = cfg.reference.to_reference(system.slow_time)
        trace = integrate(inter.system, x0, reference, sim.horizon, sim.tol, sim.samples)
        if cfg.cable:
            nodes = inter.node_voltages(trace.X)
            header = ["t"] + [f"v{i}" for i in range(nodes.shape[1])]
            write_csv(out, header, np.column_stack([trace.t, nodes]))
        else:
            header, rows = trace.columns()
            write_csv(out, header, rows)
        verdict = classify_trace(trace, sim.transient_fraction)
    if cfg.cable:
        amplitudes = node_amplitudes(trace, inter)
        typer.echo("amplitudes=" + ",".join(repr(float(a)) for a in amplitudes))
    typer.echo(verdict.summary())


@app.command()
def verify(
    cert: Path = typer.Option(..., "--cert", help="Certificate JSON file."),
    config: Optional[Path] = typer.Option(None, "--config", help="Re-check against this loop."),
):
    """Recompute every residual and the inertia of a certificate."""
    with _reporting():
        certificate = _load_certificate(cert)
        vertices = None
        if config is not None:
            cfg = Config.from_path(config)
            nominal = cfg.open_loop().A
            vertices = [nominal]
            if len(certificate.vertices) > 1:
                vertices += cfg.vertices()
        report = reverify(certificate, vertices)
        _, inertia = eig_symmetric(certificate.Y)
    typer.echo(f"verified max_residual={report.max_residual!r} inertia={tuple(inertia)}")


if __name__ == "__main__":
    app()
