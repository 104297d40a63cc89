"""JSON configuration documents for the command-line pipelines."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Type, TypeVar

import numpy as np

from mixfb.cable import CableParams
from mixfb.error import ConfigError, MixfbError
from mixfb.lmi import (
    DesignOptions,
    DesignResult,
    design_2dominant,
    design_passive,
    design_robust,
)
from mixfb.lti import TransferFunction, frequency_grid
from mixfb.loop import (
    ClosedLoopSystem,
    MixedFeedbackParams,
    Saturation,
    assemble_closed_loop,
    default_rate,
    parametric_vertices,
    plant_ss,
)
from mixfb.simulation.reference import ConstantReference, PulseTrain, Reference, bistability_probe

T = TypeVar("T")

PLANT_KINDS = ("lag", "tf", "rc")
DESIGN_COMMANDS = ("nominal", "parametric", "robust", "passive")


def _section(cls: Type[T], doc: Any, name: str) -> T:
    """Instantiate a frozen section from a mapping, rejecting unknown keys."""
    if doc is None:
        return cls()
    if not isinstance(doc, Mapping):
        raise ConfigError(f"Section {name!r} must be an object")
    known = {f.name for f in fields(cls)}  # type: ignore[arg-type]
    unknown = sorted(set(doc) - known)
    if unknown:
        raise ConfigError(f"Unknown keys in {name!r}: {unknown}")
    try:
        return cls(**doc)
    except ConfigError:
        raise
    except (TypeError, ValueError, MixfbError) as exc:
        raise ConfigError(f"Invalid {name!r} section: {exc}") from exc


def _positive(value: Optional[float], name: str) -> None:
    if value is not None and not value > 0:
        raise ConfigError(f"{name} must be positive, got {value}")


@dataclass(frozen=True)
class PlantSpec:
    """The plant, one of three one-key objects.

    ``{"lag": tau}``, ``{"rc": {"r0": .., "c0": ..}}`` or ``{"tf": {"num": .., "den": ..}}``.

    Attributes:
        kind: ``lag``, ``rc`` or ``tf``.
        tau_l: Lag time constant.
        r0: Membrane resistance of the RC node.
        c0: Membrane capacitance of the RC node.
        num: Ascending numerator coefficients.
        den: Ascending denominator coefficients.
    """

    kind: str = "lag"
    tau_l: float = 0.01
    r0: Optional[float] = None
    c0: Optional[float] = None
    num: Sequence[float] = field(default_factory=list)
    den: Sequence[float] = field(default_factory=list)

    @classmethod
    def from_doc(cls, doc: Any) -> PlantSpec:
        """Parse the one-key plant object."""
        if doc is None:
            return cls()
        if not isinstance(doc, Mapping) or len(doc) != 1:
            raise ConfigError(f"plant must be one of {PLANT_KINDS}, got {doc!r}")
        ((kind, body),) = doc.items()
        if kind == "lag":
            if not isinstance(body, (int, float)):
                raise ConfigError("plant.lag must be a number")
            return cls(kind="lag", tau_l=float(body))
        if kind == "rc":
            if not isinstance(body, Mapping) or set(body) != {"r0", "c0"}:
                raise ConfigError("plant.rc needs exactly r0 and c0")
            return cls(kind="rc", r0=float(body["r0"]), c0=float(body["c0"]))
        if kind == "tf":
            if not isinstance(body, Mapping) or set(body) != {"num", "den"}:
                raise ConfigError("plant.tf needs exactly num and den")
            return cls(kind="tf", num=list(body["num"]), den=list(body["den"]))
        raise ConfigError(f"Unknown plant kind {kind!r}; expected one of {PLANT_KINDS}")

    def __post_init__(self) -> None:
        if self.kind not in PLANT_KINDS:
            raise ConfigError(f"Unknown plant kind {self.kind!r}")
        _positive(self.tau_l, "plant.lag")
        _positive(self.r0, "plant.rc.r0")
        _positive(self.c0, "plant.rc.c0")

    def to_lti(self) -> TransferFunction:
        """The plant transfer function (ascending coefficients)."""
        try:
            if self.kind == "lag":
                return TransferFunction.from_coeffs([1.0], [1.0, self.tau_l])
            if self.kind == "rc":
                assert self.r0 is not None and self.c0 is not None
                return TransferFunction.from_coeffs([self.r0], [1.0, self.r0 * self.c0])
            return TransferFunction.from_coeffs(self.num, self.den)
        except (MixfbError, TypeError, ValueError) as exc:
            raise ConfigError(f"Invalid plant: {exc}") from exc

    def to_dict(self) -> Dict[str, Any]:
        if self.kind == "lag":
            return {"lag": self.tau_l}
        if self.kind == "rc":
            return {"rc": {"r0": self.r0, "c0": self.c0}}
        return {"tf": {"num": list(self.num), "den": list(self.den)}}


@dataclass(frozen=True)
class GridSpec:
    """Sweep grids for maps, loci and frequency searches.

    Attributes:
        betas: Explicit balance grid; ``beta_points`` uniform points on [0, 1] otherwise.
        beta_points: Size of the default balance grid.
        k_min: Smallest gain of the log-spaced gain grid.
        k_max: Largest gain.
        k_points: Size of the gain grid.
        omega_min: Smallest nonzero frequency.
        omega_max: Largest frequency.
        omega_points: Log-spaced frequency points (``omega = 0`` is added).
    """

    betas: Optional[List[float]] = None
    beta_points: int = 100
    k_min: float = 0.1
    k_max: float = 1000.0
    k_points: int = 120
    omega_min: float = 1e-4
    omega_max: float = 1e6
    omega_points: int = 4000

    def __post_init__(self) -> None:
        _positive(self.k_min, "grid.k_min")
        _positive(self.omega_min, "grid.omega_min")
        if self.k_max < self.k_min or self.omega_max < self.omega_min:
            raise ConfigError("Grid upper bounds must not be below lower bounds")

    def beta_grid(self) -> np.ndarray:
        if self.betas is not None:
            return np.asarray(self.betas, dtype=float)
        return np.linspace(0.0, 1.0, self.beta_points)

    def gain_grid(self) -> np.ndarray:
        if self.k_points < 1:
            return np.zeros(0)
        return np.logspace(np.log10(self.k_min), np.log10(self.k_max), self.k_points)

    def omega(self) -> np.ndarray:
        return frequency_grid(self.omega_min, self.omega_max, self.omega_points)


@dataclass(frozen=True)
class LMIOptions:
    """Synthesis options.

    Attributes:
        epsilon: Strictness margin; scaled from the vertices when ``None``.
        nu: Bound on ``Z Z^T``.
        instability: Append the instability constraint.
        gamma: Gain bound of the robust design.
        mu: Input-passivity shortage of the passive design.
        robust_instability_gamma: Gain bound on the linearization at the origin.
        parametric: Relative half-width of the ``(tau_p, tau_n)`` box.
        B2: Perturbation input column; multiplicative output ports by default.
        C2: Perturbation output row.
        solver: cvxpy solver name.
    """

    epsilon: Optional[float] = None
    nu: Optional[float] = None
    instability: bool = True
    gamma: Optional[float] = None
    mu: Optional[float] = None
    robust_instability_gamma: Optional[float] = None
    parametric: float = 0.2
    B2: Optional[List[float]] = None
    C2: Optional[List[float]] = None
    solver: str = "CLARABEL"

    def __post_init__(self) -> None:
        for name in ("epsilon", "nu", "gamma", "robust_instability_gamma"):
            _positive(getattr(self, name), f"lmi.{name}")
        if not 0 <= self.parametric < 1:
            raise ConfigError("lmi.parametric must lie in [0, 1)")


@dataclass(frozen=True)
class SimulationOptions:
    """Integration options.

    Attributes:
        horizon: Final time, ``200 max(tau_p, tau_n)`` by default.
        tol: Local error tolerance.
        x0: Initial state; ``0.1`` on the first state by default.
        transient_fraction: Share of the trace ignored by the verdict.
        samples: Number of uniform sample intervals.
    """

    horizon: Optional[float] = None
    tol: float = 1e-8
    x0: Optional[List[float]] = None
    transient_fraction: float = 0.5
    samples: int = 20_000

    def __post_init__(self) -> None:
        _positive(self.horizon, "simulation.horizon")
        _positive(self.tol, "simulation.tol")
        if self.samples < 10:
            raise ConfigError("simulation.samples must be at least 10")


@dataclass(frozen=True)
class CableSpec:
    """A ladder load hanging off the membrane node."""

    n: int = 15
    R1: float = 100.0
    R2: float = 400.0
    Cm: float = 1e-4

    def __post_init__(self) -> None:
        try:
            CableParams(self.n, self.R1, self.R2, self.Cm)
        except MixfbError as exc:
            raise ConfigError(f"Invalid cable: {exc}") from exc

    def params(self, R2: Optional[float] = None) -> CableParams:
        return CableParams(self.n, self.R1, self.R2 if R2 is None else R2, self.Cm)


@dataclass(frozen=True)
class SaturationSpec:
    """``tanh`` with a bound, or a monotone table."""

    kind: str = "tanh"
    bound: float = 1.0
    table_y: Optional[List[float]] = None
    table_phi: Optional[List[float]] = None

    def to_saturation(self) -> Saturation:
        try:
            if self.kind == "table":
                if self.table_y is None or self.table_phi is None:
                    raise ConfigError("A table saturation needs table_y and table_phi")
                return Saturation.from_table(self.table_y, self.table_phi)
            return Saturation(kind=self.kind, bound=self.bound)
        except ConfigError:
            raise
        except MixfbError as exc:
            raise ConfigError(f"Invalid saturation: {exc}") from exc


@dataclass(frozen=True)
class ReferenceSpec:
    """A constant, explicit pulses, or the default bistability probe."""

    constant: float = 0.0
    amplitudes: List[float] = field(default_factory=list)
    starts: List[float] = field(default_factory=list)
    durations: List[float] = field(default_factory=list)
    probe: bool = False
    probe_amplitude: float = 2.0

    def to_reference(self, slow_time: float) -> Reference:
        if self.probe:
            return bistability_probe(slow_time, self.probe_amplitude)
        if self.amplitudes:
            try:
                return PulseTrain.from_lists(
                    self.amplitudes, self.starts, self.durations, self.constant
                )
            except MixfbError as exc:
                raise ConfigError(f"Invalid reference: {exc}") from exc
        return ConstantReference(self.constant)


@dataclass(frozen=True)
class Config:
    """A complete pipeline configuration.

    Attributes:
        plant: The plant.
        tau_p: Positive-path time constant.
        tau_n: Negative-path time constant.
        k: Overall gain (analysis and simulation without a certificate).
        beta: Balance.
        rate: The rate ``lambda``; a heuristic default when ``None``.
        reference: Reference signal.
        saturation: Actuation stage.
        grid: Sweep grids.
        lmi: Synthesis options.
        simulation: Integration options.
        cable: Optional cable load.
        seed: Seed of every randomized step.
    """

    plant: PlantSpec = field(default_factory=PlantSpec)
    tau_p: float = 0.1
    tau_n: float = 1.0
    k: Optional[float] = None
    beta: Optional[float] = None
    rate: Optional[float] = None
    reference: ReferenceSpec = field(default_factory=ReferenceSpec)
    saturation: SaturationSpec = field(default_factory=SaturationSpec)
    grid: GridSpec = field(default_factory=GridSpec)
    lmi: LMIOptions = field(default_factory=LMIOptions)
    simulation: SimulationOptions = field(default_factory=SimulationOptions)
    cable: Optional[CableSpec] = None
    seed: int = 0

    def __post_init__(self) -> None:
        _positive(self.tau_p, "tau_p")
        _positive(self.tau_n, "tau_n")
        _positive(self.rate, "rate")
        if self.k is not None and self.k < 0:
            raise ConfigError("k must be non-negative")
        if self.beta is not None and not 0 <= self.beta <= 1:
            raise ConfigError("beta must lie in [0, 1]")

    @classmethod
    def from_dict(cls, doc: Any) -> Config:
        """Parse and validate a configuration mapping.

        Raises:
            ConfigError: On unknown keys or invalid values.
        """
        if not isinstance(doc, Mapping):
            raise ConfigError("The configuration must be a JSON object")
        sections = {
            "reference": ReferenceSpec,
            "saturation": SaturationSpec,
            "grid": GridSpec,
            "lmi": LMIOptions,
            "simulation": SimulationOptions,
        }
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(doc) - known)
        if unknown:
            raise ConfigError(f"Unknown configuration keys: {unknown}")
        kwargs: Dict[str, Any] = {
            name: _section(section, doc.get(name), name) for name, section in sections.items()
        }
        kwargs["plant"] = PlantSpec.from_doc(doc.get("plant"))
        if doc.get("cable") is not None:
            kwargs["cable"] = _section(CableSpec, doc["cable"], "cable")
        for name in ("tau_p", "tau_n", "k", "beta", "rate"):
            if doc.get(name) is not None:
                try:
                    kwargs[name] = float(doc[name])
                except (TypeError, ValueError) as exc:
                    raise ConfigError(f"{name} must be a number") from exc
        if "seed" in doc:
            kwargs["seed"] = int(doc["seed"])
        return cls(**kwargs)

    @classmethod
    def from_json(cls, text: str) -> Config:
        """Parse a JSON document.

        Raises:
            ConfigError: If the text is not valid JSON or not a valid configuration.
        """
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"Configuration is not valid JSON: {exc}") from exc
        return cls.from_dict(doc)

    @classmethod
    def from_path(cls, path: Path) -> Config:
        """Read and parse a configuration file."""
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"Cannot read configuration {path}: {exc}") from exc
        return cls.from_json(text)

    def params(
        self, k: Optional[float] = None, beta: Optional[float] = None
    ) -> MixedFeedbackParams:
        """Mixed-feedback parameters at ``(k, beta)`` (the configured ones by default).

        Raises:
            ConfigError: If no gain or balance is available or the data is invalid.
        """
        k = self.k if k is None else k
        beta = self.beta if beta is None else beta
        try:
            return MixedFeedbackParams(
                k=0.0 if k is None else k,
                beta=0.5 if beta is None else beta,
                tau_p=self.tau_p,
                tau_n=self.tau_n,
                plant=self.plant.to_lti(),
            )
        except ConfigError:
            raise
        except MixfbError as exc:
            raise ConfigError(f"Invalid loop parameters: {exc}") from exc

    def require_point(self) -> Tuple[float, float]:
        """The configured ``(k, beta)``.

        Raises:
            ConfigError: If either is missing.
        """
        if self.k is None or self.beta is None:
            raise ConfigError("This command needs k and beta in the configuration")
        return self.k, self.beta

    def effective_rate(self) -> float:
        """The configured rate, or the geometric-mean heuristic."""
        return self.rate if self.rate is not None else default_rate(self.params())

    def closed_loop(self, K: Optional[np.ndarray] = None) -> ClosedLoopSystem:
        """The closed loop with feedback ``K`` (from ``(k, beta)`` by default)."""
        if K is None:
            self.require_point()
        try:
            return assemble_closed_loop(
                self.params(),
                K=K,
                saturation=self.saturation.to_saturation(),
                uncertainty_ports=True,
            )
        except ConfigError:
            raise
        except MixfbError as exc:
            raise ConfigError(f"Invalid closed loop: {exc}") from exc

    def vertices(self) -> List[np.ndarray]:
        """Corners of the ``(tau_p, tau_n)`` box of relative half-width ``lmi.parametric``."""
        p = self.lmi.parametric
        return parametric_vertices(
            self.plant.to_lti(),
            (self.tau_p * (1 - p), self.tau_p * (1 + p)),
            (self.tau_n * (1 - p), self.tau_n * (1 + p)),
        )

    def initial_state(self, n: int) -> np.ndarray:
        """``simulation.x0`` or ``0.1`` on the first state."""
        if self.simulation.x0 is None:
            x0 = np.zeros(n)
            x0[0] = 0.1
            return x0
        x0 = np.asarray(self.simulation.x0, dtype=float)
        if x0.shape != (n,):
            raise ConfigError(f"simulation.x0 has {x0.size} entries, expected {n}")
        return x0

    def state_dim(self) -> int:
        """Plant states plus the two controller lags."""
        return plant_ss(self.plant.to_lti()).n_states + 2

    def open_loop(self) -> ClosedLoopSystem:
        """The loop with a zero feedback row, for synthesis."""
        return self.closed_loop(np.zeros((1, self.state_dim())))

    def design(self, kind: str) -> DesignResult:
        """Solve the configured design of the given kind.

        Args:
            kind: ``nominal``, ``parametric``, ``robust`` or ``passive``.

        Raises:
            ConfigError: On an unknown kind or a missing ``lmi.gamma`` / ``lmi.mu``.

        Returns:
            The certified design.
        """
        if kind not in DESIGN_COMMANDS:
            raise ConfigError(f"Unknown design kind {kind!r}; expected one of {DESIGN_COMMANDS}")
        system = self.open_loop()
        B2 = system.B2 if self.lmi.B2 is None else np.asarray(self.lmi.B2, dtype=float)
        C2 = system.C2 if self.lmi.C2 is None else np.asarray(self.lmi.C2, dtype=float)
        options = DesignOptions(
            epsilon=self.lmi.epsilon,
            instability=self.lmi.instability,
            nu=self.lmi.nu,
            extra_vertices=tuple(self.vertices()) if kind == "parametric" else (),
            robust_instability_gamma=self.lmi.robust_instability_gamma,
            instability_ports=(B2, C2),
            solver=self.lmi.solver,
            seed=self.seed,
        )
        rate = self.effective_rate()
        if kind == "robust":
            if self.lmi.gamma is None:
                raise ConfigError("The robust design needs lmi.gamma")
            return design_robust(system.A, system.B1, B2, C2, rate, self.lmi.gamma, options)
        if kind == "passive":
            if self.lmi.mu is None:
                raise ConfigError("The passive design needs lmi.mu")
            # the port of the passive design doubles as the instability port
            options = replace(options, instability_ports=None)
            return design_passive(system.A, system.B1, system.C1, rate, self.lmi.mu, options)
        return design_2dominant(system.A, system.B1, rate, options)
