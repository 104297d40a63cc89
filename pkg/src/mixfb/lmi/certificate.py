"""JSON certificate documents for LMI designs and their re-verification."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from mixfb.error import InertiaMismatch, InvalidInput, ResidualViolation
from mixfb.lmi.design import DesignResult, build_problem
from mixfb.lmi.problem import DEFAULT_SOLVER, LMIProblem
from mixfb.lti import Inertia, eig_symmetric

CERTIFICATE_VERSION = 1

_ARRAY_PORTS = ("B2", "C2", "C", "instability_B2", "instability_C2")


def _listify(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def _array(value: Any, name: str) -> np.ndarray:
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"Certificate field {name} is not numeric") from exc
    if arr.ndim != 2:
        raise InvalidInput(f"Certificate field {name} must be a matrix")
    return arr


@dataclass(frozen=True, eq=False)
class Certificate:
    """Everything needed to re-check a design from scratch.

    Attributes:
        kind: Design kind, one of ``nominal``, ``robust``, ``passive``, ``precompensator``.
        rate: The rate ``lambda``.
        epsilon: Strictness margin.
        vertices: Hull vertex matrices.
        B: Control input column.
        ports: Port matrices and scalars of the constraint family.
        Y: Transformed Lyapunov matrix.
        Z: Transformed gain.
        K: Feedback row.
        P: ``Y^-1``.
        inertia: Inertia of ``Y``.
        residuals: Largest eigenvalue of every constraint plus its margin.
        seed: Seed of the affinity probe.
        solver: cvxpy solver name.
        version: Document version.
    """

    kind: str
    rate: float
    epsilon: float
    vertices: List[np.ndarray]
    B: np.ndarray
    ports: Dict[str, Any]
    Y: np.ndarray
    Z: np.ndarray
    K: np.ndarray
    P: np.ndarray
    inertia: Inertia
    residuals: Dict[str, float]
    seed: int = 0
    solver: str = DEFAULT_SOLVER
    version: int = CERTIFICATE_VERSION

    @classmethod
    def from_design(cls, result: DesignResult) -> "Certificate":
        """Capture a fresh design."""
        problem = result.problem
        return cls(
            kind=result.kind,
            rate=problem.rate,
            epsilon=problem.epsilon,
            vertices=list(problem.vertices),
            B=result.B,
            ports=dict(result.ports),
            Y=result.Y,
            Z=result.Z,
            K=result.K,
            P=result.P,
            inertia=eig_symmetric(result.Y)[1],
            residuals=dict(result.solution.residuals),
            seed=problem.seed,
            solver=problem.solver,
        )

    def to_dict(self) -> Dict[str, Any]:
        """Plain JSON-compatible mapping; floats keep their shortest repr."""
        return {
            "version": self.version,
            "kind": self.kind,
            "lambda": self.rate,
            "epsilon": self.epsilon,
            "vertices": [V.tolist() for V in self.vertices],
            "B": self.B.tolist(),
            "ports": {key: _listify(val) for key, val in self.ports.items()},
            "Y": self.Y.tolist(),
            "Z": self.Z.tolist(),
            "K": self.K.tolist(),
            "P": self.P.tolist(),
            "inertia": list(self.inertia),
            "residuals": dict(self.residuals),
            "seed": self.seed,
            "solver": self.solver,
        }

    def to_json(self) -> str:
        """Serialize with sorted keys so that equal certificates give equal bytes."""
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, doc: Dict[str, Any]) -> "Certificate":
        """Parse a certificate mapping.

        Raises:
            InvalidInput: On a missing field, a wrong version or a malformed matrix.
        """
        try:
            version = int(doc["version"])
            if version != CERTIFICATE_VERSION:
                raise InvalidInput(f"Unsupported certificate version {version}")
            ports = dict(doc.get("ports", {}))
            for key in _ARRAY_PORTS:
                if ports.get(key) is not None:
                    ports[key] = _array(ports[key], key)
            return cls(
                kind=str(doc["kind"]),
                rate=float(doc["lambda"]),
                epsilon=float(doc["epsilon"]),
                vertices=[_array(V, "vertices") for V in doc["vertices"]],
                B=_array(doc["B"], "B"),
                ports=ports,
                Y=_array(doc["Y"], "Y"),
                Z=_array(doc["Z"], "Z"),
                K=_array(doc["K"], "K"),
                P=_array(doc["P"], "P"),
                inertia=Inertia(*(int(i) for i in doc["inertia"])),
                residuals={str(k): float(v) for k, v in doc["residuals"].items()},
                seed=int(doc.get("seed", 0)),
                solver=str(doc.get("solver", DEFAULT_SOLVER)),
                version=version,
            )
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"Malformed certificate: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        """Parse a certificate document.

        Raises:
            InvalidInput: If the text is not a valid certificate.
        """
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"Certificate is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise InvalidInput("Certificate must be a JSON object")
        return cls.from_dict(doc)

    def rebuild_problem(self, vertices: Optional[Sequence[np.ndarray]] = None) -> LMIProblem:
        """The constraint family the certificate claims to satisfy.

        Args:
            vertices: Replacement vertices (e.g. from a configuration); they must
                match the certificate's state dimension.

        Raises:
            InvalidInput: On a dimension mismatch.
        """
        chosen = self.vertices if vertices is None else [np.atleast_2d(V) for V in vertices]
        n = self.Y.shape[0]
        if any(V.shape != (n, n) for V in chosen) or self.B.shape[0] != n:
            raise InvalidInput(
                f"Certificate has {n} states; vertices have shapes "
                f"{sorted({V.shape for V in chosen})}"
            )
        return build_problem(
            self.kind, chosen, self.B, self.rate, self.ports, self.epsilon, self.seed, self.solver
        )


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of :func:`reverify`.

    Attributes:
        residuals: Recomputed largest eigenvalue of every constraint plus its margin.
        inertia: Recomputed inertia of ``Y``.
        gain_consistent: Whether ``K`` equals ``Z Y^-1``.
    """

    residuals: Dict[str, float] = field(default_factory=dict)
    inertia: Optional[Inertia] = None
    gain_consistent: bool = True

    @property
    def max_residual(self) -> float:
        """Worst residual."""
        return max(self.residuals.values())


def reverify(
    cert: Certificate, vertices: Optional[Sequence[np.ndarray]] = None
) -> VerificationReport:
    """Recompute every residual and the inertia of ``Y`` from scratch.

    Raises:
        InvalidInput: If ``vertices`` do not match the certificate's dimension.
        ResidualViolation: If a residual is above zero or ``K != Z Y^-1``.
        InertiaMismatch: If ``Y`` has the wrong inertia.
    """
    problem = cert.rebuild_problem(vertices)
    values = {"Y": cert.Y, "Z": cert.Z}
    residuals = problem.residuals(values)
    bad = problem.violations(values)
    if bad:
        raise ResidualViolation(f"Residuals above zero at margin {cert.epsilon:g}: {bad}")
    K = cert.Z @ np.linalg.inv(cert.Y)
    consistent = bool(np.allclose(K, cert.K, rtol=1e-8, atol=1e-10))
    if not consistent:
        raise ResidualViolation("K does not equal Z Y^-1")
    _, inertia = eig_symmetric(cert.Y)
    p = 0 if cert.kind == "precompensator" else 2
    n = cert.Y.shape[0]
    if inertia != (p, 0, n - p) or inertia != cert.inertia:
        raise InertiaMismatch(f"Y has inertia {inertia}, expected ({p},0,{n - p})")
    return VerificationReport(residuals=residuals, inertia=inertia, gain_consistent=consistent)
