from dataclasses import dataclass, field, asdict
from enum import Enum
from typing import Any, Optional

import numpy as np

from ..functions.bvfun import GridFunction


class Verdict(Enum):
    """Outcome of a single hypothesis check."""
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"
    NOT_APPLICABLE = "n/a"

    @classmethod
    def of(cls, condition: bool) -> "Verdict":
        return cls.PASS if condition else cls.FAIL


class SolveStatus(Enum):
    CONVERGED = "converged"
    NON_CONVERGED = "non_converged"
    DIVERGED = "diverged"


def _plain(value: Any) -> Any:
    """Make report values JSON-friendly."""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return repr(value)
    if hasattr(value, "numerator") and not isinstance(value, (int, float, bool)):
        return float(value)
    return value


def failed_labels(verdicts: dict[str, Verdict]) -> tuple[str, ...]:
    return tuple(label for label, verdict in verdicts.items() if verdict == Verdict.FAIL)


@dataclass
class KrasReport:

    # Functional and perturbation bounds
    norm_alpha: float
    norm_alpha_minus_beta: float
    norm_w: float
    norm_u: float  # ||alpha[v] v + beta[v] w||_BV
    gap: float  # |alpha[v] - beta[v]|
    norm_F1_bound: float
    norm_F1_witness: float
    spectral_radius_bound: float

    # Theorem constants
    c: float  # bound for ||(I - F1)^-1||; inf when no path applies
    integral_I: float  # integral of (m(s) + |k(0, s)|) phi(s) ds
    psi_one: float
    lambda0: float
    lam: Optional[float] = None
    psi_r_feasible_r: Optional[float] = None
    c_path: str = "none"  # "(A7)-(A8)", "(B6)" or "none"

    verdicts: dict[str, Verdict] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.verdicts = {k: Verdict(v) if isinstance(v, str) else v for k, v in self.verdicts.items()}

    @property
    def feasible(self) -> bool:
        return self.c_path != "none"

    @property
    def failed(self) -> tuple[str, ...]:
        return failed_labels(self.verdicts)

    def to_dict(self) -> dict[str, Any]:
        return _plain(asdict(self))

    def __str__(self) -> str:
        return (f"KrasReport(c={self.c:.6g} via {self.c_path}, lambda0={self.lambda0:.6g}, "
                f"r={self.psi_r_feasible_r}, failed={list(self.failed)})")


@dataclass
class LWReport:

    omega0: list[tuple[float, float]]
    measure: float
    p: float
    q: float
    theta: float
    m: float
    r: float

    # Constants from the bounding function and the positivity window
    eta1: float
    eta2: float
    c: float
    M: float
    delta: float
    g_r: float  # sup |f(t, u)| over the window |u| <= r
    a4_integral: float  # integral of Phi * g_r
    omega1_measure_lower: float  # m^p (1 - theta^p) r^-p
    m_upper: float  # r * c * mu(omega0)^(-1/q)
    verified_nodes: int = 0

    verdicts: dict[str, Verdict] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.verdicts = {k: Verdict(v) if isinstance(v, str) else v for k, v in self.verdicts.items()}

    def _group_passes(self, prefix: str) -> bool:
        group = [v for label, v in self.verdicts.items() if label.startswith(prefix)]
        return bool(group) and all(v in (Verdict.PASS, Verdict.NOT_APPLICABLE) for v in group)

    @property
    def passed(self) -> bool:
        """Either the direct assumptions or the continuous-data shortcut hold in full."""
        return self._group_passes("(A") or self._group_passes("(B")

    @property
    def failed(self) -> tuple[str, ...]:
        return failed_labels(self.verdicts)

    def to_dict(self) -> dict[str, Any]:
        result = _plain(asdict(self))
        result["passed"] = self.passed
        return result


@dataclass
class SolveResult:

    x: GridFunction
    lam: float
    residual_sup: float
    iterations: int
    status: SolveStatus
    tol: float

    # Constraint diagnostics (eigenpair search)
    cone_margin: Optional[float] = None
    seminorm_residual: Optional[float] = None
    range_ok: Optional[bool] = None

    # Existence assumptions that failed while the run went ahead (kras_solve)
    failed_hypotheses: tuple[str, ...] = ()

    history: list[float] = field(default_factory=list)
    diagnostics: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if isinstance(self.status, str):
            self.status = SolveStatus(self.status)
        if self.residual_sup < 0:
            raise ValueError(f"residual must be nonnegative, got {self.residual_sup}")

    @property
    def converged(self) -> bool:
        return self.status == SolveStatus.CONVERGED

    @property
    def certified(self) -> bool:
        """Accepted on its residual, independently of how the iteration ended."""
        return self.residual_sup <= self.tol

    def to_dict(self) -> dict[str, Any]:
        return {
            "lam": self.lam,
            "residual_sup": self.residual_sup,
            "iterations": self.iterations,
            "status": self.status.value,
            "converged": self.converged,
            "certified": self.certified,
            "tol": self.tol,
            "cone_margin": self.cone_margin,
            "seminorm_residual": self.seminorm_residual,
            "range_ok": self.range_ok,
            "failed_hypotheses": list(self.failed_hypotheses),
            "grid": self.x.n,
            "sup_norm": self.x.sup_norm(),
            "diagnostics": _plain(self.diagnostics),
        }

    def __repr__(self) -> str:
        return (f"SolveResult(status={self.status.value}, lam={self.lam:.6g}, "
                f"residual={self.residual_sup:.3g}, iterations={self.iterations})")


@dataclass
class TheoremCheck:

    problem: str
    quantity: str  # human-readable name of the tested quantity
    value: float
    threshold: float
    verdict: Verdict
    labels: tuple[str, ...] = ()
    details: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if isinstance(self.verdict, str):
            self.verdict = Verdict(self.verdict)

    @property
    def passed(self) -> bool:
        return self.verdict == Verdict.PASS

    def to_dict(self) -> dict[str, Any]:
        return _plain(asdict(self))

    def __str__(self) -> str:
        return f"[{self.verdict.value.upper()}] {self.problem}: {self.quantity} = {self.value:.10g}"


@dataclass
class ResidualReport:

    ode_residual: float
    bc_residuals: dict[str, float] = field(default_factory=dict)

    @property
    def bc_max(self) -> float:
        return max(self.bc_residuals.values(), default=0.0)

    def passed(self, ode_tol: float, bc_tol: float) -> bool:
        return self.ode_residual <= ode_tol and self.bc_max <= bc_tol

    def to_dict(self) -> dict[str, Any]:
        return _plain(asdict(self))
