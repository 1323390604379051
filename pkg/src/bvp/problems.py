"""
Boundary value problems and their reduction to (perturbed) Hammerstein form.

Two families are covered:

    periodic:   x'' + omega^2 x = lam f(t, x),  x(0) = x(1), x'(0) = x'(1)
    nonlocal:   x'' = -lam f(t, x),             x(0) = alpha[x], x(1) = beta[x]

where alpha and beta are Riemann-Stieltjes functionals (integral of A dx or of
x dA) or finite point combinations.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Optional

import numpy as np

from ..functions.bvfun import BVFunction, Domain, GridFunction, bv_norm, identity, variation
from ..functions.stieltjes import Functional, FunctionalKind, functional_norm_witness, witness_family
from ..models.kernels import OMEGA_GUARD, Kernel
from ..models.nonlinearity import Nonlinearity
from ..models.operators import LinearPerturbation, PerturbedProblem, f1_norm_bound, perturbation_gap
from ..models.reports import ResidualReport, TheoremCheck, Verdict
from ..solvers.hypotheses import lw_hypothesis_check
from ..utils.errors import MalformedInputError

logger = logging.getLogger(__name__)

MIN_VERIFY_GRID = 8


class BVPKind(Enum):
    PERIODIC = "periodic"
    NONLOCAL_DX = "nonlocal_dx"
    NONLOCAL_DA = "nonlocal_dA"
    MULTIPOINT = "multipoint"


@dataclass(frozen=True, eq=False)
class BVPSpec:
    """
    A boundary value problem from the catalog or a problem-spec document.

    Args:
        name: Identifier used in logs and reports.
        kind: Boundary condition family.
        nonlinearity: f(t, u).
        lam: Parameter in front of f.
        omega: Frequency of the periodic problem.
        A, B: BV functions of the nonlocal conditions.
        alpha, beta: Point functionals of the multipoint conditions.
        v, w: Shape functions of the reduced equation; default 1 - t and t.
        r: Radius used by the periodic theorem and the contraction probe.
        exact_solution: Polynomial coefficients of x / lam, highest power first.
        contraction_bound: Known Lipschitz constant of the solution operator on the r-ball.
    """

    name: str
    kind: BVPKind
    nonlinearity: Nonlinearity
    lam: float = 1.0
    omega: Optional[float] = None
    A: Optional[BVFunction] = None
    B: Optional[BVFunction] = None
    alpha: Optional[Functional] = None
    beta: Optional[Functional] = None
    v: Optional[BVFunction] = None
    w: Optional[BVFunction] = None
    r: Optional[float] = None
    exact_solution: Optional[tuple[float, ...]] = None
    contraction_bound: Optional[float] = None
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if isinstance(self.kind, str):
            try:
                object.__setattr__(self, "kind", BVPKind(self.kind))
            except ValueError:
                raise MalformedInputError(f"unknown problem kind {self.kind!r}") from None
        if not math.isfinite(self.lam):
            raise MalformedInputError("lam must be finite")

        if self.kind == BVPKind.PERIODIC:
            if self.omega is None or not self.omega > 0:
                raise MalformedInputError(f"periodic problem needs omega > 0, got {self.omega!r}")
            if abs(math.sin(self.omega / 2.0)) <= OMEGA_GUARD:
                raise MalformedInputError(
                    f"omega={self.omega} is too close to a multiple of 2*pi", label="omega != 2n*pi")
        elif self.kind in (BVPKind.NONLOCAL_DX, BVPKind.NONLOCAL_DA):
            if not isinstance(self.A, BVFunction) or not isinstance(self.B, BVFunction):
                raise MalformedInputError(f"{self.kind.value} problem needs BV functions A and B")
        else:
            for role, functional in (("alpha", self.alpha), ("beta", self.beta)):
                if functional is None or functional.kind != FunctionalKind.POINTS:
                    raise MalformedInputError(f"multipoint problem needs a point functional {role}")
                for _, node in functional.nodes:
                    if not 0.0 < float(node) < 1.0:
                        raise MalformedInputError(f"multipoint node {node} of {role} must lie in (0, 1)")

        if self.r is not None and not self.r > 0:
            raise MalformedInputError(f"radius must be positive, got {self.r}")

    def with_lam(self, lam: float) -> BVPSpec:
        return replace(self, lam=lam)

    def exact(self, t):
        """Stored closed-form solution at t, or None."""
        if self.exact_solution is None:
            return None
        return self.lam * np.polyval(self.exact_solution, np.asarray(t, dtype=float))

    def exact_grid(self, n: int) -> Optional[GridFunction]:
        if self.exact_solution is None:
            return None
        return GridFunction.from_callable(self.exact, n)

    def to_dict(self) -> dict[str, Any]:
        result: dict[str, Any] = {"name": self.name, "kind": self.kind.value, "lam": repr(float(self.lam))}
        if self.omega is not None:
            result["omega"] = repr(self.omega)
        if self.A is not None:
            result["A"] = self.A.to_dict()
            result["B"] = self.B.to_dict()
        if self.alpha is not None:
            result["alpha"] = self.alpha.to_dict()
            result["beta"] = self.beta.to_dict()
        if self.v is not None or self.w is not None:
            result["v"] = self.v.to_dict() if self.v is not None else None
            result["w"] = self.w.to_dict() if self.w is not None else None
        if self.r is not None:
            result["r"] = repr(self.r)
        if self.exact_solution is not None:
            result["exact_solution"] = [repr(float(c)) for c in self.exact_solution]
        return result

    def __repr__(self) -> str:
        return f"BVPSpec({self.name!r}, kind={self.kind.value}, f={self.nonlinearity.name}, lam={self.lam:.6g})"


def reduce(b: BVPSpec) -> PerturbedProblem:
    """Equivalent equation x = alpha[x] (1 - t) + beta[x] t + lam * integral of k f."""
    if b.kind == BVPKind.PERIODIC:
        kernel = Kernel.periodic(b.omega)
        perturbation = LinearPerturbation.zero()
    else:
        kernel = Kernel.dirichlet()
        if b.kind == BVPKind.NONLOCAL_DX:
            alpha, beta = Functional.stieltjes_dx(b.A), Functional.stieltjes_dx(b.B)
        elif b.kind == BVPKind.NONLOCAL_DA:
            alpha, beta = Functional.stieltjes_dA(b.A), Functional.stieltjes_dA(b.B)
        else:
            alpha, beta = b.alpha, b.beta
        if b.v is None and b.w is None:
            perturbation = LinearPerturbation.standard(alpha, beta)
        else:
            v = b.v if b.v is not None else BVFunction.from_polynomial((1.0, -1.0))
            w = b.w if b.w is not None else identity()
            perturbation = LinearPerturbation(alpha, beta, v, w)
    logger.debug("Reduced %s to %r with %s functionals", b.name, kernel, perturbation.alpha.kind.value)
    return PerturbedProblem(kernel, b.nonlinearity, perturbation, b.lam, b.name)


# -- theorem checks -------------------------------------------------------------

def periodic_threshold(omega: float) -> float:
    """2 |sin(omega / 2)| / omega, the lower edge of the positivity window."""
    return 2.0 * abs(math.sin(omega / 2.0)) / omega


def _check_periodic(b: BVPSpec, n: int, max_grid: int) -> TheoremCheck:
    m = periodic_threshold(b.omega)
    r = b.r if b.r is not None else 1.0
    f = b.nonlinearity
    labels = []

    if r < 1.0:
        labels.append("(B3)")
    nonnegative = f.window_min(0.0, 1.0, 0.0, r)
    if nonnegative < 0.0:
        labels.append("(A1)")
    window = f.window_min(0.0, 1.0, m, r) if m <= r else -math.inf
    if not window > 0.0:
        labels.append("(B1)")

    details: dict[str, Any] = {
        "m": m,
        "r": r,
        "min_f_nonnegative_range": nonnegative,
        "kernel_nonnegative": Kernel.periodic(b.omega).is_nonnegative,
    }
    if not labels:
        report = lw_hypothesis_check(Kernel.periodic(b.omega), f, Domain.unit(), 1.0, m, r, n=n,
                                     max_grid=max_grid)
        details["bounding_constant"] = report.c
        details["hypotheses_passed"] = report.passed

    return TheoremCheck(
        problem=b.name,
        quantity="min f on 0 <= t <= 1, m <= |u| <= r",
        value=window,
        threshold=0.0,
        verdict=Verdict.of(not labels),
        labels=tuple(labels),
        details=details,
    )


def _check_dx(b: BVPSpec) -> TheoremCheck:
    value = abs((b.A - b.B).integral())
    L = reduce(b).perturbation
    return TheoremCheck(
        problem=b.name,
        quantity="|integral of (A - B) ds|",
        value=value,
        threshold=1.0,
        verdict=Verdict.of(value < 1.0),
        labels=() if value < 1.0 else ("(A8)",),
        details={"gap": perturbation_gap(L), "alpha_e": L.alpha_e, "beta_e": L.beta_e},
    )


def _check_dA(b: BVPSpec) -> TheoremCheck:
    var_A = variation(b.A)
    var_diff = variation(b.A - b.B)
    exact = var_A + var_diff
    value = float(exact)
    return TheoremCheck(
        problem=b.name,
        quantity="var A + var (A - B)",
        value=value,
        threshold=1.0,
        verdict=Verdict.of(value < 1.0),
        labels=() if value < 1.0 else ("(B6)",),
        details={"exact": str(exact), "var_A": float(var_A), "var_A_minus_B": float(var_diff)},
    )


def _f1_witness(L: LinearPerturbation, samples: int) -> float:
    witness = functional_norm_witness(L.alpha, witness_family(L.alpha, samples))
    diff = L.alpha_minus_beta
    if not diff.is_zero():
        witness += functional_norm_witness(diff, witness_family(diff, samples)) * float(bv_norm(L.w))
    return witness


def _check_multipoint(b: BVPSpec, samples: int) -> TheoremCheck:
    L = reduce(b).perturbation
    details: dict[str, Any] = {"alpha_e": L.alpha_e, "beta_e": L.beta_e, "gap": perturbation_gap(L)}
    if L.a7:
        value = perturbation_gap(L)
        return TheoremCheck(
            problem=b.name,
            quantity="|alpha[v] - beta[v]|",
            value=value,
            threshold=1.0,
            verdict=Verdict.of(value < 1.0),
            labels=() if value < 1.0 else ("(A8)",),
            details={**details, "path": "(A7)-(A8)"},
        )

    bound = float(f1_norm_bound(L))
    witness = _f1_witness(L, samples)
    details.update({"path": "(B6)", "witness": witness})
    if bound < 1.0:
        verdict = Verdict.PASS
    elif witness < 1.0:
        verdict = Verdict.INCONCLUSIVE
        logger.warning("%s: ||F1|| upper bound %.6g >= 1 but witness %.6g < 1", b.name, bound, witness)
    else:
        verdict = Verdict.FAIL
    return TheoremCheck(
        problem=b.name,
        quantity="||alpha|| + ||alpha - beta|| ||w||_BV",
        value=bound,
        threshold=1.0,
        verdict=verdict,
        labels=() if verdict == Verdict.PASS else ("(A7)", "(B6)"),
        details=details,
    )


def check_theorem(b: BVPSpec, n: int = 256, witness_samples: int = 64,
                  max_grid: int = 1024) -> TheoremCheck:
    """
    Evaluate the existence-theorem hypothesis that applies to the problem.

    Nonlocal quantities are computed by exact piecewise integration and
    variation, so they do not depend on how A and B are partitioned.
    """
    if b.kind == BVPKind.PERIODIC:
        check = _check_periodic(b, n, max_grid)
    elif b.kind == BVPKind.NONLOCAL_DX:
        check = _check_dx(b)
    elif b.kind == BVPKind.NONLOCAL_DA:
        check = _check_dA(b)
    else:
        check = _check_multipoint(b, witness_samples)
    logger.info("%s", check)
    return check


# -- verification ---------------------------------------------------------------

def _one_sided_derivatives(values: np.ndarray, h: float) -> tuple[float, float]:
    left = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h)
    right = (3.0 * values[-1] - 4.0 * values[-2] + values[-3]) / (2.0 * h)
    return float(left), float(right)


def verify_solution(b: BVPSpec, x: GridFunction) -> ResidualReport:
    """
    Residuals of x in the original differential form.

    The ODE residual uses central second differences at interior nodes. Boundary
    residuals use second-order one-sided differences for periodic derivatives and
    the reduced functionals for nonlocal conditions.
    """
    if x.n < MIN_VERIFY_GRID:
        raise MalformedInputError(f"verification needs a grid with n >= {MIN_VERIFY_GRID}, got n={x.n}")
    h = 1.0 / x.n
    values = x.values
    nodes = x.nodes
    second = (values[:-2] - 2.0 * values[1:-1] + values[2:]) / h ** 2
    forcing = b.lam * np.asarray(b.nonlinearity(nodes[1:-1], values[1:-1]), dtype=float)

    if b.kind == BVPKind.PERIODIC:
        ode = second + b.omega ** 2 * values[1:-1] - forcing
        d0, d1 = _one_sided_derivatives(values, h)
        bc = {"x(0) - x(1)": abs(values[0] - values[-1]), "x'(0) - x'(1)": abs(d0 - d1)}
    else:
        ode = second + forcing
        L = reduce(b).perturbation
        bc = {"x(0) - alpha[x]": abs(values[0] - L.alpha(x)), "x(1) - beta[x]": abs(values[-1] - L.beta(x))}

    report = ResidualReport(ode_residual=float(np.max(np.abs(ode))), bc_residuals={k: float(v) for k, v in bc.items()})
    logger.info("%s: ODE residual %.3e, boundary residual %.3e", b.name, report.ode_residual, report.bc_max)
    return report
