"""
The operator pair of the perturbed Hammerstein equation

    x = F1(x) + lam * F2(x),
    F1(x) = alpha[x] v + beta[x] w,
    F2(x)(t) = integral of k(t, s) f(s, x(s)) ds,

with the norm and spectral-radius estimates and the existence constants built
from them.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from numbers import Real
from typing import Optional

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import simpson

from ..functions.bvfun import BVFunction, GridFunction, bv_norm, identity
from ..functions.stieltjes import (
    Functional,
    difference,
    functional_norm_witness,
    witness_family,
)
from ..utils.errors import ConvergenceError, HypothesisError, MalformedInputError
from .kernels import Kernel, t_variation, continuity_modulus
from .nonlinearity import Nonlinearity
from .reports import KrasReport, Verdict

logger = logging.getLogger(__name__)

GAUSS_POINTS = 8
A7_TOL = 1e-12
A9_TOL = 1e-12
MAX_NEUMANN_TERMS = 10000


# -- F2 -------------------------------------------------------------------------

@lru_cache(maxsize=32)
def nystrom_weights(k: Kernel, n: int) -> np.ndarray:
    """
    Product-integration matrix W with F2(x)(t_i) ~ sum_j W_ij f(t_j, x_j).

    f is replaced by its Simpson interpolant on the panels [t_2j, t_2j+2]; the
    kernel moments against the three Lagrange basis functions are integrated
    per interval with Gauss-Legendre, so the diagonal is always a split point.
    """
    if n < 2 or n % 2:
        raise MalformedInputError(f"Nystrom discretization needs an even grid, got n={n}")
    nodes = np.linspace(0.0, 1.0, n + 1)
    h = 1.0 / n
    gx, gw = leggauss(GAUSS_POINTS)

    lefts = nodes[:-1]
    s = (lefts[:, None] + 0.5 * h * (gx[None, :] + 1.0)).ravel()
    quad_w = np.tile(0.5 * h * gw, n)

    interval = np.repeat(np.arange(n), GAUSS_POINTS)
    panel_start = 2 * (interval // 2)
    xi = (s - nodes[panel_start]) / h
    basis = np.zeros((s.size, n + 1))
    rows = np.arange(s.size)
    basis[rows, panel_start] = 0.5 * (xi - 1.0) * (xi - 2.0)
    basis[rows, panel_start + 1] = -xi * (xi - 2.0)
    basis[rows, panel_start + 2] = 0.5 * xi * (xi - 1.0)

    K = k(nodes[:, None], s[None, :])
    return (K * quad_w[None, :]) @ basis


def apply_F2(k: Kernel, f: Nonlinearity, x: GridFunction) -> GridFunction:
    """Nystrom image t_i -> integral of k(t_i, s) f(s, x(s)) ds."""
    W = nystrom_weights(k, x.n)
    return GridFunction(W @ f(x.nodes, x.values))


def f2_integral(k: Kernel, f: Nonlinearity, n: int = 256) -> float:
    """integral over [0, 1] of (m(s) + |k(0, s)|) phi(s) ds by composite Simpson."""
    s = np.linspace(0.0, 1.0, n + 1)
    integrand = (k.variation_majorant(s) + np.abs(k(0.0, s))) * f.phi_at(s)
    return float(simpson(integrand, x=s))


def f2_bv_bound(k: Kernel, f: Nonlinearity, R: float, n: int = 256) -> float:
    """psi(R) * integral of (m + |k(0, .)|) phi: bounds ||F2(x)||_BV for ||x||_BV <= R."""
    if R <= 0:
        raise MalformedInputError(f"radius must be positive, got {R}")
    return f.psi(R) * f2_integral(k, f, n)


# -- F1 -------------------------------------------------------------------------

def _mul(a: Real, b: Real) -> Real:
    """Product that keeps exact operands exact when the other factor is 1 or 0."""
    if a == 0 or b == 0:
        return 0
    if b == 1:
        return a
    if a == 1:
        return b
    return a * b


@dataclass(frozen=True, eq=False)
class LinearPerturbation:
    """F1(x) = alpha[x] v + beta[x] w with v + w = 1."""

    alpha: Functional
    beta: Functional
    v: BVFunction
    w: BVFunction

    def __post_init__(self):
        nodes = np.linspace(0.0, 1.0, 257)
        defect = float(np.max(np.abs(self.v(nodes) + self.w(nodes) - 1.0)))
        if defect > A9_TOL:
            raise MalformedInputError(f"v + w differs from 1 by {defect:.3g}", label="(A9)")

    @classmethod
    def zero(cls) -> LinearPerturbation:
        return cls(Functional.zero(), Functional.zero(), BVFunction.from_polynomial((1.0, -1.0)), identity())

    @classmethod
    def standard(cls, alpha: Functional, beta: Functional) -> LinearPerturbation:
        """Shape functions v = 1 - t, w = t of the two-point reductions."""
        return cls(alpha, beta, BVFunction.from_polynomial((1.0, -1.0)), identity())

    @cached_property
    def alpha_minus_beta(self) -> Functional:
        return difference(self.alpha, self.beta)

    @cached_property
    def G(self) -> np.ndarray:
        """Matrix of F1 on span{v, w}."""
        return np.array([[self.alpha(self.v), self.alpha(self.w)],
                         [self.beta(self.v), self.beta(self.w)]])

    @cached_property
    def alpha_e(self) -> float:
        return self.alpha.value_on_e()

    @cached_property
    def beta_e(self) -> float:
        return self.beta.value_on_e()

    @property
    def a7(self) -> bool:
        return abs(self.alpha_e) <= A7_TOL and abs(self.beta_e) <= A7_TOL

    @property
    def a8(self) -> bool:
        return perturbation_gap(self) < 1.0

    @cached_property
    def u(self) -> BVFunction:
        """alpha[v] v + beta[v] w, the direction F1 squares into."""
        return float(self.G[0, 0]) * self.v + float(self.G[1, 0]) * self.w

    def is_zero(self) -> bool:
        return self.alpha.is_zero() and self.beta.is_zero()


def apply_F1(L: LinearPerturbation, x: BVFunction | GridFunction) -> BVFunction | GridFunction:
    a, b = L.alpha(x), L.beta(x)
    if isinstance(x, GridFunction):
        nodes = x.nodes
        return GridFunction(a * L.v(nodes) + b * L.w(nodes))
    if isinstance(x, BVFunction):
        return a * L.v + b * L.w
    raise MalformedInputError(f"F1 cannot act on {type(x).__name__}")


def perturbation_gap(L: LinearPerturbation) -> float:
    """|alpha[v] - beta[v]|."""
    return float(abs(L.G[0, 0] - L.G[1, 0]))


def f1_norm_bound(L: LinearPerturbation) -> Real:
    """||alpha|| + ||alpha - beta|| * ||w||_BV using certified functional upper bounds."""
    first = L.alpha.norm_upper
    second = _mul(L.alpha_minus_beta.norm_upper, bv_norm(L.w))
    if first == 0:
        return second
    if second == 0:
        return first
    return first + second


def f1_power_bound(L: LinearPerturbation, n: int) -> float:
    """
    Bound for ||F1^(n+2)||.

    With alpha[e] = beta[e] = 0 this is ||alpha - beta|| |alpha[v] - beta[v]|^n ||u||_BV
    (0^0 = 1); otherwise the submultiplicative ||F1||^(n+2).
    """
    if n < 0:
        raise MalformedInputError("power index must be nonnegative")
    if L.a7:
        return float(L.alpha_minus_beta.norm_upper) * perturbation_gap(L) ** n * float(bv_norm(L.u))
    return float(f1_norm_bound(L)) ** (n + 2)


def f1_iterate_bound(L: LinearPerturbation, n: int) -> float:
    """Bound for ||F1^n||, n >= 0."""
    if n == 0:
        return 1.0
    if n == 1:
        return float(f1_norm_bound(L))
    return f1_power_bound(L, n - 2)


def spectral_radius_bound(L: LinearPerturbation) -> float:
    if L.a7:
        return perturbation_gap(L)
    return float(f1_norm_bound(L))


def spectral_radius_estimate(L: LinearPerturbation, iterations: int = 200, seed: int = 0) -> float:
    """Power iteration on the 2x2 matrix of F1 on span{v, w}; diagnostics only."""
    G = L.G
    if not np.any(G):
        return 0.0
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(2)
    estimate = 0.0
    for _ in range(iterations):
        image = G @ z
        norm = float(np.linalg.norm(image))
        if norm == 0.0:
            return 0.0
        # the ratio of successive norms converges to the dominant modulus
        estimate = norm / float(np.linalg.norm(z))
        z = image / norm
    return estimate


def _neumann_tail(L: LinearPerturbation, N: int) -> float:
    """Certified bound for the sum over n > N of ||F1^n||."""
    if L.a7:
        gap = perturbation_gap(L)
        if gap >= 1.0:
            return math.inf
        scale = float(L.alpha_minus_beta.norm_upper) * float(bv_norm(L.u))
        if N == 0:
            return float(f1_norm_bound(L)) + scale / (1.0 - gap)
        return scale * gap ** (N - 1) / (1.0 - gap)
    q = float(f1_norm_bound(L))
    if q >= 1.0:
        return math.inf
    return q ** (N + 1) / (1.0 - q)


def neumann_terms(L: LinearPerturbation, y_norm: float, tol: float) -> int:
    """Smallest N whose certified tail times ||y||_BV is below tol."""
    if y_norm == 0.0 or L.is_zero():
        return 0
    if spectral_radius_bound(L) >= 1.0:
        label = "(A8)" if L.a7 else "(B6)"
        raise HypothesisError("Neumann series for (I - F1)^-1 is not certified", labels=(label,))
    for N in range(MAX_NEUMANN_TERMS + 1):
        if _neumann_tail(L, N) * y_norm < tol:
            return N
    raise ConvergenceError(f"Neumann series needs more than {MAX_NEUMANN_TERMS} terms")


def neumann_apply(L: LinearPerturbation, y: GridFunction, tol: float) -> GridFunction:
    """
    x = sum over n <= N of F1^n y, with ||x - F1 x - y|| < tol certified by the
    tail bound. The series is summed on span{v, w}: F1^n y = (v, w) G^(n-1) (alpha[y], beta[y]).
    """
    y_norm = float(bv_norm(y.to_bv()))
    N = neumann_terms(L, y_norm, tol)
    if N == 0:
        return y
    term = np.array([L.alpha(y), L.beta(y)])
    coeffs = np.zeros(2)
    for _ in range(N):
        coeffs += term
        term = L.G @ term
    logger.debug("Neumann series with %d terms (||y||_BV=%.3g)", N, y_norm)
    nodes = y.nodes
    return GridFunction(y.values + coeffs[0] * L.v(nodes) + coeffs[1] * L.w(nodes))


# -- constants ------------------------------------------------------------------

def b5_radius(lam: float, c: float, integral: float, f: Nonlinearity) -> Optional[float]:
    """
    Smallest r > 0 in the psi table with |lam| psi(r) <= r / (c (1 + I)).

    The slack r / (c (1 + I)) - |lam| psi(r) is piecewise linear between table
    nodes, so the first sign change is located exactly.
    """
    if not math.isfinite(c):
        return None
    r, psi = (np.asarray(a) for a in zip(*f.psi_table))
    slack = r / (c * (1.0 + integral)) - abs(lam) * psi
    for i in range(1, r.size):
        if slack[i] < 0.0:
            continue
        if slack[i - 1] >= 0.0:
            # only reachable at r = 0 with psi(0) = 0: the first positive node
            return float(r[i])
        root = r[i - 1] + (r[i] - r[i - 1]) * (-slack[i - 1]) / (slack[i] - slack[i - 1])
        return float(root)
    return None


SUBLINEAR_OCTAVES = 6


def sublinear_ratios(f: Nonlinearity, octaves: int = SUBLINEAR_OCTAVES) -> np.ndarray:
    """psi(R) / R at R = r_max 2^-j, j = octaves, ..., 0 (increasing R)."""
    R = f.r_max * 2.0 ** -np.arange(octaves, -1, -1)
    return np.asarray(f.psi(R), dtype=float) / R


def sublinear_check(f: Nonlinearity, octaves: int = SUBLINEAR_OCTAVES) -> bool:
    """
    Sampled test of psi(r) / r -> 0 over the top octaves of the psi table.

    The ratio must be nonincreasing along the geometric sequence and fall to at
    most half its starting value. This is a heuristic on [r_max 2^-octaves, r_max];
    the psi table does not extend to infinity, so no limit is certified.
    """
    ratios = sublinear_ratios(f, octaves)
    if ratios[-1] == 0.0:
        return True
    monotone = bool(np.all(np.diff(ratios) <= 1e-12 * ratios[:-1]))
    return monotone and bool(ratios[-1] <= 0.5 * ratios[0])


def kras_constants(L: LinearPerturbation, k: Kernel, f: Nonlinearity,
                   lam: Optional[float] = None, n: int = 256, witness_samples: int = 64) -> KrasReport:
    """
    Every constant of the perturbed existence theorem with per-assumption verdicts.

    c bounds ||(I - F1)^-1||: 1 + ||alpha|| + ||alpha - beta|| ||w|| + ||alpha - beta|| ||u|| / (1 - gap)
    when alpha[e] = beta[e] = 0 and the gap is below one, else 1 / (1 - ||F1||) when ||F1|| < 1.
    lambda0 = 1 / (c (psi(1) + 1) (1 + I)) with I = integral of (m + |k(0, .)|) phi.
    """
    norm_alpha = float(L.alpha.norm_upper)
    norm_diff = float(L.alpha_minus_beta.norm_upper)
    norm_w = float(bv_norm(L.w))
    norm_u = float(bv_norm(L.u))
    gap = perturbation_gap(L)
    norm_f1 = float(f1_norm_bound(L))
    notes = []

    if L.is_zero():
        witness = 0.0
    else:
        witness = functional_norm_witness(L.alpha, witness_family(L.alpha, witness_samples))
        diff = L.alpha_minus_beta
        witness += functional_norm_witness(diff, witness_family(diff, witness_samples)) * norm_w

    verdicts: dict[str, Verdict] = {
        "(A7)": Verdict.of(L.a7),
        "(A8)": Verdict.of(gap < 1.0),
        "(A9)": Verdict.PASS,
    }
    if norm_f1 < 1.0:
        verdicts["(B6)"] = Verdict.PASS
    elif witness < 1.0:
        verdicts["(B6)"] = Verdict.INCONCLUSIVE
        notes.append(f"(B6): upper bound {norm_f1:.6g} >= 1 but witness bound {witness:.6g} < 1")
    else:
        verdicts["(B6)"] = Verdict.FAIL

    if L.a7 and gap < 1.0:
        c = 1.0 + norm_alpha + norm_diff * norm_w + norm_diff * norm_u / (1.0 - gap)
        c_path = "(A7)-(A8)"
    elif norm_f1 < 1.0:
        c = 1.0 / (1.0 - norm_f1)
        c_path = "(B6)"
    else:
        c = math.inf
        c_path = "none"
        notes.append("neither (A7)-(A8) nor (B6) holds; (I - F1)^-1 is not certified")

    growth_ok, excess = f.verify_growth()
    verdicts["(A10)"] = Verdict.of(growth_ok)
    if not growth_ok:
        notes.append(f"(A10): |f| exceeds phi * psi by {excess:.3g} on the sampling grid")
    verdicts["(A11)"] = Verdict.of(sublinear_check(f))
    if verdicts["(A11)"] == Verdict.FAIL:
        notes.append("(A11): psi(r) / r does not decrease over the top of the psi table")

    s_nodes = np.linspace(0.0, 1.0, 33)
    majorant = k.variation_majorant(s_nodes)
    variations = np.array([t_variation(k, s) for s in s_nodes])
    verdicts["(A12)"] = Verdict.of(bool(np.all(variations <= majorant + 1e-12)))

    delta = 1e-3
    phi_mass = float(simpson(f.phi.values, x=f.phi.nodes))
    moduli = [continuity_modulus(k, f.phi, tau, delta, n) for tau in (0.0, 0.25, 0.5, 0.75, 1.0)]
    modulus_bound = k.lipschitz_t * delta * phi_mass
    verdicts["(A13)"] = Verdict.of(max(moduli) <= modulus_bound * (1.0 + 1e-6) + 1e-12)

    integral = f2_integral(k, f, n)
    psi_one = f.psi(1.0)
    lambda0 = 1.0 / (c * (psi_one + 1.0) * (1.0 + integral)) if math.isfinite(c) else 0.0

    target = lambda0 if lam is None else lam
    radius = b5_radius(target, c, integral, f)
    verdicts["(B5)"] = Verdict.of(radius is not None)
    if radius is None:
        notes.append(f"(B5): no r in [0, {f.r_max:g}] with |lam| psi(r) <= r / (c (1 + I)) at lam={target:.6g}")

    report = KrasReport(
        norm_alpha=norm_alpha,
        norm_alpha_minus_beta=norm_diff,
        norm_w=norm_w,
        norm_u=norm_u,
        gap=gap,
        norm_F1_bound=norm_f1,
        norm_F1_witness=witness,
        spectral_radius_bound=spectral_radius_bound(L),
        c=c,
        integral_I=integral,
        psi_one=psi_one,
        lambda0=lambda0,
        lam=lam,
        psi_r_feasible_r=radius,
        c_path=c_path,
        verdicts=verdicts,
        notes=notes,
    )
    logger.info("Existence constants: %s", report)
    return report


@dataclass(frozen=True, eq=False)
class PerturbedProblem:
    """x = F1(x) + lam * F2(x)."""

    kernel: Kernel
    nonlinearity: Nonlinearity
    perturbation: LinearPerturbation
    lam: float
    name: str = "problem"

    def __post_init__(self):
        if not math.isfinite(self.lam):
            raise MalformedInputError("lam must be finite")

    def with_lam(self, lam: float) -> PerturbedProblem:
        return PerturbedProblem(self.kernel, self.nonlinearity, self.perturbation, lam, self.name)

    def F2(self, x: GridFunction) -> GridFunction:
        return apply_F2(self.kernel, self.nonlinearity, x)

    def defect(self, x: GridFunction) -> float:
        """||x - F1(x) - lam F2(x)||_inf."""
        image = apply_F1(self.perturbation, x) + self.lam * self.F2(x)
        return (x - image).sup_norm()

    def constants(self, n: int = 256) -> KrasReport:
        return kras_constants(self.perturbation, self.kernel, self.nonlinearity, self.lam, n)
