"""
Hypothesis checker for the cone-localized eigenpair theorem with a possibly
sign-changing kernel.

The direct assumptions are labelled (A1) g_r majorant, (A2) eta1 window,
(A3) kernel continuity against g_r, (A4) the bounding function Phi,
(A5) integrability of Phi g_r and (A6) the bound on m; the continuous-data
shortcut is (B1) positivity window, (B2) positive row-integral minimum and
(B3) the bound on m through ||k||_inf.
"""

import logging
import math

import numpy as np
from scipy.integrate import simpson

from ..functions.bvfun import Domain
from ..models.kernels import Kernel, build_bounding, continuity_modulus, row_integrals, sup_abs
from ..models.nonlinearity import Nonlinearity
from ..models.reports import LWReport, Verdict
from ..utils.errors import HypothesisError, MalformedInputError

logger = logging.getLogger(__name__)

MODULUS_DELTA = 1e-3
# Relative slack on the m bounds; c itself comes from quadrature.
BOUND_SLACK = 1e-6


def conjugate_exponent(p: float) -> float:
    if p < 1 or math.isinf(p):
        raise MalformedInputError(f"p must lie in [1, inf), got {p}")
    return math.inf if p == 1 else p / (p - 1.0)


def measure_power(measure: float, q: float) -> float:
    """mu^(1/q), with mu^(1/inf) = 1."""
    return 1.0 if math.isinf(q) else measure ** (1.0 / q)


def _window_min(f: Nonlinearity, d: Domain, u_lo: float, u_hi: float) -> float:
    return min(f.window_min(lo, hi, u_lo, u_hi) for lo, hi in d.omega0)


def lw_hypothesis_check(k: Kernel, f: Nonlinearity, d: Domain, p: float, m: float, r: float,
                        theta: float = 0.5, n: int = 256, max_grid: int = 1024) -> LWReport:
    """
    Evaluate every hypothesis of the eigenpair theorem; failures become verdicts.

    Raises:
        MalformedInputError: p, m, r or theta outside their ranges.
    """
    q = conjugate_exponent(p)
    if not m > 0 or not r > 0:
        raise MalformedInputError(f"m and r must be positive, got m={m}, r={r}")
    if not 0 < theta < 1:
        raise MalformedInputError(f"theta must lie in (0, 1), got {theta}")

    mu = d.measure
    mu_q = measure_power(mu, q)
    level = m * mu ** (-1.0 / p)
    verdicts: dict[str, Verdict] = {}
    notes: list[str] = []

    s_nodes = np.linspace(0.0, 1.0, n + 1)
    row_min = float(np.min(row_integrals(k, s_nodes, d, n)))
    verdicts["(B2)"] = Verdict.of(row_min > 0)

    sup = sup_abs(k, max_grid)
    try:
        bounding = build_bounding(k, d, n, max_grid)
        c, eta2, verified = bounding.c, bounding.eta2, bounding.verified_nodes
        phi = bounding.phi
        verdicts["(A4)"] = Verdict.of(bounding.verified and eta2 > 0)
        notes.extend(bounding.failures)
        notes.append(f"(A4): verified at {verified} grid nodes")
    except HypothesisError as e:
        c, eta2, verified, phi = 0.0, 0.0, 0, None
        verdicts["(A4)"] = Verdict.FAIL
        notes.append(str(e))

    # (A1) with the constant majorant g_r = sup |f| over [0, 1] x [-r, r]
    g_r = float(np.max(f.window_sup(r).values))
    nonnegative = f.window_min(0.0, 1.0, 0.0, r) >= 0.0
    verdicts["(A1)"] = Verdict.of(math.isfinite(g_r) and nonnegative)
    if not nonnegative:
        notes.append("(A1): f takes negative values on [0, 1] x [-r, r]")

    lower = theta * level
    if lower > r:
        eta1 = 0.0
        notes.append(f"(A2): window theta*m*mu^(-1/p)={lower:.6g} exceeds r={r:.6g}")
    else:
        eta1 = _window_min(f, d, lower, r)
    verdicts["(A2)"] = Verdict.of(eta1 > 0)

    g_grid = f.window_sup(r)
    g_mass = float(simpson(g_grid.values, x=g_grid.nodes))
    moduli = [continuity_modulus(k, g_grid, tau, MODULUS_DELTA, n) for tau in np.linspace(0.0, 1.0, 5)]
    verdicts["(A3)"] = Verdict.of(max(moduli) <= k.lipschitz_t * MODULUS_DELTA * g_mass * (1 + 1e-6) + 1e-12)

    if phi is not None:
        a4_integral = float(simpson(phi.values * np.interp(phi.nodes, g_grid.nodes, g_grid.values), x=phi.nodes))
    else:
        a4_integral = math.inf
    verdicts["(A5)"] = Verdict.of(math.isfinite(a4_integral))

    m_upper = r * c / mu_q
    verdicts["(A6)"] = Verdict.of(0 < m <= m_upper * (1.0 + BOUND_SLACK))

    if level > r:
        verdicts["(B1)"] = Verdict.FAIL
        notes.append(f"(B1): window m*mu^(-1/p)={level:.6g} exceeds r={r:.6g}")
    else:
        verdicts["(B1)"] = Verdict.of(_window_min(f, d, level, r) > 0)
    b3_upper = r * row_min / (mu_q * sup) if sup > 0 else 0.0
    verdicts["(B3)"] = Verdict.of(0 < m <= b3_upper * (1.0 + BOUND_SLACK))

    M = mu_q / c if c > 0 else math.inf
    omega1_lower = m ** p * (1.0 - theta ** p) * r ** (-p)
    delta = c * eta1 * eta2 / mu_q * omega1_lower

    report = LWReport(
        omega0=list(d.omega0),
        measure=mu,
        p=p,
        q=q,
        theta=theta,
        m=m,
        r=r,
        eta1=eta1,
        eta2=eta2,
        c=c,
        M=M,
        delta=delta,
        g_r=g_r,
        a4_integral=a4_integral,
        omega1_measure_lower=omega1_lower,
        m_upper=m_upper,
        verified_nodes=verified,
        verdicts=verdicts,
        notes=notes,
    )
    if report.passed:
        logger.info("Eigenpair hypotheses hold: c=%.10g, M=%.6g, delta=%.6g", c, M, delta)
    else:
        logger.warning("Eigenpair hypotheses fail: %s", ", ".join(report.failed))
    return report
