"""
Normalized iteration for eigenpairs F(x) = lam x on the seminorm sphere
|x|_p = m, and an empirical Lipschitz probe for the Hammerstein operator.
"""

import logging
from typing import Optional

import numpy as np

from ..functions.bvfun import Domain, GridFunction, cone_check, lp_seminorm
from ..models.kernels import Kernel
from ..models.nonlinearity import Nonlinearity
from ..models.operators import apply_F2, nystrom_weights
from ..models.reports import SolveResult, SolveStatus
from ..utils.errors import ConvergenceError, HypothesisError, MalformedInputError
from .hypotheses import lw_hypothesis_check

logger = logging.getLogger(__name__)

DEGENERATE_LAMBDA = 1e-12


def _nondecreasing(values: list[float], window: int) -> bool:
    if len(values) < window:
        return False
    tail = values[-window:]
    return all(b >= a for a, b in zip(tail, tail[1:]))


def eigenpair_search(k: Kernel, f: Nonlinearity, d: Domain, m: float, p: float, r: float,
                     tol: float = 1e-8, max_iter: int = 10000, n: int = 256, theta: float = 0.5,
                     damping_window: int = 5, x0: Optional[GridFunction] = None,
                     check_hypotheses: bool = True, max_grid: int = 1024) -> SolveResult:
    """
    Search for lam > 0 and x with F(x) = lam x and |x|_p = m.

    Each step sets y = F(x_k), lam_k = |y|_p / m and x_{k+1} = y / lam_k. When the
    residual ||lam_k x_k - y||_inf has not decreased over damping_window steps the
    iteration switches to the averaged step (x_k + y / lam_k) / 2, renormalized.
    A result is accepted only through its residuals.

    Raises:
        HypothesisError: the hypothesis check fails or m exceeds r c mu(omega0)^(-1/q).
        ConvergenceError: lam_k falls below 1e-12.
    """
    cone_c = None
    if check_hypotheses:
        report = lw_hypothesis_check(k, f, d, p, m, r, theta, n, max_grid)
        if not report.passed:
            raise HypothesisError("eigenpair hypotheses fail", labels=report.failed)
        cone_c = report.c

    if x0 is None:
        x = GridFunction.constant(m * d.measure ** (-1.0 / p), n)
    else:
        if x0.n != n:
            raise MalformedInputError(f"initial guess has n={x0.n}, expected n={n}")
        x = x0 * (m / lp_seminorm(x0, d, p))

    history: list[float] = []
    damped = False
    status = SolveStatus.NON_CONVERGED
    lam = 0.0
    iterations = 0
    for iterations in range(1, max_iter + 1):
        y = apply_F2(k, f, x)
        lam = lp_seminorm(y, d, p) / m
        if lam < DEGENERATE_LAMBDA:
            raise ConvergenceError(f"F image degenerate on the constraint sphere (lam={lam:.3g})")
        residual = (lam * x - y).sup_norm()
        history.append(residual)
        logger.debug("iteration %d: lam=%.12g residual=%.3e", iterations, lam, residual)
        if residual <= tol:
            status = SolveStatus.CONVERGED
            break
        if not damped and _nondecreasing(history, damping_window):
            damped = True
            logger.warning("Residual stalled for %d steps; switching to averaged iteration", damping_window)
        candidate = y / lam
        if damped:
            candidate = (x + candidate) * 0.5
            candidate = candidate * (m / lp_seminorm(candidate, d, p))
        x = candidate
    else:
        y = apply_F2(k, f, x)
        lam = lp_seminorm(y, d, p) / m
        history.append((lam * x - y).sup_norm())

    residual = (lam * x - apply_F2(k, f, x)).sup_norm()
    seminorm_residual = abs(lp_seminorm(x, d, p) - m)
    margin = cone_check(x, d, cone_c).margin if cone_c else None
    result = SolveResult(
        x=x,
        lam=lam,
        residual_sup=residual,
        iterations=iterations,
        status=status,
        tol=tol,
        cone_margin=margin,
        seminorm_residual=seminorm_residual,
        range_ok=x.sup_norm() <= r * (1.0 + 1e-12),
        history=history,
        diagnostics={"damped": damped, "m": m, "p": p, "r": r, "min_x": float(np.min(x.values))},
    )
    if result.converged:
        logger.info("Eigenpair found: lam=%.12g after %d iterations (residual %.3e)", lam, iterations, residual)
    else:
        logger.warning("Eigenpair search did not converge: residual %.3e after %d iterations",
                       residual, iterations)
    return result


def contraction_probe(k: Kernel, f: Nonlinearity, r: float, samples: int = 10000,
                      n: int = 64, lam: float = 1.0, seed: int = 0) -> float:
    """
    Largest observed ||F(x) - F(y)||_inf / ||x - y||_inf over random pairs in the
    sup-ball of radius r, F(x) = lam * integral of k(., s) f(s, x(s)) ds.

    Half of the pairs are independent random grid functions, half are constant
    shifts y = x + d; the value is a lower estimate of the Lipschitz constant.
    """
    if r <= 0:
        raise MalformedInputError(f"radius must be positive, got {r}")
    rng = np.random.default_rng(seed)
    W = lam * nystrom_weights(k, n)
    nodes = np.linspace(0.0, 1.0, n + 1)

    half = samples // 2
    X1 = rng.uniform(-r, r, size=(half, n + 1))
    Y1 = rng.uniform(-r, r, size=(half, n + 1))
    shift = rng.uniform(0.0, r, size=(samples - half, 1))
    X2 = rng.uniform(0.0, 1.0, size=(samples - half, n + 1)) * (2.0 * r - shift) - r
    Y2 = X2 + shift
    X = np.vstack([X1, X2])
    Y = np.vstack([Y1, Y2])

    diff_images = (f(nodes, X) - f(nodes, Y)) @ W.T
    numer = np.max(np.abs(diff_images), axis=1)
    denom = np.max(np.abs(X - Y), axis=1)
    valid = denom > 0
    if not np.any(valid):
        return 0.0
    return float(np.max(numer[valid] / denom[valid]))
