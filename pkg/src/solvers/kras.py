"""
Fixed-point solver for the perturbed Hammerstein equation x = F1(x) + lam F2(x)
through the equivalent form x = (I - F1)^-1 (lam F2(x)).
"""

import logging
from typing import Optional

import numpy as np
from scipy.integrate import simpson

from ..functions.bvfun import GridFunction
from ..models.operators import PerturbedProblem, apply_F1, neumann_apply
from ..models.reports import SolveResult, SolveStatus
from ..utils.errors import HypothesisError, MalformedInputError

logger = logging.getLogger(__name__)

# Share of the tolerance spent on truncating the Neumann series.
NEUMANN_SHARE = 0.1

# Assumptions on k and f; a failure is recorded on the result, not raised.
F_ASSUMPTIONS = ("(A10)", "(A11)", "(A12)", "(A13)")


def kras_solve(problem: PerturbedProblem, r: Optional[float] = None, tol: float = 1e-8,
               max_iter: int = 10000, n: int = 256, x0: Optional[GridFunction] = None,
               check_hypotheses: bool = True) -> SolveResult:
    """
    Iterate x_{k+1} = (I - F1)^-1 (lam F2(x_k)) from x0 (default: zero).

    The run stops when successive iterates differ by at most tol in sup norm, when
    max_iter is reached, or when an iterate leaves the ball of radius 2r. The
    defect ||x - F1(x) - lam F2(x)||_inf is always reported and decides acceptance.
    Failed assumptions (A10)-(A13) are listed in result.failed_hypotheses.

    Raises:
        HypothesisError: the existence constants are not certified or no radius satisfies (B5).
    """
    if tol <= 0 or max_iter < 1:
        raise MalformedInputError("tol must be positive and max_iter at least 1")

    diagnostics = {}
    failed_hypotheses: tuple[str, ...] = ()
    if check_hypotheses:
        report = problem.constants(n)
        diagnostics["constants"] = report.to_dict()
        failed_hypotheses = tuple(label for label in F_ASSUMPTIONS if label in report.failed)
        if failed_hypotheses:
            logger.warning("%s: solving although %s fail", problem.name, ", ".join(failed_hypotheses))
        if not report.feasible:
            labels = tuple(label for label in ("(A7)", "(A8)", "(B6)") if label in report.failed)
            raise HypothesisError("(I - F1)^-1 is not certified: " + "; ".join(report.notes),
                                  labels=labels or ("(A8)", "(B6)"))
        if r is None:
            r = report.psi_r_feasible_r
            if r is None:
                raise HypothesisError(f"no radius satisfies (B5) at lam={problem.lam:.6g}", labels=("(B5)",))
    if r is None or r <= 0:
        raise MalformedInputError(f"radius must be positive, got {r!r}")

    x = x0 if x0 is not None else GridFunction.zeros(n)
    if x.n != n:
        raise MalformedInputError(f"initial guess has n={x.n}, expected n={n}")

    L = problem.perturbation
    history: list[float] = []
    status = SolveStatus.NON_CONVERGED
    iterations = 0
    for iterations in range(1, max_iter + 1):
        y = problem.lam * problem.F2(x)
        x_next = neumann_apply(L, y, NEUMANN_SHARE * tol)
        step = (x_next - x).sup_norm()
        history.append(step)
        logger.debug("iteration %d: step=%.3e sup=%.6g", iterations, step, x_next.sup_norm())
        x = x_next
        if x.sup_norm() > 2.0 * r:
            status = SolveStatus.DIVERGED
            logger.warning("Iterate left the ball of radius 2r=%.6g after %d iterations", 2.0 * r, iterations)
            break
        if step <= tol:
            status = SolveStatus.CONVERGED
            break

    residual = problem.defect(x)
    result = SolveResult(
        x=x,
        lam=problem.lam,
        residual_sup=residual,
        iterations=iterations,
        status=status,
        tol=tol,
        range_ok=x.sup_norm() <= r,
        failed_hypotheses=failed_hypotheses,
        history=history,
        diagnostics={**diagnostics, "r": r, "problem": problem.name},
    )
    if result.converged:
        logger.info("%s solved in %d iterations, defect %.3e", problem.name, iterations, residual)
    else:
        logger.warning("%s: %s after %d iterations, defect %.3e",
                       problem.name, status.value, iterations, residual)
    return result


def defect_by_simpson(problem: PerturbedProblem, x: GridFunction) -> float:
    """
    Defect recomputed with plain composite Simpson on each side of the diagonal,
    independently of the product-integration weights used by the solver.
    """
    nodes = x.nodes
    integrand = problem.nonlinearity(nodes, x.values)
    image = np.empty_like(nodes)
    for i, t in enumerate(nodes):
        row = problem.kernel(t, nodes) * integrand
        left = simpson(row[:i + 1], x=nodes[:i + 1]) if i > 0 else 0.0
        right = simpson(row[i:], x=nodes[i:]) if i < x.n else 0.0
        image[i] = left + right
    F1x = apply_F1(problem.perturbation, x)
    return float(np.max(np.abs(x.values - F1x.values - problem.lam * image)))
