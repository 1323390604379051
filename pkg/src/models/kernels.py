"""
Green's functions for the integral formulations and their quantitative
properties: row integrals, sup norms, t-variation, continuity modulus and the
bounding function used for sign-changing kernels.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Any, Optional

import numpy as np
import pandas as pd
from scipy.integrate import simpson
from scipy.interpolate import RegularGridInterpolator

from ..functions.bvfun import Domain, GridFunction
from ..utils.errors import HypothesisError, MalformedInputError

logger = logging.getLogger(__name__)

# |sin(omega/2)| at or below this makes the periodic Green's function singular.
OMEGA_GUARD = 1e-9
BOUNDING_TOL = 1e-9


class KernelKind(Enum):
    PERIODIC = "periodic"
    DIRICHLET = "dirichlet"
    TABULATED = "tabulated"


@dataclass(frozen=True, eq=False)
class Kernel:
    """
    k(t, s) on the unit square.

    periodic(omega): cos(omega(1/2 - |t - s|)) / (2 omega sin(omega/2)), the Green's
        function of -x'' - omega^2 x with x(0) = x(1), x'(0) = x'(1).
    dirichlet: s(1 - t) for s <= t, t(1 - s) otherwise, the Green's function of
        -x'' with x(0) = x(1) = 0.
    tabulated: bilinear interpolation of a matrix on a uniform grid (row = t, column = s).
    """

    kind: KernelKind
    omega: Optional[float] = None
    table: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", KernelKind(self.kind))
        if self.kind == KernelKind.PERIODIC:
            if self.omega is None or not self.omega > 0 or not math.isfinite(self.omega):
                raise MalformedInputError(f"periodic kernel needs omega > 0, got {self.omega!r}")
            if abs(math.sin(self.omega / 2.0)) <= OMEGA_GUARD:
                raise MalformedInputError(
                    f"omega={self.omega} is too close to a multiple of 2*pi", label="omega != 2n*pi")
            object.__setattr__(self, "omega", float(self.omega))
        elif self.kind == KernelKind.TABULATED:
            table = np.array(self.table, dtype=float) if self.table is not None else None
            if table is None or table.ndim != 2 or min(table.shape) < 2:
                raise MalformedInputError("tabulated kernel needs a matrix with at least 2 rows and 2 columns")
            if not np.all(np.isfinite(table)):
                raise MalformedInputError("tabulated kernel values must be finite")
            table.setflags(write=False)
            object.__setattr__(self, "table", table)

    @classmethod
    def periodic(cls, omega: float) -> Kernel:
        return cls(KernelKind.PERIODIC, omega=omega)

    @classmethod
    def dirichlet(cls) -> Kernel:
        return cls(KernelKind.DIRICHLET)

    @classmethod
    def tabulated(cls, table) -> Kernel:
        return cls(KernelKind.TABULATED, table=table)

    @classmethod
    def from_csv(cls, path: str | Path) -> Kernel:
        """Load a tabulated kernel from a headerless CSV matrix."""
        try:
            frame = pd.read_csv(path, header=None)
        except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
            raise MalformedInputError(f"cannot read kernel table {path}: {e}") from e
        return cls.tabulated(frame.to_numpy(dtype=float))

    @cached_property
    def _denominator(self) -> float:
        return 2.0 * self.omega * math.sin(self.omega / 2.0)

    @cached_property
    def _interpolator(self) -> RegularGridInterpolator:
        rows, cols = self.table.shape
        return RegularGridInterpolator(
            (np.linspace(0.0, 1.0, rows), np.linspace(0.0, 1.0, cols)), self.table)

    def __call__(self, t, s):
        t_arr, s_arr = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(s, dtype=float))
        if np.any((t_arr < 0) | (t_arr > 1) | (s_arr < 0) | (s_arr > 1)):
            raise MalformedInputError("kernel arguments must lie in [0, 1]")
        if self.kind == KernelKind.PERIODIC:
            values = np.cos(self.omega * (0.5 - np.abs(t_arr - s_arr))) / self._denominator
        elif self.kind == KernelKind.DIRICHLET:
            values = np.where(s_arr <= t_arr, s_arr * (1.0 - t_arr), t_arr * (1.0 - s_arr))
        else:
            values = self._interpolator(np.stack([t_arr, s_arr], axis=-1))
        return float(values) if np.ndim(values) == 0 else values

    @property
    def has_diagonal_kink(self) -> bool:
        return self.kind != KernelKind.TABULATED

    @cached_property
    def lipschitz_t(self) -> float:
        """sup over s of the Lipschitz constant of t -> k(t, s)."""
        if self.kind == KernelKind.DIRICHLET:
            return 1.0
        if self.kind == KernelKind.PERIODIC:
            peak = 1.0 if self.omega >= math.pi else math.sin(self.omega / 2.0)
            return peak / (2.0 * abs(math.sin(self.omega / 2.0)))
        rows = self.table.shape[0]
        return float(np.max(np.abs(np.diff(self.table, axis=0)))) * (rows - 1)

    def variation_majorant(self, s) -> np.ndarray:
        """m(s) with var over t of k(., s) <= m(s)."""
        s_arr = np.asarray(s, dtype=float)
        if self.kind == KernelKind.DIRICHLET:
            return np.ones_like(s_arr)
        if self.kind == KernelKind.PERIODIC:
            return np.full_like(s_arr, self.lipschitz_t)
        column_variation = np.sum(np.abs(np.diff(self.table, axis=0)), axis=0)
        return np.interp(s_arr, np.linspace(0.0, 1.0, self.table.shape[1]), column_variation)

    @cached_property
    def is_nonnegative(self) -> bool:
        if self.kind == KernelKind.DIRICHLET:
            return True
        if self.kind == KernelKind.PERIODIC:
            return self.omega <= math.pi
        return bool(np.all(self.table >= 0))

    def to_dict(self) -> dict[str, Any]:
        result: dict[str, Any] = {"kind": self.kind.value}
        if self.kind == KernelKind.PERIODIC:
            result["omega"] = repr(self.omega)
        elif self.kind == KernelKind.TABULATED:
            result["table"] = [[repr(float(v)) for v in row] for row in self.table]
        return result

    def __repr__(self) -> str:
        if self.kind == KernelKind.PERIODIC:
            return f"Kernel(periodic, omega={self.omega:.6g})"
        if self.kind == KernelKind.TABULATED:
            return f"Kernel(tabulated, shape={self.table.shape})"
        return "Kernel(dirichlet)"


def eval_kernel(k: Kernel, t, s):
    return k(t, s)


def _segments(lo: float, hi: float, splits) -> list[tuple[float, float]]:
    points = sorted({lo, hi, *(p for p in splits if lo < p < hi)})
    return list(zip(points, points[1:]))


def _simpson_nodes(lo: float, hi: float, n: int) -> np.ndarray:
    m = 2 * max(1, math.ceil((hi - lo) * n / 2))
    return np.linspace(lo, hi, m + 1)


def row_integral(k: Kernel, s: float, d: Domain, n: int = 256) -> float:
    """Integral over omega0 of k(t, s) dt, composite Simpson split at t = s."""
    total = 0.0
    for lo, hi in d.omega0:
        for a, b in _segments(lo, hi, [s] if k.has_diagonal_kink else []):
            t = _simpson_nodes(a, b, n)
            total += simpson(k(t, s), x=t)
    return float(total)


def row_integrals(k: Kernel, s_nodes, d: Domain, n: int = 256) -> np.ndarray:
    return np.array([row_integral(k, float(s), d, n) for s in np.asarray(s_nodes, dtype=float)])


def sup_abs(k: Kernel, max_grid: int = 1024, tol: float = 1e-9) -> float:
    """max |k| on the closed square by grid doubling; uniform grids contain the diagonal."""
    previous = None
    n = 32
    estimate = 0.0
    while n <= max_grid:
        nodes = np.linspace(0.0, 1.0, n + 1)
        estimate = float(np.max(np.abs(k(nodes[:, None], nodes[None, :]))))
        if previous is not None and abs(estimate - previous) < tol:
            break
        previous = estimate
        n *= 2
    logger.debug("sup_abs(%r) = %.12g on a %d-grid", k, estimate, min(n, max_grid))
    return estimate


def _cos_variation(a: float, b: float) -> float:
    """Variation of cos over the phase interval [a, b]."""
    if b <= a:
        return 0.0
    first = math.ceil(a / math.pi)
    last = math.floor(b / math.pi)
    phases = [a, *(j * math.pi for j in range(first, last + 1) if a < j * math.pi < b), b]
    return float(np.sum(np.abs(np.diff(np.cos(phases)))))


def t_variation(k: Kernel, s: float) -> float:
    """Variation of t -> k(t, s) over [0, 1]."""
    if not 0.0 <= s <= 1.0:
        raise MalformedInputError(f"s={s} outside [0, 1]")
    if k.kind == KernelKind.DIRICHLET:
        return 2.0 * s * (1.0 - s)
    if k.kind == KernelKind.PERIODIC:
        # t on either side of s: phase omega(1/2 - d) for distance d in [0, s] and [0, 1 - s]
        w = k.omega
        left = _cos_variation(w * (0.5 - s), 0.5 * w)
        right = _cos_variation(w * (0.5 - (1.0 - s)), 0.5 * w)
        return (left + right) / abs(k._denominator)
    t_nodes = np.linspace(0.0, 1.0, k.table.shape[0])
    return float(np.sum(np.abs(np.diff(k(t_nodes, s)))))


def continuity_modulus(k: Kernel, phi: GridFunction, tau: float, delta: float,
                       n: int = 256, probes: int = 17) -> float:
    """max over |t - tau| <= delta of the integral of |k(t, s) - k(tau, s)| phi(s) ds."""
    if delta < 0:
        raise MalformedInputError("delta must be nonnegative")
    if delta == 0:
        return 0.0
    phi_nodes = phi.nodes
    best = 0.0
    for t in np.linspace(max(0.0, tau - delta), min(1.0, tau + delta), probes):
        value = 0.0
        for a, b in _segments(0.0, 1.0, [t, tau]):
            s = _simpson_nodes(a, b, n)
            weight = np.interp(s, phi_nodes, phi.values)
            value += simpson(np.abs(k(t, s) - k(tau, s)) * weight, x=s)
        best = max(best, float(value))
    return best


@dataclass(frozen=True, eq=False)
class BoundingFunction:
    """
    Phi with |k(t, s)| <= Phi(s), Phi >= eta2 on omega0 and
    c * Phi(s) <= integral over omega0 of k(t, s) dt.
    """

    phi: GridFunction
    eta2: float
    c: float
    verified_nodes: int = 0
    failures: tuple[str, ...] = ()

    def __post_init__(self):
        if np.any(self.phi.values < 0):
            raise MalformedInputError("bounding function must be nonnegative")
        if not self.c > 0:
            raise MalformedInputError(f"bounding constant c must be positive, got {self.c}")

    @property
    def verified(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict[str, Any]:
        return {
            "eta2": self.eta2,
            "c": self.c,
            "verified_nodes": self.verified_nodes,
            "failures": list(self.failures),
        }


def verify_bounding(k: Kernel, d: Domain, phi: GridFunction, c: float,
                    n: int = 256) -> tuple[int, list[str]]:
    """
    Check the three bounding conditions at the nodes of phi.

    Returns:
        Tuple of (number of nodes checked, list of failure descriptions)
    """
    failures = []
    s_nodes = phi.nodes
    if np.any(phi.values < 0):
        failures.append("(A4)(i): Phi takes negative values")

    t_nodes = np.linspace(0.0, 1.0, n + 1)
    column_max = np.max(np.abs(k(t_nodes[:, None], s_nodes[None, :])), axis=0)
    excess = column_max - phi.values
    if np.any(excess > BOUNDING_TOL):
        worst = int(np.argmax(excess))
        failures.append(f"(A4)(ii): |k(t, s)| exceeds Phi(s) at s={s_nodes[worst]:.6g}")

    rows = row_integrals(k, s_nodes, d, n)
    deficit = c * phi.values - rows
    if np.any(deficit > BOUNDING_TOL):
        worst = int(np.argmax(deficit))
        failures.append(f"(A4)(iii): c*Phi(s) exceeds the row integral at s={s_nodes[worst]:.6g}")
    return s_nodes.size, failures


def build_bounding(k: Kernel, d: Domain, n: int = 256, max_grid: int = 1024) -> BoundingFunction:
    """
    Phi(s) = ||k||_inf * R(s) / min R with R(s) the omega0 row integral, and
    c = min R / ||k||_inf.

    Raises:
        HypothesisError: the row-integral minimum is not positive (B2).
    """
    s_nodes = np.linspace(0.0, 1.0, n + 1)
    rows = row_integrals(k, s_nodes, d, n)
    worst = int(np.argmin(rows))
    row_min = float(rows[worst])
    if row_min <= 0:
        raise HypothesisError(
            f"row integral minimum {row_min:.6g} is not positive (at s={s_nodes[worst]:.6g})",
            labels=("(B2)",))

    sup = sup_abs(k, max_grid)
    phi = GridFunction(sup * rows / row_min)
    c = row_min / sup
    inside = d.contains(s_nodes)
    eta2 = float(np.min(phi.values[inside])) if np.any(inside) else float(np.min(phi.values))
    checked, failures = verify_bounding(k, d, phi, c, n)
    logger.info("Bounding function for %r: c=%.10g, eta2=%.10g, verified at %d nodes",
                k, c, eta2, checked)
    return BoundingFunction(phi, eta2, c, checked, tuple(failures))
