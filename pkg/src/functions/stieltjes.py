"""
Riemann-Stieltjes integration in both orientations and the linear functionals
on continuous BV functions that nonlocal boundary conditions are built from.
"""

from __future__ import annotations

import bisect
import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from numbers import Real
from typing import Any, Iterable, Optional, Sequence

import numpy as np
from numpy.polynomial import Polynomial

from ..utils.errors import MalformedInputError
from .bvfun import (
    BVFunction,
    GridFunction,
    _exact_add,
    _exact_sum,
    bv_norm,
    polyline,
    sup_norm,
    variation,
)

logger = logging.getLogger(__name__)


class FunctionalKind(Enum):
    """How a functional acts on its argument."""
    STIELTJES_DA = "dA"        # x -> integral of x dA
    STIELTJES_DX = "dx"        # x -> integral of A dx
    POINTS = "points"          # x -> sum of c_i x(a_i)
    COMPOSITE = "composite"    # finite linear combination of the above


def _cell_at(f: BVFunction, t: float):
    cells = f.cells()
    idx = bisect.bisect_right([cell.lo for cell in cells], t) - 1
    return cells[max(0, min(idx, len(cells) - 1))]


def _product_integral(f: BVFunction, g: BVFunction) -> float:
    """Exact integral over [0, 1] of f * g, cell by cell."""
    points = sorted({cell.lo for cell in f.cells()} | {cell.lo for cell in g.cells()} | {1.0})
    total = 0.0
    for lo, hi in zip(points, points[1:]):
        mid = 0.5 * (lo + hi)
        product = Polynomial(_cell_at(f, mid).coef) * Polynomial(_cell_at(g, mid).coef)
        antideriv = product.integ()
        total += float(antideriv(hi) - antideriv(lo))
    return total


def _require_continuous(x: BVFunction, role: str) -> None:
    if not x.is_continuous():
        raise MalformedInputError(f"{role} must be continuous for this Riemann-Stieltjes integral")


def rs_dA(x: BVFunction, A: BVFunction) -> float:
    """
    Integral of x dA over [0, 1] for continuous x.

    Point masses of A contribute height * x(location); the continuous part of A
    contributes the exact integral of x * A'.
    """
    _require_continuous(x, "integrand x")
    atoms = _exact_sum(h * x(p) for p, h in A.discontinuities())
    return float(atoms) + _product_integral(x, A.continuous_derivative())


def rs_dx(A: BVFunction, x: BVFunction) -> float:
    """Integral of A dx over [0, 1] for continuous piecewise-polynomial x."""
    _require_continuous(x, "integrator x")
    return _product_integral(A, x.continuous_derivative())


def rs_sum(A: BVFunction, x: BVFunction, partition: Sequence[float], tags: Sequence[float]) -> float:
    """Tagged Riemann-Stieltjes sum of A(tag_i) * (x(t_i) - x(t_{i-1}))."""
    ts = np.asarray(partition, dtype=float)
    tg = np.asarray(tags, dtype=float)
    if ts.ndim != 1 or ts.size < 2 or ts[0] != 0.0 or ts[-1] != 1.0:
        raise MalformedInputError("partition must run from 0 to 1")
    if np.any(np.diff(ts) <= 0):
        raise MalformedInputError("partition must be strictly increasing")
    if tg.shape != (ts.size - 1,):
        raise MalformedInputError(f"expected {ts.size - 1} tags, got {tg.size}")
    if np.any(tg < ts[:-1]) or np.any(tg > ts[1:]):
        raise MalformedInputError("every tag must lie in its own subinterval")

    shared = {p for p, _ in A.discontinuities()} & {p for p, _ in x.discontinuities()}
    if shared and np.any(np.isin(tg, sorted(shared))):
        raise MalformedInputError("tag placed on a discontinuity shared by A and x")

    return float(np.sum(A(tg) * np.diff(x(ts))))


def dyadic_sum(A: BVFunction, x: BVFunction, depth: int) -> float:
    """rs_sum on the uniform partition with 2**depth cells and midpoint tags."""
    ts = np.linspace(0.0, 1.0, 2 ** depth + 1)
    return rs_sum(A, x, ts, 0.5 * (ts[:-1] + ts[1:]))


@dataclass(frozen=True, eq=False)
class Functional:
    """
    A bounded linear functional on CBV[0, 1].

    Use the constructors stieltjes_dA, stieltjes_dx, points and zero rather than
    filling the fields directly.
    """

    kind: FunctionalKind
    A: Optional[BVFunction] = None
    nodes: tuple[tuple[Real, float], ...] = ()
    terms: tuple[tuple[Real, "Functional"], ...] = field(default=())

    def __post_init__(self):
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", FunctionalKind(self.kind))
        if self.kind in (FunctionalKind.STIELTJES_DA, FunctionalKind.STIELTJES_DX) and self.A is None:
            raise MalformedInputError(f"{self.kind.value} functional needs a BVFunction A")
        if self.kind == FunctionalKind.POINTS:
            merged: dict[float, Real] = {}
            for weight, node in self.nodes:
                t = float(node)
                if not 0.0 <= t <= 1.0:
                    raise MalformedInputError(f"point functional node {node} outside [0, 1]")
                merged[t] = _exact_add(merged.get(t, 0), weight)
            object.__setattr__(self, "nodes", tuple((w, t) for t, w in sorted(merged.items()) if w != 0))

    # -- constructors -------------------------------------------------------

    @classmethod
    def stieltjes_dA(cls, A: BVFunction) -> Functional:
        return cls(FunctionalKind.STIELTJES_DA, A=A)

    @classmethod
    def stieltjes_dx(cls, A: BVFunction) -> Functional:
        return cls(FunctionalKind.STIELTJES_DX, A=A)

    @classmethod
    def points(cls, nodes: Iterable[tuple[Real, float]]) -> Functional:
        """sum of weight * x(node) over (weight, node) rows."""
        return cls(FunctionalKind.POINTS, nodes=tuple(nodes))

    @classmethod
    def zero(cls) -> Functional:
        return cls(FunctionalKind.POINTS)

    # -- evaluation ---------------------------------------------------------

    def __call__(self, x: BVFunction | GridFunction) -> float:
        if self.kind == FunctionalKind.POINTS:
            if isinstance(x, GridFunction):
                return float(_exact_sum(w * x.at(t) for w, t in self.nodes))
            return float(_exact_sum(w * x(t) for w, t in self.nodes))
        if self.kind == FunctionalKind.COMPOSITE:
            return float(sum(float(coef) * term(x) for coef, term in self.terms))
        bv = x.to_bv() if isinstance(x, GridFunction) else x
        if self.kind == FunctionalKind.STIELTJES_DA:
            return rs_dA(bv, self.A)
        return rs_dx(self.A, bv)

    def value_on_e(self) -> float:
        """The functional applied to the constant function e = 1."""
        return self(BVFunction.constant(1.0))

    def is_zero(self) -> bool:
        if self.kind == FunctionalKind.POINTS:
            return not self.nodes
        if self.kind == FunctionalKind.COMPOSITE:
            return all(term.is_zero() or coef == 0 for coef, term in self.terms)
        return False

    # -- norm bounds --------------------------------------------------------

    @cached_property
    def norm_upper(self) -> Real:
        """Certified upper bound for the CBV dual norm."""
        if self.kind == FunctionalKind.STIELTJES_DA:
            return variation(self.A)
        if self.kind == FunctionalKind.STIELTJES_DX:
            return sup_norm(self.A)
        if self.kind == FunctionalKind.POINTS:
            return _exact_sum(abs(w) for w, _ in self.nodes)
        return _exact_sum(abs(coef) * term.norm_upper for coef, term in self.terms)

    @property
    def norm_justification(self) -> str:
        return {
            FunctionalKind.STIELTJES_DA: "var A",
            FunctionalKind.STIELTJES_DX: "sup|A| * var x",
            FunctionalKind.POINTS: "sum |c_i| (sup <= BV)",
            FunctionalKind.COMPOSITE: "triangle inequality",
        }[self.kind]

    def support_points(self) -> list[float]:
        """Locations where the functional concentrates: nodes or structure points of A."""
        if self.kind == FunctionalKind.POINTS:
            return [t for _, t in self.nodes]
        if self.kind == FunctionalKind.COMPOSITE:
            return sorted({p for _, term in self.terms for p in term.support_points()})
        return sorted({cell.lo for cell in self.A.cells()} | {p for p, _ in self.A.discontinuities()})

    def to_dict(self) -> dict[str, Any]:
        if self.kind == FunctionalKind.POINTS:
            return {"kind": "points", "nodes": [[str(w), repr(t)] for w, t in self.nodes]}
        if self.kind == FunctionalKind.COMPOSITE:
            return {"kind": "composite", "terms": [[str(c), term.to_dict()] for c, term in self.terms]}
        return {"kind": self.kind.value, "A": self.A.to_dict()}

    def __repr__(self) -> str:
        if self.kind == FunctionalKind.POINTS:
            return f"Functional(points={list(self.nodes)})"
        return f"Functional(kind={self.kind.value}, norm_upper={float(self.norm_upper):.6g})"


def difference(alpha: Functional, beta: Functional) -> Functional:
    """alpha - beta, kept in the common kind whenever both share one."""
    if alpha.kind == beta.kind == FunctionalKind.STIELTJES_DA:
        return Functional.stieltjes_dA(alpha.A - beta.A)
    if alpha.kind == beta.kind == FunctionalKind.STIELTJES_DX:
        return Functional.stieltjes_dx(alpha.A - beta.A)
    if alpha.kind == beta.kind == FunctionalKind.POINTS:
        return Functional.points(list(alpha.nodes) + [(-w, t) for w, t in beta.nodes])
    if beta.is_zero():
        return alpha
    return Functional(FunctionalKind.COMPOSITE, terms=((1, alpha), (-1, beta)))


def functional_norm_upper(F: Functional) -> Real:
    return F.norm_upper


def functional_norm_witness(F: Functional, family: Sequence[BVFunction]) -> float:
    """Largest |F[x]| / ||x||_BV over family: a certified lower bound for ||F||."""
    if not family:
        raise MalformedInputError("witness family must not be empty")
    best = 0.0
    for x in family:
        norm = float(bv_norm(x))
        if norm == 0.0:
            raise MalformedInputError("witness family contains the zero function")
        best = max(best, abs(F(x)) / norm)
    return best


def _ramp(lo: float, hi: float) -> BVFunction:
    """Continuous 0 -> 1 ramp on [lo, hi], BV norm 1."""
    points = [(0.0, 0.0)]
    if lo > 0.0:
        points.append((lo, 0.0))
    if hi < 1.0:
        points.append((hi, 1.0))
    points.append((1.0, 1.0))
    return polyline(points)


def witness_family(F: Functional, samples: int = 64) -> list[BVFunction]:
    """
    Norm-one test functions for functional_norm_witness: the constant e and
    ramps between every pair of support points and between consecutive points
    of a uniform sampling grid.
    """
    family = [BVFunction.constant(1.0)]
    support = sorted({0.0, 1.0, *F.support_points()})
    for i, lo in enumerate(support):
        for hi in support[i + 1:]:
            family.append(_ramp(lo, hi))
    grid = np.linspace(0.0, 1.0, max(samples, 2) + 1)
    family.extend(_ramp(lo, hi) for lo, hi in zip(grid, grid[1:]))
    return family
