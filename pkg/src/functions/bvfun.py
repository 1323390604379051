"""
Bounded-variation and continuous-function algebra on [0, 1].

A BVFunction is a piecewise polynomial (degree <= 3) plus a finite list of
jumps h * chi_[a, 1]. Pieces live on [t_i, t_{i+1}) with the last piece closed,
and a jump at a attaches its value at a itself, so every BVFunction is
right-continuous. Variation, norms and oscillation are computed exactly from the
monotonicity intervals of each piece; jump heights keep their numeric type, so
Fraction heights give Fraction variations.

GridFunction carries solver iterates: values at the uniform nodes t_i = i/n.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from numbers import Real
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np
from numpy.polynomial import Polynomial
from scipy.integrate import simpson
from scipy.interpolate import CubicSpline

from ..utils.errors import MalformedInputError

logger = logging.getLogger(__name__)

MAX_DEGREE = 3
# Real parts of derivative roots with |imag| below this are treated as real.
ROOT_IMAG_TOL = 1e-12
# Piece mismatches at a breakpoint below this are treated as continuity.
CONTINUITY_TOL = 1e-11
CONE_TOL = 1e-12


def _exact_add(a: Real, b: Real) -> Real:
    """Add two numbers without degrading an exact operand when the other is zero."""
    if a == 0:
        return b
    if b == 0:
        return a
    if isinstance(a, (Fraction, int)) and isinstance(b, (Fraction, int)):
        return a + b
    return float(a) + float(b)


def _exact_sum(values: Iterable[Real]) -> Real:
    total: Real = 0
    for value in values:
        total = _exact_add(total, value)
    return total


def _check_sub(sub: Sequence[float]) -> tuple[float, float]:
    lo, hi = float(sub[0]), float(sub[1])
    if lo > hi:
        raise MalformedInputError(f"Reversed subinterval [{lo}, {hi}]")
    if lo < 0.0 or hi > 1.0:
        raise MalformedInputError(f"Subinterval [{lo}, {hi}] is not contained in [0, 1]")
    return lo, hi


def _pad(coef: Sequence[float]) -> np.ndarray:
    out = np.zeros(MAX_DEGREE + 1)
    arr = np.asarray(coef, dtype=float)
    out[:len(arr)] = arr
    return out


def _critical_points(coef: np.ndarray, lo: float, hi: float) -> list[float]:
    """Real roots of the derivative strictly inside (lo, hi)."""
    deriv = Polynomial(coef).deriv()
    if not np.any(deriv.coef):
        return []
    trimmed = deriv.trim()
    if trimmed.degree() < 1:
        return []
    points = []
    for root in trimmed.roots():
        if abs(root.imag) <= ROOT_IMAG_TOL * max(1.0, abs(root.real)):
            r = float(root.real)
            if lo < r < hi:
                points.append(r)
    return sorted(points)


def _arc_variation(coef: np.ndarray, lo: float, hi: float) -> float:
    if hi <= lo or not np.any(coef[1:]):
        return 0.0
    nodes = np.array([lo, *_critical_points(coef, lo, hi), hi])
    values = Polynomial(coef)(nodes)
    return float(np.sum(np.abs(np.diff(values))))


def _extreme_values(coef: np.ndarray, lo: float, hi: float) -> np.ndarray:
    nodes = np.array([lo, *_critical_points(coef, lo, hi), hi])
    return Polynomial(coef)(nodes)


@dataclass(frozen=True)
class Domain:
    """
    The interval [0, 1] together with the subset omega0, a finite union of
    disjoint closed subintervals of positive length.
    """

    omega0: tuple[tuple[float, float], ...] = ((0.0, 1.0),)

    def __post_init__(self):
        intervals = tuple((float(lo), float(hi)) for lo, hi in self.omega0)
        if not intervals:
            raise MalformedInputError("omega0 must contain at least one subinterval")
        previous_hi = -math.inf
        for lo, hi in intervals:
            if not 0.0 <= lo < hi <= 1.0:
                raise MalformedInputError(f"omega0 subinterval [{lo}, {hi}] is empty or outside [0, 1]")
            if lo <= previous_hi:
                raise MalformedInputError("omega0 subintervals must be sorted and pairwise disjoint")
            previous_hi = hi
        object.__setattr__(self, "omega0", intervals)

    @classmethod
    def unit(cls) -> Domain:
        return cls(((0.0, 1.0),))

    @property
    def measure(self) -> float:
        return float(sum(hi - lo for lo, hi in self.omega0))

    def contains(self, t) -> np.ndarray:
        t_arr = np.asarray(t, dtype=float)
        mask = np.zeros(t_arr.shape, dtype=bool)
        for lo, hi in self.omega0:
            mask |= (t_arr >= lo) & (t_arr <= hi)
        return mask

    def to_dict(self) -> dict:
        return {"omega0": [[repr(lo), repr(hi)] for lo, hi in self.omega0]}


class Cell(NamedTuple):
    """Maximal subinterval [lo, hi) on which a BVFunction is one polynomial."""
    lo: float
    hi: float
    coef: np.ndarray


@dataclass(frozen=True, eq=False)
class BVFunction:
    """
    Piecewise polynomial plus finite jump part on [0, 1].

    Args:
        breakpoints: 0 = t_0 < t_1 < ... < t_k = 1.
        pieces: k coefficient rows in ascending powers of t, degree <= 3.
        jumps: (location, height) pairs, each meaning height * chi_[location, 1].
    """

    breakpoints: tuple[float, ...]
    pieces: tuple[tuple[float, ...], ...]
    jumps: tuple[tuple[Real, Real], ...] = ()

    def __post_init__(self):
        bps = tuple(float(t) for t in self.breakpoints)
        if len(bps) < 2 or bps[0] != 0.0 or bps[-1] != 1.0:
            raise MalformedInputError("breakpoints must start at 0 and end at 1")
        if any(b <= a for a, b in zip(bps, bps[1:])):
            raise MalformedInputError("breakpoints must be strictly increasing")

        pieces = []
        for row in self.pieces:
            coef = [float(c) for c in row] or [0.0]
            while len(coef) > 1 and coef[-1] == 0.0:
                coef.pop()
            if len(coef) > MAX_DEGREE + 1:
                raise MalformedInputError(f"piece degree {len(coef) - 1} exceeds {MAX_DEGREE}")
            if not all(math.isfinite(c) for c in coef):
                raise MalformedInputError("piece coefficients must be finite")
            pieces.append(tuple(coef))
        if len(pieces) != len(bps) - 1:
            raise MalformedInputError(
                f"expected {len(bps) - 1} pieces for {len(bps)} breakpoints, got {len(pieces)}")

        merged: dict[float, Real] = {}
        exact_locations: dict[float, Real] = {}
        for location, height in self.jumps:
            loc = float(location)
            if not 0.0 <= loc <= 1.0:
                raise MalformedInputError(f"jump location {location} outside [0, 1]")
            if not math.isfinite(float(height)):
                raise MalformedInputError("jump heights must be finite")
            merged[loc] = _exact_add(merged.get(loc, 0), height)
            exact_locations.setdefault(loc, location)
        jumps = tuple(sorted((exact_locations[loc], h) for loc, h in merged.items() if h != 0))

        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "pieces", tuple(pieces))
        object.__setattr__(self, "jumps", jumps)

    # -- constructors -------------------------------------------------------

    @classmethod
    def constant(cls, value: float = 1.0) -> BVFunction:
        return cls((0.0, 1.0), ((value,),))

    @classmethod
    def indicator(cls, location: Real, height: Real = 1) -> BVFunction:
        """height * chi_[location, 1]."""
        return cls((0.0, 1.0), ((0.0,),), ((location, height),))

    @classmethod
    def from_polynomial(cls, coef: Sequence[float]) -> BVFunction:
        return cls((0.0, 1.0), (tuple(coef),))

    @classmethod
    def zero(cls) -> BVFunction:
        return cls.constant(0.0)

    # -- cached structure ---------------------------------------------------

    @cached_property
    def _coef(self) -> np.ndarray:
        return np.array([_pad(row) for row in self.pieces])

    @cached_property
    def _bp(self) -> np.ndarray:
        return np.asarray(self.breakpoints)

    def _piece_index(self, t: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self._bp, t, side="right") - 1
        return np.clip(idx, 0, len(self.pieces) - 1)

    def _jump_total(self, t: float) -> float:
        return float(sum(float(h) for loc, h in self.jumps if float(loc) <= t))

    def cells(self) -> tuple[Cell, ...]:
        """Partition into cells on which the function is a single polynomial."""
        return self._cells

    @cached_property
    def _cells(self) -> tuple[Cell, ...]:
        points = set(self.breakpoints)
        points.update(float(loc) for loc, _ in self.jumps if 0.0 < float(loc) < 1.0)
        ordered = sorted(points)
        cells = []
        for lo, hi in zip(ordered, ordered[1:]):
            coef = self._coef[int(self._piece_index(np.array(lo)))].copy()
            coef[0] += self._jump_total(lo)
            cells.append(Cell(lo, hi, coef))
        return tuple(cells)

    def discontinuities(self) -> tuple[tuple[float, Real], ...]:
        """(point, f(point) - f(point-)) for every point of (0, 1] where f jumps."""
        return self._discontinuities

    @cached_property
    def _discontinuities(self) -> tuple[tuple[float, Real], ...]:
        heights: dict[float, Real] = {}
        for i, bp in enumerate(self.breakpoints[1:-1], start=1):
            right = float(Polynomial(self._coef[i])(bp))
            left = float(Polynomial(self._coef[i - 1])(bp))
            mismatch = right - left
            if abs(mismatch) > CONTINUITY_TOL * max(1.0, abs(left), abs(right)):
                heights[bp] = mismatch
        for location, height in self.jumps:
            loc = float(location)
            if loc > 0.0:
                heights[loc] = _exact_add(heights.get(loc, 0), height)
        return tuple(sorted((p, h) for p, h in heights.items() if h != 0))

    def is_continuous(self) -> bool:
        return not self._discontinuities

    # -- evaluation ---------------------------------------------------------

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < 0.0) or np.any(t_arr > 1.0):
            raise MalformedInputError("BVFunction evaluated outside [0, 1]")
        coef = self._coef[self._piece_index(t_arr)]
        values = coef[..., 0] + t_arr * (coef[..., 1] + t_arr * (coef[..., 2] + t_arr * coef[..., 3]))
        for location, height in self.jumps:
            values = values + float(height) * (t_arr >= float(location))
        if values.ndim == 0:
            return float(values)
        return values

    def value_at_zero(self) -> Real:
        """f(0) keeping exact jump heights."""
        total: Real = self.pieces[0][0]
        for location, height in self.jumps:
            if float(location) == 0.0:
                total = _exact_add(total, height)
        return total

    # -- algebra ------------------------------------------------------------

    def _combine(self, other: BVFunction, sign: float) -> BVFunction:
        points = sorted(set(self.breakpoints) | set(other.breakpoints))
        pieces = []
        for lo in points[:-1]:
            a = self._coef[int(self._piece_index(np.array(lo)))]
            b = other._coef[int(other._piece_index(np.array(lo)))]
            pieces.append(tuple(a + sign * b))
        jumps = list(self.jumps)
        for location, height in other.jumps:
            jumps.append((location, height if sign > 0 else -height))
        return BVFunction(tuple(points), tuple(pieces), tuple(jumps))

    def __add__(self, other: BVFunction) -> BVFunction:
        if not isinstance(other, BVFunction):
            return NotImplemented
        return self._combine(other, 1.0)

    def __sub__(self, other: BVFunction) -> BVFunction:
        if not isinstance(other, BVFunction):
            return NotImplemented
        return self._combine(other, -1.0)

    def __mul__(self, scalar: Real) -> BVFunction:
        if not isinstance(scalar, Real):
            return NotImplemented
        pieces = tuple(tuple(float(scalar) * c for c in row) for row in self.pieces)
        jumps = tuple((loc, scalar * h) for loc, h in self.jumps)
        return BVFunction(self.breakpoints, pieces, jumps)

    __rmul__ = __mul__

    def __neg__(self) -> BVFunction:
        return self * -1

    def refine(self, points: Iterable[float]) -> BVFunction:
        """Same function with extra breakpoints."""
        extra = {float(p) for p in points if 0.0 < float(p) < 1.0}
        ordered = sorted(set(self.breakpoints) | extra)
        pieces = tuple(tuple(self._coef[int(self._piece_index(np.array(lo)))]) for lo in ordered[:-1])
        return BVFunction(tuple(ordered), pieces, self.jumps)

    def continuous_derivative(self) -> BVFunction:
        """Derivative of the polynomial part, cell by cell (jumps dropped)."""
        cells = self._cells
        points = (0.0, *(cell.hi for cell in cells))
        pieces = tuple(tuple(Polynomial(cell.coef).deriv().coef) for cell in cells)
        return BVFunction(points, pieces)

    def integral(self, sub: Sequence[float] = (0.0, 1.0)) -> float:
        """Exact integral over sub."""
        lo, hi = _check_sub(sub)
        total = 0.0
        for cell in self._cells:
            a, b = max(cell.lo, lo), min(cell.hi, hi)
            if a < b:
                antideriv = Polynomial(cell.coef).integ()
                total += float(antideriv(b) - antideriv(a))
        return total

    def to_dict(self) -> dict:
        """Decimal-string serialization used by the problem-spec document."""
        return {
            "breakpoints": [repr(t) for t in self.breakpoints],
            "pieces": [[repr(c) for c in row] for row in self.pieces],
            "jumps": [[str(loc), str(h)] for loc, h in self.jumps],
        }

    def __repr__(self) -> str:
        return (f"BVFunction(pieces={len(self.pieces)}, jumps={len(self.jumps)}, "
                f"continuous={self.is_continuous()})")


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Values at the uniform nodes t_i = i/n, i = 0..n (n intervals)."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=float)
        if arr.ndim != 1 or arr.size < 3:
            raise MalformedInputError("GridFunction needs n >= 2 intervals (at least 3 values)")
        if not np.all(np.isfinite(arr)):
            raise MalformedInputError("GridFunction values must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @classmethod
    def from_callable(cls, fn: Callable[[np.ndarray], np.ndarray], n: int) -> GridFunction:
        nodes = np.linspace(0.0, 1.0, n + 1)
        return cls(np.broadcast_to(np.asarray(fn(nodes), dtype=float), nodes.shape))

    @classmethod
    def from_bv(cls, f: BVFunction, n: int) -> GridFunction:
        return cls(f(np.linspace(0.0, 1.0, n + 1)))

    @classmethod
    def constant(cls, value: float, n: int) -> GridFunction:
        return cls(np.full(n + 1, float(value)))

    @classmethod
    def zeros(cls, n: int) -> GridFunction:
        return cls.constant(0.0, n)

    @property
    def n(self) -> int:
        return self.values.size - 1

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n + 1)

    def conforms(self, other: GridFunction) -> bool:
        return self.n == other.n

    def _check_conforming(self, other: GridFunction) -> None:
        if not self.conforms(other):
            raise MalformedInputError(f"Nonconforming grids: n={self.n} vs n={other.n}")

    def __add__(self, other: GridFunction) -> GridFunction:
        if not isinstance(other, GridFunction):
            return NotImplemented
        self._check_conforming(other)
        return GridFunction(self.values + other.values)

    def __sub__(self, other: GridFunction) -> GridFunction:
        if not isinstance(other, GridFunction):
            return NotImplemented
        self._check_conforming(other)
        return GridFunction(self.values - other.values)

    def __mul__(self, scalar: Real) -> GridFunction:
        if not isinstance(scalar, Real):
            return NotImplemented
        return GridFunction(float(scalar) * self.values)

    __rmul__ = __mul__

    def __truediv__(self, scalar: Real) -> GridFunction:
        return GridFunction(self.values / float(scalar))

    def __neg__(self) -> GridFunction:
        return GridFunction(-self.values)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def bv_norm(self) -> float:
        """Discrete BV norm |x_0| + sum |x_i - x_{i-1}|, a lower bound for sampled functions."""
        return float(abs(self.values[0]) + np.sum(np.abs(np.diff(self.values))))

    @cached_property
    def spline(self) -> CubicSpline:
        return CubicSpline(self.nodes, self.values)

    def at(self, t):
        """Point evaluation through the not-a-knot cubic spline."""
        value = self.spline(np.asarray(t, dtype=float))
        return float(value) if np.ndim(value) == 0 else value

    def to_bv(self) -> BVFunction:
        """Cubic-spline lifting; reproduces cubic data exactly."""
        return self._lifted

    @cached_property
    def _lifted(self) -> BVFunction:
        nodes = self.nodes
        local = self.spline.c  # highest power first, in (t - t_i)
        a3, a2, a1, a0 = local[0], local[1], local[2], local[3]
        x = nodes[:-1]
        b0 = a0 - a1 * x + a2 * x ** 2 - a3 * x ** 3
        b1 = a1 - 2.0 * a2 * x + 3.0 * a3 * x ** 2
        b2 = a2 - 3.0 * a3 * x
        b3 = a3
        pieces = tuple(zip(b0, b1, b2, b3))
        return BVFunction(tuple(nodes), pieces)

    def __repr__(self) -> str:
        return f"GridFunction(n={self.n}, sup={self.sup_norm():.6g})"


# -- operations ---------------------------------------------------------------

def variation(f: BVFunction, sub: Sequence[float] = (0.0, 1.0)) -> Real:
    """Exact Jordan variation of f over sub (jump heights keep their numeric type)."""
    lo, hi = _check_sub(sub)
    jump_part = _exact_sum(abs(h) for p, h in f.discontinuities() if lo < p <= hi)
    arc_part = 0.0
    for cell in f.cells():
        arc_part += _arc_variation(cell.coef, max(cell.lo, lo), min(cell.hi, hi))
    return _exact_add(jump_part, arc_part)


def bv_norm(f: BVFunction | GridFunction) -> Real:
    """|f(0)| + var_[0,1] f (discrete analogue for GridFunction)."""
    if isinstance(f, GridFunction):
        return f.bv_norm()
    return _exact_add(abs(f.value_at_zero()), variation(f))


def sup_norm(f: BVFunction | GridFunction) -> float:
    """Exact sup |f| (grid maximum for GridFunction)."""
    if isinstance(f, GridFunction):
        return f.sup_norm()
    best = 0.0
    for cell in f.cells():
        best = max(best, float(np.max(np.abs(_extreme_values(cell.coef, cell.lo, cell.hi)))))
    return max(best, abs(f(1.0)))


def oscillation(f: BVFunction, sub: Sequence[float] = (0.0, 1.0)) -> float:
    """sup over tau <= sigma in sub of |f(sigma) - f(tau)|."""
    lo, hi = _check_sub(sub)
    candidates = [f(lo), f(hi)]
    for cell in f.cells():
        a, b = max(cell.lo, lo), min(cell.hi, hi)
        if a < b:
            candidates.extend(_extreme_values(cell.coef, a, b))
    return float(max(candidates) - min(candidates))


def _omega0_nodes(d: Domain, n: int) -> list[np.ndarray]:
    nodes = []
    for lo, hi in d.omega0:
        m = max(2, 2 * math.ceil((hi - lo) * n))
        nodes.append(np.linspace(lo, hi, m + 1))
    return nodes


def _sample(x: BVFunction | GridFunction, t: np.ndarray) -> np.ndarray:
    return x.at(t) if isinstance(x, GridFunction) else x(t)


def omega0_integral(x: BVFunction | GridFunction, d: Domain, n: int = 256) -> float:
    """Composite Simpson value of the integral of x over omega0."""
    if isinstance(x, GridFunction):
        n = max(n, x.n)
    return float(sum(simpson(_sample(x, t), x=t) for t in _omega0_nodes(d, n)))


def lp_seminorm(x: BVFunction | GridFunction, d: Domain, p: float, n: int = 256) -> float:
    """(integral over omega0 of |x|^p)^(1/p) by composite Simpson."""
    if not p >= 1.0 or math.isinf(p):
        raise MalformedInputError(f"lp_seminorm needs 1 <= p < inf, got p={p}")
    if isinstance(x, GridFunction):
        n = max(n, x.n)
    total = sum(simpson(np.abs(_sample(x, t)) ** p, x=t) for t in _omega0_nodes(d, n))
    return float(max(total, 0.0) ** (1.0 / p))


class ConeCheck(NamedTuple):
    passed: bool
    margin: float


def cone_check(x: BVFunction | GridFunction, d: Domain, c: float) -> ConeCheck:
    """Membership in the cone {x : integral over omega0 of x >= c * ||x||_inf}."""
    if c <= 0:
        raise MalformedInputError(f"cone constant must be positive, got {c}")
    margin = omega0_integral(x, d) - c * sup_norm(x)
    return ConeCheck(margin >= -CONE_TOL, float(margin))


def polyline(points: Sequence[tuple[float, float]]) -> BVFunction:
    """Continuous piecewise-linear interpolant of (t, value) points spanning [0, 1]."""
    ts = [float(t) for t, _ in points]
    if len(ts) < 2 or ts[0] != 0.0 or ts[-1] != 1.0:
        raise MalformedInputError("polyline abscissae must start at 0 and end at 1")
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise MalformedInputError("polyline abscissae must be strictly increasing")
    pieces = []
    for (t0, y0), (t1, y1) in zip(points, points[1:]):
        slope = (float(y1) - float(y0)) / (float(t1) - float(t0))
        pieces.append((float(y0) - slope * float(t0), slope))
    return BVFunction(tuple(ts), tuple(pieces))


def harmonic_staircase(terms: int) -> BVFunction:
    """
    Truncation of A(t) = 1/n on (1/(n+1), 1/n): right-continuous steps
    1/n on [1/(n+1), 1/n) for n <= terms, zero below 1/(terms+1) and A(1) = 0.
    """
    if terms < 1:
        raise MalformedInputError("harmonic_staircase needs at least one term")
    points = [0.0] + [1.0 / (n + 1) for n in range(terms, 0, -1)] + [1.0]
    values = [0.0] + [1.0 / n for n in range(terms, 0, -1)]
    pieces = tuple((v,) for v in values)
    return BVFunction(tuple(points), pieces, ((1, Fraction(-1)),))


def identity() -> BVFunction:
    return BVFunction.from_polynomial((0.0, 1.0))
