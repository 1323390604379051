"""
Caratheodory nonlinearities f(t, u) with the growth majorants the existence
theorems need: |f(t, u)| <= phi(t) psi(|u|) with psi a nondecreasing
piecewise-linear table.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Any, Callable, Optional, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from ..functions.bvfun import GridFunction
from ..utils.errors import MalformedInputError

logger = logging.getLogger(__name__)

MAX_DEGREE = 4
DEFAULT_R_MAX = 100.0
PHI_GRID = 256
GROWTH_TOL = 1e-12


class NonlinearityKind(Enum):
    CONSTANT = "constant"
    POLYNOMIAL = "poly"
    CATALOG = "catalog"


def psi_nodes(r_max: float = DEFAULT_R_MAX) -> np.ndarray:
    """Table abscissae: 0, geometric to 1, geometric to r_max (1 is always a node)."""
    if r_max <= 1.0:
        return np.unique(np.concatenate(([0.0], np.geomspace(1e-3, 1.0, 97))))
    return np.unique(np.concatenate(([0.0], np.geomspace(1e-3, 1.0, 97), np.geomspace(1.0, r_max, 161))))


def upper_table(growth: Callable[[np.ndarray], np.ndarray], r_max: float = DEFAULT_R_MAX) -> tuple:
    """
    Piecewise-linear majorant of a nondecreasing growth function: node i carries
    the value at node i + 1, so every segment stays above the function.
    """
    r = psi_nodes(r_max)
    g = np.maximum.accumulate(np.asarray(growth(r), dtype=float))
    values = np.append(g[1:], g[-1])
    return tuple(zip(r.tolist(), values.tolist()))


@dataclass(frozen=True, eq=False)
class Nonlinearity:
    """
    f(t, u) together with phi, the psi table and an optional positivity window.

    Polynomials are stored as coefficient tables c[i][j] of t^i u^j.
    """

    name: str
    kind: NonlinearityKind
    coefficients: Optional[np.ndarray] = field(default=None, repr=False)
    func: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = field(default=None, repr=False)
    phi: Optional[GridFunction] = field(default=None, repr=False)
    psi_table: tuple[tuple[float, float], ...] = field(default=(), repr=False)
    growth: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False)
    lipschitz: Optional[Callable[[float], float]] = field(default=None, repr=False)

    def __post_init__(self):
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", NonlinearityKind(self.kind))

        if self.kind in (NonlinearityKind.CONSTANT, NonlinearityKind.POLYNOMIAL):
            coef = np.atleast_2d(np.array(self.coefficients, dtype=float))
            if coef.shape[0] > MAX_DEGREE + 1 or coef.shape[1] > MAX_DEGREE + 1:
                raise MalformedInputError(f"polynomial nonlinearity degree exceeds {MAX_DEGREE}")
            if not np.all(np.isfinite(coef)):
                raise MalformedInputError("nonlinearity coefficients must be finite")
            coef.setflags(write=False)
            object.__setattr__(self, "coefficients", coef)
        elif self.func is None:
            raise MalformedInputError(f"catalog nonlinearity {self.name!r} needs a callable")

        if self.phi is None:
            object.__setattr__(self, "phi", GridFunction.constant(1.0, PHI_GRID))
        elif np.any(self.phi.values < 0):
            raise MalformedInputError("phi must be nonnegative", label="(A10)")

        if not self.psi_table:
            object.__setattr__(self, "psi_table", upper_table(self._default_growth))
        table = np.asarray(self.psi_table, dtype=float)
        if table.ndim != 2 or table.shape[1] != 2 or table.shape[0] < 2:
            raise MalformedInputError("psi table needs at least two (r, psi) rows")
        if table[0, 0] != 0.0 or np.any(np.diff(table[:, 0]) <= 0):
            raise MalformedInputError("psi table abscissae must start at 0 and increase")
        if np.any(np.diff(table[:, 1]) < 0) or np.any(table[:, 1] < 0):
            raise MalformedInputError("psi must be nonnegative and nondecreasing", label="(A10)")
        object.__setattr__(self, "psi_table", tuple(map(tuple, table.tolist())))

    # -- constructors -------------------------------------------------------

    @classmethod
    def constant(cls, value: float, name: Optional[str] = None) -> Nonlinearity:
        return cls(name or f"constant({value:g})", NonlinearityKind.CONSTANT, coefficients=[[float(value)]])

    @classmethod
    def polynomial(cls, coefficients: Sequence[Sequence[float]], name: str = "poly", **kwargs) -> Nonlinearity:
        return cls(name, NonlinearityKind.POLYNOMIAL, coefficients=coefficients, **kwargs)

    @classmethod
    def from_callable(cls, name: str, func: Callable, growth: Callable, **kwargs) -> Nonlinearity:
        return cls(name, NonlinearityKind.CATALOG, func=func, growth=growth, **kwargs)

    # -- evaluation ---------------------------------------------------------

    def __call__(self, t, u):
        t_arr, u_arr = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(u, dtype=float))
        if self.coefficients is not None:
            values = P.polyval2d(t_arr, u_arr, self.coefficients)
        else:
            values = np.asarray(self.func(t_arr, u_arr), dtype=float)
        return float(values) if np.ndim(values) == 0 else values

    def _default_growth(self, r: np.ndarray) -> np.ndarray:
        if self.growth is not None:
            return self.growth(r)
        # sup over t in [0, 1] of |sum c_ij t^i u^j| <= sum |c_ij| r^j
        column = np.sum(np.abs(self.coefficients), axis=0)
        return P.polyval(r, column)

    @property
    def r_max(self) -> float:
        return self.psi_table[-1][0]

    @cached_property
    def _psi_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        table = np.asarray(self.psi_table)
        return table[:, 0], table[:, 1]

    def psi(self, r):
        """Piecewise-linear psi; arguments beyond the table are rejected."""
        r_arr = np.asarray(r, dtype=float)
        if np.any(r_arr < 0) or np.any(r_arr > self.r_max):
            raise MalformedInputError(f"psi evaluated outside its table range [0, {self.r_max}]")
        values = np.interp(r_arr, *self._psi_arrays)
        return float(values) if np.ndim(values) == 0 else values

    def phi_at(self, t):
        return np.interp(np.asarray(t, dtype=float), self.phi.nodes, self.phi.values)

    @property
    def is_constant(self) -> bool:
        return self.kind == NonlinearityKind.CONSTANT or (
            self.coefficients is not None and not np.any(self.coefficients.ravel()[1:]))

    # -- checks -------------------------------------------------------------

    def verify_growth(self, t_samples: int = 33, u_samples: int = 129) -> tuple[bool, float]:
        """
        Check |f(t, u)| <= phi(t) psi(|u|) on a (t, u) grid over |u| <= r_max.

        Returns:
            Tuple of (holds, largest excess)
        """
        t = np.linspace(0.0, 1.0, t_samples)[:, None]
        u = np.linspace(-self.r_max, self.r_max, u_samples)[None, :]
        excess = np.abs(self(t, u)) - self.phi_at(t) * self.psi(np.abs(u))
        worst = float(np.max(excess))
        return worst <= GROWTH_TOL * max(1.0, self.psi(self.r_max)), worst

    def window_min(self, t_lo: float, t_hi: float, u_lo: float, u_hi: float, samples: int = 65) -> float:
        """min f over t in [t_lo, t_hi] and u_lo <= |u| <= u_hi (both signs of u)."""
        t = np.linspace(t_lo, t_hi, samples)[:, None]
        mag = np.linspace(u_lo, u_hi, samples)
        u = np.concatenate([mag, -mag])[None, :]
        return float(np.min(self(t, u)))

    def window_sup(self, r: float, samples: int = 129) -> GridFunction:
        """g_r(t) = sup over |u| <= r of |f(t, u)| on the phi grid."""
        t = self.phi.nodes[:, None]
        u = np.linspace(-r, r, samples)[None, :]
        return GridFunction(np.max(np.abs(self(t, u)), axis=1))

    def lipschitz_bound(self, r: float) -> Optional[float]:
        """Certified Lipschitz constant in u over |u| <= r, when the entry supplies one."""
        if self.lipschitz is not None:
            return float(self.lipschitz(r))
        if self.coefficients is None:
            return None
        # |d/du sum c_ij t^i u^j| <= sum j |c_ij| r^(j-1)
        column = np.sum(np.abs(self.coefficients), axis=0)
        return float(P.polyval(r, P.polyder(column))) if column.size > 1 else 0.0

    def to_dict(self) -> dict[str, Any]:
        if self.kind == NonlinearityKind.CONSTANT:
            return {"kind": "constant", "value": repr(float(self.coefficients[0, 0]))}
        if self.kind == NonlinearityKind.POLYNOMIAL:
            return {"kind": "poly", "name": self.name,
                    "coefficients": [[repr(float(c)) for c in row] for row in self.coefficients]}
        return {"kind": "catalog", "name": self.name}

    def __repr__(self) -> str:
        return f"Nonlinearity({self.name!r}, kind={self.kind.value})"


def _square() -> Nonlinearity:
    return Nonlinearity.polynomial([[0.0, 0.0, 1.0]], name="square")


def _linear() -> Nonlinearity:
    return Nonlinearity.polynomial([[0.0, 1.0]], name="linear")


def _positive_quadratic() -> Nonlinearity:
    return Nonlinearity.polynomial([[1.0, 0.0, 1.0]], name="positive_quadratic")


def _sqrt_growth() -> Nonlinearity:
    return Nonlinearity.from_callable(
        "sqrt_growth",
        func=lambda t, u: np.sqrt(1.0 + np.abs(u)),
        growth=lambda r: np.sqrt(1.0 + r),
        lipschitz=lambda r: 0.5,
    )


def _damped_sine() -> Nonlinearity:
    return Nonlinearity.from_callable(
        "damped_sine",
        func=lambda t, u: (1.0 + t) * (2.0 + np.sin(u)),
        growth=lambda r: np.full_like(r, 3.0),
        phi=GridFunction.from_callable(lambda t: 1.0 + t, PHI_GRID),
        lipschitz=lambda r: 2.0,
    )


CATALOG: dict[str, Callable[[], Nonlinearity]] = {
    "zero": lambda: Nonlinearity.constant(0.0, name="zero"),
    "one": lambda: Nonlinearity.constant(1.0, name="one"),
    "two": lambda: Nonlinearity.constant(2.0, name="two"),
    "square": _square,
    "linear": _linear,
    "positive_quadratic": _positive_quadratic,
    "sqrt_growth": _sqrt_growth,
    "damped_sine": _damped_sine,
}


def catalog_entry(name: str) -> Nonlinearity:
    try:
        factory = CATALOG[name]
    except KeyError:
        raise MalformedInputError(
            f"unknown nonlinearity {name!r}; choose one of {', '.join(sorted(CATALOG))}") from None
    return factory()
