"""
Problem-spec documents and run artifacts.

A problem-spec document is JSON with a schema version and four sections:

    {
      "schema": 1,
      "problem": {"name": "...", "kind": "multipoint", "lam": "0.0017", ...},
      "nonlinearity": {"kind": "catalog", "name": "two"},
      "functionals": {"alpha": {...}, "beta": {...}},
      "solver": {"grid": "256", "tol": "1e-8"}
    }

Every number is written as a decimal string (fractions such as "1/5" are
accepted too) so documents parse identically on every platform.
"""

import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Optional

import numpy as np
import pandas as pd

from ..bvp.problems import BVPKind, BVPSpec
from ..functions.bvfun import BVFunction, GridFunction
from ..functions.stieltjes import Functional
from ..models.nonlinearity import Nonlinearity, catalog_entry
from ..utils.errors import MalformedInputError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
FLOAT_FORMAT = "%.15g"
SOLVER_KEYS = {"grid": int, "tol": float, "max_iter": int, "p": float, "m": float, "r": float, "theta": float}


# -- parsing --------------------------------------------------------------------

def _exact(value: Any, what: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise MalformedInputError(f"{what} must be a decimal string, got {value!r}")
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError):
        raise MalformedInputError(f"{what} is not a number: {value!r}") from None


def _number(value: Any, what: str) -> float:
    if isinstance(value, str) and value.strip().lower() in ("inf", "-inf", "nan"):
        raise MalformedInputError(f"{what} must be finite, got {value!r}")
    return float(_exact(value, what))


def _section(document: dict, key: str, required: bool = True) -> dict:
    section = document.get(key)
    if section is None and not required:
        return {}
    if not isinstance(section, dict):
        raise MalformedInputError(f"spec document needs an object '{key}'")
    return section


def parse_bv(data: Any, what: str) -> BVFunction:
    if not isinstance(data, dict):
        raise MalformedInputError(f"{what} must be an object with breakpoints, pieces and jumps")
    try:
        breakpoints = [_number(t, f"{what} breakpoint") for t in data["breakpoints"]]
        pieces = [[_number(c, f"{what} coefficient") for c in row] for row in data["pieces"]]
    except (KeyError, TypeError):
        raise MalformedInputError(f"{what} needs 'breakpoints' and 'pieces' lists") from None
    jumps = []
    for row in data.get("jumps", []):
        if not isinstance(row, (list, tuple)) or len(row) != 2:
            raise MalformedInputError(f"{what} jumps must be [location, height] pairs")
        jumps.append((_exact(row[0], f"{what} jump location"), _exact(row[1], f"{what} jump height")))
    return BVFunction(tuple(breakpoints), tuple(tuple(row) for row in pieces), tuple(jumps))


def parse_points(data: Any, what: str) -> Functional:
    if not isinstance(data, dict) or data.get("kind", "points") != "points":
        raise MalformedInputError(f"{what} must be a points functional")
    nodes = []
    for row in data.get("nodes", []):
        if not isinstance(row, (list, tuple)) or len(row) != 2:
            raise MalformedInputError(f"{what} nodes must be [weight, location] pairs")
        nodes.append((_exact(row[0], f"{what} weight"), _exact(row[1], f"{what} location")))
    return Functional.points(nodes)


def parse_nonlinearity(data: dict) -> Nonlinearity:
    kind = data.get("kind", "catalog")
    if kind == "catalog":
        return catalog_entry(str(data.get("name")))
    if kind == "constant":
        return Nonlinearity.constant(_number(data.get("value"), "nonlinearity value"))
    if kind == "poly":
        rows = data.get("coefficients")
        if not isinstance(rows, list) or not rows:
            raise MalformedInputError("poly nonlinearity needs a coefficient table")
        table = [[_number(c, "nonlinearity coefficient") for c in row] for row in rows]
        width = max(len(row) for row in table)
        return Nonlinearity.polynomial([row + [0.0] * (width - len(row)) for row in table],
                                       name=str(data.get("name", "poly")))
    raise MalformedInputError(f"unknown nonlinearity kind {kind!r}")


def parse_document(document: Any) -> tuple[BVPSpec, dict[str, Any]]:
    """
    Build the problem and the solver overrides from a parsed document.

    Raises:
        MalformedInputError: wrong schema, missing sections or invalid values.
    """
    if not isinstance(document, dict):
        raise MalformedInputError("spec document must be a JSON object")
    if document.get("schema") != SCHEMA_VERSION:
        raise MalformedInputError(f"unsupported spec schema {document.get('schema')!r}, expected {SCHEMA_VERSION}")

    problem = _section(document, "problem")
    f = parse_nonlinearity(_section(document, "nonlinearity"))
    functionals = _section(document, "functionals", required=False)
    kind = problem.get("kind")
    try:
        kind = BVPKind(kind)
    except ValueError:
        raise MalformedInputError(f"unknown problem kind {kind!r}") from None

    fields: dict[str, Any] = {
        "name": str(problem.get("name", kind.value)),
        "kind": kind,
        "nonlinearity": f,
        "lam": _number(problem.get("lam", "1"), "lam"),
    }
    if "omega" in problem:
        fields["omega"] = _number(problem["omega"], "omega")
    if "r" in problem:
        fields["r"] = _number(problem["r"], "r")
    if "exact_solution" in problem:
        fields["exact_solution"] = tuple(_number(c, "exact solution coefficient") for c in problem["exact_solution"])
    if kind in (BVPKind.NONLOCAL_DX, BVPKind.NONLOCAL_DA):
        fields["A"] = parse_bv(functionals.get("A"), "A")
        fields["B"] = parse_bv(functionals.get("B"), "B")
    elif kind == BVPKind.MULTIPOINT:
        fields["alpha"] = parse_points(functionals.get("alpha"), "alpha")
        fields["beta"] = parse_points(functionals.get("beta"), "beta")
    if kind != BVPKind.PERIODIC:
        for key in ("v", "w"):
            if functionals.get(key) is not None:
                fields[key] = parse_bv(functionals[key], key)
    spec = BVPSpec(**fields)

    solver = {}
    for key, value in _section(document, "solver", required=False).items():
        if key not in SOLVER_KEYS:
            raise MalformedInputError(f"unknown solver setting {key!r}")
        cast = SOLVER_KEYS[key]
        number = _exact(value, f"solver {key}")
        if cast is int and number.denominator != 1:
            raise MalformedInputError(f"solver {key} must be an integer, got {value!r}")
        solver[key] = cast(number)
    return spec, solver


def load_document(path: str | Path) -> tuple[BVPSpec, dict[str, Any]]:
    try:
        with open(path, "r") as f:
            document = json.load(f)
    except json.JSONDecodeError as e:
        raise MalformedInputError(f"cannot parse spec document {path}: {e}") from e
    except OSError as e:
        raise MalformedInputError(f"cannot read spec document {path}: {e}") from e
    spec, solver = parse_document(document)
    logger.info("Loaded %r from %s", spec, path)
    return spec, solver


def to_document(spec: BVPSpec, solver: Optional[dict[str, Any]] = None) -> dict[str, Any]:
    """Inverse of parse_document for catalog entries."""
    problem = spec.to_dict()
    functionals = {}
    for key in ("A", "B", "alpha", "beta", "v", "w"):
        value = problem.pop(key, None)
        if value is not None:
            functionals[key] = value
    return {
        "schema": SCHEMA_VERSION,
        "problem": problem,
        "nonlinearity": spec.nonlinearity.to_dict(),
        "functionals": functionals,
        "solver": {k: repr(v) for k, v in (solver or {}).items()},
    }


# -- artifacts ------------------------------------------------------------------

def _write_frame(frame: pd.DataFrame, out: Optional[str | Path]) -> str:
    text = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    if out is not None:
        Path(out).write_text(text)
    return text


def solution_frame(x: GridFunction, exact: Optional[np.ndarray] = None) -> pd.DataFrame:
    frame = pd.DataFrame({"t": x.nodes, "x": x.values})
    if exact is not None:
        frame["exact"] = exact
    return frame


def write_solution_csv(x: GridFunction, out: Optional[str | Path] = None,
                       exact: Optional[np.ndarray] = None) -> str:
    """Solution table t, x(t) (plus the closed form when known) at the grid nodes."""
    return _write_frame(solution_frame(x, exact), out)


def write_table_csv(rows: Iterable[dict[str, Any]], columns: list[str], out: Optional[str | Path] = None) -> str:
    return _write_frame(pd.DataFrame(list(rows), columns=columns), out)


def write_report(report: dict[str, Any], out: Optional[str | Path] = None) -> str:
    text = json.dumps(report, indent=2, sort_keys=True, default=str) + "\n"
    if out is not None:
        Path(out).write_text(text)
    return text
