"""
Command-line front-end.

Usage:
    python -m src.cli solve --example example3-multipoint --out solution.csv
    python -m src.cli check --spec config/specs/example1_dA.json --format report
    python -m src.cli eig --example periodic-0.5pi
    python -m src.cli verify --spec config/specs/example3_dx.json
    python -m src.cli examples --out reference_values.csv

Exit codes: 0 success, 1 hypothesis failure, 2 non-convergence, 3 malformed input.
Failures also print one machine-parseable line on stderr.
"""

import argparse
import logging
import sys
from typing import Any, Optional

from ..bvp.catalog import catalog_lookup, reference_values
from ..bvp.problems import BVPKind, BVPSpec, check_theorem, periodic_threshold, reduce, verify_solution
from ..functions.bvfun import Domain
from ..models.reports import Verdict
from ..solvers.eigen import eigenpair_search
from ..solvers.kras import kras_solve
from ..utils.errors import ConvergenceError, HammersteinError, HypothesisError, MalformedInputError
from ..utils.logging_setup import configure_logging
from ..utils.solver_config import load_solver_config, validate_solver_config
from .spec_document import load_document, write_report, write_solution_csv, write_table_csv

logger = logging.getLogger(__name__)

COMMANDS = ("solve", "eig", "check", "verify", "examples")
REFERENCE_COLUMNS = ["quantity", "expected", "computed", "abs_error", "status"]
BC_TOL = 1e-8


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="python -m src.cli",
        description="Solve and check Hammerstein integral equations with nonlocal boundary conditions.",
    )
    parser.add_argument("command", choices=COMMANDS)
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--spec", help="problem-spec document (JSON)")
    source.add_argument("--example", help="catalog problem name")
    parser.add_argument("--grid", type=int, help="number of grid intervals (power of two, >= 8)")
    parser.add_argument("--tol", type=float, help="solver tolerance in (0, 1e-2]")
    parser.add_argument("--max-iter", type=int, dest="max_iter", help="iteration cap")
    parser.add_argument("--lam", type=float, help="override lam of the problem")
    parser.add_argument("--out", help="output file (default: stdout)")
    parser.add_argument("--format", choices=("csv", "report"), default="csv")
    parser.add_argument("--config", help="solver configuration file")
    parser.add_argument("--log-level", dest="log_level", help="DEBUG, INFO, WARNING or ERROR")
    return parser


def _settings(args: argparse.Namespace, overrides: dict[str, Any]) -> dict[str, Any]:
    config = load_solver_config(args.config)
    config.update(overrides)
    for key in ("grid", "tol", "max_iter"):
        value = getattr(args, key)
        if value is not None:
            config[key] = value
    valid, errors = validate_solver_config(config)
    if not valid:
        raise MalformedInputError("; ".join(errors))
    return config


def _load_problem(args: argparse.Namespace) -> tuple[BVPSpec, dict[str, Any]]:
    if args.spec:
        spec, overrides = load_document(args.spec)
    elif args.example:
        spec, overrides = catalog_lookup(args.example), {}
    else:
        raise MalformedInputError(f"'{args.command}' needs --spec or --example")
    if args.lam is not None:
        spec = spec.with_lam(args.lam)
    # surfaces structural problems such as v + w != 1 before any work
    reduce(spec)
    return spec, overrides


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        logger.info("Wrote %s", out)


def run_solve(spec: BVPSpec, config: dict[str, Any], args: argparse.Namespace) -> tuple[int, dict[str, Any]]:
    n, tol = config["grid"], config["tol"]
    result = kras_solve(reduce(spec), tol=tol, max_iter=config["max_iter"], n=n)
    residuals = verify_solution(spec, result.x)
    report = {"problem": spec.to_dict(), "solve": result.to_dict(), "residuals": residuals.to_dict()}
    exact = spec.exact(result.x.nodes)
    if exact is not None:
        report["exact_sup_error"] = float(abs(result.x.values - exact).max())

    if args.format == "csv":
        _emit(write_solution_csv(result.x, args.out, exact), args.out)
    else:
        _emit(write_report(report, args.out), args.out)
    if not result.certified:
        raise ConvergenceError(f"defect {result.residual_sup:.3e} above tol {tol:g} ({result.status.value})")
    return 0, report


def run_eig(spec: BVPSpec, config: dict[str, Any], args: argparse.Namespace) -> tuple[int, dict[str, Any]]:
    if spec.kind != BVPKind.PERIODIC and "m" not in config:
        raise MalformedInputError("eigenpair search on a nonlocal problem needs solver setting 'm'")
    p = config.get("p", 1.0)
    r = config.get("r", spec.r if spec.r is not None else 1.0)
    m = config.get("m") or periodic_threshold(spec.omega)
    problem = reduce(spec)
    result = eigenpair_search(problem.kernel, spec.nonlinearity, Domain.unit(), m, p, r,
                              tol=config["tol"], max_iter=config["max_iter"], n=config["grid"],
                              theta=config.get("theta", 0.5), damping_window=config["damping_window"],
                              max_grid=config["sup_abs_max_grid"])
    report = {"problem": spec.to_dict(), "eig": result.to_dict()}
    if args.format == "csv":
        _emit(write_solution_csv(result.x, args.out), args.out)
    else:
        _emit(write_report(report, args.out), args.out)
    if not result.certified:
        raise ConvergenceError(f"eigen residual {result.residual_sup:.3e} above tol ({result.status.value})")
    return 0, report


def run_check(spec: BVPSpec, config: dict[str, Any], args: argparse.Namespace) -> tuple[int, dict[str, Any]]:
    check = check_theorem(spec, config["grid"], config["witness_samples"], config["sup_abs_max_grid"])
    report: dict[str, Any] = {"problem": spec.to_dict(), "theorem": check.to_dict()}
    constants = reduce(spec).constants(config["grid"])
    report["constants"] = constants.to_dict()

    if args.format == "csv":
        rows = [{"label": label, "verdict": verdict.value} for label, verdict in constants.verdicts.items()]
        rows.insert(0, {"label": check.quantity, "verdict": check.verdict.value})
        _emit(write_table_csv(rows, ["label", "verdict"], args.out), args.out)
    else:
        _emit(write_report(report, args.out), args.out)
    if check.verdict != Verdict.PASS:
        raise HypothesisError(f"{check.quantity} = {check.value:.10g} (threshold {check.threshold:g})",
                              labels=check.labels)
    return 0, report


def run_verify(spec: BVPSpec, config: dict[str, Any], args: argparse.Namespace) -> tuple[int, dict[str, Any]]:
    n, tol = config["grid"], config["tol"]
    exact = spec.exact_grid(n)
    if exact is not None:
        x = exact
        source = "closed form"
    else:
        x = kras_solve(reduce(spec), tol=tol, max_iter=config["max_iter"], n=n).x
        source = "solver"
    residuals = verify_solution(spec, x)
    h = 1.0 / n
    ode_tol = 10.0 * (tol + h ** 2 * max(1.0, x.sup_norm()))
    passed = residuals.passed(ode_tol, BC_TOL)
    report = {"problem": spec.to_dict(), "source": source, "residuals": residuals.to_dict(),
              "ode_tol": ode_tol, "bc_tol": BC_TOL, "passed": passed}

    if args.format == "csv":
        rows = [{"residual": "ode", "value": residuals.ode_residual}]
        rows.extend({"residual": name, "value": value} for name, value in residuals.bc_residuals.items())
        _emit(write_table_csv(rows, ["residual", "value"], args.out), args.out)
    else:
        _emit(write_report(report, args.out), args.out)
    if not passed:
        raise ConvergenceError(f"residuals above tolerance (ode {residuals.ode_residual:.3e}, "
                               f"boundary {residuals.bc_max:.3e})")
    return 0, report


def run_examples(config: dict[str, Any], args: argparse.Namespace) -> tuple[int, dict[str, Any]]:
    rows = reference_values(config["grid"], config["tol"], config["probe_samples"],
                            seed=config["seed"], max_grid=config["sup_abs_max_grid"])
    report = {"reference_values": [row.to_dict() for row in rows]}
    if args.format == "csv":
        _emit(write_table_csv((row.to_dict() for row in rows), REFERENCE_COLUMNS, args.out), args.out)
    else:
        _emit(write_report(report, args.out), args.out)
    failed = [row.quantity for row in rows if not row.passed]
    if failed:
        raise ConvergenceError(f"reference values not reproduced: {', '.join(failed)}")
    return 0, report


def run(args: argparse.Namespace) -> int:
    """Execute one command; exceptions are mapped to exit codes by main()."""
    if args.command == "examples":
        config = _settings(args, {})
        code, _ = run_examples(config, args)
        return code

    spec, overrides = _load_problem(args)
    config = _settings(args, overrides)
    handler = {"solve": run_solve, "eig": run_eig, "check": run_check, "verify": run_verify}[args.command]
    code, _ = handler(spec, config, args)
    return code


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        return run(args)
    except HammersteinError as e:
        logger.error("%s failed: %s", args.command, e)
        print(e.machine_line(), file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
