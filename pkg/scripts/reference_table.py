"""
Reference Value Table

Recomputes every closed-form value of the worked examples (Green's-function
identities, nonlocal constants, the Example 3 closed form, the contraction
bound) and prints expected against computed values.

Usage:
    python scripts/reference_table.py [grid]
"""

import sys

from src.bvp.catalog import reference_values
from src.utils.logging_setup import configure_logging
from src.utils.solver_config import load_solver_config


def main() -> int:
    """Print the table; the exit status is 1 when any row is off."""
    configure_logging("WARNING")
    config = load_solver_config()
    grid = int(sys.argv[1]) if len(sys.argv) > 1 else config["grid"]

    print("=" * 78)
    print(f"Reference values (grid={grid}, tol={config['tol']:g})")
    print("=" * 78)

    rows = reference_values(grid, config["tol"], config["probe_samples"],
                            seed=config["seed"], max_grid=config["sup_abs_max_grid"])
    for row in rows:
        mark = "ok  " if row.passed else "FAIL"
        print(f"{mark} {row.quantity:<48} expected={row.expected:<22.15g} computed={row.computed:.15g}")

    failed = sum(not row.passed for row in rows)
    print()
    print(f"{len(rows) - failed}/{len(rows)} values reproduced")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
