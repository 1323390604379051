"""
Utility functions for loading and validating the solver configuration.

This module provides centralized access to grid size, tolerances and the other
run defaults used by the solvers, the checkers and the command-line front-end.
"""

import json
import logging
import os
from pathlib import Path
from typing import Any, Optional

logger = logging.getLogger(__name__)

DEFAULT_CONFIG: dict[str, Any] = {
    "grid": 256,
    "tol": 1e-8,
    "max_iter": 10000,
    "damping_window": 5,
    "sup_abs_max_grid": 1024,
    "witness_samples": 64,
    "probe_samples": 10000,
    "seed": 0,
}

ENV_OVERRIDES = {
    "HAMMERSTEIN_GRID": ("grid", int),
    "HAMMERSTEIN_TOL": ("tol", float),
}


def get_config_path() -> Path:
    """
    Get the path to the solver configuration file.

    Returns:
        Path to config/solver_config.json
    """
    project_root = Path(__file__).parent.parent.parent
    return project_root / 'config' / 'solver_config.json'


def load_solver_config(config_path: Optional[str] = None) -> dict[str, Any]:
    """
    Load solver configuration, layering file values and environment overrides
    over the built-in defaults.

    Args:
        config_path: Path to a JSON configuration file. If None, uses the default.

    Returns:
        Configuration dictionary. Missing or unreadable files fall back to defaults.
    """
    path = Path(config_path) if config_path else get_config_path()
    config = dict(DEFAULT_CONFIG)

    try:
        if path.exists():
            with open(path, 'r') as f:
                loaded = json.load(f)
            if isinstance(loaded, dict):
                config.update({k: v for k, v in loaded.items() if not k.startswith("_")})
            else:
                logger.warning("Solver config should be an object, got %s", type(loaded).__name__)
        else:
            logger.warning("Solver config file not found: %s (using defaults)", path)
    except json.JSONDecodeError as e:
        logger.error("Failed to parse solver config: %s", e)
    except OSError as e:
        logger.error("Failed to load solver config: %s", e)

    for env_name, (key, cast) in ENV_OVERRIDES.items():
        raw = os.getenv(env_name)
        if raw is None:
            continue
        try:
            config[key] = cast(raw)
        except ValueError:
            logger.warning("Ignoring %s=%r (not a valid %s)", env_name, raw, cast.__name__)

    return config


def validate_solver_config(config: dict[str, Any]) -> tuple[bool, list[str]]:
    """
    Validate a solver configuration.

    Checks that:
    - grid is an integer >= 8 and a power of two
    - tol lies in (0, 1e-2]
    - max_iter is a positive integer
    - sup_abs_max_grid is an integer >= 32 and seed a nonnegative integer

    Returns:
        Tuple of (is_valid, list_of_errors)
    """
    errors = []

    grid = config.get("grid")
    if not isinstance(grid, int) or grid < 8 or grid & (grid - 1):
        errors.append(f"grid must be a power of two >= 8, got {grid!r}")

    tol = config.get("tol")
    try:
        if not 0 < float(tol) <= 1e-2:
            errors.append(f"tol must lie in (0, 1e-2], got {tol!r}")
    except (TypeError, ValueError):
        errors.append(f"tol must be a number, got {tol!r}")

    max_iter = config.get("max_iter")
    if not isinstance(max_iter, int) or max_iter < 1:
        errors.append(f"max_iter must be a positive integer, got {max_iter!r}")

    max_grid = config.get("sup_abs_max_grid")
    if not isinstance(max_grid, int) or max_grid < 32:
        errors.append(f"sup_abs_max_grid must be an integer >= 32, got {max_grid!r}")

    seed = config.get("seed")
    if not isinstance(seed, int) or seed < 0:
        errors.append(f"seed must be a nonnegative integer, got {seed!r}")

    return (len(errors) == 0, errors)
