"""
Shared utilities: solver configuration, exception hierarchy and logging setup.
"""

from .errors import HammersteinError, MalformedInputError, HypothesisError, ConvergenceError
from .solver_config import load_solver_config, validate_solver_config, get_config_path
from .logging_setup import configure_logging

__all__ = [
    'HammersteinError',
    'MalformedInputError',
    'HypothesisError',
    'ConvergenceError',
    'load_solver_config',
    'validate_solver_config',
    'get_config_path',
    'configure_logging',
]
