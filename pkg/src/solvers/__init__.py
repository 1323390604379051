"""
Solvers and hypothesis checkers for the Hammerstein toolkit.
"""

from .eigen import contraction_probe, eigenpair_search
from .hypotheses import conjugate_exponent, lw_hypothesis_check
from .kras import defect_by_simpson, kras_solve

__all__ = [
    'contraction_probe',
    'eigenpair_search',
    'conjugate_exponent',
    'lw_hypothesis_check',
    'defect_by_simpson',
    'kras_solve',
]
