"""
Function spaces for the Hammerstein toolkit.

Bounded-variation functions with exact variation, grid functions carrying
solver iterates, and the Riemann-Stieltjes functionals built on them.
"""

from .bvfun import (
    BVFunction,
    ConeCheck,
    Domain,
    GridFunction,
    bv_norm,
    cone_check,
    harmonic_staircase,
    identity,
    lp_seminorm,
    omega0_integral,
    oscillation,
    polyline,
    sup_norm,
    variation,
)
from .stieltjes import (
    Functional,
    FunctionalKind,
    difference,
    dyadic_sum,
    functional_norm_upper,
    functional_norm_witness,
    rs_dA,
    rs_dx,
    rs_sum,
    witness_family,
)

__all__ = [
    'BVFunction',
    'ConeCheck',
    'Domain',
    'GridFunction',
    'bv_norm',
    'cone_check',
    'harmonic_staircase',
    'identity',
    'lp_seminorm',
    'omega0_integral',
    'oscillation',
    'polyline',
    'sup_norm',
    'variation',
    'Functional',
    'FunctionalKind',
    'difference',
    'dyadic_sum',
    'functional_norm_upper',
    'functional_norm_witness',
    'rs_dA',
    'rs_dx',
    'rs_sum',
    'witness_family',
]
