"""
Boundary value problems for the Hammerstein toolkit.

This package reduces periodic and nonlocal boundary value problems to
perturbed Hammerstein equations, checks the existence-theorem hypotheses on
them and verifies computed solutions against the differential form.
"""

from .catalog import (
    ReferenceValue,
    catalog_lookup,
    contraction_instance,
    example1,
    example1_dx_variant,
    example3,
    example3_solution,
    example_catalog,
    periodic,
    reference_values,
)
from .problems import BVPKind, BVPSpec, check_theorem, periodic_threshold, reduce, verify_solution

__all__ = [
    'ReferenceValue',
    'catalog_lookup',
    'contraction_instance',
    'example1',
    'example1_dx_variant',
    'example3',
    'example3_solution',
    'example_catalog',
    'periodic',
    'reference_values',
    'BVPKind',
    'BVPSpec',
    'check_theorem',
    'periodic_threshold',
    'reduce',
    'verify_solution',
]
