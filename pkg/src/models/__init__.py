"""
Operator models for the Hammerstein toolkit.

This package contains the kernels, nonlinearities and operators of the
perturbed Hammerstein equation together with the report types that carry
theorem constants and verdicts.
"""

from .kernels import (
    BoundingFunction,
    Kernel,
    KernelKind,
    build_bounding,
    continuity_modulus,
    eval_kernel,
    row_integral,
    sup_abs,
    t_variation,
    verify_bounding,
)
from .nonlinearity import CATALOG, Nonlinearity, NonlinearityKind, catalog_entry
from .operators import (
    LinearPerturbation,
    PerturbedProblem,
    apply_F1,
    apply_F2,
    f1_iterate_bound,
    f1_norm_bound,
    f1_power_bound,
    f2_bv_bound,
    kras_constants,
    neumann_apply,
    perturbation_gap,
    spectral_radius_bound,
    spectral_radius_estimate,
)
from .reports import KrasReport, LWReport, ResidualReport, SolveResult, SolveStatus, TheoremCheck, Verdict

__all__ = [
    'BoundingFunction',
    'Kernel',
    'KernelKind',
    'build_bounding',
    'continuity_modulus',
    'eval_kernel',
    'row_integral',
    'sup_abs',
    't_variation',
    'verify_bounding',
    'CATALOG',
    'Nonlinearity',
    'NonlinearityKind',
    'catalog_entry',
    'LinearPerturbation',
    'PerturbedProblem',
    'apply_F1',
    'apply_F2',
    'f1_iterate_bound',
    'f1_norm_bound',
    'f1_power_bound',
    'f2_bv_bound',
    'kras_constants',
    'neumann_apply',
    'perturbation_gap',
    'spectral_radius_bound',
    'spectral_radius_estimate',
    'KrasReport',
    'LWReport',
    'ResidualReport',
    'SolveResult',
    'SolveStatus',
    'TheoremCheck',
    'Verdict',
]
