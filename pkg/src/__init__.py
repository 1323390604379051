"""
Hammerstein Toolkit - solvers and hypothesis checkers for (perturbed) Hammerstein
integral equations with nonlocal Riemann-Stieltjes boundary functionals.
"""

__version__ = '1.0.0'
