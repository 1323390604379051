"""
Tests for the fixed-point solver, the eigenpair search and the hypothesis checker.
"""

import math

import numpy as np
import pytest

from src.bvp.catalog import example1, example1_dx_variant, example3
from src.bvp.problems import BVPKind, BVPSpec, periodic_threshold, reduce
from src.functions.bvfun import Domain, GridFunction
from src.functions.stieltjes import Functional
from src.models.kernels import Kernel
from src.models.nonlinearity import catalog_entry
from src.models.operators import PerturbedProblem
from src.models.reports import SolveStatus, Verdict
from src.solvers.eigen import contraction_probe, eigenpair_search
from src.solvers.hypotheses import conjugate_exponent, lw_hypothesis_check, measure_power
from src.solvers.kras import defect_by_simpson, kras_solve
from src.utils.errors import ConvergenceError, HypothesisError, MalformedInputError

LAMBDA0 = 1.0 / 294.0


class TestKrasSolve:
    """Fixed-point iteration on the three-point example."""

    @pytest.mark.parametrize("fraction", [0.5, 0.25])
    def test_matches_closed_form(self, fraction):
        lam = fraction * LAMBDA0
        spec = example3(form="multipoint", lam=lam)
        result = kras_solve(reduce(spec), tol=1e-10, n=256)
        assert result.converged
        assert result.certified
        assert result.residual_sup <= 1e-8
        np.testing.assert_allclose(result.x.values, spec.exact(result.x.nodes), atol=1e-6)
        assert result.range_ok

    def test_independent_defect(self):
        spec = example3(form="multipoint", lam=LAMBDA0 / 2.0)
        problem = reduce(spec)
        result = kras_solve(problem, tol=1e-10, n=128)
        assert defect_by_simpson(problem, result.x) <= 1e-9

    def test_uncertified_perturbation(self):
        alpha = Functional.points([(3, 0.5)])
        spec = BVPSpec("degenerate", BVPKind.MULTIPOINT, catalog_entry("one"), 0.01, alpha=alpha, beta=alpha)
        with pytest.raises(HypothesisError) as excinfo:
            kras_solve(reduce(spec), n=64)
        assert excinfo.value.labels == ("(A7)", "(B6)")

    def test_leaves_ball(self):
        problem = reduce(example3(form="multipoint", lam=LAMBDA0 / 2.0))
        result = kras_solve(problem, r=1e-6, n=64, check_hypotheses=False)
        assert result.status == SolveStatus.DIVERGED
        assert result.iterations == 1

    def test_linear_in_lambda(self):
        tol = 1e-10
        problem = reduce(example3(form="multipoint"))
        single = kras_solve(problem.with_lam(LAMBDA0 / 4.0), tol=tol, n=128)
        double = kras_solve(problem.with_lam(LAMBDA0 / 2.0), tol=tol, n=128)
        assert (double.x - 2.0 * single.x).sup_norm() <= 2.0 * tol

    @pytest.mark.parametrize("spec", [example1(f="zero"), example1_dx_variant()], ids=lambda spec: spec.name)
    def test_random_start_reaches_zero(self, spec, rng):
        x0 = GridFunction(rng.uniform(-1.0, 1.0, 65))
        result = kras_solve(reduce(spec), n=64, x0=x0)
        assert result.converged
        assert result.iterations == 2
        assert result.x.sup_norm() == 0.0

    def test_records_failed_growth_assumption(self):
        base = reduce(example3(form="multipoint"))
        problem = PerturbedProblem(base.kernel, catalog_entry("square"), base.perturbation, 1e-3, "square")
        result = kras_solve(problem, n=64)
        assert "(A11)" in result.failed_hypotheses
        assert "(A11)" in result.to_dict()["failed_hypotheses"]
        assert result.diagnostics["constants"]["verdicts"]["(A11)"] == "fail"

    def test_no_failed_assumptions_for_constant_forcing(self):
        result = kras_solve(reduce(example3(form="multipoint", lam=LAMBDA0 / 2.0)), n=64)
        assert "(A11)" not in result.failed_hypotheses

    def test_bad_settings(self):
        problem = reduce(example3(form="multipoint"))
        with pytest.raises(MalformedInputError):
            kras_solve(problem, tol=0.0)
        with pytest.raises(MalformedInputError):
            kras_solve(problem, check_hypotheses=False, n=64)
        with pytest.raises(MalformedInputError):
            kras_solve(problem, x0=GridFunction.zeros(32), n=64)


class TestEigenpairSearch:
    """Normalized iteration on the periodic problem."""

    def test_quarter_frequency(self):
        omega = math.pi / 2.0
        m = periodic_threshold(omega)
        result = eigenpair_search(Kernel.periodic(omega), catalog_entry("one"), Domain.unit(), m, 1.0, 1.0, tol=1e-10)
        assert result.certified
        assert result.lam * m == pytest.approx(omega ** -2, abs=1e-10)
        assert result.seminorm_residual == pytest.approx(0.0, abs=1e-12)
        assert result.range_ok

    def test_sign_changing_kernel(self):
        omega = 1.5 * math.pi
        m = periodic_threshold(omega)
        result = eigenpair_search(Kernel.periodic(omega), catalog_entry("positive_quadratic"), Domain.unit(),
                                  m, 1.0, 1.0, tol=1e-10)
        assert result.certified
        assert result.lam == pytest.approx(omega ** -2 * (1.0 + m ** 2) / m, rel=1e-8)
        assert result.cone_margin >= -1e-9

    def test_nonconstant_start(self):
        omega = math.pi / 2.0
        m = periodic_threshold(omega)
        x0 = GridFunction.from_callable(lambda t: 1.0 + 0.1 * np.cos(2.0 * np.pi * t), 64)
        result = eigenpair_search(Kernel.periodic(omega), catalog_entry("one"), Domain.unit(), m, 1.0, 1.0,
                                  tol=1e-9, n=64, x0=x0)
        assert result.certified
        assert result.lam * m == pytest.approx(omega ** -2, rel=1e-6)

    def test_zero_nonlinearity(self):
        omega = math.pi / 2.0
        m = periodic_threshold(omega)
        args = (Kernel.periodic(omega), catalog_entry("zero"), Domain.unit(), m, 1.0, 1.0)
        with pytest.raises(HypothesisError):
            eigenpair_search(*args, n=64)
        with pytest.raises(ConvergenceError):
            eigenpair_search(*args, n=64, check_hypotheses=False)


class TestContractionProbe:

    @pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
    def test_below_known_bound(self, r):
        probe = contraction_probe(Kernel.periodic(math.pi), catalog_entry("square"), r, samples=2000)
        assert 0.0 < probe <= r / math.pi

    def test_linear_f(self):
        # constant shifts reach the row integral 1/pi^2 of the nonnegative kernel
        probe = contraction_probe(Kernel.periodic(math.pi), catalog_entry("linear"), 1.0, samples=1000)
        assert probe == pytest.approx(math.pi ** -2, rel=1e-2)

    def test_radius(self):
        with pytest.raises(MalformedInputError):
            contraction_probe(Kernel.periodic(math.pi), catalog_entry("square"), 0.0)

    def test_seed(self):
        args = (Kernel.periodic(math.pi), catalog_entry("square"), 1.0)
        first = contraction_probe(*args, samples=200, seed=3)
        assert contraction_probe(*args, samples=200, seed=3) == first
        assert contraction_probe(*args, samples=200, seed=4) != first


class TestHypothesisCheck:

    def test_sign_changing_kernel(self):
        omega = 1.5 * math.pi
        report = lw_hypothesis_check(Kernel.periodic(omega), catalog_entry("positive_quadratic"), Domain.unit(),
                                     1.0, periodic_threshold(omega), 1.0)
        assert report.passed
        assert report.c == pytest.approx(2.0 * math.sqrt(2.0) / (3.0 * math.pi), abs=1e-6)
        assert report.verdicts["(B2)"] == Verdict.PASS
        assert report.q == math.inf

    def test_m_above_bound(self):
        omega = 1.5 * math.pi
        report = lw_hypothesis_check(Kernel.periodic(omega), catalog_entry("positive_quadratic"), Domain.unit(),
                                     1.0, 0.9, 1.0, n=64)
        assert not report.passed
        assert "(A6)" in report.failed
        assert "(B3)" in report.failed

    @pytest.mark.parametrize("p, m, r, theta", [(0.5, 0.3, 1.0, 0.5), (1.0, 0.0, 1.0, 0.5), (1.0, 0.3, 1.0, 1.0)])
    def test_invalid_arguments(self, p, m, r, theta):
        with pytest.raises(MalformedInputError):
            lw_hypothesis_check(Kernel.periodic(math.pi), catalog_entry("one"), Domain.unit(), p, m, r, theta, n=32)

    def test_conjugate_exponent(self):
        assert conjugate_exponent(1.0) == math.inf
        assert conjugate_exponent(2.0) == 2.0
        assert conjugate_exponent(4.0) == pytest.approx(4.0 / 3.0)
        with pytest.raises(MalformedInputError):
            conjugate_exponent(0.5)
        with pytest.raises(MalformedInputError):
            conjugate_exponent(math.inf)

    def test_measure_power(self):
        assert measure_power(0.25, math.inf) == 1.0
        assert measure_power(0.25, 2.0) == pytest.approx(0.5)
