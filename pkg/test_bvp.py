"""
Tests for boundary value problems, their reduction and the worked examples.
"""

import math
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

from src.bvp.catalog import (
    DEFAULT_NODES,
    ReferenceValue,
    catalog_lookup,
    contraction_instance,
    example1,
    example1_dx_variant,
    example3,
    example3_solution,
    example_catalog,
    periodic,
)
from src.bvp.problems import BVPKind, BVPSpec, check_theorem, periodic_threshold, reduce, verify_solution
from src.functions.bvfun import BVFunction, GridFunction, identity
from src.functions.stieltjes import Functional, FunctionalKind
from src.models.kernels import KernelKind
from src.models.nonlinearity import catalog_entry
from src.models.reports import Verdict
from src.solvers.kras import kras_solve
from src.utils.errors import MalformedInputError


def _random_nodes(rng):
    a, b, c = sorted(rng.choice(np.arange(1, 100), size=3, replace=False).tolist())
    return Fraction(a, 100), Fraction(b, 100), Fraction(c, 100)


class TestCatalog:

    def test_names(self):
        names = [spec.name for spec in example_catalog()]
        assert len(names) == 10
        assert len(set(names)) == len(names)
        assert "periodic-0.5pi" in names

    def test_lookup(self):
        assert catalog_lookup("example3-dx").kind == BVPKind.NONLOCAL_DX
        with pytest.raises(MalformedInputError):
            catalog_lookup("example2")

    def test_example3_closed_form(self):
        assert example3_solution(*DEFAULT_NODES) == (-1, Fraction(9, 5), Fraction(-24, 25))

    def test_closed_form_satisfies_conditions(self, rng):
        for _ in range(50):
            a, b, c = _random_nodes(rng)
            if 1 + 2 * a - 2 * b == 0:
                continue
            lead, p, q = example3_solution(a, b, c)

            def x(t):
                return lead * t * t + p * t + q

            assert x(0) == 2 * x(a) - 2 * x(c)
            assert x(1) == 2 * x(b) - 2 * x(c)

    def test_singular_closed_form(self):
        with pytest.raises(MalformedInputError):
            example3_solution(Fraction(1, 5), Fraction(7, 10), Fraction(4, 5))

    @pytest.mark.parametrize("nodes", [(0.5, 0.3, 0.8), (0.0, 0.5, 0.8), (0.2, 0.6, 1.0)])
    def test_bad_nodes(self, nodes):
        with pytest.raises(MalformedInputError):
            example1(*nodes)

    def test_unknown_form(self):
        with pytest.raises(MalformedInputError):
            example3(form="dy")

    def test_reference_value_relations(self):
        assert ReferenceValue("q", 1.0, 1.0 + 1e-10, 1e-9).passed
        assert not ReferenceValue("q", 1.0, 1.1, 1e-9).passed
        assert ReferenceValue("q", 0.5, 0.1, 0.0, "le").passed
        assert ReferenceValue("q", 0.5, 0.1, 0.0, "le").to_dict()["status"] == "pass"


class TestReduce:

    def test_periodic(self):
        problem = reduce(periodic(math.pi / 2.0))
        assert problem.kernel.kind == KernelKind.PERIODIC
        assert problem.perturbation.is_zero()

    @pytest.mark.parametrize("form, kind", [("multipoint", FunctionalKind.POINTS),
                                            ("dx", FunctionalKind.STIELTJES_DX),
                                            ("dA", FunctionalKind.STIELTJES_DA)])
    def test_example3_forms_share_functionals(self, form, kind, random_polyline):
        problem = reduce(example3(form=form))
        reference = reduce(example3(form="multipoint")).perturbation
        assert problem.kernel.kind == KernelKind.DIRICHLET
        assert problem.perturbation.alpha.kind == kind
        for _ in range(20):
            x = random_polyline()
            assert problem.perturbation.alpha(x) == pytest.approx(reference.alpha(x), abs=1e-12)
            assert problem.perturbation.beta(x) == pytest.approx(reference.beta(x), abs=1e-12)

    def test_shape_function_override(self):
        spec = replace(example1(), v=BVFunction.from_polynomial((1.0, -1.0)), w=identity())
        assert reduce(spec).perturbation.G == pytest.approx(reduce(example1()).perturbation.G)

        broken = replace(example1(), v=BVFunction.constant(1.0))
        with pytest.raises(MalformedInputError) as excinfo:
            reduce(broken)
        assert excinfo.value.label == "(A9)"


class TestCheckTheorem:
    """Hypothesis values of the worked examples."""

    def test_example1_variation(self):
        check = check_theorem(example1(form="dA"))
        assert check.verdict == Verdict.PASS
        assert check.value == pytest.approx(0.8, abs=1e-15)
        assert check.details["exact"] == "4/5"

    def test_example1_variation_for_any_nodes(self, rng):
        for _ in range(100):
            check = check_theorem(example1(*_random_nodes(rng), form="dA"))
            assert check.details["exact"] == "4/5"

    def test_example1_multipoint(self):
        check = check_theorem(example1(form="multipoint"))
        assert check.passed
        assert check.value == pytest.approx(0.8, abs=1e-15)
        assert check.details["path"] == "(B6)"

    def test_example3_dx(self):
        check = check_theorem(example3(form="dx"))
        assert check.passed
        assert check.value == pytest.approx(0.8, abs=1e-12)
        assert check.details["gap"] == pytest.approx(0.8, abs=1e-12)

    def test_example3_reformulation_fails(self):
        check = check_theorem(example3(form="dA"))
        assert check.verdict == Verdict.FAIL
        assert check.value == 8.0
        assert check.labels == ("(B6)",)
        assert check.details["var_A"] == 4.0

    def test_example3_multipoint(self):
        check = check_theorem(example3(form="multipoint"))
        assert check.passed
        assert check.details["path"] == "(A7)-(A8)"

    def test_refinement_changes_nothing(self):
        spec = example1(form="dA")
        refined = replace(spec, A=spec.A.refine([0.1, 0.5, 0.9]), B=spec.B.refine([0.35]))
        assert check_theorem(refined).details["exact"] == check_theorem(spec).details["exact"]

    def test_dx_variant(self):
        check = check_theorem(example1_dx_variant())
        assert check.passed
        assert check.value == 0.0

    @pytest.mark.parametrize("spec", [periodic(math.pi / 2.0), periodic(math.pi, "positive_quadratic"),
                                      periodic(1.5 * math.pi, "positive_quadratic"), contraction_instance()])
    def test_periodic_passes(self, spec):
        check = check_theorem(spec, n=64)
        assert check.passed
        assert check.value > 0.0
        assert check.details["hypotheses_passed"]

    def test_periodic_small_radius(self):
        check = check_theorem(periodic(math.pi / 2.0, r=0.5), n=64)
        assert check.verdict == Verdict.FAIL
        assert check.labels == ("(B3)", "(B1)")

    def test_periodic_sign_changing_f(self):
        check = check_theorem(periodic(math.pi / 2.0, "linear"), n=64)
        assert check.labels == ("(A1)", "(B1)")

    def test_threshold(self):
        assert periodic_threshold(math.pi) == pytest.approx(2.0 / math.pi)


class TestVerifySolution:
    """Residuals of closed-form and computed solutions in differential form."""

    @pytest.mark.parametrize("form", ["multipoint", "dx", "dA"])
    def test_closed_form(self, form):
        spec = example3(form=form, lam=1.0)
        report = verify_solution(spec, spec.exact_grid(128))
        assert report.ode_residual <= 1e-10
        assert report.bc_max <= 1e-9
        assert set(report.bc_residuals) == {"x(0) - alpha[x]", "x(1) - beta[x]"}

    def test_wrong_candidate(self):
        spec = example3(form="multipoint", lam=1.0)
        report = verify_solution(spec, GridFunction.zeros(64))
        assert report.ode_residual == pytest.approx(2.0)
        assert not report.passed(1e-6, 1e-8)

    def test_solve_then_verify(self):
        spec = example3(form="dx")
        result = kras_solve(reduce(spec), tol=1e-10, n=256)
        report = verify_solution(spec, result.x)
        assert report.ode_residual <= 1e-8
        assert report.bc_max <= 1e-8

    def test_periodic_constant_solution(self):
        omega = math.pi / 2.0
        spec = periodic(omega)
        result = kras_solve(reduce(spec), tol=1e-10, n=64)
        np.testing.assert_allclose(result.x.values, omega ** -2, atol=1e-12)
        report = verify_solution(spec, result.x)
        assert report.ode_residual <= 1e-9
        assert report.bc_max <= 1e-12

    @pytest.mark.parametrize("spec", [example1(f="zero"), example1_dx_variant()])
    def test_zero_forcing_gives_zero(self, spec):
        result = kras_solve(reduce(spec), n=64)
        assert result.converged
        assert result.x.sup_norm() == 0.0

    def test_coarse_grid(self):
        with pytest.raises(MalformedInputError):
            verify_solution(example3(), GridFunction.zeros(4))


class TestValidation:

    def test_resonant_frequency(self):
        with pytest.raises(MalformedInputError):
            periodic(2.0 * math.pi)

    def test_boundary_node(self):
        alpha = Functional.points([(1, 1.0)])
        with pytest.raises(MalformedInputError):
            BVPSpec("edge", BVPKind.MULTIPOINT, catalog_entry("one"), alpha=alpha, beta=alpha)

    def test_missing_integrator(self):
        with pytest.raises(MalformedInputError):
            BVPSpec("no-B", BVPKind.NONLOCAL_DA, catalog_entry("one"), A=BVFunction.constant())

    @pytest.mark.parametrize("field, value", [("lam", math.inf), ("r", 0.0), ("kind", "bogus")])
    def test_bad_fields(self, field, value):
        with pytest.raises(MalformedInputError):
            replace(periodic(math.pi / 2.0), **{field: value})
