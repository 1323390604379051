"""
Tests for Riemann-Stieltjes integration and boundary functionals.
"""

from fractions import Fraction

import numpy as np
import pytest

from src.functions.bvfun import BVFunction, bv_norm, identity, polyline, sup_norm, variation
from src.functions.stieltjes import (
    Functional,
    FunctionalKind,
    difference,
    dyadic_sum,
    functional_norm_witness,
    rs_dA,
    rs_dx,
    rs_sum,
    witness_family,
)
from src.utils.errors import MalformedInputError


class TestIntegrals:
    """Both orientations of the Stieltjes integral."""

    def test_atoms(self):
        A = BVFunction.indicator(0.25, 3.0) + BVFunction.indicator(0.75, -1.0)
        x = BVFunction.from_polynomial((0.0, 0.0, 1.0))
        assert rs_dA(x, A) == pytest.approx(3.0 * 0.0625 - 0.5625, abs=1e-15)

    def test_continuous_integrator(self):
        # integral of t d(t^2) = 2/3
        assert rs_dA(identity(), BVFunction.from_polynomial((0.0, 0.0, 1.0))) == pytest.approx(2.0 / 3.0, abs=1e-14)

    def test_integration_by_parts(self, random_bv, random_polyline):
        for _ in range(100):
            A = random_bv()
            x = random_polyline()
            boundary = A(1.0) * x(1.0) - A(0.0) * x(0.0)
            assert rs_dA(x, A) + rs_dx(A, x) == pytest.approx(boundary, abs=1e-10)

    def test_linear_in_integrand(self, random_bv, random_polyline, rng):
        for _ in range(100):
            A, x, y = random_bv(), random_polyline(), random_polyline()
            a, b = rng.uniform(-2.0, 2.0, size=2)
            combined = rs_dA(float(a) * x + float(b) * y, A)
            assert combined == pytest.approx(a * rs_dA(x, A) + b * rs_dA(y, A), abs=1e-10)

    def test_bounded_by_sup_times_variation(self, random_bv, random_polyline):
        for _ in range(100):
            A, x = random_bv(), random_polyline()
            assert abs(rs_dA(x, A)) <= sup_norm(x) * float(variation(A)) * (1.0 + 1e-12) + 1e-12

    def test_discontinuous_integrand(self):
        with pytest.raises(MalformedInputError):
            rs_dA(BVFunction.indicator(0.5), identity())

    def test_smooth_dyadic_convergence(self):
        A = BVFunction.from_polynomial((0.0, 0.0, 1.0))
        errors = [abs(dyadic_sum(A, identity(), depth) - 1.0 / 3.0) for depth in (4, 6, 8, 10)]
        assert errors[-1] < 1e-6
        assert all(later < earlier for earlier, later in zip(errors, errors[1:]))

    @pytest.mark.parametrize("depth", [6, 8, 10])
    def test_dyadic_sum_with_jump(self, depth):
        A = BVFunction.indicator(0.3)
        assert abs(dyadic_sum(A, identity(), depth) - 0.7) <= 2.0 ** -depth + 1e-12

    def test_rs_sum_validation(self):
        A = BVFunction.constant()
        with pytest.raises(MalformedInputError):
            rs_sum(A, identity(), [0.0, 0.5, 1.0], [0.6, 0.7])
        with pytest.raises(MalformedInputError):
            rs_sum(A, identity(), [0.1, 0.5, 1.0], [0.2, 0.7])
        with pytest.raises(MalformedInputError):
            rs_sum(A, identity(), [0.0, 1.0], [0.2, 0.7])


class TestFunctionals:
    """Point and Stieltjes functionals of the worked examples."""

    def test_points_match_stieltjes_form(self, random_polyline, example_nodes):
        a, b, c = example_nodes
        fifth = Fraction(1, 5)
        points = Functional.points([(fifth, a), (fifth, c)])
        stieltjes = Functional.stieltjes_dA(BVFunction.indicator(a, fifth) + BVFunction.indicator(c, fifth))
        for _ in range(100):
            x = random_polyline()
            assert points(x) == pytest.approx(stieltjes(x), abs=1e-12)

    def test_value_on_e(self, example_nodes):
        a, b, c = example_nodes
        fifth = Fraction(1, 5)
        assert Functional.points([(fifth, a), (fifth, c)]).value_on_e() == pytest.approx(0.4)
        assert Functional.stieltjes_dA(BVFunction.indicator(b, 2)).value_on_e() == pytest.approx(2.0)
        assert Functional.stieltjes_dx(BVFunction.indicator(b, 2)).value_on_e() == 0.0
        assert Functional.zero().is_zero()

    def test_difference_cancels_shared_node(self, example_nodes):
        a, b, c = example_nodes
        fifth = Fraction(1, 5)
        alpha = Functional.points([(fifth, a), (fifth, c)])
        beta = Functional.points([(fifth, b), (fifth, c)])
        gap = difference(alpha, beta)
        assert gap.kind == FunctionalKind.POINTS
        assert len(gap.nodes) == 2
        assert gap.norm_upper == Fraction(2, 5)

    def test_difference_of_mixed_kinds(self, random_polyline):
        alpha = Functional.points([(1, 0.5)])
        beta = Functional.stieltjes_dA(BVFunction.indicator(0.25))
        gap = difference(alpha, beta)
        assert gap.kind == FunctionalKind.COMPOSITE
        x = random_polyline()
        assert gap(x) == pytest.approx(x(0.5) - x(0.25), abs=1e-14)
        assert gap.norm_upper == 2

    def test_node_outside_interval(self):
        with pytest.raises(MalformedInputError):
            Functional.points([(1, 1.5)])

    def test_stieltjes_needs_integrator(self):
        with pytest.raises(MalformedInputError):
            Functional(FunctionalKind.STIELTJES_DA)


class TestNormBounds:
    """Certified upper bounds against witness lower bounds."""

    def test_upper_bounds(self):
        A = BVFunction.indicator(0.2, 2) + BVFunction.indicator(0.8, -2)
        assert Functional.stieltjes_dA(A).norm_upper == variation(A) == 4
        assert Functional.stieltjes_dx(A).norm_upper == pytest.approx(2.0)
        assert Functional.points([(2, 0.2), (-2, 0.8)]).norm_upper == 4

    @pytest.mark.parametrize("A", [
        BVFunction.indicator(0.2, 2) + BVFunction.indicator(0.8, -2),
        BVFunction.from_polynomial((0.5, -3.0, 2.0, 1.0)),
        BVFunction((0.0, 0.4, 1.0), ((1.0, 2.0), (0.0, 0.0, -1.0)), ((0.7, 0.5),)),
        polyline([(0.0, 1.0), (0.3, -1.0), (0.6, 0.5), (1.0, 0.0)]),
    ])
    def test_witness_never_exceeds_upper(self, A):
        for F in (Functional.stieltjes_dA(A), Functional.stieltjes_dx(A)):
            witness = functional_norm_witness(F, witness_family(F, samples=16))
            assert 0.0 < witness <= float(F.norm_upper) + 1e-10

    def test_example3_witness(self, example_nodes):
        a, _, c = example_nodes
        alpha = Functional.points([(2, a), (-2, c)])
        ramp = polyline([(0.0, 0.0), (float(a), 0.0), (float(c), -1.0), (1.0, -1.0)])
        assert float(bv_norm(ramp)) == pytest.approx(1.0, abs=1e-15)
        assert functional_norm_witness(alpha, [ramp]) == pytest.approx(2.0, abs=1e-12)
        assert alpha.norm_upper == 4

    def test_point_functional_attains_its_bound(self):
        # the ramp between the nodes attains the true norm 1, half of sum |c_i|
        F = Functional.points([(1, 0.2), (-1, 0.8)])
        assert functional_norm_witness(F, witness_family(F)) == pytest.approx(1.0, abs=1e-12)

    def test_empty_or_zero_family(self):
        F = Functional.points([(1, 0.5)])
        with pytest.raises(MalformedInputError):
            functional_norm_witness(F, [])
        with pytest.raises(MalformedInputError):
            functional_norm_witness(F, [BVFunction.zero()])
