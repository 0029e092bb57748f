"""Tests for the Borel dictionary and singular-form calculus."""

import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from wz_borel.borel import (
    EXTRACTION_VIEW,
    LATERAL_VIEW,
    SingularForm,
    alien_delta1,
    borel_convolve,
    borel_map,
    borel_primitive,
    convolve_numeric,
    laplace_formal,
    singular_convolve,
    symbol_singular_form,
    xi_euler,
)
from wz_borel.errors import ConstantTermError, PlaneMismatchError, UnsupportedSingularityError
from wz_borel.series import BOREL, PHYSICAL, FormalSeries


def physical(*coeffs, order=None):
    return FormalSeries([Fraction(c) for c in coeffs], order=order, plane=PHYSICAL)


@pytest.mark.unit
class TestBorelDictionary:
    """Transform, inverse and the images of products and derivations."""

    def test_transform_divides_by_factorial(self):
        image = borel_map(physical(0, 1, -2, 12, -124))
        assert image.plane == BOREL
        assert image.coeffs == (1, -2, 6, Fraction(-124, 6))

    def test_constant_term_is_refused(self):
        with pytest.raises(ConstantTermError):
            borel_map(physical(1, 1))

    def test_plane_is_checked(self):
        with pytest.raises(PlaneMismatchError):
            borel_map(borel_map(physical(0, 1, 1)))

    def test_laplace_inverts_transform(self, rational_series_factory):
        f = rational_series_factory(8, plane=PHYSICAL, valuation=1)
        assert laplace_formal(borel_map(f)) == f

    def test_product_maps_to_convolution(self, rational_series_factory):
        for _ in range(100):
            f = rational_series_factory(15, plane=PHYSICAL, valuation=1)
            g = rational_series_factory(15, plane=PHYSICAL, valuation=1)
            assert borel_map(f * g) == borel_convolve(borel_map(f), borel_map(g))

    def test_multiplication_by_a_maps_to_primitive(self, rational_series_factory):
        for _ in range(100):
            f = rational_series_factory(15, plane=PHYSICAL, valuation=1)
            assert borel_map(f.shift(1)) == borel_primitive(borel_map(f))

    def test_euler_operator_maps_to_xi_euler(self, rational_series_factory):
        for _ in range(100):
            f = rational_series_factory(15, plane=PHYSICAL, valuation=1)
            assert borel_map(f.euler()) == xi_euler(borel_map(f))

    def test_convolution_of_units(self):
        """1 * 1 = xi and xi * 1 = xi^2 / 2."""
        one = FormalSeries([1], order=3, plane=BOREL)
        assert borel_convolve(one, one).coeffs[:2] == (0, 1)
        xi = FormalSeries([0, 1], order=3, plane=BOREL)
        assert borel_convolve(xi, one)[2] == Fraction(1, 2)


@pytest.mark.unit
class TestSingularForms:
    """Leading singular parts and their primitives."""

    def test_primitive_chain_for_fractional_beta(self):
        beta = Fraction(-5, 3)
        location = Fraction(-1, 3)
        for n in range(6):
            step = symbol_singular_form(n, beta, location).primitive()
            assert step == symbol_singular_form(n + 1, beta, location)

    def test_primitive_chain_from_simple_pole(self):
        """beta = 0 starts at a simple pole and turns logarithmic."""
        location = Fraction(1, 3)
        start = symbol_singular_form(0, Fraction(0), location)
        assert start.is_pole
        for n in range(5):
            step = symbol_singular_form(n, Fraction(0), location).primitive()
            assert step == symbol_singular_form(n + 1, Fraction(0), location)
        assert symbol_singular_form(1, Fraction(0), location).log

    def test_negative_integer_beta_is_unsupported(self):
        with pytest.raises(UnsupportedSingularityError):
            symbol_singular_form(1, Fraction(-2))

    def test_primitive_of_log_pole_is_unsupported(self):
        form = SingularForm(Fraction(1), Fraction(-1), True, Fraction(1))
        with pytest.raises(UnsupportedSingularityError):
            form.primitive()

    def test_convolution_with_constant_is_one_primitive(self):
        form = symbol_singular_form(0, Fraction(-5, 3), Fraction(-1, 3))
        g = FormalSeries([Fraction(2)], order=4, plane=BOREL)
        assert singular_convolve(form, g) == form.primitive().scale(2)

    def test_convolution_skips_leading_zeros(self):
        """g ~ 3 xi^2 gives 3 * 2! times the third primitive."""
        form = symbol_singular_form(0, Fraction(-5, 3), Fraction(-1, 3))
        g = FormalSeries([0, 0, Fraction(3)], order=4, plane=BOREL)
        expected = form.primitive().primitive().primitive().scale(6)
        assert singular_convolve(form, g) == expected

    def test_numeric_convolution(self):
        """int_0^xi (1 - eta) d eta = xi - xi^2 / 2."""
        form = SingularForm(Fraction(1), Fraction(1), False, Fraction(1))
        one = FormalSeries([1], order=0, plane=BOREL)
        assert convolve_numeric(form, one, 0.5) == pytest.approx(0.375, rel=1e-10)


@pytest.mark.unit
class TestAlienDerivative:
    """Leading alien derivatives in both pole views."""

    def test_missing_form_gives_zero_germ(self):
        assert alien_delta1(None).is_zero

    def test_holomorphic_form_gives_zero_germ(self):
        form = SingularForm(Fraction(1), Fraction(2), False, Fraction(1))
        assert alien_delta1(form).is_zero

    def test_simple_pole_views(self):
        pole = SingularForm(Fraction(1, 3), Fraction(-1), False, Fraction(1))
        extracted = alien_delta1(pole, view=EXTRACTION_VIEW)
        assert extracted.dirac
        assert extracted.coefficient == Fraction(-1, 3)
        assert alien_delta1(pole, view=LATERAL_VIEW).is_zero

    def test_fractional_exponent_carries_sine_factor(self):
        form = SingularForm(Fraction(-1, 3), Fraction(-5, 3), False, Fraction(1))
        germ = alien_delta1(form)
        assert germ.exponent == Fraction(-5, 3)
        assert germ.sine_arg == Fraction(1, 3)
        assert germ.sine_scale() == pytest.approx(0.2756644477108961)

    def test_log_form(self):
        form = SingularForm(Fraction(1, 3), Fraction(1), True, Fraction(2))
        germ = alien_delta1(form)
        assert germ.coefficient == -2
        assert not germ.dirac

    def test_dirac_primitive_is_a_step(self):
        pole = SingularForm(Fraction(1, 3), Fraction(-1), False, Fraction(1))
        step = alien_delta1(pole).primitive()
        assert not step.dirac
        assert step.exponent == 0

    def test_unknown_view(self):
        with pytest.raises(ValueError):
            alien_delta1(None, view="sideways")
