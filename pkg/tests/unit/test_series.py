"""Tests for truncated formal series and bivariate series."""

import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from wz_borel.errors import ConstantTermError, OrderError, PlaneMismatchError
from wz_borel.scalars import zeta
from wz_borel.series import (
    BOREL,
    BiSeries,
    FormalSeries,
    euler,
    fs_arith,
    fs_exp,
    format_coefficient,
    series_to_csv_rows,
    series_to_json,
)


def series(*coeffs, order=None, plane="physical"):
    return FormalSeries([Fraction(c) for c in coeffs], order=order, plane=plane)


@pytest.mark.unit
class TestFormalSeries:
    """Truncation bookkeeping and ring operations."""

    def test_short_coefficient_list_is_zero_padded(self):
        f = FormalSeries([1, 2], order=4)
        assert f.coeffs == (1, 2, 0, 0, 0)
        assert f.order == 4

    def test_reading_past_the_order_fails(self):
        with pytest.raises(OrderError):
            series(1, 2)[2]

    def test_valuation(self):
        assert series(0, 0, 3, 1).valuation() == 2
        assert FormalSeries.zero(3).valuation() == 4

    def test_sum_keeps_smaller_order(self):
        total = series(1, 1, 1, order=2) + series(1, 1, order=1)
        assert total.order == 1
        assert total.coeffs == (2, 2)

    def test_product_order_uses_valuations(self):
        """min(N_f + v_g, N_g + v_f) for a product of two O(t) series."""
        f = series(0, 1, 2, order=2)
        g = series(0, 1, 5, order=2)
        product = f * g
        assert product.order == 3
        assert product.coeffs == (0, 0, 1, 7)

    def test_geometric_inverse(self):
        """(1 - t) * (1 + t + t^2 + t^3) = 1 + O(t^4)."""
        product = series(1, -1, 0, 0).mul(series(1, 1, 1, 1), order=3)
        assert product.coeffs == (1, 0, 0, 0)

    def test_euler_operator(self):
        assert series(5, 1, 2, 3).euler().coeffs == (0, 1, 4, 9)

    def test_derivative_lowers_order(self):
        d = series(5, 1, 2, 3).derivative()
        assert d.order == 2
        assert d.coeffs == (1, 4, 9)

    def test_shift_and_substitution(self):
        f = series(1, 2, order=1)
        assert f.shift(2).coeffs == (0, 0, 1, 2)
        g = f.substitute_power(2)
        assert g.order == 3
        assert g.coeffs == (1, 0, 2, 0)

    def test_exp_of_t(self):
        """exp(t) has coefficients 1/n!."""
        e = series(0, 1, order=5).exp()
        assert e.coeffs == tuple(Fraction(1, f) for f in (1, 1, 2, 6, 24, 120))

    def test_exp_requires_zero_constant(self):
        with pytest.raises(ConstantTermError):
            series(1, 1).exp()

    def test_truncate_cannot_raise_order(self):
        with pytest.raises(OrderError):
            series(1, 2).truncate(3)

    def test_plane_mismatch_is_rejected(self):
        with pytest.raises(PlaneMismatchError):
            series(1, 2) + series(1, 2, plane=BOREL)

    def test_zeta_coefficients(self):
        f = FormalSeries([0, zeta(3)], order=1)
        square = f * f
        assert square.order == 2
        assert square[2] == zeta(3) * zeta(3)

    def test_fs_arith_dispatch(self):
        f = series(1, 2, 3)
        assert fs_arith("add", f, f) == f.scale(2)
        assert fs_arith("truncate", f, 1) == series(1, 2)
        assert fs_arith("compose-with-power", f, 2) == f.substitute_power(2)
        with pytest.raises(ValueError):
            fs_arith("divide", f, f)

    def test_random_products_are_associative(self, rational_series_factory):
        for _ in range(10):
            f = rational_series_factory(6, plane="physical")
            g = rational_series_factory(6, plane="physical")
            h = rational_series_factory(6, plane="physical")
            assert (f * g) * h == f * (g * h)

    def test_euler_is_a_derivation(self, rational_series_factory):
        """euler(f g) = euler(f) g + f euler(g) on the common order."""
        for _ in range(20):
            f = rational_series_factory(12, plane="physical")
            g = rational_series_factory(12, plane="physical")
            lhs = euler(f * g)
            rhs = euler(f) * g + f * euler(g)
            order = min(lhs.order, rhs.order)
            assert lhs.truncate(order) == rhs.truncate(order)

    def test_exp_turns_sums_into_products(self, rational_series_factory):
        """exp(f + g) = exp(f) exp(g) for zero constant terms."""
        for _ in range(10):
            f = rational_series_factory(10, plane="physical", valuation=1)
            g = rational_series_factory(10, plane="physical", valuation=1)
            assert fs_exp(f + g) == fs_exp(f) * fs_exp(g)

    def test_exp_of_zeta_cube(self):
        """exp(2 zeta(3) a^3) = 1 + 2 zeta(3) a^3 + 2 zeta(3)^2 a^6 at order 6."""
        f = FormalSeries([0, 0, 0, 2 * zeta(3)], order=6)
        e = fs_exp(f)
        assert e.order == 6
        assert e[0] == 1
        assert e[3] == 2 * zeta(3)
        assert e[6] == 2 * zeta(3) * zeta(3)
        assert all(e[n] == 0 for n in (1, 2, 4, 5))


@pytest.mark.unit
class TestBiSeries:
    """Triangular bivariate series."""

    def test_of_sum_expands_binomially(self):
        """(x + y)^2 from t^2."""
        h = BiSeries.of_sum(series(0, 0, 1))
        assert h.homogeneous_part(2) == [1, 2, 1]

    def test_product(self):
        x = BiSeries({(1, 0): 1}, 3)
        y = BiSeries({(0, 1): 1}, 3)
        assert (x * y)[1, 1] == 1
        assert (x * y).order == 3

    def test_exp_matches_product_of_exponentials(self):
        """exp(x + y) = exp(x) exp(y)."""
        order = 4
        x = BiSeries({(1, 0): 1}, order)
        y = BiSeries({(0, 1): 1}, order)
        assert (x + y).exp() == x.exp() * y.exp()

    def test_symmetry_detection(self):
        assert BiSeries({(1, 2): 3, (2, 1): 3}, 3).is_symmetric()
        assert not BiSeries({(1, 2): 3}, 3).is_symmetric()

    def test_eval_partial_includes_factorials(self):
        h = BiSeries({(2, 1): Fraction(5)}, 3)
        assert h.eval_partial(2, 1) == 10

    def test_out_of_range_bidegree(self):
        with pytest.raises(OrderError):
            BiSeries({}, 2)[2, 1]


@pytest.mark.unit
class TestSeriesOutput:
    """Locale-independent text and JSON forms."""

    def test_format_rationals_and_zetas(self):
        assert format_coefficient(Fraction(-3, 4)) == "-3/4"
        assert format_coefficient(2 * zeta(3) - 3) == "-3 + 2*zeta(3)"
        assert format_coefficient(complex(0.5, 0)) == "0.5"

    def test_csv_rows_start_with_header(self):
        rows = series_to_csv_rows(series(0, 1, -2))
        assert rows == [["n", "coefficient"], ["0", "0"], ["1", "1"], ["2", "-2"]]

    def test_json_carries_order_and_plane(self):
        data = series_to_json(series(0, 1, order=1))
        assert data["order"] == 1
        assert data["plane"] == "physical"
        assert data["coefficients"][1] == {"terms": [{"zetas": {}, "num": "1", "den": "1"}]}
