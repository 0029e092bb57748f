"""Tests for the one-loop Mellin kernel and its pole structure."""

import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from scipy.special import gamma as gamma_function

sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from wz_borel.errors import OrderError, PoleProximityError
from wz_borel.mellin import (
    h_approx,
    h_eval_complex,
    h_subtracted,
    h_subtracted_eval_complex,
    h_taylor,
    ir_residue,
    mellin_rows,
    uv_residue,
)
from wz_borel.scalars import weight_w, zeta


def direct_kernel(x, y):
    return (
        gamma_function(1 - x - y)
        * gamma_function(1 + x)
        * gamma_function(1 + y)
        / (gamma_function(2 + x + y) * gamma_function(1 - x) * gamma_function(1 - y))
    )


@pytest.mark.unit
class TestTaylorData:
    """Exact Taylor coefficients of H."""

    def test_low_order_coefficients(self):
        h = h_taylor(3)
        assert h[0, 0] == 1
        assert h[1, 0] == -1
        assert h[1, 1] == 2
        assert h[2, 1] == -3 + 2 * zeta(3)

    def test_kernel_is_symmetric(self):
        assert h_taylor(6).is_symmetric()

    def test_weight_bounded_by_total_degree(self):
        h = h_taylor(7)
        for m, n, coeff in h.items():
            assert weight_w(coeff) <= m + n

    def test_taylor_data_matches_gamma_functions(self):
        """The truncated series approximates H near the origin."""
        h = h_taylor(12)
        x, y = 0.05, -0.03
        assert h.evaluate(x, y).real == pytest.approx(direct_kernel(x, y), rel=1e-12)

    def test_negative_order_is_rejected(self):
        with pytest.raises(OrderError):
            h_taylor(-1)


@pytest.mark.unit
class TestApproximateKernel:
    """The kernel built from the first IR and UV poles."""

    def test_agrees_with_exact_kernel_through_degree_two(self):
        exact = h_taylor(2)
        approx = h_approx(2)
        for m, n, coeff in exact.items():
            assert approx[m, n] == coeff

    def test_is_rational_and_symmetric(self):
        h = h_approx(6)
        assert h.is_symmetric()
        assert all(isinstance(c, Fraction) for _, _, c in h.items())


@pytest.mark.unit
class TestResidues:
    """IR and UV pole data."""

    def test_first_ir_residue(self):
        part = ir_residue(1, 3)
        assert part.residue.coeffs == (1, -1, 0, 0)
        assert part.variable == "y"

    def test_second_ir_residue(self):
        assert ir_residue(2, 3).residue.coeffs == (0, -1, Fraction(3, 2), Fraction(-1, 2))

    def test_ir_residue_matches_numeric_limit(self):
        """(x + l) H(x, y) tends to P_l(y) as x -> -l."""
        y = 0.2
        for l in (1, 2, 3):
            poly = ir_residue(l, 2 * l).residue
            eps = 1e-7
            numeric = eps * direct_kernel(-l + eps, y)
            assert numeric == pytest.approx(poly.evaluate(y).real, rel=1e-5)

    def test_first_uv_residue(self):
        """Q_1(X) = X / 2."""
        part = uv_residue(1)
        assert part.residue[0] == 0
        assert part.residue[1] == Fraction(1, 2)

    def test_uv_residue_matches_numeric_limit(self):
        """(k - x - y) H(x, y) tends to Q_k(x y) on the line x + y = k."""
        for k in (1, 2):
            poly = uv_residue(k).residue
            x = 0.3
            eps = 1e-7
            y = k - x - eps
            numeric = eps * direct_kernel(x, y)
            assert numeric == pytest.approx(poly.evaluate(x * (k - x)).real, rel=1e-5)

    def test_index_must_be_positive(self):
        with pytest.raises(OrderError):
            ir_residue(0, 3)
        with pytest.raises(OrderError):
            uv_residue(0)


@pytest.mark.unit
class TestSubtraction:
    """Kernel with IR pole pairs removed."""

    def test_zero_depth_is_the_kernel(self):
        assert h_subtracted(0, 4) == h_taylor(4)

    def test_first_subtraction_changes_constant(self):
        """Removing 1/(1+x) + 1/(1+y) takes 2 off h_00."""
        assert h_subtracted(1, 3)[0, 0] == h_taylor(3)[0, 0] - 2

    def test_subtracted_value_is_finite_at_removed_pole(self):
        value = h_subtracted_eval_complex(1, -1.0, 0.2)
        assert np.isfinite(value)


@pytest.mark.unit
class TestComplexEvaluation:
    """log-Gamma evaluation off the real axis."""

    def test_matches_direct_evaluation(self):
        z1, z2 = 0.3 + 0.2j, -0.4 + 0.1j
        expected = complex(direct_kernel(z1, z2))
        assert h_eval_complex(z1, z2) == pytest.approx(expected, rel=1e-12)

    def test_refuses_points_near_ir_pole(self):
        with pytest.raises(PoleProximityError) as info:
            h_eval_complex(-1.0 + 1e-5, 0.2)
        assert info.value.pole == "x=-1"

    def test_refuses_points_near_uv_line(self):
        with pytest.raises(PoleProximityError):
            h_eval_complex(0.4, 0.6 + 1e-6)

    def test_rows_walk_total_degree(self):
        rows = mellin_rows(h_taylor(1))
        assert [(m, n) for m, n, _ in rows] == [(0, 0), (1, 0), (0, 1)]
