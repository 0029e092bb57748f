"""Shared pytest fixtures for all tests."""

import sys
import tempfile
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

# Add the project root to the path
sys.path.insert(0, str(Path(__file__).parent.parent))

from wz_borel.models import DEFAULT_SEED
from wz_borel.series import BOREL, FormalSeries


@pytest.fixture
def temp_dir():
    """Create a temporary directory for test files."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield tmpdir


@pytest.fixture
def rng():
    """Seeded generator for randomized property checks."""
    return np.random.default_rng(DEFAULT_SEED)


def random_rational_series(rng, order, plane=BOREL, valuation=0, spread=9):
    """Series with small random rational coefficients and the given valuation."""
    coeffs = [Fraction(0)] * valuation
    for _ in range(valuation, order + 1):
        numerator = int(rng.integers(-spread, spread + 1))
        denominator = int(rng.integers(1, spread + 1))
        coeffs.append(Fraction(numerator, denominator))
    return FormalSeries(coeffs, order=order, plane=plane)


@pytest.fixture
def rational_series_factory(rng):
    """Factory for seeded random rational series."""

    def make(order, plane=BOREL, valuation=0):
        return random_rational_series(rng, order, plane=plane, valuation=valuation)

    return make
