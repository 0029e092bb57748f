"""Tests for the Volterra system factory and concrete systems."""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from kernels import VolterraSystem, create_system, get_available_systems
from kernels.truncated_sd import TRUNCATION_NOTE


@pytest.mark.unit
class TestFactory:
    """System lookup by name."""

    def test_available_systems(self):
        assert get_available_systems() == ["truncated", "cosine"]

    @pytest.mark.parametrize("name", ["truncated", "cosine"])
    def test_create_known_systems(self, name):
        system = create_system(name)
        assert isinstance(system, VolterraSystem)
        assert system.name == name

    def test_unknown_system(self):
        with pytest.raises(ValueError, match="Unknown system type"):
            create_system("quadratic")


@pytest.mark.unit
class TestTruncatedSystem:
    """(gamma_hat, g) with the quadratic term dropped."""

    def test_shape_and_initial_values(self):
        system = create_system("truncated")
        assert system.component_names == ("gamma_hat", "g")
        assert system.dimension == 2
        assert system.integral_count == 2
        np.testing.assert_array_equal(system.initial_values(), [1.0, -1.0])

    def test_closure_at_origin(self):
        """With no accumulated integrals g(0) = -gamma_hat(0)."""
        system = create_system("truncated")
        u = system.closure(0j, np.zeros(2, dtype=np.complex128), system.initial_values())
        np.testing.assert_array_equal(u, [1.0, -1.0])

    def test_taylor_values(self):
        system = create_system("truncated")
        xi = np.array([0.0, 0.01, 0.02], dtype=np.complex128)
        values = system.taylor_values(xi, 10)
        assert values.shape == (3, 2)
        np.testing.assert_allclose(values[0], [1.0, -1.0])
        # gamma_hat = 1 - 2 xi + 6 xi^2 + ...
        assert values[1, 0].real == pytest.approx(1 - 0.02 + 0.0006, rel=1e-4)

    def test_singular_point(self):
        assert list(create_system("truncated").singular_points()) == [complex(-1 / 3)]

    def test_metadata_records_truncation(self):
        metadata = create_system("truncated").metadata()
        assert metadata == {"system": "truncated", "truncation": TRUNCATION_NOTE}

    def test_no_closed_form(self):
        assert create_system("truncated").exact(np.zeros(2)) is None


@pytest.mark.unit
class TestCosineSystem:
    """y = 1 - int (xi - eta) y."""

    def test_exact_and_taylor_agree(self):
        system = create_system("cosine")
        xi = np.array([0.1, 0.2 + 0.1j])
        np.testing.assert_allclose(system.taylor_values(xi, 20), system.exact(xi), rtol=1e-14)

    def test_pair_terms_shape(self):
        system = create_system("cosine")
        left = np.ones((4, 1), dtype=np.complex128)
        right = np.full((4, 1), 2.0, dtype=np.complex128)
        xi = np.arange(4, dtype=np.complex128)
        terms = system.pair_terms(left, right, xi, xi)
        assert terms.shape == (1, 4)
        np.testing.assert_array_equal(terms[0], 2 * xi)
