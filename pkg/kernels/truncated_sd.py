"""Truncated Borel-plane system for (gamma_hat, g).

g(xi) is the specialization f(xi, -1/3) of the renormalization group
equation. With gamma_hat' = 2 g the system reads

    gamma_hat(xi) = 1 + 2 int_0^xi g
    -(1 + 3 xi) g(xi) = gamma_hat(xi) + int_0^xi gamma_hat(xi - eta) g(eta) d eta
                        + 3 int_0^xi gamma_hat'(xi - eta) eta g(eta) d eta

The quadratic G * G term of the full two-variable equation is dropped.
"""

from functools import lru_cache
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as P

from wz_borel.borel import borel_map
from wz_borel.physical import ode_reference

from .base import VolterraSystem

TRUNCATION_NOTE = "quadratic G*G term dropped; gamma_hat' supplied as 2g"


@lru_cache(maxsize=4)
def borel_coefficients(terms: int) -> np.ndarray:
    """First ``terms`` Taylor coefficients of gamma_hat, from the exact physical series."""
    series = borel_map(ode_reference(terms))
    return np.array([float(series[n]) for n in range(series.order + 1)], dtype=np.complex128)


class TruncatedBorelSystem(VolterraSystem):
    """Unknowns [gamma_hat, g]; integrals [int g, int (gamma_hat g + 6 g eta g)]."""

    @property
    def name(self) -> str:
        return "truncated"

    @property
    def component_names(self) -> Tuple[str, ...]:
        return ("gamma_hat", "g")

    @property
    def integral_count(self) -> int:
        return 2

    def initial_values(self) -> np.ndarray:
        return np.array([1.0, -1.0], dtype=np.complex128)

    def pair_terms(
        self,
        left: np.ndarray,
        right: np.ndarray,
        xi_left: np.ndarray,
        xi_right: np.ndarray,
    ) -> np.ndarray:
        g_eta = right[:, 1]
        # gamma_hat'(xi - eta) = 2 g(xi - eta)
        coupled = left[:, 0] * g_eta + 6.0 * left[:, 1] * xi_right * g_eta
        return np.vstack([g_eta, coupled])

    def closure(self, xi: complex, integrals: np.ndarray, current: np.ndarray) -> np.ndarray:
        gamma_hat = 1.0 + 2.0 * integrals[0]
        g = -(gamma_hat + integrals[1]) / (1.0 + 3.0 * xi)
        return np.array([gamma_hat, g], dtype=np.complex128)

    def singular_points(self) -> Sequence[complex]:
        return (complex(-1.0 / 3.0),)

    def taylor_values(self, xi: np.ndarray, terms: int) -> Optional[np.ndarray]:
        coeffs = borel_coefficients(terms)
        gamma_hat = P.polyval(xi, coeffs)
        g = 0.5 * P.polyval(xi, P.polyder(coeffs))
        return np.column_stack([gamma_hat, g])

    def metadata(self) -> Dict[str, Any]:
        return {"system": self.name, "truncation": TRUNCATION_NOTE}
