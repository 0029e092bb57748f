"""Abstract base class for Volterra convolution systems."""

from abc import ABC, abstractmethod
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np


class VolterraSystem(ABC):
    """Abstract base class for systems u(xi) = closure(xi, int_0^xi K(u(xi - eta), u(eta))).

    All systems must implement this interface to be usable with the
    predictor-corrector march in ``wz_borel.rayquad``.
    """

    @property
    @abstractmethod
    def name(self) -> str:
        """Return the name of this system (e.g., 'truncated', 'cosine')."""
        pass

    @property
    @abstractmethod
    def component_names(self) -> Tuple[str, ...]:
        """Return the names of the unknowns, in storage order."""
        pass

    @property
    @abstractmethod
    def integral_count(self) -> int:
        """Return the number of convolution integrals the closure consumes."""
        pass

    @property
    def dimension(self) -> int:
        return len(self.component_names)

    @abstractmethod
    def initial_values(self) -> np.ndarray:
        """Return the unknowns at xi = 0 as a complex array of shape (dimension,)."""
        pass

    @abstractmethod
    def pair_terms(
        self,
        left: np.ndarray,
        right: np.ndarray,
        xi_left: np.ndarray,
        xi_right: np.ndarray,
    ) -> np.ndarray:
        """Evaluate the convolution integrands on a batch of node pairs.

        Args:
            left: Unknowns at xi - eta, shape (m, dimension)
            right: Unknowns at eta, shape (m, dimension)
            xi_left: The points xi - eta, shape (m,)
            xi_right: The points eta, shape (m,)

        Returns:
            Integrand values of shape (integral_count, m)
        """
        pass

    @abstractmethod
    def closure(self, xi: complex, integrals: np.ndarray, current: np.ndarray) -> np.ndarray:
        """Solve for the unknowns at xi given the convolution integrals there.

        Args:
            xi: The current node
            integrals: Values of the integrals at xi, shape (integral_count,)
            current: The current iterate of the unknowns at xi

        Returns:
            Updated unknowns, shape (dimension,)
        """
        pass

    def singular_points(self) -> Sequence[complex]:
        """Points where the closure breaks down; rays must keep away from them."""
        return ()

    def taylor_values(self, xi: np.ndarray, terms: int) -> Optional[np.ndarray]:
        """Exact-series values of the unknowns at ``xi``, or None if the system has none.

        Returns:
            Array of shape (len(xi), dimension)
        """
        return None

    def exact(self, xi: np.ndarray) -> Optional[np.ndarray]:
        """Closed-form solution at ``xi`` when one is known."""
        return None

    def metadata(self) -> Dict[str, Any]:
        return {"system": self.name}
