"""Volterra convolution systems marched by the ray solver.

This package provides a unified interface for the systems ``rayquad`` integrates:
- Truncated: the specialized renormalization group system for (gamma_hat, g)
- Cosine: a linear test kernel with the closed-form solution cos(xi)
"""

from .base import VolterraSystem
from .factory import create_system, get_available_systems

__all__ = ["VolterraSystem", "create_system", "get_available_systems"]
