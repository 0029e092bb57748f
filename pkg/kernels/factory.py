"""Factory function for creating Volterra systems."""

from typing import List

from .base import VolterraSystem


def create_system(system_type: str) -> VolterraSystem:
    """Create a Volterra system instance.

    Args:
        system_type: The type of system to create ('truncated' or 'cosine')

    Returns:
        An instance of VolterraSystem

    Raises:
        ValueError: If the system type is unknown
    """
    if system_type == "truncated":
        from .truncated_sd import TruncatedBorelSystem

        return TruncatedBorelSystem()
    elif system_type == "cosine":
        from .linear_test import CosineTestSystem

        return CosineTestSystem()
    else:
        raise ValueError(
            f"Unknown system type: {system_type}. "
            f"Available systems: {get_available_systems()}"
        )


def get_available_systems() -> List[str]:
    """Get a list of available system types.

    Returns:
        List of system type strings that can be used with create_system()
    """
    return ["truncated", "cosine"]
