import os
from typing import List, Optional, Tuple

DEFAULT_MAX_ZETA_INDEX = 31
DEFAULT_OUTPUT_DIR = "."
DEFAULT_WORKERS = 1

MAX_ZETA_INDEX_ENV = "WZ_BOREL_MAX_ZETA_INDEX"
OUTPUT_DIR_ENV = "WZ_BOREL_OUTPUT_DIR"
NO_RICH_ENV = "WZ_BOREL_NO_RICH"


def _parse_env_bool(value: Optional[str]) -> Optional[bool]:
    if value is None:
        return None
    normalized = value.strip().lower()
    if normalized in {"1", "true", "yes", "on"}:
        return True
    if normalized in {"0", "false", "no", "off"}:
        return False
    return None


def _parse_env_int(value: Optional[str]) -> Optional[int]:
    if value is None:
        return None
    try:
        return int(value.strip())
    except ValueError:
        return None


def resolve_max_zeta_index(requested: Optional[int] = None) -> int:
    """Largest odd zeta index allowed as a generator."""
    if requested is not None:
        return requested
    from_env = _parse_env_int(os.getenv(MAX_ZETA_INDEX_ENV))
    if from_env is not None and from_env >= 3:
        return from_env
    return DEFAULT_MAX_ZETA_INDEX


def resolve_output_dir(requested: Optional[str] = None) -> str:
    if requested:
        return requested
    return os.getenv(OUTPUT_DIR_ENV) or DEFAULT_OUTPUT_DIR


def resolve_no_rich(requested: Optional[bool] = None) -> bool:
    if requested:
        return True
    forced = _parse_env_bool(os.getenv(NO_RICH_ENV))
    return bool(forced)


def resolve_workers(requested: Optional[int]) -> Tuple[int, List[str]]:
    warnings: List[str] = []
    if requested is None:
        return DEFAULT_WORKERS, warnings
    if requested < 1:
        warnings.append(f"--workers={requested} is invalid; falling back to 1.")
        return 1, warnings
    cpu_count = os.cpu_count() or 1
    if requested > cpu_count:
        warnings.append(
            f"--workers={requested} exceeds the {cpu_count} available CPUs; capping."
        )
        return cpu_count, warnings
    return requested, warnings


def required_zeta_index(order: int) -> int:
    """Largest zeta index that can appear in gamma truncated at ``order``."""
    index = 2 * order - 3
    if index % 2 == 0:
        index -= 1
    return max(index, 3)
