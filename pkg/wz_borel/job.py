import argparse
import os
from dataclasses import dataclass, fields
from typing import Any, Callable, Dict, List, Optional, Tuple

from .errors import ConfigError
from .models import MODELS, OUTPUT_FORMATS, RunConfig
from .runtime import resolve_output_dir, resolve_workers


@dataclass
class PreparedRun:
    config: RunConfig
    config_file: Optional[str]
    warnings: List[str]


def parse_window(text: str) -> Tuple[int, int]:
    try:
        low, high = (int(part) for part in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"Window must look like 'a,b', got {text!r}") from exc
    if low < 1 or high <= low:
        raise ConfigError(f"Window needs 1 <= a < b, got {text!r}")
    return low, high


def parse_complex(text: str) -> complex:
    try:
        real, imag = (float(part) for part in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"Point must look like 'RE,IM', got {text!r}") from exc
    return complex(real, imag)


_CONVERTERS: Dict[str, Callable[[str], Any]] = {
    "order": int,
    "model": str,
    "output_format": str,
    "output_dir": str,
    "asymptotic_model": str,
    "asymptotic_order": int,
    "window": parse_window,
    "ray_endpoint": parse_complex,
    "ray_steps": int,
    "ray_delta": float,
    "taylor_boot": int,
    "seed": int,
    "workers": int,
}


def load_config_file(path: str) -> Dict[str, Any]:
    """Read ``key = value`` lines; ``#`` starts a comment."""
    if not os.path.exists(path):
        raise ConfigError(f"Config file not found: {path}")
    values: Dict[str, Any] = {}
    with open(path, "r", encoding="utf-8") as fp:
        for lineno, raw in enumerate(fp, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in _CONVERTERS:
                raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
            try:
                values[key] = _CONVERTERS[key](value)
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return values


def _check_output_dir(path: str) -> None:
    candidate = os.path.abspath(path)
    while not os.path.exists(candidate):
        parent = os.path.dirname(candidate)
        if parent == candidate:
            break
        candidate = parent
    if not os.access(candidate, os.W_OK):
        raise ConfigError(f"Output directory is not writable: {path}")


def validate_config(config: RunConfig) -> None:
    if config.order < 1:
        raise ConfigError(f"order must be >= 1, got {config.order}")
    if config.asymptotic_order < 1:
        raise ConfigError(f"asymptotic_order must be >= 1, got {config.asymptotic_order}")
    for name in ("model", "asymptotic_model"):
        if getattr(config, name) not in MODELS:
            raise ConfigError(f"{name} must be one of {', '.join(MODELS)}, got {getattr(config, name)!r}")
    if config.output_format not in OUTPUT_FORMATS:
        raise ConfigError(
            f"output_format must be one of {', '.join(OUTPUT_FORMATS)}, got {config.output_format!r}"
        )
    if config.taylor_boot < 0:
        raise ConfigError(f"taylor_boot must be >= 0, got {config.taylor_boot}")
    _check_output_dir(config.output_dir)


@dataclass
class RunPreparationDeps:
    load_config_file: Callable[[str], Dict[str, Any]] = load_config_file
    resolve_output_dir: Callable[[Optional[str]], str] = resolve_output_dir
    resolve_workers: Callable[[Optional[int]], Tuple[int, List[str]]] = resolve_workers
    validate_config: Callable[[RunConfig], None] = validate_config


DEFAULT_PREPARATION_DEPS = RunPreparationDeps()


def prepare_run(
    args: argparse.Namespace,
    deps: Optional[RunPreparationDeps] = None,
) -> PreparedRun:
    """Resolve defaults < config file < command-line flags into a RunConfig."""
    deps = deps or DEFAULT_PREPARATION_DEPS
    config_file = getattr(args, "config", None)
    values: Dict[str, Any] = deps.load_config_file(config_file) if config_file else {}
    for item in fields(RunConfig):
        override = getattr(args, item.name, None)
        if override is not None:
            values[item.name] = override

    workers, warnings = deps.resolve_workers(values.pop("workers", None))
    values["output_dir"] = deps.resolve_output_dir(values.get("output_dir"))
    config = RunConfig(**values, workers=workers)
    deps.validate_config(config)
    return PreparedRun(config=config, config_file=config_file, warnings=warnings)
