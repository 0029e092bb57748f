from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

MODELS = ("full", "approx", "ode")
OUTPUT_FORMATS = ("csv", "json")
SERIES_NAMES = ("gamma", "F", "L")

DEFAULT_ORDER = 10
DEFAULT_MODEL = "full"
DEFAULT_OUTPUT_FORMAT = "csv"
DEFAULT_ASYMPTOTIC_MODEL = "ode"
DEFAULT_ASYMPTOTIC_ORDER = 200
DEFAULT_RAY_ENDPOINT = complex(40, 35)
DEFAULT_RAY_STEPS = 2000
DEFAULT_RAY_DELTA = 1e-3
DEFAULT_SEED = 0

# Leading ratio laws c_{n+1}/c_n per (model, series).
DEFAULT_LAWS = {
    ("full", "gamma"): "-(3n+2)",
    ("ode", "gamma"): "-(3n+2)",
    ("approx", "gamma"): "-(3n+2)",
    ("approx", "F"): "-(3n+5)",
    ("approx", "L"): "3n",
}


@dataclass
class RunConfig:
    """Resolved settings of one run; every field has a documented default."""

    order: int = DEFAULT_ORDER
    model: str = DEFAULT_MODEL
    output_format: str = DEFAULT_OUTPUT_FORMAT
    output_dir: str = "."
    asymptotic_model: str = DEFAULT_ASYMPTOTIC_MODEL
    asymptotic_order: int = DEFAULT_ASYMPTOTIC_ORDER
    window: Optional[Tuple[int, int]] = None
    ray_endpoint: complex = DEFAULT_RAY_ENDPOINT
    ray_steps: int = DEFAULT_RAY_STEPS
    ray_delta: float = DEFAULT_RAY_DELTA
    taylor_boot: int = 0
    seed: int = DEFAULT_SEED
    workers: int = 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "order": self.order,
            "model": self.model,
            "output_format": self.output_format,
            "output_dir": self.output_dir,
            "asymptotic_model": self.asymptotic_model,
            "asymptotic_order": self.asymptotic_order,
            "window": list(self.window) if self.window else None,
            "ray_endpoint": [self.ray_endpoint.real, self.ray_endpoint.imag],
            "ray_steps": self.ray_steps,
            "ray_delta": self.ray_delta,
            "taylor_boot": self.taylor_boot,
            "seed": self.seed,
            "workers": self.workers,
        }


@dataclass
class ReportSection:
    name: str
    source: str
    status: str
    order: Optional[int] = None
    steps: Optional[int] = None
    data: Any = None
    error: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        body: Dict[str, Any] = {
            "name": self.name,
            "source": self.source,
            "status": self.status,
            "data": self.data,
        }
        if self.order is not None:
            body["order"] = self.order
        if self.steps is not None:
            body["steps"] = self.steps
        if self.error is not None:
            body["error"] = self.error
        return body


@dataclass
class Report:
    config: RunConfig
    defaults: Dict[str, Any]
    sections: List[ReportSection] = field(default_factory=list)

    @property
    def failed(self) -> List[str]:
        return [section.name for section in self.sections if section.status != "ok"]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "header": {
                "config": self.config.to_dict(),
                "defaults": self.defaults,
            },
            "sections": {section.name: section.to_dict() for section in self.sections},
            "failed_sections": self.failed,
        }
