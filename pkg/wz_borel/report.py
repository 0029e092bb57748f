"""Single JSON summary tying the modules together.

Each section names the operation that produced it and the truncation order
or step count behind its numbers. A failing section is recorded and the
remaining sections still run.
"""

from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence

from .borel import borel_map
from .models import DEFAULT_LAWS, Report, ReportSection, RunConfig
from .physical import (
    OrderCallback,
    RatioRow,
    approx_solve,
    ode_reference,
    parse_law,
    ratio_table,
    sd_solve,
)
from .rayquad import Ray, ProgressCallback, RaySolution, boundedness_stats, solve_ray
from .series import BiSeries, FormalSeries, euler, fs_exp, series_to_json
from .singular import (
    KNOWN_WEIGHT_DROPS,
    SingularityReport,
    WeightAudit,
    coeff_relation_negative,
    derive_negative_balance,
    derive_positive_balance,
    domb_sykes,
    exponent_negative,
    exponent_positive,
    weight_audit,
)

EXPONENT_TABLE_SIZE = 10

# Ratio-law verdicts look at n >= RATIO_TAIL_START only.
RATIO_TAIL_START = 30
RATIO_TREND_MIN_ROWS = 4

# Deviation ceilings on the tail; laws without an entry are judged on trend alone.
RATIO_TOLERANCES = {
    ("full", "gamma"): 0.1,
    ("ode", "gamma"): 0.1,
}

SOURCES = {
    "full": "physical.sd_solve",
    "approx": "physical.approx_solve",
    "ode": "physical.ode_reference",
}


def model_series(
    model: str,
    order: int,
    on_order: Optional[OrderCallback] = None,
    initial: Optional[Sequence[Any]] = None,
    kernel: Optional[BiSeries] = None,
) -> Dict[str, FormalSeries]:
    """Series produced by ``model``: gamma always, plus F and L for the approximate system.

    ``on_order``, ``initial`` and ``kernel`` only apply to the full model.
    """
    if model == "full":
        return {"gamma": sd_solve(order, kernel=kernel, on_order=on_order, initial=initial)}
    if model == "approx":
        f, l, gamma = approx_solve(order)
        return {"gamma": gamma, "F": f, "L": l}
    if model == "ode":
        return {"gamma": ode_reference(order)}
    raise ValueError(f"Unknown model: {model}")


def exponent_rows(count: int = EXPONENT_TABLE_SIZE) -> List[Dict[str, Any]]:
    rows = []
    for k in range(1, count + 1):
        positive = derive_positive_balance(k)
        negative = derive_negative_balance(k)
        rows.append(
            {
                "k": k,
                "positive": str(exponent_positive(k)),
                "negative": str(exponent_negative(k)),
                "coefficient_negative": str(coeff_relation_negative(k)),
                "derived_positive": positive.to_dict(),
                "derived_negative": negative.to_dict(),
                "consistent": positive.exponent == exponent_positive(k)
                and negative.exponent == exponent_negative(k)
                and negative.coefficient_ratio == coeff_relation_negative(k).ratio,
            }
        )
    return rows


@dataclass
class ReportDeps:
    """Computations behind the report sections."""

    model_series: Callable[..., Dict[str, FormalSeries]]
    domb_sykes: Callable[..., SingularityReport]
    weight_audit: Callable[[FormalSeries], WeightAudit]
    solve_ray: Callable[..., RaySolution]


DEFAULT_REPORT_DEPS = ReportDeps(
    model_series=model_series,
    domb_sykes=domb_sykes,
    weight_audit=weight_audit,
    solve_ray=solve_ray,
)


def weight_verdict(audit: WeightAudit) -> Dict[str, Any]:
    """Passes when weights never exceed p and only the known orders drop."""
    above = [row.p for row in audit.rows if row.weight > row.p]
    return {
        "passed": not audit.unexpected and not above,
        "exceptions": audit.exceptions,
        "known_exceptions": list(KNOWN_WEIGHT_DROPS),
        "unexpected_exceptions": audit.unexpected,
        "above_bound": above,
    }


def ratio_verdict(rows: Sequence[RatioRow], tolerance: Optional[float] = None) -> Dict[str, Any]:
    """Judge the tail n >= RATIO_TAIL_START of a ratio table.

    The mean deviation of the later half of the tail must be below that of
    the earlier half; with a ``tolerance`` every tail deviation must also
    stay under it. Tables too short to have a tail are skipped.
    """
    tail = [row.deviation for row in rows if row.n >= RATIO_TAIL_START and not row.gap]
    if len(tail) < RATIO_TREND_MIN_ROWS:
        return {"passed": True, "skipped": True, "tail_rows": len(tail)}
    half = len(tail) // 2
    early = sum(tail[:half]) / half
    late = sum(tail[-half:]) / half
    worst = max(tail)
    return {
        "passed": late < early and (tolerance is None or worst <= tolerance),
        "skipped": False,
        "tail_rows": len(tail),
        "tolerance": tolerance,
        "max_deviation": worst,
        "early_mean_deviation": early,
        "late_mean_deviation": late,
    }


def exp_additivity_verdict(gamma: FormalSeries) -> Dict[str, Any]:
    """exp(f + g) = exp(f) exp(g) and the Leibniz rule for f = gamma, g = a d/da gamma."""
    drift = euler(gamma)
    additive = fs_exp(gamma + drift) == fs_exp(gamma) * fs_exp(drift)
    lhs = euler(gamma * drift)
    rhs = euler(gamma) * drift + gamma * euler(drift)
    order = min(lhs.order, rhs.order)
    leibniz = lhs.truncate(order) == rhs.truncate(order)
    return {
        "passed": additive and leibniz,
        "exp_additivity": additive,
        "leibniz": leibniz,
        "order": gamma.order,
    }


def _section(
    name: str,
    source: str,
    compute: Callable[[], Any],
    order: Optional[int] = None,
    steps: Optional[int] = None,
    passed: Optional[Callable[[Any], bool]] = None,
) -> ReportSection:
    try:
        data = compute()
    except Exception as exc:
        return ReportSection(
            name, source, "error", order=order, steps=steps, error=f"{type(exc).__name__}: {exc}"
        )
    status = "failed" if passed is not None and not passed(data) else "ok"
    return ReportSection(name, source, status, order=order, steps=steps, data=data)


def build_report(
    config: RunConfig,
    on_section: Optional[Callable[[ReportSection], None]] = None,
    ray_progress: Optional[ProgressCallback] = None,
    deps: Optional[ReportDeps] = None,
) -> Report:
    deps = deps or DEFAULT_REPORT_DEPS
    report = Report(config=config, defaults=RunConfig().to_dict())
    cache: Dict[str, Dict[str, FormalSeries]] = {}

    def series_for(model: str, order: int) -> Dict[str, FormalSeries]:
        key = f"{model}:{order}"
        if key not in cache:
            cache[key] = deps.model_series(model, order)
        return cache[key]

    def ratio_tables() -> Dict[str, Any]:
        tables = {}
        for name, series in series_for(config.asymptotic_model, config.asymptotic_order).items():
            law = parse_law(DEFAULT_LAWS[(config.asymptotic_model, name)])
            tables[name] = (law, ratio_table(series, law))
        return tables

    def gamma_data() -> Dict[str, Any]:
        return {
            name: series_to_json(series)
            for name, series in series_for(config.model, config.order).items()
        }

    def ratio_data() -> Dict[str, Any]:
        return {
            name: {"law": str(law), "rows": [row.to_dict() for row in rows]}
            for name, (law, rows) in ratio_tables().items()
        }

    def singularity_data() -> Dict[str, Any]:
        gamma = series_for(config.asymptotic_model, config.asymptotic_order)["gamma"]
        return deps.domb_sykes(borel_map(gamma), window=config.window).to_dict()

    def weight_data() -> Dict[str, Any]:
        return deps.weight_audit(series_for("full", config.order)["gamma"]).to_dict()

    def ray_data() -> Dict[str, Any]:
        ray = Ray(config.ray_endpoint, config.ray_steps, config.ray_delta)
        solution = deps.solve_ray(
            ray, taylor_boot=config.taylor_boot or None, progress_callback=ray_progress
        )
        return {
            "ray": ray.to_dict(),
            "metadata": solution.metadata,
            "boundedness": boundedness_stats(solution).to_dict(),
        }

    def invariant_data() -> Dict[str, Any]:
        gamma = series_for("full", config.order)["gamma"]
        laws = {
            name: ratio_verdict(rows, RATIO_TOLERANCES.get((config.asymptotic_model, name)))
            for name, (_, rows) in ratio_tables().items()
        }
        suites = {
            "weights": weight_verdict(deps.weight_audit(gamma)),
            "ratio_laws": {"passed": all(v["passed"] for v in laws.values()), "series": laws},
            "exp_additivity": exp_additivity_verdict(gamma),
        }
        return {"passed": all(suite["passed"] for suite in suites.values()), "suites": suites}

    asymptotic_source = SOURCES[config.asymptotic_model]
    plan = [
        ("gamma", SOURCES[config.model], gamma_data, config.order, None, None),
        ("ratios", f"physical.ratio_table({asymptotic_source})", ratio_data, config.asymptotic_order, None, None),
        (
            "singularities",
            f"singular.domb_sykes(borel.borel_map({asymptotic_source}))",
            singularity_data,
            config.asymptotic_order,
            None,
            None,
        ),
        ("exponents", "singular.exponent_positive/exponent_negative/derive_*_balance", exponent_rows, None, None, None),
        ("weights", "singular.weight_audit(physical.sd_solve)", weight_data, config.order, None, None),
        ("ray", "rayquad.solve_ray+boundedness_stats", ray_data, None, config.ray_steps, None),
        (
            "invariants",
            "report.weight_verdict/ratio_verdict/exp_additivity_verdict",
            invariant_data,
            config.order,
            None,
            lambda data: data["passed"],
        ),
    ]
    for name, source, compute, order, steps, passed in plan:
        section = _section(name, source, compute, order=order, steps=steps, passed=passed)
        report.sections.append(section)
        if on_section is not None:
            on_section(section)
    return report
