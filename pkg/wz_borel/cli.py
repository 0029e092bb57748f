import argparse
import os
import sys
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, TextIO

from rich.console import Console
from rich.progress import (
    BarColumn,
    Progress,
    TextColumn,
    TimeElapsedColumn,
    TimeRemainingColumn,
)

from checkpoint import (
    CheckpointInspection,
    CheckpointState,
    cleanup_checkpoint,
    get_checkpoint_dir,
    inspect_checkpoint,
    load_checkpoint,
    save_checkpoint,
)
from kernels import create_system, get_available_systems

from .borel import borel_map
from .errors import BorelToolkitError, ConfigError
from .events import EventEmitter, start_heartbeat_emitter
from .formats import dumps_json, render_csv, write_text
from .job import (
    DEFAULT_PREPARATION_DEPS,
    PreparedRun,
    RunPreparationDeps,
    parse_complex,
    parse_window,
    prepare_run,
)
from .mellin import SUBTRACTION_CONVENTION, h_approx, h_subtracted, h_taylor, mellin_rows
from .models import DEFAULT_LAWS, MODELS, OUTPUT_FORMATS, SERIES_NAMES, Report, RunConfig
from .physical import parse_law, ratio_table
from .rayquad import Ray, RaySolution, RefinementStudy, boundedness_stats, refinement_study, solve_ray
from .report import ReportDeps, build_report, model_series
from .runtime import resolve_no_rich
from .scalars import get_max_zeta_index
from .series import (
    BiSeries,
    FormalSeries,
    coefficient_to_json,
    format_coefficient,
    series_to_csv_rows,
    series_to_json,
)
from .singular import (
    coeff_relation_negative,
    derive_negative_balance,
    derive_positive_balance,
    domb_sykes,
    exponent_negative,
    exponent_positive,
    weight_audit,
)

KERNELS = ("taylor", "approx")
PROGRESS_EVENT_SLICES = 10

EXIT_OK = 0
EXIT_DOMAIN_ERROR = 1
EXIT_USAGE = 2


@dataclass
class MainDeps:
    parse_args: Callable[[Optional[Sequence[str]]], argparse.Namespace]
    event_emitter_cls: Callable[..., EventEmitter]
    prepare_run: Callable[..., PreparedRun]
    preparation_deps: RunPreparationDeps
    model_series: Callable[..., Dict[str, FormalSeries]]
    h_taylor: Callable[[int], BiSeries]
    h_approx: Callable[[int], BiSeries]
    h_subtracted: Callable[[int, int], BiSeries]
    solve_ray: Callable[..., RaySolution]
    refinement_study: Callable[..., RefinementStudy]
    build_report: Callable[..., Report]
    get_checkpoint_dir: Callable[[str], str]
    inspect_checkpoint: Callable[..., CheckpointInspection]
    load_checkpoint: Callable[[str], Optional[CheckpointState]]
    save_checkpoint: Callable[..., None]
    cleanup_checkpoint: Callable[[str], None]
    start_heartbeat_emitter: Callable[..., Any]
    stdout: Optional[TextIO] = None


DEFAULT_MAIN_DEPS = MainDeps(
    parse_args=lambda argv=None: parse_args(argv),
    event_emitter_cls=EventEmitter,
    prepare_run=prepare_run,
    preparation_deps=DEFAULT_PREPARATION_DEPS,
    model_series=model_series,
    h_taylor=h_taylor,
    h_approx=h_approx,
    h_subtracted=h_subtracted,
    solve_ray=solve_ray,
    refinement_study=refinement_study,
    build_report=build_report,
    get_checkpoint_dir=get_checkpoint_dir,
    inspect_checkpoint=inspect_checkpoint,
    load_checkpoint=load_checkpoint,
    save_checkpoint=save_checkpoint,
    cleanup_checkpoint=cleanup_checkpoint,
    start_heartbeat_emitter=start_heartbeat_emitter,
)


def _steps_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"Step counts must look like '2000,4000,8000', got {text!r}") from exc


def _add_order(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--order",
        type=int,
        default=None,
        help="Truncation order N (default: 10)",
    )


def _add_model(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--model",
        choices=MODELS,
        default=None,
        help="Series model: full Schwinger-Dyson, approx system or reference ode (default: full)",
    )


def _add_output(parser: argparse.ArgumentParser, formats: Sequence[str] = OUTPUT_FORMATS) -> None:
    parser.add_argument(
        "--out",
        dest="output_format",
        choices=formats,
        default=None,
        help=f"Result format (default: {formats[0]})",
    )
    parser.add_argument(
        "--output",
        default=None,
        help="Result file, relative to the output directory (default: standard output)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wz-borel",
        description="Wess-Zumino anomalous dimension: exact series, Borel-plane analysis and ray solver",
    )
    parser.add_argument(
        "--event_format",
        choices=["text", "json"],
        default="text",
        help="Event output format (default: text)",
    )
    parser.add_argument("--log_file", help="Optional path to append event logs")
    parser.add_argument(
        "--no_rich",
        action="store_true",
        help="Disable rich progress bars (also WZ_BOREL_NO_RICH=1)",
    )
    parser.add_argument("--config", default=None, help="key=value config file (default: none)")
    parser.add_argument("--seed", type=int, default=None, help="Seed recorded with the run (default: 0)")
    parser.add_argument(
        "--workers",
        type=int,
        default=None,
        help="Parallel workers for independent rays (default: 1)",
    )
    parser.add_argument(
        "--out-dir",
        dest="output_dir",
        default=None,
        help="Output directory (default: $WZ_BOREL_OUTPUT_DIR or .)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gamma = sub.add_parser("gamma", help="Anomalous dimension series")
    _add_order(gamma)
    _add_model(gamma)
    _add_output(gamma)
    gamma.add_argument(
        "--series",
        choices=SERIES_NAMES,
        default="gamma",
        help="Which series of the approx system to print (default: gamma)",
    )
    gamma.add_argument(
        "--kernel",
        choices=KERNELS,
        default="taylor",
        help="Mellin data for the full model: exact Taylor or approximating kernel (default: taylor)",
    )
    gamma.add_argument(
        "--checkpoint",
        action="store_true",
        help="Save state after every order for resumable full solves",
    )
    gamma.add_argument("--resume", action="store_true", help="Resume from checkpoint if available")

    mellin = sub.add_parser("mellin", help="Taylor coefficients of the Mellin kernel")
    _add_order(mellin)
    _add_output(mellin, ("json", "csv"))
    mellin.add_argument(
        "--subtract",
        type=int,
        default=0,
        help="Remove the first k IR pole pairs (default: 0)",
    )
    mellin.add_argument(
        "--kernel",
        choices=KERNELS,
        default="taylor",
        help="Exact kernel or approximating kernel (default: taylor)",
    )

    exponents = sub.add_parser("exponents", help="Exact singular exponents at xi = +-k/3")
    exponents.add_argument("--k", type=int, required=True, help="Singularity index k >= 1")
    exponents.add_argument("--sign", choices=["+", "-"], required=True, help="Side of the singularity")
    exponents.add_argument(
        "--out",
        dest="output_format",
        choices=OUTPUT_FORMATS,
        default=None,
        help="json adds the derived balance; otherwise the exponent is printed",
    )
    exponents.add_argument("--output", default=None, help="Result file (default: standard output)")

    singularities = sub.add_parser("singularities", help="Domb-Sykes analysis of the Borel image")
    _add_order(singularities)
    _add_model(singularities)
    _add_output(singularities, ("json", "csv"))
    singularities.add_argument(
        "--window",
        type=parse_window,
        default=None,
        help="Fit window a,b (default: N/2,N)",
    )

    ratios = sub.add_parser("ratios", help="Coefficient ratios against an affine law")
    _add_order(ratios)
    _add_model(ratios)
    _add_output(ratios)
    ratios.add_argument("--law", default=None, help="Affine law such as -(3n+2) (default: per model)")
    ratios.add_argument(
        "--series",
        choices=SERIES_NAMES,
        default="gamma",
        help="Series of the approx system to test (default: gamma)",
    )

    weights = sub.add_parser("weights", help="Zeta-weight audit of the full series")
    _add_order(weights)
    _add_output(weights, ("json", "csv"))

    ray = sub.add_parser("ray", help="March the truncated Borel system along a ray")
    ray.add_argument(
        "--to",
        dest="ray_endpoint",
        type=parse_complex,
        default=None,
        help="Ray endpoint RE,IM (default: 40,35)",
    )
    ray.add_argument("--steps", dest="ray_steps", type=int, default=None, help="Even step count (default: 2000)")
    ray.add_argument("--delta", dest="ray_delta", type=float, default=None, help="Singularity guard (default: 1e-3)")
    ray.add_argument(
        "--taylor-boot",
        dest="taylor_boot",
        type=int,
        default=None,
        help="Start from K exact Taylor terms (default: 0, off)",
    )
    ray.add_argument(
        "--refine",
        type=_steps_list,
        default=None,
        help="Run a refinement study over doubling step counts, e.g. 2000,4000,8000",
    )
    ray.add_argument(
        "--system",
        choices=get_available_systems(),
        default="truncated",
        help="Volterra system to march (default: truncated)",
    )
    _add_output(ray)

    report = sub.add_parser("report", help="Single JSON summary of all analyses")
    _add_order(report)
    _add_model(report)
    report.add_argument(
        "--asymptotic-order",
        dest="asymptotic_order",
        type=int,
        default=None,
        help="Order for ratio and singularity sections (default: 200)",
    )
    report.add_argument(
        "--asymptotic-model",
        dest="asymptotic_model",
        choices=MODELS,
        default=None,
        help="Model for ratio and singularity sections (default: ode)",
    )
    report.add_argument("--window", type=parse_window, default=None, help="Fit window a,b (default: N/2,N)")
    report.add_argument("--steps", dest="ray_steps", type=int, default=None, help="Ray step count (default: 2000)")
    report.add_argument("--output", default=None, help="Report file (default: standard output)")
    return parser


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)


def _make_progress(label: str, unit: str) -> Progress:
    return Progress(
        TextColumn(f"[bold]{label}[/bold]"),
        BarColumn(),
        TextColumn("{task.completed}/{task.total} " + unit),
        TimeElapsedColumn(),
        TimeRemainingColumn(),
        console=Console(stderr=True),
    )


class _ProgressReporter:
    """Forward solver progress to a rich bar or to sparse progress events."""

    def __init__(self, events: EventEmitter, use_rich: bool, label: str, unit: str):
        self.events = events
        self.unit = unit
        self.progress = _make_progress(label, unit) if use_rich else None
        self.task_id = None

    def __enter__(self) -> "_ProgressReporter":
        if self.progress is not None:
            self.progress.start()
        return self

    def __exit__(self, *exc: Any) -> None:
        if self.progress is not None:
            self.progress.stop()

    def __call__(self, current: int, total: int) -> None:
        if self.progress is not None:
            if self.task_id is None:
                self.task_id = self.progress.add_task(self.unit, total=total, completed=0)
            self.progress.update(self.task_id, completed=current)
            return
        stride = max(1, total // PROGRESS_EVENT_SLICES)
        if current == total or current % stride == 0:
            self.events.emit("progress", current=current, total=total, unit=self.unit)


def _write_result(
    text: str,
    args: argparse.Namespace,
    config: RunConfig,
    events: EventEmitter,
    stdout: TextIO,
    kind: str,
) -> None:
    if args.output:
        path = os.path.join(config.output_dir, args.output)
        write_text(text, path=path)
        events.emit("artifact", kind=kind, path=path)
    else:
        write_text(text, stream=stdout)


def _series_text(series: FormalSeries, fmt: str, metadata: Dict[str, Any]) -> str:
    if fmt == "json":
        return dumps_json({**metadata, "series": series_to_json(series)})
    rows = series_to_csv_rows(series)
    return render_csv(rows[1:], header=rows[0])


def run_gamma(args, config, events, deps, stdout, use_rich) -> int:
    model = config.model
    kernel = None
    if model == "full" and args.kernel == "approx":
        kernel = deps.h_approx(config.order - 1)
    use_checkpoint = args.checkpoint or args.resume
    if use_checkpoint and model != "full":
        events.warn(f"--checkpoint/--resume only apply to the full model; ignored for {model}.")
        use_checkpoint = False

    checkpoint_dir = deps.get_checkpoint_dir(
        os.path.join(config.output_dir, args.output or f"gamma-{model}")
    )
    checkpoint_config = {"kernel": args.kernel, "max_zeta_index": get_max_zeta_index()}
    initial = None
    if use_checkpoint and args.resume:
        inspection = deps.inspect_checkpoint(checkpoint_dir, model, checkpoint_config)
        if inspection.resume_compatible:
            state = deps.load_checkpoint(checkpoint_dir)
            if state is not None:
                initial = state.coefficients
                events.emit("checkpoint", code="RESUMING", detail=state.completed_order)
        elif inspection.exists:
            events.emit("checkpoint", code="INVALID", detail=inspection.reason)
        else:
            events.emit("checkpoint", code="NONE")

    events.emit("phase", phase="SOLVING")
    if model == "full":
        with _ProgressReporter(events, use_rich, "Solving", "orders") as reporter:

            def on_order(p: int, coefficients: List[Any]) -> None:
                reporter(p, config.order)
                if use_checkpoint:
                    deps.save_checkpoint(
                        checkpoint_dir,
                        CheckpointState(model, config.order, checkpoint_config, list(coefficients)),
                    )

            stop, thread = deps.start_heartbeat_emitter(events, thread_name="solve-heartbeat")
            try:
                series = deps.model_series(
                    model, config.order, on_order=on_order, initial=initial, kernel=kernel
                )
            finally:
                stop.set()
                thread.join(timeout=1)
    else:
        series = deps.model_series(model, config.order)

    if args.series not in series:
        raise ConfigError(f"Series {args.series} is only produced by the approx model")
    metadata = {"model": model, "order": config.order, "name": args.series}
    if model == "full":
        metadata["kernel"] = args.kernel
    text = _series_text(series[args.series], config.output_format, metadata)
    _write_result(text, args, config, events, stdout, "series")
    if use_checkpoint:
        deps.cleanup_checkpoint(checkpoint_dir)
        events.emit("checkpoint", code="CLEANED")
    return EXIT_OK


def run_mellin(args, config, events, deps, stdout, use_rich) -> int:
    fmt = args.output_format or "json"
    if args.subtract < 0:
        raise ConfigError(f"--subtract must be >= 0, got {args.subtract}")
    if args.kernel == "approx":
        h = deps.h_approx(config.order)
    elif args.subtract:
        h = deps.h_subtracted(args.subtract, config.order)
    else:
        h = deps.h_taylor(config.order)
    rows = mellin_rows(h)
    if fmt == "json":
        payload: Dict[str, Any] = {
            "order": config.order,
            "kernel": args.kernel,
            "subtract": args.subtract,
            "coefficients": [
                {"m": m, "n": n, "coeff": coefficient_to_json(c)} for m, n, c in rows
            ],
        }
        if args.subtract:
            payload["convention"] = SUBTRACTION_CONVENTION
        text = dumps_json(payload)
    else:
        text = render_csv(
            ([m, n, format_coefficient(c)] for m, n, c in rows), header=["m", "n", "coeff"]
        )
    _write_result(text, args, config, events, stdout, "mellin")
    return EXIT_OK


def run_exponents(args, config, events, deps, stdout, use_rich) -> int:
    if args.sign == "+":
        exponent = exponent_positive(args.k)
        balance = derive_positive_balance(args.k)
        coefficient = None
    else:
        exponent = exponent_negative(args.k)
        balance = derive_negative_balance(args.k)
        coefficient = coeff_relation_negative(args.k)
    if balance.exponent != exponent:
        events.warn(f"Derived exponent {balance.exponent} differs from closed form {exponent}")
    if args.output_format == "json":
        text = dumps_json(
            {
                "k": args.k,
                "sign": args.sign,
                "exponent": str(exponent),
                "coefficient": None if coefficient is None else str(coefficient),
                "balance": balance.to_dict(),
            }
        )
    else:
        text = f"{exponent}\n"
    _write_result(text, args, config, events, stdout, "exponents")
    return EXIT_OK


def run_singularities(args, config, events, deps, stdout, use_rich) -> int:
    fmt = args.output_format or "json"
    gamma = deps.model_series(config.model, config.order)["gamma"]
    result = domb_sykes(borel_map(gamma), window=config.window)
    if fmt == "json":
        text = dumps_json({"model": config.model, "order": config.order, "report": result.to_dict()})
    else:
        low, _ = result.window
        text = render_csv(
            ([low + i, r] for i, r in enumerate(result.residuals)), header=["n", "residual"]
        )
    _write_result(text, args, config, events, stdout, "singularities")
    return EXIT_OK


def run_ratios(args, config, events, deps, stdout, use_rich) -> int:
    series = deps.model_series(config.model, config.order)
    if args.series not in series:
        raise ConfigError(f"Series {args.series} is only produced by the approx model")
    law_text = args.law or DEFAULT_LAWS[(config.model, args.series)]
    law = parse_law(law_text)
    rows = ratio_table(series[args.series], law)
    if config.output_format == "json":
        text = dumps_json(
            {
                "model": config.model,
                "order": config.order,
                "series": args.series,
                "law": str(law),
                "rows": [row.to_dict() for row in rows],
            }
        )
    else:
        text = render_csv(
            ([r.n, r.ratio, r.predicted, r.deviation, r.gap] for r in rows),
            header=["n", "ratio", "predicted", "deviation", "gap"],
        )
    _write_result(text, args, config, events, stdout, "ratios")
    return EXIT_OK


def run_weights(args, config, events, deps, stdout, use_rich) -> int:
    fmt = args.output_format or "json"
    stop, thread = deps.start_heartbeat_emitter(events, thread_name="solve-heartbeat")
    try:
        gamma = deps.model_series("full", config.order)["gamma"]
    finally:
        stop.set()
        thread.join(timeout=1)
    audit = weight_audit(gamma)
    if audit.unexpected:
        events.warn(f"Weight drops outside the known set at p = {audit.unexpected}")
    if fmt == "json":
        text = dumps_json({"order": config.order, "audit": audit.to_dict()})
    else:
        text = render_csv(
            (
                [row["p"], row["w"], row["expected"], row["W"], row["exception"]]
                for row in (r.to_dict() for r in audit.rows)
            ),
            header=["p", "w", "expected", "W", "exception"],
        )
    _write_result(text, args, config, events, stdout, "weights")
    return EXIT_OK


def run_ray(args, config, events, deps, stdout, use_rich) -> int:
    ray = Ray(config.ray_endpoint, config.ray_steps, config.ray_delta)
    taylor_boot = config.taylor_boot or None
    events.emit("phase", phase="MARCHING")
    if args.refine:
        with _ProgressReporter(events, use_rich, "Refining", "runs") as reporter:
            study = deps.refinement_study(
                ray,
                args.refine,
                system_type=args.system,
                workers=config.workers,
                taylor_boot=taylor_boot,
                progress_callback=reporter,
            )
        if config.output_format == "json":
            text = dumps_json(study.to_dict())
        else:
            text = render_csv(
                ([r.coarse_steps, r.fine_steps, r.sup_difference, r.exact_error] for r in study.rows),
                header=["coarse_steps", "fine_steps", "sup_difference", "exact_error"],
            )
        _write_result(text, args, config, events, stdout, "refinement")
        return EXIT_OK

    with _ProgressReporter(events, use_rich, "Marching", "nodes") as reporter:
        solution = deps.solve_ray(
            ray,
            system=create_system(args.system),
            taylor_boot=taylor_boot,
            progress_callback=reporter,
        )
    stats = boundedness_stats(solution)
    events.emit("metadata", key="growth_ratio", value=stats.growth_ratio)
    if config.output_format == "json":
        text = dumps_json(
            {"ray": ray.to_dict(), "metadata": solution.metadata, "boundedness": stats.to_dict()}
        )
    else:
        text = render_csv(solution.csv_rows(), header=solution.csv_header())
    _write_result(text, args, config, events, stdout, "ray")
    return EXIT_OK


def run_report(args, config, events, deps, stdout, use_rich) -> int:
    def on_section(section) -> None:
        events.emit("section", name=section.name, status=section.status)
        if section.error:
            events.warn(f"{section.name}: {section.error}")
        elif section.status != "ok":
            events.warn(f"{section.name}: checks {section.status}")

    report_deps = ReportDeps(
        model_series=deps.model_series,
        domb_sykes=domb_sykes,
        weight_audit=weight_audit,
        solve_ray=deps.solve_ray,
    )
    with _ProgressReporter(events, use_rich, "Ray", "nodes") as reporter:
        report = deps.build_report(
            config, on_section=on_section, ray_progress=reporter, deps=report_deps
        )
    _write_result(dumps_json(report.to_dict()) + "\n", args, config, events, stdout, "report")
    return EXIT_DOMAIN_ERROR if report.failed else EXIT_OK


HANDLERS = {
    "gamma": run_gamma,
    "mellin": run_mellin,
    "exponents": run_exponents,
    "singularities": run_singularities,
    "ratios": run_ratios,
    "weights": run_weights,
    "ray": run_ray,
    "report": run_report,
}


def main(argv: Optional[Sequence[str]] = None, deps: Optional[MainDeps] = None) -> int:
    deps = deps or DEFAULT_MAIN_DEPS
    stdout = deps.stdout or sys.stdout

    args = deps.parse_args(argv)
    events = deps.event_emitter_cls(
        event_format=args.event_format,
        run_id=args.command,
        log_file=args.log_file,
        to_stderr=getattr(args, "output", None) is None,
    )

    try:
        prepared = deps.prepare_run(args, deps=deps.preparation_deps)
        for warning in prepared.warnings:
            events.warn(warning)
        config = prepared.config
        events.emit("metadata", key="command", value=args.command)
        events.emit("metadata", key="seed", value=config.seed)
        use_rich = not resolve_no_rich(args.no_rich)
        code = HANDLERS[args.command](args, config, events, deps, stdout, use_rich)
        events.emit("done", command=args.command, exit_code=code)
        return code
    except BaseException as exc:
        if isinstance(exc, BorelToolkitError):
            events.error(str(exc))
        elif isinstance(exc, Exception):
            events.error(f"{type(exc).__name__}: {exc}")
        raise
    finally:
        events.close()


def dispatch(argv: Optional[Sequence[str]] = None, deps: Optional[MainDeps] = None) -> int:
    """Run one command and map failures to the exit-code contract."""
    try:
        return main(argv, deps)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    except Exception:
        return EXIT_DOMAIN_ERROR
