"""Predictor-corrector Simpson march of Volterra systems along complex rays.

The march is causal: node i only needs nodes 0..i. The kernel depends on
xi - eta along the same ray, so one uniform grid serves both convolution
arguments.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from math import log2
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from kernels import VolterraSystem, create_system

from .borel import BorelSeries, borel_eval
from .errors import (
    ChenConvergenceError,
    CorrectorConvergenceError,
    PoleProximityError,
    RayDivergenceError,
    RayValidationError,
)

DEFAULT_RAY_DELTA = 1e-3
DEFAULT_SYSTEM = "truncated"
CORRECTOR_TOLERANCE = 1e-13
MAX_CORRECTOR_ITERATIONS = 50
TAYLOR_BOOT_NODES = 10
BOUNDED_GROWTH_LIMIT = 1.1
SCHEME = "composite Simpson (3/8 head on odd node counts), trapezoid predictor, fixed-point corrector"

CHEN_NODES = 24
CHEN_DEPTH = 30
CHEN_SERIES_TERMS = 64
CHEN_TOLERANCE = 1e-12

ProgressCallback = Callable[[int, int], None]


@dataclass(frozen=True)
class Ray:
    """Straight ray from the origin to ``endpoint`` cut into ``steps`` equal steps."""

    endpoint: complex
    steps: int
    delta: float = DEFAULT_RAY_DELTA

    def __post_init__(self) -> None:
        object.__setattr__(self, "endpoint", complex(self.endpoint))
        if self.steps <= 0 or self.steps % 2:
            raise RayValidationError(f"Ray steps must be a positive even number, got {self.steps}")
        if not self.delta > 0:
            raise RayValidationError(f"Ray guard delta must be positive, got {self.delta}")
        if self.endpoint == 0:
            raise RayValidationError("Ray endpoint must differ from the origin")
        if self.endpoint.imag == 0:
            self._check_real_axis()

    def _check_real_axis(self) -> None:
        # Borel singularities sit at +-k/3; marching through one is lateral summation.
        length = abs(self.endpoint)
        direction = 1 if self.endpoint.real > 0 else -1
        k = 1
        while k / 3 <= length + self.delta:
            point = direction * k / 3
            if _segment_distance(point, self.endpoint) <= self.delta:
                raise RayValidationError(
                    f"Real ray to {self.endpoint} passes within {self.delta} of the "
                    f"singularity at {point:+.6g}"
                )
            k += 1

    @property
    def step(self) -> complex:
        return self.endpoint / self.steps

    def nodes(self) -> np.ndarray:
        return self.step * np.arange(self.steps + 1)

    def conjugate(self) -> "Ray":
        return Ray(self.endpoint.conjugate(), self.steps, self.delta)

    def with_steps(self, steps: int) -> "Ray":
        return Ray(self.endpoint, steps, self.delta)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "endpoint": [self.endpoint.real, self.endpoint.imag],
            "steps": self.steps,
            "delta": self.delta,
        }


def _segment_distance(point: complex, endpoint: complex) -> float:
    t = (complex(point) * endpoint.conjugate()).real / abs(endpoint) ** 2
    t = min(max(t, 0.0), 1.0)
    return abs(complex(point) - t * endpoint)


def check_ray(system: VolterraSystem, ray: Ray) -> None:
    for point in system.singular_points():
        if _segment_distance(point, ray.endpoint) <= ray.delta:
            raise PoleProximityError(
                f"Ray to {ray.endpoint} passes within {ray.delta} of {point}, "
                f"where the {system.name} closure is singular",
                pole=point,
            )


@dataclass
class RaySolution:
    nodes: np.ndarray
    values: np.ndarray
    step: complex
    component_names: Tuple[str, ...]
    metadata: Dict[str, Any] = field(default_factory=dict)

    def component(self, name: str) -> np.ndarray:
        return self.values[:, self.component_names.index(name)]

    @property
    def samples(self) -> List[Tuple[complex, ...]]:
        return [
            (complex(xi), *(complex(v) for v in row))
            for xi, row in zip(self.nodes, self.values)
        ]

    def csv_header(self) -> List[str]:
        header = ["index", "arclength", "re_xi", "im_xi"]
        for name in self.component_names:
            header.extend([f"re_{name}", f"im_{name}"])
        return header

    def csv_rows(self) -> List[List[Any]]:
        h = abs(self.step)
        rows: List[List[Any]] = []
        for index, (xi, row) in enumerate(zip(self.nodes, self.values)):
            line: List[Any] = [index, index * h, xi.real, xi.imag]
            for value in row:
                line.extend([value.real, value.imag])
            rows.append(line)
        return rows


def trapezoid_weights(n: int) -> np.ndarray:
    weights = np.ones(n + 1)
    if n == 0:
        return np.zeros(1)
    weights[0] = weights[-1] = 0.5
    return weights


def simpson_weights(n: int) -> np.ndarray:
    """Composite Simpson weights for n intervals (3/8 rule on the first three when n is odd)."""
    if n == 0:
        return np.zeros(1)
    if n == 1:
        return trapezoid_weights(1)
    weights = np.zeros(n + 1)
    start = 0
    if n % 2:
        weights[0:4] += np.array([3.0, 9.0, 9.0, 3.0]) / 8.0
        start = 3
    if n > start:
        block = np.ones(n - start + 1)
        block[1:-1:2] = 4.0
        block[2:-1:2] = 2.0
        weights[start:] += block / 3.0
    return weights


def _extrapolate(values: np.ndarray, i: int) -> np.ndarray:
    if i == 1:
        return values[0].copy()
    if i == 2:
        return 2 * values[1] - values[0]
    return 3 * values[i - 1] - 3 * values[i - 2] + values[i - 3]


def march(
    system: VolterraSystem,
    ray: Ray,
    boot_values: Optional[np.ndarray] = None,
    progress_callback: Optional[ProgressCallback] = None,
) -> RaySolution:
    """Integrate ``system`` along ``ray``.

    Node i is predicted with trapezoid weights, then corrected with Simpson
    weights until the fixed point settles to CORRECTOR_TOLERANCE.
    """
    check_ray(system, ray)
    h = ray.step
    xi = ray.nodes()
    total = ray.steps
    values = np.zeros((total + 1, system.dimension), dtype=np.complex128)
    values[0] = system.initial_values()
    start = 1
    if boot_values is not None:
        count = min(len(boot_values), total + 1)
        values[:count] = boot_values[:count]
        values[0] = system.initial_values()
        start = count

    origin = values[0:1]
    zero = xi[0:1]
    for i in range(start, total + 1):
        if i > 1:
            interior = system.pair_terms(
                values[i - 1 : 0 : -1], values[1:i], xi[i - 1 : 0 : -1], xi[1:i]
            )
        else:
            interior = np.zeros((system.integral_count, 0), dtype=np.complex128)
        here = xi[i : i + 1]

        def endpoints(u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
            row = u[np.newaxis, :]
            at_zero = system.pair_terms(row, origin, here, zero)[:, 0]
            at_xi = system.pair_terms(origin, row, zero, here)[:, 0]
            return at_zero, at_xi

        predictor = trapezoid_weights(i)
        u = _extrapolate(values, i)
        first, last = endpoints(u)
        integrals = h * (interior @ predictor[1:i] + predictor[0] * first + predictor[i] * last)
        u = system.closure(xi[i], integrals, u)

        corrector = simpson_weights(i)
        interior_sum = interior @ corrector[1:i]
        for _ in range(MAX_CORRECTOR_ITERATIONS):
            first, last = endpoints(u)
            integrals = h * (interior_sum + corrector[0] * first + corrector[i] * last)
            updated = system.closure(xi[i], integrals, u)
            if not np.all(np.isfinite(updated)):
                raise RayDivergenceError(
                    f"Non-finite value at node {i} (xi={xi[i]:.6g}) on the ray to {ray.endpoint}",
                    node=i,
                )
            change = np.max(np.abs(updated - u))
            u = updated
            if change <= CORRECTOR_TOLERANCE * max(1.0, float(np.max(np.abs(u)))):
                break
        else:
            raise CorrectorConvergenceError(
                f"Corrector did not settle in {MAX_CORRECTOR_ITERATIONS} iterations at node {i}",
                node=i,
            )
        values[i] = u
        if progress_callback is not None:
            progress_callback(i, total)

    metadata = dict(system.metadata())
    metadata.update({"scheme": SCHEME, "steps": total, "step": [h.real, h.imag]})
    return RaySolution(
        nodes=xi,
        values=values,
        step=h,
        component_names=tuple(system.component_names),
        metadata=metadata,
    )


def solve_ray(
    ray: Ray,
    system: Optional[VolterraSystem] = None,
    taylor_boot: Optional[int] = None,
    progress_callback: Optional[ProgressCallback] = None,
) -> RaySolution:
    """March the truncated Borel system (or ``system``) along ``ray``.

    With ``taylor_boot`` set, the first TAYLOR_BOOT_NODES nodes come from the
    exact series truncated to that many terms.
    """
    if system is None:
        system = create_system(DEFAULT_SYSTEM)
    boot_values = None
    if taylor_boot:
        count = min(TAYLOR_BOOT_NODES, ray.steps) + 1
        boot_values = system.taylor_values(ray.nodes()[:count], taylor_boot)
        if boot_values is None:
            raise RayValidationError(f"System '{system.name}' has no series data for a Taylor boot")
    solution = march(system, ray, boot_values=boot_values, progress_callback=progress_callback)
    solution.metadata["taylor_boot"] = taylor_boot or 0
    solution.metadata["delta"] = ray.delta
    return solution


@dataclass
class BoundednessStats:
    global_max: float
    early_max: float
    final_quarter_max: float
    growth_ratio: float
    finite: bool

    @property
    def bounded(self) -> bool:
        return self.finite and self.growth_ratio < BOUNDED_GROWTH_LIMIT

    def to_dict(self) -> Dict[str, Any]:
        return {
            "global_max": self.global_max,
            "early_max": self.early_max,
            "final_quarter_max": self.final_quarter_max,
            "growth_ratio": self.growth_ratio,
            "finite": self.finite,
            "bounded": self.bounded,
        }


def boundedness_stats(solution: RaySolution, component: Optional[str] = None) -> BoundednessStats:
    """Compare the final-quarter maximum of |component| against the first three quarters."""
    name = component or solution.component_names[0]
    magnitude = np.abs(solution.component(name))
    finite = bool(np.all(np.isfinite(magnitude)))
    split = (3 * (len(magnitude) - 1)) // 4
    early = float(np.max(magnitude[: split + 1]))
    late = float(np.max(magnitude[split:]))
    return BoundednessStats(
        global_max=float(np.max(magnitude)),
        early_max=early,
        final_quarter_max=late,
        growth_ratio=late / early if early > 0 else float("inf"),
        finite=finite,
    )


def series_deviation(
    solution: RaySolution,
    borel_series: BorelSeries,
    radius: float,
    component: Optional[str] = None,
) -> float:
    """Largest relative gap between the march and ``borel_series`` on nodes with |xi| <= radius."""
    name = component or solution.component_names[0]
    values = solution.component(name)
    worst = 0.0
    for xi, value in zip(solution.nodes, values):
        if abs(xi) > radius:
            break
        exact = borel_eval(borel_series, complex(xi))
        worst = max(worst, abs(value - exact) / max(abs(exact), 1e-300))
    return worst


@dataclass
class RefinementRow:
    coarse_steps: int
    fine_steps: int
    sup_difference: float
    exact_error: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "coarse_steps": self.coarse_steps,
            "fine_steps": self.fine_steps,
            "sup_difference": self.sup_difference,
            "exact_error": self.exact_error,
        }


@dataclass
class RefinementStudy:
    ray: Ray
    system: str
    rows: List[RefinementRow]

    @property
    def reduction_factors(self) -> List[float]:
        return [
            prev.sup_difference / cur.sup_difference if cur.sup_difference > 0 else float("inf")
            for prev, cur in zip(self.rows, self.rows[1:])
        ]

    @property
    def orders(self) -> List[float]:
        return [log2(factor) if 0 < factor < float("inf") else float("inf") for factor in self.reduction_factors]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ray": self.ray.to_dict(),
            "system": self.system,
            "rows": [row.to_dict() for row in self.rows],
            "reduction_factors": self.reduction_factors,
            "orders": self.orders,
        }


def refinement_study(
    ray: Ray,
    steps_list: Sequence[int],
    system_type: str = DEFAULT_SYSTEM,
    workers: int = 1,
    taylor_boot: Optional[int] = None,
    progress_callback: Optional[ProgressCallback] = None,
) -> RefinementStudy:
    """Solve at each resolution and tabulate sup-norm differences on the coarse grid.

    ``progress_callback`` is called with (finished runs, total runs).
    """
    steps_list = list(steps_list)
    if len(steps_list) < 3:
        raise RayValidationError("A refinement study needs at least three step counts")
    for coarse, fine in zip(steps_list, steps_list[1:]):
        if fine != 2 * coarse:
            raise RayValidationError(
                f"Step counts must double at each level, got {coarse} then {fine}"
            )
    rays = [ray.with_steps(steps) for steps in steps_list]

    def run(target: Ray) -> RaySolution:
        return solve_ray(target, system=create_system(system_type), taylor_boot=taylor_boot)

    solutions: List[RaySolution] = []
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            futures = [executor.submit(run, target) for target in rays]
            for done, future in enumerate(futures, start=1):
                solutions.append(future.result())
                if progress_callback is not None:
                    progress_callback(done, len(rays))
    else:
        for done, target in enumerate(rays, start=1):
            solutions.append(run(target))
            if progress_callback is not None:
                progress_callback(done, len(rays))

    system = create_system(system_type)
    rows: List[RefinementRow] = []
    for coarse, fine in zip(solutions, solutions[1:]):
        difference = float(np.max(np.abs(fine.values[::2] - coarse.values)))
        exact = system.exact(fine.nodes)
        error = float(np.max(np.abs(fine.values - exact))) if exact is not None else None
        rows.append(
            RefinementRow(
                coarse_steps=len(coarse.nodes) - 1,
                fine_steps=len(fine.nodes) - 1,
                sup_difference=difference,
                exact_error=error,
            )
        )
    return RefinementStudy(ray=ray, system=system.name, rows=rows)


def _gauss_legendre_unit(m: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(m)
    return (x + 1.0) / 2.0, w / 2.0


def _barycentric_matrix(nodes: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Matrix mapping values at ``nodes`` to interpolated values at ``points``."""
    diffs = nodes[:, np.newaxis] - nodes[np.newaxis, :]
    np.fill_diagonal(diffs, 1.0)
    weights = 1.0 / np.prod(diffs, axis=1)
    matrix = np.zeros((len(points), len(nodes)))
    for row, point in enumerate(points):
        gaps = point - nodes
        hit = np.flatnonzero(gaps == 0)
        if hit.size:
            matrix[row, hit[0]] = 1.0
            continue
        terms = weights / gaps
        matrix[row] = terms / terms.sum()
    return matrix


@lru_cache(maxsize=4)
def _chen_grid(m: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    t, _ = _gauss_legendre_unit(m)
    u, w = _gauss_legendre_unit(m)
    targets = np.append(t, 1.0)
    inner = (targets[:, np.newaxis] * u[np.newaxis, :]).ravel()
    return targets, u, w, _barycentric_matrix(t, inner)


def chen_eval(
    xi: complex,
    depth: int = CHEN_DEPTH,
    nodes: int = CHEN_NODES,
    tolerance: float = CHEN_TOLERANCE,
    series_terms: int = CHEN_SERIES_TERMS,
) -> complex:
    """g(xi) from the iterated-integral expansion with gamma_hat taken from its Borel series.

    g_0 = -gamma_hat / (1 + 3 xi) and each further level applies the linear
    Volterra operator once; levels up to ``depth`` are summed. The iterated
    integrals are nested Gauss-Legendre sums on the segment [0, xi], with the
    previous level interpolated barycentrically.
    """
    from kernels.truncated_sd import borel_coefficients

    xi = complex(xi)
    coeffs = borel_coefficients(series_terms)
    derivative = np.polynomial.polynomial.polyder(coeffs)
    targets, u, w, interp = _chen_grid(nodes)
    points = xi * targets
    prefactor = -1.0 / (1.0 + 3.0 * points)

    # K[k, l]: weight of g_prev(points[k] * u[l]) in level n+1 at points[k]
    outer = points[:, np.newaxis]
    eta = outer * u[np.newaxis, :]
    lag = outer - eta
    kernel = (
        np.polynomial.polynomial.polyval(lag, coeffs)
        + 3.0 * np.polynomial.polynomial.polyval(lag, derivative) * eta
    )
    kernel = prefactor[:, np.newaxis] * outer * kernel * w[np.newaxis, :]
    operator = np.einsum("kl,klj->kj", kernel, interp.reshape(len(targets), len(u), nodes))

    level = prefactor * np.polynomial.polynomial.polyval(points, coeffs)
    total = level[-1]
    increment = total
    for _ in range(depth):
        level = operator @ level[:-1]
        increment = level[-1]
        total += increment
    if depth > 0 and abs(increment) > tolerance * max(1.0, abs(total)):
        raise ChenConvergenceError(
            f"Iterated integrals not converged at xi={xi} (last level {abs(increment):.3e} at depth {depth})"
        )
    return complex(total)
