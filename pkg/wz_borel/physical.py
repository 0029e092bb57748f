"""Physical-plane solvers for the anomalous dimension gamma(a).

All solvers work order by order on exact coefficients: the coefficient of
a^p only ever depends on coefficients of lower order.
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from .errors import ConfigError, ConstantTermError, OrderError, RatioMethodError
from .mellin import h_taylor, uv_residue
from .scalars import ZetaPoly, zp_evaluate
from .series import BiSeries, Coefficient, FormalSeries, is_zero

CONVENTION_APPROX = "approx-system"
CONVENTION_UV_RESIDUE = "uv-residue"
CONVENTION_POLE = "pole"

MIN_RATIO_COEFFICIENTS = 10

OrderCallback = Callable[[int, List[Coefficient]], None]


@dataclass
class GammaTower:
    gammas: List[FormalSeries]

    @property
    def depth(self) -> int:
        return len(self.gammas)

    @property
    def order(self) -> int:
        return min(g.order for g in self.gammas)

    def __getitem__(self, k: int) -> FormalSeries:
        if k < 1 or k > len(self.gammas):
            raise OrderError(f"Tower holds gamma_1..gamma_{len(self.gammas)}, asked for {k}")
        return self.gammas[k - 1]


def _require_no_constant(gamma: FormalSeries) -> None:
    if not is_zero(gamma[0]):
        raise ConstantTermError("gamma must be O(a): constant term is nonzero")


def rg_tower(gamma: FormalSeries, depth: int, common_order: bool = False) -> GammaTower:
    """gamma_1 = gamma, gamma_{k+1} = gamma (1 + 3 a d/da) gamma_k.

    Each gamma_k keeps the natural truncation order of the product; with
    ``common_order`` every member is truncated to the order of gamma.
    """
    if depth < 1:
        raise OrderError(f"Tower depth must be >= 1, got {depth}")
    _require_no_constant(gamma)
    gammas = [gamma]
    for _ in range(depth - 1):
        previous = gammas[-1]
        gammas.append(gamma * (previous + previous.euler().scale(3)))
    if common_order:
        gammas = [
            g.truncate(gamma.order) if g.order > gamma.order else g for g in gammas
        ]
    return GammaTower(gammas)


class TowerTable:
    """Incremental coefficient table T[k][q] = [a^q] gamma_k.

    Appending c_p completes column p of every row, which is all sd_solve needs
    to reach the next order.
    """

    def __init__(self) -> None:
        self.coefficients: List[Coefficient] = [Fraction(0)]
        self.rows: List[List[Coefficient]] = [[Fraction(1)]]

    @property
    def completed_order(self) -> int:
        return len(self.coefficients) - 1

    def entry(self, k: int, q: int) -> Coefficient:
        if k == 0:
            return Fraction(1) if q == 0 else Fraction(0)
        if q < k or k >= len(self.rows):
            return Fraction(0)
        return self.rows[k][q]

    def append(self, c_p: Coefficient) -> None:
        p = len(self.coefficients)
        self.coefficients.append(c_p)
        self.rows[0].append(Fraction(0))
        if len(self.rows) <= p:
            self.rows.append([Fraction(0)] * p)
        self.rows[1].append(c_p)
        for k in range(1, p):
            total: Coefficient = Fraction(0)
            for i in range(1, p - k + 1):
                c_i = self.coefficients[i]
                t = self.entry(k, p - i)
                if is_zero(c_i) or is_zero(t):
                    continue
                total = total + c_i * t * (1 + 3 * (p - i))
            self.rows[k + 1].append(total)

    def row(self, k: int, order: int) -> FormalSeries:
        return FormalSeries([self.entry(k, q) for q in range(order + 1)], order=order)


def _pair_sum(table: TowerTable, n: int, m: int, degree: int) -> Coefficient:
    total: Coefficient = Fraction(0)
    for i in range(n, degree - m + 1):
        left = table.entry(n, i)
        right = table.entry(m, degree - i)
        if is_zero(left) or is_zero(right):
            continue
        total = total + left * right
    return total


def sd_solve(
    order: int,
    kernel: Optional[BiSeries] = None,
    on_order: Optional[OrderCallback] = None,
    initial: Optional[Sequence[Coefficient]] = None,
) -> FormalSeries:
    """Solve gamma = a sum_{n,m} h_{n,m} gamma_n gamma_m to order a^order.

    ``kernel`` defaults to the exact Mellin Taylor data; ``initial`` holds
    c_1..c_q from an earlier run to resume from.
    """
    if order < 1:
        raise OrderError(f"sd_solve needs order >= 1, got {order}")
    if kernel is None:
        kernel = h_taylor(order - 1)
    if kernel.order < order - 1:
        raise OrderError(
            f"Kernel of total degree {kernel.order} cannot reach order a^{order}"
        )
    symmetric = kernel.is_symmetric()
    table = TowerTable()
    for coefficient in list(initial or [])[:order]:
        table.append(coefficient)

    for p in range(table.completed_order + 1, order + 1):
        degree = p - 1
        total: Coefficient = Fraction(0)
        for n in range(degree + 1):
            m_start = n if symmetric else 0
            for m in range(m_start, degree - n + 1):
                h = kernel.coefficient(n, m)
                if is_zero(h):
                    continue
                pair = _pair_sum(table, n, m, degree)
                if is_zero(pair):
                    continue
                weight = 2 if symmetric and m != n else 1
                total = total + h * pair * weight
        table.append(total)
        if on_order is not None:
            on_order(p, list(table.coefficients[1:]))

    return FormalSeries(table.coefficients[: order + 1], order=order)


def approx_solve(order: int) -> Tuple[FormalSeries, FormalSeries, FormalSeries]:
    """Order-by-order solution of the three coupled equations

    F = 1 - gamma (3a d/da + 1) F
    L = gamma^2 + gamma (3a d/da + 2) L
    gamma = 2aF - a - 2a gamma (F - 1) + a (L - gamma^2) / 2
    """
    if order < 1:
        raise OrderError(f"approx_solve needs order >= 1, got {order}")
    c: List[Fraction] = [Fraction(0)]
    f: List[Fraction] = [Fraction(1)]
    l: List[Fraction] = [Fraction(0)]
    half = Fraction(1, 2)
    for n in range(1, order + 1):
        c_n = 2 * f[n - 1] - (1 if n == 1 else 0) + half * l[n - 1]
        for i in range(1, n - 1):
            c_n -= 2 * c[i] * f[n - 1 - i] + half * c[i] * c[n - 1 - i]
        c.append(c_n)
        f.append(-sum((c[i] * (3 * (n - i) + 1) * f[n - i] for i in range(1, n + 1)), Fraction(0)))
        l.append(
            sum((c[i] * c[n - i] for i in range(1, n)), Fraction(0))
            + sum((c[i] * (3 * (n - i) + 2) * l[n - i] for i in range(1, n + 1)), Fraction(0))
        )
    return (
        FormalSeries(f, order=order, convention=CONVENTION_APPROX),
        FormalSeries(l, order=order, convention=CONVENTION_APPROX),
        FormalSeries(c, order=order),
    )


def lk_tower(k: int, gamma: FormalSeries, order: int) -> FormalSeries:
    """Solve (k - 2 gamma - 3 gamma a d/da) L_k = sum_i q_{k,i} gamma_i^2."""
    if k < 1:
        raise OrderError(f"UV pole index must be >= 1, got {k}")
    if gamma.order < order - 1:
        raise OrderError(f"gamma known to a^{gamma.order}, L_{k} to a^{order} needs a^{order - 1}")
    _require_no_constant(gamma)
    q = uv_residue(k).residue
    tower = rg_tower(gamma, k)
    source = FormalSeries.zero(order)
    for i in range(1, min(k, q.order) + 1):
        if is_zero(q[i]):
            continue
        square = tower[i].mul(tower[i], order=order)
        source = source + square.scale(q[i])
    c = gamma.coeffs
    values: List[Coefficient] = []
    for n in range(order + 1):
        total = source[n]
        for j in range(1, min(n, gamma.order) + 1):
            if is_zero(c[j]) or is_zero(values[n - j]):
                continue
            total = total + c[j] * values[n - j] * (2 + 3 * (n - j))
        values.append(total / k)
    return FormalSeries(values, order=order, convention=CONVENTION_UV_RESIDUE)


def to_approx_normalization(l_1: FormalSeries) -> FormalSeries:
    """Convert L_1 of the UV-residue equation to the L of the coupled system."""
    if l_1.convention not in (None, CONVENTION_UV_RESIDUE):
        raise ConfigError(f"Expected a {CONVENTION_UV_RESIDUE} series, got {l_1.convention}")
    return l_1.scale(2).with_convention(CONVENTION_APPROX)


def fk_tower(k: int, gamma: FormalSeries, order: int) -> FormalSeries:
    """Solve gamma (1 + 3a d/da) F_k = -k F_k + 1; F_k(0) = 1/k."""
    if k < 1:
        raise OrderError(f"IR pole index must be >= 1, got {k}")
    if gamma.order < order:
        raise OrderError(f"gamma known to a^{gamma.order}, F_{k} needs a^{order}")
    _require_no_constant(gamma)
    c = gamma.coeffs
    inverse_k = Fraction(1, k)
    values: List[Coefficient] = [inverse_k]
    for n in range(1, order + 1):
        total: Coefficient = Fraction(0)
        for j in range(1, n + 1):
            if is_zero(c[j]) or is_zero(values[n - j]):
                continue
            total = total + c[j] * values[n - j] * (1 + 3 * (n - j))
        values.append(-total * inverse_k)
    return FormalSeries(values, order=order, convention=CONVENTION_POLE)


def fk_from_tower(k: int, tower: GammaTower) -> FormalSeries:
    """F_k = (1/k)(1 + sum_n (-1/k)^n gamma_n) from an RG tower."""
    order = tower.order
    if tower.depth < order:
        raise OrderError(f"Tower depth {tower.depth} is too shallow for order {order}")
    total = FormalSeries([Fraction(1)], order=order)
    for n in range(1, order + 1):
        member = tower[n]
        if member.order > order:
            member = member.truncate(order)
        total = total + member.scale(Fraction(-1, k) ** n)
    return total.scale(Fraction(1, k)).with_convention(CONVENTION_POLE)


def ode_reference(order: int) -> FormalSeries:
    """Solve gamma = a - a gamma + 2 gamma^2 - 3 a gamma gamma'."""
    if order < 1:
        raise OrderError(f"ode_reference needs order >= 1, got {order}")
    c: List[Fraction] = [Fraction(0)]
    for n in range(1, order + 1):
        value = Fraction(1 if n == 1 else 0) - c[n - 1]
        for i in range(1, n):
            value += (2 - 3 * (n - i)) * c[i] * c[n - i]
        c.append(value)
    return FormalSeries(c, order=order)


@dataclass(frozen=True)
class AffineLaw:
    slope: Fraction
    intercept: Fraction
    text: str = ""

    def __call__(self, n: int) -> Fraction:
        return self.slope * n + self.intercept

    def __str__(self) -> str:
        if self.text:
            return self.text
        sign = "-" if self.intercept < 0 else "+"
        return f"{self.slope}n{sign}{abs(self.intercept)}"


_LAW_TERM = re.compile(r"([+-]?)(\d*(?:/\d+)?)(n?)")


def parse_law(text: str) -> AffineLaw:
    """Parse affine n-laws such as ``-(3n+2)``, ``3n``, ``2`` or ``3n-1``."""
    compact = text.replace(" ", "").replace("*", "")
    if not compact:
        raise ConfigError("Empty ratio law")
    sign = 1
    body = compact
    if body.startswith("-(") and body.endswith(")"):
        sign, body = -1, body[2:-1]
    elif body.startswith("(") and body.endswith(")"):
        body = body[1:-1]
    slope = Fraction(0)
    intercept = Fraction(0)
    position = 0
    while position < len(body):
        match = _LAW_TERM.match(body, position)
        if match is None or match.end() == position:
            raise ConfigError(f"Cannot parse ratio law: {text!r}")
        term_sign, digits, variable = match.groups()
        if not digits and not variable:
            raise ConfigError(f"Cannot parse ratio law: {text!r}")
        value = Fraction(digits) if digits else Fraction(1)
        if term_sign == "-":
            value = -value
        if variable:
            slope += value
        else:
            intercept += value
        position = match.end()
    return AffineLaw(sign * slope, sign * intercept, text)


@dataclass(frozen=True)
class RatioRow:
    n: int
    ratio: Optional[float]
    predicted: float
    deviation: Optional[float]
    gap: bool = False

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "ratio": self.ratio,
            "predicted": self.predicted,
            "deviation": self.deviation,
            "gap": self.gap,
        }


def _exact_or_float(value: Coefficient):
    if isinstance(value, ZetaPoly):
        return value.constant_term() if value.is_constant() else zp_evaluate(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, complex):
        return value.real
    return value


def _longest_nonzero_run(coeffs: Sequence[Coefficient]) -> int:
    best = run = 0
    for c in coeffs:
        run = 0 if is_zero(c) else run + 1
        best = max(best, run)
    return best


def ratio_table(series: FormalSeries, law: AffineLaw, start: int = 1) -> List[RatioRow]:
    """Tabulate c_{n+1}/c_n against the affine prediction law(n)."""
    run = _longest_nonzero_run(series.coeffs)
    if run < MIN_RATIO_COEFFICIENTS:
        raise RatioMethodError(
            f"ratio method inapplicable: longest run of consecutive nonzero "
            f"coefficients is {run}, need {MIN_RATIO_COEFFICIENTS}"
        )
    rows: List[RatioRow] = []
    for n in range(start, series.order):
        predicted = float(law(n))
        current = _exact_or_float(series[n])
        following = _exact_or_float(series[n + 1])
        if not current or not following:
            rows.append(RatioRow(n, None, predicted, None, gap=True))
            continue
        ratio = float(following / current)
        scale = abs(predicted) if predicted else 1.0
        rows.append(RatioRow(n, ratio, predicted, abs(ratio - predicted) / scale))
    return rows
