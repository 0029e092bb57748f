"""Singularity analytics for the Borel transform of gamma.

Covers the trans-series symbol algebra, the exponents and coefficient
relations at xi = +-k/3, coefficient-ratio estimation of the nearest
singularity, and the zeta-weight bounds.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .borel import SingularForm, borel_convolve, borel_map, symbol_singular_form
from .errors import OrderError, RatioMethodError, SymbolTableError
from .mellin import ir_residue
from .scalars import NEG_INF, ZetaPoly, weight_W, weight_w, zp_evaluate
from .series import BOREL, Coefficient, FormalSeries, is_zero

GAMMA_AT_ORIGIN = Fraction(1)
GAMMA_SLOPE_AT_ORIGIN = Fraction(-2)
KNOWN_WEIGHT_DROPS = (1, 2, 4)
MIN_WINDOW_POINTS = 8


@dataclass(frozen=True)
class Symbol:
    """Trans-series symbol C with C_{n+1} = (alpha n - beta) C_n."""

    name: str
    alpha: Fraction
    beta: Fraction

    @property
    def reduced_beta(self) -> Fraction:
        return self.beta / self.alpha

    @property
    def location(self) -> Fraction:
        return 1 / self.alpha

    @property
    def start_index(self) -> int:
        """First index with C_n != 0; C is normalized to 1 there."""
        reduced = self.reduced_beta
        if reduced.denominator == 1 and reduced >= 0:
            return int(reduced) + 1
        return 0

    def coefficients(self, order: int) -> List[Fraction]:
        values = [Fraction(0)] * (order + 1)
        start = self.start_index
        if start > order:
            return values
        values[start] = Fraction(1)
        for n in range(start, order):
            values[n + 1] = (self.alpha * n - self.beta) * values[n]
        return values


SYMBOL_A = Symbol("A", Fraction(-3), Fraction(5))
SYMBOL_B = Symbol("B", Fraction(3), Fraction(0))
DEFAULT_SYMBOLS: Dict[str, Symbol] = {SYMBOL_A.name: SYMBOL_A, SYMBOL_B.name: SYMBOL_B}


@dataclass(frozen=True)
class SymbolTerm:
    """a^offset * series(a) * C."""

    series: FormalSeries
    offset: int = 0

    def normalized(self) -> "SymbolTerm":
        v = self.series.valuation()
        if v == 0 or v > self.series.order:
            return self
        trimmed = FormalSeries(self.series.coeffs[v:], order=self.series.order - v)
        return SymbolTerm(trimmed, self.offset + v)

    def aligned(self, offset: int) -> FormalSeries:
        if offset > self.offset:
            raise OrderError(f"Cannot align offset {self.offset} down to {offset}")
        return self.series.shift(self.offset - offset)

    def __add__(self, other: "SymbolTerm") -> "SymbolTerm":
        base = min(self.offset, other.offset)
        return SymbolTerm(self.aligned(base) + other.aligned(base), base).normalized()

    def times_regular(self, regular: FormalSeries) -> "SymbolTerm":
        return SymbolTerm(self.series * regular, self.offset).normalized()


@dataclass
class TransSeries:
    regular: FormalSeries
    singular: Dict[str, SymbolTerm] = field(default_factory=dict)
    symbols: Mapping[str, Symbol] = field(default_factory=lambda: dict(DEFAULT_SYMBOLS))

    @classmethod
    def bare_symbol(
        cls, symbol: Symbol, order: int, symbols: Optional[Mapping[str, Symbol]] = None
    ) -> "TransSeries":
        table = dict(symbols or DEFAULT_SYMBOLS)
        table.setdefault(symbol.name, symbol)
        return cls(
            regular=FormalSeries.zero(order),
            singular={symbol.name: SymbolTerm(FormalSeries([1], order=order))},
            symbols=table,
        )

    def symbol_part(self, name: str) -> Optional[SymbolTerm]:
        return self.singular.get(name)


def _check_tables(f: TransSeries, g: TransSeries) -> None:
    shared = set(f.symbols) & set(g.symbols)
    for name in shared:
        if f.symbols[name] != g.symbols[name]:
            raise SymbolTableError(f"Symbol {name} has different parameters in the two operands")
    for name in set(f.singular) | set(g.singular):
        if name not in f.symbols or name not in g.symbols:
            raise SymbolTableError(f"Symbol {name} is not declared in both symbol tables")


def ts_add(f: TransSeries, g: TransSeries) -> TransSeries:
    _check_tables(f, g)
    singular = dict(f.singular)
    for name, term in g.singular.items():
        singular[name] = singular[name] + term if name in singular else term
    return TransSeries(f.regular + g.regular, singular, dict(f.symbols))


def ts_mul(f: TransSeries, g: TransSeries) -> TransSeries:
    """Product with symbol-by-symbol terms dropped."""
    _check_tables(f, g)
    singular: Dict[str, SymbolTerm] = {}
    for source, other_regular in ((f.singular, g.regular), (g.singular, f.regular)):
        for name, term in source.items():
            contribution = term.times_regular(other_regular)
            singular[name] = singular[name] + contribution if name in singular else contribution
    return TransSeries(f.regular * g.regular, singular, dict(f.symbols))


def ts_euler(f: TransSeries) -> TransSeries:
    """a d/da, using alpha a^2 dC/da = (1 + beta a) C up to a finite polynomial."""
    singular: Dict[str, SymbolTerm] = {}
    for name, term in f.singular.items():
        symbol = f.symbols[name]
        s = term.series
        inner = s.scale(term.offset + symbol.reduced_beta) + s.euler()
        body = s.scale(1 / symbol.alpha) + inner.shift(1)
        singular[name] = SymbolTerm(body, term.offset - 1).normalized()
    return TransSeries(f.regular.euler(), singular, dict(f.symbols))


def ts_realize(f: TransSeries, name: str, order: int) -> FormalSeries:
    """Plain coefficients of a^offset s(a) C(a) up to ``order``; negative powers are dropped."""
    term = f.symbol_part(name)
    if term is None:
        return FormalSeries.zero(order)
    symbol = f.symbols[name]
    limit = term.offset + term.series.order + symbol.start_index
    if order > limit:
        raise OrderError(f"{name}-part is known only to a^{limit}, asked for a^{order}")
    c_values = symbol.coefficients(order - term.offset) if order >= term.offset else []
    values: List[Coefficient] = [Fraction(0)] * (order + 1)
    for i, s_i in enumerate(term.series.coeffs):
        if is_zero(s_i):
            continue
        for j, c_j in enumerate(c_values):
            power = term.offset + i + j
            if power < 0 or not c_j:
                continue
            if power > order:
                break
            values[power] = values[power] + s_i * c_j
    return FormalSeries(values, order=order)


def symbol_borel_form(symbol: Symbol, n: int) -> SingularForm:
    """Leading Borel singular form of a^n C at xi0 = 1/alpha."""
    return symbol_singular_form(n, symbol.reduced_beta, location=symbol.location)


@dataclass(frozen=True)
class Balance:
    """Leading-order balance at a singularity xi0 = sign k/3."""

    k: int
    sign: str
    location: Fraction
    exponent: Fraction
    coefficient_ratio: Optional[Fraction]

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "sign": self.sign,
            "location": str(self.location),
            "exponent": str(self.exponent),
            "coefficient_ratio": None
            if self.coefficient_ratio is None
            else str(self.coefficient_ratio),
        }


def derive_positive_balance(
    k: int,
    gamma0: Fraction = GAMMA_AT_ORIGIN,
    gamma1: Fraction = GAMMA_SLOPE_AT_ORIGIN,
) -> Balance:
    """Solve (k - 3 xi) L_k ~ (2 gamma(0) + 3 gamma'(0) xi) * primitive(L_k) at xi0 = k/3.

    With k - 3xi = -3 (xi - xi0) the balance reads -3 alpha = 2 gamma(0) + 3 gamma'(0) xi0.
    """
    if k < 1:
        raise OrderError(f"singularity index must be >= 1, got {k}")
    location = Fraction(k, 3)
    exponent = -(2 * gamma0 + 3 * gamma1 * location) / 3
    return Balance(k, "+", location, exponent, None)


def derive_negative_balance(
    k: int,
    gamma0: Fraction = GAMMA_AT_ORIGIN,
    gamma1: Fraction = GAMMA_SLOPE_AT_ORIGIN,
) -> Balance:
    """Leading balance at xi0 = -k/3 between gamma-hat and f(xi, -k/3).

    k = 1: the term linear in f dominates, beta c = 2 f and
    -3 f = c + (gamma(0) + 3 gamma'(0) xi0) f / beta.
    k >= 2: 3 (beta - 1) = -(gamma(0) + 3 gamma'(0) xi0) and the pole pair
    of P_k gives c = 2 lambda_k f / (k beta (beta - 1)), lambda_k the linear
    coefficient of P_k.
    """
    if k < 1:
        raise OrderError(f"singularity index must be >= 1, got {k}")
    location = Fraction(-k, 3)
    drift = gamma0 + 3 * gamma1 * location
    if k == 1:
        exponent = -(2 + drift) / 3
        return Balance(k, "-", location, exponent, 2 / exponent)
    exponent = 1 - drift / 3
    linear = ir_residue(k, 1).residue[1]
    ratio = 2 * linear / (k * exponent * (exponent - 1))
    return Balance(k, "-", location, exponent, ratio)


def exponent_positive(k: int) -> Fraction:
    if k < 1:
        raise OrderError(f"singularity index must be >= 1, got {k}")
    return Fraction(2 * (k - 1), 3)


def exponent_negative(k: int) -> Fraction:
    if k < 1:
        raise OrderError(f"singularity index must be >= 1, got {k}")
    if k == 1:
        return Fraction(-5, 3)
    return Fraction(-2 * (k - 1), 3)


@dataclass(frozen=True)
class ScaledCoefficient:
    """ratio * scale, with the scale kept as a symbolic token."""

    ratio: Fraction
    scale: str

    def __str__(self) -> str:
        return f"{self.ratio}*{self.scale}"


def coeff_relation_negative(k: int, scale: Optional[str] = None) -> ScaledCoefficient:
    """c_k as a multiple of the undetermined leading coefficient f_k."""
    if k < 1:
        raise OrderError(f"singularity index must be >= 1, got {k}")
    if k == 1:
        ratio = Fraction(-6, 5)
    else:
        ratio = Fraction(-9, k * (k - 1) ** 2 * (2 * k + 1))
    return ScaledCoefficient(ratio, scale or f"f_{k}")


@dataclass
class SingularityReport:
    location: complex
    exponent: float
    window: Tuple[int, int]
    residuals: List[float]
    alternating: bool
    slope: float
    intercept: float

    def to_dict(self) -> dict:
        return {
            "location": {"re": self.location.real, "im": self.location.imag},
            "exponent": self.exponent,
            "window": list(self.window),
            "residuals": list(self.residuals),
            "alternating": self.alternating,
            "max_residual": max((abs(r) for r in self.residuals), default=0.0),
        }


def _ratio(current: Coefficient, previous: Coefficient) -> float:
    if isinstance(current, ZetaPoly) or isinstance(previous, ZetaPoly):
        return zp_evaluate(current) / zp_evaluate(previous)
    if isinstance(current, Fraction) and isinstance(previous, Fraction):
        return float(current / previous)
    value = complex(current) / complex(previous)
    return value.real


def domb_sykes(series: FormalSeries, window: Optional[Tuple[int, int]] = None) -> SingularityReport:
    """Fit c_n/c_{n-1} = (1/xi0)(1 - (1 + beta)/n) by least squares in 1/n."""
    order = series.order
    n_min, n_max = window or (order // 2, order)
    n_min = max(n_min, 1)
    n_max = min(n_max, order)
    indices = list(range(n_min, n_max + 1))
    if len(indices) < MIN_WINDOW_POINTS:
        raise RatioMethodError(
            f"ratio method inapplicable: window ({n_min}, {n_max}) has fewer than "
            f"{MIN_WINDOW_POINTS} points"
        )
    ratios = []
    for n in indices:
        if is_zero(series[n]) or is_zero(series[n - 1]):
            raise RatioMethodError(f"ratio method inapplicable: zero coefficient near n={n}")
        ratios.append(_ratio(series[n], series[n - 1]))
    r = np.asarray(ratios, dtype=float)
    if not (np.all(r > 0) or np.all(r < 0)):
        raise RatioMethodError("ratio method inapplicable: coefficient signs are irregular")
    inverse_n = 1.0 / np.asarray(indices, dtype=float)
    slope, intercept = np.polyfit(inverse_n, r, 1)
    fitted = intercept + slope * inverse_n
    return SingularityReport(
        location=complex(1.0 / intercept),
        exponent=float(-slope / intercept - 1.0),
        window=(n_min, n_max),
        residuals=[float(x) for x in (r - fitted)],
        alternating=bool(np.all(r < 0)),
        slope=float(slope),
        intercept=float(intercept),
    )


def weight_of_series(f: FormalSeries) -> float:
    """W(sum a_p xi^p) = sup_p (W(a_p) - p)."""
    best = NEG_INF
    for p, a_p in enumerate(f.coeffs):
        if is_zero(a_p):
            continue
        best = max(best, weight_W(a_p) - p)
    return best


def weight_at(local: FormalSeries, exponent_offset: int = 0) -> float:
    """Weight of a local expansion sum a_p (xi - xi0)^{alpha + p} about its reference exponent."""
    return weight_of_series(local) - exponent_offset


@dataclass(frozen=True)
class WeightCheck:
    holds: bool
    bound: float
    weight: float
    witness: Optional[int] = None


def weight_convolution_check(f: FormalSeries, g: FormalSeries) -> WeightCheck:
    """Check W(f * g) <= W(f) + W(g) - 1 on Borel series."""
    f = f if f.plane == BOREL else f.with_plane(BOREL)
    g = g if g.plane == BOREL else g.with_plane(BOREL)
    bound = weight_of_series(f) + weight_of_series(g) - 1
    product = borel_convolve(f, g)
    for p, coefficient in enumerate(product.coeffs):
        if is_zero(coefficient):
            continue
        if weight_W(coefficient) - p > bound:
            return WeightCheck(False, bound, weight_of_series(product), witness=p)
    return WeightCheck(True, bound, weight_of_series(product))


@dataclass(frozen=True)
class WeightAuditRow:
    p: int
    weight: float
    expected: int
    modified_weight: float
    exception: bool

    def to_dict(self) -> dict:
        def _plain(value: float):
            return None if value == NEG_INF else int(value)

        return {
            "p": self.p,
            "w": _plain(self.weight),
            "expected": self.expected,
            "W": _plain(self.modified_weight),
            "exception": self.exception,
        }


@dataclass
class WeightAudit:
    rows: List[WeightAuditRow]
    exceptions: List[int]
    unexpected: List[int]
    saturated: List[int]

    def to_dict(self) -> dict:
        return {
            "rows": [row.to_dict() for row in self.rows],
            "exceptions": self.exceptions,
            "unexpected_exceptions": self.unexpected,
            "saturated_orders": self.saturated,
        }


def weight_audit(gamma: FormalSeries) -> WeightAudit:
    """Compare w(c_p) with p for the Borel-indexed coefficients c_p = [a^{p+1}] gamma.

    Exceptions are reported, not raised.
    """
    rows: List[WeightAuditRow] = []
    for p in range(gamma.order):
        c_p = gamma[p + 1]
        w = weight_w(c_p)
        rows.append(WeightAuditRow(p, w, p, weight_W(c_p), exception=w < p))
    exceptions = [row.p for row in rows if row.exception]
    unexpected = [p for p in exceptions if p not in KNOWN_WEIGHT_DROPS]
    saturated = [row.p for row in rows if row.modified_weight == row.p - 1]
    return WeightAudit(rows, exceptions, unexpected, saturated)


def borel_tower_weights(gammas: Sequence[FormalSeries]) -> List[float]:
    """W of the Borel image of each tower member."""
    return [weight_of_series(borel_map(g)) for g in gammas]
