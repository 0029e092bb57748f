"""Truncated formal power series over exact or complex coefficient rings.

A ``FormalSeries`` stores c_0..c_N together with its truncation order N; every
coefficient up to N is known exactly, nothing beyond N is claimed. The
coefficient ring is whatever the entries are: ``Fraction``, ``ZetaPoly`` or
``complex``.
"""

from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .errors import ConstantTermError, OrderError, PlaneMismatchError
from .scalars import ZetaPoly, zp_evaluate, zp_to_json

PHYSICAL = "physical"
BOREL = "borel"
PLANES = (PHYSICAL, BOREL)

Coefficient = Any
_SCALAR_TYPES = (int, Fraction, float, complex, ZetaPoly)


def _normalize(value: Coefficient) -> Coefficient:
    if isinstance(value, bool):
        raise TypeError("bool is not a series coefficient")
    if isinstance(value, int):
        return Fraction(value)
    return value


def is_zero(value: Coefficient) -> bool:
    return not value


def _divide(value: Coefficient, divisor: int) -> Coefficient:
    if isinstance(value, Fraction):
        return value / Fraction(divisor)
    return value / divisor


class FormalSeries:
    """Truncated series c_0 + c_1 t + ... + c_N t^N with explicit order N."""

    __slots__ = ("_coeffs", "_order", "_plane", "_convention")

    def __init__(
        self,
        coeffs: Iterable[Coefficient],
        order: Optional[int] = None,
        plane: str = PHYSICAL,
        convention: Optional[str] = None,
    ):
        values = [_normalize(c) for c in coeffs]
        if order is None:
            order = len(values) - 1
        if order < 0:
            raise OrderError(f"Truncation order must be >= 0, got {order}")
        if plane not in PLANES:
            raise ValueError(f"Unknown plane tag: {plane}")
        if len(values) > order + 1:
            values = values[: order + 1]
        values.extend(Fraction(0) for _ in range(order + 1 - len(values)))
        self._coeffs: Tuple[Coefficient, ...] = tuple(values)
        self._order = order
        self._plane = plane
        self._convention = convention

    @classmethod
    def zero(cls, order: int, plane: str = PHYSICAL) -> "FormalSeries":
        return cls([], order=order, plane=plane)

    @classmethod
    def monomial(
        cls, power: int, order: int, coeff: Coefficient = 1, plane: str = PHYSICAL
    ) -> "FormalSeries":
        values: List[Coefficient] = [Fraction(0)] * (order + 1)
        if power <= order:
            values[power] = coeff
        return cls(values, order=order, plane=plane)

    @property
    def coeffs(self) -> Tuple[Coefficient, ...]:
        return self._coeffs

    @property
    def order(self) -> int:
        return self._order

    @property
    def plane(self) -> str:
        return self._plane

    @property
    def convention(self) -> Optional[str]:
        return self._convention

    def with_convention(self, convention: Optional[str]) -> "FormalSeries":
        return FormalSeries(self._coeffs, self._order, self._plane, convention)

    def with_plane(self, plane: str) -> "FormalSeries":
        return FormalSeries(self._coeffs, self._order, plane, self._convention)

    def __len__(self) -> int:
        return self._order + 1

    def __iter__(self) -> Iterator[Coefficient]:
        return iter(self._coeffs)

    def __getitem__(self, index: int) -> Coefficient:
        if index < 0 or index > self._order:
            raise OrderError(
                f"Coefficient {index} is outside the truncation order {self._order}"
            )
        return self._coeffs[index]

    def coefficient(self, index: int) -> Coefficient:
        return self[index]

    def valuation(self) -> int:
        """Index of the first nonzero coefficient; order+1 for a zero series."""
        for index, value in enumerate(self._coeffs):
            if not is_zero(value):
                return index
        return self._order + 1

    def is_zero(self) -> bool:
        return self.valuation() > self._order

    def _check_plane(self, other: "FormalSeries") -> None:
        if self._plane != other._plane:
            raise PlaneMismatchError(
                f"Cannot combine a {self._plane}-plane series with a {other._plane}-plane series"
            )

    def _combine_convention(self, other: "FormalSeries") -> Optional[str]:
        return self._convention if self._convention == other._convention else None

    def __neg__(self) -> "FormalSeries":
        return FormalSeries([-c for c in self._coeffs], self._order, self._plane, self._convention)

    def __add__(self, other: object) -> "FormalSeries":
        if not isinstance(other, FormalSeries):
            if isinstance(other, _SCALAR_TYPES):
                values = list(self._coeffs)
                values[0] = values[0] + other
                return FormalSeries(values, self._order, self._plane, self._convention)
            return NotImplemented
        self._check_plane(other)
        order = min(self._order, other._order)
        return FormalSeries(
            [self._coeffs[i] + other._coeffs[i] for i in range(order + 1)],
            order,
            self._plane,
            self._combine_convention(other),
        )

    __radd__ = __add__

    def __sub__(self, other: object) -> "FormalSeries":
        if isinstance(other, FormalSeries):
            return self + (-other)
        if isinstance(other, _SCALAR_TYPES):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other: object) -> "FormalSeries":
        return (-self) + other

    def scale(self, factor: Coefficient) -> "FormalSeries":
        factor = _normalize(factor)
        return FormalSeries(
            [c * factor for c in self._coeffs], self._order, self._plane, self._convention
        )

    def product_order(self, other: "FormalSeries") -> int:
        """Order of validity of a truncated product: min(N_f + v_g, N_g + v_f)."""
        return min(self._order + other.valuation(), other._order + self.valuation())

    def __mul__(self, other: object) -> "FormalSeries":
        if not isinstance(other, FormalSeries):
            if isinstance(other, _SCALAR_TYPES):
                return self.scale(other)
            return NotImplemented
        self._check_plane(other)
        return self.mul(other)

    __rmul__ = __mul__

    def mul(self, other: "FormalSeries", order: Optional[int] = None) -> "FormalSeries":
        self._check_plane(other)
        natural = self.product_order(other)
        order = natural if order is None else min(order, natural)
        left_v = self.valuation()
        right_v = other.valuation()
        values: List[Coefficient] = []
        for n in range(order + 1):
            total: Coefficient = Fraction(0)
            for i in range(left_v, n - right_v + 1):
                left = self._coeffs[i] if i <= self._order else None
                right = other._coeffs[n - i] if n - i <= other._order else None
                if left is None or right is None or is_zero(left) or is_zero(right):
                    continue
                total = total + left * right
            values.append(total)
        return FormalSeries(values, order, self._plane, self._combine_convention(other))

    def truncate(self, order: int) -> "FormalSeries":
        if order > self._order:
            raise OrderError(
                f"Cannot raise truncation order from {self._order} to {order}"
            )
        return FormalSeries(self._coeffs[: order + 1], order, self._plane, self._convention)

    def euler(self) -> "FormalSeries":
        """t d/dt: coefficient n becomes n*c_n."""
        return FormalSeries(
            [c * n for n, c in enumerate(self._coeffs)],
            self._order,
            self._plane,
            self._convention,
        )

    def derivative(self) -> "FormalSeries":
        if self._order == 0:
            return FormalSeries([Fraction(0)], 0, self._plane, self._convention)
        return FormalSeries(
            [self._coeffs[n] * n for n in range(1, self._order + 1)],
            self._order - 1,
            self._plane,
            self._convention,
        )

    def shift(self, power: int) -> "FormalSeries":
        """Multiply by t^power (power >= 0)."""
        if power < 0:
            raise OrderError(f"shift power must be >= 0, got {power}")
        return FormalSeries(
            [Fraction(0)] * power + list(self._coeffs),
            self._order + power,
            self._plane,
            self._convention,
        )

    def substitute_power(self, power: int) -> "FormalSeries":
        """Replace t by t^power."""
        if power < 1:
            raise OrderError(f"substitution power must be >= 1, got {power}")
        order = power * (self._order + 1) - 1
        values: List[Coefficient] = [Fraction(0)] * (order + 1)
        for n, c in enumerate(self._coeffs):
            values[n * power] = c
        return FormalSeries(values, order, self._plane, self._convention)

    def exp(self) -> "FormalSeries":
        """exp(f) from (exp f)' = f' exp f."""
        if not is_zero(self._coeffs[0]):
            raise ConstantTermError("exp requires zero constant term")
        values: List[Coefficient] = [Fraction(1)]
        for n in range(1, self._order + 1):
            total: Coefficient = Fraction(0)
            for k in range(1, n + 1):
                if not is_zero(self._coeffs[k]):
                    total = total + self._coeffs[k] * values[n - k] * k
            values.append(_divide(total, n))
        return FormalSeries(values, self._order, self._plane, self._convention)

    def evaluate(self, point: complex) -> complex:
        """Numeric Horner evaluation; coefficients must be numeric or rational."""
        total = 0j
        for c in reversed(self._coeffs):
            numeric = zp_evaluate(c) if isinstance(c, (ZetaPoly, Fraction)) else complex(c)
            total = total * point + numeric
        return total

    def map_coefficients(self, func: Callable[[Coefficient], Coefficient]) -> "FormalSeries":
        return FormalSeries(
            [func(c) for c in self._coeffs], self._order, self._plane, self._convention
        )

    def to_complex(self) -> List[complex]:
        return [
            zp_evaluate(c) if isinstance(c, (ZetaPoly, Fraction)) else complex(c)
            for c in self._coeffs
        ]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FormalSeries):
            return NotImplemented
        return (
            self._order == other._order
            and self._plane == other._plane
            and all(a == b for a, b in zip(self._coeffs, other._coeffs))
        )

    def __hash__(self) -> int:
        return hash((self._order, self._plane, self._coeffs))

    def __repr__(self) -> str:
        shown = ", ".join(str(c) for c in self._coeffs[:8])
        tail = ", ..." if self._order >= 8 else ""
        return f"FormalSeries([{shown}{tail}], order={self._order}, plane={self._plane!r})"


def fs_arith(
    op: str,
    lhs: FormalSeries,
    rhs: Any = None,
) -> FormalSeries:
    """Dispatch for add, mul, scale, compose-with-power and truncate."""
    if op == "add":
        return lhs + rhs
    if op == "mul":
        return lhs * rhs
    if op == "scale":
        return lhs.scale(rhs)
    if op in ("compose", "compose-with-power"):
        return lhs.substitute_power(int(rhs))
    if op == "truncate":
        return lhs.truncate(int(rhs))
    raise ValueError(f"Unknown series operation: {op}")


def euler(f: FormalSeries) -> FormalSeries:
    return f.euler()


def fs_exp(f: FormalSeries) -> FormalSeries:
    return f.exp()


def valuation(f: FormalSeries) -> int:
    return f.valuation()


class BiSeries:
    """Triangular bivariate series h_{m,n} x^m y^n for m+n <= N."""

    __slots__ = ("_rows", "_order")

    def __init__(
        self,
        coeffs: Optional[Dict[Tuple[int, int], Coefficient]] = None,
        order: int = 0,
    ):
        if order < 0:
            raise OrderError(f"Truncation order must be >= 0, got {order}")
        rows: List[List[Coefficient]] = [
            [Fraction(0)] * (order + 1 - m) for m in range(order + 1)
        ]
        for (m, n), value in (coeffs or {}).items():
            if m < 0 or n < 0:
                raise OrderError(f"Negative bidegree ({m}, {n})")
            if m + n <= order:
                rows[m][n] = _normalize(value)
        self._rows = tuple(tuple(row) for row in rows)
        self._order = order

    @classmethod
    def _from_rows(cls, rows: Sequence[Sequence[Coefficient]], order: int) -> "BiSeries":
        series = cls.__new__(cls)
        series._rows = tuple(tuple(row) for row in rows)
        series._order = order
        return series

    @classmethod
    def constant(cls, value: Coefficient, order: int) -> "BiSeries":
        return cls({(0, 0): value}, order)

    @classmethod
    def of_sum(cls, f: FormalSeries, order: Optional[int] = None) -> "BiSeries":
        """The bivariate series f(x + y)."""
        order = f.order if order is None else min(order, f.order)
        rows = []
        for m in range(order + 1):
            row = []
            for n in range(order + 1 - m):
                row.append(f[m + n] * _binomial(m + n, m))
            rows.append(row)
        return cls._from_rows(rows, order)

    @classmethod
    def of_x(cls, f: FormalSeries, order: Optional[int] = None) -> "BiSeries":
        order = f.order if order is None else min(order, f.order)
        return cls({(m, 0): f[m] for m in range(order + 1)}, order)

    @classmethod
    def of_y(cls, f: FormalSeries, order: Optional[int] = None) -> "BiSeries":
        order = f.order if order is None else min(order, f.order)
        return cls({(0, n): f[n] for n in range(order + 1)}, order)

    @property
    def order(self) -> int:
        return self._order

    def coefficient(self, m: int, n: int) -> Coefficient:
        if m < 0 or n < 0 or m + n > self._order:
            raise OrderError(
                f"Bidegree ({m}, {n}) is outside the truncation order {self._order}"
            )
        return self._rows[m][n]

    def __getitem__(self, key: Tuple[int, int]) -> Coefficient:
        return self.coefficient(*key)

    def items(self) -> Iterator[Tuple[int, int, Coefficient]]:
        """Yield (m, n, h_mn) by total degree, then by m."""
        for degree in range(self._order + 1):
            for m in range(degree, -1, -1):
                yield m, degree - m, self._rows[m][degree - m]

    def homogeneous_part(self, degree: int) -> List[Coefficient]:
        """[h_{degree,0}, h_{degree-1,1}, ..., h_{0,degree}]."""
        return [self._rows[degree - j][j] for j in range(degree + 1)]

    def is_symmetric(self) -> bool:
        return all(
            self._rows[m][n] == self._rows[n][m]
            for m in range(self._order + 1)
            for n in range(m + 1, self._order + 1 - m)
        )

    def eval_partial(self, m: int, n: int) -> Coefficient:
        """Mixed derivative d^m/dx^m d^n/dy^n at the origin: m! n! h_mn."""
        return self.coefficient(m, n) * (_factorial(m) * _factorial(n))

    def __neg__(self) -> "BiSeries":
        return BiSeries._from_rows([[-c for c in row] for row in self._rows], self._order)

    def __add__(self, other: "BiSeries") -> "BiSeries":
        if not isinstance(other, BiSeries):
            return NotImplemented
        order = min(self._order, other._order)
        return BiSeries._from_rows(
            [
                [self._rows[m][n] + other._rows[m][n] for n in range(order + 1 - m)]
                for m in range(order + 1)
            ],
            order,
        )

    def __sub__(self, other: "BiSeries") -> "BiSeries":
        if not isinstance(other, BiSeries):
            return NotImplemented
        return self + (-other)

    def scale(self, factor: Coefficient) -> "BiSeries":
        factor = _normalize(factor)
        return BiSeries._from_rows([[c * factor for c in row] for row in self._rows], self._order)

    def __mul__(self, other: object) -> "BiSeries":
        if not isinstance(other, BiSeries):
            if isinstance(other, _SCALAR_TYPES):
                return self.scale(other)
            return NotImplemented
        order = min(self._order, other._order)
        rows = [[Fraction(0)] * (order + 1 - m) for m in range(order + 1)]
        left_terms = [(m, n, c) for m, n, c in self.items() if m + n <= order and not is_zero(c)]
        right_terms = [(m, n, c) for m, n, c in other.items() if m + n <= order and not is_zero(c)]
        for m1, n1, c1 in left_terms:
            for m2, n2, c2 in right_terms:
                if m1 + n1 + m2 + n2 > order:
                    continue
                rows[m1 + m2][n1 + n2] = rows[m1 + m2][n1 + n2] + c1 * c2
        return BiSeries._from_rows(rows, order)

    __rmul__ = __mul__

    def exp(self) -> "BiSeries":
        """exp by the total-degree recurrence D exp(F) = D(F) exp(F)."""
        if not is_zero(self._rows[0][0]):
            raise ConstantTermError("exp requires zero constant term")
        order = self._order
        parts: List[List[Coefficient]] = [[Fraction(1)]]
        source = [self.homogeneous_part(d) for d in range(order + 1)]
        for degree in range(1, order + 1):
            accum: List[Coefficient] = [Fraction(0)] * (degree + 1)
            for j in range(1, degree + 1):
                f_part = source[j]
                e_part = parts[degree - j]
                for a, f_coeff in enumerate(f_part):
                    if is_zero(f_coeff):
                        continue
                    weighted = f_coeff * j
                    for b, e_coeff in enumerate(e_part):
                        if is_zero(e_coeff):
                            continue
                        accum[a + b] = accum[a + b] + weighted * e_coeff
            parts.append([_divide(c, degree) for c in accum])
        rows = [[Fraction(0)] * (order + 1 - m) for m in range(order + 1)]
        for degree, part in enumerate(parts):
            for j, value in enumerate(part):
                rows[degree - j][j] = value
        return BiSeries._from_rows(rows, order)

    def evaluate(self, x: complex, y: complex) -> complex:
        total = 0j
        for m, n, c in self.items():
            if is_zero(c):
                continue
            numeric = zp_evaluate(c) if isinstance(c, (ZetaPoly, Fraction)) else complex(c)
            total += numeric * (x ** m) * (y ** n)
        return total

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BiSeries):
            return NotImplemented
        return self._order == other._order and all(
            a == b for ra, rb in zip(self._rows, other._rows) for a, b in zip(ra, rb)
        )

    def __hash__(self) -> int:
        return hash((self._order, self._rows))

    def __repr__(self) -> str:
        return f"BiSeries(order={self._order})"


def bis_eval_partial(h: BiSeries, m: int, n: int) -> Coefficient:
    return h.eval_partial(m, n)


_FACTORIALS: List[int] = [1]


def _factorial(n: int) -> int:
    while len(_FACTORIALS) <= n:
        _FACTORIALS.append(_FACTORIALS[-1] * len(_FACTORIALS))
    return _FACTORIALS[n]


def _binomial(n: int, k: int) -> int:
    return _factorial(n) // (_factorial(k) * _factorial(n - k))


def format_coefficient(value: Coefficient) -> str:
    """Locale-independent text form: "p/q" for rationals, repr for floats."""
    if isinstance(value, ZetaPoly):
        if value.is_constant():
            return format_coefficient(value.constant_term())
        return str(value)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, complex):
        if value.imag == 0:
            return repr(value.real)
        return f"{value.real!r}{value.imag:+}j"
    return str(value)


def series_to_csv_rows(f: FormalSeries) -> List[List[str]]:
    rows = [["n", "coefficient"]]
    for n, c in enumerate(f.coeffs):
        rows.append([str(n), format_coefficient(c)])
    return rows


def coefficient_to_json(value: Coefficient) -> Any:
    if isinstance(value, (ZetaPoly, Fraction)):
        return zp_to_json(value)
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    return value


def series_to_json(f: FormalSeries) -> Dict[str, Any]:
    return {
        "order": f.order,
        "plane": f.plane,
        "convention": f.convention,
        "coefficients": [coefficient_to_json(c) for c in f.coeffs],
    }
