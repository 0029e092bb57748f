"""Exact scalars: rationals and polynomials in odd zeta values.

Zeta values are opaque generators. Nothing in this module substitutes a
floating approximation except ``zp_evaluate``, which exists for numeric
diagnostics only.
"""

from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Mapping, Optional, Tuple, Union

from scipy.special import zeta as _zeta_function

from .errors import ZetaIndexError
from .runtime import resolve_max_zeta_index

Rational = Fraction
Monomial = Tuple[Tuple[int, int], ...]
Scalar = Union[int, Fraction]

NEG_INF = float("-inf")
UNIT_MONOMIAL: Monomial = ()

_max_zeta_index = resolve_max_zeta_index()


def get_max_zeta_index() -> int:
    return _max_zeta_index


def set_max_zeta_index(value: int) -> None:
    global _max_zeta_index
    if value < 3:
        raise ZetaIndexError(f"Zeta index cap must be >= 3, got {value}")
    _max_zeta_index = value


def _check_index(index: int) -> None:
    if index < 3 or index % 2 == 0:
        raise ZetaIndexError(f"Only odd zeta values zeta(k), k >= 3, are generators: got {index}")
    if index > _max_zeta_index:
        raise ZetaIndexError(
            f"zeta({index}) exceeds the configured maximum zeta index {_max_zeta_index}"
        )


def _canonical_monomial(exponents: Mapping[int, int]) -> Monomial:
    items = []
    for index, power in sorted(exponents.items()):
        if power < 0:
            raise ZetaIndexError(f"Negative exponent {power} for zeta({index})")
        if power:
            _check_index(index)
            items.append((index, power))
    return tuple(items)


def _monomial_product(left: Monomial, right: Monomial) -> Monomial:
    if not left:
        return right
    if not right:
        return left
    merged: Dict[int, int] = dict(left)
    for index, power in right:
        merged[index] = merged.get(index, 0) + power
    return tuple(sorted(merged.items()))


def monomial_weight_w(monomial: Monomial) -> int:
    return sum(index * power for index, power in monomial)


def monomial_weight_W(monomial: Monomial) -> int:
    return sum((index - 1) * power for index, power in monomial)


def _monomial_sort_key(monomial: Monomial) -> Tuple[int, Tuple[int, ...]]:
    indices = tuple(index for index, power in monomial for _ in range(power))
    return monomial_weight_w(monomial), indices


class ZetaPoly:
    """Polynomial in odd zeta values with exact rational coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Mapping[Monomial, Scalar]] = None):
        cleaned: Dict[Monomial, Fraction] = {}
        for monomial, coeff in (terms or {}).items():
            value = Fraction(coeff)
            if value:
                cleaned[monomial] = cleaned.get(monomial, Fraction(0)) + value
        self._terms = {m: c for m, c in cleaned.items() if c}
        self._hash: Optional[int] = None

    @classmethod
    def _from_clean(cls, terms: Dict[Monomial, Fraction]) -> "ZetaPoly":
        poly = cls.__new__(cls)
        poly._terms = terms
        poly._hash = None
        return poly

    @classmethod
    def constant(cls, value: Scalar) -> "ZetaPoly":
        return cls({UNIT_MONOMIAL: value})

    @classmethod
    def monomial(cls, exponents: Mapping[int, int], coeff: Scalar = 1) -> "ZetaPoly":
        return cls({_canonical_monomial(exponents): coeff})

    @property
    def terms(self) -> Tuple[Tuple[Monomial, Fraction], ...]:
        """Terms in canonical order: graded by w-weight, then by index list."""
        return tuple(
            (monomial, self._terms[monomial])
            for monomial in sorted(self._terms, key=_monomial_sort_key)
        )

    def is_constant(self) -> bool:
        return all(not monomial for monomial in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get(UNIT_MONOMIAL, Fraction(0))

    def zeta_indices(self) -> Tuple[int, ...]:
        return tuple(sorted({index for monomial in self._terms for index, _ in monomial}))

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __neg__(self) -> "ZetaPoly":
        return ZetaPoly._from_clean({m: -c for m, c in self._terms.items()})

    def __add__(self, other: object) -> "ZetaPoly":
        other_terms = _coerce_terms(other)
        if other_terms is None:
            return NotImplemented
        result = dict(self._terms)
        for monomial, coeff in other_terms.items():
            value = result.get(monomial, Fraction(0)) + coeff
            if value:
                result[monomial] = value
            else:
                result.pop(monomial, None)
        return ZetaPoly._from_clean(result)

    __radd__ = __add__

    def __sub__(self, other: object) -> "ZetaPoly":
        other_terms = _coerce_terms(other)
        if other_terms is None:
            return NotImplemented
        return self + ZetaPoly._from_clean({m: -c for m, c in other_terms.items()})

    def __rsub__(self, other: object) -> "ZetaPoly":
        return (-self) + other

    def __mul__(self, other: object) -> "ZetaPoly":
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        if not isinstance(other, ZetaPoly):
            return NotImplemented
        result: Dict[Monomial, Fraction] = {}
        for left_monomial, left_coeff in self._terms.items():
            for right_monomial, right_coeff in other._terms.items():
                monomial = _monomial_product(left_monomial, right_monomial)
                result[monomial] = result.get(monomial, Fraction(0)) + left_coeff * right_coeff
        return ZetaPoly._from_clean({m: c for m, c in result.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> "ZetaPoly":
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(Fraction(1) / Fraction(other))
        return NotImplemented

    def scale(self, factor: Scalar) -> "ZetaPoly":
        factor = Fraction(factor)
        if not factor:
            return ZetaPoly()
        return ZetaPoly._from_clean({m: c * factor for m, c in self._terms.items()})

    def __eq__(self, other: object) -> bool:
        other_terms = _coerce_terms(other)
        if other_terms is None:
            return NotImplemented
        return self._terms == other_terms

    def __hash__(self) -> int:
        if self._hash is None:
            if self.is_constant():
                self._hash = hash(self.constant_term())
            else:
                self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"ZetaPoly({str(self)!r})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for monomial, coeff in self.terms:
            factors = [
                f"zeta({index})" + (f"^{power}" if power > 1 else "")
                for index, power in monomial
            ]
            if not factors:
                body = str(coeff)
            elif coeff == 1:
                body = "*".join(factors)
            elif coeff == -1:
                body = "-" + "*".join(factors)
            else:
                body = f"{coeff}*" + "*".join(factors)
            pieces.append(body)
        text = pieces[0]
        for piece in pieces[1:]:
            text += f" - {piece[1:]}" if piece.startswith("-") else f" + {piece}"
        return text


def _coerce_terms(value: object) -> Optional[Dict[Monomial, Fraction]]:
    if isinstance(value, ZetaPoly):
        return value._terms
    if isinstance(value, bool):
        return None
    if isinstance(value, (int, Fraction)):
        coeff = Fraction(value)
        return {UNIT_MONOMIAL: coeff} if coeff else {}
    return None


def zeta(index: int) -> ZetaPoly:
    """The generator zeta(index)."""
    _check_index(index)
    return ZetaPoly({((index, 1),): 1})


def zp_arith(op: str, lhs: ZetaPoly, rhs: Union[ZetaPoly, Scalar, None] = None) -> ZetaPoly:
    if op == "add":
        return lhs + rhs
    if op == "mul":
        return lhs * rhs
    if op == "neg":
        return -lhs
    if op == "scale":
        return lhs.scale(rhs)
    raise ValueError(f"Unknown ZetaPoly operation: {op}")


def _terms_of(value: Union[ZetaPoly, Scalar]) -> Iterable[Tuple[Monomial, Fraction]]:
    if isinstance(value, ZetaPoly):
        return value._terms.items()
    coeff = Fraction(value)
    return [(UNIT_MONOMIAL, coeff)] if coeff else []


def weight_w(value: Union[ZetaPoly, Scalar]) -> float:
    """Usual weight: w(zeta(n)) = n, -inf for zero."""
    weights = [monomial_weight_w(monomial) for monomial, _ in _terms_of(value)]
    return max(weights) if weights else NEG_INF


def weight_W(value: Union[ZetaPoly, Scalar]) -> float:
    """Modified weight: W(zeta(2n+1)) = 2n, -inf for zero."""
    weights = [monomial_weight_W(monomial) for monomial, _ in _terms_of(value)]
    return max(weights) if weights else NEG_INF


def zp_to_json(value: Union[ZetaPoly, Scalar]) -> Dict[str, list]:
    poly = value if isinstance(value, ZetaPoly) else ZetaPoly.constant(value)
    return {
        "terms": [
            {
                "zetas": {str(index): power for index, power in monomial},
                "num": str(coeff.numerator),
                "den": str(coeff.denominator),
            }
            for monomial, coeff in poly.terms
        ]
    }


def zp_from_json(data: Mapping[str, list]) -> ZetaPoly:
    terms: Dict[Monomial, Fraction] = {}
    for term in data["terms"]:
        monomial = _canonical_monomial({int(k): int(v) for k, v in term["zetas"].items()})
        terms[monomial] = terms.get(monomial, Fraction(0)) + Fraction(
            int(term["num"]), int(term["den"])
        )
    return ZetaPoly(terms)


@lru_cache(maxsize=None)
def zeta_value(index: int) -> float:
    return float(_zeta_function(index, 1))


def zp_evaluate(
    value: Union[ZetaPoly, Scalar],
    zeta_values: Optional[Mapping[int, float]] = None,
) -> float:
    """Numeric value of an exact scalar, for diagnostics only."""
    total = 0.0
    for monomial, coeff in _terms_of(value):
        term = float(coeff)
        for index, power in monomial:
            numeric = zeta_values[index] if zeta_values is not None else zeta_value(index)
            term *= numeric ** power
        total += term
    return total
