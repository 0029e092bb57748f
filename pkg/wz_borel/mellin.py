"""The one-loop Mellin kernel H(x, y).

H(x, y) = Gamma(1-x-y) Gamma(1+x) Gamma(1+y)
          / (Gamma(2+x+y) Gamma(1-x) Gamma(1-y))

IR poles sit at x = -l and y = -l, UV poles on the lines x + y = k.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import loggamma

from .errors import OrderError, PoleProximityError, ResidueConsistencyError
from .scalars import ZetaPoly, zeta
from .series import BiSeries, FormalSeries, _binomial, _factorial

DEFAULT_POLE_DELTA = 1e-3
SUBTRACTED_CIRCLE_RADIUS = 0.05
SUBTRACTED_CIRCLE_POINTS = 16
SUBTRACTION_CONVENTION = (
    "H minus sum_{l<=k} [P_l(y)/(l+x) + P_l(x)/(l+y)], P_l exact residue polynomials "
    "truncated at the working order"
)

IR = "IR"
UV = "UV"

Polynomial = List[Fraction]


@dataclass(frozen=True)
class PolePart:
    family: str
    index: int
    residue: FormalSeries
    variable: str

    def to_dict(self) -> Dict[str, object]:
        return {
            "family": self.family,
            "index": self.index,
            "variable": self.variable,
            "order": self.residue.order,
            "coefficients": [str(c) for c in self.residue.coeffs],
        }


def _poly_mul(left: Sequence[Fraction], right: Sequence[Fraction]) -> Polynomial:
    result = [Fraction(0)] * (len(left) + len(right) - 1)
    for i, a in enumerate(left):
        if not a:
            continue
        for j, b in enumerate(right):
            result[i + j] += a * b
    return result


def _poly_product(factors: Sequence[Sequence[Fraction]]) -> Polynomial:
    result: Polynomial = [Fraction(1)]
    for factor in factors:
        result = _poly_mul(result, factor)
    return result


def _poly_trim(poly: Polynomial) -> Polynomial:
    trimmed = list(poly)
    while len(trimmed) > 1 and not trimmed[-1]:
        trimmed.pop()
    return trimmed


def _poly_eval(poly: Sequence[Fraction], point: complex) -> complex:
    total = 0j
    for coeff in reversed(poly):
        total = total * point + float(coeff)
    return total


@lru_cache(maxsize=None)
def _ir_polynomial(l: int) -> Tuple[Fraction, ...]:
    factors: List[Polynomial] = [[Fraction(j), Fraction(-1)] for j in range(1, l + 1)]
    if l >= 2:
        factors.append([Fraction(0), Fraction(1)])
        factors.extend([Fraction(-i), Fraction(1)] for i in range(1, l - 1))
    scale = Fraction((-1) ** (l - 1), _factorial(l - 1) * _factorial(l))
    return tuple(c * scale for c in _poly_trim(_poly_product(factors)))


def ir_residue(l: int, order: int) -> PolePart:
    """Residue P_l(y) of H in x at x = -l, truncated at ``order``."""
    if l < 1:
        raise OrderError(f"IR pole index must be >= 1, got {l}")
    if order < 0:
        raise OrderError(f"Working order must be >= 0, got {order}")
    return PolePart(
        family=IR,
        index=l,
        residue=FormalSeries(_ir_polynomial(l), order=order),
        variable="y",
    )


def _uv_line_polynomial(k: int) -> Polynomial:
    factors: List[Polynomial] = [[Fraction(0), Fraction(1)]]
    factors.extend([Fraction(-i), Fraction(1)] for i in range(1, k))
    factors.extend([Fraction(j), Fraction(-1)] for j in range(1, k + 1))
    scale = Fraction((-1) ** (k - 1), _factorial(k - 1) * _factorial(k + 1))
    return [c * scale for c in _poly_product(factors)]


def _reduce_to_product_variable(poly: Polynomial, k: int) -> Polynomial:
    """Rewrite a polynomial in x as a polynomial in X = x (k - x)."""
    remaining = _poly_trim(poly)
    generator: Polynomial = [Fraction(0), Fraction(k), Fraction(-1)]
    powers: List[Polynomial] = [[Fraction(1)]]
    result: Dict[int, Fraction] = {}
    while any(remaining):
        degree = len(remaining) - 1
        if degree % 2:
            raise ResidueConsistencyError(
                f"UV residue at x+y={k} is not a polynomial in xy (odd degree {degree} left)"
            )
        half = degree // 2
        while len(powers) <= half:
            powers.append(_poly_mul(powers[-1], generator))
        coeff = remaining[-1] * (-1) ** half
        result[half] = coeff
        for i, value in enumerate(powers[half]):
            remaining[i] -= coeff * value
        remaining = _poly_trim(remaining)
        if len(remaining) - 1 >= degree and remaining[-1]:
            raise ResidueConsistencyError(
                f"UV residue reduction at x+y={k} failed to lower degree {degree}"
            )
    size = max(result) + 1 if result else 1
    return [result.get(i, Fraction(0)) for i in range(size)]


@lru_cache(maxsize=None)
def _uv_polynomial(k: int) -> Tuple[Fraction, ...]:
    reduced = _reduce_to_product_variable(_uv_line_polynomial(k), k)
    if reduced and reduced[0]:
        raise ResidueConsistencyError(f"UV residue at x+y={k} has a nonzero constant term")
    return tuple(reduced)


def uv_residue(k: int) -> PolePart:
    """Q_k(X) with H ~ Q_k(xy) / (k - x - y) near the line x + y = k."""
    if k < 1:
        raise OrderError(f"UV pole index must be >= 1, got {k}")
    coeffs = _uv_polynomial(k)
    return PolePart(
        family=UV,
        index=k,
        residue=FormalSeries(coeffs, order=max(k, len(coeffs) - 1)),
        variable="X",
    )


def _geometric(order: int, ratio: Fraction) -> FormalSeries:
    return FormalSeries([ratio ** n for n in range(order + 1)], order=order)


@lru_cache(maxsize=8)
def h_taylor(order: int) -> BiSeries:
    """Exact Taylor data of H to total degree ``order``, over odd-zeta polynomials."""
    if order < 0:
        raise OrderError(f"Mellin order must be >= 0, got {order}")
    exponent: Dict[Tuple[int, int], ZetaPoly] = {}
    for k in range(1, (order - 1) // 2 + 1):
        degree = 2 * k + 1
        weight = zeta(degree).scale(Fraction(2, degree))
        for m in range(1, degree):
            exponent[(m, degree - m)] = weight.scale(_binomial(degree, m))
    zeta_factor = BiSeries(exponent, order).exp()
    propagator = BiSeries.of_sum(_geometric(order, Fraction(-1)))
    return propagator * zeta_factor


@lru_cache(maxsize=8)
def h_approx(order: int) -> BiSeries:
    """Taylor data of the approximating kernel built from the first IR and UV poles.

    h(x, y) = (1 + xy)(1/(1+x) + 1/(1+y) - 1) + xy / (2 (1 - x - y)) + xy / 2
    """
    if order < 0:
        raise OrderError(f"Mellin order must be >= 0, got {order}")
    alternating = _geometric(order, Fraction(-1))
    one = BiSeries.constant(1, order)
    xy = BiSeries({(1, 1): 1}, order)
    ir_part = (one + xy) * (BiSeries.of_x(alternating) + BiSeries.of_y(alternating) - one)
    uv_part = xy * BiSeries.of_sum(_geometric(order, Fraction(1))).scale(Fraction(1, 2))
    return ir_part + uv_part + xy.scale(Fraction(1, 2))


def _inverse_linear(l: int, order: int) -> FormalSeries:
    """1 / (l + t) expanded at t = 0."""
    return FormalSeries(
        [Fraction((-1) ** m, l ** (m + 1)) for m in range(order + 1)], order=order
    )


def h_subtracted(k: int, order: int) -> BiSeries:
    """Taylor data of H with the first k IR pole pairs removed."""
    if k < 0:
        raise OrderError(f"Subtraction depth must be >= 0, got {k}")
    result = h_taylor(order)
    for l in range(1, k + 1):
        residue = ir_residue(l, order).residue
        pole = BiSeries.of_x(_inverse_linear(l, order)) * BiSeries.of_y(residue)
        mirrored = BiSeries.of_y(_inverse_linear(l, order)) * BiSeries.of_x(residue)
        result = result - pole - mirrored
    return result


def _nearest_pole(z1: complex, z2: complex, delta: float) -> Optional[str]:
    for name, value in (("x", z1), ("y", z2)):
        nearest = round(value.real)
        if nearest <= -1 and abs(value - nearest) < delta:
            return f"{name}={nearest}"
    total = z1 + z2
    nearest = round(total.real)
    if nearest >= 1 and abs(total - nearest) < delta:
        return f"x+y={nearest}"
    return None


def _is_nonpositive_integer(value: complex) -> bool:
    return value.imag == 0 and value.real <= 0 and float(value.real).is_integer()


def h_eval_complex(z1: complex, z2: complex, delta: float = DEFAULT_POLE_DELTA) -> complex:
    """Numeric H(z1, z2) through complex log-Gamma."""
    z1 = complex(z1)
    z2 = complex(z2)
    pole = _nearest_pole(z1, z2, delta)
    if pole is not None:
        raise PoleProximityError(
            f"H evaluated within {delta} of its pole {pole} at ({z1}, {z2})", pole=pole
        )
    total = z1 + z2
    denominators = (2 + total, 1 - z1, 1 - z2)
    if any(_is_nonpositive_integer(arg) for arg in denominators):
        return 0j
    log_value = (
        loggamma(1 - total)
        + loggamma(1 + z1)
        + loggamma(1 + z2)
        - loggamma(denominators[0])
        - loggamma(denominators[1])
        - loggamma(denominators[2])
    )
    return complex(np.exp(log_value))


def _subtracted_terms(k: int, z1: complex, z2: complex) -> complex:
    total = 0j
    for l in range(1, k + 1):
        poly = _ir_polynomial(l)
        total += _poly_eval(poly, z2) / (l + z1) + _poly_eval(poly, z1) / (l + z2)
    return total


def _near_subtracted_pole(value: complex, k: int, delta: float) -> bool:
    return any(abs(value + l) < delta for l in range(1, k + 1))


def _circle_mean(
    func: Callable[[complex], complex],
    center: complex,
    radius: float = SUBTRACTED_CIRCLE_RADIUS,
    points: int = SUBTRACTED_CIRCLE_POINTS,
) -> complex:
    angles = 2 * np.pi * np.arange(points) / points
    samples = [func(center + radius * np.exp(1j * angle)) for angle in angles]
    return complex(np.mean(samples))


def h_subtracted_eval_complex(
    k: int,
    z1: complex,
    z2: complex,
    delta: float = DEFAULT_POLE_DELTA,
) -> complex:
    """Numeric value of the subtracted kernel, including its removable points.

    At a subtracted IR pole the value is the mean over a small circle around it.
    """
    z1 = complex(z1)
    z2 = complex(z2)

    def direct(x: complex, y: complex) -> complex:
        return h_eval_complex(x, y, delta) - _subtracted_terms(k, x, y)

    def along_y(x: complex) -> complex:
        if _near_subtracted_pole(z2, k, delta):
            return _circle_mean(lambda y: direct(x, y), z2)
        return direct(x, z2)

    if _near_subtracted_pole(z1, k, delta):
        return _circle_mean(along_y, z1)
    return along_y(z1)


def mellin_rows(h: BiSeries) -> List[Tuple[int, int, object]]:
    """(m, n, h_mn) triples by total degree."""
    return [(m, n, coeff) for m, n, coeff in h.items()]
