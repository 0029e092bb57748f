"""Borel dictionary and singular-form calculus.

The Borel transform sends sum c_n a^{n+1} to sum c_n xi^n / n!. It omits the
constant term: the image of 1 would be the Dirac identity of the
convolution product, which is not an analytic function.
"""

from dataclasses import dataclass, replace
from fractions import Fraction
from math import floor
from typing import Any, Dict, List, Optional, Union

import numpy as np
from scipy.integrate import quad

from .errors import ConstantTermError, PlaneMismatchError, UnsupportedSingularityError
from .scalars import ZetaPoly, zp_evaluate, zp_to_json
from .series import BOREL, PHYSICAL, Coefficient, FormalSeries, _factorial, is_zero

BorelSeries = FormalSeries

EXTRACTION_VIEW = "extraction"
LATERAL_VIEW = "lateral"

SingularCoefficient = Union[Fraction, ZetaPoly]


def _require_plane(f: FormalSeries, plane: str, operation: str) -> None:
    if f.plane != plane:
        raise PlaneMismatchError(f"{operation} expects a {plane}-plane series, got {f.plane}")


def borel_map(f: FormalSeries) -> BorelSeries:
    _require_plane(f, PHYSICAL, "borel_map")
    if not is_zero(f[0]):
        raise ConstantTermError(
            "Borel transform needs a series without constant term "
            "(the constant would map to the Dirac identity, which is omitted)"
        )
    if f.order == 0:
        return FormalSeries([], order=0, plane=BOREL, convention=f.convention)
    values = [f[n + 1] / _factorial(n) for n in range(f.order)]
    return FormalSeries(values, order=f.order - 1, plane=BOREL, convention=f.convention)


def laplace_formal(g: BorelSeries) -> FormalSeries:
    _require_plane(g, BOREL, "laplace_formal")
    values = [Fraction(0)] + [g[n] * _factorial(n) for n in range(g.order + 1)]
    return FormalSeries(values, order=g.order + 1, plane=PHYSICAL, convention=g.convention)


def borel_convolve(f: BorelSeries, g: BorelSeries) -> BorelSeries:
    """Convolution integral of two Borel series on the xi^n basis."""
    _require_plane(f, BOREL, "borel_convolve")
    _require_plane(g, BOREL, "borel_convolve")
    v_f = f.valuation()
    v_g = g.valuation()
    order = min(f.order + v_g, g.order + v_f) + 1
    values: List[Coefficient] = [Fraction(0)] * (order + 1)
    for i in range(v_f, f.order + 1):
        left = f[i]
        if is_zero(left):
            continue
        for j in range(v_g, g.order + 1):
            p = i + j + 1
            if p > order:
                break
            right = g[j]
            if is_zero(right):
                continue
            weight = Fraction(_factorial(i) * _factorial(j), _factorial(p))
            values[p] = values[p] + left * right * weight
    return FormalSeries(values, order=order, plane=BOREL)


def borel_primitive(f: BorelSeries) -> BorelSeries:
    _require_plane(f, BOREL, "borel_primitive")
    values = [Fraction(0)] + [f[n] / (n + 1) for n in range(f.order + 1)]
    return FormalSeries(values, order=f.order + 1, plane=BOREL, convention=f.convention)


def xi_euler(f: BorelSeries) -> BorelSeries:
    """d/dxi (xi f), the image of a d/da."""
    _require_plane(f, BOREL, "xi_euler")
    return FormalSeries(
        [f[n] * (n + 1) for n in range(f.order + 1)],
        order=f.order,
        plane=BOREL,
        convention=f.convention,
    )


def borel_derivative(f: BorelSeries) -> BorelSeries:
    _require_plane(f, BOREL, "borel_derivative")
    return f.derivative()


def borel_eval(f: BorelSeries, xi: complex) -> complex:
    return f.evaluate(complex(xi))


def _numeric(value: Any) -> complex:
    if isinstance(value, (ZetaPoly, Fraction)):
        return complex(zp_evaluate(value))
    return complex(value)


def _format_rational(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def _is_integer(value: Fraction) -> bool:
    return value.denominator == 1


@dataclass(frozen=True)
class SingularForm:
    """coefficient * (1 - xi/location)^exponent, times log(1 - xi/location) if ``log``."""

    location: Fraction
    exponent: Fraction
    log: bool
    coefficient: SingularCoefficient
    shift: int = 0

    @property
    def is_pole(self) -> bool:
        return not self.log and _is_integer(self.exponent) and self.exponent < 0

    @property
    def is_holomorphic(self) -> bool:
        if is_zero(self.coefficient):
            return True
        return not self.log and _is_integer(self.exponent) and self.exponent >= 0

    def scale(self, factor: Union[Fraction, int, ZetaPoly]) -> "SingularForm":
        return replace(self, coefficient=self.coefficient * factor)

    def primitive(self) -> "SingularForm":
        """Leading singular part of the primitive vanishing at 0."""
        location = self.location
        if self.log and self.exponent == -1:
            raise UnsupportedSingularityError(
                "primitive of a log/pole form gives a squared logarithm"
            )
        if not self.log and self.exponent == -1:
            return SingularForm(
                location, Fraction(0), True, self.coefficient * (-location), self.shift + 1
            )
        factor = -location / (self.exponent + 1)
        return SingularForm(
            location, self.exponent + 1, self.log, self.coefficient * factor, self.shift + 1
        )

    def evaluate(self, xi: complex) -> complex:
        local = 1 - complex(xi) / float(self.location)
        value = _numeric(self.coefficient) * np.power(local, float(self.exponent))
        if self.log:
            value *= np.log(local)
        return complex(value)

    def to_dict(self) -> Dict[str, Any]:
        coefficient = self.coefficient
        return {
            "location": _format_rational(Fraction(self.location)),
            "exponent": _format_rational(Fraction(self.exponent)),
            "log": self.log,
            "coeff": zp_to_json(coefficient),
            "shift": self.shift,
        }


def pochhammer(value: Fraction, n: int) -> Fraction:
    result = Fraction(1)
    for i in range(n):
        result *= value + i
    return result


def symbol_singular_form(n: int, beta: Fraction, location: Fraction = Fraction(1)) -> SingularForm:
    """Leading Borel singular form of the n-th primitive of a symbol with parameter beta."""
    if n < 0:
        raise UnsupportedSingularityError(f"primitive count must be >= 0, got {n}")
    beta = Fraction(beta)
    location = Fraction(location)
    exponent = beta + n - 1
    if not _is_integer(beta):
        coefficient = (-location) ** n / pochhammer(beta, n)
        return SingularForm(location, exponent, False, coefficient, n)
    if beta < 0:
        raise UnsupportedSingularityError(
            f"integer beta={beta} < 0 is outside the supported singular forms"
        )
    if beta == 0 and n == 0:
        return SingularForm(location, Fraction(-1), False, Fraction(1), 0)
    sign = -1 if (n + int(beta)) % 2 else 1
    coefficient = Fraction(sign) * location ** n / _factorial(int(exponent))
    return SingularForm(location, exponent, True, coefficient, n)


def singular_convolve(form: SingularForm, g: BorelSeries) -> SingularForm:
    """Leading singular form of form * g for g regular at 0.

    With g ~ lead xi^q, the convolution is lead q! times the (q+1)-fold primitive.
    """
    _require_plane(g, BOREL, "singular_convolve")
    q = g.valuation()
    if q > g.order:
        return replace(form, coefficient=Fraction(0))
    result = form
    for _ in range(q + 1):
        result = result.primitive()
    return result.scale(g[q] * _factorial(q))


def convolve_numeric(form: SingularForm, g: BorelSeries, xi: float) -> float:
    """Quadrature of int_0^xi form(eta) g(xi - eta) d eta for real xi below the singularity."""
    _require_plane(g, BOREL, "convolve_numeric")

    def integrand(eta: float) -> float:
        return (form.evaluate(eta) * g.evaluate(xi - eta)).real

    value, _ = quad(integrand, 0.0, xi, limit=200, epsabs=1e-13, epsrel=1e-12)
    return value


@dataclass(frozen=True)
class LocalGerm:
    """Germ at a singularity: coefficient * S * u^exponent, u = (xi - location)/location.

    S is sin(pi * sine_arg)/pi when sine_arg is nonzero and 1 otherwise. A
    ``dirac`` germ stands for coefficient times the Dirac mass at the location.
    """

    coefficient: SingularCoefficient
    exponent: Fraction
    location: Fraction
    sine_arg: Fraction = Fraction(0)
    dirac: bool = False

    @classmethod
    def zero(cls, location: Fraction) -> "LocalGerm":
        return cls(Fraction(0), Fraction(0), Fraction(location))

    @property
    def is_zero(self) -> bool:
        return is_zero(self.coefficient)

    def scale(self, factor: Union[Fraction, int, ZetaPoly]) -> "LocalGerm":
        return replace(self, coefficient=self.coefficient * factor)

    def primitive(self) -> "LocalGerm":
        if self.is_zero:
            return self
        if self.dirac:
            return replace(self, exponent=Fraction(0), dirac=False)
        factor = self.location / (self.exponent + 1)
        return replace(
            self, coefficient=self.coefficient * factor, exponent=self.exponent + 1
        )

    def sine_scale(self) -> float:
        if not self.sine_arg:
            return 1.0
        return float(np.sin(np.pi * float(self.sine_arg)) / np.pi)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "coeff": zp_to_json(self.coefficient),
            "exponent": _format_rational(self.exponent),
            "location": _format_rational(self.location),
            "sine_arg": _format_rational(self.sine_arg),
            "dirac": self.dirac,
        }


def alien_delta1(
    form: Optional[SingularForm],
    view: str = EXTRACTION_VIEW,
    location: Fraction = Fraction(1),
) -> LocalGerm:
    """Leading alien derivative at the singularity of ``form``.

    ``None`` or a holomorphic form gives the zero germ. Simple poles give a
    Dirac germ in the extraction view and nothing in the lateral view.
    """
    if view not in (EXTRACTION_VIEW, LATERAL_VIEW):
        raise ValueError(f"Unknown alien derivative view: {view}")
    if form is None:
        return LocalGerm.zero(location)
    if form.is_holomorphic:
        return LocalGerm.zero(form.location)
    exponent = form.exponent
    if form.log:
        if not _is_integer(exponent) or exponent < 0:
            raise UnsupportedSingularityError(
                f"log singular form with exponent {exponent} is outside the supported cases"
            )
        sign = -1 if int(exponent) % 2 else 1
        return LocalGerm(form.coefficient * sign, exponent, form.location)
    if form.is_pole:
        if view == LATERAL_VIEW:
            return LocalGerm.zero(form.location)
        if exponent != -1:
            raise UnsupportedSingularityError(
                f"pole of order {-exponent} has no supported alien derivative"
            )
        return LocalGerm(
            form.coefficient * (-form.location), Fraction(-1), form.location, dirac=True
        )
    shifted = exponent + 1
    whole = floor(shifted)
    sine_arg = shifted - whole
    sign = 1 if whole % 2 else -1
    return LocalGerm(form.coefficient * sign, exponent, form.location, sine_arg=sine_arg)
