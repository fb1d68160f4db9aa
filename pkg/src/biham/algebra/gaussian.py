"""
Exact Gaussian rationals a + b i with a, b in Q.
"""

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Union

GaussianLike = Union["GaussianRational", int, Fraction, float, complex]


def _to_fraction(x: Union[int, float, Fraction]) -> Fraction:
    # Fraction(float) is exact: every double is a dyadic rational.
    if isinstance(x, (int, Fraction, Rational)):
        return Fraction(x)
    return Fraction(float(x))


@dataclass(frozen=True, eq=False)
class GaussianRational:
    """Exact complex number with rational real and imaginary parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "re", _to_fraction(self.re))
        object.__setattr__(self, "im", _to_fraction(self.im))

    @classmethod
    def of(cls, value: GaussianLike) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        return cls(_to_fraction(value), Fraction(0))

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __add__(self, other: GaussianLike) -> "GaussianRational":
        o = GaussianRational.of(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other: GaussianLike) -> "GaussianRational":
        return self + (-GaussianRational.of(other))

    def __rsub__(self, other: GaussianLike) -> "GaussianRational":
        return GaussianRational.of(other) - self

    def __mul__(self, other: GaussianLike) -> "GaussianRational":
        o = GaussianRational.of(other)
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def __truediv__(self, other: GaussianLike) -> "GaussianRational":
        o = GaussianRational.of(other)
        denom = o.re * o.re + o.im * o.im
        if denom == 0:
            raise ZeroDivisionError("Division by the zero Gaussian rational")
        num = self * o.conjugate()
        return GaussianRational(num.re / denom, num.im / denom)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (GaussianRational, int, Fraction, float, complex)):
            o = GaussianRational.of(other)
            return self.re == o.re and self.im == o.im
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}i)"


ZERO = GaussianRational()
ONE = GaussianRational(1)
HALF = GaussianRational(Fraction(1, 2))
