"""Exact Gaussian rationals for exact-mode coefficient tables.

Real exact coefficients are plain ``Fraction``; only genuinely complex values
become ``GaussianRational``.  ``qnormalize`` collapses back to ``Fraction``.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational


class GaussianRational:
    __slots__ = ("re", "im")

    def __init__(self, re, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def _coerce(x):
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Rational)):
            return GaussianRational(x, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return qnormalize(GaussianRational(self.re + o.re, self.im + o.im))

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return qnormalize(GaussianRational(self.re - o.re, self.im - o.im))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return qnormalize(
            GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError("GaussianRational division by zero")
        return self * GaussianRational(o.re / d, -o.im / d)

    def __rtruediv__(self, other):
        return GaussianRational._coerce(other) / self

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return complex(self) == other
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im)) if self.im else hash(self.re)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"


def qnormalize(x):
    if isinstance(x, GaussianRational) and x.im == 0:
        return x.re
    return x


def to_exact(x):
    """Exact scalar from int/Fraction/str/complex-with-rational-parts."""
    if isinstance(x, GaussianRational):
        return qnormalize(x)
    if isinstance(x, complex):
        return qnormalize(GaussianRational(Fraction(x.real), Fraction(x.imag)))
    return Fraction(x)


def exact_real_part(x) -> Fraction:
    return x.re if isinstance(x, GaussianRational) else Fraction(x)


def exact_imag_part(x) -> Fraction:
    return x.im if isinstance(x, GaussianRational) else Fraction(0)
