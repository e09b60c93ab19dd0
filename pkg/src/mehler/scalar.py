"""Exact arithmetic in the quadratic field Q(sqrt 2).

Rational parts are held as :class:`gmpy2.mpq`.  Polynomial and series code
stores plain ``mpq`` coefficients whenever the sqrt(2) part vanishes and only
promotes to :class:`ScalarQ2` when an irrational constant enters, so the
common rational path stays fast.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

import gmpy2
from gmpy2 import mpq

from .errors import RadicalError

_MPQ = type(mpq(0))


def to_mpq(value) -> mpq:
    """Coerce an int, Fraction, mpq or decimal string to ``mpq``."""
    if isinstance(value, _MPQ):
        return value
    if isinstance(value, (int, Rational)):
        return mpq(value)
    if isinstance(value, str):
        return mpq(Fraction(value))
    if isinstance(value, float):
        # exact binary value of the float
        return mpq(Fraction(value))
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


class ScalarQ2:
    """An element ``a + b*sqrt(2)`` with ``a`` and ``b`` rational."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = to_mpq(a)
        self.b = to_mpq(b)

    @staticmethod
    def coerce(value) -> "ScalarQ2":
        if isinstance(value, ScalarQ2):
            return value
        return ScalarQ2(value, 0)

    def is_rational(self) -> bool:
        return self.b == 0

    def conjugate(self) -> "ScalarQ2":
        return ScalarQ2(self.a, -self.b)

    def norm(self) -> mpq:
        """Field norm ``a^2 - 2 b^2``."""
        return self.a * self.a - 2 * self.b * self.b

    def inverse(self) -> "ScalarQ2":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in Q(sqrt 2)")
        return ScalarQ2(self.a / n, -self.b / n)

    def __add__(self, other):
        if isinstance(other, ScalarQ2):
            return ScalarQ2(self.a + other.a, self.b + other.b)
        try:
            return ScalarQ2(self.a + to_mpq(other), self.b)
        except TypeError:
            return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return ScalarQ2(-self.a, -self.b)

    def __sub__(self, other):
        if isinstance(other, ScalarQ2):
            return ScalarQ2(self.a - other.a, self.b - other.b)
        try:
            return ScalarQ2(self.a - to_mpq(other), self.b)
        except TypeError:
            return NotImplemented

    def __rsub__(self, other):
        try:
            return ScalarQ2(to_mpq(other) - self.a, -self.b)
        except TypeError:
            return NotImplemented

    def __mul__(self, other):
        if isinstance(other, ScalarQ2):
            return ScalarQ2(
                self.a * other.a + 2 * self.b * other.b,
                self.a * other.b + self.b * other.a,
            )
        try:
            q = to_mpq(other)
        except TypeError:
            return NotImplemented
        return ScalarQ2(self.a * q, self.b * q)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ScalarQ2):
            return self * other.inverse()
        try:
            q = to_mpq(other)
        except TypeError:
            return NotImplemented
        return ScalarQ2(self.a / q, self.b / q)

    def __rtruediv__(self, other):
        try:
            return to_mpq(other) * self.inverse()
        except TypeError:
            return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = ScalarQ2(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, ScalarQ2):
            return self.a == other.a and self.b == other.b
        try:
            return self.b == 0 and self.a == to_mpq(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __float__(self):
        return float(self.a) + float(self.b) * 2.0**0.5

    def __repr__(self):
        return f"ScalarQ2({self.a}, {self.b})"

    def __str__(self):
        return format_coeff(self)

    def sqrt(self) -> "ScalarQ2":
        """Exact square root inside Q(sqrt 2), or :class:`RadicalError`."""
        return sqrt_exact(self)


SQRT2 = ScalarQ2(0, 1)
INV_SQRT2 = ScalarQ2(0, mpq(1, 2))


def _rational_sqrt(q: mpq):
    """Return the rational square root of ``q`` or ``None``."""
    if q < 0:
        return None
    num, den = q.numerator, q.denominator
    if gmpy2.is_square(num) and gmpy2.is_square(den):
        return mpq(gmpy2.isqrt(num), gmpy2.isqrt(den))
    return None


def sqrt_exact(value):
    """Square root of a rational or Q(sqrt 2) element, kept exact.

    Rationals of the form ``s^2`` give ``s``; those of the form ``2 s^2``
    give ``s*sqrt(2)``.  General field elements ``a + b sqrt 2`` are handled
    by solving ``p^2 + 2 q^2 = a``, ``2 p q = b``.  The non-negative root
    (as a real number) is returned.
    """
    if isinstance(value, ScalarQ2) and value.b != 0:
        a, b = value.a, value.b
        disc = _rational_sqrt(a * a - 2 * b * b)
        if disc is not None:
            for p2 in ((a + disc) / 2, (a - disc) / 2):
                p = _rational_sqrt(p2)
                if p:
                    q = b / (2 * p)
                    root = ScalarQ2(p, q)
                    return root if float(root) >= 0 else -root
        raise RadicalError(f"sqrt({format_coeff(value)}) is not in Q(sqrt 2)")
    q = value.a if isinstance(value, ScalarQ2) else to_mpq(value)
    s = _rational_sqrt(q)
    if s is not None:
        return s
    s = _rational_sqrt(q / 2)
    if s is not None:
        return ScalarQ2(0, s)
    raise RadicalError(f"sqrt({q}) is not in Q(sqrt 2)")


def simplify(c):
    """Demote a ScalarQ2 with zero sqrt(2) part to a plain ``mpq``."""
    if isinstance(c, ScalarQ2) and c.b == 0:
        return c.a
    return c


def is_rational(c) -> bool:
    return not (isinstance(c, ScalarQ2) and c.b != 0)


def format_coeff(c) -> str:
    """Canonical text for a coefficient: ``a``, or ``a + b*sqrt2``."""
    if isinstance(c, ScalarQ2):
        if c.b == 0:
            return str(c.a)
        if c.a == 0:
            return f"{c.b}*sqrt2"
        sign = "-" if c.b < 0 else "+"
        return f"{c.a} {sign} {abs(c.b)}*sqrt2"
    if isinstance(c, float):
        return repr(c)
    return str(c)
