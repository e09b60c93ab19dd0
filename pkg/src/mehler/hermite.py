"""Physicists' Hermite polynomials, the operational formula and the addition formula."""

from __future__ import annotations

import itertools
from math import factorial
from typing import Sequence

from gmpy2 import mpq

from .errors import RadicalError
from .gaussian import GaussianPoly, QuadForm, gp_derive, gp_derive_n
from .poly import MultiPoly
from .scalar import sqrt_exact, to_mpq


class HermiteTable:
    """Lazily extended cache of ``H_0, H_1, ...`` built by the three-term recurrence.

    ``H_{n+1}(x) = 2x H_n(x) - 2n H_{n-1}(x)``.  Entries are univariate
    :class:`MultiPoly` values with integer coefficients.
    """

    def __init__(self, size: int = 0):
        self._cache = [MultiPoly.one(1), MultiPoly.univariate([0, 2])]
        self.extend(size)

    def extend(self, n: int) -> None:
        c = self._cache
        x2 = MultiPoly.univariate([0, 2])
        while len(c) <= n:
            k = len(c) - 1
            c.append(x2 * c[k] - c[k - 1].scale(2 * k))

    def __getitem__(self, n: int) -> MultiPoly:
        if n < 0:
            raise IndexError("Hermite index must be non-negative")
        self.extend(n)
        return self._cache[n]

    def __len__(self):
        return len(self._cache)


_TABLE = HermiteTable(16)


def hermite_poly(n: int) -> MultiPoly:
    """``H_n`` in one variable; leading coefficient ``2**n``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return _TABLE[n]


def hermite_in(n: int, axis: int, nvars: int) -> MultiPoly:
    """``H_n(x_axis)`` as a polynomial in ``nvars`` variables (1-based axis)."""
    return hermite_poly(n).embed(nvars, [axis - 1])


def hermite_of(n: int, arg: MultiPoly) -> MultiPoly:
    """``H_n`` composed with a polynomial argument."""
    return hermite_poly(n).compose([arg])


def hermite_rodrigues(n: int) -> MultiPoly:
    """``(-1)^n e^{x^2} D^n e^{-x^2}`` by symbolic differentiation."""
    g = GaussianPoly.gaussian(QuadForm(((1,),)))
    g = gp_derive_n(g, 1, n)
    return g.P if n % 2 == 0 else -g.P


def operational_apply(m: int, f: GaussianPoly, axis: int = 1) -> GaussianPoly:
    """Right-hand side of the operational formula for ``(-D + 2x)^m f``.

    ``m! sum_j (-1)^j / j! * H_{m-j}(x) / (m-j)! * D^j f`` along ``axis``.
    """
    d = f.d
    total = MultiPoly.zero(d)
    deriv = f
    for j in range(m + 1):
        if j:
            deriv = gp_derive(deriv, axis)
        c = mpq((-1) ** j * factorial(m), factorial(j) * factorial(m - j))
        total = total + hermite_in(m - j, axis, d) * deriv.P * c
    return f.with_poly(total)


def _compositions(n: int, parts: int):
    """All tuples of ``parts`` non-negative ints summing to ``n``."""
    for cuts in itertools.combinations(range(n + parts - 1), parts - 1):
        prev = -1
        out = []
        for c in cuts:
            out.append(c - prev - 1)
            prev = c
        out.append(n + parts - 1 - prev - 1)
        yield tuple(out)


def addition_lhs(n: int, a: Sequence) -> MultiPoly:
    """``(sum a_k^2)^{n/2} / n! * H_n(sum a_k x_k / sqrt(sum a_k^2))``."""
    a = [to_mpq(v) for v in a]
    r = len(a)
    s2 = sum(v * v for v in a)
    lin = MultiPoly.linear(a)
    try:
        s = sqrt_exact(s2)
    except RadicalError:
        if n % 2:
            raise
        s = None
    if s is not None:
        out = hermite_of(n, lin.scale(1 / s)).scale(s**n)
    else:
        # only even powers of s survive: s^n (L/s)^{n-2i} = (s^2)^i L^{n-2i}
        coeffs = hermite_poly(n).univariate_coeffs()
        out = MultiPoly.zero(r)
        for deg, c in enumerate(coeffs):
            if c:
                out = out + (lin**deg).scale(c * s2 ** ((n - deg) // 2))
    return out.scale(mpq(1, factorial(n)))


def addition_rhs(n: int, a: Sequence) -> MultiPoly:
    """``sum_{m_1+..+m_r=n} prod_k a_k^{m_k} / m_k! H_{m_k}(x_k)``."""
    a = [to_mpq(v) for v in a]
    r = len(a)
    out = MultiPoly.zero(r)
    for ms in _compositions(n, r):
        term = MultiPoly.one(r)
        for k, m in enumerate(ms):
            term = term * hermite_in(m, k + 1, r).scale(a[k] ** m / factorial(m))
        out = out + term
    return out


def addition_formula_check(n: int, a: Sequence) -> bool:
    """Exact check of the Hermite addition formula for coefficient tuple ``a``."""
    return addition_lhs(n, a) == addition_rhs(n, a)
