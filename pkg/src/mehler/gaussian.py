"""Functions of the form ``P(x) * exp(-x^T C x)`` and the creation operators.

Axes in this module are 1-based, ``1 <= axis <= d``, as in ``A_j^* =
-d/dx_j + 2 x_j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from gmpy2 import mpq

from .errors import AxisError, DimensionError
from .poly import MultiPoly
from .scalar import ScalarQ2, to_mpq


def _entry(c):
    return c if isinstance(c, (ScalarQ2, float)) else to_mpq(c)


@dataclass(frozen=True)
class QuadForm:
    """Symmetric exponent matrix ``C`` of ``exp(-x^T C x)``.

    The diagonal/off-diagonal quantities ``a_ii``, ``a_ij`` used by the
    creation-operator formulas are read off as ``a_ii = C_ii`` and
    ``a_ij = -C_ij`` (``i != j``), so that
    ``-x^T C x = -sum a_ii x_i^2 + 2 sum_{i<j} a_ij x_i x_j``.
    """

    matrix: tuple[tuple, ...]

    def __post_init__(self):
        rows = tuple(tuple(_entry(c) for c in row) for row in self.matrix)
        d = len(rows)
        if any(len(row) != d for row in rows):
            raise DimensionError("quadratic form matrix must be square")
        for i in range(d):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise ValueError(f"matrix not symmetric at ({i + 1}, {j + 1})")
        object.__setattr__(self, "matrix", rows)

    @classmethod
    def from_a(cls, diag: Sequence, off: dict[tuple[int, int], object]) -> "QuadForm":
        """Build ``C`` from ``a_ii`` (list) and ``a_ij`` keyed by 1-based pairs."""
        d = len(diag)
        m = [[mpq(0)] * d for _ in range(d)]
        for i, a in enumerate(diag):
            m[i][i] = _entry(a)
        for (i, j), a in off.items():
            m[i - 1][j - 1] = m[j - 1][i - 1] = -_entry(a)
        return cls(tuple(tuple(row) for row in m))

    @classmethod
    def zero(cls, d: int) -> "QuadForm":
        return cls(tuple(tuple(mpq(0) for _ in range(d)) for _ in range(d)))

    @property
    def d(self) -> int:
        return len(self.matrix)

    def a(self, i: int, j: int):
        """``a_ij`` for 1-based ``i, j``."""
        c = self.matrix[i - 1][j - 1]
        return c if i == j else -c

    def gradient_row(self, axis: int) -> MultiPoly:
        """``d/dx_axis (x^T C x) = 2 (C x)_axis`` as a linear polynomial."""
        row = self.matrix[axis - 1]
        return MultiPoly.linear([2 * c for c in row])

    def exponent(self) -> MultiPoly:
        """``x^T C x``."""
        d = self.d
        terms = {}
        for i in range(d):
            for j in range(d):
                c = self.matrix[i][j]
                if c:
                    e = [0] * d
                    e[i] += 1
                    e[j] += 1
                    terms[tuple(e)] = terms.get(tuple(e), 0) + c
        return MultiPoly(terms, d)

    def to_float(self) -> "QuadForm":
        return QuadForm(tuple(tuple(float(c) for c in row) for row in self.matrix))


@dataclass(frozen=True)
class GaussianPoly:
    """``P(x) * exp(-x^T C x)``."""

    P: MultiPoly
    C: QuadForm

    def __post_init__(self):
        if self.P.nvars != self.C.d:
            raise DimensionError(f"polynomial has {self.P.nvars} variables, form has {self.C.d}")

    @classmethod
    def gaussian(cls, C: QuadForm) -> "GaussianPoly":
        return cls(MultiPoly.one(C.d), C)

    @property
    def d(self) -> int:
        return self.C.d

    def with_poly(self, P: MultiPoly) -> "GaussianPoly":
        return GaussianPoly(P, self.C)

    def __add__(self, other: "GaussianPoly") -> "GaussianPoly":
        if other.C != self.C:
            raise ValueError("cannot add Gaussian polynomials with different forms")
        return GaussianPoly(self.P + other.P, self.C)

    def scale(self, c) -> "GaussianPoly":
        return GaussianPoly(self.P.scale(c), self.C)

    def evaluate(self, x: Sequence[float]) -> float:
        """Floating-point value at ``x``."""
        import math

        xs = [float(v) for v in x]
        quad = float(self.C.to_float().exponent().evaluate(xs))
        return float(self.P.to_float().evaluate(xs)) * math.exp(-quad)

    def __str__(self):
        return f"({self.P}) * exp(-({self.C.exponent()}))"


def _check_axis(g: GaussianPoly, axis: int):
    if not 1 <= axis <= g.d:
        raise AxisError(f"axis {axis} out of range 1..{g.d}")


def gp_derive(g: GaussianPoly, axis: int) -> GaussianPoly:
    """``d/dx_axis`` of ``P exp(-x^T C x)``; the form ``C`` is unchanged."""
    _check_axis(g, axis)
    i = axis - 1
    return g.with_poly(g.P.derive(i) - g.P * g.C.gradient_row(axis))


def gp_creation(g: GaussianPoly, axis: int) -> GaussianPoly:
    """Creation operator ``-d/dx_axis + 2 x_axis``."""
    _check_axis(g, axis)
    i = axis - 1
    x = MultiPoly.var(i, g.d)
    return g.with_poly(g.P * (g.C.gradient_row(axis) + x * 2) - g.P.derive(i))


def gp_derive_n(g: GaussianPoly, axis: int, m: int) -> GaussianPoly:
    for _ in range(m):
        g = gp_derive(g, axis)
    return g


def gp_creation_n(g: GaussianPoly, axis: int, m: int) -> GaussianPoly:
    for _ in range(m):
        g = gp_creation(g, axis)
    return g
