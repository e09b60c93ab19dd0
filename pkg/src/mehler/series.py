"""Truncated multivariate power series in ``u1..um`` with polynomial coefficients.

A :class:`TruncSeries` keeps every monomial ``u^a`` with ``|a| <= order``; the
coefficient of each is a :class:`~mehler.poly.MultiPoly` in ``x1..xd``.  The
x-variables are never truncated.

``exp`` and rational powers use the graded (Euler operator) recurrences

    n E_n = sum_{j=1..n} j s_j E_{n-j}                  (E = exp s)
    n E_n = sum_{j=1..n} (alpha*j - n + j) s_j E_{n-j}  (E = s^alpha, s_0 = 1)

where ``s_j`` is the homogeneous part of total u-degree ``j``.  Each step is a
product of two homogeneous pieces, so no work is wasted on terms that are
truncated away.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterator, Mapping, Sequence

from gmpy2 import mpq

from .errors import ArityError, AxisError, DimensionError, NonNilpotentError, NonUnitError
from .poly import (
    BITS,
    MASK,
    MultiPoly,
    add_terms_into,
    grlex_key,
    key_degree,
    mul_terms_into,
    pack,
    strip,
    unpack,
)
from .scalar import to_mpq


@lru_cache(maxsize=None)
def _deg(key: int, n: int) -> int:
    return key_degree(key, n)


class TruncSeries:
    """Power series in ``nu`` variables truncated at total degree ``order``.

    Parameters
    ----------
    nu : int
        Number of series variables (``t`` or ``u1, u2, u3``).
    nx : int
        Number of polynomial variables in each coefficient.
    order : int
        Highest total u-degree retained.
    coeffs : mapping of u-exponent tuple to MultiPoly (or scalar), optional
    """

    __slots__ = ("nu", "nx", "order", "_c")

    def __init__(self, nu: int, nx: int, order: int, coeffs: Mapping | None = None):
        if order < 0:
            raise ValueError("truncation order must be non-negative")
        self.nu, self.nx, self.order = nu, nx, order
        c: dict[int, MultiPoly] = {}
        for exps, p in (coeffs or {}).items():
            if len(exps) != nu:
                raise DimensionError(f"u-exponent {exps} does not have {nu} entries")
            if sum(exps) > order:
                continue
            if not isinstance(p, MultiPoly):
                p = MultiPoly.constant(p, nx)
            elif p.nvars != nx:
                raise DimensionError(f"coefficient has {p.nvars} x-variables, need {nx}")
            if p:
                k = pack(exps)
                c[k] = c[k] + p if k in c else p
        self._c = {k: p for k, p in c.items() if p}

    @classmethod
    def _raw(cls, nu, nx, order, packed: dict) -> "TruncSeries":
        s = cls.__new__(cls)
        s.nu, s.nx, s.order = nu, nx, order
        s._c = packed
        return s

    @classmethod
    def _from_acc(cls, nu, nx, order, acc: dict) -> "TruncSeries":
        out = {}
        for k, t in acc.items():
            t = strip(t)
            if t:
                out[k] = MultiPoly._raw(nx, t)
        return cls._raw(nu, nx, order, out)

    @classmethod
    def constant(cls, c, nu: int, nx: int, order: int) -> "TruncSeries":
        p = c if isinstance(c, MultiPoly) else MultiPoly.constant(c, nx)
        return cls._raw(nu, nx, order, {0: p} if p else {})

    @classmethod
    def one(cls, nu: int, nx: int, order: int) -> "TruncSeries":
        return cls.constant(1, nu, nx, order)

    @classmethod
    def zero(cls, nu: int, nx: int, order: int) -> "TruncSeries":
        return cls._raw(nu, nx, order, {})

    @classmethod
    def var(cls, j: int, nu: int, nx: int, order: int) -> "TruncSeries":
        """The series variable ``u_{j+1}`` (0-based ``j``)."""
        if not 0 <= j < nu:
            raise AxisError(f"u-axis {j} out of range for {nu} variables")
        if order < 1:
            return cls.zero(nu, nx, order)
        return cls._raw(nu, nx, order, {1 << (BITS * j): MultiPoly.one(nx)})

    @classmethod
    def xvar(cls, i: int, nu: int, nx: int, order: int) -> "TruncSeries":
        """The polynomial variable ``x_{i+1}`` as a constant series."""
        return cls.constant(MultiPoly.var(i, nx), nu, nx, order)

    def like(self, c=0) -> "TruncSeries":
        """A constant series with this series' shape."""
        return TruncSeries.constant(c, self.nu, self.nx, self.order)

    # -- inspection ---------------------------------------------------------

    def coefficient(self, exps: Sequence[int]) -> MultiPoly:
        return self._c.get(pack(exps), MultiPoly.zero(self.nx))

    def constant_term(self) -> MultiPoly:
        return self._c.get(0, MultiPoly.zero(self.nx))

    @property
    def coeffs(self) -> dict[tuple[int, ...], MultiPoly]:
        """u-exponent tuple to coefficient, ascending graded-lex order."""
        items = [(unpack(k, self.nu), p) for k, p in self._c.items()]
        items.sort(key=lambda kv: grlex_key(kv[0]))
        return dict(items)

    def items(self) -> Iterator[tuple[tuple[int, ...], MultiPoly]]:
        return iter(self.coeffs.items())

    def nterms(self) -> int:
        """Number of stored (u, x) monomials."""
        return sum(len(p) for p in self._c.values())

    def is_rational(self) -> bool:
        return all(p.is_rational() for p in self._c.values())

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return (
            self.nu == other.nu
            and self.nx == other.nx
            and self.order == other.order
            and self._c == other._c
        )

    def __hash__(self):
        return hash((self.nu, self.nx, self.order, frozenset(self._c.items())))

    def __repr__(self):
        return f"TruncSeries(nu={self.nu}, nx={self.nx}, order={self.order}, terms={len(self._c)})"

    def __str__(self):
        return format_series(self)

    # -- shape checks ---------------------------------------------------------

    def _check(self, other: "TruncSeries"):
        if (self.nu, self.nx, self.order) != (other.nu, other.nx, other.order):
            raise DimensionError(
                f"series shapes differ: (nu, nx, order) = {(self.nu, self.nx, self.order)}"
                f" vs {(other.nu, other.nx, other.order)}"
            )

    def _lift(self, other) -> "TruncSeries":
        if isinstance(other, TruncSeries):
            self._check(other)
            return other
        return self.like(other)

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        out = dict(self._c)
        for k, p in other._c.items():
            q = out[k] + p if k in out else p
            if q:
                out[k] = q
            else:
                out.pop(k, None)
        return TruncSeries._raw(self.nu, self.nx, self.order, out)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries._raw(self.nu, self.nx, self.order, {k: -p for k, p in self._c.items()})

    def __sub__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncSeries):
            self._check(other)
            return _mul(self, other, self.order)
        if isinstance(other, MultiPoly):
            if other.nvars != self.nx:
                raise DimensionError("x-variable counts differ")
            return TruncSeries._raw(
                self.nu, self.nx, self.order,
                {k: q for k, p in self._c.items() if (q := p * other)},
            )
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (TruncSeries, MultiPoly)):
            return NotImplemented
        return self.scale(1 / to_mpq(other))

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = self.like(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale(self, c) -> "TruncSeries":
        if isinstance(c, MultiPoly):
            return self * c
        out = {}
        for k, p in self._c.items():
            q = p.scale(c)
            if q:
                out[k] = q
        return TruncSeries._raw(self.nu, self.nx, self.order, out)

    def mul_upto(self, other: "TruncSeries", order: int) -> "TruncSeries":
        """Product truncated at ``min(order, self.order)`` (shape kept)."""
        self._check(other)
        return _mul(self, other, min(order, self.order))

    # -- truncation and grading -----------------------------------------------

    def truncate(self, order: int) -> "TruncSeries":
        """Re-truncate at a lower (or equal) order."""
        if order > self.order:
            raise DimensionError(f"cannot raise truncation order {self.order} to {order}")
        return TruncSeries._raw(
            self.nu, self.nx, order,
            {k: p for k, p in self._c.items() if _deg(k, self.nu) <= order},
        )

    def homogeneous(self) -> list[dict[int, MultiPoly]]:
        """Homogeneous components: entry ``j`` maps packed u-keys of degree ``j``."""
        parts: list[dict[int, MultiPoly]] = [{} for _ in range(self.order + 1)]
        for k, p in self._c.items():
            parts[_deg(k, self.nu)][k] = p
        return parts

    # -- calculus -------------------------------------------------------------

    def derive_u(self, j: int) -> "TruncSeries":
        """Formal partial derivative in ``u_{j+1}``; the order is kept."""
        if not 0 <= j < self.nu:
            raise AxisError(f"u-axis {j} out of range for {self.nu} variables")
        shift = BITS * j
        step = 1 << shift
        out = {}
        for k, p in self._c.items():
            e = (k >> shift) & MASK
            if e:
                out[k - step] = p * e
        return TruncSeries._raw(self.nu, self.nx, self.order, out)

    def derive_x(self, i: int, m: int = 1) -> "TruncSeries":
        """``m``-th partial derivative in ``x_{i+1}``, term by term."""
        out = {}
        for k, p in self._c.items():
            q = p.derive_n(i, m)
            if q:
                out[k] = q
        return TruncSeries._raw(self.nu, self.nx, self.order, out)

    def substitute_zero(self, js: Sequence[int]) -> "TruncSeries":
        """Set the listed u-variables to zero."""
        masks = [MASK << (BITS * j) for j in js]
        return TruncSeries._raw(
            self.nu, self.nx, self.order,
            {k: p for k, p in self._c.items() if not any(k & m for m in masks)},
        )

    def relabel(self, u_axes: Sequence[int] | None = None,
                x_axes: Sequence[int] | None = None) -> "TruncSeries":
        """Move ``u_j`` to position ``u_axes[j]`` and ``x_i`` to ``x_axes[i]`` (0-based)."""
        u_axes = list(range(self.nu)) if u_axes is None else list(u_axes)
        out = {}
        for k, p in self._c.items():
            new = 0
            for j, e in enumerate(unpack(k, self.nu)):
                new += e << (BITS * u_axes[j])
            out[new] = p if x_axes is None else p.embed(self.nx, x_axes)
        return TruncSeries._raw(self.nu, self.nx, self.order, out)

    def map_coeffs(self, f) -> "TruncSeries":
        out = {}
        for k, p in self._c.items():
            q = f(p)
            if q:
                out[k] = q
        return TruncSeries._raw(self.nu, self.nx, self.order, out)

    def evaluate(self, u: Sequence, x: Sequence):
        """Numeric value of the truncated sum at ``(u, x)``."""
        total = 0
        for k, p in self._c.items():
            mono = 1
            for j, e in enumerate(unpack(k, self.nu)):
                if e:
                    mono = mono * u[j] ** e
            total = total + mono * p.evaluate(x)
        return total


def _mul(s: TruncSeries, t: TruncSeries, order: int) -> TruncSeries:
    nu = s.nu
    tb = [(kb, _deg(kb, nu), pb._t) for kb, pb in t._c.items()]
    acc: dict[int, dict] = {}
    for ka, pa in s._c.items():
        da = _deg(ka, nu)
        room = order - da
        if room < 0:
            continue
        ta = pa._t
        for kb, db, tbk in tb:
            if db <= room:
                k = ka + kb
                slot = acc.get(k)
                if slot is None:
                    slot = acc[k] = {}
                mul_terms_into(slot, ta, tbk)
    return TruncSeries._from_acc(nu, s.nx, s.order, acc)


def _homog_mul_into(acc: dict, a: dict[int, MultiPoly], b: dict[int, MultiPoly], scale) -> None:
    for ka, pa in a.items():
        for kb, pb in b.items():
            k = ka + kb
            slot = acc.get(k)
            if slot is None:
                slot = acc[k] = {}
            if scale == 1:
                mul_terms_into(slot, pa._t, pb._t)
            else:
                tmp: dict = {}
                mul_terms_into(tmp, pa._t, pb._t)
                add_terms_into(slot, tmp, scale)


def _finish_component(acc: dict, nx: int, divisor) -> dict[int, MultiPoly]:
    out = {}
    inv = 1 / to_mpq(divisor)
    for k, t in acc.items():
        t = strip({m: c * inv for m, c in t.items()})
        if t:
            out[k] = MultiPoly._raw(nx, t)
    return out


def _assemble(s: TruncSeries, parts: list[dict[int, MultiPoly]]) -> TruncSeries:
    out = {}
    for part in parts:
        out.update(part)
    return TruncSeries._raw(s.nu, s.nx, s.order, out)


def series_arith(s: TruncSeries, t: TruncSeries | None, op: str, axis: int | None = None) -> TruncSeries:
    """Dispatch one of ``add``, ``mul``, ``derive_u``, ``derive_x``.

    The derivative ops ignore ``t`` and act along 0-based ``axis``.
    """
    if op == "add":
        s._check(t)
        return s + t
    if op == "mul":
        s._check(t)
        return s * t
    if op == "derive_u":
        return s.derive_u(axis)
    if op == "derive_x":
        return s.derive_x(axis)
    raise ValueError(f"unknown series op {op!r}")


def series_pow(s: TruncSeries, alpha) -> TruncSeries:
    """``s**alpha`` for rational ``alpha``; requires constant term exactly 1."""
    alpha = to_mpq(alpha)
    if s.constant_term() != MultiPoly.one(s.nx):
        raise NonUnitError("rational powers need a series with constant term 1")
    parts = s.homogeneous()
    out = [{0: MultiPoly.one(s.nx)}]
    for n in range(1, s.order + 1):
        acc: dict = {}
        for j in range(1, n + 1):
            if not parts[j] or not out[n - j]:
                continue
            w = alpha * j - n + j
            if w:
                _homog_mul_into(acc, parts[j], out[n - j], w)
        out.append(_finish_component(acc, s.nx, n))
    return _assemble(s, out)


def series_exp(s: TruncSeries) -> TruncSeries:
    """``exp(s)``; the constant u-term of ``s`` must be zero."""
    if s.constant_term():
        raise NonNilpotentError("exp needs a series with zero constant term")
    parts = s.homogeneous()
    out = [{0: MultiPoly.one(s.nx)}]
    for n in range(1, s.order + 1):
        acc: dict = {}
        for j in range(1, n + 1):
            if parts[j] and out[n - j]:
                _homog_mul_into(acc, parts[j], out[n - j], j)
        out.append(_finish_component(acc, s.nx, n))
    return _assemble(s, out)


def poly_compose_series(p: MultiPoly, s: TruncSeries) -> TruncSeries:
    """Evaluate a univariate polynomial at a series by Horner's scheme."""
    if p.nvars != 1:
        raise ArityError(f"expected a univariate polynomial, got {p.nvars} variables")
    coeffs = p.univariate_coeffs()
    if not coeffs:
        return s.like(0)
    result = s.like(coeffs[-1])
    for c in reversed(coeffs[:-1]):
        result = result * s + c
    return result


def format_series(s: TruncSeries, u_names: Sequence[str] | None = None,
                  x_names: Sequence[str] | None = None) -> str:
    """One line per u-monomial, ascending graded-lex order."""
    from .poly import format_monomial, format_poly

    if u_names is None:
        u_names = ["t"] if s.nu == 1 else [f"u{j + 1}" for j in range(s.nu)]
    lines = []
    for exps, p in s.coeffs.items():
        mono = format_monomial(exps, u_names) or "1"
        lines.append(f"[{mono}] {format_poly(p, x_names)}")
    return "\n".join(lines) if lines else "0"



def product_components(a: TruncSeries, b: TruncSeries) -> Iterator[dict[int, MultiPoly]]:
    """Yield the homogeneous parts of ``a*b`` by increasing total degree.

    Lets a caller compare a product against a target one degree at a time
    and stop at the first disagreement without forming the whole product.
    """
    a._check(b)
    pa, pb = a.homogeneous(), b.homogeneous()
    for n in range(a.order + 1):
        acc: dict = {}
        for j in range(n + 1):
            if pa[j] and pb[n - j]:
                _homog_mul_into(acc, pa[j], pb[n - j], 1)
        out = {}
        for k, t in acc.items():
            t = strip(t)
            if t:
                out[k] = MultiPoly._raw(a.nx, t)
        yield out
