"""Sparse multivariate polynomials over Q(sqrt 2).

Exponent vectors are packed into a single int (``BITS`` bits per variable),
so that multiplying monomials is integer addition.  Coefficients are
``mpq`` or :class:`~mehler.scalar.ScalarQ2`; numeric callers may also map a
polynomial onto ``float`` coefficients with :meth:`MultiPoly.to_float`.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

from .errors import ArityError, AxisError, DimensionError
from .scalar import ScalarQ2, format_coeff, is_rational, to_mpq

BITS = 12
MASK = (1 << BITS) - 1


def pack(exps: Sequence[int]) -> int:
    key = 0
    for i, e in enumerate(exps):
        if e < 0 or e > MASK:
            raise ValueError(f"exponent {e} out of range")
        key |= e << (BITS * i)
    return key


def unpack(key: int, n: int) -> tuple[int, ...]:
    return tuple((key >> (BITS * i)) & MASK for i in range(n))


def key_degree(key: int, n: int) -> int:
    d = 0
    for _ in range(n):
        d += key & MASK
        key >>= BITS
    return d


def grlex_key(exps: tuple[int, ...]):
    """Sort key for graded lexicographic order (ascending)."""
    return (sum(exps), exps)


def _coerce(c):
    if isinstance(c, (ScalarQ2, float)):
        return c
    return to_mpq(c)


def mul_terms_into(acc: dict, ta: Mapping[int, object], tb: Mapping[int, object]) -> None:
    """Accumulate the product of two packed term maps into ``acc``."""
    get = acc.get
    for ka, ca in ta.items():
        for kb, cb in tb.items():
            k = ka + kb
            acc[k] = get(k, 0) + ca * cb


def add_terms_into(acc: dict, ta: Mapping[int, object], scale=None) -> None:
    get = acc.get
    if scale is None:
        for k, c in ta.items():
            acc[k] = get(k, 0) + c
    else:
        for k, c in ta.items():
            acc[k] = get(k, 0) + c * scale


def strip(terms: dict) -> dict:
    return {k: c for k, c in terms.items() if c}


class MultiPoly:
    """A polynomial in ``x1..xd``; immutable once built.

    Parameters
    ----------
    terms : mapping of exponent tuple to coefficient, optional
    nvars : int
        Number of variables ``d``.
    """

    __slots__ = ("nvars", "_t")

    def __init__(self, terms: Mapping[tuple, object] | None = None, nvars: int = 1):
        self.nvars = nvars
        t = {}
        for exps, c in (terms or {}).items():
            if len(exps) != nvars:
                raise DimensionError(f"exponent {exps} does not have {nvars} entries")
            c = _coerce(c)
            if c:
                k = pack(exps)
                t[k] = t.get(k, 0) + c
        self._t = strip(t)

    @classmethod
    def _raw(cls, nvars: int, packed: dict) -> "MultiPoly":
        p = cls.__new__(cls)
        p.nvars = nvars
        p._t = packed
        return p

    @classmethod
    def constant(cls, c, nvars: int = 1) -> "MultiPoly":
        c = _coerce(c)
        return cls._raw(nvars, {0: c} if c else {})

    @classmethod
    def zero(cls, nvars: int = 1) -> "MultiPoly":
        return cls._raw(nvars, {})

    @classmethod
    def one(cls, nvars: int = 1) -> "MultiPoly":
        return cls._raw(nvars, {0: mpq(1)})

    @classmethod
    def var(cls, i: int, nvars: int) -> "MultiPoly":
        """The variable ``x_{i+1}`` (0-based axis ``i``)."""
        if not 0 <= i < nvars:
            raise AxisError(f"axis {i} out of range for {nvars} variables")
        return cls._raw(nvars, {1 << (BITS * i): mpq(1)})

    @classmethod
    def linear(cls, coeffs: Sequence, constant=0) -> "MultiPoly":
        """``constant + sum_i coeffs[i] * x_i``."""
        n = len(coeffs)
        t = {}
        if constant:
            t[0] = _coerce(constant)
        for i, c in enumerate(coeffs):
            c = _coerce(c)
            if c:
                t[1 << (BITS * i)] = c
        return cls._raw(n, t)

    @classmethod
    def univariate(cls, coeffs: Sequence) -> "MultiPoly":
        """Polynomial in one variable from ascending coefficients."""
        return cls._raw(1, {k: _coerce(c) for k, c in enumerate(coeffs) if c})

    # -- inspection ---------------------------------------------------------

    @property
    def terms(self) -> dict[tuple[int, ...], object]:
        """Exponent tuple to coefficient, in ascending graded-lex order."""
        items = [(unpack(k, self.nvars), c) for k, c in self._t.items()]
        items.sort(key=lambda kv: grlex_key(kv[0]))
        return dict(items)

    def coefficient(self, exps: Sequence[int]):
        return self._t.get(pack(exps), mpq(0))

    def degree(self) -> int:
        """Total degree; ``-1`` for the zero polynomial."""
        if not self._t:
            return -1
        return max(key_degree(k, self.nvars) for k in self._t)

    def degree_in(self, i: int) -> int:
        if not self._t:
            return -1
        return max((k >> (BITS * i)) & MASK for k in self._t)

    def is_zero(self) -> bool:
        return not self._t

    def is_constant(self) -> bool:
        return not self._t or (len(self._t) == 1 and 0 in self._t)

    def constant_term(self):
        return self._t.get(0, mpq(0))

    def is_rational(self) -> bool:
        return all(is_rational(c) for c in self._t.values())

    def __len__(self):
        return len(self._t)

    def __bool__(self):
        return bool(self._t)

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.nvars == other.nvars and self._t == other._t
        try:
            return self._t == MultiPoly.constant(other, self.nvars)._t
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self._t.items())))

    # -- ring operations ----------------------------------------------------

    def _check(self, other: "MultiPoly"):
        if other.nvars != self.nvars:
            raise DimensionError(f"{self.nvars} vs {other.nvars} variables")

    def _lift(self, other):
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        return MultiPoly.constant(other, self.nvars)

    def __add__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        acc = dict(self._t)
        add_terms_into(acc, other._t)
        return MultiPoly._raw(self.nvars, strip(acc))

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw(self.nvars, {k: -c for k, c in self._t.items()})

    def __sub__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        self._check(other)
        acc: dict = {}
        mul_terms_into(acc, self._t, other._t)
        return MultiPoly._raw(self.nvars, strip(acc))

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        if isinstance(other, MultiPoly):
            return NotImplemented
        inv = 1 / (other if isinstance(other, (ScalarQ2, float)) else to_mpq(other))
        return self.scale(inv)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = MultiPoly.one(self.nvars)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c) -> "MultiPoly":
        c = _coerce(c)
        if not c:
            return MultiPoly.zero(self.nvars)
        return MultiPoly._raw(self.nvars, strip({k: v * c for k, v in self._t.items()}))

    def map_coeffs(self, f) -> "MultiPoly":
        return MultiPoly._raw(self.nvars, strip({k: f(c) for k, c in self._t.items()}))

    def to_float(self) -> "MultiPoly":
        return self.map_coeffs(float)

    # -- calculus and substitution -----------------------------------------

    def derive(self, i: int) -> "MultiPoly":
        """Partial derivative along 0-based axis ``i``."""
        if not 0 <= i < self.nvars:
            raise AxisError(f"axis {i} out of range for {self.nvars} variables")
        shift = BITS * i
        step = 1 << shift
        out = {}
        for k, c in self._t.items():
            e = (k >> shift) & MASK
            if e:
                out[k - step] = c * e
        return MultiPoly._raw(self.nvars, out)

    def derive_n(self, i: int, m: int) -> "MultiPoly":
        p = self
        for _ in range(m):
            if not p:
                break
            p = p.derive(i)
        return p

    def evaluate(self, point: Sequence):
        """Value at ``point``; works for any coefficient/point number type."""
        if len(point) != self.nvars:
            raise DimensionError(f"point has {len(point)} entries, need {self.nvars}")
        total = 0
        for k, c in self._t.items():
            v = c
            for i, e in enumerate(unpack(k, self.nvars)):
                if e:
                    v = v * point[i] ** e
            total = total + v
        return total

    def compose(self, subs: Sequence["MultiPoly"]) -> "MultiPoly":
        """Substitute ``x_i -> subs[i]``; all ``subs`` share one variable count."""
        if len(subs) != self.nvars:
            raise ArityError(f"need {self.nvars} substitutions, got {len(subs)}")
        n = subs[0].nvars
        if self.nvars == 1:
            return _horner(self, subs[0])
        powers: list[dict[int, MultiPoly]] = [{0: MultiPoly.one(n)} for _ in subs]
        result: dict = {}
        for k, c in self._t.items():
            term = MultiPoly.constant(c, n)
            for i, e in enumerate(unpack(k, self.nvars)):
                if e:
                    cache = powers[i]
                    if e not in cache:
                        cache[e] = subs[i] ** e
                    term = term * cache[e]
            add_terms_into(result, term._t)
        return MultiPoly._raw(n, strip(result))

    def embed(self, nvars: int, axes: Sequence[int]) -> "MultiPoly":
        """Rename variable ``j`` to axis ``axes[j]`` of a ``nvars``-variable ring."""
        if len(axes) != self.nvars:
            raise ArityError("axes must list one target per variable")
        out = {}
        for k, c in self._t.items():
            new = 0
            for j, e in enumerate(unpack(k, self.nvars)):
                new += e << (BITS * axes[j])
            out[new] = c
        return MultiPoly._raw(nvars, out)

    def univariate_coeffs(self) -> list:
        """Ascending coefficient list of a one-variable polynomial."""
        if self.nvars != 1:
            raise ArityError("polynomial is not univariate")
        n = self.degree()
        return [self._t.get(k, mpq(0)) for k in range(n + 1)]

    # -- printing -----------------------------------------------------------

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"MultiPoly({format_poly(self)!r}, nvars={self.nvars})"


def _horner(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    coeffs = p.univariate_coeffs()
    if not coeffs:
        return MultiPoly.zero(q.nvars)
    result = MultiPoly.constant(coeffs[-1], q.nvars)
    for c in reversed(coeffs[:-1]):
        result = result * q + c
    return result


def format_monomial(exps: Sequence[int], names: Sequence[str]) -> str:
    parts = []
    for name, e in zip(names, exps):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def format_poly(p: MultiPoly, names: Sequence[str] | None = None) -> str:
    """Canonical text, highest graded-lex term first."""
    if not p._t:
        return "0"
    if names is None:
        names = [f"x{i + 1}" for i in range(p.nvars)] if p.nvars > 1 else ["x"]
    items = sorted(p.terms.items(), key=lambda kv: grlex_key(kv[0]), reverse=True)
    out = []
    for exps, c in items:
        mono = format_monomial(exps, names)
        cs = format_coeff(c)
        if " " in cs:
            cs = f"({cs})"
        if not mono:
            out.append(cs)
        elif cs == "1":
            out.append(mono)
        elif cs == "-1":
            out.append(f"-{mono}")
        else:
            out.append(f"{cs}*{mono}")
    return " + ".join(out).replace("+ -", "- ")


def polys_equal(polys: Iterable[MultiPoly]) -> bool:
    polys = list(polys)
    return all(p == polys[0] for p in polys[1:])
