"""Coefficient-exact verification of Mehler-type generating-function identities.

Both sides of each identity are expanded as :class:`TruncSeries` in ``t``
(bilinear families) or ``u1, u2, u3`` (trilinear families) with exact
polynomial coefficients in ``x``.  Every location where the closed
form admits more than one reading is an enumerated *variant axis*; the
left-hand side (a brute-force sum of Hermite products) decides which
readings are true.

Axes are 1-based in the formulas below and 0-based in series/polynomial
calls.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, factorial
from typing import Sequence

from gmpy2 import mpq

from .errors import BudgetError, VariantError
from .hermite import _TABLE, hermite_poly
from .poly import MultiPoly, format_poly, grlex_key, unpack
from .scalar import INV_SQRT2, simplify
from .series import (
    TruncSeries,
    poly_compose_series,
    product_components,
    series_exp,
    series_pow,
)
from .theorem import full_enum, lambda_enum

FAMILIES = ("mehler", "carlitz-bilinear", "carlitz-trilinear", "srivastava", "gcmf")
BILINEAR = ("mehler", "carlitz-bilinear")
TRILINEAR = ("carlitz-trilinear", "srivastava", "gcmf")
SHIFT_LENGTH = {"mehler": 0, "carlitz-bilinear": 2, "carlitz-trilinear": 0, "srivastava": 2, "gcmf": 3}

# The literal reading comes first on every axis.
VARIANT_AXES: dict[str, dict[str, tuple[str, ...]]] = {
    "mehler": {},
    "carlitz-bilinear": {"denominator": ("sqrt(1-t^2)", "sqrt(1-4t^2)")},
    "carlitz-trilinear": {"pairs": ("ordered", "unordered")},
    "srivastava": {
        "numerator": ("u3-2u1u1", "u3-2u1u2"),
        "denominator": ("(1-4u1^2)(1-4u2^2)^(1/2)", "((1-4u1^2)(1-4u2^2))^(1/2)"),
        "binding": ("r=r1,s=r2", "r=r2,s=r1"),
    },
    "gcmf": {
        "prefactor": ("product", "single-root"),
        "index": ("as-written", "index-shifted"),
        "radical": ("sqrt(D/(2(1-4u^2)))", "sqrt(D/(1-4u^2))"),
        "range": ("lambda", "full"),
    },
}


def variant_space(family: str) -> list[dict[str, str]]:
    axes = VARIANT_AXES[family]
    if not axes:
        return [{}]
    names = list(axes)
    return [dict(zip(names, combo)) for combo in itertools.product(*axes.values())]


def variant_name(variant: dict[str, str]) -> str:
    if not variant:
        return "classical"
    return "; ".join(f"{k}={v}" for k, v in variant.items())


def variant_names(family: str) -> list[str]:
    return [variant_name(v) for v in variant_space(family)]


def parse_variant(family: str, name: str) -> dict[str, str]:
    for v in variant_space(family):
        if variant_name(v) == name:
            return v
    raise VariantError(f"unknown variant {name!r} for family {family!r}")


@dataclass(frozen=True)
class IdentityInstance:
    """One identity at one truncation order.

    ``variant=None`` means every reading in :func:`variant_space` is tried.
    """

    family: str
    shifts: tuple[int, ...] = ()
    order: int = 4
    variant: str | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.order < 0:
            raise ValueError("order must be non-negative")
        shifts = tuple(int(s) for s in self.shifts)
        if not shifts:
            shifts = (0,) * SHIFT_LENGTH[self.family]
        if len(shifts) != SHIFT_LENGTH[self.family]:
            raise ValueError(f"{self.family} takes {SHIFT_LENGTH[self.family]} shifts, got {len(shifts)}")
        if any(s < 0 for s in shifts):
            raise ValueError("shifts must be non-negative")
        object.__setattr__(self, "shifts", shifts)
        if self.variant is not None:
            parse_variant(self.family, self.variant)

    @property
    def nu(self) -> int:
        return 1 if self.family in BILINEAR else 3

    @property
    def nx(self) -> int:
        return 2 if self.family in BILINEAR else 3

    def bilinear_shifts(self) -> tuple[int, int]:
        return self.shifts if self.family == "carlitz-bilinear" else (0, 0)

    def trilinear_shifts(self) -> tuple[int, int, int]:
        if self.family == "gcmf":
            return self.shifts
        if self.family == "srivastava":
            return (self.shifts[0], self.shifts[1], 0)
        return (0, 0, 0)


# -- building blocks ----------------------------------------------------------


@lru_cache(maxsize=None)
def _herm_axis(n: int, axis: int, nx: int) -> MultiPoly:
    return hermite_poly(n).embed(nx, [axis])


def _vars(nu: int, nx: int, order: int):
    u = [TruncSeries.var(j, nu, nx, order) for j in range(nu)]
    x = [TruncSeries.xvar(i, nu, nx, order) for i in range(nx)]
    return u, x


@lru_cache(maxsize=None)
def delta_series(order: int, nx: int = 3) -> TruncSeries:
    """``1 - 4u1^2 - 4u2^2 - 4u3^2 + 16 u1 u2 u3``."""
    (u1, u2, u3), _ = _vars(3, nx, order)
    return 1 - 4 * u1 * u1 - 4 * u2 * u2 - 4 * u3 * u3 + 16 * u1 * u2 * u3


@lru_cache(maxsize=None)
def _one_minus_4u2(i: int, order: int, nx: int = 3) -> TruncSeries:
    u, _ = _vars(3, nx, order)
    return 1 - 4 * u[i - 1] * u[i - 1]


@lru_cache(maxsize=None)
def _pow_cached(kind: str, i: int, alpha: mpq, order: int, nx: int = 3) -> TruncSeries:
    base = delta_series(order, nx) if kind == "delta" else _one_minus_4u2(i, order, nx)
    return series_pow(base, alpha)


def _others(i: int) -> tuple[int, int]:
    j, k = (a for a in (1, 2, 3) if a != i)
    return j, k


@lru_cache(maxsize=None)
def xi_series(i: int, order: int) -> TruncSeries:
    """``X_i = ((1-4u_i^2) x_i - 2 sum_{j != i} (u_k - 2 u_i u_j) x_j) / sqrt(D (1-4u_i^2))``."""
    u, x = _vars(3, 3, order)
    j, k = _others(i)
    U = lambda a: u[a - 1]  # noqa: E731
    X = lambda a: x[a - 1]  # noqa: E731
    num = (1 - 4 * U(i) * U(i)) * X(i) - 2 * (
        (U(k) - 2 * U(i) * U(j)) * X(j) + (U(j) - 2 * U(i) * U(k)) * X(k)
    )
    return num * series_pow(delta_series(order) * _one_minus_4u2(i, order), mpq(-1, 2))


@lru_cache(maxsize=None)
def trilinear_exponent(order: int, pairs: str = "unordered") -> TruncSeries:
    """``sum x_i^2 - (sum x_i^2 - 4 sum x_i^2 u_i^2 - 4 sum x_i x_j u_k + 8 sum u_i u_j x_i x_j) / D``.

    ``pairs`` selects whether the two pair sums run over unordered pairs
    ``i < j`` or over ordered pairs ``i != j`` (which doubles them).
    """
    u, x = _vars(3, 3, order)
    w = 1 if pairs == "unordered" else 2
    sq = x[0] * x[0] + x[1] * x[1] + x[2] * x[2]
    q = sq - 4 * sum((x[i] * x[i] * u[i] * u[i] for i in range(3)), sq.like(0))
    for i, j in ((0, 1), (0, 2), (1, 2)):
        k = 3 - i - j
        q = q - (4 * w) * x[i] * x[j] * u[k] + (8 * w) * u[i] * u[j] * x[i] * x[j]
    return sq - q * series_pow(delta_series(order), -1)


@lru_cache(maxsize=None)
def trilinear_exp(order: int, pairs: str = "unordered") -> TruncSeries:
    return series_exp(trilinear_exponent(order, pairs))


@lru_cache(maxsize=None)
def _herm_of_xi(n: int, i: int, order: int) -> TruncSeries:
    return poly_compose_series(hermite_poly(n), xi_series(i, order))


@lru_cache(maxsize=None)
def _gcmf_nested(r: tuple[int, int, int], k: tuple[int, ...], order: int) -> TruncSeries:
    """``H_{r3-k2}(X3) D3^{k2}[H_{r2-k1}(X2) D2^{k1} H_{r1}(X1)]`` built inside out."""
    if not k:
        return _herm_of_xi(r[0], 1, order)
    inner = _gcmf_nested(r, k[:-1], order)
    axis = len(k)  # 0-based x-axis for this layer
    return _herm_of_xi(r[axis] - k[-1], axis + 1, order) * inner.derive_x(axis, k[-1])


# -- left-hand sides ----------------------------------------------------------


def lhs_series(instance: IdentityInstance) -> TruncSeries:
    """Brute-force expansion of the defining sum of Hermite products."""
    N = instance.order
    if instance.family in BILINEAR:
        r, s = instance.bilinear_shifts()
        _TABLE.extend(N + max(r, s))
        coeffs = {
            (n,): (_herm_axis(n + r, 0, 2) * _herm_axis(n + s, 1, 2)).scale(mpq(1, factorial(n)))
            for n in range(N + 1)
        }
        return TruncSeries(1, 2, N, coeffs)
    r1, r2, r3 = instance.trilinear_shifts()
    _TABLE.extend(2 * N + max(r1, r2, r3))
    coeffs = {}
    for m in range(N + 1):
        for n in range(N + 1 - m):
            for p in range(N + 1 - m - n):
                c = mpq(1, factorial(m) * factorial(n) * factorial(p))
                coeffs[(m, n, p)] = (
                    _herm_axis(n + p + r1, 0, 3) * _herm_axis(p + m + r2, 1, 3)
                ).scale(c) * _herm_axis(m + n + r3, 2, 3)
    return TruncSeries(3, 3, N, coeffs)


# -- right-hand sides ---------------------------------------------------------


def _bilinear_factors(instance: IdentityInstance, variant: dict[str, str]):
    N = instance.order
    r, s = instance.bilinear_shifts()
    (t,), (x1, x2) = _vars(1, 2, N)
    base = 1 - 4 * t * t
    pref = series_pow(base, mpq(-(r + s + 1), 2))
    expo = (4 * x1 * x2 * t - 4 * (x1 * x1 + x2 * x2) * t * t) * series_pow(base, -1)
    if instance.family == "mehler":
        return pref, series_exp(expo)
    den = variant["denominator"]
    if den == "sqrt(1-t^2)":
        inv_root = series_pow(1 - t * t, mpq(-1, 2))
    elif den == "sqrt(1-4t^2)":
        inv_root = series_pow(base, mpq(-1, 2))
    else:
        raise VariantError(f"unknown denominator {den!r}")
    a1 = (x1 - 2 * x2 * t) * inv_root
    a2 = (x2 - 2 * x1 * t) * inv_root
    total = t.like(0)
    for k in range(min(r, s) + 1):
        c = 4**k * factorial(k) * comb(r, k) * comb(s, k)
        term = poly_compose_series(hermite_poly(r - k), a1) * poly_compose_series(hermite_poly(s - k), a2)
        total = total + (t**k * term).scale(c)
    return pref * total, series_exp(expo)


def _srivastava_sum(instance: IdentityInstance, variant: dict[str, str]) -> TruncSeries:
    N = instance.order
    r1, r2 = instance.shifts
    if variant["binding"] == "r=r1,s=r2":
        r, s = r1, r2
    elif variant["binding"] == "r=r2,s=r1":
        r, s = r2, r1
    else:
        raise VariantError(f"unknown binding {variant['binding']!r}")
    (u1, u2, u3), _ = _vars(3, 3, N)
    if variant["numerator"] == "u3-2u1u1":
        num = u3 - 2 * u1 * u1
    elif variant["numerator"] == "u3-2u1u2":
        num = u3 - 2 * u1 * u2
    else:
        raise VariantError(f"unknown numerator {variant['numerator']!r}")
    if variant["denominator"] == "(1-4u1^2)(1-4u2^2)^(1/2)":
        inv_den = _pow_cached("u", 1, mpq(-1), N) * _pow_cached("u", 2, mpq(-1, 2), N)
    elif variant["denominator"] == "((1-4u1^2)(1-4u2^2))^(1/2)":
        inv_den = _pow_cached("u", 1, mpq(-1, 2), N) * _pow_cached("u", 2, mpq(-1, 2), N)
    else:
        raise VariantError(f"unknown denominator {variant['denominator']!r}")
    ratio = num * inv_den
    total = ratio.like(0)
    for k in range(min(r, s) + 1):
        c = 4**k * factorial(k) * comb(r, k) * comb(s, k)
        if not c:
            continue
        herm = _herm_of_xi(r - k, 1, N) * _herm_of_xi(s - k, 2, N)
        total = total + (ratio**k).scale(c) * herm
    pref = (
        _pow_cached("delta", 0, mpq(-(r1 + r2 + 1), 2), N)
        * _pow_cached("u", 1, mpq(r, 2), N)
        * _pow_cached("u", 2, mpq(s, 2), N)
    )
    return pref * total


def _gcmf_sum(instance: IdentityInstance, variant: dict[str, str]) -> TruncSeries:
    N = instance.order
    r = instance.shifts
    if variant["range"] == "lambda":
        ks = lambda_enum(r)
    elif variant["range"] == "full":
        ks = full_enum(r)
    else:
        raise VariantError(f"unknown range {variant['range']!r}")
    if variant["radical"] == "sqrt(D/(2(1-4u^2)))":
        const = INV_SQRT2
    elif variant["radical"] == "sqrt(D/(1-4u^2))":
        const = mpq(1)
    else:
        raise VariantError(f"unknown radical {variant['radical']!r}")
    if variant["index"] not in ("as-written", "index-shifted"):
        raise VariantError(f"unknown index {variant['index']!r}")
    shift = 0 if variant["index"] == "as-written" else 1

    def rho_pow(i: int, k: int) -> TruncSeries:
        # (sqrt(D / (c (1 - 4 u_j^2))))^k with j = i or i+1
        j = i + shift
        return (
            _pow_cached("delta", 0, mpq(k, 2), N) * _pow_cached("u", j, mpq(-k, 2), N)
        ).scale(simplify(const**k))

    total = delta_series(N).like(0)
    for k in ks:
        coef = delta_series(N).like(1)
        scalar = 1
        for i, ki in enumerate(k, start=1):
            scalar *= (-1) ** ki * comb(r[i], ki)
            if ki:
                coef = coef * rho_pow(i, ki)
        if scalar:
            total = total + (coef.scale(scalar)) * _gcmf_nested(r, k, N)
    if variant["prefactor"] == "product":
        pref = _pow_cached("delta", 0, mpq(-(sum(r) + 3), 2), N)
    elif variant["prefactor"] == "single-root":
        pref = _pow_cached("delta", 0, mpq(-(sum(r) + 1), 2), N)
    else:
        raise VariantError(f"unknown prefactor {variant['prefactor']!r}")
    for i in (1, 2, 3):
        if r[i - 1]:
            pref = pref * _pow_cached("u", i, mpq(r[i - 1], 2), N)
    return pref * total


def rhs_factors(instance: IdentityInstance, variant: str | dict | None = None):
    """Two series whose product is the right-hand side under ``variant``.

    The second factor is always the Gaussian ``exp(...)`` of the identity,
    shared between variants and instances of a given order.
    """
    if variant is None:
        variant = instance.variant
    if isinstance(variant, str):
        variant = parse_variant(instance.family, variant)
    if variant is None:
        variant = variant_space(instance.family)[-1]
    family, N = instance.family, instance.order
    if family in BILINEAR:
        return _bilinear_factors(instance, variant)
    if family == "carlitz-trilinear":
        pairs = variant["pairs"]
        if pairs not in VARIANT_AXES[family]["pairs"]:
            raise VariantError(f"unknown pairs reading {pairs!r}")
        return _pow_cached("delta", 0, mpq(-1, 2), N), trilinear_exp(N, pairs)
    if family == "srivastava":
        return _srivastava_sum(instance, variant), trilinear_exp(N)
    return _gcmf_sum(instance, variant), trilinear_exp(N)


def rhs_bilinear(instance: IdentityInstance, variant: str | dict | None = None) -> TruncSeries:
    """Mehler / Carlitz bilinear closed form expanded to the instance order."""
    if instance.family not in BILINEAR:
        raise ValueError(f"{instance.family} is not a bilinear family")
    a, b = rhs_factors(instance, variant)
    return a * b


def rhs_trilinear(instance: IdentityInstance, variant: str | dict | None = None) -> TruncSeries:
    """Trilinear, Srivastava or generalized closed form expanded to the instance order."""
    if instance.family not in TRILINEAR:
        raise ValueError(f"{instance.family} is not a trilinear family")
    a, b = rhs_factors(instance, variant)
    return a * b


def rhs_series(instance: IdentityInstance, variant: str | dict | None = None) -> TruncSeries:
    a, b = rhs_factors(instance, variant)
    return a * b


# -- verification -------------------------------------------------------------


@dataclass
class Budget:
    """Optional caps on stored series terms and wall time."""

    max_terms: int | None = None
    max_seconds: float | None = None
    start: float = field(default_factory=time.perf_counter)

    def check(self, *series: TruncSeries, partial=None) -> None:
        if self.max_seconds is not None and time.perf_counter() - self.start > self.max_seconds:
            raise BudgetError(f"time budget of {self.max_seconds}s exceeded", partial)
        if self.max_terms is not None:
            for s in series:
                if s.nterms() > self.max_terms:
                    raise BudgetError(f"series with {s.nterms()} terms exceeds budget {self.max_terms}", partial)


@dataclass
class Mismatch:
    exponent: tuple[int, ...]
    lhs: str
    rhs: str

    def to_dict(self) -> dict:
        return {"u_exponent": list(self.exponent), "lhs": self.lhs, "rhs": self.rhs}


@dataclass
class VariantOutcome:
    name: str
    matched: bool
    first_mismatch: Mismatch | None = None

    def to_dict(self) -> dict:
        d = {"name": self.name, "matched": self.matched}
        if self.first_mismatch is not None:
            d["first_mismatch"] = self.first_mismatch.to_dict()
        return d


@dataclass
class VerificationReport:
    """Outcome of checking one instance against each requested reading."""

    instance: IdentityInstance
    variants: list[VariantOutcome]
    elapsed: float = 0.0
    lhs_rational: bool = True
    complete: bool = True

    @property
    def matched_variants(self) -> list[str]:
        return [v.name for v in self.variants if v.matched]

    @property
    def matched_variant(self) -> str | None:
        m = self.matched_variants
        return m[0] if m else None

    def to_dict(self, timings: bool = True) -> dict:
        d = {
            "family": self.instance.family,
            "shifts": list(self.instance.shifts),
            "order": self.instance.order,
            "matched_variant": self.matched_variant,
            "variants": [v.to_dict() for v in self.variants],
        }
        if not self.lhs_rational:
            d["lhs_rational"] = False
        if not self.complete:
            d["complete"] = False
        d["elapsed_ms"] = round(self.elapsed * 1000, 3) if timings else 0
        return d


def _names(instance: IdentityInstance) -> list[str]:
    if instance.variant is not None:
        return [instance.variant]
    return variant_names(instance.family)


def _first_mismatch(comp: dict, target: dict, nu: int, u_names) -> Mismatch:
    keys = set(comp) | set(target)
    bad = [k for k in keys if comp.get(k) != target.get(k)]
    k = min(bad, key=lambda key: grlex_key(unpack(key, nu)))
    zero = MultiPoly.zero(next(iter((comp or target).values())).nvars)
    return Mismatch(
        unpack(k, nu),
        format_poly(target.get(k, zero)),
        format_poly(comp.get(k, zero)),
    )


def verify_identity(instance: IdentityInstance, budget: Budget | None = None) -> VerificationReport:
    """Compare the LHS with each variant's RHS coefficient by coefficient.

    The RHS product is formed one total degree at a time, so a wrong
    reading stops at its first failing degree; the reported mismatch is the
    smallest failing u-exponent in graded-lex order.
    """
    budget = budget or Budget()
    start = time.perf_counter()
    report = VerificationReport(instance, [])
    lhs = lhs_series(instance)
    budget.check(lhs, partial=report)
    report.lhs_rational = lhs.is_rational()
    lhs_parts = lhs.homogeneous()
    for name in _names(instance):
        if not report.lhs_rational:
            report.variants.append(VariantOutcome(name, False, None))
            continue
        a, b = rhs_factors(instance, name)
        budget.check(a, b, partial=report)
        mismatch = None
        for n, comp in enumerate(product_components(a, b)):
            if comp != lhs_parts[n]:
                mismatch = _first_mismatch(comp, lhs_parts[n], instance.nu, None)
                break
            budget.check(partial=report)
        report.variants.append(VariantOutcome(name, mismatch is None, mismatch))
        report.elapsed = time.perf_counter() - start
    report.elapsed = time.perf_counter() - start
    return report


def consistent_variants(reports: Sequence[VerificationReport]) -> list[str]:
    """Readings that verified on every report of a sweep, in canonical order."""
    if not reports:
        return []
    names = [v.name for v in reports[0].variants]
    return [n for n in names if all(n in r.matched_variants for r in reports)]


# -- Cayley matrix identity ---------------------------------------------------

CAYLEY_CORNERS = ("1-u3^2", "1-4u3^2")


def _mat_mul(a, b):
    n = len(a)
    return [[sum((a[i][k] * b[k][j] for k in range(n)), a[0][0].like(0)) for j in range(n)] for i in range(n)]


def cayley_sides(order: int = 6, corner: str = "1-4u3^2"):
    """``(I + 2M)(-I + (2/D) Q)`` and ``I - 2M`` as 3x3 matrices of u-series."""
    if corner not in CAYLEY_CORNERS:
        raise VariantError(f"unknown corner reading {corner!r}")
    (u1, u2, u3), _ = _vars(3, 0, order)
    one, zero = u1.like(1), u1.like(0)
    M = [[zero, u3, u2], [u3, zero, u1], [u2, u1, zero]]
    c33 = 1 - u3 * u3 if corner == "1-u3^2" else 1 - 4 * u3 * u3
    Q = [
        [1 - 4 * u1 * u1, 4 * u1 * u2 - 2 * u3, 4 * u1 * u3 - 2 * u2],
        [4 * u1 * u2 - 2 * u3, 1 - 4 * u2 * u2, 4 * u2 * u3 - 2 * u1],
        [4 * u1 * u3 - 2 * u2, 4 * u2 * u3 - 2 * u1, c33],
    ]
    inv_delta = series_pow(delta_series(order, 0), -1)
    eye = [[one if i == j else zero for j in range(3)] for i in range(3)]
    i_plus = [[eye[i][j] + 2 * M[i][j] for j in range(3)] for i in range(3)]
    i_minus = [[eye[i][j] - 2 * M[i][j] for j in range(3)] for i in range(3)]
    cayley = [[-eye[i][j] + 2 * inv_delta * Q[i][j] for j in range(3)] for i in range(3)]
    return _mat_mul(i_plus, cayley), i_minus


def cayley_check(order: int = 6, corner: str = "1-4u3^2") -> bool:
    """Exact check that ``(I-2M)/(I+2M) = -I + (2/D) Q`` to total u-degree ``order``."""
    lhs, rhs = cayley_sides(order, corner)
    return all(lhs[i][j] == rhs[i][j] for i in range(3) for j in range(3))
