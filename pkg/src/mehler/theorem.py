"""Creation operators acting on a dilated Gaussian ``exp(-x^T C x)``.

Closed forms for ``(A_d^*)^{r_d} ... (A_1^*)^{r_1} exp(-x^T C x)`` together
with the brute-force operator chain they are checked against.

Two readings of the closed form are supported:

``index``
    ``"as-written"`` divides the ``k_i`` term by ``(1+a_ii)^{k_i/2}``;
    ``"index-shifted"`` uses ``(1+a_{i+1,i+1})^{k_i/2}``.
``index_set``
    ``"lambda"`` sums over ``k`` with ``sum k_i <= min(r)``; ``"full"`` lets
    each ``k_i`` range over ``0..r_{i+1}`` independently.
"""

from __future__ import annotations

import itertools
import random
from math import comb, factorial
from typing import Sequence

from gmpy2 import mpq

from .errors import ArityError, VariantError
from .gaussian import GaussianPoly, QuadForm, gp_creation_n
from .hermite import hermite_of
from .poly import MultiPoly
from .scalar import sqrt_exact

INDEX_VARIANTS = ("as-written", "index-shifted")
INDEX_SETS = ("lambda", "full")


def lambda_enum(r: Sequence[int]) -> list[tuple[int, ...]]:
    """All ``(k_1..k_{d-1})`` with ``k_i >= 0`` and ``sum k_i <= min(r)``, lexicographic."""
    d = len(r)
    if d < 2:
        raise ArityError("the index set needs d >= 2")
    bound = min(r)
    return [k for k in itertools.product(range(bound + 1), repeat=d - 1) if sum(k) <= bound]


def full_enum(r: Sequence[int]) -> list[tuple[int, ...]]:
    """All ``k`` with ``0 <= k_i <= r_{i+1}``, lexicographic."""
    d = len(r)
    if d < 2:
        raise ArityError("the index set needs d >= 2")
    return list(itertools.product(*(range(r[i + 1] + 1) for i in range(d - 1))))


def lemma_dg_closed(m: int, C: QuadForm, axis: int) -> GaussianPoly:
    """Closed form of ``D_axis^m exp(-x^T C x)``.

    ``(-1)^m a^{m/2} H_m(sqrt(a) x_i - sum_{j != i} a_ij / sqrt(a) x_j) exp(-x^T C x)``
    with ``a = a_ii``.  Raises :class:`RadicalError` when ``sqrt(a_ii)`` is
    not in Q(sqrt 2).
    """
    d = C.d
    root = sqrt_exact(C.a(axis, axis))
    lin = [-C.a(axis, j) / root for j in range(1, d + 1)]
    lin[axis - 1] = root
    arg = MultiPoly.linear(lin)
    P = hermite_of(m, arg).scale((-1) ** m * root**m)
    return GaussianPoly(P, C)


def s_form(C: QuadForm, axis: int) -> tuple[MultiPoly, object]:
    """``S_i(x)`` and ``sqrt(1 + a_ii)`` for 1-based ``axis``."""
    d = C.d
    one_plus = 1 + C.a(axis, axis)
    rho = sqrt_exact(one_plus)
    lin = [-C.a(axis, j) / rho for j in range(1, d + 1)]
    lin[axis - 1] = one_plus / rho
    return MultiPoly.linear(lin), rho


def creation_chain_lhs(C: QuadForm, r: Sequence[int]) -> GaussianPoly:
    """Apply ``A_1^*`` ``r_1`` times, then ``A_2^*`` ``r_2`` times, and so on."""
    if len(r) != C.d:
        raise ArityError(f"shift vector has {len(r)} entries, form has dimension {C.d}")
    g = GaussianPoly.gaussian(C)
    for axis, m in enumerate(r, start=1):
        g = gp_creation_n(g, axis, m)
    return g


def theorem_rhs(C: QuadForm, r: Sequence[int], variant: str = "index-shifted",
                index_set: str = "full") -> GaussianPoly:
    """Closed form of the creation chain under the chosen reading."""
    if variant not in INDEX_VARIANTS:
        raise VariantError(f"unknown index variant {variant!r}")
    if index_set not in INDEX_SETS:
        raise VariantError(f"unknown index set {index_set!r}")
    d = C.d
    if len(r) != d:
        raise ArityError(f"shift vector has {len(r)} entries, form has dimension {d}")
    forms = [s_form(C, i) for i in range(1, d + 1)]
    rho = [f[1] for f in forms]
    herm = {}

    def H(n, i):
        if (n, i) not in herm:
            herm[n, i] = hermite_of(n, forms[i][0])
        return herm[n, i]

    if d == 1:
        ks: list[tuple[int, ...]] = [()]
    else:
        ks = lambda_enum(r) if index_set == "lambda" else full_enum(r)

    nested: dict[tuple[int, ...], MultiPoly] = {(): H(r[0], 0)}

    def P(k: tuple[int, ...]) -> MultiPoly:
        if k not in nested:
            inner = P(k[:-1])
            i = len(k)  # 0-based axis of this layer
            n = r[i] - k[-1]
            assert n >= 0, "k outside its index set"
            nested[k] = H(n, i) * inner.derive_n(i, k[-1])
        return nested[k]

    total = MultiPoly.zero(d)
    for k in ks:
        coeff = mpq(1)
        for i, ki in enumerate(k):
            j = i if variant == "as-written" else i + 1
            coeff = coeff * ((-1) ** ki * comb(r[i + 1], ki)) / rho[j] ** ki
        if coeff:
            term = P(k)
            if term:
                total = total + term.scale(coeff)
    pref = mpq(1)
    for i in range(d):
        pref = pref * rho[i] ** r[i]
    return GaussianPoly(total.scale(pref), C)


def special_closed(C: QuadForm, r: Sequence[int]) -> GaussianPoly:
    """Explicit single (d=1) and double (d=2) creation closed forms."""
    d = C.d
    if d not in (1, 2) or len(r) != d:
        raise ArityError("special closed forms exist for d = 1 and d = 2 only")
    forms = [s_form(C, i) for i in range(1, d + 1)]
    if d == 1:
        S1, rho1 = forms[0]
        return GaussianPoly(hermite_of(r[0], S1).scale(rho1 ** r[0]), C)
    (S1, rho1), (S2, rho2) = forms
    r1, r2 = r
    a12 = C.a(1, 2)
    total = MultiPoly.zero(2)
    for k in range(min(r1, r2) + 1):
        c = comb(r1, k) * comb(r2, k) * factorial(k) * (2 * a12) ** k / (rho1 * rho2) ** k
        if c:
            total = total + (hermite_of(r2 - k, S2) * hermite_of(r1 - k, S1)).scale(c)
    return GaussianPoly(total.scale(rho1**r1 * rho2**r2), C)


# Diagonal pools with exact square roots in Q(sqrt 2).
LEMMA_DIAG_POOL = (mpq(1), mpq(4), mpq(9, 4), mpq(2), mpq(8), mpq(1, 2), mpq(9), mpq(1, 4))
THEOREM_ONE_PLUS_POOL = (mpq(4), mpq(9, 4), mpq(2), mpq(9), mpq(8), mpq(25, 16), mpq(9, 2), mpq(49, 16))
OFFDIAG_POOL = (mpq(-1), mpq(-1, 2), mpq(-1, 3), mpq(0), mpq(1, 4), mpq(1, 2), mpq(1), mpq(2))


def matrix_family(d: int, count: int, seed: int, kind: str = "theorem") -> list[QuadForm]:
    """Seeded symmetric forms whose needed square roots lie in Q(sqrt 2).

    ``kind="lemma"`` draws ``a_ii`` from squares and twice-squares;
    ``kind="theorem"`` draws ``1 + a_ii`` from such a pool (so ``a_ii > 0``).
    """
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        if kind == "lemma":
            diag = [rng.choice(LEMMA_DIAG_POOL) for _ in range(d)]
        elif kind == "theorem":
            diag = [rng.choice(THEOREM_ONE_PLUS_POOL) - 1 for _ in range(d)]
        else:
            raise ValueError(f"unknown matrix family {kind!r}")
        off = {(i, j): rng.choice(OFFDIAG_POOL) for i in range(1, d + 1) for j in range(i + 1, d + 1)}
        out.append(QuadForm.from_a(diag, off))
    return out
