"""Floating-point comparison of the generalized trilinear closed form with its triple sum.

The closed form evaluated here is the reading that verifies exactly:
single square-root prefactor, shifted index, radical ``sqrt(D/(1-4u^2))``
and the full index range.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import asdict, dataclass
from math import comb
from typing import Sequence

import numpy as np

from .bargmann import lhs_triple_sum
from .errors import DivergenceError, SingularityError
from .hermite import hermite_poly
from .poly import MultiPoly
from .theorem import full_enum

CONVERGENCE_LIMIT = 0.1


class DivergenceWarning(RuntimeWarning):
    """The naive triple sum is not trusted at this point."""


@dataclass
class BenchResult:
    x: tuple[float, float, float]
    u: tuple[float, float, float]
    r: tuple[int, int, int]
    naive: float
    terms: int
    closed: float
    rel_diff: float
    naive_seconds: float
    closed_seconds: float

    def to_dict(self, timings: bool = True) -> dict:
        out = asdict(self)
        out["x"], out["u"], out["r"] = list(self.x), list(self.u), list(self.r)
        if not timings:
            out["naive_seconds"] = out["closed_seconds"] = 0.0
        return out


def _delta(u) -> float:
    u1, u2, u3 = u
    return 1 - 4 * (u1 * u1 + u2 * u2 + u3 * u3) + 16 * u1 * u2 * u3


def _xi_linear(i: int, u) -> MultiPoly:
    """``X_i`` as a float linear polynomial in ``x`` (``i`` is 1-based)."""
    j, k = (a for a in (1, 2, 3) if a != i)
    U = lambda a: u[a - 1]  # noqa: E731
    denom = math.sqrt(_delta(u) * (1 - 4 * U(i) ** 2))
    coeffs = [0.0, 0.0, 0.0]
    coeffs[i - 1] = (1 - 4 * U(i) ** 2) / denom
    coeffs[j - 1] = -2 * (U(k) - 2 * U(i) * U(j)) / denom
    coeffs[k - 1] = -2 * (U(j) - 2 * U(i) * U(k)) / denom
    return MultiPoly.linear(coeffs)


def closed_form(x: Sequence[float], u: Sequence[float], r: Sequence[int]) -> float:
    """Closed-form right-hand side at a numeric point."""
    D = _delta(u)
    if D <= 0:
        raise SingularityError("1 - 4 sum u_i^2 + 16 u1 u2 u3 must be positive")
    X = [_xi_linear(i, u) for i in (1, 2, 3)]
    H = {}

    def herm(n, i):
        if (n, i) not in H:
            H[n, i] = hermite_poly(n).to_float().compose([X[i]])
        return H[n, i]

    nested = {(): herm(r[0], 0)}

    def P(k):
        if k not in nested:
            axis = len(k)
            nested[k] = herm(r[axis] - k[-1], axis) * P(k[:-1]).derive_n(axis, k[-1])
        return nested[k]

    rho = [math.sqrt(D / (1 - 4 * ui * ui)) for ui in u]
    total = 0.0
    for k in full_enum(r):
        c = 1.0
        for i, ki in enumerate(k, start=1):
            c *= (-1) ** ki * comb(r[i], ki) * rho[i] ** ki
        if c:
            total += c * float(P(k).evaluate(list(x)))
    pref = D ** (-(sum(r) + 1) / 2)
    for ui, ri in zip(u, r):
        pref *= (1 - 4 * ui * ui) ** (ri / 2)
    sq = sum(v * v for v in x)
    q = sq - 4 * sum(xi * xi * ui * ui for xi, ui in zip(x, u))
    for i, j in ((0, 1), (0, 2), (1, 2)):
        k = 3 - i - j
        q += -4 * x[i] * x[j] * u[k] + 8 * u[i] * u[j] * x[i] * x[j]
    return pref * total * math.exp(sq - q / D)


def shell_ratio(x, u, r, n_terms: int) -> float:
    """Size of the outermost index shell relative to the whole truncated sum."""
    full = lhs_triple_sum(x, u, r, n_terms)
    inner = lhs_triple_sum(x, u, r, n_terms - 1)
    if not np.isfinite(full):
        return math.inf
    return abs(full - inner) / max(abs(full), 1e-300)


def bench_point(x, u, r, n_terms: int = 40) -> BenchResult:
    """Time both evaluations at one point.

    Raises :class:`DivergenceError` when ``|u_i|`` exceeds the convergence
    margin or the last index shell of the naive sum is not negligible.
    """
    x, u, r = tuple(float(v) for v in x), tuple(float(v) for v in u), tuple(int(v) for v in r)
    if max(abs(v) for v in u) > CONVERGENCE_LIMIT:
        ratio = shell_ratio(x, u, r, n_terms)
        raise DivergenceError(f"|u| exceeds {CONVERGENCE_LIMIT}; last-shell ratio {ratio:.3g}")
    t0 = time.perf_counter()
    naive = lhs_triple_sum(x, u, r, n_terms)
    t1 = time.perf_counter()
    closed = closed_form(x, u, r)
    t2 = time.perf_counter()
    rel = abs(naive - closed) / max(abs(closed), 1e-300) if naive != closed else 0.0
    return BenchResult(x, u, r, naive, n_terms**3, closed, rel, t1 - t0, t2 - t1)


def default_points() -> list[tuple[tuple, tuple, tuple]]:
    """A fixed grid of ``(x, u, r)`` points with ``|u_i| <= 0.05`` and ``r_i <= 2``."""
    xs = [(0.0, 0.0, 0.0), (1.0, 1.0, 1.0), (0.4, -0.2, 0.1), (-1.1, 0.7, 0.3)]
    us = [(0.0, 0.0, 0.0), (0.05, 0.05, 0.05), (0.05, -0.03, 0.02), (-0.04, 0.01, 0.05)]
    rs = [(0, 0, 0), (1, 1, 1), (2, 0, 1), (2, 2, 2), (0, 2, 1)]
    return [(x, u, r) for r in rs for x in xs for u in us]


def run_bench(points=None, n_terms: int = 40) -> tuple[list[BenchResult], list[str]]:
    """Benchmark every point; divergent points are skipped with a warning."""
    results, skipped = [], []
    for x, u, r in points or default_points():
        try:
            results.append(bench_point(x, u, r, n_terms))
        except DivergenceError as exc:
            msg = f"skipped x={x} u={u} r={r}: {exc}"
            warnings.warn(msg, DivergenceWarning, stacklevel=2)
            skipped.append(msg)
    return results, skipped
