"""Floating-point checks of Bargmann-transform facts by Gauss-Hermite quadrature.

The transform is

    B f(z) = (2/pi)^{d/4} exp(-z.z/2) int exp(2 x.z - |x|^2) f(x) dx,

and its inverse

    B^{-1} F(x) = (2/pi)^{d/4} exp(-|x|^2)
                  int exp(2 x.conj(z) - conj(z).conj(z)/2) F(z) exp(-|z|^2) dA(z) / pi^d.

Forward integrals use tensor-product Gauss-Hermite nodes with the kernel's
``exp(-|x|^2)`` taken as the weight.  The inverse integral is truncated to
the disk ``|z| <= radius`` and done in polar coordinates (Gauss-Legendre in
the radius, trapezoid in the angle).

Functions are carried as an exact :class:`GaussianPoly` times a float
constant, so the creation operator can be applied symbolically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import factorial
from typing import Callable, Sequence

import numpy as np
from gmpy2 import mpq

from .errors import (
    DimensionError,
    DivergenceError,
    IllConditionedError,
    IntegrabilityError,
    SingularityError,
    VariantError,
)
from .gaussian import GaussianPoly, QuadForm, gp_creation
from .hermite import hermite_poly
from .poly import MultiPoly
from .scalar import to_mpq
from .theorem import creation_chain_lhs

MIN_NODES = 16
DEFAULT_NODES = 64
INVERSE_RADIUS = 4.0
POWER_VARIANTS = ("2^-(r1+r2+r3)/2", "2^-(r1+r2+r3)")


@dataclass(frozen=True)
class QuadratureSpec:
    """Tensor-product Gauss-Hermite rule with ``nodes`` points per axis."""

    nodes: int = DEFAULT_NODES
    d: int = 1

    def __post_init__(self):
        if self.nodes < MIN_NODES:
            raise ValueError(f"need at least {MIN_NODES} nodes per axis, got {self.nodes}")
        if self.d < 1:
            raise ValueError("dimension must be positive")

    def grid(self) -> tuple[np.ndarray, np.ndarray]:
        """Nodes of shape ``(n**d, d)`` and product weights of shape ``(n**d,)``."""
        x, w = _hermgauss(self.nodes)
        if self.d == 1:
            return x[:, None], w
        mesh = np.meshgrid(*([x] * self.d), indexing="ij")
        wmesh = np.meshgrid(*([w] * self.d), indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        weights = np.prod(np.stack([m.ravel() for m in wmesh], axis=1), axis=1)
        return pts, weights


@lru_cache(maxsize=None)
def _hermgauss(n: int):
    return np.polynomial.hermite.hermgauss(n)


CLASS_TAGS = ("gaussian-poly", "dilated-hermite", "custom")


@dataclass(frozen=True)
class SampledFunction:
    """A function on R^d known by an evaluator.

    For ``gaussian-poly`` and ``dilated-hermite`` functions ``gp`` holds the
    exact ``P(x) exp(-x^T C x)`` and ``factor`` a float constant, and the
    evaluator is derived from them.  ``custom`` functions supply ``evaluator``
    and must declare ``gaussian_decay=True`` to be integrated.
    """

    tag: str
    d: int = 1
    gp: GaussianPoly | None = None
    factor: float = 1.0
    evaluator: Callable[[np.ndarray], np.ndarray] | None = None
    gaussian_decay: bool = False
    label: str = ""
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.tag not in CLASS_TAGS:
            raise ValueError(f"unknown class tag {self.tag!r}")
        if self.tag != "custom" and self.gp is None:
            raise ValueError(f"{self.tag} functions need an exact Gaussian polynomial")
        if self.tag == "custom" and self.evaluator is None:
            raise ValueError("custom functions need an evaluator")

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.tag == "custom":
            return np.asarray(self.evaluator(pts))
        if "poly" not in self._cache:
            self._cache["poly"] = self.gp.P.to_float()
            self._cache["C"] = np.array([[float(c) for c in row] for row in self.gp.C.matrix])
        P, C = self._cache["poly"], self._cache["C"]
        cols = [pts[:, i] for i in range(self.d)]
        vals = P.evaluate(cols) if P else np.zeros(len(pts))
        quad = np.einsum("ni,ij,nj->n", pts, C, pts)
        return self.factor * np.asarray(vals, dtype=float) * np.exp(-quad)

    def check_decay(self) -> None:
        """Raise :class:`IntegrabilityError` unless ``I + C`` is positive definite."""
        if self.tag == "custom":
            if not self.gaussian_decay:
                raise IntegrabilityError("custom function does not declare Gaussian decay")
            return
        C = np.array([[float(c) for c in row] for row in self.gp.C.matrix])
        if np.linalg.eigvalsh(np.eye(self.d) + C).min() <= 0:
            raise IntegrabilityError("exp(2x.z - |x|^2) f(x) is not integrable: I + C is not positive definite")

    def creation(self, axis: int) -> "SampledFunction":
        """``A_axis^* f`` computed symbolically."""
        if self.tag == "custom":
            raise IntegrabilityError("creation image of a custom function is not available")
        return SampledFunction(self.tag, self.d, gp_creation(self.gp, axis), self.factor,
                               label=f"A{axis}*({self.label})")


def gaussian_function(C: Sequence[Sequence], P: MultiPoly | None = None, factor: float = 1.0) -> SampledFunction:
    """``factor * P(x) exp(-x^T C x)`` with exact rational ``C``."""
    form = QuadForm(tuple(tuple(to_mpq(Fraction(str(c)) if isinstance(c, float) else c) for c in row) for row in C))
    P = P if P is not None else MultiPoly.one(form.d)
    return SampledFunction("gaussian-poly", form.d, GaussianPoly(P, form), factor, label="gaussian")


def dilated_hermite(n: int) -> SampledFunction:
    """``h_n(x) = (2/pi)^{1/4} exp(-x^2) H_n(sqrt(2) x) / sqrt(2^n n!)``.

    ``H_n(sqrt 2 x) / sqrt(2^n)`` only involves even powers of ``sqrt 2``
    relative to ``x^n``, so it is an exact rational polynomial.
    """
    coeffs = hermite_poly(n).univariate_coeffs()
    rational = [c * mpq(2) ** ((j - n) // 2) if c else 0 for j, c in enumerate(coeffs)]
    P = MultiPoly.univariate(rational)
    factor = (2 / math.pi) ** 0.25 / math.sqrt(factorial(n))
    return SampledFunction("dilated-hermite", 1, GaussianPoly(P, QuadForm(((1,),))), factor, label=f"h{n}")


def zero_function(d: int = 1) -> SampledFunction:
    ident = tuple(tuple(int(i == j) for j in range(d)) for i in range(d))
    return SampledFunction("gaussian-poly", d, GaussianPoly(MultiPoly.zero(d), QuadForm(ident)), label="0")


def product_function(factors: Sequence[SampledFunction]) -> SampledFunction:
    """``prod_j f_j(x_j)`` on R^d from one-dimensional factors."""
    d = len(factors)

    def ev(pts):
        out = np.ones(len(pts), dtype=complex)
        for j, f in enumerate(factors):
            out = out * f(pts[:, j:j + 1])
        return out

    return SampledFunction("custom", d, evaluator=ev, gaussian_decay=True,
                           label="*".join(f.label for f in factors))


def bargmann_quadrature(f: SampledFunction, z, q: QuadratureSpec | None = None) -> complex:
    """``B f(z)`` by tensor-product Gauss-Hermite quadrature."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if len(z) != f.d:
        raise DimensionError(f"z has {len(z)} entries, function lives on R^{f.d}")
    f.check_decay()
    q = q or QuadratureSpec(d=f.d)
    if q.d != f.d:
        q = QuadratureSpec(q.nodes, f.d)
    pts, w = q.grid()
    vals = f(pts)
    kernel = np.exp(2 * pts @ z)
    integral = np.sum(w * kernel * vals)
    return complex((2 / np.pi) ** (f.d / 4) * np.exp(-0.5 * z @ z) * integral)


def bargmann_many(f: SampledFunction, zs: np.ndarray, q: QuadratureSpec | None = None) -> np.ndarray:
    """Vectorised ``B f`` at each row of ``zs`` (shape ``(m, d)``)."""
    zs = np.asarray(zs, dtype=complex).reshape(-1, f.d)
    f.check_decay()
    q = q or QuadratureSpec(d=f.d)
    pts, w = QuadratureSpec(q.nodes, f.d).grid()
    vals = w * f(pts)
    kernel = np.exp(2 * zs @ pts.T)
    pref = (2 / np.pi) ** (f.d / 4) * np.exp(-0.5 * np.sum(zs * zs, axis=1))
    return pref * (kernel @ vals)


def bargmann_gaussian_closed(A, z) -> complex:
    """Closed-form transform of ``exp(-x^T A x)``.

    ``(2/pi)^{d/4} (pi^d / det(I+A))^{1/2} exp(z^T (I-A)(I+A)^{-1} z / 2)``.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    d = len(A)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if len(z) != d:
        raise DimensionError(f"z has {len(z)} entries, matrix has order {d}")
    S = np.eye(d) + A
    det = np.linalg.det(S)
    if abs(det) < 1e-14 or np.linalg.eigvalsh((S + S.T) / 2).min() <= 0:
        raise SingularityError("I + A must be positive definite")
    cayley = (np.eye(d) - A) @ np.linalg.inv(S)
    return complex((2 / np.pi) ** (d / 4) * np.sqrt(np.pi**d / det) * np.exp(0.5 * z @ cayley @ z))


def component_transform(f: SampledFunction, w, axis: int = 1, base=None, q: QuadratureSpec | None = None):
    """``B_j g(w)`` for ``g(x_j) = f(base with x_j replaced)``; vectorised over ``w``."""
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    f.check_decay()
    q = q or QuadratureSpec()
    x, wts = _hermgauss(q.nodes)
    base = np.zeros(f.d) if base is None else np.asarray(base, dtype=float)
    pts = np.tile(base, (len(x), 1))
    pts[:, axis - 1] = x
    vals = wts * f(pts)
    kernel = np.exp(2 * np.outer(w, x))
    return (2 / np.pi) ** 0.25 * np.exp(-0.5 * w * w) * (kernel @ vals)


@dataclass
class ImageProbe:
    constant: float
    residual: float
    axis: int
    label: str


def image_constant_probe(f: SampledFunction, axis: int = 1, grid=None,
                         q: QuadratureSpec | None = None, base=None) -> ImageProbe:
    """Fit ``c`` in ``B_j(A_j^* f)(w) = c w B_j f(w)`` by least squares on a real grid.

    ``residual`` is the relative 2-norm misfit of the fit.
    """
    grid = np.linspace(-2, 2, 41) if grid is None else np.asarray(grid, dtype=float)
    lhs = component_transform(f.creation(axis), grid, axis, base, q)
    rhs = grid * component_transform(f, grid, axis, base, q)
    scale = np.linalg.norm(rhs)
    if scale < 1e-12:
        raise IllConditionedError("B_j f vanishes on the probe grid")
    c = np.vdot(rhs, lhs) / np.vdot(rhs, rhs)
    residual = np.linalg.norm(lhs - c * rhs) / max(np.linalg.norm(lhs), 1e-300)
    return ImageProbe(float(c.real), float(residual), axis, f.label)


def decomposition_check(factors: Sequence[SampledFunction], z, q: QuadratureSpec | None = None) -> float:
    """``|B(prod f_j)(z) - prod_j B_j f_j(z_j)|``."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if len(z) != len(factors):
        raise DimensionError("one z entry per factor required")
    q = q or QuadratureSpec()
    whole = bargmann_quadrature(product_function(factors), z, QuadratureSpec(q.nodes, len(factors)))
    parts = 1.0 + 0j
    for f, zj in zip(factors, z):
        parts *= bargmann_quadrature(f, [zj], QuadratureSpec(q.nodes, 1))
    return abs(whole - parts)


@dataclass
class RoundTrip:
    discrepancy: float
    radius: float
    radius_sensitivity: float
    value: float
    expected: float


def _inverse_at(F_vals, zs, wts, x):
    zb = np.conj(zs)
    integrand = np.exp(2 * x * zb - 0.5 * zb * zb) * F_vals * np.exp(-np.abs(zs) ** 2)
    return (2 / np.pi) ** 0.25 * np.exp(-x * x) * np.sum(wts * integrand) / np.pi


def _polar_grid(radius: float, n_r: int, n_theta: int):
    t, wt = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * radius * (t + 1)
    wr = 0.5 * radius * wt * r  # includes the polar Jacobian
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    zs = (r[:, None] * np.exp(1j * theta)[None, :]).ravel()
    wts = (wr[:, None] * np.full(n_theta, 2 * np.pi / n_theta)[None, :]).ravel()
    return zs, wts


def inverse_roundtrip(f: SampledFunction, x, radius: float = INVERSE_RADIUS,
                      q: QuadratureSpec | None = None, n_r: int = 64, n_theta: int = 128) -> RoundTrip:
    """``|B^{-1}(B f)(x) - f(x)|`` on R^1 with the complex integral cut at ``radius``.

    ``radius_sensitivity`` is the change in the reconstructed value when the
    radius grows by 25%, a direct measure of the truncation error.
    """
    if f.d != 1:
        raise DimensionError("inverse round trip is implemented on R^1")
    x = float(x)
    q = q or QuadratureSpec()

    def at(R):
        zs, wts = _polar_grid(R, n_r, n_theta)
        F = bargmann_many(f, zs[:, None], q)
        return _inverse_at(F, zs, wts, x)

    value = at(radius)
    wider = at(1.25 * radius)
    expected = float(f(np.array([[x]]))[0])
    return RoundTrip(abs(value - expected), radius, abs(wider - value), float(value.real), expected)


# -- cross-path check of the generalized formula --------------------------------


def _exact_inverse(m: list[list]) -> list[list]:
    n = len(m)
    a = [[to_mpq(v) for v in row] + [mpq(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise SingularityError("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [v / p for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return [row[n:] for row in a]


def cayley_form(u: Sequence) -> tuple[QuadForm, mpq]:
    """``C = (I - 2M)(I + 2M)^{-1}`` and ``det(I + 2M)`` at a numeric ``u``, exactly."""
    u1, u2, u3 = (to_mpq(Fraction(repr(float(v)))) for v in u)
    M = [[0, u3, u2], [u3, 0, u1], [u2, u1, 0]]
    plus = [[int(i == j) + 2 * M[i][j] for j in range(3)] for i in range(3)]
    minus = [[int(i == j) - 2 * M[i][j] for j in range(3)] for i in range(3)]
    det = 1 - 4 * (u1 * u1 + u2 * u2 + u3 * u3) + 16 * u1 * u2 * u3
    if det == 0:
        raise SingularityError("I + 2M is singular")
    inv = _exact_inverse(plus)
    C = [[sum(minus[i][k] * inv[k][j] for k in range(3)) for j in range(3)] for i in range(3)]
    return QuadForm(tuple(tuple(row) for row in C)), det


def lhs_triple_sum(x: Sequence[float], u: Sequence[float], r: Sequence[int], n_terms: int = 30) -> float:
    """``sum_{m,n,p < n_terms} H_{n+p+r1}(x1) H_{p+m+r2}(x2) H_{m+n+r3}(x3) u^.../(m! n! p!)``."""
    from scipy.special import eval_hermite, gammaln

    idx = np.arange(n_terms)
    m, n, p = np.meshgrid(idx, idx, idx, indexing="ij")
    h1 = eval_hermite(n + p + r[0], x[0])
    h2 = eval_hermite(p + m + r[1], x[1])
    h3 = eval_hermite(m + n + r[2], x[2])
    w = np.ones(m.shape)
    for k, uk in zip((m, n, p), u):
        w = w * np.where(k == 0, 1.0, float(uk)) ** k
    w = w * np.exp(-gammaln(m + 1) - gammaln(n + 1) - gammaln(p + 1))
    return float(np.sum(h1 * h2 * h3 * w))


def gcmf_path_b(x: Sequence[float], u: Sequence[float], r: Sequence[int], n_lhs: int = 30,
                power: str = POWER_VARIANTS[0]) -> tuple[float, float]:
    """Evaluate the generating function two ways at ``(x, u)``.

    Returns ``(direct, reconstructed)`` where ``direct`` is the truncated
    triple sum and ``reconstructed`` is

        exp(|x|^2/2) * c * det(I+2M)^{-1/2} * (A_1^*)^{r1} (A_2^*)^{r2} (A_3^*)^{r3} exp(-y^T C y)

    at ``y = x / sqrt(2)`` with ``C = (I-2M)/(I+2M)`` and ``c`` the
    power-of-two constant named by ``power``.  The creation chain is exact.
    """
    if power not in POWER_VARIANTS:
        raise VariantError(f"unknown power-of-two reading {power!r}")
    if max(abs(float(v)) for v in u) > 0.1:
        raise DivergenceError("|u_i| must be at most 0.1 for the truncated sum to converge")
    direct = lhs_triple_sum(x, u, r, n_lhs)
    C, det = cayley_form(u)
    chain = creation_chain_lhs(C, r)
    y = [float(v) / math.sqrt(2) for v in x]
    total = sum(r)
    c = 2.0 ** (-total / 2) if power == POWER_VARIANTS[0] else 2.0 ** (-total)
    value = chain.evaluate(y) * c / math.sqrt(float(det))
    value *= math.exp(sum(v * v for v in y))
    return direct, value
