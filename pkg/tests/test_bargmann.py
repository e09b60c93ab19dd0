import math

import numpy as np
import pytest
from gmpy2 import mpq

from mehler.bargmann import (
    POWER_VARIANTS,
    QuadratureSpec,
    SampledFunction,
    bargmann_gaussian_closed,
    bargmann_many,
    bargmann_quadrature,
    cayley_form,
    decomposition_check,
    dilated_hermite,
    gaussian_function,
    gcmf_path_b,
    image_constant_probe,
    inverse_roundtrip,
    lhs_triple_sum,
    zero_function,
)
from mehler.errors import (
    DivergenceError,
    IllConditionedError,
    IntegrabilityError,
    SingularityError,
    VariantError,
)
from oracles import hermite_float


def test_quadrature_spec_minimum():
    with pytest.raises(ValueError):
        QuadratureSpec(8)
    pts, w = QuadratureSpec(16, 2).grid()
    assert pts.shape == (256, 2)
    assert w.sum() == pytest.approx(math.pi)


def test_dilated_hermite_values():
    for n in range(6):
        f = dilated_hermite(n)
        for x in (-1.3, 0.0, 0.4, 2.0):
            expected = (2 / math.pi) ** 0.25 * math.exp(-x * x) * hermite_float(n, math.sqrt(2) * x) \
                / math.sqrt(2**n * math.factorial(n))
            assert f(np.array([[x]]))[0] == pytest.approx(expected, abs=1e-14)


def test_transform_examples():
    assert bargmann_quadrature(dilated_hermite(0), [0]) == pytest.approx(1, abs=1e-14)
    assert bargmann_quadrature(dilated_hermite(2), [0.5]) == pytest.approx(0.25 / math.sqrt(2), abs=1e-14)
    assert bargmann_quadrature(zero_function(), [0.7]) == 0


def test_basis_images_on_complex_grid():
    re, im = np.meshgrid(np.linspace(-2, 2, 9), np.linspace(-2, 2, 9))
    w = (re + 1j * im).ravel()
    w = w[np.abs(w) <= 2]
    for n in range(7):
        vals = bargmann_many(dilated_hermite(n), w[:, None])
        assert np.max(np.abs(vals - w**n / math.sqrt(math.factorial(n)))) < 1e-8


def test_node_doubling_is_stable():
    w = np.linspace(-1.5, 1.5, 7)[:, None]
    f = dilated_hermite(5)
    a = bargmann_many(f, w, QuadratureSpec(64))
    b = bargmann_many(f, w, QuadratureSpec(128))
    assert np.max(np.abs(a - b)) < 1e-10


def test_gaussian_closed_form():
    assert bargmann_gaussian_closed([[0.0]], [0]) == pytest.approx((2 / math.pi) ** 0.25 * math.pi**0.5)
    assert bargmann_gaussian_closed([[1.0]], [0]) == pytest.approx((2 / math.pi) ** 0.25 * (math.pi / 2) ** 0.5)
    assert bargmann_gaussian_closed(np.zeros((3, 3)), [0, 0, 0]) == pytest.approx(
        (2 / math.pi) ** 0.75 * math.pi**1.5)


def test_gaussian_closed_form_matches_quadrature_d3():
    A = [[mpq(1, 2), mpq(1, 10), 0], [mpq(1, 10), mpq(1, 4), mpq(-1, 10)], [0, mpq(-1, 10), mpq(3, 10)]]
    g = gaussian_function(A)
    Af = [[float(v) for v in row] for row in A]
    for z in ([0, 0, 0], [0.5, -0.5, 1.0], [0.3 + 0.4j, 0.1, -0.8j]):
        assert abs(bargmann_quadrature(g, z, QuadratureSpec(32, 3)) - bargmann_gaussian_closed(Af, z)) < 1e-8


def test_gaussian_closed_form_singular():
    with pytest.raises(SingularityError):
        bargmann_gaussian_closed([[-1.0]], [0])


def test_integrability_guard():
    grow = gaussian_function([[-2]])
    with pytest.raises(IntegrabilityError):
        bargmann_quadrature(grow, [0])
    custom = SampledFunction("custom", 1, evaluator=lambda x: np.ones(len(x)))
    with pytest.raises(IntegrabilityError):
        bargmann_quadrature(custom, [0])


def test_image_constant_is_two_for_every_function():
    probes = [image_constant_probe(dilated_hermite(0)), image_constant_probe(dilated_hermite(3)),
              image_constant_probe(gaussian_function([[1]]))]
    g2 = gaussian_function([[mpq(1), mpq(1, 4)], [mpq(1, 4), mpq(3, 2)]])
    probes.append(image_constant_probe(g2, 2, base=[0.3, 0.0]))
    for p in probes:
        assert p.residual < 1e-8
        assert p.constant == pytest.approx(2.0, abs=1e-8)


def test_image_probe_degenerate():
    with pytest.raises(IllConditionedError):
        image_constant_probe(zero_function())


def test_decomposition():
    h0, h1, h2 = dilated_hermite(0), dilated_hermite(1), dilated_hermite(2)
    assert decomposition_check([h0, h0], [0, 0]) < 1e-8
    for z in ([0.3, -0.5], [0.5 + 0.2j, 1.0]):
        assert decomposition_check([h1, h2], z) < 1e-8
    assert decomposition_check([zero_function(), h1], [0.2, 0.1]) == 0


def test_inverse_roundtrip_reports_truncation():
    rt = inverse_roundtrip(dilated_hermite(0), 0.0)
    assert rt.radius == 4.0
    assert rt.discrepancy < 1e-6
    # the error is the disk truncation, which the radius sensitivity exposes
    assert rt.radius_sensitivity == pytest.approx(rt.discrepancy, rel=0.05)
    worst = max(inverse_roundtrip(dilated_hermite(1), x).discrepancy for x in np.linspace(-2, 2, 5))
    assert worst < 1e-4
    assert inverse_roundtrip(zero_function(), 0.5).discrepancy == 0


def test_cayley_form_exact():
    C, det = cayley_form((0, 0, 0))
    assert det == 1
    assert C.matrix == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    with pytest.raises(SingularityError):
        cayley_form((0.5, 0.0, 0.0))


def test_triple_sum_at_origin():
    assert lhs_triple_sum((0.3, 0.1, -0.2), (0, 0, 0), (1, 0, 2), 5) == pytest.approx(
        hermite_float(1, 0.3) * hermite_float(2, -0.2))


def test_path_b_trivial_point():
    a, b = gcmf_path_b((0.4, -0.2, 0.1), (0, 0, 0), (0, 0, 0))
    assert a == pytest.approx(1) and b == pytest.approx(1)


def test_path_b_agrees_at_zero_shift():
    a, b = gcmf_path_b((0.4, -0.2, 0.1), (0.05, 0.03, 0.02), (0, 0, 0))
    assert abs(a - b) < 1e-8


def test_path_b_selects_one_power():
    x, u, r = (0.4, -0.2, 0.1), (0.05, 0.03, 0.02), (1, 1, 0)
    agree = [p for p in POWER_VARIANTS if abs(gcmf_path_b(x, u, r, 30, p)[0] - gcmf_path_b(x, u, r, 30, p)[1]) < 1e-8]
    assert agree == ["2^-(r1+r2+r3)/2"]


def test_path_b_guards():
    with pytest.raises(DivergenceError):
        gcmf_path_b((0, 0, 0), (0.2, 0, 0), (0, 0, 0))
    with pytest.raises(VariantError):
        gcmf_path_b((0, 0, 0), (0, 0, 0), (0, 0, 0), power="2^-r")
