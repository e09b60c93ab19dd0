from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from mehler.errors import RadicalError
from mehler.scalar import SQRT2, ScalarQ2, format_coeff, simplify, sqrt_exact, to_mpq

rationals = st.fractions(max_denominator=50).filter(lambda q: abs(q) < 1000)
scalars = st.builds(lambda a, b: ScalarQ2(a, b), rationals, rationals)
nonzero = scalars.filter(lambda s: s.a != 0 or s.b != 0)


def test_sqrt2_squares_to_two():
    assert SQRT2 * SQRT2 == 2
    assert (SQRT2 * SQRT2).b == 0


def test_inverse_formula():
    x = ScalarQ2(3, 2)
    inv = x.inverse()
    assert inv == ScalarQ2(mpq(3, 1), mpq(-2, 1))  # norm 9 - 8 = 1
    assert x * inv == 1


def test_zero_has_no_inverse():
    with pytest.raises(ZeroDivisionError):
        ScalarQ2(0, 0).inverse()


def test_lowest_terms_and_structural_equality():
    x = ScalarQ2(Fraction(2, 4), Fraction(6, 8))
    assert x.a == mpq(1, 2) and x.b == mpq(3, 4)
    assert x == ScalarQ2(mpq(1, 2), mpq(3, 4))
    assert hash(ScalarQ2(5, 0)) == hash(mpq(5))


def test_to_mpq_accepts_strings_and_floats():
    assert to_mpq("3/7") == mpq(3, 7)
    assert to_mpq(0.5) == mpq(1, 2)


@given(scalars, scalars, scalars)
def test_ring_axioms(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + (-x) == 0


@given(nonzero)
def test_multiplicative_inverse(x):
    assert x * x.inverse() == 1
    assert x / x == 1


@given(rationals, rationals)
def test_sqrt_exact_of_squares(a, b):
    s = ScalarQ2(a, b)
    root = sqrt_exact(s * s)
    assert root == s or root == -s
    assert float(root) >= 0


def test_sqrt_exact_twice_square():
    assert sqrt_exact(mpq(9, 2)) == ScalarQ2(0, mpq(3, 2))
    assert sqrt_exact(mpq(49, 16)) == mpq(7, 4)


def test_sqrt_exact_rejects_three():
    with pytest.raises(RadicalError):
        sqrt_exact(3)


def test_simplify_and_format():
    assert isinstance(simplify(ScalarQ2(2, 0)), type(mpq(0)))
    assert format_coeff(ScalarQ2(1, 2)) == "1 + 2*sqrt2"
