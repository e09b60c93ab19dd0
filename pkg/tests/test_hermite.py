import pytest
from gmpy2 import mpq

from mehler.errors import RadicalError
from mehler.gaussian import GaussianPoly, QuadForm, gp_creation, gp_creation_n
from mehler.hermite import (
    HermiteTable,
    addition_formula_check,
    addition_lhs,
    addition_rhs,
    hermite_poly,
    hermite_rodrigues,
    operational_apply,
)
from mehler.poly import MultiPoly
from oracles import hermite_explicit


def test_small_hermite_polynomials():
    assert hermite_poly(0) == MultiPoly.one(1)
    assert hermite_poly(1) == MultiPoly.univariate([0, 2])
    assert hermite_poly(4) == MultiPoly.univariate([12, 0, -48, 0, 16])


@pytest.mark.parametrize("n", range(13))
def test_recurrence_matches_explicit_sum_and_rodrigues(n):
    assert hermite_poly(n) == hermite_explicit(n)
    assert hermite_poly(n) == hermite_rodrigues(n)


def test_rodrigues_n2():
    assert hermite_rodrigues(2) == MultiPoly.univariate([-2, 0, 4])


@pytest.mark.parametrize("n", range(1, 13))
def test_derivative_and_parity(n):
    assert hermite_poly(n).derive(0) == hermite_poly(n - 1).scale(2 * n)
    flipped = hermite_poly(n).compose([MultiPoly.univariate([0, -1])])
    assert flipped == hermite_poly(n).scale((-1) ** n)
    assert hermite_poly(n).coefficient((n,)) == 2**n


def test_table_extends_lazily():
    t = HermiteTable(2)
    assert t[20] == hermite_explicit(20)
    assert len(t) == 21


def gaussian(c):
    return GaussianPoly.gaussian(QuadForm(((c,),)))


def test_operational_small_cases():
    g = gaussian(1)
    assert operational_apply(0, g) == g
    assert operational_apply(1, g).P == MultiPoly.univariate([0, 4])


def test_operational_matches_repeated_creation():
    x = MultiPoly.var(0, 1)
    f = GaussianPoly(x, QuadForm(((2,),)))
    assert operational_apply(3, f) == gp_creation_n(f, 1, 3)
    assert gp_creation(gp_creation(gaussian(1), 1), 1).P == MultiPoly.univariate([-4, 0, 16])


def test_addition_formula_examples():
    assert addition_lhs(0, (3, 4)) == addition_rhs(0, (3, 4)) == MultiPoly.one(2)
    assert addition_formula_check(2, (3, 4))
    assert addition_lhs(1, (1, 0)) == MultiPoly.var(0, 2) * 2


@pytest.mark.parametrize("a", [(3, 4), (5, 12), (1, 0, 0), (2, 3, 6)])
def test_addition_formula_up_to_eight(a):
    for n in range(9):
        assert addition_formula_check(n, a)


def test_addition_formula_even_order_non_square():
    assert addition_formula_check(4, (1, 1, 1))


def test_addition_formula_odd_order_non_square():
    with pytest.raises(RadicalError):
        addition_formula_check(3, (1, 1, 1))


def test_addition_formula_rational_coefficients():
    assert addition_formula_check(5, (mpq(3, 5), mpq(4, 5)))
