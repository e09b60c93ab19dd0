import pytest
from gmpy2 import mpq

from mehler.errors import ArityError, RadicalError, VariantError
from mehler.gaussian import GaussianPoly, QuadForm, gp_derive_n
from mehler.hermite import hermite_of
from mehler.poly import MultiPoly
from mehler.theorem import (
    creation_chain_lhs,
    full_enum,
    lambda_enum,
    lemma_dg_closed,
    matrix_family,
    s_form,
    special_closed,
    theorem_rhs,
)


def test_lambda_enum_examples():
    assert lambda_enum((1, 1)) == [(0,), (1,)]
    assert lambda_enum((1, 1, 1)) == [(0, 0), (0, 1), (1, 0)]
    assert lambda_enum((0, 5, 5)) == [(0, 0)]
    with pytest.raises(ArityError):
        lambda_enum((3,))


def test_full_enum_range():
    assert full_enum((0, 1, 2)) == [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]


def test_lemma_small_cases():
    C = QuadForm(((1,),))
    assert lemma_dg_closed(0, C, 1) == GaussianPoly.gaussian(C)
    assert lemma_dg_closed(1, C, 1).P == MultiPoly.univariate([0, -2])


def test_lemma_three_derivatives_d3():
    C = QuadForm.from_a([4, 1, 1], {(1, 2): 1, (1, 3): 2, (2, 3): 0})
    assert lemma_dg_closed(3, C, 1) == gp_derive_n(GaussianPoly.gaussian(C), 1, 3)


def test_lemma_radical_error():
    C = QuadForm(((3,),))
    with pytest.raises(RadicalError):
        lemma_dg_closed(1, C, 1)


def test_chain_examples():
    C = QuadForm.zero(2)
    assert creation_chain_lhs(C, (0, 0)) == GaussianPoly.gaussian(C)
    assert creation_chain_lhs(QuadForm(((1,),)), (1,)).P == MultiPoly.univariate([0, 4])


def test_theorem_zero_shift():
    C = matrix_family(3, 1, 7)[0]
    assert theorem_rhs(C, (0, 0, 0)) == GaussianPoly.gaussian(C)


def test_theorem_single_axis():
    C = QuadForm(((3,),))
    S, rho = s_form(C, 1)
    expected = hermite_of(4, S).scale(rho**4)
    assert theorem_rhs(C, (4,)).P == expected
    assert creation_chain_lhs(C, (4,)).P == expected


def test_theorem_unit_shift_on_each_axis():
    C = matrix_family(3, 1, 3)[0]
    for j in range(3):
        r = tuple(int(i == j) for i in range(3))
        S, rho = s_form(C, j + 1)
        assert theorem_rhs(C, r).P == S.scale(2 * rho)


def test_theorem_d3_resolves_one_reading():
    C = QuadForm.from_a([3, mpq(5, 4), 3], {(1, 2): mpq(1, 2), (1, 3): mpq(-1, 3), (2, 3): mpq(1, 4)})
    lhs = creation_chain_lhs(C, (2, 1, 1))
    matches = [(v, s) for v in ("as-written", "index-shifted") for s in ("lambda", "full")
               if theorem_rhs(C, (2, 1, 1), v, s) == lhs]
    assert matches == [("index-shifted", "full")]


def test_simplex_index_set_drops_terms():
    C = matrix_family(3, 1, 11)[0]
    lhs = creation_chain_lhs(C, (2, 0, 2))
    assert theorem_rhs(C, (2, 0, 2), "index-shifted", "full") == lhs
    assert theorem_rhs(C, (2, 0, 2), "index-shifted", "lambda") != lhs


def test_special_closed_d2():
    C = QuadForm.from_a([3, 3], {(1, 2): 1})
    assert special_closed(C, (0, 0)) == GaussianPoly.gaussian(C)
    S1, rho1 = s_form(C, 1)
    assert special_closed(C, (1, 0)).P == S1.scale(2 * rho1)
    assert special_closed(C, (2, 2)) == creation_chain_lhs(C, (2, 2))
    C2 = QuadForm.from_a([3, 3], {(1, 2): mpq(1, 2)})
    assert special_closed(C2, (1, 1)) == creation_chain_lhs(C2, (1, 1))


def test_special_closed_rejects_d3():
    with pytest.raises(ArityError):
        special_closed(QuadForm.zero(3), (1, 1, 1))


def test_unknown_variant():
    with pytest.raises(VariantError):
        theorem_rhs(QuadForm.zero(2), (1, 1), "sideways")


def test_matrix_family_is_seeded():
    assert matrix_family(3, 5, 42) == matrix_family(3, 5, 42)
    assert matrix_family(3, 5, 42) != matrix_family(3, 5, 43)
