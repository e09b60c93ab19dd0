import itertools

import pytest

from mehler.errors import BudgetError, VariantError
from mehler.hermite import hermite_in, hermite_poly
from mehler.identities import (
    FAMILIES,
    Budget,
    IdentityInstance,
    cayley_check,
    cayley_sides,
    consistent_variants,
    delta_series,
    lhs_series,
    parse_variant,
    rhs_bilinear,
    rhs_series,
    rhs_trilinear,
    variant_names,
    verify_identity,
    xi_series,
)
from mehler.poly import MultiPoly

BILINEAR_TRUE = "denominator=sqrt(1-4t^2)"
BILINEAR_LITERAL = "denominator=sqrt(1-t^2)"
GCMF_TRUE = "prefactor=single-root; index=index-shifted; radical=sqrt(D/(1-4u^2)); range=full"
SRIVASTAVA_TRUE = "numerator=u3-2u1u2; denominator=((1-4u1^2)(1-4u2^2))^(1/2); binding=r=r1,s=r2"


def test_mehler_lhs_coefficients():
    lhs = lhs_series(IdentityInstance("mehler", (), 3))
    assert lhs.coefficient((0,)) == MultiPoly.one(2)
    assert lhs.coefficient((1,)) == MultiPoly({(1, 1): 4}, 2)


def test_mehler_rhs_low_orders():
    rhs = rhs_bilinear(IdentityInstance("mehler", (), 2))
    assert rhs.coefficient((0,)) == MultiPoly.one(2)
    assert rhs.coefficient((1,)) == MultiPoly({(1, 1): 4}, 2)


def test_bilinear_rhs_seed_term():
    rhs = rhs_bilinear(IdentityInstance("carlitz-bilinear", (1, 0), 2), BILINEAR_TRUE)
    assert rhs.coefficient((0,)) == MultiPoly.var(0, 2) * 2


def test_trilinear_rhs_low_orders():
    rhs = rhs_trilinear(IdentityInstance("carlitz-trilinear", (), 2))
    assert rhs.coefficient((0, 0, 0)) == MultiPoly.one(3)
    assert rhs.coefficient((0, 0, 1)) == MultiPoly({(1, 1, 0): 4}, 3)


def test_gcmf_lhs_seed_term():
    lhs = lhs_series(IdentityInstance("gcmf", (1, 0, 0), 2))
    assert lhs.coefficient((0, 0, 0)) == MultiPoly.var(0, 3) * 2


def test_delta_and_xi():
    d = delta_series(2, 0)
    assert d.coefficient((2, 0, 0)) == MultiPoly.constant(-4, 0)
    x1 = xi_series(1, 3)
    assert x1.constant_term() == MultiPoly.var(0, 3)


def test_bilinear_variants_resolved():
    rep = verify_identity(IdentityInstance("carlitz-bilinear", (2, 1), 8))
    assert rep.matched_variants == [BILINEAR_TRUE]
    literal = next(v for v in rep.variants if v.name == BILINEAR_LITERAL)
    assert literal.first_mismatch is not None
    assert sum(literal.first_mismatch.exponent) >= 1


def test_mehler_matches():
    rep = verify_identity(IdentityInstance("mehler", (), 8))
    assert rep.matched_variant == "classical"
    assert rep.lhs_rational


def test_gcmf_111_single_reading_over_sweep():
    reports = [verify_identity(IdentityInstance("gcmf", r, 4)) for r in ((1, 1, 1), (2, 1, 0), (0, 2, 1))]
    assert consistent_variants(reports) == [GCMF_TRUE]


def test_gcmf_at_degree_five():
    rep = verify_identity(IdentityInstance("gcmf", (2, 2, 2), 5))
    assert rep.matched_variants == [GCMF_TRUE]


def test_srivastava_single_reading():
    rep = verify_identity(IdentityInstance("srivastava", (2, 1), 5))
    assert rep.matched_variants == [SRIVASTAVA_TRUE]


def test_mismatch_reports_smallest_exponent():
    rep = verify_identity(IdentityInstance("carlitz-trilinear", (), 4, "pairs=ordered"))
    (v,) = rep.variants
    assert not v.matched
    assert v.first_mismatch.exponent == (0, 0, 1)


def test_report_is_deterministic():
    inst = IdentityInstance("srivastava", (1, 2), 3)
    a = verify_identity(inst).to_dict(timings=False)
    b = verify_identity(inst).to_dict(timings=False)
    assert a == b and a["elapsed_ms"] == 0


@pytest.mark.parametrize("r", [(0, 0, 0), (1, 2, 0), (2, 0, 1), (1, 1, 2)])
def test_gcmf_lhs_cyclic_invariance(r):
    base = lhs_series(IdentityInstance("gcmf", r, 4))
    rotated = lhs_series(IdentityInstance("gcmf", (r[1], r[2], r[0]), 4))
    assert rotated.relabel([1, 2, 0], [1, 2, 0]) == base


@pytest.mark.parametrize("r", [(0, 0, 1), (2, 1, 0), (1, 2, 2)])
def test_gcmf_lhs_collapses_to_bilinear(r):
    N = 5
    gcmf = lhs_series(IdentityInstance("gcmf", r, N)).substitute_zero([0, 1])
    bil = lhs_series(IdentityInstance("carlitz-bilinear", (r[0], r[1]), N))
    spectator = hermite_in(r[2], 3, 3)
    for p in range(N + 1):
        assert gcmf.coefficient((0, 0, p)) == bil.coefficient((p,)).embed(3, [0, 1]) * spectator


@pytest.mark.parametrize("family,shifts", [("mehler", ()), ("carlitz-bilinear", (2, 3)),
                                           ("carlitz-trilinear", ()), ("srivastava", (1, 2)),
                                           ("gcmf", (2, 0, 1))])
def test_constant_coefficient_is_product_of_hermites(family, shifts):
    inst = IdentityInstance(family, shifts, 2)
    lhs = lhs_series(inst)
    nx = inst.nx
    padded = list(shifts) + [0] * (nx - len(shifts))
    expected = MultiPoly.one(nx)
    for i, n in enumerate(padded):
        expected = expected * hermite_poly(n).embed(nx, [i])
    assert lhs.constant_term() == expected
    assert lhs.is_rational()


def test_reduction_chain():
    for r1, r2 in itertools.product(range(3), repeat=2):
        g = IdentityInstance("gcmf", (r1, r2, 0), 4)
        s = IdentityInstance("srivastava", (r1, r2), 4)
        assert rhs_series(g, GCMF_TRUE) == rhs_series(s, SRIVASTAVA_TRUE)
        assert lhs_series(g) == lhs_series(s)
    assert rhs_series(IdentityInstance("gcmf", (0, 0, 0), 5), GCMF_TRUE) == \
        rhs_series(IdentityInstance("carlitz-trilinear", (), 5), "pairs=unordered")
    assert rhs_series(IdentityInstance("carlitz-bilinear", (0, 0), 8), BILINEAR_TRUE) == \
        rhs_series(IdentityInstance("mehler", (), 8))


def test_cayley_readings():
    assert cayley_check(6, "1-4u3^2")
    assert not cayley_check(6, "1-u3^2")
    lhs, rhs = cayley_sides(1)
    for i in range(3):
        for j in range(3):
            assert lhs[i][j] == rhs[i][j]


def test_variant_names_roundtrip():
    for family in FAMILIES:
        for name in variant_names(family):
            assert parse_variant(family, name) is not None
    assert len(variant_names("gcmf")) == 16
    with pytest.raises(VariantError):
        parse_variant("gcmf", "nonsense")


def test_instance_validation():
    with pytest.raises(ValueError):
        IdentityInstance("gcmf", (1, 1), 3)
    with pytest.raises(ValueError):
        IdentityInstance("gcmf", (1, 1, 1), -1)
    with pytest.raises(ValueError):
        IdentityInstance("laguerre")
    assert IdentityInstance("srivastava").shifts == (0, 0)


def test_budget_exceeded_reports_partial():
    with pytest.raises(BudgetError) as info:
        verify_identity(IdentityInstance("gcmf", (2, 2, 2), 5), Budget(max_terms=10))
    assert info.value.partial is not None
    assert info.value.partial.instance.shifts == (2, 2, 2)

