import pytest

from mehler.bench import DivergenceWarning, bench_point, closed_form, run_bench
from mehler.errors import DivergenceError
from oracles import hermite_float


def test_origin_is_exactly_one():
    res = bench_point((0.3, -0.1, 0.2), (0, 0, 0), (0, 0, 0))
    assert res.naive == 1.0 and res.closed == pytest.approx(1.0, abs=1e-15)


def test_unit_shifts_agree():
    res = bench_point((1, 1, 1), (0.05, 0.05, 0.05), (1, 1, 1), 40)
    assert res.rel_diff < 1e-10
    assert res.naive_seconds > 0 and res.closed_seconds > 0
    assert res.terms == 40**3


def test_closed_form_reduces_to_product_at_zero_u():
    assert closed_form((0.5, 0.0, -1.0), (0, 0, 0), (1, 0, 2)) == pytest.approx(
        hermite_float(1, 0.5) * hermite_float(2, -1.0))


def test_divergent_point_is_skipped():
    with pytest.raises(DivergenceError):
        bench_point((1, 1, 1), (0.3, 0.3, 0.3), (1, 1, 1))
    with pytest.warns(DivergenceWarning):
        results, skipped = run_bench([((1, 1, 1), (0.3, 0.3, 0.3), (1, 1, 1)),
                                      ((1, 1, 1), (0.01, 0.0, 0.02), (2, 2, 2))])
    assert len(results) == 1 and len(skipped) == 1


def test_to_dict_without_timings():
    d = bench_point((1, 0, 0), (0.01, 0.02, 0.03), (1, 0, 1), 20).to_dict(timings=False)
    assert d["naive_seconds"] == 0.0 and d["r"] == [1, 0, 1]
