import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from incomedist import (
    EmpiricalCCDF,
    EmptyFileWarning,
    IncomeRecord,
    OverlapWarning,
    ParseError,
    WealthPair,
    find_scale_factor,
    forbes_incomes,
    fuse,
    load_incomes,
    load_wealth_pairs,
    rank_ccdf,
)


def test_plotting_positions_three_rows():
    ccdf = rank_ccdf([3.0, 1.0, 2.0])
    assert ccdf.p.tolist() == [1 / 4, 2 / 4, 3 / 4]
    assert ccdf.incomes.tolist() == [3.0, 2.0, 1.0]


def test_plotting_positions_exact_weibull():
    n = 997
    ccdf = rank_ccdf(np.linspace(5.0, 9.0, n))
    expect = np.arange(1, n + 1) / (n + 1.0)
    assert np.array_equal(ccdf.p, expect)


def test_ties_get_distinct_positions():
    ccdf = rank_ccdf([2.0, 2.0, 1.0])
    assert ccdf.incomes.tolist() == [2.0, 2.0, 1.0]
    assert ccdf.p.tolist() == [0.25, 0.5, 0.75]


def test_rank_ccdf_accepts_records():
    recs = [IncomeRecord(income=v) for v in (4.0, 8.0)]
    ccdf = rank_ccdf(recs)
    assert ccdf.incomes.tolist() == [8.0, 4.0]
    assert ccdf.n == 2


def test_ccdf_validation():
    with pytest.raises(ValueError):
        EmpiricalCCDF(incomes=np.array([1.0, 2.0]), p=np.array([0.3, 0.6]))  # ascending incomes
    with pytest.raises(ValueError):
        EmpiricalCCDF(incomes=np.array([2.0, 1.0]), p=np.array([0.6, 0.3]))  # p not increasing
    with pytest.raises(ValueError):
        EmpiricalCCDF(incomes=np.array([2.0, -1.0]), p=np.array([0.3, 0.6]))


def test_csv_round_trip_bit_exact(tmp_path):
    rng = np.random.default_rng(0)
    ccdf = rank_ccdf(0.01 + rng.exponential(4e4, size=100))
    path = tmp_path / "c.csv"
    ccdf.to_csv(path)
    back = EmpiricalCCDF.from_csv(path)
    assert np.array_equal(back.incomes, ccdf.incomes)
    assert np.array_equal(back.p, ccdf.p)


def test_load_incomes_header_and_errors(tmp_path):
    path = tmp_path / "inc.csv"
    path.write_text("income\n10.5\n\n20.25\n", encoding="utf-8")
    recs = load_incomes(path)
    assert [r.income for r in recs] == [10.5, 20.25]

    bad = tmp_path / "bad.csv"
    bad.write_text("10.0\nnope\n", encoding="utf-8")
    with pytest.raises(ParseError) as err:
        load_incomes(bad)
    assert err.value.line == 2
    assert "line 2" in str(err.value)

    empty = tmp_path / "empty.csv"
    empty.write_text("income\n", encoding="utf-8")
    with pytest.warns(EmptyFileWarning):
        assert load_incomes(empty) == []


def test_load_wealth_pairs(tmp_path):
    path = tmp_path / "w.csv"
    path.write_text(
        "id,wealth_prev,wealth_curr\nA,1.0,3.5\nB,2.0,1.0\n", encoding="utf-8"
    )
    pairs = load_wealth_pairs(path)
    assert pairs == [
        WealthPair(id="A", wealth_prev=1.0, wealth_curr=3.5),
        WealthPair(id="B", wealth_prev=2.0, wealth_curr=1.0),
    ]

    nohdr = tmp_path / "n.csv"
    nohdr.write_text("A,1.0,2.0\n", encoding="utf-8")
    with pytest.raises(ParseError):
        load_wealth_pairs(nohdr)

    badval = tmp_path / "b.csv"
    badval.write_text("id,wealth_prev,wealth_curr\nA,1.0,x\n", encoding="utf-8")
    with pytest.raises(ParseError) as err:
        load_wealth_pairs(badval)
    assert err.value.line == 2 and err.value.column == 3


def test_forbes_incomes_keeps_positive_gains():
    pairs = [
        WealthPair(id="up", wealth_prev=1.0, wealth_curr=4.0),
        WealthPair(id="down", wealth_prev=5.0, wealth_curr=2.0),
        WealthPair(id="flat", wealth_prev=3.0, wealth_curr=3.0),
    ]
    assert [r.income for r in forbes_incomes(pairs)] == [3.0]


def test_find_scale_factor_min_alignment():
    survey_high = [200.0, 300.0, 400.0]
    rich = [20000.0, 30000.0, 50000.0]
    assert find_scale_factor(survey_high, rich) == pytest.approx(0.01)


def test_find_scale_factor_partial_overlap_warns():
    with pytest.warns(OverlapWarning):
        find_scale_factor([100.0, 1e9], [1000.0, 2000.0])


def test_fuse_with_explicit_factor_is_concatenation():
    fused = fuse([1.0, 2.0], [30.0, 40.0], factor=1.0)
    assert sorted(r.income for r in fused) == [1.0, 2.0, 30.0, 40.0]


def test_fuse_empty_rich_returns_survey():
    fused = fuse([3.0, 1.0], [])
    assert sorted(r.income for r in fused) == [1.0, 3.0]


def test_fuse_derives_rule_based_factor():
    survey = list(np.linspace(10.0, 500.0, 40))
    rich = [50000.0, 80000.0, 90000.0]
    # top-6 survey minimum / rich minimum
    seg_min = sorted(survey)[-6]
    fused = fuse(survey, rich, top_k=6)
    factor = seg_min / 50000.0
    fused_set = {r.income for r in fused}
    assert len(fused) == len(survey) + len(rich)
    for r in rich:
        assert any(abs(v - factor * r) < 1e-9 * factor * r for v in fused_set)


def test_record_validation():
    with pytest.raises(ValueError):
        IncomeRecord(income=0.0)
    with pytest.raises(ValueError):
        IncomeRecord(income=float("nan"))
    with pytest.raises(ValueError):
        WealthPair(id="x", wealth_prev=-1.0, wealth_curr=2.0)


@given(st.lists(st.floats(1e-3, 1e9), min_size=1, max_size=200))
def test_rank_ccdf_structure_property(values):
    ccdf = rank_ccdf(values)
    assert np.all(np.diff(ccdf.incomes) <= 0.0)
    assert np.all(np.diff(ccdf.p) > 0.0)
    assert 0.0 < ccdf.p[0] and ccdf.p[-1] < 1.0
    assert ccdf.n == len(values)


@given(st.lists(st.floats(1e-3, 1e6), min_size=2, max_size=50),
       st.floats(0.01, 100.0))
def test_rank_ccdf_scale_covariance(values, lam):
    base = rank_ccdf(values)
    scaled = rank_ccdf([lam * v for v in values])
    assert np.array_equal(scaled.p, base.p)
    assert np.allclose(scaled.incomes, lam * base.incomes, rtol=1e-12)
