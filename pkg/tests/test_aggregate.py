from __future__ import annotations

import math

import numpy as np
import pytest
from conftest import MINI
from hypothesis import given
from hypothesis import strategies as st
from oracles import gini_mean_difference, naive_aggregate, naive_quantile

from metricagg.aggregate import (
    TECHNIQUES,
    DomainError,
    Technique,
    aggregate,
    aggregate_file,
    file_columns,
    quantile,
)
from metricagg.extract import METRICS, extract_file

ALL = [t.value for t in TECHNIQUES]
vectors = st.lists(st.integers(0, 1000), min_size=1, max_size=40)
real_vectors = st.lists(st.floats(0, 1e4, allow_nan=False), min_size=1, max_size=40)


def close(a, b, rel=1e-9, abs_=1e-9):
    return math.isclose(a, b, rel_tol=rel, abs_tol=abs_)


# -- examples ------------------------------------------------------------------------


def test_quantile_examples():
    assert quantile([1, 2, 3, 4], 0.5) == 2.5
    assert quantile([5], 0.1) == 5
    assert quantile([1, 2, 3, 4], 0.25) == 1.75
    assert quantile([4, 1, 3, 2], 0.75) == 3.25


@pytest.mark.parametrize("q", [-0.1, 1.5])
def test_quantile_rejects_q(q):
    with pytest.raises(ValueError):
        quantile([1, 2], q)


def test_central_examples():
    assert aggregate([1, 2, 3], "sum") == 6
    assert aggregate([1, 2, 3], "avg") == 2
    assert aggregate([1, 2, 3], "med") == 2


@pytest.mark.parametrize("t", ["sd", "iqr", "skew", "kurt", "theil", "gini"])
def test_constant_vector_is_zero(t):
    assert aggregate([7, 7, 7, 7], t) == 0.0


@pytest.mark.parametrize("t", ALL)
def test_singleton(t):
    expected = 4.5 if t in ("sum", "avg", "med") else 0.0
    assert aggregate([4.5], t) == expected


def test_all_zero_inequality():
    assert aggregate([0, 0, 0], "theil") == 0.0
    assert aggregate([0, 0, 0], "gini") == 0.0


def test_gini_and_theil_examples():
    assert aggregate([0, 1], "gini") == pytest.approx(0.5)
    expected = 0.5 * (0.5 * math.log(0.5) + 1.5 * math.log(1.5))
    assert aggregate([1, 3], "theil") == pytest.approx(expected, rel=1e-12)
    assert round(aggregate([1, 3], "theil"), 4) == 0.1308


def test_theil_zero_times_log_zero():
    # 0 ln 0 is taken as 0; only the non-zero entry contributes.
    assert aggregate([0, 2], "theil") == pytest.approx(math.log(2) / 1)


@pytest.mark.parametrize("t", ["theil", "gini"])
def test_negative_input_rejected(t):
    with pytest.raises(DomainError):
        aggregate([1, -1, 3], t)


def test_empty_vector_rejected():
    with pytest.raises(ValueError):
        aggregate([], "sum")


def test_technique_order_and_labels():
    assert ALL == ["sum", "avg", "med", "sd", "iqr", "skew", "kurt", "theil", "gini"]
    assert [t.rank for t in TECHNIQUES] == list(range(1, 10))
    assert Technique.IQR.label == "IQR"


def test_kurt_uses_printed_mixed_normalization():
    x = [1.0, 2.0, 4.0, 9.0]
    n, mean = 4, 4.0
    m4 = sum((v - mean) ** 4 for v in x) / n
    sd = math.sqrt(sum((v - mean) ** 2 for v in x) / (n - 1))
    assert aggregate(x, "kurt") == pytest.approx(m4 / sd**4 - 3, rel=1e-14)
    m3 = sum((v - mean) ** 3 for v in x) / n
    assert aggregate(x, "skew") == pytest.approx(m3 / sd**3, rel=1e-14)


# -- file rows ----------------------------------------------------------------------


def test_file_columns_order():
    cols = file_columns()
    assert len(cols) == 108
    assert cols[:3] == ["loc.sum", "loc.avg", "loc.med"]
    assert cols[-1] == "hal_t.gini"
    assert "hal_l.gini" in cols


def test_single_method_file_row():
    recs = extract_file(MINI / "demo" / "Shapes.java")
    row = aggregate_file(recs)
    assert len(row) == 108
    for name, value in row.items():
        if name.split(".")[1] in ("sd", "iqr", "skew", "kurt", "theil", "gini"):
            assert value == 0.0


def test_loc_example_row():
    class Rec:
        def __init__(self, loc):
            for m in METRICS:
                setattr(self, m, 1)
            self.loc = loc

    row = aggregate_file([Rec(10), Rec(20), Rec(30)])
    assert (row["loc.sum"], row["loc.avg"], row["loc.med"]) == (60, 20, 20)


def test_fixture_row_matches_naive_recomputation():
    recs = extract_file(MINI / "demo" / "Flow.java")
    row = aggregate_file(recs)
    for m in METRICS:
        x = [getattr(r, m) for r in recs]
        for t in ALL:
            assert close(row[f"{m}.{t}"], naive_aggregate(x, t)), (m, t)


def test_empty_file_rejected():
    with pytest.raises(ValueError):
        aggregate_file([])


# -- properties ----------------------------------------------------------------------


@given(real_vectors, st.sampled_from(ALL))
def test_matches_naive_oracle(x, t):
    assert close(aggregate(x, t), naive_aggregate(x, t))


@given(real_vectors, st.floats(0, 1))
def test_quantile_matches_oracle(x, q):
    assert close(quantile(x, q), naive_quantile(x, q))


@given(vectors, st.sampled_from([0.5, 2.0, 3.7, 1000.0]))
def test_scale(x, c):
    y = [c * v for v in x]
    for t in ("sum", "avg", "med", "sd", "iqr"):
        assert close(aggregate(y, t), c * aggregate(x, t), abs_=1e-7)
    for t in ("skew", "kurt", "theil", "gini"):
        assert close(aggregate(y, t), aggregate(x, t), abs_=1e-7)


@given(vectors, st.integers(-500, 500))
def test_translation(x, c):
    y = [v + c for v in x]
    for t in ("avg", "med"):
        assert close(aggregate(y, t), aggregate(x, t) + c, abs_=1e-7)
    for t in ("sd", "iqr", "skew", "kurt"):
        assert close(aggregate(y, t), aggregate(x, t), abs_=1e-7)


@given(vectors, st.randoms(use_true_random=False))
def test_permutation(x, rnd):
    y = list(x)
    rnd.shuffle(y)
    for t in ALL:
        assert close(aggregate(y, t), aggregate(x, t), abs_=1e-9)


@given(vectors)
def test_gini_bounds_and_mean_difference(x):
    g = aggregate(x, "gini")
    n = len(x)
    assert -1e-12 <= g <= (n - 1) / n + 1e-12
    assert close(g, gini_mean_difference(x))


@given(vectors)
def test_theil_nonnegative_and_zero_only_when_constant(x):
    th = aggregate(x, "theil")
    assert th >= -1e-12
    if len(set(x)) > 1:
        assert th > 0
    else:
        assert th == 0


@given(real_vectors, st.sampled_from(ALL))
def test_always_finite(x, t):
    assert np.isfinite(aggregate(x, t))
