import math

import numpy as np
import pytest
from scipy import stats as sps

from loadcd.citest import (CachedTester, Dataset, DSepTester, FisherZTester, GSquareTester,
                           QueryTooLarge, canonical, fisher_z_statistic, g_square_statistic,
                           make_tester, partial_correlation)
from loadcd.graph import Dag


def test_fisher_z_worked_value():
    # sqrt(100 - 0 - 3) * atanh(0.3)
    assert fisher_z_statistic(0.3, 100, 0) == pytest.approx(3.0485, abs=1e-4)


def test_critical_value():
    data = Dataset(np.random.default_rng(0).standard_normal((50, 3)))
    assert FisherZTester(data, 0.01).critical == pytest.approx(2.5758, abs=1e-4)


def test_partial_correlation_matches_residual_regression():
    rng = np.random.default_rng(1)
    x = rng.standard_normal((500, 4))
    x[:, 1] += x[:, 0]
    x[:, 2] += 0.5 * x[:, 0] + x[:, 3]
    corr = np.corrcoef(x, rowvar=False)
    s = [0, 3]
    design = np.column_stack([np.ones(500), x[:, s]])
    r1 = x[:, 1] - design @ np.linalg.lstsq(design, x[:, 1], rcond=None)[0]
    r2 = x[:, 2] - design @ np.linalg.lstsq(design, x[:, 2], rcond=None)[0]
    assert partial_correlation(corr, 1, 2, tuple(s)) == pytest.approx(np.corrcoef(r1, r2)[0, 1], abs=1e-10)


def test_fisher_z_detects_chain_structure():
    rng = np.random.default_rng(2)
    a = rng.standard_normal(5000)
    b = 2 * a + rng.standard_normal(5000)
    c = -b + rng.standard_normal(5000)
    t = FisherZTester(Dataset(np.column_stack([a, b, c])), 0.01)
    assert not t.independent(0, 2)
    assert t.independent(0, 2, [1])
    assert t.independent(2, 0, [1])


def test_fisher_z_too_few_rows():
    t = FisherZTester(Dataset(np.random.default_rng(0).standard_normal((5, 5))))
    with pytest.raises(QueryTooLarge):
        t.independent(0, 1, [2, 3])


def test_fisher_z_singular_is_dependent():
    rng = np.random.default_rng(3)
    a = rng.standard_normal(100)
    t = FisherZTester(Dataset(np.column_stack([a, a, rng.standard_normal(100)])))
    assert t.independent(0, 2, [1]) is False


def test_fisher_z_rejects_discrete():
    with pytest.raises(ValueError):
        FisherZTester(Dataset(np.zeros((10, 2), dtype=int), discrete=True))


@pytest.mark.parametrize("seed", range(5))
def test_g_square_matches_scipy_log_likelihood(seed):
    table = np.random.default_rng(seed).integers(1, 40, size=(3, 2))
    g2, df = g_square_statistic(table)
    ref, _, ref_df, _ = sps.chi2_contingency(table, correction=False, lambda_="log-likelihood")
    assert g2 == pytest.approx(ref, rel=1e-10)
    assert df == ref_df


def test_g_square_strata_add_up():
    rng = np.random.default_rng(7)
    tables = rng.integers(1, 30, size=(3, 2, 2))
    g2, df = g_square_statistic(tables)
    assert g2 == pytest.approx(sum(g_square_statistic(t)[0] for t in tables))
    assert df == 3


def test_g_square_zero_margins_drop_df():
    g2, df = g_square_statistic(np.array([[10, 0], [0, 0]]))
    assert df == 0 and g2 == 0.0


def test_g_square_tester_on_binary_chain():
    rng = np.random.default_rng(4)
    a = rng.integers(0, 2, 20000)
    b = np.where(rng.random(20000) < 0.85, a, 1 - a)
    c = np.where(rng.random(20000) < 0.85, b, 1 - b)
    t = GSquareTester(Dataset(np.column_stack([a, b, c]), discrete=True), 0.01)
    assert not t.independent(0, 2)
    assert t.independent(0, 2, [1])
    assert t.table(0, 2, [1]).sum() == 20000


def test_g_square_budget():
    t = GSquareTester(Dataset(np.zeros((10, 4), dtype=int), discrete=True), max_cells=8)
    with pytest.raises(QueryTooLarge):
        t.independent(0, 1, [2, 3])


def test_g_square_constant_column_is_independent():
    rng = np.random.default_rng(5)
    data = np.column_stack([np.zeros(100, dtype=int), rng.integers(0, 2, 100)])
    assert GSquareTester(Dataset(data, discrete=True)).p_value(0, 1) == 1.0


def test_canonical_form():
    assert canonical(3, 1, [5, 2, 2]) == (1, 3, (2, 5))
    with pytest.raises(ValueError):
        canonical(1, 1)
    with pytest.raises(ValueError):
        canonical(1, 2, [2])


def test_cached_tester_counts_distinct_queries():
    t = CachedTester(DSepTester(Dag(3, [(0, 1), (1, 2)])))
    assert t.independent(0, 2, [1])
    assert t.independent(2, 0, [1])
    t.independent(0, 2)
    st = t.stats()
    assert (st.executed, st.cache_hits) == (2, 1)
    assert t.queries == [(0, 2, (1,)), (0, 2, ())]


def test_make_tester_kinds():
    assert make_tester("dsep", dag=Dag(2)).n == 2
    with pytest.raises(ValueError):
        make_tester("bogus")


def test_dataset_validation():
    with pytest.raises(ValueError):
        Dataset(np.zeros(3))
    with pytest.raises(ValueError):
        Dataset(np.array([[1.0, math.nan]]))
    with pytest.raises(ValueError):
        Dataset(np.array([[-1, 0]]), discrete=True)
