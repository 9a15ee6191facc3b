import itertools

import numpy as np
import pytest

from loadcd.citest import Dataset
from loadcd.estimate import (EffectEstimate, EstimationError, MetricError, asymptotic_variance,
                             binary_total_effect, f1_oset, intervention_distance, ols_effect, ols_fit,
                             population_effect, true_total_effect)
from loadcd.graph import Dag
from loadcd.oracle import valid_adjustment_sets
from loadcd.simulate import BinaryScm, LinearScm, implied_covariance, random_dag, random_linear_scm


def scm_from(n, weighted_edges):
    w = np.zeros((n, n))
    for a, b, v in weighted_edges:
        w[b, a] = v
    return LinearScm(Dag(n, [(a, b) for a, b, _ in weighted_edges]), w)


def path_sum_effect(scm, t, o):
    """Sum over directed paths of products of edge weights."""
    dag = scm.dag

    def walk(v):
        if v == o:
            return 1.0
        return sum(scm.weights[c, v] * walk(c) for c in dag.children(v))

    return walk(t)


def test_true_effect_examples():
    assert true_total_effect(scm_from(2, [(0, 1, 2.0)]), 0, 1) == pytest.approx(2)
    assert true_total_effect(scm_from(3, [(0, 1, 2.0), (1, 2, 3.0)]), 0, 2) == pytest.approx(6)
    # X -> Y weight 1 plus X -> M -> Y with weights 2, 3
    assert true_total_effect(scm_from(3, [(0, 2, 1.0), (0, 1, 2.0), (1, 2, 3.0)]), 0, 2) == pytest.approx(7)


@pytest.mark.parametrize("seed", range(20))
def test_true_effect_matches_path_enumeration(seed):
    scm = random_linear_scm(random_dag(8, 2.5, 10, seed), seed)
    for t, o in itertools.permutations(range(8), 2):
        assert true_total_effect(scm, t, o) == pytest.approx(path_sum_effect(scm, t, o), abs=1e-9)


def test_ols_slope_within_three_se():
    rng = np.random.default_rng(0)
    t = rng.standard_normal(10_000)
    o = 2 * t + rng.standard_normal(10_000)
    coef, se = ols_fit(Dataset(np.column_stack([t, o])), 0, 1)
    assert abs(coef - 2) < 3 * se


def test_ols_independent_near_zero():
    rng = np.random.default_rng(1)
    x = rng.standard_normal((10_000, 2))
    coef, se = ols_fit(Dataset(x), 0, 1)
    assert abs(coef) < 4 * se


def test_ols_errors():
    x = np.random.default_rng(2).standard_normal((50, 3))
    x[:, 2] = x[:, 0]
    with pytest.raises(EstimationError):
        ols_effect(Dataset(x), 0, 1, {2})
    with pytest.raises(EstimationError):
        ols_effect(Dataset(x), 0, 1, {1})
    with pytest.raises(EstimationError):
        ols_effect(Dataset(x[:3]), 0, 1, {2})


@pytest.mark.parametrize("seed", range(50))
def test_population_regression_equals_true_effect_for_valid_sets(seed):
    dag = random_dag(6, 2, 10, seed)
    scm = random_linear_scm(dag, seed)
    sigma = implied_covariance(scm)
    for t, o in itertools.permutations(range(6), 2):
        if o not in dag.descendants(t):
            continue
        for z in valid_adjustment_sets(dag, t, o):
            assert population_effect(sigma, t, o, z) == pytest.approx(true_total_effect(scm, t, o), abs=1e-9)


def test_asymptotic_variance_two_nodes():
    scm = scm_from(2, [(0, 1, 1.0)])
    assert asymptotic_variance(implied_covariance(scm), 0, 1) == pytest.approx(1.0)


@pytest.mark.parametrize("seed", range(20))
def test_outcome_predictor_never_hurts(seed):
    rng = np.random.default_rng(seed)
    # 0 -> 1, 2 -> 1 where 2 only predicts the outcome
    scm = scm_from(3, [(0, 1, rng.uniform(0.5, 3)), (2, 1, rng.uniform(0.5, 3))])
    sigma = implied_covariance(scm)
    assert asymptotic_variance(sigma, 0, 1, {2}) <= asymptotic_variance(sigma, 0, 1) + 1e-12


def test_asymptotic_variance_singular_block():
    sigma = np.ones((3, 3))
    with pytest.raises(EstimationError):
        asymptotic_variance(sigma, 0, 1, {2})


def test_intervention_distance_examples():
    truth = {(0, 1): 6.0, (1, 0): 0.0}
    exact = [EffectEstimate(0, 1, (6.0,)), EffectEstimate(1, 0, (0.0,))]
    assert intervention_distance(exact, truth) == 0
    spread = [EffectEstimate(0, 1, (4.0, 8.0)), EffectEstimate(1, 0, (0.0,))]
    assert intervention_distance(spread, truth) == pytest.approx(1.0)
    swapped = [EffectEstimate(1, 0, (0.0,)), EffectEstimate(0, 1, (4.0, 8.0))]
    assert intervention_distance(swapped, truth) == intervention_distance(spread, truth)


def test_intervention_distance_keeps_duplicates():
    truth = {(0, 1): 0.0, (1, 0): 0.0}
    est = [EffectEstimate(0, 1, (1.0, 1.0, 4.0)), EffectEstimate(1, 0, (0.0,))]
    assert intervention_distance(est, truth) == pytest.approx(1.0)


def test_empty_estimate_rejected():
    with pytest.raises(MetricError):
        EffectEstimate(0, 1, ())
    with pytest.raises(MetricError):
        intervention_distance([EffectEstimate(0, 1, (1.0,))], {(0, 1): 1.0})


@pytest.mark.parametrize("est, truth, expected", [
    (None, None, 1.0), ({1}, None, 0.0), (None, {1}, 0.0), ({1}, {1}, 1.0),
    ({1, 2}, {1}, 2 / 3), (set(), set(), 1.0), (set(), {1}, 0.0)])
def test_f1(est, truth, expected):
    assert f1_oset(est, truth) == pytest.approx(expected)


def test_binary_effect_deterministic_child():
    # child copies the parent: effect 1
    scm = BinaryScm(Dag(2, [(0, 1)]), [np.array([0.3]), np.array([0.0, 1.0])])
    assert binary_total_effect(scm, 0, 1, rows=1000) == pytest.approx(1.0)
    assert binary_total_effect(scm, 1, 0, rows=1000) == 0.0


def test_binary_effect_matches_exact():
    p = np.array([0.2, 0.7])
    scm = BinaryScm(Dag(2, [(0, 1)]), [np.array([0.5]), p])
    assert binary_total_effect(scm, 0, 1, rows=400_000) == pytest.approx(0.5, abs=0.01)
