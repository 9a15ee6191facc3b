"""Covariate-adjustment estimates, exact effects and the benchmark metrics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .citest import Dataset
from .simulate import BinaryScm, LinearScm, sample_binary_cpt


class EstimationError(ValueError):
    pass


class MetricError(ValueError):
    pass


@dataclass(frozen=True)
class EffectEstimate:
    """Estimates for the direction ``t -> o``; one value per adjustment set."""

    t: int
    o: int
    values: tuple[float, ...]

    def __post_init__(self):
        if not self.values:
            raise MetricError(f"empty estimate set for {self.t} -> {self.o}")


def ols_fit(data: Dataset, t: int, o: int, z: Iterable[int] = ()) -> tuple[float, float]:
    """Coefficient of ``t`` and its standard error when regressing ``o`` on ``{t} | z`` with intercept."""
    z = sorted(set(z))
    if t in z or o in z or t == o:
        raise EstimationError("treatment and outcome must differ and lie outside z")
    vals = data.values.astype(float, copy=False)
    rows = vals.shape[0]
    k = len(z) + 2
    if rows <= k:
        raise EstimationError(f"{rows} rows cannot fit {k} coefficients")
    design = np.column_stack([np.ones(rows), vals[:, t], vals[:, z]])
    coef, _, rank, _ = np.linalg.lstsq(design, vals[:, o], rcond=None)
    if rank < k:
        raise EstimationError("rank-deficient design")
    resid = vals[:, o] - design @ coef
    s2 = float(resid @ resid) / (rows - k)
    cov = s2 * np.linalg.inv(design.T @ design)
    return float(coef[1]), float(np.sqrt(cov[1, 1]))


def ols_effect(data: Dataset, t: int, o: int, z: Iterable[int] = ()) -> float:
    return ols_fit(data, t, o, z)[0]


def population_effect(sigma: np.ndarray, t: int, o: int, z: Iterable[int] = ()) -> float:
    """Population regression coefficient of ``t`` from a covariance matrix."""
    idx = [t, *sorted(set(z))]
    coef = np.linalg.solve(sigma[np.ix_(idx, idx)], sigma[idx, o])
    return float(coef[0])


def true_total_effect(scm: LinearScm, t: int, o: int) -> float:
    n = scm.dag.n
    return float(np.linalg.inv(np.eye(n) - scm.weights)[o, t])


def binary_total_effect(scm: BinaryScm, t: int, o: int, rows: int = 200_000, seed=0) -> float:
    """Monte-Carlo ``E[o | do(t=1)] - E[o | do(t=0)]`` with shared random numbers."""
    if o not in scm.dag.descendants(t) or o == t:
        return 0.0
    hi = sample_binary_cpt(scm, rows, seed, intervention={t: 1}).values[:, o].mean()
    lo = sample_binary_cpt(scm, rows, seed, intervention={t: 0}).values[:, o].mean()
    return float(hi - lo)


def _conditional_variance(sigma: np.ndarray, a: int, given: list[int]) -> float:
    if not given:
        return float(sigma[a, a])
    block = sigma[np.ix_(given, given)]
    if np.linalg.matrix_rank(block) < len(given):
        raise EstimationError("singular conditioning block")
    cross = sigma[a, given]
    return float(sigma[a, a] - cross @ np.linalg.solve(block, cross))


def asymptotic_variance(sigma: np.ndarray, t: int, o: int, z: Iterable[int] = ()) -> float:
    """Residual variance of ``o`` given ``{t} | z`` over residual variance of ``t`` given ``z``."""
    z = sorted(set(z))
    return _conditional_variance(sigma, o, [t, *z]) / _conditional_variance(sigma, t, z)


def intervention_distance(estimates: Iterable[EffectEstimate], truth: dict[tuple[int, int], float]) -> float:
    """Half the sum over both directions of the mean absolute error of each estimate set."""
    estimates = list(estimates)
    if len(estimates) != 2:
        raise MetricError("need estimates for both ordered directions")
    total = 0.0
    for est in estimates:
        if not est.values:
            raise MetricError("empty estimate set")
        theta = truth[(est.t, est.o)]
        total += float(np.mean([abs(theta - v) for v in est.values]))
    return total / 2


def f1_oset(estimated: Iterable[int] | None, truth: Iterable[int] | None) -> float:
    if estimated is None and truth is None:
        return 1.0
    if estimated is None or truth is None:
        return 0.0
    e, t = set(estimated), set(truth)
    if not e and not t:
        return 1.0
    return 2 * len(e & t) / (len(e) + len(t))
