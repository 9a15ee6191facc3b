"""Conditional-independence testers.

Every tester answers ``independent(x, y, s)`` symmetrically in ``x`` and
``y``. Wrap a tester in :class:`CachedTester` to evaluate each distinct query
once; its ``stats().executed`` is the CI-test count reported by benchmarks.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy import stats as sps

from .graph import Dag, d_separated

logger = logging.getLogger(__name__)

Query = tuple[int, int, tuple[int, ...]]


class QueryTooLarge(ValueError):
    """The conditioning set is too large for the data at hand."""


@dataclass
class TestStats:
    executed: int = 0
    cache_hits: int = 0


@dataclass
class Dataset:
    values: np.ndarray
    names: list[str] = field(default_factory=list)
    discrete: bool = False

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.ndim != 2:
            raise ValueError("dataset must be a 2-d array (rows x columns)")
        self.values = np.asfortranarray(values)
        if not self.names:
            self.names = [f"X{i}" for i in range(values.shape[1])]
        if len(self.names) != values.shape[1]:
            raise ValueError("one name per column required")
        if self.discrete:
            if not np.issubdtype(values.dtype, np.integer):
                raise ValueError("discrete data must be integer coded")
            if values.min(initial=0) < 0:
                raise ValueError("discrete data must be coded 0..k-1")
        elif np.isnan(values).any():
            raise ValueError("missing values are not supported")

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_cols(self) -> int:
        return self.values.shape[1]

    def arities(self) -> np.ndarray:
        return self.values.max(axis=0) + 1


def canonical(x: int, y: int, s: Iterable[int] = ()) -> Query:
    s = tuple(sorted(set(s)))
    if x == y or x in s or y in s:
        raise ValueError(f"invalid CI query ({x}, {y} | {s})")
    if x > y:
        x, y = y, x
    return x, y, s


class CITester:
    """Base class; subclasses implement ``_test`` on canonical queries."""

    n: int

    def __init__(self):
        self._stats = TestStats()

    def independent(self, x: int, y: int, s: Iterable[int] = ()) -> bool:
        q = canonical(x, y, s)
        self._stats.executed += 1
        return self._test(*q)

    def _test(self, x: int, y: int, s: tuple[int, ...]) -> bool:
        raise NotImplementedError

    def stats(self) -> TestStats:
        return TestStats(self._stats.executed, self._stats.cache_hits)


class DSepTester(CITester):
    """Oracle tester: independence is d-separation in a known DAG."""

    def __init__(self, dag: Dag):
        super().__init__()
        self.dag = dag
        self.n = dag.n

    def _test(self, x, y, s):
        return d_separated(self.dag, x, y, s)


def fisher_z_statistic(rho: float, n_rows: int, cond_size: int) -> float:
    return math.sqrt(n_rows - cond_size - 3) * 0.5 * math.log((1 + rho) / (1 - rho))


def partial_correlation(corr: np.ndarray, x: int, y: int, s: tuple[int, ...]) -> float:
    """Partial correlation of x and y given s from a correlation matrix.

    Raises ``np.linalg.LinAlgError`` on a singular sub-matrix.
    """
    idx = [x, y, *s]
    sub = corr[np.ix_(idx, idx)]
    prec = np.linalg.inv(sub)
    denom = prec[0, 0] * prec[1, 1]
    if not np.all(np.isfinite(prec)) or denom <= 0:
        raise np.linalg.LinAlgError("singular correlation sub-matrix")
    return float(-prec[0, 1] / math.sqrt(denom))


class FisherZTester(CITester):
    """Partial-correlation test for linear Gaussian data."""

    def __init__(self, data: Dataset, alpha: float = 0.01):
        super().__init__()
        if data.discrete:
            raise ValueError("Fisher-Z needs continuous data")
        if not 0 < alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        self.data = data
        self.n = data.n_cols
        self.alpha = alpha
        self.critical = float(sps.norm.ppf(1 - alpha / 2))
        self.corr = np.atleast_2d(np.corrcoef(data.values, rowvar=False))

    def statistic(self, x: int, y: int, s: Iterable[int] = ()) -> float:
        s = tuple(s)
        if self.data.n_rows <= len(s) + 3:
            raise QueryTooLarge(f"{self.data.n_rows} rows cannot support |s|={len(s)}")
        rho = partial_correlation(self.corr, x, y, s)
        rho = min(max(rho, -1 + 1e-15), 1 - 1e-15)
        return fisher_z_statistic(rho, self.data.n_rows, len(s))

    def _test(self, x, y, s):
        try:
            z = self.statistic(x, y, s)
        except np.linalg.LinAlgError:
            logger.warning("singular covariance for (%d, %d | %s); treating as dependent", x, y, s)
            return False
        return abs(z) <= self.critical


def g_square_statistic(counts: np.ndarray) -> tuple[float, int]:
    """G^2 and degrees of freedom for stratified counts of shape (strata, rx, ry).

    Rows or columns with zero marginal inside a stratum do not contribute
    degrees of freedom.
    """
    counts = np.asarray(counts, dtype=float)
    if counts.ndim == 2:
        counts = counts[None]
    total = counts.sum(axis=(1, 2))
    rows = counts.sum(axis=2)
    cols = counts.sum(axis=1)
    keep = total > 0
    counts, total, rows, cols = counts[keep], total[keep], rows[keep], cols[keep]
    expected = rows[:, :, None] * cols[:, None, :] / total[:, None, None]
    pos = counts > 0
    g2 = 2.0 * float(np.sum(counts[pos] * np.log(counts[pos] / expected[pos])))
    nz_rows = (rows > 0).sum(axis=1)
    nz_cols = (cols > 0).sum(axis=1)
    df = int(np.sum(np.maximum(nz_rows - 1, 0) * np.maximum(nz_cols - 1, 0)))
    return max(g2, 0.0), df


class GSquareTester(CITester):
    """G^2 likelihood-ratio test for discrete data."""

    def __init__(self, data: Dataset, alpha: float = 0.01, max_cells: int = 2**30):
        super().__init__()
        if not data.discrete:
            raise ValueError("G^2 needs discrete data")
        if not 0 < alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        self.data = data
        self.n = data.n_cols
        self.alpha = alpha
        self.max_cells = max_cells
        self.arity = [max(int(a), 2) for a in data.arities()]

    def table(self, x: int, y: int, s: Iterable[int] = ()) -> np.ndarray:
        s = tuple(s)
        cells = self.arity[x] * self.arity[y] * math.prod(self.arity[v] for v in s)
        if cells > self.max_cells:
            raise QueryTooLarge(f"contingency table with {cells} cells exceeds budget {self.max_cells}")
        vals = self.data.values
        if s:
            code = np.zeros(self.data.n_rows, dtype=np.int64)
            for v in s:
                code = code * self.arity[v] + vals[:, v]
            _, strata = np.unique(code, return_inverse=True)
            n_strata = int(strata.max()) + 1
        else:
            strata = np.zeros(self.data.n_rows, dtype=np.int64)
            n_strata = 1
        rx, ry = self.arity[x], self.arity[y]
        key = (strata * rx + vals[:, x]) * ry + vals[:, y]
        return np.bincount(key, minlength=n_strata * rx * ry).reshape(n_strata, rx, ry)

    def p_value(self, x: int, y: int, s: Iterable[int] = ()) -> float:
        g2, df = g_square_statistic(self.table(x, y, s))
        if df <= 0:
            return 1.0
        return float(sps.chi2.sf(g2, df))

    def _test(self, x, y, s):
        return self.p_value(x, y, s) > self.alpha


class CachedTester(CITester):
    """Evaluates each canonical query at most once.

    ``queries`` keeps the distinct queries in execution order.
    """

    def __init__(self, inner: CITester):
        super().__init__()
        self.inner = inner
        self.n = inner.n
        self._cache: dict[Query, bool] = {}

    @property
    def queries(self) -> list[Query]:
        return list(self._cache)

    def independent(self, x: int, y: int, s: Iterable[int] = ()) -> bool:
        q = canonical(x, y, s)
        hit = self._cache.get(q)
        if hit is not None:
            self._stats.cache_hits += 1
            return hit
        result = self.inner.independent(*q)
        self._cache[q] = result
        self._stats.executed += 1
        return result


def make_tester(kind: str, *, dag: Dag | None = None, data: Dataset | None = None,
                alpha: float = 0.01) -> CachedTester:
    """A fresh cached tester of the given kind (``dsep``, ``fisherz`` or ``g2``)."""
    if kind == "dsep":
        return CachedTester(DSepTester(dag))
    if kind == "fisherz":
        return CachedTester(FisherZTester(data, alpha))
    if kind == "g2":
        return CachedTester(GSquareTester(data, alpha))
    raise ValueError(f"unknown tester kind {kind!r}")
