"""Random graphs, structural models and target pairs for synthetic benchmarks."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .citest import Dataset
from .graph import Dag, cpdag_from_dag, is_amenable_global


class GenerationError(RuntimeError):
    pass


class SamplingError(RuntimeError):
    pass


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_dag(n: int, expected_degree: float, max_degree: int, seed, max_tries: int = 1000) -> Dag:
    """Erdos-Renyi DAG over a random causal order.

    Each forward pair is an edge with probability ``expected_degree / (n - 1)``;
    graphs with a node of degree above ``max_degree`` are redrawn whole.
    """
    if n < 2:
        raise ValueError("need at least two nodes")
    if expected_degree > max_degree:
        raise ValueError("expected degree exceeds the maximum degree")
    rng = _rng(seed)
    p = expected_degree / (n - 1)
    iu = np.triu_indices(n, k=1)
    for _ in range(max_tries):
        order = rng.permutation(n)
        mask = rng.random(len(iu[0])) < p
        src, dst = order[iu[0][mask]], order[iu[1][mask]]
        deg = np.bincount(src, minlength=n) + np.bincount(dst, minlength=n)
        if deg.max(initial=0) <= max_degree:
            return Dag(n, zip(src.tolist(), dst.tolist()))
    raise GenerationError(
        f"no DAG with max degree {max_degree} after {max_tries} draws; "
        "raise max_degree or lower expected_degree")


@dataclass
class LinearScm:
    """Linear SEM with unit-variance Gaussian noise; ``weights[child, parent]``."""

    dag: Dag
    weights: np.ndarray

    def __post_init__(self):
        n = self.dag.n
        mask = np.zeros((n, n), dtype=bool)
        for a, b in self.dag.edges:
            mask[b, a] = True
        if np.any(self.weights[~mask] != 0):
            raise ValueError("weights outside the DAG's edges")


@dataclass
class BinaryScm:
    """Binary Bayesian network; ``cpts[v][k]`` is P(v = 1) under parent configuration ``k``.

    Configuration ``k`` encodes parent values in ascending parent-id order,
    the first parent being the most significant bit.
    """

    dag: Dag
    cpts: list[np.ndarray] = field(repr=False)

    def parents(self, v: int) -> list[int]:
        return sorted(self.dag.parents(v))


def random_linear_scm(dag: Dag, seed, low: float = 0.5, high: float = 3.0) -> LinearScm:
    """Edge weights uniform on ``[-high, -low] U [low, high]``."""
    rng = _rng(seed)
    w = np.zeros((dag.n, dag.n))
    for a, b in sorted(dag.edges):
        w[b, a] = rng.uniform(low, high) * rng.choice((-1.0, 1.0))
    return LinearScm(dag, w)


def random_binary_scm(dag: Dag, seed, max_parents: int = 16) -> BinaryScm:
    """CPT entries drawn uniformly on (0, 1), one per parent configuration."""
    rng = _rng(seed)
    cpts = []
    for v in range(dag.n):
        k = len(dag.parents(v))
        if k > max_parents:
            raise GenerationError(f"node {v} has {k} parents; CPT cap is {max_parents}")
        cpts.append(rng.uniform(0.0, 1.0, size=2**k))
    return BinaryScm(dag, cpts)


def implied_covariance(scm: LinearScm) -> np.ndarray:
    n = scm.dag.n
    a = np.linalg.inv(np.eye(n) - scm.weights)
    return a @ a.T


def sample_linear_gaussian(scm: LinearScm, rows: int, seed) -> Dataset:
    rng = _rng(seed)
    n = scm.dag.n
    noise = rng.standard_normal((rows, n))
    x = np.zeros((rows, n))
    for v in scm.dag.topological_order():
        x[:, v] = noise[:, v]
        for p in scm.dag.parents(v):
            x[:, v] += scm.weights[v, p] * x[:, p]
    return Dataset(x)


def sample_binary_cpt(scm: BinaryScm, rows: int, seed, intervention: dict[int, int] | None = None) -> Dataset:
    """Forward sampling; ``intervention`` clamps nodes to fixed values."""
    rng = _rng(seed)
    n = scm.dag.n
    u = rng.random((rows, n))
    x = np.zeros((rows, n), dtype=np.int64)
    intervention = intervention or {}
    for v in scm.dag.topological_order():
        if v in intervention:
            x[:, v] = intervention[v]
            continue
        config = np.zeros(rows, dtype=np.int64)
        for p in scm.parents(v):
            config = config * 2 + x[:, p]
        x[:, v] = (u[:, v] < scm.cpts[v][config]).astype(np.int64)
    return Dataset(x, discrete=True)


def sample_target_pair(dag: Dag, mode: str = "explicit_ancestor", seed=None) -> tuple[int, int]:
    """A uniformly drawn ordered pair ``(x, y)`` with ``x`` an explicit ancestor of ``y``.

    ``mode="identifiable"`` also requires the CPDAG to be amenable relative to ``(x, y)``.
    """
    if mode not in ("explicit_ancestor", "identifiable"):
        raise ValueError(f"unknown target mode {mode!r}")
    g = cpdag_from_dag(dag)
    pairs = []
    for x in range(dag.n):
        for y in sorted(g.explicit_descendants(x) - {x}):
            if mode == "identifiable" and not is_amenable_global(g, x, y):
                continue
            pairs.append((x, y))
    if not pairs:
        raise SamplingError(f"no {mode} target pair in this graph")
    return pairs[_rng(seed).integers(len(pairs))]
