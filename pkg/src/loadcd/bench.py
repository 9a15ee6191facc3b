"""Seeded benchmark harness: generate, run each method, score, summarize."""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .citest import CITester, Dataset, make_tester
from .estimate import (EffectEstimate, EstimationError, binary_total_effect, f1_oset,
                       intervention_distance, ols_effect, true_total_effect)
from .graph import Cpdag, Dag, cpdag_from_dag, is_amenable_global, oset_from_cpdag
from .load import LoadResult, Relation, load, local_valid_sets, mb_by_mb_plus
from .mbdiscovery import LocalGraph, pc_algorithm
from .simulate import (GenerationError, SamplingError, random_binary_scm, random_dag,
                       random_linear_scm, sample_binary_cpt, sample_linear_gaussian,
                       sample_target_pair)

logger = logging.getLogger(__name__)

METHODS = ("load", "load_star", "pc", "mb_by_mb_plus")
TESTERS = ("dsep", "fisherz", "g2")
TARGETS = {"explicit": "explicit_ancestor", "identifiable": "identifiable"}
METRICS = ("ci_tests_executed", "cache_hits", "wall_time", "f1_oset", "intervention_distance")


@dataclass(frozen=True)
class ExperimentConfig:
    n_nodes: tuple[int, ...] = (20, 50, 100)
    expected_degree: float = 2.0
    max_degree: int = 10
    n_samples: int = 10_000
    tester: str = "dsep"
    alpha: float = 0.01
    seeds: tuple[int, ...] = tuple(range(100))
    targets: str = "explicit"
    methods: tuple[str, ...] = ("load", "pc", "mb_by_mb_plus")
    estimation_rows: int = 10_000
    max_redraws: int = 100

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if not self.methods:
            raise ValueError("at least one method is required")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods {sorted(unknown)}")
        if self.tester not in TESTERS:
            raise ValueError(f"unknown tester {self.tester!r}")
        if self.targets not in TARGETS:
            raise ValueError(f"unknown target mode {self.targets!r}")


@dataclass
class RunRecord:
    n_nodes: int
    expected_degree: float
    tester: str
    alpha: float
    n_samples: int
    targets: str
    seed: int
    method: str
    x: int = -1
    y: int = -1
    status: str = "ok"
    reason: str = ""
    ci_tests_executed: int | None = None
    cache_hits: int | None = None
    wall_time: float | None = None
    relation_xy: str = ""
    relation_yx: str = ""
    ident_xy: bool | None = None
    ident_yx: bool | None = None
    f1_oset: float | None = None
    intervention_distance: float | None = None

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class Instance:
    """One generated problem: graph, model, targets, discovery and estimation data."""

    dag: Dag
    cpdag: Cpdag
    x: int
    y: int
    scm: object
    data: Dataset | None
    estimation: Dataset
    truth: dict[tuple[int, int], float] = field(default_factory=dict)


def generate_instance(config: ExperimentConfig, n: int, seed: int) -> Instance:
    """Deterministic in ``(n, seed)``; redraws the graph until a target pair exists."""
    rng = np.random.default_rng([seed, n])
    mode = TARGETS[config.targets]
    for _ in range(config.max_redraws):
        dag = random_dag(n, config.expected_degree, config.max_degree, rng)
        try:
            x, y = sample_target_pair(dag, mode, rng)
        except SamplingError:
            continue
        break
    else:
        raise GenerationError(f"no {mode} target pair after {config.max_redraws} graphs")
    if config.tester == "g2":
        scm = random_binary_scm(dag, rng)
        data = sample_binary_cpt(scm, config.n_samples, rng)
        estimation = sample_binary_cpt(scm, config.estimation_rows, rng)
        truth_seed = int(rng.integers(2**32))
        truth = {(a, b): binary_total_effect(scm, a, b, seed=truth_seed) for a, b in ((x, y), (y, x))}
    else:
        scm = random_linear_scm(dag, rng)
        data = sample_linear_gaussian(scm, config.n_samples, rng) if config.tester == "fisherz" else None
        estimation = sample_linear_gaussian(scm, config.estimation_rows, rng)
        truth = {(a, b): true_total_effect(scm, a, b) for a, b in ((x, y), (y, x))}
    return Instance(dag, cpdag_from_dag(dag), x, y, scm, data, estimation, truth)


def _estimate(data: Dataset, t: int, o: int, sets: list[frozenset[int]] | None) -> EffectEstimate:
    # None means the method declared t a definite non-ancestor of o
    if sets is None:
        return EffectEstimate(t, o, (0.0,))
    values = []
    for z in sets:
        if o in z:
            # o is a parent of t in this member of the class, so the effect is zero
            values.append(0.0)
        else:
            values.append(ols_effect(data, t, o, z))
    return EffectEstimate(t, o, tuple(values))


def _load_sets(res: LoadResult, t: int, o: int) -> list[frozenset[int]] | None:
    if res.relation[(t, o)] is Relation.DEF_NON_AN:
        return None
    return res.adj_sets[(t, o)]


def _pc_sets(g: Cpdag, t: int, o: int) -> list[frozenset[int]] | None:
    if not g.possible_ancestor(t, o):
        return None
    oset = oset_from_cpdag(g, t, o)
    if oset is not None:
        return [oset]
    return local_valid_sets(t, LocalGraph(g, t))


def _run_method(method: str, inst: Instance, tester: CITester) -> tuple[dict, dict, frozenset[int] | None]:
    """Adjustment sets per direction, relation labels and the reported Oset for ``x -> y``."""
    x, y = inst.x, inst.y
    dirs = ((x, y), (y, x))
    if method == "pc":
        g = pc_algorithm(tester.n, tester)
        sets = {d: _pc_sets(g, *d) for d in dirs}
        labels = {}
        for t, o in dirs:
            if o in g.explicit_descendants(t):
                labels[(t, o)] = (Relation.EXPL_AN.value, is_amenable_global(g, t, o))
            elif g.possible_ancestor(t, o):
                labels[(t, o)] = (Relation.POSS_AN.value, False)
            else:
                labels[(t, o)] = (Relation.DEF_NON_AN.value, True)
        return sets, labels, oset_from_cpdag(g, x, y)
    if method == "load":
        res = load(x, y, tester)
    elif method == "load_star":
        res = load(x, y, tester, known_direction=True)
    else:
        res = mb_by_mb_plus(x, y, tester)
    sets = {d: _load_sets(res, *d) for d in dirs}
    labels = {d: (res.relation[d].value, res.is_ident[d]) for d in dirs}
    return sets, labels, res.oset(x, y)


def run_instance(config: ExperimentConfig, n: int, seed: int) -> list[RunRecord]:
    base = dict(n_nodes=n, expected_degree=config.expected_degree, tester=config.tester,
                alpha=config.alpha, n_samples=config.n_samples, targets=config.targets, seed=seed)
    try:
        inst = generate_instance(config, n, seed)
    except (GenerationError, ValueError) as exc:
        return [RunRecord(**base, method=m, status="failed", reason=f"generation: {exc}")
                for m in config.methods]
    true_oset = oset_from_cpdag(inst.cpdag, inst.x, inst.y)
    out = []
    for method in config.methods:
        rec = RunRecord(**base, method=method, x=inst.x, y=inst.y)
        # fresh tester and cache per method
        tester = make_tester(config.tester, dag=inst.dag, data=inst.data, alpha=config.alpha)
        start = time.perf_counter()
        try:
            sets, labels, oset = _run_method(method, inst, tester)
        except Exception as exc:  # a failing method must not stop the run
            logger.exception("method %s failed on n=%d seed=%d", method, n, seed)
            rec.status, rec.reason = "failed", f"{type(exc).__name__}: {exc}"
            out.append(rec)
            continue
        rec.wall_time = time.perf_counter() - start
        st = tester.stats()
        rec.ci_tests_executed, rec.cache_hits = st.executed, st.cache_hits
        (rec.relation_xy, rec.ident_xy), (rec.relation_yx, rec.ident_yx) = (
            labels[(inst.x, inst.y)], labels[(inst.y, inst.x)])
        rec.f1_oset = f1_oset(oset, true_oset)
        try:
            ests = [_estimate(inst.estimation, t, o, sets[(t, o)]) for t, o in sets]
            rec.intervention_distance = intervention_distance(ests, inst.truth)
        except EstimationError as exc:
            rec.status, rec.reason = "failed", f"estimation: {exc}"
        out.append(rec)
    return out


def _task(args):
    return run_instance(*args)


def run_experiment(config: ExperimentConfig, workers: int = 1) -> Iterator[RunRecord]:
    """Records streamed in (size, seed, method) order, whatever the worker count."""
    tasks = [(config, n, s) for n in config.n_nodes for s in config.seeds]
    if workers <= 1:
        for t in tasks:
            yield from run_instance(*t)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for recs in pool.map(_task, tasks):
            yield from recs


def trimmed(values: Iterable[float], k: int = 5) -> tuple[list[float], bool]:
    """Drop the ``k`` lowest and ``k`` highest values when at least ``2k + 1`` remain."""
    v = sorted(values)
    if len(v) >= 2 * k + 1:
        return v[k:len(v) - k], True
    return v, False


def summarize(records: Iterable[RunRecord | dict], trim: int = 5) -> list[dict]:
    """Per (tester, size, method): trimmed mean and sd of each metric, trimming each metric separately."""
    cells: dict[tuple, list[dict]] = {}
    for r in records:
        r = r.as_dict() if isinstance(r, RunRecord) else r
        cells.setdefault((r["tester"], int(r["n_nodes"]), r["method"]), []).append(r)
    rows = []
    for (tester, n, method), recs in sorted(cells.items()):
        ok = [r for r in recs if r["status"] == "ok"]
        row = {"tester": tester, "n_nodes": n, "method": method, "runs": len(recs),
               "failed": len(recs) - len(ok), "trimmed": False}
        for m in METRICS:
            vals = [float(r[m]) for r in ok if r[m] not in (None, "")]
            kept, did = trimmed(vals, trim)
            row["trimmed"] = row["trimmed"] or did
            row[f"{m}_mean"] = float(np.mean(kept)) if kept else None
            row[f"{m}_sd"] = float(np.std(kept, ddof=1)) if len(kept) > 1 else (0.0 if kept else None)
        rows.append(row)
    return rows


def write_records(path: str | Path, records: list[RunRecord], fmt: str = "csv") -> Path:
    path = Path(path)
    rows = [r.as_dict() for r in records]
    if fmt == "json":
        path = path.with_suffix(".jsonl")
        with path.open("w") as fh:
            for row in rows:
                fh.write(json.dumps(row) + "\n")
        return path
    path = path.with_suffix(".csv")
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=[f.name for f in dataclasses.fields(RunRecord)])
        w.writeheader()
        w.writerows(rows)
    return path


def _parse_value(key: str, value: str):
    types = {f.name: f.type for f in dataclasses.fields(RunRecord)}
    if value == "":
        return None if key not in ("relation_xy", "relation_yx", "reason") else ""
    t = str(types.get(key, "str"))
    if t.startswith("int"):
        return int(value)
    if t.startswith("float"):
        return float(value)
    if t.startswith("bool"):
        return value == "True"
    return value


def read_records(path: str | Path) -> list[dict]:
    path = Path(path)
    if path.suffix == ".jsonl":
        with path.open() as fh:
            return [json.loads(line) for line in fh if line.strip()]
    with path.open(newline="") as fh:
        return [{k: _parse_value(k, v) for k, v in row.items()} for row in csv.DictReader(fh)]


def write_summary(out_dir: str | Path, rows: list[dict]) -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    csv_path, json_path = out_dir / "summary.csv", out_dir / "summary.json"
    if rows:
        with csv_path.open("w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)
    else:
        csv_path.write_text("")
    meta = {"trimming": "per metric, 5 lowest and 5 highest dropped when a cell has at least 11 runs",
            "binary_estimator": "linear probability adjustment"}
    json_path.write_text(json.dumps({"meta": meta, "cells": rows}, indent=2))
    return csv_path, json_path
