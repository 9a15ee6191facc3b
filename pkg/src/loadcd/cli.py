"""Command-line entry point: simulate, load, pc, bench, summarize, verify."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import bench
from .citest import make_tester
from .fileio import graph_to_dict, read_csv, read_graph, write_csv, write_graph
from .graph import Cpdag, cpdag_from_dag
from .load import load
from .mbdiscovery import pc_algorithm
from .simulate import (random_binary_scm, random_dag, random_linear_scm, sample_binary_cpt,
                       sample_linear_gaussian, sample_target_pair)

TESTER_CHOICES = ("dsep", "fisherz", "g2")


def parse_seeds(text: str) -> tuple[int, ...]:
    """``"A..B"`` is the half-open range ``A, ..., B-1``; a bare integer is one seed."""
    if ".." in text:
        a, b = text.split("..", 1)
        lo, hi = int(a), int(b)
        if hi <= lo:
            raise argparse.ArgumentTypeError(f"empty seed range {text!r}")
        return tuple(range(lo, hi))
    return (int(text),)


def _csv_ints(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(",") if v)


def _csv_strs(text: str) -> tuple[str, ...]:
    return tuple(v.strip() for v in text.split(",") if v.strip())


def _node(spec: str, names: list[str]) -> int:
    if spec in names:
        return names.index(spec)
    try:
        v = int(spec)
    except ValueError:
        raise SystemExit(f"unknown node {spec!r}") from None
    if not 0 <= v < len(names):
        raise SystemExit(f"node index {v} out of range")
    return v


def _tester_from_args(args):
    """A tester plus node names, from ``--graph`` (d-separation) or ``--data``."""
    if args.tester == "dsep":
        if not args.graph:
            raise SystemExit("--tester dsep needs --graph with a fully directed graph")
        g, names = read_graph(args.graph)
        return make_tester("dsep", dag=g.to_dag()), names
    if not args.data:
        raise SystemExit(f"--tester {args.tester} needs --data")
    data = read_csv(args.data, discrete=args.tester == "g2")
    return make_tester(args.tester, data=data, alpha=args.alpha), data.names


def cmd_simulate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    dag = random_dag(args.nodes, args.degree, args.max_degree, rng)
    names = [f"X{i}" for i in range(dag.n)]
    if args.tester == "g2":
        data = sample_binary_cpt(random_binary_scm(dag, rng), args.samples, rng)
    else:
        data = sample_linear_gaussian(random_linear_scm(dag, rng), args.samples, rng)
    data.names = names
    write_graph(out / "dag.json", Cpdag(dag.n, dag.edges), names)
    write_graph(out / "cpdag.json", cpdag_from_dag(dag), names)
    write_csv(out / "data.csv", data)
    meta = {"seed": args.seed, "nodes": args.nodes, "expected_degree": args.degree,
            "max_degree": args.max_degree, "samples": args.samples,
            "model": "binary" if args.tester == "g2" else "linear_gaussian",
            "degree_cap": "whole-graph rejection"}
    try:
        x, y = sample_target_pair(dag, "explicit_ancestor", rng)
        meta["targets"] = [names[x], names[y]]
    except Exception:
        meta["targets"] = None
    (out / "meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    print(f"wrote {out}/dag.json, cpdag.json, data.csv, meta.json")
    return 0


def cmd_load(args) -> int:
    tester, names = _tester_from_args(args)
    x, y = _node(args.x, names), _node(args.y, names)
    res = load(x, y, tester, known_direction=args.known_direction)
    out = {"targets": [names[x], names[y]], "directions": res.to_json(names),
           "ci_tests": tester.stats().executed}
    print(json.dumps(out, indent=2))
    return 0


def cmd_pc(args) -> int:
    tester, names = _tester_from_args(args)
    g = pc_algorithm(tester.n, tester)
    if args.out:
        write_graph(args.out, g, names)
    else:
        print(json.dumps(graph_to_dict(g, names), indent=2))
    print(f"ci_tests={tester.stats().executed}", file=sys.stderr)
    return 0


def cmd_bench(args) -> int:
    config = bench.ExperimentConfig(
        n_nodes=args.nodes, expected_degree=args.degree, max_degree=args.max_degree,
        n_samples=args.samples, tester=args.tester, alpha=args.alpha, seeds=args.seeds,
        targets=args.targets, methods=args.methods, estimation_rows=args.estimation_rows)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    records = []
    for rec in bench.run_experiment(config, workers=args.workers):
        records.append(rec)
        if rec.status != "ok":
            print(f"FAILED n={rec.n_nodes} seed={rec.seed} {rec.method}: {rec.reason}", file=sys.stderr)
    path = bench.write_records(out / "records", records, args.format)
    rows = bench.summarize(records)
    bench.write_summary(out, rows)
    _print_summary(rows)
    print(f"records: {path}")
    return 1 if any(r.status != "ok" for r in records) else 0


def _print_summary(rows: list[dict]) -> None:
    print(f"{'tester':8} {'n':>4} {'method':14} {'runs':>5} {'ci_tests':>10} {'f1':>6} {'int_dist':>9}")
    for r in rows:
        def fmt(v, spec):
            return format(v, spec) if v is not None else "-"
        print(f"{r['tester']:8} {r['n_nodes']:>4} {r['method']:14} {r['runs']:>5} "
              f"{fmt(r['ci_tests_executed_mean'], '10.1f')} {fmt(r['f1_oset_mean'], '6.3f')} "
              f"{fmt(r['intervention_distance_mean'], '9.4f')}")


def cmd_summarize(args) -> int:
    records = bench.read_records(args.records)
    rows = bench.summarize(records)
    out = Path(args.out) if args.out else Path(args.records).parent
    out.mkdir(parents=True, exist_ok=True)
    bench.write_summary(out, rows)
    _print_summary(rows)
    return 0


def cmd_verify(args) -> int:
    """Cross-check local answers against the true CPDAG on random small graphs."""
    from .graph import is_amenable_global, oset_from_cpdag
    from .load import local_relate
    from .mbdiscovery import mb_by_mb
    from .oracle import true_relation

    failures = 0
    for seed in args.seeds:
        dag = random_dag(args.nodes, args.degree, args.max_degree, seed)
        g = cpdag_from_dag(dag)
        for v in range(dag.n):
            lg = mb_by_mb(v, make_tester("dsep", dag=dag))
            if (lg.parents(), lg.children(), lg.siblings()) != (g.parents(v), g.children(v), g.siblings(v)):
                failures += 1
                print(f"seed {seed}: local edges of {v} differ")
        for x in range(dag.n):
            for y in range(x + 1, dag.n):
                rel, _, _ = local_relate(x, y, make_tester("dsep", dag=dag))
                res = load(x, y, make_tester("dsep", dag=dag))
                for t, o in ((x, y), (y, x)):
                    if rel[(t, o)].value != true_relation(g, t, o):
                        failures += 1
                        print(f"seed {seed}: relation {t}->{o} {rel[(t, o)].value}")
                    if res.oset(t, o) != oset_from_cpdag(g, t, o):
                        failures += 1
                        print(f"seed {seed}: optimal set {t}->{o} differs")
                    if rel[(t, o)].value == "ExplAn" and res.is_ident[(t, o)] != is_amenable_global(g, t, o):
                        failures += 1
                        print(f"seed {seed}: identifiability {t}->{o} differs")
    print(f"verify: {len(args.seeds)} graphs, {failures} failures")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="loadcd", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def graph_flags(sp, nodes_type=int, nodes_default=20):
        sp.add_argument("--nodes", type=nodes_type, default=nodes_default)
        sp.add_argument("--degree", type=float, default=2.0)
        sp.add_argument("--max-degree", type=int, default=10)

    sp = sub.add_parser("simulate", help="sample a random graph, model and dataset")
    graph_flags(sp)
    sp.add_argument("--samples", type=int, default=10_000)
    sp.add_argument("--tester", choices=TESTER_CHOICES, default="fisherz",
                    help="g2 produces binary data, anything else linear Gaussian")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_simulate)

    for name, func, hlp in (("load", cmd_load, "run LOAD on one target pair"),
                            ("pc", cmd_pc, "run global PC")):
        sp = sub.add_parser(name, help=hlp)
        sp.add_argument("--graph", help="DAG file for the d-separation tester")
        sp.add_argument("--data", help="CSV with a header row")
        sp.add_argument("--tester", choices=TESTER_CHOICES, default="fisherz")
        sp.add_argument("--alpha", type=float, default=0.01)
        if name == "load":
            sp.add_argument("--x", required=True, help="treatment name or index")
            sp.add_argument("--y", required=True, help="outcome name or index")
            sp.add_argument("--known-direction", action="store_true",
                            help="assume x is an ancestor of y and skip the relation step")
        else:
            sp.add_argument("--out", help="write the CPDAG here instead of stdout")
        sp.set_defaults(func=func)

    sp = sub.add_parser("bench", help="run the seeded benchmark matrix")
    graph_flags(sp, _csv_ints, (20, 50, 100))
    sp.add_argument("--samples", type=int, default=10_000)
    sp.add_argument("--estimation-rows", type=int, default=10_000)
    sp.add_argument("--tester", choices=TESTER_CHOICES, default="dsep")
    sp.add_argument("--alpha", type=float, default=0.01)
    sp.add_argument("--seeds", type=parse_seeds, default=tuple(range(100)), help="A..B, half-open")
    sp.add_argument("--targets", choices=tuple(bench.TARGETS), default="explicit")
    sp.add_argument("--methods", type=_csv_strs, default=("load", "pc", "mb_by_mb_plus"),
                    help=f"comma-separated subset of {','.join(bench.METHODS)}")
    sp.add_argument("--known-direction", action="store_true", help="add LOAD with the known direction")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--out", required=True)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("summarize", help="trimmed summary of a records file")
    sp.add_argument("records")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_summarize)

    sp = sub.add_parser("verify", help="check local discovery against the true CPDAG")
    graph_flags(sp, int, 8)
    sp.add_argument("--seeds", type=parse_seeds, default=tuple(range(20)))
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "known_direction", False) and args.command == "bench" and "load_star" not in args.methods:
        args.methods = (*args.methods, "load_star")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
