"""Reading and writing graphs and datasets.

Graph JSON: ``{"nodes": [...], "directed": [[a, b], ...], "undirected": [[a, b], ...]}``
with edges given by node name. Edge-list text: one ``a -> b`` or ``a -- b`` per
line; ``#`` starts a comment.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .citest import Dataset
from .graph import Cpdag, GraphError


def graph_to_dict(g: Cpdag, names: list[str] | None = None) -> dict:
    names = names or [str(i) for i in range(g.n)]
    return {
        "nodes": list(names),
        "directed": [[names[a], names[b]] for a, b in sorted(g.directed)],
        "undirected": [[names[a], names[b]] for a, b in sorted(g.undirected)],
    }


def graph_from_dict(d: dict) -> tuple[Cpdag, list[str]]:
    names = [str(v) for v in d["nodes"]]
    index = {name: i for i, name in enumerate(names)}
    if len(index) != len(names):
        raise GraphError("duplicate node names")
    try:
        directed = [(index[str(a)], index[str(b)]) for a, b in d.get("directed", [])]
        undirected = [(index[str(a)], index[str(b)]) for a, b in d.get("undirected", [])]
    except KeyError as exc:
        raise GraphError(f"edge refers to unknown node {exc}") from None
    return Cpdag(len(names), directed, undirected), names


def parse_edge_list(text: str) -> tuple[Cpdag, list[str]]:
    names: list[str] = []
    index: dict[str, int] = {}
    directed, undirected = [], []

    def node(name):
        if name not in index:
            index[name] = len(names)
            names.append(name)
        return index[name]

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "->" in line:
            a, b = (p.strip() for p in line.split("->", 1))
            directed.append((node(a), node(b)))
        elif "--" in line:
            a, b = (p.strip() for p in line.split("--", 1))
            undirected.append((node(a), node(b)))
        elif line.split() and len(line.split()) == 1:
            node(line)  # isolated node
        else:
            raise GraphError(f"line {lineno}: cannot parse edge {raw!r}")
    return Cpdag(len(names), directed, undirected), names


def format_edge_list(g: Cpdag, names: list[str] | None = None) -> str:
    names = names or [str(i) for i in range(g.n)]
    lines = [f"{names[a]} -> {names[b]}" for a, b in sorted(g.directed)]
    lines += [f"{names[a]} -- {names[b]}" for a, b in sorted(g.undirected)]
    touched = {v for e in g.directed | g.undirected for v in e}
    lines += [names[v] for v in range(g.n) if v not in touched]
    return "\n".join(lines) + "\n"


def read_graph(path: str | Path) -> tuple[Cpdag, list[str]]:
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json" or text.lstrip().startswith("{"):
        return graph_from_dict(json.loads(text))
    return parse_edge_list(text)


def write_graph(path: str | Path, g: Cpdag, names: list[str] | None = None) -> None:
    path = Path(path)
    if path.suffix == ".json":
        path.write_text(json.dumps(graph_to_dict(g, names), indent=1) + "\n")
    else:
        path.write_text(format_edge_list(g, names))


def read_csv(path: str | Path, discrete: bool | None = None) -> Dataset:
    """Load a CSV with a header row.

    ``discrete=None`` infers the type: all-integer columns are discrete.
    """
    with open(path, newline="") as fh:
        header = next(csv.reader(fh))
    values = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if values.shape[1] != len(header):
        raise ValueError(f"{path}: header has {len(header)} columns, data has {values.shape[1]}")
    if np.isnan(values).any():
        raise ValueError(f"{path}: missing values are not supported")
    if discrete is None:
        discrete = bool(np.all(values == np.round(values)))
    if discrete:
        return Dataset(values.astype(np.int64), [h.strip() for h in header], discrete=True)
    return Dataset(values, [h.strip() for h in header])


def write_csv(path: str | Path, data: Dataset) -> None:
    fmt = "%d" if data.discrete else "%.10g"
    np.savetxt(path, data.values, delimiter=",", fmt=fmt, header=",".join(data.names), comments="")
