"""Brute-force ground truth for small graphs.

Everything here enumerates: Markov equivalence classes, adjustment sets,
ancestral relations. Meant for verification on a dozen nodes or fewer.
"""

from __future__ import annotations

import itertools

from .graph import Cpdag, Dag, d_separated


class OracleSizeError(ValueError):
    pass


def enumerate_mec(g: Cpdag, cap: int = 12) -> list[Dag]:
    """All DAGs obtained by orienting the undirected edges of ``g`` acyclically
    without creating new unshielded colliders."""
    if g.n > cap:
        raise OracleSizeError(f"{g.n} nodes exceeds enumeration cap {cap}")
    undirected = sorted(g.undirected)
    pa = [set(g.parents(v)) for v in range(g.n)]
    ch = [set(g.children(v)) for v in range(g.n)]
    out: list[Dag] = []

    def reaches(src, dst):
        stack, seen = [src], {src}
        while stack:
            v = stack.pop()
            if v == dst:
                return True
            for w in ch[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return False

    def ok(u, v):
        # orienting u -> v: no cycle, no new collider at v
        if reaches(v, u):
            return False
        return all(g.is_adjacent(p, u) for p in pa[v])

    def extend(i):
        if i == len(undirected):
            out.append(Dag(g.n, [(a, b) for b in range(g.n) for a in pa[b]]))
            return
        a, b = undirected[i]
        for u, v in ((a, b), (b, a)):
            if ok(u, v):
                pa[v].add(u)
                ch[u].add(v)
                extend(i + 1)
                pa[v].discard(u)
                ch[u].discard(v)

    extend(0)
    return out


def causal_nodes(dag: Dag, t: int, o: int) -> set[int]:
    """Nodes other than ``t`` on directed paths from ``t`` to ``o`` (``o`` included)."""
    if o not in dag.descendants(t):
        return set()
    return (dag.descendants(t) & dag.ancestors(o)) - {t}


def forbidden(dag: Dag, t: int, o: int) -> set[int]:
    return dag.descendants(causal_nodes(dag, t, o)) | {t}


def is_valid_adjustment(dag: Dag, t: int, o: int, z) -> bool:
    """Generalized adjustment criterion for a single treatment in a DAG."""
    z = set(z)
    if t in z or o in z or z & forbidden(dag, t, o):
        return False
    cn = causal_nodes(dag, t, o)
    pbd = Dag(dag.n, [(a, b) for a, b in dag.edges if not (a == t and b in cn)])
    return d_separated(pbd, t, o, z)


def valid_adjustment_sets(dag: Dag, t: int, o: int) -> list[frozenset[int]]:
    others = [v for v in range(dag.n) if v not in (t, o)]
    out = []
    for size in range(len(others) + 1):
        for z in itertools.combinations(others, size):
            if is_valid_adjustment(dag, t, o, z):
                out.append(frozenset(z))
    return out


def common_valid_set_exists(g: Cpdag, t: int, o: int, cap: int = 12) -> bool:
    members = enumerate_mec(g, cap)
    common = set(valid_adjustment_sets(members[0], t, o))
    for dag in members[1:]:
        if not common:
            break
        common &= set(valid_adjustment_sets(dag, t, o))
    return bool(common)


def dag_oset(dag: Dag, t: int, o: int) -> frozenset[int]:
    """Optimal adjustment set in a DAG: parents of causal nodes minus forbidden nodes."""
    cn = causal_nodes(dag, t, o)
    if not cn:
        raise ValueError(f"{t} is not an ancestor of {o}")
    pa = set()
    for v in cn:
        pa |= dag.parents(v)
    return frozenset(pa - forbidden(dag, t, o))


def definition_oset(g: Cpdag, t: int, o: int) -> frozenset[int]:
    """Parents of mediators minus descendants of mediators and ``t``, read off ``g``.

    Assumes ``(t, o)`` is amenable with ``t`` an explicit ancestor of ``o``.
    """
    cn = (g.explicit_descendants(t) & g.explicit_ancestors(o)) - {t}
    forb = {t}
    pa = set()
    for v in cn:
        forb |= g.explicit_descendants(v)
        pa |= g.parents(v)
    return frozenset(pa - forb)


def possible_ancestor_by_enumeration(g: Cpdag, x: int, y: int, members=None) -> bool:
    members = enumerate_mec(g) if members is None else members
    return any(y in dag.descendants(x) for dag in members)


def true_relation(g: Cpdag, x: int, y: int, members=None) -> str:
    """``"ExplAn"``, ``"PossAn"`` or ``"DefNonAn"`` for the ordered pair ``(x, y)``."""
    if y in g.explicit_descendants(x):
        return "ExplAn"
    if possible_ancestor_by_enumeration(g, x, y, members):
        return "PossAn"
    return "DefNonAn"
