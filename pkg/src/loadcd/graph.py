"""Directed and partially directed graphs over dense integer node ids.

``Dag`` holds a causal DAG. ``Cpdag`` holds a mixed graph with directed and
undirected edges; besides proper CPDAGs it is also used for the partially
oriented graphs built up during local discovery.
"""

from __future__ import annotations

import itertools
import logging
from collections import deque
from typing import Iterable

logger = logging.getLogger(__name__)


class GraphError(ValueError):
    pass


class Dag:
    """A DAG on nodes ``0..n-1``."""

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        self.n = n
        self._pa: list[set[int]] = [set() for _ in range(n)]
        self._ch: list[set[int]] = [set() for _ in range(n)]
        for a, b in edges:
            if a == b:
                raise GraphError(f"self-loop on node {a}")
            if not (0 <= a < n and 0 <= b < n):
                raise GraphError(f"edge ({a}, {b}) out of range for n={n}")
            self._pa[b].add(a)
            self._ch[a].add(b)
        self._order = self._toposort()
        self.edges = frozenset((a, b) for b in range(n) for a in self._pa[b])

    def _toposort(self) -> list[int]:
        indeg = [len(p) for p in self._pa]
        queue = deque(v for v in range(self.n) if indeg[v] == 0)
        order = []
        while queue:
            v = queue.popleft()
            order.append(v)
            for c in sorted(self._ch[v]):
                indeg[c] -= 1
                if indeg[c] == 0:
                    queue.append(c)
        if len(order) != self.n:
            raise GraphError("graph contains a directed cycle")
        return order

    def __eq__(self, other):
        return isinstance(other, Dag) and self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"Dag(n={self.n}, edges={sorted(self.edges)})"

    def parents(self, v: int) -> set[int]:
        return set(self._pa[v])

    def children(self, v: int) -> set[int]:
        return set(self._ch[v])

    def adjacent(self, v: int) -> set[int]:
        return self._pa[v] | self._ch[v]

    def is_adjacent(self, a: int, b: int) -> bool:
        return b in self._pa[a] or b in self._ch[a]

    def has_edge(self, a: int, b: int) -> bool:
        return b in self._ch[a]

    def topological_order(self) -> list[int]:
        return list(self._order)

    def degree(self, v: int) -> int:
        return len(self._pa[v]) + len(self._ch[v])

    def ancestors(self, nodes: int | Iterable[int]) -> set[int]:
        """Ancestors of ``nodes``, the nodes themselves included."""
        return _reach(self._pa, [nodes] if isinstance(nodes, int) else nodes)

    def descendants(self, nodes: int | Iterable[int]) -> set[int]:
        """Descendants of ``nodes``, the nodes themselves included."""
        return _reach(self._ch, [nodes] if isinstance(nodes, int) else nodes)

    def markov_blanket(self, v: int) -> set[int]:
        mb = self._pa[v] | self._ch[v]
        for c in self._ch[v]:
            mb |= self._pa[c]
        mb.discard(v)
        return mb

    def v_structures(self) -> set[tuple[int, int, int]]:
        """Unshielded colliders as ``(a, c, b)`` with ``a < b``."""
        out = set()
        for c in range(self.n):
            for a, b in itertools.combinations(sorted(self._pa[c]), 2):
                if not self.is_adjacent(a, b):
                    out.add((a, c, b))
        return out


def _reach(nbrs: list[set[int]], start: Iterable[int]) -> set[int]:
    seen = set(start)
    stack = list(seen)
    while stack:
        v = stack.pop()
        for w in nbrs[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def d_separated(dag: Dag, x: int, y: int, s: Iterable[int]) -> bool:
    """True iff ``x`` and ``y`` are d-separated by ``s`` in ``dag``.

    Ball-passing reachability restricted by the ancestors of ``s``; runs in
    time linear in the number of edges.
    """
    s = set(s)
    if x == y or x in s or y in s:
        raise GraphError(f"d-separation query requires distinct x, y outside s: {x}, {y}, {sorted(s)}")
    return y not in _dconnected(dag, x, s)


def _dconnected(dag: Dag, x: int, s: set[int]) -> set[int]:
    pa, ch = dag._pa, dag._ch
    anc = _reach(pa, s) if s else set()
    # state: (node, True) reached from a child (moving up), (node, False) from a parent
    seen = set()
    reached = set()
    stack = [(x, True)]
    while stack:
        v, up = stack.pop()
        if (v, up) in seen:
            continue
        seen.add((v, up))
        if v not in s:
            reached.add(v)
        if up:
            if v not in s:
                for p in pa[v]:
                    stack.append((p, True))
                for c in ch[v]:
                    stack.append((c, False))
        else:
            if v not in s:
                for c in ch[v]:
                    stack.append((c, False))
            if v in anc:
                for p in pa[v]:
                    stack.append((p, True))
    return reached


class Cpdag:
    """A mixed graph with directed (``a -> b``) and undirected (``a -- b``) edges."""

    def __init__(self, n: int, directed: Iterable[tuple[int, int]] = (),
                 undirected: Iterable[tuple[int, int]] = ()):
        self.n = n
        self._pa: list[set[int]] = [set() for _ in range(n)]
        self._ch: list[set[int]] = [set() for _ in range(n)]
        self._sib: list[set[int]] = [set() for _ in range(n)]
        for a, b in directed:
            self.add_directed(a, b)
        for a, b in undirected:
            self.add_undirected(a, b)

    # -- construction -------------------------------------------------------

    def _check_new(self, a: int, b: int) -> None:
        if a == b:
            raise GraphError(f"self-loop on node {a}")
        if not (0 <= a < self.n and 0 <= b < self.n):
            raise GraphError(f"edge ({a}, {b}) out of range for n={self.n}")
        if self.is_adjacent(a, b):
            raise GraphError(f"nodes {a} and {b} are already adjacent")

    def add_directed(self, a: int, b: int) -> None:
        self._check_new(a, b)
        self._ch[a].add(b)
        self._pa[b].add(a)

    def add_undirected(self, a: int, b: int) -> None:
        self._check_new(a, b)
        self._sib[a].add(b)
        self._sib[b].add(a)

    def orient(self, a: int, b: int) -> None:
        """Turn the undirected edge ``a -- b`` into ``a -> b``."""
        if b not in self._sib[a]:
            raise GraphError(f"no undirected edge {a} -- {b}")
        self._sib[a].discard(b)
        self._sib[b].discard(a)
        self._ch[a].add(b)
        self._pa[b].add(a)

    def remove_edge(self, a: int, b: int) -> None:
        for u, v in ((a, b), (b, a)):
            self._sib[u].discard(v)
            self._ch[u].discard(v)
            self._pa[u].discard(v)

    def copy(self) -> "Cpdag":
        g = Cpdag(self.n)
        g._pa = [set(p) for p in self._pa]
        g._ch = [set(c) for c in self._ch]
        g._sib = [set(s) for s in self._sib]
        return g

    @classmethod
    def from_dag(cls, dag: Dag) -> "Cpdag":
        """The DAG itself as a fully directed mixed graph (not its CPDAG)."""
        return cls(dag.n, directed=dag.edges)

    # -- queries ------------------------------------------------------------

    @property
    def directed(self) -> frozenset[tuple[int, int]]:
        return frozenset((a, b) for b in range(self.n) for a in self._pa[b])

    @property
    def undirected(self) -> frozenset[tuple[int, int]]:
        return frozenset((a, b) for a in range(self.n) for b in self._sib[a] if a < b)

    def __eq__(self, other):
        return (isinstance(other, Cpdag) and self.n == other.n
                and self.directed == other.directed and self.undirected == other.undirected)

    def __hash__(self):
        return hash((self.n, self.directed, self.undirected))

    def __repr__(self):
        return (f"Cpdag(n={self.n}, directed={sorted(self.directed)}, "
                f"undirected={sorted(self.undirected)})")

    def parents(self, v: int) -> set[int]:
        return set(self._pa[v])

    def children(self, v: int) -> set[int]:
        return set(self._ch[v])

    def siblings(self, v: int) -> set[int]:
        return set(self._sib[v])

    def adjacent(self, v: int) -> set[int]:
        return self._pa[v] | self._ch[v] | self._sib[v]

    def is_adjacent(self, a: int, b: int) -> bool:
        return b in self._pa[a] or b in self._ch[a] or b in self._sib[a]

    def has_directed(self, a: int, b: int) -> bool:
        return b in self._ch[a]

    def has_undirected(self, a: int, b: int) -> bool:
        return b in self._sib[a]

    def num_edges(self) -> int:
        return sum(len(c) for c in self._ch) + sum(len(s) for s in self._sib) // 2

    def induced_subgraph(self, nodes: Iterable[int]) -> "Cpdag":
        """Edges among ``nodes`` only; the node range is unchanged."""
        keep = set(nodes)
        g = Cpdag(self.n)
        for v in keep:
            g._pa[v] = self._pa[v] & keep
            g._ch[v] = self._ch[v] & keep
            g._sib[v] = self._sib[v] & keep
        return g

    def explicit_descendants(self, v: int) -> set[int]:
        """Nodes reachable from ``v`` along directed edges, ``v`` included."""
        return _reach(self._ch, [v])

    def explicit_ancestors(self, v: int) -> set[int]:
        """Nodes with a directed path into ``v``, ``v`` included."""
        return _reach(self._pa, [v])

    def possible_descendants(self, v: int, exclude: Iterable[int] = ()) -> set[int]:
        """Nodes reachable from ``v`` without traversing a directed edge backwards."""
        seen = {v} | set(exclude)
        stack = [v]
        out = {v}
        while stack:
            u = stack.pop()
            for w in itertools.chain(self._ch[u], self._sib[u]):
                if w not in seen:
                    seen.add(w)
                    out.add(w)
                    stack.append(w)
        return out

    def possible_ancestor(self, x: int, y: int) -> bool:
        return y in self.possible_descendants(x)

    def is_amenable(self, x: int, y: int) -> bool:
        return is_amenable_global(self, x, y)

    def has_partially_directed_cycle(self) -> bool:
        """True if some directed edge ``a -> b`` closes a possibly directed path from ``b`` to ``a``."""
        for a in range(self.n):
            for b in self._ch[a]:
                if a in self.possible_descendants(b):
                    return True
        return False

    def to_dag(self) -> Dag:
        if any(self._sib):
            raise GraphError("graph has undirected edges")
        return Dag(self.n, self.directed)


def is_amenable_global(g: Cpdag, x: int, y: int) -> bool:
    """Every possibly directed path from ``x`` to ``y`` starts with ``x -> .``."""
    if x == y:
        raise GraphError("amenability needs distinct nodes")
    for v in sorted(g._sib[x]):
        if y in g.possible_descendants(v, exclude=(x,)):
            return False
    return True


def oset_from_cpdag(g: Cpdag, x: int, y: int) -> frozenset[int] | None:
    """Optimal adjustment set relative to ``(x, y)``; ``None`` when it does not exist."""
    if x == y:
        raise GraphError("optimal adjustment set needs distinct nodes")
    if not g.possible_ancestor(x, y) or not is_amenable_global(g, x, y):
        return None
    cn = (g.explicit_descendants(x) & g.explicit_ancestors(y)) - {x, y}
    pa = set()
    for v in cn | {y}:
        pa |= g._pa[v]
    return frozenset(pa - cn - {x})


# -- orientation --------------------------------------------------------------


def _meek_rule1(g: Cpdag) -> bool:
    changed = False
    for b in range(g.n):
        for a in list(g._pa[b]):
            for c in list(g._sib[b]):
                if c != a and not g.is_adjacent(a, c):
                    g.orient(b, c)
                    changed = True
    return changed


def _meek_rule2(g: Cpdag) -> bool:
    changed = False
    for a in range(g.n):
        for c in list(g._sib[a]):
            # a -> b -> c with a -- c
            if g._ch[a] & g._pa[c]:
                g.orient(a, c)
                changed = True
    return changed


def _meek_rule3(g: Cpdag) -> bool:
    changed = False
    for a in range(g.n):
        for b in list(g._sib[a]):
            cands = sorted(g._sib[a] & g._pa[b])
            if any(not g.is_adjacent(c, d) for c, d in itertools.combinations(cands, 2)):
                g.orient(a, b)
                changed = True
    return changed


def _meek_rule4(g: Cpdag) -> bool:
    # a -- b, a -- d, c -> d -> b, a adjacent to c, b and c non-adjacent
    changed = False
    for a in range(g.n):
        for b in list(g._sib[a]):
            done = False
            for d in g._sib[a] & g._pa[b]:
                for c in g._pa[d]:
                    if c != b and g.is_adjacent(a, c) and not g.is_adjacent(b, c):
                        g.orient(a, b)
                        changed = done = True
                        break
                if done:
                    break
    return changed


def apply_meek_rules(g: Cpdag, rule4: bool = True) -> Cpdag:
    """Apply Meek's rules in place until no edge changes."""
    rules = [_meek_rule1, _meek_rule2, _meek_rule3]
    if rule4:
        rules.append(_meek_rule4)
    while True:
        changed = False
        for rule in rules:
            changed |= rule(g)
        if not changed:
            return g


def cpdag_from_dag(dag: Dag) -> Cpdag:
    """CPDAG of the Markov equivalence class of ``dag``."""
    g = Cpdag(dag.n)
    for a, b in sorted(dag.edges):
        g.add_undirected(a, b)
    for a, c, b in sorted(dag.v_structures()):
        if g.has_undirected(a, c):
            g.orient(a, c)
        if g.has_undirected(b, c):
            g.orient(b, c)
    return apply_meek_rules(g)
