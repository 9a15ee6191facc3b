"""Markov-blanket based local discovery and the global PC baseline."""

from __future__ import annotations

import itertools
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .citest import CITester
from .graph import Cpdag, apply_meek_rules

logger = logging.getLogger(__name__)


def _pair(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


@dataclass
class DiscoveryCache:
    """Separating sets, Markov blankets and local structures shared across runs.

    ``grown`` keeps the blanket reached at the end of each grow phase (a
    superset of the final blanket); it is only used to audit which
    conditioning sets a run may legitimately touch.
    """

    sepsets: dict[tuple[int, int], frozenset[int]] = field(default_factory=dict)
    mbs: dict[int, frozenset[int]] = field(default_factory=dict)
    local_structures: dict[int, Cpdag] = field(default_factory=dict)
    grown: dict[int, frozenset[int]] = field(default_factory=dict)

    def sepset(self, a: int, b: int) -> frozenset[int] | None:
        return self.sepsets.get(_pair(a, b))

    def add_sepset(self, a: int, b: int, s: Iterable[int]) -> None:
        self.sepsets.setdefault(_pair(a, b), frozenset(s))


@dataclass
class LocalGraph:
    """A partially oriented graph around ``node``; only the focal edges are guaranteed."""

    graph: Cpdag
    node: int
    expanded: tuple[int, ...] = ()

    def parents(self, v: int | None = None) -> set[int]:
        return self.graph.parents(self.node if v is None else v)

    def children(self, v: int | None = None) -> set[int]:
        return self.graph.children(self.node if v is None else v)

    def siblings(self, v: int | None = None) -> set[int]:
        return self.graph.siblings(self.node if v is None else v)

    def adjacent(self, v: int | None = None) -> set[int]:
        return self.graph.adjacent(self.node if v is None else v)

    def is_adjacent(self, a: int, b: int) -> bool:
        return self.graph.is_adjacent(a, b)


# -- Markov blankets ----------------------------------------------------------


def _grow_shrink(v: int, tester: CITester, candidates: Iterable[int]) -> tuple[frozenset[int], frozenset[int]]:
    candidates = sorted(set(candidates) - {v})
    mb: list[int] = []
    in_mb: set[int] = set()
    grew = True
    while grew:
        grew = False
        for w in candidates:
            if w in in_mb:
                continue
            if not tester.independent(v, w, in_mb):
                mb.append(w)
                in_mb.add(w)
                grew = True
    grown = frozenset(in_mb)
    for w in list(mb):
        if tester.independent(v, w, in_mb - {w}):
            in_mb.discard(w)
    return frozenset(in_mb), grown


def grow_shrink_mb(v: int, tester: CITester, candidates: Iterable[int] | None = None) -> frozenset[int]:
    """Markov blanket of ``v`` by Grow-Shrink, scanning candidates in ascending id."""
    if candidates is None:
        candidates = range(tester.n)
    elif v in set(candidates):
        raise ValueError("target must not be among the candidates")
    return _grow_shrink(v, tester, candidates)[0]


def mb_adjacent(x: int, y: int, mb_x: Iterable[int], tester: CITester,
                cache: DiscoveryCache | None = None) -> bool:
    """Whether ``y`` in the blanket of ``x`` is adjacent to ``x``.

    Searches every proper subset of ``mb_x - {y}`` from small to large; the
    first separating set found is recorded in ``cache``.
    """
    rest = sorted(set(mb_x) - {y, x})
    if y not in set(mb_x):
        raise ValueError(f"{y} is not in the given blanket of {x}")
    for size in range(len(rest)):
        for s in itertools.combinations(rest, size):
            if tester.independent(x, y, s):
                if cache is not None:
                    cache.add_sepset(x, y, s)
                return False
    return True


# -- PC machinery ---------------------------------------------------------------


def _skeleton(nodes: Iterable[int], tester: CITester,
              sepsets: dict[tuple[int, int], frozenset[int]]) -> dict[int, set[int]]:
    """Order-independent PC skeleton over ``nodes``; fills ``sepsets``."""
    nodes = sorted(set(nodes))
    adj = {a: set(nodes) - {a} for a in nodes}
    level = 0
    while any(len(adj[a]) - 1 >= level for a in nodes):
        frozen = {a: sorted(adj[a]) for a in nodes}
        for a in nodes:
            for b in frozen[a]:
                if b < a or b not in adj[a]:
                    continue
                found = None
                for side, other in ((a, b), (b, a)):
                    pool = [w for w in frozen[side] if w != other]
                    if len(pool) < level:
                        continue
                    for s in itertools.combinations(pool, level):
                        if tester.independent(a, b, s):
                            found = s
                            break
                    if found is not None:
                        break
                if found is not None:
                    adj[a].discard(b)
                    adj[b].discard(a)
                    sepsets[(a, b)] = frozenset(found)
        level += 1
    return adj


def _orient_colliders(n: int, adj: dict[int, set[int]], sepsets) -> Cpdag:
    g = Cpdag(n)
    for a in sorted(adj):
        for b in sorted(adj[a]):
            if a < b:
                g.add_undirected(a, b)
    for c in sorted(adj):
        for a, b in itertools.combinations(sorted(adj[c]), 2):
            if b in adj[a]:
                continue
            sep = sepsets.get((a, b))
            if sep is None or c in sep:
                continue
            for u in (a, b):
                if g.has_undirected(u, c):
                    g.orient(u, c)
                elif g.has_directed(c, u):
                    logger.info("conflicting collider orientation at %d <- %d; keeping %d -> %d", c, u, c, u)
    return g


def local_structure(v: int, mb: Iterable[int], tester: CITester, cache: DiscoveryCache) -> Cpdag:
    """Skeleton and v-structures over ``mb | {v}``; separating sets go into ``cache``."""
    nodes = set(mb) | {v}
    sepsets: dict[tuple[int, int], frozenset[int]] = {}
    adj = _skeleton(nodes, tester, sepsets)
    for (a, b), s in sepsets.items():
        cache.add_sepset(a, b, s)
    return _orient_colliders(tester.n, adj, sepsets)


def pc_algorithm(n: int, tester: CITester) -> Cpdag:
    """Global PC: stable skeleton, collider orientation, Meek's rules."""
    sepsets: dict[tuple[int, int], frozenset[int]] = {}
    adj = _skeleton(range(n), tester, sepsets)
    return apply_meek_rules(_orient_colliders(n, adj, sepsets))


# -- MB-by-MB ---------------------------------------------------------------------


def _v_structures_with(lx: Cpdag, x: int) -> list[tuple[int, int, int]]:
    """Unshielded colliders ``a -> c <- b`` of ``lx`` that involve ``x``."""
    out = []
    for c in sorted(lx.adjacent(x) | {x}):
        for a, b in itertools.combinations(sorted(lx.parents(c)), 2):
            if x in (a, b, c) and not lx.is_adjacent(a, b):
                out.append((a, c, b))
    return out


def _put_directed(g: Cpdag, a: int, b: int) -> None:
    if g.has_directed(a, b):
        return
    if g.has_undirected(a, b):
        g.orient(a, b)
    elif g.has_directed(b, a):
        logger.info("edge conflict %d -> %d vs existing %d -> %d; keeping existing", a, b, b, a)
    else:
        g.add_directed(a, b)


def _merge(g: Cpdag, lx: Cpdag, x: int) -> None:
    for y in sorted(lx.adjacent(x)):
        if not g.is_adjacent(x, y):
            g.add_undirected(x, y)
    for a, c, b in _v_structures_with(lx, x):
        _put_directed(g, a, c)
        _put_directed(g, b, c)


def orient_undirected_edges(g: Cpdag, cache: DiscoveryCache) -> Cpdag:
    """Three orientation rules driven by recorded separating sets, to fixpoint."""
    changed = True
    while changed:
        changed = False
        # a -> b -- c, b in sepset(a, c)  =>  b -> c
        for b in range(g.n):
            for a in sorted(g.parents(b)):
                for c in sorted(g.siblings(b)):
                    s = cache.sepset(a, c)
                    if s is not None and b in s:
                        g.orient(b, c)
                        changed = True
        # a -> b -> c, a -- c  =>  a -> c
        for a in range(g.n):
            for c in sorted(g.siblings(a)):
                if g.children(a) & g.parents(c):
                    g.orient(a, c)
                    changed = True
        # a -- b, a -- c -> b, a -- d -> b, a in sepset(c, d)  =>  a -> b
        for a in range(g.n):
            for b in sorted(g.siblings(a)):
                cands = sorted(g.siblings(a) & g.parents(b))
                for c, d in itertools.combinations(cands, 2):
                    s = cache.sepset(c, d)
                    if s is not None and a in s:
                        g.orient(a, b)
                        changed = True
                        break
    return g


def _still_relevant(g: Cpdag, target: int) -> set[int]:
    # Nodes reachable from the target without entering a directed edge backwards.
    return g.possible_descendants(target)


def mb_by_mb(target: int, tester: CITester, cache: DiscoveryCache | None = None) -> LocalGraph:
    """Learn the parents, children and siblings of ``target`` by expanding blankets.

    Stops once every edge at the target is oriented, or when no waiting node
    can still influence the target's undirected edges.
    """
    cache = DiscoveryCache() if cache is None else cache
    n = tester.n
    g = Cpdag(n)
    done: list[int] = []
    done_set: set[int] = set()
    local: dict[int, Cpdag] = {}
    wait = deque([target])
    waiting = {target}
    while wait:
        x = wait.popleft()
        waiting.discard(x)
        mb = cache.mbs.get(x)
        if mb is None:
            mb, grown = _grow_shrink(x, tester, range(n))
            cache.mbs[x] = mb
            cache.grown[x] = grown
        for w in sorted(mb):
            if w not in done_set and w not in waiting:
                wait.append(w)
                waiting.add(w)
        done.append(x)
        done_set.add(x)

        mb_plus = mb | {x}
        lx = cache.local_structures.get(x)
        if lx is None:
            for xp in done[:-1]:
                if mb_plus <= cache.mbs[xp] | {xp}:
                    lx = local[xp].induced_subgraph(mb_plus)
                    break
        if lx is None and mb <= done_set:
            lx = g.induced_subgraph(mb_plus)
        if lx is None:
            lx = local_structure(x, mb, tester, cache)
            cache.local_structures[x] = lx
        local[x] = lx

        _merge(g, lx, x)
        orient_undirected_edges(g, cache)
        if not g.siblings(target):
            break
        keep = _still_relevant(g, target)
        if any(w not in keep for w in wait):
            wait = deque(w for w in wait if w in keep)
            waiting = set(wait)
    return LocalGraph(g, target, tuple(done))
