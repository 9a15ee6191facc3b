"""LOAD: local discovery of target relations, identifiability and optimal adjustment sets."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

from .citest import CITester
from .mbdiscovery import DiscoveryCache, LocalGraph, mb_by_mb


class Relation(str, enum.Enum):
    DEF_NON_AN = "DefNonAn"
    POSS_AN = "PossAn"
    EXPL_AN = "ExplAn"


Direction = tuple[int, int]


@dataclass
class LoadResult:
    """Per ordered direction: relation, identifiability and adjustment sets.

    For an identifiable explicit-ancestor direction ``adj_sets`` holds the
    single optimal set; for a non-identifiable possible-ancestor direction it
    holds the locally valid parent sets; zero-effect directions hold none.
    """

    x: int
    y: int
    relation: dict[Direction, Relation]
    is_ident: dict[Direction, bool]
    adj_sets: dict[Direction, list[frozenset[int]]]
    cache: DiscoveryCache | None = field(default=None, repr=False, compare=False)

    def directions(self) -> list[Direction]:
        return [(self.x, self.y), (self.y, self.x)]

    def oset(self, t: int, o: int) -> frozenset[int] | None:
        """The optimal adjustment set for ``t -> o`` if one was found."""
        if self.relation[(t, o)] is Relation.EXPL_AN and self.is_ident[(t, o)]:
            return self.adj_sets[(t, o)][0]
        return None

    def to_json(self, names: list[str] | None = None) -> dict:
        def name(v):
            return names[v] if names else v

        out = {}
        for t, o in self.directions():
            out[f"{name(t)}->{name(o)}"] = {
                "relation": self.relation[(t, o)].value,
                "identifiable": self.is_ident[(t, o)],
                "optimal": self.oset(t, o) is not None,
                "adjustment_sets": [sorted(name(v) for v in s) for s in self.adj_sets[(t, o)]],
            }
        return out


def is_expl_an(x: int, y: int, gx: LocalGraph, tester: CITester) -> bool:
    if y in gx.children(x):
        return True
    if y in gx.parents(x) | gx.siblings(x):
        return False
    return not tester.independent(x, y, gx.parents(x) | gx.siblings(x))


def is_poss_an(x: int, y: int, gx: LocalGraph, tester: CITester) -> bool:
    if y in gx.children(x) | gx.siblings(x):
        return True
    if y in gx.parents(x):
        return False
    return not tester.independent(x, y, gx.parents(x))


def local_relate(x: int, y: int, tester: CITester, cache: DiscoveryCache | None = None):
    """Relations in both directions plus the local graphs of ``x`` and ``y``."""
    if x == y:
        raise ValueError("targets must differ")
    cache = DiscoveryCache() if cache is None else cache
    relation = {(x, y): Relation.DEF_NON_AN, (y, x): Relation.DEF_NON_AN}
    gx = mb_by_mb(x, tester, cache)
    gy = mb_by_mb(y, tester, cache)
    if is_expl_an(x, y, gx, tester):
        relation[(x, y)] = Relation.EXPL_AN
    elif is_expl_an(y, x, gy, tester):
        relation[(y, x)] = Relation.EXPL_AN
    else:
        if is_poss_an(x, y, gx, tester):
            relation[(x, y)] = Relation.POSS_AN
        if is_poss_an(y, x, gy, tester):
            relation[(y, x)] = Relation.POSS_AN
    return relation, gx, gy


def local_amen_test(t: int, o: int, v: int, gv: LocalGraph, tester: CITester) -> bool:
    """Whether sibling ``v`` of ``t`` is compatible with amenability relative to ``(t, o)``."""
    if v == o or o in gv.adjacent(v):
        return False
    return tester.independent(v, o, gv.parents(v) | {t})


def local_valid_sets(x: int, gx: LocalGraph) -> list[frozenset[int]]:
    """Parent sets of ``x`` over sibling subsets that add no collider at ``x``."""
    pa = sorted(gx.parents(x))
    sib = sorted(gx.siblings(x))
    out = []
    for size in range(len(sib) + 1):
        for s in itertools.combinations(sib, size):
            clash = any(
                v != w and not gx.is_adjacent(v, w)
                for v in s for w in itertools.chain(s, pa))
            if not clash:
                out.append(frozenset(pa) | frozenset(s))
    return out


def load(x: int, y: int, tester: CITester, cache: DiscoveryCache | None = None,
         known_direction: bool = False) -> LoadResult:
    """Relation, identifiability and optimal (or locally valid) adjustment sets for a target pair.

    With ``known_direction`` the caller asserts that ``x`` is an explicit
    ancestor of ``y`` and the relation step is skipped.
    """
    if x == y:
        raise ValueError("targets must differ")
    cache = DiscoveryCache() if cache is None else cache
    xy, yx = (x, y), (y, x)
    is_ident = {xy: False, yx: False}
    adj_sets: dict[Direction, list[frozenset[int]]] = {xy: [], yx: []}

    def result():
        return LoadResult(x, y, relation, is_ident, adj_sets, cache)

    # Step 1: causal relation between the targets
    if known_direction:
        relation = {xy: Relation.EXPL_AN, yx: Relation.DEF_NON_AN}
        graphs = {x: mb_by_mb(x, tester, cache)}
    else:
        relation, gx, gy = local_relate(x, y, tester, cache)
        graphs = {x: gx, y: gy}
    if relation[xy] is Relation.EXPL_AN:
        t, o = x, y
    elif relation[yx] is Relation.EXPL_AN:
        t, o = y, x
    else:
        for (a, b) in (xy, yx):
            if relation[(a, b)] is Relation.POSS_AN:
                adj_sets[(a, b)] = local_valid_sets(a, graphs[a])
            else:
                is_ident[(a, b)] = True
        return result()
    is_ident[(o, t)] = True
    gt = graphs[t]

    # Step 2: identifiability of t on o
    for v in sorted(gt.siblings(t)):
        gv = mb_by_mb(v, tester, cache)
        if not local_amen_test(t, o, v, gv, tester):
            adj_sets[(t, o)] = local_valid_sets(t, gt)
            return result()
    is_ident[(t, o)] = True

    # Step 3: explicit descendants of t
    expl_de = [v for v in range(tester.n) if v not in (t, o) and is_expl_an(t, v, gt, tester)]

    # Step 4: mediators
    cn = set()
    for v in expl_de:
        gv = mb_by_mb(v, tester, cache)
        if is_expl_an(v, o, gv, tester):
            cn.add(v)

    # Step 5: optimal adjustment set
    go = graphs.get(o) or mb_by_mb(o, tester, cache)
    oset = set(go.parents(o))
    for v in cn:
        oset |= mb_by_mb(v, tester, cache).parents(v)
    adj_sets[(t, o)] = [frozenset(oset - cn - {t})]
    return result()


def mb_by_mb_plus(x: int, y: int, tester: CITester, cache: DiscoveryCache | None = None) -> LoadResult:
    """Relations plus locally valid parent sets for every (possible) ancestor direction.

    Never returns an optimal set: ``is_ident`` only marks zero-effect directions.
    """
    cache = DiscoveryCache() if cache is None else cache
    relation, gx, gy = local_relate(x, y, tester, cache)
    graphs = {x: gx, y: gy}
    xy, yx = (x, y), (y, x)
    adj_sets: dict[Direction, list[frozenset[int]]] = {xy: [], yx: []}
    for (a, b) in (xy, yx):
        if relation[(a, b)] is not Relation.DEF_NON_AN:
            adj_sets[(a, b)] = local_valid_sets(a, graphs[a])
    is_ident = {d: relation[d] is Relation.DEF_NON_AN for d in (xy, yx)}
    return LoadResult(x, y, relation, is_ident, adj_sets, cache)
