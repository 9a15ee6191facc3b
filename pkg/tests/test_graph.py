import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bruteforce import closure, cpdag_by_orientation, d_separated_by_paths
from loadcd.graph import (Cpdag, Dag, GraphError, apply_meek_rules, cpdag_from_dag, d_separated,
                          is_amenable_global, oset_from_cpdag)
from loadcd.simulate import random_dag


@st.composite
def dags(draw, max_nodes=7):
    n = draw(st.integers(2, max_nodes))
    order = draw(st.permutations(range(n)))
    pairs = list(itertools.combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Dag(n, [(order[i], order[j]) for (i, j), m in zip(pairs, mask) if m])


def test_cycle_rejected():
    with pytest.raises(GraphError):
        Dag(3, [(0, 1), (1, 2), (2, 0)])


def test_self_loop_rejected():
    with pytest.raises(GraphError):
        Dag(2, [(0, 0)])


def test_ancestors_descendants_inclusive():
    d = Dag(4, [(0, 1), (1, 2), (3, 2)])
    assert d.ancestors(2) == {0, 1, 2, 3}
    assert d.descendants(0) == {0, 1, 2}
    assert d.descendants([0, 3]) == {0, 1, 2, 3}


def test_markov_blanket():
    d = Dag(5, [(0, 1), (2, 1), (1, 3), (4, 0)])
    assert d.markov_blanket(0) == {1, 2, 4}


@pytest.mark.parametrize("s, expected", [((), True), ((2,), False), ((3,), False), ((2, 3), False)])
def test_collider_dseparation(s, expected):
    # 0 -> 2 <- 1, 2 -> 3
    d = Dag(4, [(0, 2), (1, 2), (2, 3)])
    assert d_separated(d, 0, 1, s) is expected


def test_chain_and_fork():
    chain = Dag(3, [(0, 1), (1, 2)])
    assert not d_separated(chain, 0, 2, ())
    assert d_separated(chain, 0, 2, (1,))
    fork = Dag(3, [(1, 0), (1, 2)])
    assert d_separated(fork, 0, 2, (1,))


def test_dseparation_overlap_raises():
    with pytest.raises(GraphError):
        d_separated(Dag(3, [(0, 1)]), 0, 1, (1,))


@settings(max_examples=150, deadline=None)
@given(dags(), st.data())
def test_dseparation_matches_path_enumeration(d, data):
    x, y = data.draw(st.lists(st.integers(0, d.n - 1), min_size=2, max_size=2, unique=True))
    rest = [v for v in range(d.n) if v not in (x, y)]
    s = data.draw(st.sets(st.sampled_from(rest))) if rest else set()
    assert d_separated(d, x, y, s) == d_separated_by_paths(d, x, y, s)


@settings(max_examples=100, deadline=None)
@given(dags())
def test_dseparation_symmetric(d):
    for x, y in itertools.combinations(range(d.n), 2):
        assert d_separated(d, x, y, ()) == d_separated(d, y, x, ())


@settings(max_examples=100, deadline=None)
@given(dags())
def test_descendants_match_closure(d):
    r = closure(d.n, d.edges)
    for v in range(d.n):
        assert d.descendants(v) == {w for w in range(d.n) if r[v, w]}


def test_cpdag_of_chain_is_undirected():
    g = cpdag_from_dag(Dag(3, [(0, 1), (1, 2)]))
    assert g.undirected == {(0, 1), (1, 2)} and not g.directed


def test_cpdag_keeps_collider_and_propagates():
    g = cpdag_from_dag(Dag(4, [(0, 2), (1, 2), (2, 3)]))
    assert g.directed == {(0, 2), (1, 2), (2, 3)}


@settings(max_examples=150, deadline=None)
@given(dags(max_nodes=7))
def test_cpdag_matches_orientation_enumeration(d):
    assert cpdag_from_dag(d) == cpdag_by_orientation(d)


@settings(max_examples=100, deadline=None)
@given(dags(max_nodes=8))
def test_cpdag_has_no_partially_directed_cycle(d):
    assert not cpdag_from_dag(d).has_partially_directed_cycle()


def test_meek_rules_idempotent():
    for seed in range(30):
        g = cpdag_from_dag(random_dag(12, 2, 10, seed))
        assert apply_meek_rules(g.copy()) == g


def test_explicit_and_possible_relations():
    # 0 -- 1 -> 2
    g = Cpdag(3, directed=[(1, 2)], undirected=[(0, 1)])
    assert g.explicit_descendants(1) == {1, 2}
    assert g.possible_descendants(0) == {0, 1, 2}
    assert not g.possible_ancestor(2, 0)


def test_amenability():
    # 0 -- 1, 0 -> 2, 1 -> 2: the sibling 1 opens a possibly directed path to 2
    g = Cpdag(3, directed=[(0, 2), (1, 2)], undirected=[(0, 1)])
    assert not is_amenable_global(g, 0, 2)
    assert oset_from_cpdag(g, 0, 2) is None
    g2 = cpdag_from_dag(Dag(3, [(0, 1), (2, 1)]))
    assert is_amenable_global(g2, 0, 1)


def test_oset_mediator_example():
    # X -> M -> Y, Z -> M, Z -> Y
    x, m, y, z = range(4)
    g = cpdag_from_dag(Dag(4, [(x, m), (m, y), (z, m), (z, y)]))
    assert oset_from_cpdag(g, x, y) == {z}


def test_oset_none_for_non_ancestor():
    g = cpdag_from_dag(Dag(3, [(0, 1), (2, 1)]))
    assert oset_from_cpdag(g, 1, 0) is None


def test_mutators():
    g = Cpdag(3)
    g.add_undirected(0, 1)
    g.orient(1, 0)
    assert g.has_directed(1, 0) and not g.has_undirected(0, 1)
    g.remove_edge(0, 1)
    assert g.num_edges() == 0
    with pytest.raises(GraphError):
        g.orient(0, 2)
