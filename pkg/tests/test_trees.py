from __future__ import annotations

import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from opbar import trees
from opbar.generators import all_stable_trees, insert_unary, random_stable_tree, random_weighting
from opbar.trees import EMPTY, Branch, Leaf, Vertex, make_vertex


def corolla(*leaves, label=None):
    return make_vertex([Leaf(l) for l in leaves], label)


def chain(depth, leaf=1):
    node = Leaf(leaf)
    for _ in range(depth):
        node = Vertex((node,))
    return node


def test_children_sorted_by_minimal_leaf():
    t = make_vertex([corolla(4, 2), Leaf(1), Leaf(3)])
    assert [c.key[1] for c in t.children] == [1, 2, 3]
    assert t == make_vertex([Leaf(3), Leaf(1), corolla(2, 4)])


def test_repeated_leaf_rejected():
    with pytest.raises(ValueError):
        Vertex((Leaf(1), Leaf(1)))


def test_underlying_stable_tree_examples():
    c3 = corolla(1, 2, 3)
    assert trees.underlying_stable_tree(c3) == c3
    assert trees.underlying_stable_tree(chain(4)) == EMPTY
    with_unary = make_vertex([Vertex((Leaf(1),)), Leaf(2)])
    assert trees.underlying_stable_tree(with_unary) == corolla(1, 2)


def test_underlying_stable_tree_sums_chain_weights():
    t = Vertex((make_vertex([Leaf(1, F(1, 2)), Leaf(2, F(1, 2))], None, F(1, 4)),), None, F(1, 4))
    s = trees.underlying_stable_tree(t)
    assert s.weight == F(1, 2) and s.arity == 2


def test_branches_examples():
    assert len(trees.branches(corolla(1, 2))) == 3
    assert trees.branches(chain(3)) == [Branch(frozenset({1}), "root")]
    binary = make_vertex([corolla(1, 2), Leaf(3)])
    bs = trees.branches(binary)
    assert len(bs) == 5
    assert [b.position for b in bs].count("internal") == 1
    assert Branch(frozenset({1, 2}), "internal") in bs


def test_graft_examples():
    g = trees.graft(corolla(1, "a"), "a", corolla(2, 3))
    assert g == make_vertex([Leaf(1), corolla(2, 3)])
    t = make_vertex([Leaf(1), Leaf("a")])
    assert trees.graft(t, "a", Leaf(5)) == corolla(1, 5)
    five = trees.graft(corolla("a", 2, 3), "a", corolla(4, 5, 6))
    assert len(five.leafset) == 5
    assert sum(1 for b in trees.branches(five) if b.position == "internal") == 1


def test_graft_unknown_leaf():
    with pytest.raises(KeyError):
        trees.graft(corolla(1, 2), 9, corolla(3, 4))


def test_degraft_examples():
    binary = make_vertex([corolla(1, 2), Leaf(3)])
    assert trees.degraft_at(binary, {"a", 3}, "a", {1, 2}) == (corolla(3, "a"), corolla(1, 2))
    assert trees.degraft_at(corolla(1, 2, 3), {"a", 3}, "a", {1, 2}) is None
    c3 = corolla(1, 2, 3)
    assert trees.degraft_at(c3, {"a"}, "a", {1, 2, 3}) == (Leaf("a"), c3)


def test_altitude_and_activity_examples():
    t = make_vertex([make_vertex([Leaf(1, F(1, 4)), Leaf(2, F(1, 4))], None, F(1, 2)), Leaf(3, F(3, 4))],
                    None, F(1, 4))
    assert trees.altitude(t, ()) == F(1, 4)
    root = make_vertex([Leaf(1, F(1, 2)), Leaf(2, F(1, 2))], None, F(1, 2))
    assert trees.activity(root, (), F(1, 2)) == trees.NO_LONGER_ACTIVE
    # internal edge from altitude 1/4 to 3/4
    assert trees.edge_bounds(t, (0,)) == (F(1, 4), F(3, 4))
    assert trees.activity(t, (0,), F(1, 2)) == trees.ACTIVE
    with pytest.raises(ValueError):
        trees.activity(t, (0,), F(3, 2))


@given(st.integers(2, 6), st.integers(0, 10_000))
def test_stable_tree_invariants(n, seed):
    rng = random.Random(seed)
    t = random_stable_tree(range(1, n + 1), rng)
    assert trees.is_stable(t)
    assert trees.underlying_stable_tree(t) == t
    u = insert_unary(t, rng, 3)
    assert trees.underlying_stable_tree(trees.underlying_stable_tree(u)) == trees.underlying_stable_tree(u)
    edges = [p for p, _ in trees.iter_nodes(trees.underlying_stable_tree(u))]
    assert len(trees.branches(u)) == len(edges)


@given(st.integers(0, 10_000))
def test_degraft_inverts_graft(seed):
    rng = random.Random(seed)
    tA = random_stable_tree([1, 2, "a"], rng) if rng.random() < 0.5 else random_stable_tree(["a", 1], rng)
    tB = random_stable_tree([10, 11, 12][: rng.randint(2, 3)], rng)
    g = trees.graft(tA, "a", tB)
    assert trees.degraft_at(g, tA.leafset, "a", tB.leafset) == (tA, tB)


@given(st.integers(1, 5), st.integers(0, 10_000))
def test_random_weightings_have_unit_paths(n, seed):
    rng = random.Random(seed)
    t = insert_unary(random_stable_tree(range(1, n + 1), rng), rng, 3)
    w = random_weighting(t, rng)
    assert trees.check_weighting(w) == []


@given(st.integers(0, 10_000))
def test_activity_monotone(seed):
    rng = random.Random(seed)
    t = random_weighting(random_stable_tree(range(1, 5), rng), rng)
    order = [trees.NOT_YET_ACTIVE, trees.ACTIVE, trees.NO_LONGER_ACTIVE]
    for path, _ in trees.iter_nodes(t):
        states = [order.index(trees.activity(t, path, F(k, 64))) for k in range(65)]
        assert states == sorted(states)


def test_all_stable_trees_count():
    # 1, 1, 4, 26: the number of leaf-labeled stable rooted trees
    assert [len(all_stable_trees(range(1, n + 1))) for n in (1, 2, 3, 4)] == [1, 1, 4, 26]


def test_json_round_trip():
    t = make_vertex([Leaf(1, F(1, 2)), Leaf(2, F(1, 2))], "c2", F(1, 2))
    obj = trees.tree_to_json(t)
    assert obj["weight"] == "1/2"
    assert trees.tree_from_json(obj) == t
    with pytest.raises(ValueError):
        trees.fraction_from_json(0.5)
