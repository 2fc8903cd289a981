from __future__ import annotations

import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from opbar import trees
from opbar.barpoints import basepoint, g_act, normalize, sym_act
from opbar.cooperad import decompose, decompose_equivariant, requests_for
from opbar.equivalence import (EquivariantPoint, branch_state, canonicalize_equivariant, chain_point, g_v,
                               homotopy_H, iso_arity01, iso_arity1, iso_arity1_inv, marking_bijection_bwd,
                               marking_bijection_fwd, pi, pi_any, sigma, sigma_any)
from opbar.checks import sample_s_values
from opbar.generators import random_chain, random_equivariant, random_point
from opbar.monoidbar import Variant, act_right, empty_word, make_word, normalize_word
from opbar.operads import AssPlus, ComPlus, Semidirect, SignOperad, cyclic, symmetric3
from opbar.trees import Branch, Leaf, Vertex, make_vertex

Z2, Z4 = cyclic(2), cyclic(4)
QZ2 = Semidirect(ComPlus(), Z2)
QZ4 = Semidirect(ComPlus(), Z4)
PAIRS = [QZ2, QZ4, Semidirect(AssPlus(), cyclic(3)), Semidirect(SignOperad(Z2), Z2),
         Semidirect(ComPlus(), symmetric3())]
q, h = F(1, 4), F(1, 2)


def corolla2(P, w=h, label=2):
    return normalize(make_vertex([Leaf(1, 1 - w), Leaf(2, 1 - w)], label, w), P)


def test_canonicalize_examples():
    psi = corolla2(ComPlus())
    z = make_word(Variant.EG, (h, h), (1,), right=0, monoid=Z2)
    assert canonicalize_equivariant(z, psi) == EquivariantPoint(z, psi)
    P = SignOperad(Z2)
    psi = corolla2(P, label=(2, 1))
    a = canonicalize_equivariant(act_right(z, 1), psi)
    b = canonicalize_equivariant(z, g_act(1, psi))
    assert a == b and a.zeta.right == 0 and a.psi.tree.label == (2, -1)
    assert canonicalize_equivariant(z, basepoint({1, 2}, P)).is_base


def test_marking_of_point_without_group_labels_is_empty():
    p = normalize(make_vertex([Leaf(1, h), Leaf(2, h)], QZ2.pure(2), h), QZ2)
    psi, words = marking_bijection_fwd(p)
    assert psi.tree == make_vertex([Leaf(1, h), Leaf(2, h)], 2, h)
    assert all(w.labels == () for w in words.values())
    assert {b.position for b in words} == {"root", "leaf"}


def test_marking_bijection_three_vertex_shape():
    # stable vertices p (root), q above it on {1,2}, r above on {3,4}; unary labels on several branches
    P, G = ComPlus(), Z4
    stable = make_vertex([make_vertex([Leaf(1, h), Leaf(2, h)], 2, q),
                          make_vertex([Leaf(3, h), Leaf(4, h)], 2, q)], 2, q)
    psi = normalize(stable, P)
    words = {}
    for b in trees.branches(stable):
        if b.position == "root":
            words[b] = make_word(Variant.BG, (h, h), (1,), monoid=G)
        elif b.clade == frozenset({1, 2}):
            words[b] = make_word(Variant.EGTILDE, (q, 3 * q), (2,), left=3, monoid=G)
        elif b.clade == frozenset({3}):
            words[b] = make_word(Variant.EGTILDE, (h, h), (3,), left=0, monoid=G)
        else:
            words[b] = empty_word(Variant.EGTILDE, G, left=1 if len(b.clade) == 1 else 0)
    p = marking_bijection_bwd(psi, words, QZ4)
    psi2, words2 = marking_bijection_fwd(p)
    assert psi2 == psi and words2 == words
    assert marking_bijection_bwd(psi2, words2, QZ4) == p


def test_marking_bijection_basepoint():
    assert marking_bijection_fwd(basepoint({1, 2}, QZ2)) == (basepoint({1, 2}, QZ2.P), {})
    with pytest.raises(ValueError):
        marking_bijection_bwd(basepoint({1, 2}, QZ2.P), {Branch(frozenset({1, 2}), "root"): None}, QZ2)


@given(st.integers(0, 10_000), st.sampled_from(PAIRS))
def test_marking_round_trip(seed, QG):
    rng = random.Random(seed)
    p = random_point(QG, rng.randint(2, 5), rng)
    psi, words = marking_bijection_fwd(p)
    assert marking_bijection_bwd(psi, words, QG) == p


def _marked_internal_point():
    # root (c2; e, 1) with an internal branch {1,2} carrying the unary label 2, over Com+⋊Z/4
    top = make_vertex([Leaf(1, q), Leaf(2, q)], QZ4.pure(2), q)
    raw = make_vertex([Vertex((top,), QZ4.unary(2), q), Leaf(3, 3 * q)], (2, (1, 0)), q)
    return normalize(raw, QZ4)


def test_g_v_examples():
    p = _marked_internal_point()
    assert g_v(p, ()) == 0
    assert g_v(p, (0,)) == 3  # left module 1 times label 2
    with pytest.raises(KeyError):
        g_v(p, (1,))
    plain = normalize(make_vertex([Leaf(1, h), Leaf(2, h)], QZ4.pure(2), h), QZ4)
    assert g_v(plain, ()) == 0


def test_sigma_of_empty_word():
    psi = corolla2(ComPlus())
    x = canonicalize_equivariant(empty_word(Variant.EG, Z2), psi)
    p = sigma(x, QZ2)
    assert p.tree == make_vertex([Leaf(1, h), Leaf(2, h)], QZ2.pure(2), h)


def test_sigma_worked_example():
    psi = corolla2(ComPlus())
    z = make_word(Variant.EG, (h, h), (1,), right=0, monoid=Z2)
    p = sigma(canonicalize_equivariant(z, psi), QZ2)
    # root branch carries ζ; each leaf branch carries left module g⁻¹ = 1 and label 1
    leaves = [Vertex((Leaf(i, q),), QZ2.unary(1), q) for i in (1, 2)]
    stable = make_vertex(leaves, (2, (1, 1)), q)
    assert p.tree == Vertex((stable,), QZ2.unary(1), q)
    _, words = marking_bijection_fwd(p)
    for b, w in words.items():
        if b.position == "leaf":
            assert (w.left, w.labels, w.weights) == (1, (1,), (h, h))
        else:
            assert w == make_word(Variant.BG, (h, h), (1,), monoid=Z2)


def test_sigma_pi_need_arity_two():
    x = canonicalize_equivariant(empty_word(Variant.EG, Z2),
                                 normalize(Leaf(1, F(1)), ComPlus()))
    with pytest.raises(ValueError):
        sigma(x, QZ2)
    with pytest.raises(ValueError):
        pi(normalize(Leaf(1, F(1)), QZ2))


def test_pi_examples():
    p = normalize(make_vertex([Leaf(1, h), Leaf(2, h)], QZ2.pure(2), h), QZ2)
    x = pi(p)
    assert x.zeta == empty_word(Variant.EG, Z2) and x.psi == corolla2(ComPlus())
    # over Sign⋊Z/2 the top vertex label is acted on by g_v
    QS = Semidirect(SignOperad(Z2), Z2)
    P = QS.P
    top = make_vertex([Leaf(1, q), Leaf(2, q)], QS.pure((2, 1)), q)
    bottom = QS.pure((2, -1))
    raw = make_vertex([Vertex((top,), QS.unary(1), q), Leaf(3, 3 * q)], bottom, q)
    p = normalize(raw, QS)
    x = pi(p)
    assert trees.node_at(x.psi.tree, (0,)).label == (2, -1)  # g_v = 1 flips the sign
    assert x.psi.tree.label == (2, -1)  # the root vertex has g_v = e
    assert x.zeta == empty_word(Variant.EG, Z2)


@given(st.integers(0, 10_000), st.sampled_from(PAIRS))
def test_pi_sigma_is_identity(seed, QG):
    rng = random.Random(seed)
    x = random_equivariant(QG, rng.randint(2, 5), rng)
    assert pi(sigma(x, QG)) == x


@given(st.integers(0, 10_000), st.sampled_from(PAIRS))
def test_sigma_is_well_defined_on_coinvariants(seed, QG):
    rng = random.Random(seed)
    x = random_equivariant(QG, rng.randint(2, 4), rng)
    for g in QG.G.elements:
        moved = EquivariantPoint(act_right(x.zeta, g), g_act(QG.G.inv(g), x.psi))
        assert sigma(moved, QG) == sigma(x, QG)


@given(st.integers(0, 10_000), st.sampled_from(PAIRS))
def test_maps_are_symmetric_equivariant(seed, QG):
    rng = random.Random(seed)
    n = rng.randint(2, 5)
    perm = rng.sample(range(1, n + 1), n)
    x = random_equivariant(QG, n, rng)
    xs = EquivariantPoint(x.zeta, sym_act(perm, x.psi))
    assert sigma(xs, QG) == sym_act(perm, sigma(x, QG))
    p = random_point(QG, n, rng)
    px, pxs = pi(p), pi(sym_act(perm, p))
    assert pxs.zeta == px.zeta and pxs.psi == sym_act(perm, px.psi)
    for s in (F(0), F(1, 3), F(1, 2), F(1)):
        assert homotopy_H(s, sym_act(perm, p)) == sym_act(perm, homotopy_H(s, p))


@given(st.integers(0, 10_000), st.sampled_from(PAIRS))
def test_homotopy_endpoints_and_stable_tree(seed, QG):
    rng = random.Random(seed)
    p = random_point(QG, rng.randint(2, 5), rng)
    assert homotopy_H(0, p) == p
    assert homotopy_H(1, p) == sigma(pi(p), QG)
    psi, _ = marking_bijection_fwd(p)
    shape = trees.strip_labels(psi.tree)
    for s in sample_s_values(p, rng, 4):
        psi_s, _ = marking_bijection_fwd(homotopy_H(s, p))
        assert trees.strip_labels(psi_s.tree) == shape


def test_homotopy_fixes_basepoint_and_checks_s():
    b = basepoint({1, 2}, QZ2)
    assert homotopy_H(F(1, 2), b) == b
    with pytest.raises(ValueError):
        homotopy_H(F(3, 2), _marked_internal_point())


def test_activity_classification_at_one_half():
    # root vertex at altitude 1/4, the vertex over {1,2} at 3/4
    top = make_vertex([Leaf(1, q), Leaf(2, q)], QZ4.pure(2), h)
    p = normalize(make_vertex([top, Leaf(3, 3 * q)], QZ4.pure(2), q), QZ4)
    state = {(b.position, b.clade): v for b, v in branch_state(p, h).items()}
    assert state[("internal", frozenset({1, 2}))] == "segment"
    assert state[("leaf", frozenset({3}))] == "segment"
    assert state[("leaf", frozenset({1}))] == state[("leaf", frozenset({2}))] == "marking"
    assert state[("root", frozenset({1, 2, 3}))] == "marking"
    later = {(b.position, b.clade): v for b, v in branch_state(p, F(7, 8)).items()}
    assert later[("internal", frozenset({1, 2}))] == "target"


def test_segment_midpoint_by_hand():
    # one leaf branch being contracted: H(1/2) on a corolla at altitude 0 < 1/4 ≤ 1/2
    G = Z4
    top = make_vertex([Vertex((Leaf(1, F(3, 8)),), QZ4.unary(1), F(3, 8)), Leaf(2, 3 * q)], QZ4.pure(2), q)
    p = normalize(top, QZ4)
    mid = homotopy_H(h, p)
    _, words = marking_bijection_fwd(mid)
    w = words[Branch(frozenset({1}), "leaf")]
    # u = (1/2 - 1/4)/(3/4) = 1/3: the empty root segment takes 1/3, then the old word scaled by 2/3
    assert w.weights == (F(1, 3) + F(2, 3) * h, F(2, 3) * h) and w.labels == (1,)
    assert w.left == G.identity


@given(st.integers(0, 10_000), st.sampled_from(PAIRS[:3]))
def test_sigma_is_a_cooperad_morphism(seed, QG):
    rng = random.Random(seed)
    x = random_equivariant(QG, rng.randint(2, 4), rng)
    p = sigma(x, QG)
    for r in requests_for(x.leafset):
        a, b = decompose_equivariant(x, r)
        assert decompose(p, r) == (sigma_any(a, QG), sigma_any(b, QG))


def test_iso_arity1_examples():
    e = QZ2
    assert iso_arity1(normalize(Leaf(1, F(1)), e)) == empty_word(Variant.BG, Z2)
    raw, word = chain_point([1, 3], [q, q, h], QZ4)
    assert iso_arity1(normalize(raw, QZ4)) == make_word(Variant.BG, (q, q, h), (1, 3), monoid=Z4)
    assert iso_arity1(basepoint({1}, QZ2)) is None
    assert iso_arity1_inv(None, QZ2) == basepoint({1}, QZ2)
    assert iso_arity01(basepoint(set(), QZ2)) is None
    with pytest.raises(ValueError):
        iso_arity01(_marked_internal_point())


@given(st.integers(0, 10_000), st.sampled_from(PAIRS))
def test_iso_arity1_commutes_with_normalization(seed, QG):
    rng = random.Random(seed)
    raw, word = random_chain(QG, rng)
    p = normalize(raw, QG)
    w = iso_arity1(p)
    assert w == normalize_word(word)
    assert iso_arity1_inv(w, QG) == p


@given(st.integers(0, 10_000), st.sampled_from(PAIRS))
def test_arity_one_retraction(seed, QG):
    rng = random.Random(seed)
    raw, _ = random_chain(QG, rng)
    p = normalize(raw, QG)
    assert sigma_any(pi_any(p), QG) == p
