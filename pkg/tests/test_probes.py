from __future__ import annotations

import random
from fractions import Fraction as F

import pytest

from opbar import trees
from opbar.barpoints import basepoint, normalize
from opbar.checks import constant_paths
from opbar.cooperad import DecompositionRequest
from opbar.generators import random_raw
from opbar.monoidbar import MonoidBarWord, Variant
from opbar.operads import AssPlus, ComPlus, Semidirect, SignOperad, cyclic
from opbar.probes import (ALL_CLASSES, DegenerationPath, canonical, confluence_probe, continuity_probe, flatten,
                          in_reduced_image, map_decompose, map_normalize, map_pi, map_sigma, probe_cases,
                          rational_limit, reduced_membership_probe, sigma_path, tree_path, unflatten)
from opbar.trees import Leaf, Vertex, make_vertex

QZ2 = Semidirect(ComPlus(), cyclic(2))
QA3 = Semidirect(AssPlus(), cyclic(3))
xs = [F(1, 2 ** j) for j in range(3, 11)]


def test_rational_limit_fits_simple_functions():
    assert rational_limit(xs, [F(7, 3)] * len(xs)) == F(7, 3)
    assert rational_limit(xs, [3 * x + F(1, 2) for x in xs]) == F(1, 2)
    assert rational_limit(xs, [(1 + x) / (2 + 5 * x) for x in xs]) == F(1, 2)
    assert rational_limit(xs, [x / (x + x * x) for x in xs]) == 1  # removable singularity


def test_rational_limit_rejects_unstructured_data():
    rng = random.Random(3)
    assert rational_limit(xs, [F(rng.randint(1, 10 ** 6), rng.randint(1, 10 ** 6)) for _ in xs]) is None
    # a pole at zero has no finite limit
    assert rational_limit(xs, [1 / x for x in xs]) is None


def test_flatten_round_trip():
    rng = random.Random(1)
    raw = random_raw(QZ2, 4, rng)
    shape, weights = flatten(raw)
    assert unflatten(shape, weights) == raw
    w = MonoidBarWord(Variant.EG, (F(1, 3), F(2, 3)), (1,), None, 0, cyclic(2))
    shape, weights = flatten((w, F(1, 5)))
    assert weights == [F(1, 3), F(2, 3), F(1, 5)]
    assert unflatten(shape, weights) == (w, F(1, 5))


def test_path_interpolates():
    target = make_vertex([Leaf(1, F(1)), Leaf(2, F(1))], 2, F(0))
    generic = make_vertex([Leaf(1, F(1, 2)), Leaf(2, F(1, 2))], 2, F(1, 2))
    path = DegenerationPath(target, generic, "root_branch")
    assert path.at(0) == target and path.at(F(1, 2)) == generic
    assert path.at(F(1, 4)).weight == F(1, 4)
    with pytest.raises(ValueError):
        DegenerationPath(target, Leaf(1, F(1)))


def test_constant_paths_pass_for_every_map():
    for name, f, path in constant_paths(QZ2, random.Random(0), 10):
        assert continuity_probe(f, path, name=name).passed, name


def test_leaf_branch_to_zero_has_basepoint_limit():
    rng = random.Random(2)
    path = tree_path(QZ2, "leaf_branch", 3, rng)
    assert normalize(path.at(0), QZ2).is_base
    assert continuity_probe(map_normalize(QZ2), path).passed


def test_internal_branch_to_zero_under_pi():
    rng = random.Random(4)
    for _ in range(5):
        path = tree_path(QA3, "internal_branch", 3, rng)
        report = continuity_probe(map_pi(QA3), path, name="pi")
        assert report.passed, report.witness


def test_root_edge_of_zeta_under_sigma():
    rng = random.Random(5)
    for _ in range(5):
        path = sigma_path(QZ2, "zeta_root_edge", 3, rng)
        assert path.target[0].weights[0] == 0
        report = continuity_probe(map_sigma(QZ2), path, name="sigma")
        assert report.passed, report.witness


def _path_with_zero_internal_edge():
    t = make_vertex([make_vertex([Leaf(1, F(1, 2)), Leaf(2, F(1, 2))], 2, F(0)), Leaf(3, F(1, 2))],
                    2, F(1, 2))
    g = make_vertex([make_vertex([Leaf(1, F(1, 4)), Leaf(2, F(1, 4))], 2, F(1, 4)), Leaf(3, F(1, 2))],
                    2, F(1, 2))
    return DegenerationPath(t, g, "internal_branch")


def test_discontinuous_map_fails():
    path = _path_with_zero_internal_edge()

    def jump(raw):
        return F(0) if any(n.weight == 0 for _, n in trees.iter_nodes(raw)) else F(1)

    report = continuity_probe(jump, path, name="jump")
    assert report.verdict == "FAIL" and report.witness["reason"] == "limit differs from value at the limit"

    def flicker(raw):
        w = trees.node_at(raw, (0,)).weight
        odd_step = w != 0 and (1 / w).numerator.bit_length() % 2 == 1
        return basepoint(raw.leafset) if odd_step else normalize(raw, ComPlus())

    report = continuity_probe(flicker, path, name="flicker")
    assert report.verdict == "FAIL" and report.witness["reason"] == "shape not eventually constant"


def test_probe_is_deterministic():
    path = _path_with_zero_internal_edge()
    a = continuity_probe(map_normalize(ComPlus()), path).record()
    b = continuity_probe(map_normalize(ComPlus()), path).record()
    assert a == b and a["verdict"] == "PASS" and len(a["trace"]) == 10


def test_probe_cases_cover_every_class():
    QG = Semidirect(SignOperad(cyclic(2)), cyclic(2))
    seen = {}
    for name, cls, f, path in probe_cases(QG, random.Random(0), per_class=1):
        seen.setdefault(name, set()).add(cls)
        if f is not None:
            assert continuity_probe(f, path, name=name).passed, (name, cls)
    covered = set().union(*seen.values())
    assert covered == set(ALL_CLASSES)


def test_decompose_probe():
    rng = random.Random(7)
    path = tree_path(QZ2, "edge_below_stable", 4, rng)
    req = DecompositionRequest({"a"}, "a", path.target.leafset)
    assert continuity_probe(map_decompose(QZ2, req), path).passed


def test_confluence_probe_examples():
    canon = normalize(make_vertex([Leaf(1, F(1, 2)), Leaf(2, F(1, 2))], 2, F(1, 2)), ComPlus())
    assert confluence_probe(canon.tree, ComPlus()).passed
    # a zero internal edge and a unit unary vertex in the same raw point
    inner = make_vertex([Leaf(1, F(1, 4)), Leaf(2, F(1, 4))], 2, F(0))
    raw = make_vertex([Vertex((inner,), 1, F(1, 4)), Leaf(3, F(1, 2))], 2, F(1, 2))
    report = confluence_probe(raw, ComPlus(), orders=8)
    assert report.passed and len(set(report.forms)) == 1
    inner = make_vertex([Leaf(1, F(1, 4)), Leaf(2, F(1, 4))], 2, F(1, 4))
    assert report.forms[0].tree == make_vertex([inner, Leaf(3, F(1, 2))], 2, F(1, 2))


def test_reduced_membership_examples():
    stable = normalize(make_vertex([Leaf(1, F(1, 2)), Leaf(2, F(1, 2))], QZ2.pure(2), F(1, 2)), QZ2)
    assert in_reduced_image(stable)
    marked = normalize(make_vertex([Vertex((Leaf(1, F(1, 4)),), QZ2.unary(1), F(1, 4)), Leaf(2, F(1, 2))],
                                   QZ2.pure(2), F(1, 2)), QZ2)
    assert not in_reduced_image(marked)
    records = reduced_membership_probe(QZ2, 4, 40, seed=1)
    assert all(r["verdict"] == "PASS" for r in records)
    assert {r["in_image"] for r in records} == {True, False}


def test_canonical_absorbs_basepoint_pairs():
    b = basepoint({1}, ComPlus())
    p = normalize(Leaf(2, F(1)), ComPlus())
    assert canonical((b, p)) == canonical((b, basepoint({2}, ComPlus())))
