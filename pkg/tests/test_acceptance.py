"""Acceptance criteria 1 to 10 at their full sample counts.

Each test carries ``@pytest.mark.criterion(n)``; the terminal summary prints
one PASS/FAIL line per criterion.
"""
from __future__ import annotations

import pytest

from opbar import checks, registry

SEED = 0

# sigma only reads points of EG₊∧_G B(P), whose root edge sits in the word
# zeta, so these degenerations have no path in its domain.
SIGMA_UNCOVERED = {"edge_within_branch", "edge_below_stable", "edge_below_least_stable"}


def pairs():
    return registry.bundled_pairs()


def plain_operads():
    return [registry.operad(name) for name in registry.OPERAD_NAMES]


def failures(records):
    return [r for r in records if r["verdict"] == "FAIL"]


def assert_passed(records):
    assert records
    bad = failures(records)
    assert not bad, bad[:3]


@pytest.mark.criterion(1)
def test_retraction_identity():
    records = checks.run_suite("retraction", pairs(), SEED, 500)
    assert_passed(records)
    assert all(r["cases"] == 500 for r in records)


@pytest.mark.criterion(2)
def test_homotopy_endpoints():
    records = checks.run_suite("homotopy", pairs(), SEED, 500)
    assert_passed(records)
    assert all(r["verdict"] == "PASS" for r in records)


@pytest.mark.criterion(3)
def test_sigma_is_a_cooperad_morphism():
    records = checks.run_suite("morphism", pairs(), SEED, 200)
    assert_passed(records)
    assert all(r["verdict"] == "PASS" for r in records)


@pytest.mark.criterion(4)
def test_coassociativity_exhaustive_and_random():
    QG = registry.operad("Com+", "Z/2")
    rec = checks.coassoc_exhaustive(QG, SEED)
    assert rec["verdict"] == "PASS", rec
    assert rec["weightings"] == 2119
    records = checks.suite_coassoc(QG, SEED, 300, leaves=(5, 5))
    assert_passed(records)
    assert all(r["verdict"] == "PASS" for r in records)


@pytest.mark.criterion(5)
def test_marking_bijection():
    records = checks.run_suite("marking", pairs(), SEED, 500)
    assert_passed(records)
    assert all(r["verdict"] == "PASS" for r in records)


@pytest.mark.criterion(6)
def test_arity_one_identification():
    records = checks.run_suite("arity1", pairs(), SEED, 200)
    assert_passed(records)
    assert all(r["verdict"] == "PASS" for r in records)


@pytest.mark.criterion(7)
def test_semidirect_axioms():
    records = checks.run_suite("axioms", pairs(), SEED)
    assert_passed(records)
    assert all(r["verdict"] == "PASS" for r in records)


@pytest.mark.criterion(8)
def test_confluence():
    records = checks.run_suite("confluence", pairs() + plain_operads(), SEED, 500)
    assert_passed(records)
    assert all(r["verdict"] == "PASS" for r in records)


@pytest.mark.criterion(9)
def test_continuity_probes():
    records = []
    for QG in pairs():
        records += checks.suite_continuity(QG, SEED, 3, 10, words=1000)
    assert_passed(records)
    skipped = {(r["map"], r["class"]) for r in records if r["verdict"] == "n/a"}
    assert {m for m, _ in skipped} <= {"sigma"}, skipped
    assert {c for _, c in skipped} <= SIGMA_UNCOVERED, skipped
    mg = [r for r in records if r["map"] == "mu∘gamma"]
    assert len(mg) == len(pairs()) and all(r["cases"] == 1000 for r in mg)


@pytest.mark.criterion(10)
def test_reduced_membership_and_triangles():
    records = checks.run_suite("reduced", pairs() + plain_operads(), SEED, 300)
    assert_passed(records)
    skipped = {r["operad"] for r in records if r["verdict"] == "n/a"}
    assert skipped <= {"Free"}, skipped
    triangles = [r for r in records if r.get("check") == "triangle identities"]
    assert len(triangles) == len(pairs()) + len(plain_operads()) - len(skipped)
