"""Seeded check suites.  Every suite returns JSON-ready records.

A record always has ``suite``, ``operad`` and ``verdict`` ("PASS", "FAIL" or
"n/a"); failing records carry a ``witness``.
"""
from __future__ import annotations

import random
from fractions import Fraction

from . import trees
from .barpoints import BarPoint, normalize
from .cooperad import (check_coassociativity, decompose, decompose_equivariant, memo_decompose, nested_requests,
                       requests_for)
from .equivalence import (homotopy_H, iso_arity1, marking_bijection_bwd, marking_bijection_fwd, pi, sigma,
                          sigma_any)
from .generators import (all_stable_trees, enumerate_weightings, label_tree, random_chain, random_equivariant,
                         random_marking, random_point, random_raw, random_word, rng_for, small_fractions)
from .monoidbar import Variant, gamma, mu, normalize_word
from .operads import (BASE, OperadSpec, QuotientL, ReducedR, Semidirect, adjacent_transpositions,
                      check_operad_axioms)
from .probes import (DegenerationPath, confluence_probe, continuity_probe, map_decompose, map_H, map_normalize,
                     map_pi, map_sigma, probe_cases, reduced_membership_probe)

SUITES = ("axioms", "retraction", "homotopy", "coassoc", "morphism", "confluence", "continuity", "reduced",
          "marking", "arity1")
MAX_WITNESSES = 3


class _Tally:
    """Collects failures of one (suite, operad) run into a single record."""

    def __init__(self, suite: str, Q: OperadSpec, **extra):
        self.record = {"suite": suite, "operad": Q.name, "cases": 0, "failures": 0, **extra}
        self.witness = []

    def check(self, ok: bool, witness) -> bool:
        """Count one case; ``witness`` may be a callable, evaluated only on failure."""
        self.record["cases"] += 1
        if not ok:
            self.record["failures"] += 1
            if len(self.witness) < MAX_WITNESSES:
                self.witness.append(witness() if callable(witness) else witness)
        return ok

    def done(self) -> dict:
        rec = dict(self.record)
        rec["verdict"] = "FAIL" if rec["failures"] else "PASS"
        if self.witness:
            rec["witness"] = self.witness
        return rec


def _na(suite, Q, reason) -> dict:
    return {"suite": suite, "operad": Q.name, "verdict": "n/a", "reason": reason}


def _semidirect_only(suite, Q):
    return None if isinstance(Q, Semidirect) else _na(suite, Q, "needs a semi-direct product P⋊G")


def _arity(rng, lo, hi):
    return rng.randint(lo, hi)


def _realizable(Q, n: int) -> bool:
    """Some stable tree with n leaves can be labeled in Q."""
    return any(Q.has_arity(k) for k in range(2, n + 1))


# ---------------------------------------------------------------- axioms


def suite_axioms(Q: OperadSpec, seed=0, count=None, max_arity: int = 4) -> list:
    if not Q.finite:
        return [_na("axioms", Q, "infinite operad: exhaustive table check does not apply")]
    top = min(max_arity, Q.max_arity)
    violations = check_operad_axioms(Q, top)
    groups = []
    if isinstance(Q, Semidirect):
        groups = Q.G.check_axioms()
    elif Q.acting_group is not None:
        groups = Q.acting_group.check_axioms()
    rec = {"suite": "axioms", "operad": Q.name, "max_arity": top,
           "violations": len(violations) + len(groups)}
    rec["verdict"] = "FAIL" if violations or groups else "PASS"
    if violations or groups:
        rec["witness"] = [f"{v.axiom}: {v.witness}" for v in violations[:MAX_WITNESSES]] + groups[:MAX_WITNESSES]
    return [rec]


# ---------------------------------------------------------------- equivalence


def suite_retraction(QG, seed=0, count=500) -> list:
    if (na := _semidirect_only("retraction", QG)):
        return [na]
    rng = rng_for(seed, "retraction", QG.name)
    t = _Tally("retraction", QG)
    for _ in range(count):
        x = random_equivariant(QG, _arity(rng, 2, 5), rng)
        back = pi(sigma(x, QG))
        t.check(back == x, lambda: repr(x))
    return [t.done()]


def sample_s_values(p: BarPoint, rng, k: int = 8) -> list:
    """Half at vertex altitudes (boundaries of H's cases), half uniform k/64."""
    alts = sorted({trees.altitude(p.tree, path) for path, _ in trees.vertices(p.tree)}) if not p.is_base else []
    picks = rng.sample(alts, min(len(alts), k // 2))
    while len(picks) < k:
        picks.append(Fraction(rng.randint(0, 64), 64))
    return picks


def _weighted_stable(p: BarPoint):
    return None if p.is_base else trees.strip_labels(trees.underlying_stable_tree(p.tree))


def suite_homotopy(QG, seed=0, count=500) -> list:
    if (na := _semidirect_only("homotopy", QG)):
        return [na]
    rng = rng_for(seed, "homotopy", QG.name)
    t = _Tally("homotopy", QG)
    for j in range(count):
        n = _arity(rng, 2, 5)
        p = random_point(QG, n, rng) if j % 4 else normalize(random_raw(QG, n, rng), QG)
        t.check(homotopy_H(0, p) == p, lambda: {"case": "H(0,p) = p", "point": repr(p)})
        if not p.is_base:
            t.check(homotopy_H(1, p) == sigma(pi(p), QG), lambda: {"case": "H(1,p) = σπ(p)", "point": repr(p)})
        shape = _weighted_stable(p)
        for s in sample_s_values(p, rng):
            t.check(_weighted_stable(homotopy_H(s, p)) == shape,
                    lambda: {"case": "weighted stable tree preserved", "s": str(s), "point": repr(p)})
    return [t.done()]


def suite_marking(QG, seed=0, count=500) -> list:
    if (na := _semidirect_only("marking", QG)):
        return [na]
    rng = rng_for(seed, "marking", QG.name)
    t = _Tally("marking", QG)
    for j in range(count):
        n = _arity(rng, 1, 5)
        p = random_point(QG, n, rng) if j % 5 else normalize(random_raw(QG, n, rng), QG)
        psi, words = marking_bijection_fwd(p)
        t.check(marking_bijection_bwd(psi, words, QG) == p, lambda: {"case": "bwd∘fwd", "point": repr(p)})
        if p.is_base:
            t.check(words == {} and psi.is_base, {"case": "basepoint has the empty marking"})
            continue
        psi2 = random_point(QG.P, n, rng)
        words2 = random_marking(psi2, QG.G, rng)
        t.check(marking_bijection_fwd(marking_bijection_bwd(psi2, words2, QG)) == (psi2, words2),
                lambda: {"case": "fwd∘bwd", "psi": repr(psi2), "words": repr(words2)})
    return [t.done()]


def suite_arity1(QG, seed=0, count=200) -> list:
    if (na := _semidirect_only("arity1", QG)):
        return [na]
    rng = rng_for(seed, "arity1", QG.name)
    t = _Tally("arity1", QG)
    for _ in range(count):
        raw, word = random_chain(QG, rng)
        t.check(iso_arity1(normalize(raw, QG)) == normalize_word(word), lambda: {"raw": repr(raw)})
    return [t.done()]


# ---------------------------------------------------------------- cooperad


def suite_morphism(QG, seed=0, count=200) -> list:
    if (na := _semidirect_only("morphism", QG)):
        return [na]
    rng = rng_for(seed, "morphism", QG.name)
    t = _Tally("morphism", QG)
    for _ in range(count):
        x = random_equivariant(QG, _arity(rng, 2, 4), rng)
        s = sigma(x, QG)
        for req in requests_for(x.leafset):
            ea, eb = decompose_equivariant(x, req)
            t.check(decompose(s, req) == (sigma_any(ea, QG), sigma_any(eb, QG)),
                    lambda: {"point": repr(x), "A": sorted(map(str, req.A)), "B": sorted(map(str, req.B))})
    return [t.done()]


def coassoc_point(p: BarPoint, t: _Tally) -> None:
    dec = memo_decompose()
    for nested in nested_requests(p.leafset):
        t.check(check_coassociativity(p, nested, dec), lambda: {"point": repr(p), "nesting": repr(nested)})


def suite_coassoc(Q, seed=0, count=300, leaves=(3, 5)) -> list:
    rng = rng_for(seed, "coassoc", Q.name)
    t = _Tally("coassoc", Q, mode="random")
    for _ in range(count):
        n = _arity(rng, *leaves)
        p = random_point(Q, n, rng)
        coassoc_point(p, t)
    return [t.done()]


def coassoc_exhaustive(QG, seed=0, leaves=4, max_denominator: int = 8) -> dict:
    """Every stable shape on ``leaves`` leaves times every weighting with edge
    weights of denominator ≤ ``max_denominator``; labels and markings sampled."""
    rng = rng_for(seed, "coassoc-exhaustive", QG.name)
    t = _Tally("coassoc", QG, mode="exhaustive", leaves=leaves, max_denominator=max_denominator)
    values = small_fractions(max_denominator)
    weightings = 0
    for shape in all_stable_trees(range(1, leaves + 1)):
        for weighted in enumerate_weightings(shape, values):
            weightings += 1
            psi = BarPoint(label_tree(weighted, QG.P, rng), weighted.leafset, QG.P)
            p = marking_bijection_bwd(psi, random_marking(psi, QG.G, rng), QG)
            coassoc_point(p, t)
    rec = t.done()
    rec["weightings"] = weightings
    return rec


# ---------------------------------------------------------------- confluence


def suite_confluence(Q, seed=0, count=500, orders: int = 5) -> list:
    rng = rng_for(seed, "confluence", Q.name)
    t = _Tally("confluence", Q, orders=orders)
    for j in range(count):
        n = rng.choice([n for n in range(1, 6) if n == 1 or _realizable(Q, n)])
        raw = random_raw(Q, n, rng, zero_prob=0.3)
        report = confluence_probe(raw, Q, orders=orders, seed=(seed, j))
        t.check(report.passed, lambda: {"raw": repr(raw), "distinct_forms": len(set(report.forms))})
    return [t.done()]


# ---------------------------------------------------------------- continuity


def constant_paths(QG, rng, count: int) -> list:
    """(name, f, path) sanity cases: constant paths must always pass."""
    out = []
    for _ in range(count):
        n = _arity(rng, 2, 4)
        raw = random_raw(QG, n, rng, zero_prob=0.2)
        out.append(("normalize", map_normalize(QG), DegenerationPath(raw, raw)))
        out.append(("pi", map_pi(QG), DegenerationPath(raw, raw)))
        out.append(("H(1/2)", map_H(QG, Fraction(1, 2)), DegenerationPath(raw, raw)))
        req = rng.choice(requests_for(raw.leafset))
        out.append(("decompose", map_decompose(QG, req), DegenerationPath(raw, raw)))
        x = random_equivariant(QG, n, rng)
        if not x.is_base:
            pair = (x.zeta, x.psi.tree)
            out.append(("sigma", map_sigma(QG), DegenerationPath(pair, pair)))
    return out


def mu_gamma_words(G, rng, count: int) -> list:
    """Words z of EG whose γ(z) fails μ(γ(z)) = e."""
    bad = []
    for _ in range(count):
        z = random_word(Variant.EG, G, rng, max_labels=4, allow_zero=True, normalize=rng.random() < 0.5)
        if mu(gamma(z)) != G.identity:
            bad.append(repr(z))
    return bad


def suite_continuity(QG, seed=0, count=3, k: int = 10, words: int | None = None) -> list:
    """Every degeneration class for σ, π, H(1/2) and decompose; ``count`` paths per class."""
    if (na := _semidirect_only("continuity", QG)):
        return [na]
    rng = rng_for(seed, "continuity", QG.name)
    groups = {}
    for name, cls, f, path in probe_cases(QG, rng, per_class=count):
        key = (name, cls)
        if key not in groups:
            groups[key] = _Tally("continuity", QG, map=name, **{"class": cls})
        if f is None:
            groups[key].record["covered"] = False
            continue
        report = continuity_probe(f, path, k=k, name=name)
        groups[key].check(report.passed, report.witness)
    out = []
    for t in groups.values():
        if t.record.get("covered") is False:
            rec = dict(t.record, verdict="n/a", reason="not covered: no path of this class in the map's domain")
            out.append(rec)
        else:
            out.append(t.done())
    sanity = _Tally("continuity", QG, map="all", **{"class": "constant"})
    for name, f, path in constant_paths(QG, rng, max(1, count)):
        report = continuity_probe(f, path, k=k, name=name)
        sanity.check(report.passed, report.witness)
    out.append(sanity.done())
    mg = _Tally("continuity", QG, map="mu∘gamma", **{"class": "EG words"})
    nwords = words if words is not None else 20 * max(1, count)
    bad = mu_gamma_words(QG.G, rng, nwords)
    mg.record["cases"] = nwords
    mg.record["failures"] = len(bad)
    mg.witness = bad[:MAX_WITNESSES]
    out.append(mg.done())
    return out


# ---------------------------------------------------------------- reduced


def same_operad(A: OperadSpec, B: OperadSpec, top: int) -> list:
    """Differences between two finite operads on arities 1..top."""
    diffs = []
    for n in range(1, top + 1):
        ea, eb = A.elements(n), B.elements(n)
        if set(ea) != set(eb):
            diffs.append(f"elements differ in arity {n}")
            continue
        for x in ea:
            for sigma_ in adjacent_transpositions(n):
                if A.relabel(x, sigma_) != B.relabel(x, sigma_):
                    diffs.append(f"Σ action differs at {x!r}")
            for m in range(1, top - n + 2):
                for y in A.elements(m):
                    for i in range(1, n + 1):
                        if A.compose(x, i, y) != B.compose(x, i, y):
                            diffs.append(f"{x!r}∘{i}{y!r} differs")
            G = A.acting_group
            if G is not None:
                for g in G.elements:
                    if A.act(g, x) != B.act(g, x):
                        diffs.append(f"G action differs at {x!r}")
        if len(diffs) > MAX_WITNESSES:
            break
    return diffs


def triangle_identities(Q: OperadSpec, top: int = 3) -> list:
    """Unit/counit identities of L ⊣ ι ⊣ R, checked on finite tables.

    L and R are idempotent, fix reduced operads and absorb each other.
    """
    top = min(top, Q.max_arity)
    L, R = QuotientL(Q, top), ReducedR(Q)
    checks = [
        ("L(L Q) = L Q", QuotientL(L, top), L),
        ("R(R Q) = R Q", ReducedR(R), R),
        ("L(R Q) = R Q", QuotientL(R, top), R),
        ("R(L Q) = L Q", ReducedR(L), L),
    ]
    if Q.reduced:
        checks += [("L Q = Q on reduced Q", L, Q), ("R Q = Q on reduced Q", R, Q)]
    problems = []
    for name, X, Y in checks:
        diffs = same_operad(X, Y, top)
        if diffs:
            problems.append(f"{name}: {diffs[0]}")
    for n in range(1, top + 1):
        for x in Q.elements(n):
            px = L.project(x)
            if px is not BASE and L.project(px) != px:
                problems.append(f"projection to L is not idempotent at {x!r}")
    return problems


def suite_reduced(Q, seed=0, count=300, top: int = 3) -> list:
    if not Q.finite or not Q.strongly_augmented:
        return [_na("reduced", Q, "needs a finite strongly augmented operad")]
    out = []
    t = _Tally("reduced", Q)
    arities = [n for n in range(2, 6) if _realizable(Q, n)] or [1]
    for j, n in enumerate(arities):
        share = count // len(arities) + (1 if j < count % len(arities) else 0)
        for rec in reduced_membership_probe(Q, n, share, seed=seed):
            t.check(rec["verdict"] == "PASS", rec)
    out.append(t.done())
    problems = triangle_identities(Q, top)
    tri = {"suite": "reduced", "operad": Q.name, "check": "triangle identities",
           "verdict": "FAIL" if problems else "PASS"}
    if problems:
        tri["witness"] = problems[:MAX_WITNESSES]
    out.append(tri)
    return out


# ---------------------------------------------------------------- dispatch

RUNNERS = {
    "axioms": suite_axioms,
    "retraction": suite_retraction,
    "homotopy": suite_homotopy,
    "coassoc": suite_coassoc,
    "morphism": suite_morphism,
    "confluence": suite_confluence,
    "continuity": suite_continuity,
    "reduced": suite_reduced,
    "marking": suite_marking,
    "arity1": suite_arity1,
}


def run_suite(name: str, operads, seed=0, count=None) -> list:
    runner = RUNNERS[name]
    out = []
    for Q in operads:
        out.extend(runner(Q, seed) if count is None else runner(Q, seed, count))
    for rec in out:
        rec["seed"] = seed
    return out


def all_passed(records) -> bool:
    return all(r["verdict"] != "FAIL" for r in records)
