"""Discretized continuity probes, confluence probes and reduced-membership probes.

A degeneration path moves the weights of a raw input affinely,
W(ε) = (1 - 2ε)·W_target + 2ε·W_generic, so W(1/2) is a generic weighting
and W(0) is the degenerate one.  A map passes the continuity probe when its
outputs at ε = 2^-1, …, 2^-k eventually have a fixed shape, every output
weight is matched exactly by a low-degree rational function of ε along the
tail, and the limit at ε = 0 renormalizes to the map applied at ε = 0.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Optional

from . import trees
from .barpoints import BarPoint, basepoint, normalize, to_marking_view
from .cooperad import DecompositionRequest, decompose, requests_for
from .equivalence import (EquivariantPoint, canonicalize_equivariant, homotopy_H, pi, sigma)
from .generators import random_stable_tree, random_weighting, random_weights, label_tree, insert_unary
from .monoidbar import MonoidBarWord, Variant, normalize_word
from .operads import ReducedR, Semidirect
from .trees import Branch, Leaf, Vertex

DEFAULT_K = 10
DEFAULT_TAIL_START = 3


# ---------------------------------------------------------------- flatten


def flatten(obj) -> tuple:
    """(shape, weights): shape is hashable and weight-free."""
    out: list = []
    shape = _flat(obj, out)
    return shape, out


def _flat(obj, out):
    if isinstance(obj, Fraction):
        out.append(obj)
        return ("s",)
    if isinstance(obj, (Leaf, Vertex)):
        out.extend(n.weight for _, n in trees.iter_nodes(obj))
        return ("tree", trees.strip_weights(obj))
    if isinstance(obj, MonoidBarWord):
        out.extend(obj.weights)
        return ("word", obj.variant, obj.labels, obj.left, obj.right, obj.monoid)
    if isinstance(obj, BarPoint):
        if obj.is_base:
            return ("base", obj.leafset, obj.operad)
        return ("bar", _flat(obj.tree, out), obj.leafset, obj.operad)
    if isinstance(obj, EquivariantPoint):
        if obj.is_base:
            return ("ebase", obj.leafset, obj.psi.operad)
        return ("equiv", _flat(obj.zeta, out), _flat(obj.psi, out))
    if isinstance(obj, tuple):
        return ("tuple",) + tuple(_flat(x, out) for x in obj)
    raise TypeError(f"cannot flatten {type(obj).__name__}")


def unflatten(shape, weights):
    it = iter(weights)
    obj = _unflat(shape, it)
    rest = list(it)
    if rest:
        raise ValueError("too many weights for shape")
    return obj


def _unflat(shape, it):
    kind = shape[0]
    if kind == "s":
        return next(it)
    if kind == "tree":
        return trees.map_weights_preorder(shape[1], it)
    if kind == "word":
        _, variant, labels, left, right, monoid = shape
        ws = tuple(next(it) for _ in range(len(labels) + 1))
        return MonoidBarWord(variant, ws, labels, left, right, monoid)
    if kind == "base":
        return basepoint(shape[1], shape[2])
    if kind == "bar":
        return BarPoint(_unflat(shape[1], it), shape[2], shape[3])
    if kind == "ebase":
        return EquivariantPoint(None, basepoint(shape[1], shape[2]))
    if kind == "equiv":
        return EquivariantPoint(_unflat(shape[1], it), _unflat(shape[2], it))
    if kind == "tuple":
        return tuple(_unflat(s, it) for s in shape[1:])
    raise ValueError(f"unknown shape {kind!r}")


def canonical(obj):
    """Renormalize an output object whose weights may have degenerated."""
    if isinstance(obj, BarPoint):
        if obj.is_base:
            return obj
        return normalize(obj.tree, obj.operad, validate=False)
    if isinstance(obj, EquivariantPoint):
        if obj.is_base:
            return obj
        psi = canonical(obj.psi)
        if psi.is_base:
            return EquivariantPoint(None, psi)
        return canonicalize_equivariant(normalize_word(obj.zeta), psi)
    if isinstance(obj, tuple):
        parts = tuple(canonical(x) for x in obj)
        if parts and all(isinstance(x, BarPoint) for x in parts) and any(x.is_base for x in parts):
            return tuple(basepoint(x.leafset, x.operad) for x in parts)
        if parts and all(isinstance(x, EquivariantPoint) for x in parts) and any(x.is_base for x in parts):
            return tuple(EquivariantPoint(None, basepoint(x.leafset, x.psi.operad)) for x in parts)
        return parts
    return obj


# ---------------------------------------------------------------- rational fits


def _nullspace_vector(rows):
    """A nonzero rational vector in the nullspace of ``rows`` or None."""
    m = [list(r) for r in rows]
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    free = [c for c in range(ncols) if c not in pivots]
    if not free:
        return None
    f = free[0]
    vec = [Fraction(0)] * ncols
    vec[f] = Fraction(1)
    for i, c in enumerate(pivots):
        vec[c] = -m[i][f]
    return vec


def rational_limit(xs, ys, max_total_degree: int = 5) -> Optional[Fraction]:
    """Value at 0 of the simplest rational function through all (x, y).

    Tries N/D with deg N + deg D increasing; a fit must use fewer unknowns
    than samples so that it is checked by at least one extra sample.
    """
    if all(y == ys[0] for y in ys):
        return ys[0]
    for total in range(1, max_total_degree + 1):
        for q in range(0, total + 1):
            p = total - q
            if p + q + 2 > len(xs):
                continue
            rows = [[x ** j for j in range(p + 1)] + [-y * x ** j for j in range(q + 1)] for x, y in zip(xs, ys)]
            vec = _nullspace_vector(rows)
            if vec is None:
                continue
            num, den = vec[:p + 1], vec[p + 1:]
            # cancel common powers of x
            while num and den and num[0] == 0 and den[0] == 0:
                num, den = num[1:], den[1:]
            if not den or den[0] == 0:
                continue
            if any(sum(d * x ** j for j, d in enumerate(den)) == 0 for x in xs):
                continue
            return num[0] / den[0] if num else Fraction(0)
    return None


# ---------------------------------------------------------------- paths


@dataclass(frozen=True)
class DegenerationPath:
    target: Any
    generic: Any
    cls: str = "constant"
    note: str = ""

    def __post_init__(self):
        s1, w1 = flatten(self.target)
        s2, w2 = flatten(self.generic)
        if s1 != s2:
            raise ValueError("target and generic inputs must have the same shape")

    def at(self, eps):
        eps = Fraction(eps)
        shape, wt = flatten(self.target)
        _, wg = flatten(self.generic)
        return unflatten(shape, [(1 - 2 * eps) * a + 2 * eps * b for a, b in zip(wt, wg)])


@dataclass
class ProbeReport:
    verdict: str
    map: str
    cls: str
    witness: dict = field(default_factory=dict)
    trace: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "PASS"

    def record(self) -> dict:
        return {"probe": "continuity", "map": self.map, "class": self.cls,
                "verdict": self.verdict, "witness": self.witness, "trace": self.trace}


def continuity_probe(f: Callable, path: DegenerationPath, k: int = DEFAULT_K,
                     K: int = DEFAULT_TAIL_START, name: str = "f") -> ProbeReport:
    expected = canonical(f(path.at(0)))
    samples = [Fraction(1, 2 ** j) for j in range(1, k + 1)]
    outputs = [flatten(f(path.at(e))) for e in samples]
    shape_ids = {}
    trace = [{"j": j + 1, "shape": shape_ids.setdefault(s, len(shape_ids)), "weights": [str(w) for w in ws]}
             for j, (s, ws) in enumerate(outputs)]
    tail = outputs[K - 1:]
    shape = tail[0][0]
    for j, (s, _) in enumerate(tail):
        if s != shape:
            return ProbeReport("FAIL", name, path.cls, {"reason": "shape not eventually constant",
                                                        "sample": K + j}, trace)
    xs = samples[K - 1:]
    limits = []
    for c in range(len(tail[0][1])):
        ys = [ws[c] for _, ws in tail]
        lim = rational_limit(xs, ys)
        if lim is None:
            return ProbeReport("FAIL", name, path.cls, {"reason": "no rational fit", "coordinate": c}, trace)
        limits.append(lim)
    limit = canonical(unflatten(shape, limits))
    if limit != expected:
        return ProbeReport("FAIL", name, path.cls, {"reason": "limit differs from value at the limit",
                                                    "limit": repr(limit), "expected": repr(expected)}, trace)
    return ProbeReport("PASS", name, path.cls, {}, trace)


# ---------------------------------------------------------------- maps under test


def map_normalize(Q):
    return lambda raw: normalize(raw, Q, validate=False)


def map_sigma(QG: Semidirect):
    def f(x):
        zeta, psi_raw = x
        psi = normalize(psi_raw, QG.P, validate=False)
        return sigma(canonicalize_equivariant(normalize_word(zeta), psi), QG)
    return f


def map_pi(QG: Semidirect):
    return lambda raw: pi(normalize(raw, QG, validate=False))


def map_H(QG: Semidirect, s):
    s = Fraction(s)
    return lambda raw: homotopy_H(s, normalize(raw, QG, validate=False))


def map_H_s(QG: Semidirect):
    def f(x):
        s, raw = x
        return homotopy_H(s, normalize(raw, QG, validate=False))
    return f


def map_decompose(QG, req: DecompositionRequest):
    return lambda raw: decompose(normalize(raw, QG, validate=False), req)


# ---------------------------------------------------------------- path families

TREE_CLASSES = ("leaf_branch", "root_branch", "internal_branch", "edge_within_branch",
                "edge_below_stable", "edge_below_least_stable")
ZETA_CLASSES = ("zeta_root_edge", "zeta_inner_edge", "zeta_top_edge")
S_CLASSES = ("s_cross_below", "s_cross_above")
ALL_CLASSES = TREE_CLASSES + ZETA_CLASSES + S_CLASSES


def _chains(node) -> dict:
    """Branch chains of a raw tree: branch -> list of edge paths bottom-up."""
    out = {}

    def go(n, path, position):
        edges = [path]
        while isinstance(n, Vertex) and n.arity == 1:
            n = n.children[0]
            path = path + (0,)
            edges.append(path)
        out[(n.leafset, position, path)] = edges
        if isinstance(n, Vertex):
            for i, c in enumerate(n.children):
                top = c
                while isinstance(top, Vertex) and top.arity == 1:
                    top = top.children[0]
                go(c, path + (i,), "leaf" if isinstance(top, Leaf) else "internal")

    go(node, (), "root")
    return out


def _subtree_edges(node, path) -> set:
    sub = trees.node_at(node, path)
    return {path + p for p, _ in trees.iter_nodes(sub) if p}


def zero_set_for(cls: str, shape, rng: random.Random) -> Optional[set]:
    """Edges to send to zero for a tree degeneration class (None if n/a)."""
    chains = _chains(shape)
    by_pos = {}
    for (clade, pos, top), edges in chains.items():
        by_pos.setdefault(pos, []).append((top, edges))
    if cls == "leaf_branch":
        top, edges = rng.choice(by_pos["leaf"])
        parent = edges[0][:-1]
        return _subtree_edges(shape, parent)
    if cls == "root_branch":
        top, edges = by_pos["root"][0]
        return set(edges)
    if cls == "internal_branch":
        if "internal" not in by_pos:
            return None
        top, edges = rng.choice(by_pos["internal"])
        return set(edges)
    if cls == "edge_within_branch":
        options = []
        for pos, items in by_pos.items():
            for top, edges in items:
                if len(edges) < 2:
                    continue
                candidates = edges if pos == "leaf" else edges[:-1]
                if pos == "root" and trees.node_at(shape, top).arity >= 2:
                    candidates = edges[:-1]
                options.extend((e, pos) for e in candidates)
        if not options:
            return None
        e, pos = rng.choice(options)
        return {e}
    if cls in ("edge_below_stable", "edge_below_least_stable"):
        want = "internal" if cls == "edge_below_stable" else "root"
        options = [(top, edges) for top, edges in by_pos.get(want, []) if len(edges) >= 2
                   and isinstance(trees.node_at(shape, top), Vertex)]
        if not options:
            return None
        top, edges = rng.choice(options)
        j = rng.randint(1, len(edges) - 1)
        return set(edges[-j:])
    raise ValueError(f"unknown tree class {cls!r}")


def _shape_with_unaries(QG, n, rng, min_unary=2):
    shape = random_stable_tree(range(1, n + 1), rng, arities={k for k in range(2, 7) if QG.has_arity(k)})
    stable = len(trees.vertices(shape))
    budget = max(min_unary, 8 - stable)
    return insert_unary(shape, rng, budget)


def _labels_nontrivial(shape, QG, rng):
    def go(n):
        if isinstance(n, Leaf):
            return n
        kids = tuple(go(c) for c in n.children)
        if n.arity == 1:
            g = rng.choice([g for g in QG.G.elements if g != QG.G.identity] or QG.G.elements)
            return Vertex(kids, QG.unary(g), n.weight)
        return Vertex(kids, QG.random_element(n.arity, rng), n.weight)
    return go(shape)


def tree_path(QG, cls: str, n: int, rng: random.Random) -> Optional[DegenerationPath]:
    """A degeneration path of raw P⋊G trees for a tree class (None if n/a)."""
    for _ in range(30):
        shape = _shape_with_unaries(QG, n, rng)
        zero = zero_set_for(cls, shape, rng)
        if zero is None:
            continue
        labeled = _labels_nontrivial(shape, QG, rng)
        try:
            target = random_weighting(labeled, rng, zero=zero)
        except ValueError:
            continue
        generic = random_weighting(labeled, rng)
        return DegenerationPath(target, generic, cls)
    return None


def psi_path(P, cls: str, n: int, rng: random.Random):
    """Degenerations of the B(P) factor for σ (only branch classes apply)."""
    if cls not in ("leaf_branch", "root_branch", "internal_branch"):
        return None
    for _ in range(30):
        shape = random_stable_tree(range(1, n + 1), rng, arities={k for k in range(2, 7) if P.has_arity(k)})
        zero = zero_set_for(cls, shape, rng)
        if zero is None:
            continue
        labeled = label_tree(shape, P, rng)
        try:
            return random_weighting(labeled, rng, zero=zero), random_weighting(labeled, rng)
        except ValueError:
            continue
    return None


def sigma_path(QG: Semidirect, cls: str, n: int, rng: random.Random) -> Optional[DegenerationPath]:
    G = QG.G
    if cls in ZETA_CLASSES:
        k = rng.randint(2, 3)
        labels = tuple(rng.choice([g for g in G.elements if g != G.identity] or G.elements) for _ in range(k))
        right = rng.choice(G.elements)
        j = {"zeta_root_edge": 0, "zeta_inner_edge": rng.randint(1, k - 1), "zeta_top_edge": k}[cls]
        wt = list(random_weights(k - 1, rng))
        wt.insert(j, Fraction(0))
        wg = random_weights(k, rng)
        zt = MonoidBarWord(Variant.EG, tuple(wt), labels, None, right, G)
        zg = MonoidBarWord(Variant.EG, wg, labels, None, right, G)
        shape = random_stable_tree(range(1, n + 1), rng)
        psi = random_weighting(label_tree(shape, QG.P, rng), rng)
        return DegenerationPath((zt, psi), (zg, psi), cls)
    got = psi_path(QG.P, cls, n, rng)
    if got is None:
        return None
    pt, pg = got
    k = rng.randint(0, 3)
    labels = tuple(rng.choice(G.elements) for _ in range(k))
    z = MonoidBarWord(Variant.EG, random_weights(k, rng), labels, None, rng.choice(G.elements), G)
    return DegenerationPath((z, pt), (z, pg), cls)


def s_path(QG: Semidirect, cls: str, n: int, rng: random.Random) -> Optional[DegenerationPath]:
    """s tends to the altitude of a stable vertex, from below or from above."""
    for _ in range(30):
        shape = _shape_with_unaries(QG, n, rng)
        labeled = _labels_nontrivial(shape, QG, rng)
        raw = random_weighting(labeled, rng)
        p = normalize(raw, QG, validate=False)
        if p.is_base:
            continue
        stable = trees.underlying_stable_tree(p.tree)
        alts = sorted({trees.altitude(stable, path) for path, _ in trees.vertices(stable)})
        # every vertex altitude is critical for H; stay clear of the others
        critical = sorted({Fraction(0), Fraction(1)} | {trees.altitude(p.tree, path) for path, _ in trees.vertices(p.tree)})
        a = rng.choice(alts)
        if cls == "s_cross_below":
            other = (a + max(c for c in critical if c < a)) / 2
        else:
            other = (a + min(c for c in critical if c > a)) / 2
        return DegenerationPath((a, raw), (other, raw), cls)
    return None


def crosses(path: DegenerationPath, s, eps_max=Fraction(1, 4)) -> bool:
    """Whether some vertex altitude passes through s for 0 < ε ≤ eps_max.

    H(s, ·) changes case when an altitude crosses s, so a path that does
    this inside its sampled tail has no eventually constant shape.
    """
    for vpath, _ in trees.vertices(path.target):
        at = trees.altitude(path.target, vpath)
        ag = trees.altitude(path.generic, vpath)
        if at == s or ag == at:
            continue
        eps = (s - at) / (2 * (ag - at))
        if 0 < eps <= eps_max:
            return True
    return False


def _splitting_request(QG, raw, rng):
    p = normalize(raw, QG, validate=False)
    reqs = requests_for(p.leafset)
    if p.is_base:
        return rng.choice(reqs)
    clades = {b.clade for b in trees.branches(p.tree)}
    good = [r for r in reqs if r.B in clades]
    return rng.choice(good or reqs)


# classes that zero part of an internal branch, which needs at least 3 leaves
NEEDS_INTERNAL = ("internal_branch", "edge_below_stable")


def probe_cases(QG: Semidirect, rng: random.Random, per_class: int = 3, n_range=(2, 5)):
    """Yield (map name, class, f, path) for every applicable combination.

    Classes with no applicable path for a map are yielded with f and path
    set to None so that coverage can report them.
    """
    maps = ("sigma", "pi", "H(1/2)", "decompose")
    for name in maps:
        classes = list(TREE_CLASSES)
        if name == "sigma":
            classes += list(ZETA_CLASSES)
        if name == "H(1/2)":
            classes += list(S_CLASSES)
        for cls in classes:
            made = 0
            lo = max(n_range[0], 3) if cls in NEEDS_INTERNAL else n_range[0]
            for _ in range(per_class):
                n = rng.randint(lo, n_range[1])
                if name == "sigma":
                    path = sigma_path(QG, cls, n, rng)
                    f = map_sigma(QG)
                elif cls in S_CLASSES:
                    path = s_path(QG, cls, n, rng)
                    f = map_H_s(QG)
                else:
                    path = tree_path(QG, cls, n, rng)
                    if name == "H(1/2)":
                        for _ in range(30):
                            if path is None or not crosses(path, Fraction(1, 2)):
                                break
                            path = tree_path(QG, cls, n, rng)
                        else:
                            path = None
                    if path is None:
                        f = None
                    elif name == "pi":
                        f = map_pi(QG)
                    elif name == "H(1/2)":
                        f = map_H(QG, Fraction(1, 2))
                    else:
                        f = map_decompose(QG, _splitting_request(QG, path.generic, rng))
                if path is None:
                    continue
                made += 1
                yield name, cls, f, path
            if not made:
                yield name, cls, None, None


# ---------------------------------------------------------------- confluence


@dataclass
class ConfluenceReport:
    passed: bool
    forms: list

    def record(self) -> dict:
        return {"probe": "confluence", "verdict": "PASS" if self.passed else "FAIL",
                "distinct_forms": len(set(self.forms))}


def confluence_probe(raw, Q, orders: int = 5, seed=0) -> ConfluenceReport:
    """Normalize under ``orders`` shuffled rule orders plus the default order."""
    forms = [normalize(raw, Q)]
    for j in range(orders):
        forms.append(normalize(raw, Q, rng=random.Random(repr((seed, j)))))
    return ConfluenceReport(all(f == forms[0] for f in forms), forms)


# ---------------------------------------------------------------- reduced membership


def in_reduced_image(p: BarPoint) -> bool:
    """p lies in the image of B(R Q) iff its canonical form has no unary vertex."""
    if p.is_base:
        return True
    return all(v.arity >= 2 for _, v in trees.vertices(p.tree))


def branch_words_via_decompose(p: BarPoint) -> dict:
    """Isolate every branch as a one-leaf point using only degrafting.

    Leaf and internal branches appear as the root branch of the factor above
    the cut; a second degraft at the root turns that root branch into a
    one-leaf point.
    """
    out = {}
    if p.is_base:
        return out
    fresh, top = ("cut",), ("stem",)
    for b in trees.branches(p.tree):
        if b.position == "root":
            q = p
        else:
            _, q = decompose(p, DecompositionRequest((p.leafset - b.clade) | {fresh}, fresh, b.clade))
        if len(q.leafset) == 1:
            stem = q
        else:
            stem, _ = decompose(q, DecompositionRequest({top}, top, q.leafset))
        out[b] = stem
    return out


def reduced_membership_probe(Q, n: int, count: int, seed=0) -> list:
    """Check the image characterization and its stability under decompose.

    Samples come from both B(R Q) (in the image by construction) and B(Q).
    Returns JSON-ready records; every record has a verdict.
    """
    from .generators import random_raw

    RQ = ReducedR(Q)
    rng = random.Random(repr(("reduced", seed, n)))
    records = []
    for j in range(count):
        from_R = j % 2 == 0
        raw = random_raw(RQ if from_R else Q, n, rng, zero_prob=0.2)
        p = normalize(raw, Q, validate=False)
        image = in_reduced_image(p)
        problems = []
        if from_R and not image:
            problems.append("point built over R(Q) is not recognized as in the image")
        words = branch_words_via_decompose(p)
        dual = all(isinstance(w.tree, Leaf) for w in words.values())
        if dual != image:
            problems.append("branch-word route disagrees with the unary-vertex test")
        view_empty = p.is_base or all(w.length == 0 for w in to_marking_view(p).mu.values())
        if view_empty != image:
            problems.append("marking view disagrees with the unary-vertex test")
        if image and not p.is_base:
            pre = normalize(p.tree, RQ, validate=False)
            if pre.tree != p.tree:
                problems.append("no preimage over R(Q)")
            for req in requests_for(p.leafset):
                a, b = decompose(p, req)
                if not (in_reduced_image(a) and in_reduced_image(b)):
                    problems.append(f"decompose leaves the image at B={sorted(req.B)}")
                    break
        records.append({"probe": "reduced", "operad": Q.name, "sample": j, "source": "R(Q)" if from_R else "Q",
                        "in_image": image, "verdict": "FAIL" if problems else "PASS", "witness": problems})
    return records
