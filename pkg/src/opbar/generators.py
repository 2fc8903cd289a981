"""Seeded random corpora: trees, weightings, raw points, words, equivariant points.

Sizes stay small on purpose: at most 6 leaves, at most 8 vertices and weight
denominators at most 64.  Every function takes a ``random.Random``.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Iterable, Optional

from . import trees
from .barpoints import BarPoint, normalize
from .equivalence import EquivariantPoint, canonicalize_equivariant
from .monoidbar import MonoidBarWord, Variant, normalize_word
from .operads import OperadSpec, Semidirect
from .trees import Leaf, Vertex

MAX_LEAVES = 6
MAX_VERTICES = 8
MAX_DENOMINATOR = 64
DENOMINATORS = (4, 6, 8, 12, 16, 24, 32, 48, 64)


def rng_for(seed, *salt) -> random.Random:
    """Independent deterministic stream for (seed, salt...)."""
    return random.Random(repr((seed,) + salt))


def random_stable_tree(leaves: Iterable, rng: random.Random, max_children: int = 4,
                       arities: Optional[set] = None) -> trees.Node:
    """A uniformly-ish random stable shape on the given leaves (no labels/weights)."""
    leaves = list(leaves)
    if len(leaves) == 1:
        return Leaf(leaves[0])
    for _ in range(100):
        k = rng.randint(2, min(max_children, len(leaves)))
        if arities is None or k in arities:
            break
    rng.shuffle(leaves)
    cuts = sorted(rng.sample(range(1, len(leaves)), k - 1))
    parts = [leaves[a:b] for a, b in zip([0] + cuts, cuts + [len(leaves)])]
    return trees.make_vertex([random_stable_tree(p, rng, max_children, arities) for p in parts])


def all_stable_trees(leaves) -> list:
    """Every stable leaf-labeled tree on ``leaves`` (unlabeled vertices)."""
    leaves = sorted(leaves, key=trees.label_key)
    if len(leaves) == 1:
        return [Leaf(leaves[0])]
    out = []
    for partition in _set_partitions(leaves):
        if len(partition) < 2:
            continue
        options = [all_stable_trees(block) for block in partition]
        for combo in _product(options):
            out.append(trees.make_vertex(combo))
    return out


def _product(options):
    if not options:
        yield []
        return
    for head in options[0]:
        for rest in _product(options[1:]):
            yield [head] + rest


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def insert_unary(node: trees.Node, rng: random.Random, budget: int) -> trees.Node:
    """Insert up to ``budget`` unary vertices on random edges."""
    slots = [p for p, _ in trees.iter_nodes(node)]
    count = rng.randint(0, budget) if budget > 0 else 0
    chosen = {}
    for _ in range(count):
        p = rng.choice(slots)
        chosen[p] = chosen.get(p, 0) + 1

    def go(n, path):
        if isinstance(n, Vertex):
            n = Vertex(tuple(go(c, path + (i,)) for i, c in enumerate(n.children)), n.label, n.weight)
        for _ in range(chosen.get(path, 0)):
            n = Vertex((n,), None, None)
        return n

    return go(node, ())


def random_weighting(node: trees.Node, rng: random.Random, D: Optional[int] = None,
                     zero: Iterable = (), positive_only: bool = True) -> trees.Node:
    """Weights k/D with every root-to-leaf path summing to one.

    Edges (named by node path) listed in ``zero`` get weight 0; all others
    are positive.
    """
    zero = set(zero)
    D = D or rng.choice([d for d in DENOMINATORS if d > _height(node, zero) + 1] or [MAX_DENOMINATOR])

    heights = {}

    def height(n, path):
        if isinstance(n, Leaf):
            h = 0
        else:
            h = max(height(c, path + (i,)) + (0 if path + (i,) in zero else 1) for i, c in enumerate(n.children))
        heights[path] = h
        return h

    height(node, ())
    if heights[()] + (0 if () in zero else 1) > D:
        raise ValueError("denominator too small for this tree")

    def go(n, path, parent_k):
        if path in zero:
            k = parent_k
        elif isinstance(n, Leaf) or heights[path] == 0:
            k = D
        else:
            k = rng.randint(parent_k + 1, D - heights[path])
        if isinstance(n, Leaf):
            if k != D:
                raise ValueError("zero leaf edge below an unsaturated vertex")
            return Leaf(n.leaf, Fraction(k - parent_k, D))
        kids = tuple(go(c, path + (i,), k) for i, c in enumerate(n.children))
        return Vertex(kids, n.label, Fraction(k - parent_k, D))

    return go(node, (), 0)


def _height(node, zero) -> int:
    def h(n, path):
        if isinstance(n, Leaf):
            return 0
        return max(h(c, path + (i,)) + (0 if path + (i,) in zero else 1) for i, c in enumerate(n.children))
    return h(node, ()) + (0 if () in zero else 1)


def random_zero_set(node: trees.Node, rng: random.Random, prob: float) -> set:
    """A consistent random set of zero-weight edges.

    A zero leaf edge forces its whole path below (up to the next positive
    edge) to sit at altitude one, so leaf edges are only zeroed when the
    unary vertex below them can absorb it.
    """
    zero = set()
    for path, n in trees.iter_nodes(node):
        if isinstance(n, Leaf):
            continue
        if rng.random() < prob:
            zero.add(path)
    for path, n in trees.iter_nodes(node):
        if isinstance(n, Leaf) and path and rng.random() < prob / 2:
            parent = trees.node_at(node, path[:-1])
            # a zero leaf edge is allowed when every other leaf above the parent is zero too
            if all(isinstance(c, Leaf) for c in parent.children) and parent.arity == 1:
                zero.add(path)
    return zero


def label_tree(node: trees.Node, Q: OperadSpec, rng: random.Random, unit_prob: float = 0.2) -> trees.Node:
    """Random labels of the right arity; unary vertices get the unit with ``unit_prob``."""
    if isinstance(node, Leaf):
        return node
    kids = tuple(label_tree(c, Q, rng, unit_prob) for c in node.children)
    if node.arity == 1 and rng.random() < unit_prob:
        x = Q.unit
    else:
        x = Q.random_element(node.arity, rng)
    return Vertex(kids, x, node.weight)


def random_raw(Q: OperadSpec, n: int, rng: random.Random, zero_prob: float = 0.25,
               unary_budget: Optional[int] = None, D: Optional[int] = None) -> trees.Node:
    """A raw point of B(Q)(n) that may contain every kind of redex."""
    arities = _usable_arities(Q)
    shape = random_stable_tree(range(1, n + 1), rng, arities=arities)
    stable_count = len(trees.vertices(shape))
    budget = MAX_VERTICES - stable_count if unary_budget is None else unary_budget
    shape = insert_unary(shape, rng, max(0, budget))
    for _ in range(20):
        zero = random_zero_set(shape, rng, zero_prob)
        try:
            weighted = random_weighting(shape, rng, D, zero)
            break
        except ValueError:
            continue
    else:
        weighted = random_weighting(shape, rng, D)
    return label_tree(weighted, Q, rng)


def _usable_arities(Q: OperadSpec):
    arities = {k for k in range(2, MAX_LEAVES + 1) if Q.has_arity(k)}
    return arities or None


def random_point(Q: OperadSpec, n: int, rng: random.Random, unary_budget: Optional[int] = None,
                 D: Optional[int] = None) -> BarPoint:
    """A non-base canonical point (all raw weights positive)."""
    raw = random_raw(Q, n, rng, zero_prob=0.0, unary_budget=unary_budget, D=D)
    return normalize(raw, Q)


def random_weights(k: int, rng: random.Random, D: Optional[int] = None, allow_zero: bool = False) -> tuple:
    """k+1 weights with denominator D summing to one."""
    D = D or rng.choice([d for d in DENOMINATORS if d > k])
    lo = 0 if allow_zero else 1
    cuts = sorted(rng.randint(0, D) for _ in range(k)) if allow_zero else sorted(rng.sample(range(1, D), k))
    edges = [0] + cuts + [D]
    ws = tuple(Fraction(b - a, D) for a, b in zip(edges, edges[1:]))
    assert all(w >= 0 for w in ws) and (allow_zero or all(w > 0 for w in ws)) and lo in (0, 1)
    return ws


def random_word(variant, G, rng: random.Random, max_labels: int = 3, allow_zero: bool = False,
                normalize: bool = True, identity_prob: float = 0.15) -> MonoidBarWord:
    v = Variant(variant)
    k = rng.randint(0, max_labels)
    els = list(G.elements)
    labels = tuple(G.identity if rng.random() < identity_prob else rng.choice(els) for _ in range(k))
    left = rng.choice(els) if v.has_left else None
    right = rng.choice(els) if v.has_right else None
    w = MonoidBarWord(v, random_weights(k, rng, allow_zero=allow_zero), labels, left, right, G)
    return normalize_word(w) if normalize else w


def random_equivariant(QG: Semidirect, n: int, rng: random.Random) -> EquivariantPoint:
    """A canonical [ζ ∧ ψ] with ψ a non-base point of B(P)(n)."""
    zeta = random_word(Variant.EG, QG.G, rng)
    psi = random_point(QG.P, n, rng, unary_budget=0)
    return canonicalize_equivariant(zeta, psi)


def random_chain(QG: Semidirect, rng: random.Random, max_labels: int = 4, allow_zero: bool = True,
                 leaf=1) -> tuple:
    """A raw one-leaf chain of G labels and its (unnormalized) BG word."""
    k = rng.randint(0, max_labels)
    labels = [rng.choice(QG.G.elements) for _ in range(k)]
    weights = random_weights(k, rng, allow_zero=allow_zero)
    node = Leaf(leaf, weights[-1])
    for g, w in zip(reversed(labels), reversed(weights[:-1])):
        node = Vertex((node,), QG.unary(g), w)
    word = MonoidBarWord(Variant.BG, weights, tuple(labels), None, None, QG.G)
    return node, word


def enumerate_weightings(node: trees.Node, values) -> list:
    """Every weighting of ``node`` with edge weights drawn from ``values`` and path sums one."""
    values = sorted(set(Fraction(v) for v in values if v > 0))
    allowed = set(values)

    def go(n, alt):
        if isinstance(n, Leaf):
            w = 1 - alt
            return [Leaf(n.leaf, w)] if w in allowed else []
        out = []
        for w in values:
            if alt + w >= 1:
                break
            options = [go(c, alt + w) for c in n.children]
            if any(not o for o in options):
                continue
            for kids in _product(options):
                out.append(Vertex(tuple(kids), n.label, w))
        return out

    return go(node, Fraction(0))


def small_fractions(max_denominator: int) -> list:
    """Fractions in (0, 1] with denominator at most ``max_denominator``."""
    return sorted({Fraction(a, b) for b in range(1, max_denominator + 1) for a in range(1, b + 1)})


def random_marking(psi: BarPoint, G, rng: random.Random, max_labels: int = 2) -> dict:
    """A random G-marking of ψ: BG on the root branch, ẼG elsewhere."""
    words = {}
    for b in trees.branches(psi.tree):
        variant = Variant.BG if b.position == "root" else Variant.EGTILDE
        words[b] = random_word(variant, G, rng, max_labels=max_labels)
    return words
