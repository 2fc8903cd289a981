"""Points of the bar construction B(Q) as canonical weighted labeled trees.

A raw point is any weighted tree whose vertices carry elements of Q of the
matching arity.  ``normalize`` rewrites it with the three relations

1. a zero-weight internal edge is contracted by operadic composition,
2. a unit-labeled unary vertex is deleted, adding its two edge weights,
3. a zero-weight root or leaf edge next to a unary vertex deletes that
   vertex (the augmentation of a strongly augmented operad),

after sending points with a basepoint label or a zero-weight root or leaf
branch to the basepoint.  The canonical form has no zero weights and no unit
unary vertices, so equality of points is structural equality.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Optional

from . import trees
from .monoidbar import MonoidBarWord, OperadMonoid, Variant, normalize_word
from .operads import BASE, OperadSpec, Semidirect
from .trees import Branch, Leaf, Node, Vertex

RULES = ("compose", "augment", "unit")


@dataclass(frozen=True)
class BarPoint:
    tree: Optional[Node]
    leafset: frozenset
    operad: Any = field(default=None, compare=False, repr=False)

    @property
    def is_base(self) -> bool:
        return self.tree is None

    @property
    def arity(self) -> int:
        return len(self.leafset)


def basepoint(leafset, Q=None) -> BarPoint:
    return BarPoint(None, frozenset(leafset), Q)


def validate_raw(raw: Node, Q: OperadSpec) -> None:
    """Raise ValueError on bad weights or labels of the wrong arity."""
    problems = trees.check_weighting(raw)
    if problems:
        raise ValueError("invalid weighting: " + "; ".join(problems[:3]))
    for _, v in trees.vertices(raw):
        x = v.label
        if x is BASE:
            continue
        if not Q.contains(x, v.arity):
            raise ValueError(f"label {x!r} is not an element of {Q.name} of arity {v.arity}")


def _base_label(raw: Node) -> bool:
    return any(v.label is BASE for _, v in trees.vertices(raw))


def has_zero_external_branch(raw: Node) -> bool:
    """True if the root branch or some leaf branch has total weight 0."""
    if len(raw.leafset) < 2:
        return False
    bw = trees.branch_weights(raw)
    return any(w == 0 for b, w in bw.items() if b.position != "internal")


def redexes(node: Node, Q: OperadSpec) -> list:
    """All applicable rewrites as (rule, path) pairs."""
    out = []

    def go(n, path, parent_unary):
        if isinstance(n, Leaf):
            if n.weight == 0 and parent_unary:
                out.append(("augment", path))
            return
        unary = n.arity == 1
        if path and n.weight == 0:
            out.append(("compose", path))
        if unary:
            if not path and n.weight == 0:
                out.append(("augment", path))
            if Q.is_unit(n.label):
                out.append(("unit", path))
        for i, c in enumerate(n.children):
            go(c, path + (i,), unary)

    go(node, (), False)
    return out


def apply_rewrite(node: Node, rule: str, path, Q: OperadSpec):
    """One rewrite step; returns None when the result is the basepoint."""
    if rule == "compose":
        new, label = trees.contract_edge(node, path, Q.compose, Q.relabel)
        return None if label is BASE else new
    if rule == "augment":
        if isinstance(trees.node_at(node, path), Leaf):
            ppath = path[:-1]
            u = trees.node_at(node, ppath)
            if not Q.augment(u.label):
                return None
            return trees.replace_at(node, ppath, Leaf(u.children[0].leaf, u.weight))
        if not Q.augment(node.label):
            return None
        return node.children[0]
    if rule == "unit":
        u = trees.node_at(node, path)
        child = u.children[0]
        return trees.replace_at(node, path, trees.with_weight(child, child.weight + u.weight))
    raise ValueError(f"unknown rule {rule!r}")


def normalize(raw: Node, Q: OperadSpec, rng=None, validate: bool = True) -> BarPoint:
    """Canonical form of a raw point.

    Without ``rng`` the rules are applied in the fixed priority compose,
    augment, unit; with ``rng`` a uniformly random redex is used each step.
    """
    if validate:
        validate_raw(raw, Q)
    leafset = raw.leafset
    if _base_label(raw) or has_zero_external_branch(raw):
        return basepoint(leafset, Q)
    node = raw
    while True:
        found = redexes(node, Q)
        if not found:
            return BarPoint(node, leafset, Q)
        if rng is None:
            rule, path = min(found, key=lambda r: RULES.index(r[0]))
        else:
            rule, path = rng.choice(found)
        node = apply_rewrite(node, rule, path, Q)
        if node is None:
            return basepoint(leafset, Q)


def is_canonical(node: Node, Q: OperadSpec) -> bool:
    return not redexes(node, Q) and not has_zero_external_branch(node) and not _base_label(node)


def _same_operad(p: BarPoint, q: BarPoint) -> None:
    if p.operad is not None and q.operad is not None and p.operad is not q.operad:
        if p.operad.name != q.operad.name:
            raise ValueError(f"points over different operads ({p.operad.name} vs {q.operad.name})")


def equals(p: BarPoint, q: BarPoint) -> bool:
    _same_operad(p, q)
    return p == q


def branch_set(p: BarPoint) -> set:
    if p.is_base:
        return set()
    return set(trees.branches(p.tree))


def nonzero_branches(raw: Node) -> set:
    """Branches of nonzero weight of a raw representative."""
    return {b for b, w in trees.branch_weights(raw).items() if w != 0}


# ---------------------------------------------------------------- markings


def read_chains(node: Node) -> tuple:
    """Split a tree into its stable skeleton and the unary chain of each branch.

    Returns (stable, chains) where ``stable`` is the underlying stable tree
    (with branch weights and stable labels) and ``chains[branch]`` lists the
    unary labels bottom-up together with the raw edge weights bottom-up.
    """
    chains = {}

    def go(n, position):
        labels, weights = [], []
        while isinstance(n, Vertex) and n.arity == 1:
            labels.append(n.label)
            weights.append(n.weight)
            n = n.children[0]
        weights.append(n.weight)
        if isinstance(n, Leaf):
            b = Branch(n.leafset, position)
            chains[b] = (labels, weights)
            return Leaf(n.leaf, sum(weights)), n.leafset
        b = Branch(n.leafset, position)
        chains[b] = (labels, weights)
        kids = [go(c, "leaf" if isinstance(_top(c), Leaf) else "internal")[0] for c in n.children]
        return Vertex(tuple(kids), n.label, sum(weights)), n.leafset

    stable, _ = go(node, "root")
    return stable, chains


def _top(n: Node) -> Node:
    while isinstance(n, Vertex) and n.arity == 1:
        n = n.children[0]
    return n


def chain_word(labels, weights, variant=Variant.BG, monoid=None, left=None, right=None, scale=None) -> MonoidBarWord:
    total = sum(weights) if scale is None else scale
    ts = tuple(Fraction(w) / total for w in weights)
    return MonoidBarWord(variant, ts, tuple(labels), left, right, monoid)


def assemble_raw(stable: Node, words: dict, unary: Callable, stable_label: Callable = lambda x: x) -> Node:
    """Paste words onto the branches of a weighted stable tree.

    Each branch of weight W gets a chain of unary vertices labeled by
    ``unary(g)``.  A left module becomes a unary vertex joined to the stable
    vertex below by a zero-weight edge; a right module becomes a unary vertex
    joined to the node above by a zero-weight edge.  Identity module labels
    are kept; ``normalize`` removes them.
    """
    def chain(node, word: MonoidBarWord):
        W = node.weight
        seq_labels, seq_weights = [], []
        if word.variant.has_left:
            seq_labels.append(word.left)
            seq_weights.append(Fraction(0))
        seq_labels.extend(word.labels)
        seq_weights.extend(W * t for t in word.weights)
        if word.variant.has_right:
            seq_labels.append(word.right)
            seq_weights.append(Fraction(0))
        out = trees.with_weight(node, seq_weights[-1])
        for g, w in zip(reversed(seq_labels), reversed(seq_weights[:-1])):
            out = Vertex((out,), unary(g), w)
        return out

    def go(n, position):
        b = Branch(n.leafset, position)
        if isinstance(n, Leaf):
            built = Leaf(n.leaf, n.weight)
        else:
            kids = [go(c, "leaf" if isinstance(c, Leaf) else "internal") for c in n.children]
            built = Vertex(tuple(kids), stable_label(n.label), n.weight)
        return chain(built, words[b])

    return go(stable, "root")


@dataclass(frozen=True)
class BranchMarkingView:
    stable: Optional[Node]
    mu: dict
    leafset: frozenset = frozenset()


def to_marking_view(p: BarPoint) -> BranchMarkingView:
    if p.is_base:
        return BranchMarkingView(None, {}, p.leafset)
    M = OperadMonoid(p.operad)
    stable, chains = read_chains(p.tree)
    mu = {b: normalize_word(chain_word(ls, ws, Variant.BG, M)) for b, (ls, ws) in chains.items()}
    return BranchMarkingView(stable, mu, p.leafset)


def from_marking_view(view: BranchMarkingView, Q: OperadSpec) -> BarPoint:
    if view.stable is None:
        return basepoint(view.leafset, Q)
    raw = assemble_raw(view.stable, view.mu, unary=lambda g: g)
    return normalize(raw, Q)


# ---------------------------------------------------------------- actions


def sym_act(perm, p: BarPoint) -> BarPoint:
    """Relabel leaves: leaf k becomes perm[k] (dict) or perm[k-1] (sequence)."""
    if isinstance(perm, dict):
        mapping = perm
    else:
        mapping = {k + 1: v for k, v in enumerate(perm)}
    leafset = frozenset(mapping[x] for x in p.leafset)
    if p.is_base:
        return basepoint(leafset, p.operad)
    Q = p.operad
    return BarPoint(trees.relabel_leaves(p.tree, mapping, Q.relabel), leafset, Q)


def g_act(g, p: BarPoint) -> BarPoint:
    """Diagonal action of a group element on every vertex label."""
    if p.is_base:
        return p
    Q = p.operad
    return normalize(trees.map_labels(p.tree, lambda x: Q.act(g, x)), Q, validate=False)


# ---------------------------------------------------------------- P⋊G


def standard_representative(p: BarPoint) -> Node:
    """The representative with pure P stable labels and G on unary vertices.

    It satisfies: stable vertices are labeled (p; e, …, e); no branch has
    weight 0; exactly the edges leaving a stable vertex upward have weight 0;
    identity labels occur only directly above stable vertices.
    """
    if p.is_base:
        raise ValueError("the basepoint has no standard representative")
    Q = p.operad
    if not isinstance(Q, Semidirect):
        raise ValueError("standard representatives are defined over P⋊G")
    stable, words = read_semidirect(p)
    return assemble_raw(stable, words, unary=Q.unary, stable_label=Q.pure)


def read_semidirect(p: BarPoint) -> tuple:
    """(ψ-tree, words): the P-labeled stable tree and the G-marking of each branch."""
    Q: Semidirect = p.operad
    G = Q.G
    stable, chains = read_chains(p.tree)
    lefts = {}
    for _, v in trees.vertices(stable):
        _, hs = v.label
        for c, h in zip(v.children, hs):
            lefts[c.leafset] = h
    words = {}
    for b, (ls, ws) in chains.items():
        gs = [x[1][0] for x in ls]
        if b.position == "root":
            w = chain_word(gs, ws, Variant.BG, G)
        else:
            w = chain_word(gs, ws, Variant.EGTILDE, G, left=lefts[b.clade])
        words[b] = normalize_word(w)
    psi = trees.map_labels(stable, lambda x: x[0])
    return psi, words
