"""The equivalence EG₊ ∧_G B(P) ≃ B(P⋊G): markings, σ, π and the homotopy H.

Points of B(P⋊G) are handled through their G-marking view (ψ, β): ψ is the
underlying point of B(P) and β assigns a word to every branch (ẼG to non-root
branches, BG to the root branch).  All maps build an augmented view and hand
it to ``assemble``, which pastes the words onto the branches and normalizes.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import trees
from .barpoints import BarPoint, basepoint, g_act, normalize, read_semidirect, assemble_raw
from .monoidbar import (MonoidBarWord, Variant, act_left, act_right, beta_e, empty_word, gamma,
                        graft_scale, label_product, make_word, normalize_word, pr_r, pr_root)
from .operads import Semidirect
from .trees import Branch, Leaf


@dataclass(frozen=True)
class EquivariantPoint:
    """[ζ ∧ ψ]; the basepoint has ``zeta`` None and ψ the basepoint."""

    zeta: Optional[MonoidBarWord]
    psi: BarPoint

    @property
    def is_base(self) -> bool:
        return self.zeta is None

    @property
    def leafset(self) -> frozenset:
        return self.psi.leafset


def canonicalize_equivariant(zeta: MonoidBarWord, psi: BarPoint) -> EquivariantPoint:
    """Coinvariant normal form: move the right module of ζ onto ψ."""
    if psi.is_base:
        return EquivariantPoint(None, psi)
    if zeta.variant is not Variant.EG:
        raise ValueError("ζ must be an EG word")
    G = zeta.monoid
    h = zeta.right
    if h == G.identity:
        return EquivariantPoint(normalize_word(zeta), psi)
    return EquivariantPoint(normalize_word(act_right(zeta, G.inv(h))), g_act(h, psi))


def equivariant_basepoint(leafset, P=None) -> EquivariantPoint:
    return EquivariantPoint(None, basepoint(leafset, P))


# ---------------------------------------------------------------- markings


def marking_bijection_fwd(p: BarPoint) -> tuple:
    """(ψ, β) for a point of B(P⋊G); the basepoint gives (basepoint, {})."""
    QG: Semidirect = p.operad
    if p.is_base:
        return basepoint(p.leafset, QG.P), {}
    psi_tree, words = read_semidirect(p)
    return BarPoint(psi_tree, p.leafset, QG.P), words


def _check_marking(psi: BarPoint, words: dict, augmented: bool) -> None:
    expected = set(trees.branches(psi.tree))
    if set(words) != expected:
        raise ValueError("marking does not cover exactly the branches of ψ")
    for b, w in words.items():
        if augmented:
            want = {"root": (Variant.EG, Variant.BG), "leaf": (Variant.EGTILDE,),
                    "internal": (Variant.BGGG, Variant.EGTILDE)}[b.position]
        else:
            want = (Variant.BG,) if b.position == "root" else (Variant.EGTILDE,)
        if w.variant not in want:
            raise ValueError(f"{b.position} branch cannot carry a {w.variant.value} word")


def assemble(psi: BarPoint, words: dict, QG: Semidirect, labels: Optional[dict] = None) -> BarPoint:
    """Paste (augmented) markings onto ψ and normalize in B(P⋊G).

    ``labels`` optionally overrides the P label of stable vertices by path.
    """
    if psi.is_base:
        return basepoint(psi.leafset, QG)
    stable = psi.tree
    if labels:
        stable = _relabel_vertices(stable, labels)
    raw = assemble_raw(stable, words, unary=QG.unary, stable_label=QG.pure)
    return normalize(raw, QG, validate=False)


def _relabel_vertices(stable, labels: dict):
    def go(n, path):
        if isinstance(n, Leaf):
            return n
        kids = tuple(go(c, path + (i,)) for i, c in enumerate(n.children))
        return trees.Vertex(kids, labels.get(path, n.label), n.weight)

    return go(stable, ())


def marking_bijection_bwd(psi: BarPoint, words: dict, QG: Semidirect) -> BarPoint:
    if psi.is_base:
        if words:
            raise ValueError("the basepoint only has the empty marking")
        return basepoint(psi.leafset, QG)
    _check_marking(psi, words, augmented=False)
    return assemble(psi, words, QG)


# ---------------------------------------------------------------- g_v, σ, π


def g_values(stable, words: dict, G) -> dict:
    """g_v for every stable vertex (by path): the root-first product of μ(β_e(E))."""
    out = {}

    def go(n, path, acc):
        if isinstance(n, Leaf):
            return
        out[path] = acc
        for i, c in enumerate(n.children):
            if isinstance(c, Leaf):
                continue
            w = words[Branch(c.leafset, "internal")]
            go(c, path + (i,), G.mul(acc, label_product(beta_e(w) if w.variant is Variant.EGTILDE else w)))

    go(stable, (), G.identity)
    return out


def g_v(p: BarPoint, path) -> object:
    """g_v of the stable vertex at ``path`` in the underlying stable tree of p."""
    if p.is_base:
        raise ValueError("the basepoint has no vertices")
    psi, words = marking_bijection_fwd(p)
    table = g_values(psi.tree, words, p.operad.G)
    if tuple(path) not in table:
        raise KeyError(f"no stable vertex at {path!r}")
    return table[tuple(path)]


def _sigma_words(zeta: MonoidBarWord, psi: BarPoint) -> dict:
    gz = gamma(zeta)
    words = {}
    for b in trees.branches(psi.tree):
        if b.position == "root":
            words[b] = zeta
        elif b.position == "leaf":
            words[b] = pr_r(gz)
        else:
            words[b] = gz
    return words


def sigma(x: EquivariantPoint, QG: Semidirect) -> BarPoint:
    """σ: EG₊ ∧_G B(P)(n) → B(P⋊G)(n) for n ≥ 2."""
    if len(x.leafset) < 2:
        raise ValueError("sigma is defined for arity at least 2; use iso_arity01")
    return _sigma(x, QG)


def _sigma(x: EquivariantPoint, QG: Semidirect) -> BarPoint:
    if x.is_base:
        return basepoint(x.leafset, QG)
    zeta = x.zeta
    if zeta.right != QG.G.identity:
        x = canonicalize_equivariant(zeta, x.psi)
        zeta = x.zeta
    return assemble(x.psi, _sigma_words(zeta, x.psi), QG)


def pi(p: BarPoint) -> EquivariantPoint:
    """π: B(P⋊G)(n) → EG₊ ∧_G B(P)(n) for n ≥ 2."""
    if len(p.leafset) < 2:
        raise ValueError("pi is defined for arity at least 2; use iso_arity01")
    return _pi(p)


def _pi(p: BarPoint) -> EquivariantPoint:
    QG: Semidirect = p.operad
    if p.is_base:
        return equivariant_basepoint(p.leafset, QG.P)
    psi, words = marking_bijection_fwd(p)
    gv = g_values(psi.tree, words, QG.G)
    P = QG.P
    tree = psi.tree
    for path, g in gv.items():
        if g != QG.G.identity:
            v = trees.node_at(tree, path)
            tree = trees.replace_at(tree, path, trees.Vertex(v.children, P.act(g, v.label), v.weight))
    root = trees.Branch(psi.leafset, "root")
    return canonicalize_equivariant(beta_e(words[root]), BarPoint(tree, psi.leafset, P))


def sigma_any(x: EquivariantPoint, QG: Semidirect) -> BarPoint:
    """σ on every arity, using the arity-one identification when n = 1."""
    if len(x.leafset) == 1:
        if x.is_base:
            return basepoint(x.leafset, QG)
        (leaf,) = x.leafset
        return iso_arity1_inv(pr_root(x.zeta), QG, leaf)
    return _sigma(x, QG)


def pi_any(p: BarPoint) -> EquivariantPoint:
    """π on every arity, using the arity-one identification when n = 1."""
    if len(p.leafset) == 1:
        QG = p.operad
        if p.is_base:
            return equivariant_basepoint(p.leafset, QG.P)
        w = iso_arity1(p)
        zeta = beta_e(w)
        (leaf,) = p.leafset
        return EquivariantPoint(zeta, BarPoint(Leaf(leaf, Fraction(1)), p.leafset, QG.P))
    return _pi(p)


# ---------------------------------------------------------------- homotopy


def homotopy_H(s, p: BarPoint) -> BarPoint:
    """H(s, p), with H(0, ·) = id and H(1, ·) = σ∘π.

    Stable vertices at altitude ≤ s are relabeled g_v·p_v.  A non-root branch
    E keeps β(E) while s < |v^E|, follows the segment ℓ_E on
    |v^E| ≤ s < |v_E| and carries γ(β_e(R)) afterwards.
    """
    s = Fraction(s)
    if not 0 <= s <= 1:
        raise ValueError("s must lie in [0, 1]")
    if p.is_base:
        return p
    QG: Semidirect = p.operad
    G, P = QG.G, QG.P
    psi, words = marking_bijection_fwd(p)
    stable = psi.tree
    gv = g_values(stable, words, G)
    root = Branch(psi.leafset, "root")
    gR = gamma(beta_e(words[root]))
    alt = {}
    new_labels = {}
    for path, v in trees.vertices(stable):
        alt[path] = trees.altitude(stable, path)
        if alt[path] <= s:
            new_labels[path] = P.act(gv[path], v.label)
    new_words = {root: words[root]}
    for path, n in trees.iter_nodes(stable):
        if not path:
            continue
        leaf = isinstance(n, Leaf)
        b = Branch(n.leafset, "leaf" if leaf else "internal")
        lo = alt[path[:-1]]
        hi = Fraction(1) if leaf else alt[path]
        if s < lo:
            w = words[b]
        elif s < hi:
            u = (s - lo) / (hi - lo)
            w = graft_scale(gR, act_left(gv[path[:-1]], beta_e(words[b])), u)
            if leaf:
                w = pr_r(w)
        else:
            w = pr_r(gR) if leaf else gR
        new_words[b] = w
    return assemble(psi, new_words, QG, new_labels)


def branch_state(p: BarPoint, s) -> dict:
    """Which word rule H(s, ·) uses for each branch of p ("marking", "segment", "target")."""
    s = Fraction(s)
    psi, _ = marking_bijection_fwd(p)
    stable = psi.tree
    out = {}
    for path, n in trees.iter_nodes(stable):
        leaf = isinstance(n, Leaf)
        if not path:
            out[Branch(n.leafset, "root")] = "marking"
            continue
        lo = trees.altitude(stable, path[:-1])
        hi = Fraction(1) if leaf else trees.altitude(stable, path)
        b = Branch(n.leafset, "leaf" if leaf else "internal")
        out[b] = "marking" if s < lo else ("segment" if s < hi else "target")
    return out


# ---------------------------------------------------------------- arities 0 and 1


def iso_arity1(p: BarPoint) -> Optional[MonoidBarWord]:
    """B(P⋊G)(1) ≅ BG₊: the chain of a one-leaf point as a BG word (None for *)."""
    if len(p.leafset) != 1:
        raise ValueError("iso_arity1 needs a point of arity 1")
    if p.is_base:
        return None
    psi, words = marking_bijection_fwd(p)
    return words[Branch(p.leafset, "root")]


def iso_arity1_inv(w: Optional[MonoidBarWord], QG: Semidirect, leaf=1) -> BarPoint:
    if w is None:
        return basepoint({leaf}, QG)
    if w.variant is not Variant.BG:
        raise ValueError("arity-one points correspond to BG words")
    psi = BarPoint(Leaf(leaf, Fraction(1)), frozenset({leaf}), QG.P)
    return assemble(psi, {Branch(frozenset({leaf}), "root"): w}, QG)


def iso_arity01(p: BarPoint):
    """Arity 0: the single point maps to None.  Arity 1: see ``iso_arity1``."""
    n = len(p.leafset)
    if n == 0:
        if not p.is_base:
            raise ValueError("arity-0 points are the basepoint")
        return None
    if n == 1:
        return iso_arity1(p)
    raise ValueError("iso_arity01 is only defined in arities 0 and 1")


def chain_point(labels, weights, QG: Semidirect, leaf=1) -> tuple:
    """A raw one-leaf chain over P⋊G with G labels bottom-up; returns (raw, BG word)."""
    node = Leaf(leaf, Fraction(weights[-1]))
    for g, w in zip(reversed(labels), reversed(weights[:-1])):
        node = trees.Vertex((node,), QG.unary(g), Fraction(w))
    word = MonoidBarWord(Variant.BG, tuple(Fraction(w) for w in weights), tuple(labels), None, None, QG.G)
    return node, word
