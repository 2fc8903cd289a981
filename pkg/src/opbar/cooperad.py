"""Degrafting structure maps B(Q)(A ∪_a B) → B(Q)(A) ∧ B(Q)(B).

Degrafting cuts the branch whose clade is B.  The lower piece keeps the
branch as its leaf branch at ``a``, rescaled so that paths sum to one; the
upper piece is rescaled proportionally and keeps the branch as its root
branch.  The unary labels of the cut branch are therefore duplicated.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import trees
from .barpoints import BarPoint, basepoint, normalize
from .trees import Leaf, Vertex


@dataclass(frozen=True)
class DecompositionRequest:
    A: frozenset
    a: object
    B: frozenset

    def __post_init__(self):
        object.__setattr__(self, "A", frozenset(self.A))
        object.__setattr__(self, "B", frozenset(self.B))
        if not self.A or not self.B:
            raise ValueError("A and B must be nonempty")
        if self.a not in self.A:
            raise ValueError("a must belong to A")
        if self.A & self.B:
            raise ValueError("A and B must be disjoint")

    @property
    def target(self) -> frozenset:
        return (self.A - {self.a}) | self.B


def base_pair(req: DecompositionRequest, Q=None) -> tuple:
    return basepoint(req.A, Q), basepoint(req.B, Q)


def smash(x, y, req: DecompositionRequest, Q=None) -> tuple:
    """A pair with basepoint absorption."""
    if x.is_base or y.is_base:
        return base_pair(req, Q)
    return x, y


def _split(node, req: DecompositionRequest, Q):
    """Cut at the lowest node with clade B.  Returns raw (tA, tB) or None."""
    path = trees.find_clade(node, req.B)
    if path is None:
        return None
    bottom = trees.node_at(node, path)
    lo = trees.altitude(node, path[:-1]) if path else Fraction(0)
    chain, top = [], bottom
    while isinstance(top, Vertex) and top.arity == 1:
        chain.append(top)
        top = top.children[0]
    length = sum(c.weight for c in chain) + top.weight
    if length == 0:
        return None
    rest = 1 - lo
    # lower piece: the chain of E rescaled to total weight 1 - lo, topped by leaf a
    f = rest / length
    stub = Leaf(req.a, top.weight * f)
    for c in reversed(chain):
        stub = Vertex((stub,), c.label, c.weight * f)
    tA = stub if not path else trees.replace_sorted(node, path, stub, Q.relabel)
    tB = trees.map_weights(bottom, lambda w: w / rest)
    return tA, tB


def decompose_raw(raw, req: DecompositionRequest, Q) -> tuple:
    """Decompose a raw representative and normalize both pieces."""
    if raw.leafset != req.target:
        raise ValueError("point is not labeled by A ∪_a B")
    cut = _split(raw, req, Q)
    if cut is None:
        return base_pair(req, Q)
    tA, tB = cut
    return smash(normalize(tA, Q, validate=False), normalize(tB, Q, validate=False), req, Q)


def _decompose_canonical(tree, req: DecompositionRequest, Q) -> tuple:
    # both pieces of a canonical tree are canonical: no weight becomes zero
    # and no label changes, so normalization is skipped
    cut = _split(tree, req, Q)
    if cut is None:
        return base_pair(req, Q)
    tA, tB = cut
    return BarPoint(tA, req.A, Q), BarPoint(tB, req.B, Q)


def decompose(p: BarPoint, req: DecompositionRequest) -> tuple:
    """The cooperad structure map on a canonical point."""
    Q = p.operad
    if p.leafset != req.target:
        raise ValueError("point is not labeled by A ∪_a B")
    if p.is_base:
        return base_pair(req, Q)
    return _decompose_canonical(p.tree, req, Q)


def requests_for(leafset, fresh="a") -> list:
    """All decomposition requests whose target is ``leafset``, with a fresh ``a``."""
    ls = sorted(leafset, key=trees.label_key)
    out = []
    for r in range(1, len(ls) + 1):
        for B in itertools.combinations(ls, r):
            rest = frozenset(ls) - set(B)
            out.append(DecompositionRequest(rest | {fresh}, fresh, frozenset(B)))
    return out


# ---------------------------------------------------------------- coassociativity


@dataclass(frozen=True)
class NestedRequest:
    """Two composable degraftings.

    ``sequential``: labels (A−a) ∪ (B−b) ∪ C, with C grafted into B at b and
    B into A at a.  ``parallel``: labels (A−a−c) ∪ B ∪ C, with B and C grafted
    into A at a and at c.
    """

    kind: str
    A: frozenset
    a: object
    B: frozenset
    b_or_c: object
    C: frozenset

    def routes(self) -> tuple:
        A, a, B, x, C = self.A, self.a, self.B, self.b_or_c, self.C
        if self.kind == "sequential":
            b = x
            first1 = DecompositionRequest(A, a, (B - {b}) | C)
            second1 = DecompositionRequest(B, b, C)
            first2 = DecompositionRequest((A - {a}) | B, b, C)
            second2 = DecompositionRequest(A, a, B)
            return (first1, second1), (first2, second2)
        c = x
        first1 = DecompositionRequest((A - {c}) | C, a, B)
        second1 = DecompositionRequest(A, c, C)
        first2 = DecompositionRequest((A - {a}) | B, c, C)
        second2 = DecompositionRequest(A, a, B)
        return (first1, second1), (first2, second2)


def nested_requests(leafset, a="a", x="b") -> list:
    """Every sequential and parallel nesting over ``leafset`` with fresh labels."""
    ls = sorted(leafset, key=trees.label_key)
    out = []
    for assign in itertools.product(range(3), repeat=len(ls)):
        R = frozenset(l for l, k in zip(ls, assign) if k == 0)
        X = frozenset(l for l, k in zip(ls, assign) if k == 1)
        C = frozenset(l for l, k in zip(ls, assign) if k == 2)
        if C:
            out.append(NestedRequest("sequential", R | {a}, a, X | {x}, x, C))
        if X and C:
            out.append(NestedRequest("parallel", R | {a, x}, a, X, x, C))
    return out


def iterated(p: BarPoint, nested: NestedRequest, decompose=decompose) -> tuple:
    """Both iterated decompositions as (A, B, C)-factor triples."""
    (f1, s1), (f2, s2) = nested.routes()
    Q = p.operad
    if nested.kind == "sequential":
        pa, pbc = decompose(p, f1)
        pb, pc = decompose(pbc, s1)
        pab, pc2 = decompose(p, f2)
        pa2, pb2 = decompose(pab, s2)
    else:
        pac, pb = decompose(p, f1)
        pa, pc = decompose(pac, s1)
        pab, pc2 = decompose(p, f2)
        pa2, pb2 = decompose(pab, s2)
    return _absorb((pa, pb, pc), Q), _absorb((pa2, pb2, pc2), Q)


def _absorb(triple, Q):
    if any(x.is_base for x in triple):
        return tuple(basepoint(x.leafset, Q) for x in triple)
    return triple


def check_coassociativity(p: BarPoint, nested: NestedRequest, decompose=decompose) -> bool:
    one, two = iterated(p, nested, decompose)
    return one == two


def memo_decompose():
    """A caching ``decompose`` for checking many nestings of one point.

    Entries are keyed by object identity, which is safe because the cache
    keeps every argument alive.
    """
    cache = {}

    def dec(p: BarPoint, req: DecompositionRequest) -> tuple:
        key = (id(p), req)
        hit = cache.get(key)
        if hit is None:
            hit = cache[key] = (p, decompose(p, req))
        return hit[1]

    return dec


# ---------------------------------------------------------------- equivariant


def decompose_equivariant(x, req: DecompositionRequest) -> tuple:
    """[ζ ∧ ψ] ↦ ([ζ ∧ ψ_A], [ζ ∧ ψ_B]) via the diagonal of EG."""
    from .equivalence import EquivariantPoint, canonicalize_equivariant, equivariant_basepoint

    P = x.psi.operad
    if x.is_base:
        return equivariant_basepoint(req.A, P), equivariant_basepoint(req.B, P)
    pa, pb = decompose(x.psi, req)
    if pa.is_base:
        return equivariant_basepoint(req.A, P), equivariant_basepoint(req.B, P)
    return canonicalize_equivariant(x.zeta, pa), canonicalize_equivariant(x.zeta, pb)
