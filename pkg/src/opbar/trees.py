"""Leaf-labeled rooted trees, weightings, branches and (de)grafting.

A tree is a nested structure of :class:`Vertex` and :class:`Leaf` nodes.
Every node carries the weight of the edge directly below it, so an edge is
named by its upper endpoint and the root edge is the weight of the root node.
Children are always stored sorted by their least leaf label, which makes
structural equality coincide with equality of leaf-labeled trees.

The empty tree (one edge, no vertex) is ``Leaf(1)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Callable, Hashable, Iterator, Optional, Union

Label = Hashable
Path = tuple

ROOT_EDGE = ()


def label_key(x: Label) -> tuple:
    """Total order on leaf labels: integers first, then everything else by str."""
    if isinstance(x, int) and not isinstance(x, bool):
        return (0, x, "")
    return (1, 0, str(x))


@dataclass(frozen=True)
class Leaf:
    leaf: Label
    weight: Optional[Fraction] = None
    leafset: frozenset = field(init=False, repr=False, compare=False)
    key: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "leafset", frozenset((self.leaf,)))
        object.__setattr__(self, "key", label_key(self.leaf))


@dataclass(frozen=True)
class Vertex:
    children: tuple
    label: Any = None
    weight: Optional[Fraction] = None
    leafset: frozenset = field(init=False, repr=False, compare=False)
    key: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.children:
            raise ValueError("vertices of arity 0 are not allowed")
        sets = [c.leafset for c in self.children]
        leafset = frozenset().union(*sets)
        if len(leafset) != sum(len(s) for s in sets):
            raise ValueError("repeated leaf label")
        object.__setattr__(self, "leafset", leafset)
        object.__setattr__(self, "key", min(c.key for c in self.children))

    @property
    def arity(self) -> int:
        return len(self.children)


Node = Union[Leaf, Vertex]

EMPTY = Leaf(1)


@dataclass(frozen=True)
class Branch:
    """An edge of the underlying stable tree, identified by the leaves above it."""

    clade: frozenset
    position: str  # "root", "leaf" or "internal"

    @property
    def leaf(self) -> Label:
        if self.position != "leaf":
            raise ValueError("not a leaf branch")
        (x,) = self.clade
        return x


def sort_permutation(children) -> tuple:
    """sigma with sigma[k] = new 1-based position of old input k+1."""
    order = sorted(range(len(children)), key=lambda k: children[k].key)
    sigma = [0] * len(children)
    for new, old in enumerate(order):
        sigma[old] = new + 1
    return tuple(sigma)


def make_vertex(children, label=None, weight=None, relabel: Callable | None = None) -> Vertex:
    """Build a vertex with canonically sorted children.

    If sorting moves inputs, ``relabel(label, sigma)`` is applied so that the
    label still matches its inputs.
    """
    children = tuple(children)
    sigma = sort_permutation(children)
    if any(s != k + 1 for k, s in enumerate(sigma)):
        ordered = [None] * len(children)
        for k, s in enumerate(sigma):
            ordered[s - 1] = children[k]
        children = tuple(ordered)
        if relabel is not None:
            label = relabel(label, sigma)
    return Vertex(children, label, weight)


def iter_nodes(node: Node, path: Path = ()) -> Iterator[tuple]:
    """Preorder traversal yielding (path, node)."""
    yield path, node
    if isinstance(node, Vertex):
        for i, c in enumerate(node.children):
            yield from iter_nodes(c, path + (i,))


def vertices(node: Node) -> list:
    return [(p, n) for p, n in iter_nodes(node) if isinstance(n, Vertex)]


def node_at(root: Node, path: Path) -> Node:
    for i in path:
        root = root.children[i]
    return root


def replace_at(root: Node, path: Path, new: Node) -> Node:
    """Replace the subtree at ``path``; leaf sets above must be unchanged."""
    if not path:
        return new
    i = path[0]
    kids = list(root.children)
    kids[i] = replace_at(kids[i], path[1:], new)
    return Vertex(tuple(kids), root.label, root.weight)


def replace_sorted(root: Node, path: Path, new: Node, relabel: Callable | None = None) -> Node:
    """Replace the subtree at ``path`` and re-sort the vertices along the path.

    Subtrees off the path are assumed sorted already, so only the vertices
    whose leaf sets changed need their children reordered.
    """
    if not path:
        return new
    i = path[0]
    kids = list(root.children)
    kids[i] = replace_sorted(kids[i], path[1:], new, relabel)
    return make_vertex(kids, root.label, root.weight, relabel)


def leaves(node: Node) -> list:
    return sorted(node.leafset, key=label_key)


def is_stable(node: Node) -> bool:
    return all(n.arity >= 2 for _, n in vertices(node))


def with_weight(node: Node, weight) -> Node:
    return replace(node, weight=weight)


def strip_weights(node: Node) -> Node:
    if isinstance(node, Leaf):
        return Leaf(node.leaf)
    return Vertex(tuple(strip_weights(c) for c in node.children), node.label)


def strip_labels(node: Node) -> Node:
    if isinstance(node, Leaf):
        return node
    return Vertex(tuple(strip_labels(c) for c in node.children), None, node.weight)


def _add(a, b):
    if a is None or b is None:
        return None if a is None and b is None else (a or 0) + (b or 0)
    return a + b


def underlying_stable_tree(node: Node) -> Node:
    """Remove unary vertices, summing the weights along each removed chain.

    Labels of the remaining (stable) vertices are kept.  A one-leaf tree maps
    to the empty tree.
    """
    w = node.weight
    while isinstance(node, Vertex) and node.arity == 1:
        node = node.children[0]
        w = _add(w, node.weight)
    if isinstance(node, Leaf):
        return Leaf(node.leaf, w)
    return Vertex(tuple(underlying_stable_tree(c) for c in node.children), node.label, w)


def branches(node: Node) -> list:
    """One branch per edge of the underlying stable tree, root branch first."""
    stable = underlying_stable_tree(node)
    out = []
    for path, n in iter_nodes(stable):
        if not path:
            pos = "root"
        elif isinstance(n, Leaf):
            pos = "leaf"
        else:
            pos = "internal"
        out.append(Branch(n.leafset, pos))
    return out


def branch_weights(node: Node) -> dict:
    """Map each branch to its total weight."""
    stable = underlying_stable_tree(node)
    out = {}
    for path, n in iter_nodes(stable):
        pos = "root" if not path else ("leaf" if isinstance(n, Leaf) else "internal")
        out[Branch(n.leafset, pos)] = n.weight
    return out


def resort(node: Node, relabel: Callable | None = None) -> Node:
    """Re-establish the sorted-children invariant everywhere."""
    if isinstance(node, Leaf):
        return node
    kids = [resort(c, relabel) for c in node.children]
    return make_vertex(kids, node.label, node.weight, relabel)


def relabel_leaves(node: Node, mapping, relabel: Callable | None = None) -> Node:
    """Rename leaves through ``mapping`` (dict or callable) and re-sort."""
    get = mapping if callable(mapping) else mapping.__getitem__

    def go(n):
        if isinstance(n, Leaf):
            return Leaf(get(n.leaf), n.weight)
        return make_vertex([go(c) for c in n.children], n.label, n.weight, relabel)

    return go(node)


def graft(tA: Node, a: Label, tB: Node, relabel: Callable | None = None) -> Node:
    """Fuse the root edge of ``tB`` onto leaf ``a`` of ``tA``.

    The fused edge keeps the weight of leaf ``a`` plus the root weight of
    ``tB`` when both are weighted.
    """
    if a not in tA.leafset:
        raise KeyError(f"unknown leaf label {a!r}")
    if (tA.leafset - {a}) & tB.leafset:
        raise ValueError("leaf sets are not disjoint")

    def go(n):
        if isinstance(n, Leaf):
            if n.leaf == a:
                return with_weight(tB, _add(n.weight, tB.weight))
            return n
        if a not in n.leafset:
            return n
        return make_vertex([go(c) for c in n.children], n.label, n.weight, relabel)

    return go(tA)


def find_clade(node: Node, clade: frozenset) -> Optional[Path]:
    """Path of the lowest node whose leaf set is ``clade``, or None."""
    path = ()
    while True:
        if node.leafset == clade:
            return path
        if isinstance(node, Leaf):
            return None
        for i, c in enumerate(node.children):
            if clade <= c.leafset:
                node, path = c, path + (i,)
                break
        else:
            return None


def degraft_at(t: Node, A, a: Label, B, relabel: Callable | None = None) -> Optional[tuple]:
    """Split ``t`` as ``graft(tA, a, tB)``; None if ``t`` has no edge with clade B.

    Intended for stable trees, where the splitting edge is unique.
    """
    A, B = frozenset(A), frozenset(B)
    if a not in A or A & B:
        raise ValueError("invalid decomposition request")
    if t.leafset != (A - {a}) | B:
        raise ValueError("tree is not labeled by A ∪_a B")
    path = find_clade(t, B)
    if path is None:
        return None
    tB = node_at(t, path)
    if not path:
        return Leaf(a), tB
    tA = replace_sorted(t, path, Leaf(a), relabel)
    return tA, tB


def altitude(root: Node, path: Path) -> Fraction:
    """Sum of the weights on the edges below the node at ``path`` (inclusive)."""
    total = Fraction(0)
    node = root
    total += node.weight
    for i in path:
        node = node.children[i]
        total += node.weight
    return total


NOT_YET_ACTIVE = "not-yet-active"
ACTIVE = "active"
NO_LONGER_ACTIVE = "no-longer-active"


def edge_bounds(root: Node, path: Path) -> tuple:
    """(|v^E|, |v_E|) for the edge below the node at ``path``."""
    lo = Fraction(0) if not path else altitude(root, path[:-1])
    node = node_at(root, path)
    hi = Fraction(1) if isinstance(node, Leaf) else altitude(root, path)
    return lo, hi


def activity(root: Node, path: Path, s) -> str:
    """Three-way classification of the edge below ``path`` at time ``s``."""
    s = Fraction(s)
    if not 0 <= s <= 1:
        raise ValueError("s must lie in [0, 1]")
    lo, hi = edge_bounds(root, path)
    if s <= lo:
        return NOT_YET_ACTIVE
    if hi <= s:
        return NO_LONGER_ACTIVE
    return ACTIVE


def check_weighting(node: Node) -> list:
    """Problems with a weighting: missing/out-of-range weights or bad path sums."""
    problems = []

    def go(n, acc):
        w = n.weight
        if w is None:
            problems.append(f"missing weight at {n!r}")
            return
        if not isinstance(w, Fraction) or not 0 <= w <= 1:
            problems.append(f"weight {w!r} outside [0,1]")
        acc = acc + w
        if isinstance(n, Leaf):
            if acc != 1:
                problems.append(f"path to leaf {n.leaf!r} sums to {acc}")
        else:
            for c in n.children:
                go(c, acc)

    go(node, Fraction(0))
    return problems


def check_tree(node: Node) -> None:
    """Raise ValueError unless leaves are labeled 1..n (or node is a sub-tree)."""
    ls = node.leafset
    if ls != frozenset(range(1, len(ls) + 1)):
        raise ValueError(f"leaf labels {sorted(ls, key=label_key)} are not 1..n")


def map_labels(node: Node, f: Callable) -> Node:
    if isinstance(node, Leaf):
        return node
    return Vertex(tuple(map_labels(c, f) for c in node.children), f(node.label), node.weight)


def map_weights(node: Node, f: Callable) -> Node:
    if isinstance(node, Leaf):
        return Leaf(node.leaf, f(node.weight))
    return Vertex(tuple(map_weights(c, f) for c in node.children), node.label, f(node.weight))


def map_weights_preorder(node: Node, weights) -> Node:
    """Replace weights in preorder from the iterator ``weights``."""
    w = next(weights)
    if isinstance(node, Leaf):
        return Leaf(node.leaf, w)
    return Vertex(tuple(map_weights_preorder(c, weights) for c in node.children), node.label, w)


def shape_key(node: Node) -> Any:
    """Structure and labels without weights (hashable)."""
    if isinstance(node, Leaf):
        return ("leaf", node.leaf)
    return (repr(node.label), tuple(shape_key(c) for c in node.children))


def contract_edge(root: Node, path: Path, compose: Callable, relabel: Callable | None = None):
    """Contract the edge below the vertex at ``path`` into its parent.

    ``compose(x, i, y)`` gives the new parent label (may return a sentinel the
    caller checks).  The parent keeps its own weight.
    """
    if not path:
        raise ValueError("the root edge has no parent vertex")
    child = node_at(root, path)
    if not isinstance(child, Vertex):
        raise ValueError("can only contract edges between vertices")
    ppath, i = path[:-1], path[-1]
    parent = node_at(root, ppath)
    label = compose(parent.label, i + 1, child.label)
    kids = parent.children[:i] + child.children + parent.children[i + 1:]
    new = make_vertex(kids, label, parent.weight, relabel)
    return replace_at(root, ppath, new), label


# ---------------------------------------------------------------- JSON


def fraction_to_json(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def fraction_from_json(s) -> Fraction:
    if isinstance(s, bool):
        raise ValueError("boolean is not a weight")
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, str):
        return Fraction(s.strip())
    raise ValueError(f"weight must be a 'num/den' string, got {s!r}")


def tree_to_json(node: Node, encode_label: Callable = lambda x: x) -> dict:
    if isinstance(node, Leaf):
        out = {"leaf": node.leaf}
    else:
        out = {"children": [tree_to_json(c, encode_label) for c in node.children]}
        if node.label is not None:
            out["label"] = encode_label(node.label)
    if node.weight is not None:
        out["weight"] = fraction_to_json(node.weight)
    return out


def tree_from_json(obj, decode_label: Callable = lambda x: x, relabel: Callable | None = None) -> Node:
    if not isinstance(obj, dict):
        raise ValueError(f"tree node must be an object, got {obj!r}")
    w = fraction_from_json(obj["weight"]) if "weight" in obj else None
    if "leaf" in obj:
        if "children" in obj:
            raise ValueError("a node cannot be both a leaf and a vertex")
        return Leaf(obj["leaf"], w)
    kids = obj.get("children")
    if not isinstance(kids, list) or not kids:
        raise ValueError("vertex needs a nonempty 'children' list")
    label = decode_label(obj["label"]) if "label" in obj else None
    return make_vertex([tree_from_json(c, decode_label, relabel) for c in kids], label, w, relabel)
