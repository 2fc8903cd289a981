"""Finite pointed operads, finite groups, the semi-direct product and L, R.

Operads here are sets of elements per arity with a basepoint ``BASE`` that
absorbs every composition.  Elements are plain hashable Python values; the
meaning of ``relabel(x, sigma)`` is fixed throughout the package: old input
``k`` of ``x`` becomes input ``sigma[k-1]`` of the result.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Optional

from . import trees
from .trees import Leaf, Vertex


class _Basepoint:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "*"

    def __reduce__(self):
        return (_Basepoint, ())


BASE = _Basepoint()


def identity_perm(n: int) -> tuple:
    return tuple(range(1, n + 1))


def compose_perms(first, then) -> tuple:
    """The permutation 'apply ``first``, then ``then``' in relabel convention."""
    return tuple(then[k - 1] for k in first)


def invert_perm(sigma) -> tuple:
    inv = [0] * len(sigma)
    for k, s in enumerate(sigma):
        inv[s - 1] = k + 1
    return tuple(inv)


def adjacent_transpositions(n: int):
    for j in range(1, n):
        s = list(range(1, n + 1))
        s[j - 1], s[j] = s[j], s[j - 1]
        yield tuple(s)


def block_permutation(sigma, i: int, tau) -> tuple:
    """The permutation induced on x∘ᵢy by sigma on x and tau on y."""
    n, m = len(sigma), len(tau)
    si = sigma[i - 1]
    out = []
    for j in range(1, n + m):
        if j < i:
            p = sigma[j - 1]
            out.append(p if p < si else p + m - 1)
        elif j < i + m:
            out.append(si - 1 + tau[j - i])
        else:
            p = sigma[j - m]
            out.append(p if p < si else p + m - 1)
    return tuple(out)


# ---------------------------------------------------------------- groups


class GroupSpec:
    """A finite group given by a multiplication table."""

    def __init__(self, name: str, elements: Iterable, mult: dict, identity):
        self.name = name
        self.elements = list(elements)
        self._mult = dict(mult)
        self.identity = identity
        self._inv = {}
        for g in self.elements:
            for h in self.elements:
                if self._mult.get((g, h)) == identity:
                    self._inv[g] = h
                    break
        self._index = {g: k for k, g in enumerate(self.elements)}

    def __repr__(self):
        return f"GroupSpec({self.name!r})"

    def __eq__(self, other):
        return isinstance(other, GroupSpec) and (self.name, self.elements) == (other.name, other.elements)

    def __hash__(self):
        return hash(self.name)

    @property
    def order(self) -> int:
        return len(self.elements)

    def mul(self, g, h):
        return self._mult[g, h]

    def inv(self, g):
        return self._inv[g]

    def prod(self, gs, start=None):
        acc = self.identity if start is None else start
        for g in gs:
            acc = self._mult[acc, g]
        return acc

    def __contains__(self, g):
        try:
            return g in self._index
        except TypeError:
            return False

    def sort_key(self, g):
        return self._index[g]

    def check_axioms(self) -> list:
        problems = []
        els = self.elements
        e = self.identity
        if e not in self:
            return [f"identity {e!r} is not an element"]
        for g in els:
            for h in els:
                if self._mult.get((g, h)) not in self:
                    problems.append(f"product {g!r}*{h!r} missing or outside the group")
        if problems:
            return problems
        for g in els:
            if self.mul(e, g) != g or self.mul(g, e) != g:
                problems.append(f"identity law fails at {g!r}")
            if g not in self._inv or self.mul(g, self._inv[g]) != e:
                problems.append(f"{g!r} has no two-sided inverse")
        for g, h, k in itertools.product(els, repeat=3):
            if self.mul(self.mul(g, h), k) != self.mul(g, self.mul(h, k)):
                problems.append(f"associativity fails at ({g!r}, {h!r}, {k!r})")
        return problems

    def to_json(self, g):
        return g

    def from_json(self, obj):
        if isinstance(obj, list):
            obj = tuple(obj)
        if obj not in self:
            raise ValueError(f"{obj!r} is not an element of {self.name}")
        return obj

    def table_json(self) -> dict:
        return {
            "name": self.name,
            "identity": self.identity,
            "elements": list(self.elements),
            "mult": [[self.mul(g, h) for h in self.elements] for g in self.elements],
        }

    @classmethod
    def from_table(cls, obj: dict) -> "GroupSpec":
        els = list(obj["elements"])
        rows = obj["mult"]
        if len(rows) != len(els) or any(len(r) != len(els) for r in rows):
            raise ValueError("group table must be square over the element list")
        mult = {(g, h): rows[i][j] for i, g in enumerate(els) for j, h in enumerate(els)}
        return cls(obj.get("name", "G"), els, mult, obj.get("identity", els[0]))


def cyclic(k: int) -> GroupSpec:
    if k < 1:
        raise ValueError("cyclic group order must be positive")
    els = list(range(k))
    return GroupSpec(f"Z/{k}", els, {(a, b): (a + b) % k for a in els for b in els}, 0)


def symmetric3() -> GroupSpec:
    """S3 as permutations of (0, 1, 2); a small nonabelian group."""
    perms = list(itertools.permutations(range(3)))
    names = {p: "".join(map(str, p)) for p in perms}
    mult = {}
    for p in perms:
        for q in perms:
            mult[names[p], names[q]] = names[tuple(p[q[i]] for i in range(3))]
    return GroupSpec("S3", [names[p] for p in perms], mult, "012")


def trivial_group() -> GroupSpec:
    return GroupSpec("1", [0], {(0, 0): 0}, 0)


# ---------------------------------------------------------------- operads


class OperadSpec:
    """Base class: subclasses provide elements, arity and ``_compose``."""

    name = "Q"
    unit: Any = None
    max_arity = 6
    finite = True
    acting_group: Optional[GroupSpec] = None  # None: trivial action of any group

    def __init__(self):
        self._elements_cache = {}

    def __repr__(self):
        return f"<operad {self.name}>"

    # structure -------------------------------------------------------
    def elements(self, n: int) -> list:
        if n not in self._elements_cache:
            self._elements_cache[n] = [] if n <= 0 else list(self._elements(n))
        return self._elements_cache[n]

    def _elements(self, n):
        raise NotImplementedError

    def arity(self, x) -> int:
        raise NotImplementedError

    def compose(self, x, i: int, y):
        if x is BASE or y is BASE:
            return BASE
        return self._compose(x, i, y)

    def _compose(self, x, i, y):
        raise NotImplementedError

    def relabel(self, x, sigma):
        if x is BASE or all(s == k + 1 for k, s in enumerate(sigma)):
            return x
        return self._relabel(x, tuple(sigma))

    def _relabel(self, x, sigma):
        return x

    def act(self, g, x):
        if x is BASE:
            return BASE
        return self._act(g, x)

    def _act(self, g, x):
        return x

    def augment(self, m) -> bool:
        """Arity-one augmentation to S⁰: True for the non-base point."""
        return m is not BASE

    def is_unit(self, x) -> bool:
        return x == self.unit

    def contains(self, x, n: int) -> bool:
        if x is BASE:
            return True
        try:
            return self.arity(x) == n and x in self.elements(n)
        except (TypeError, ValueError):
            return False

    @property
    def reduced(self) -> bool:
        return self.elements(1) == [self.unit]

    @property
    def strongly_augmented(self) -> bool:
        return all(self.augment(m) for m in self.elements(1))

    def random_element(self, n: int, rng):
        els = self.elements(n)
        if not els:
            raise ValueError(f"{self.name} has no non-base element of arity {n}")
        return rng.choice(els)

    def has_arity(self, n: int) -> bool:
        return bool(self.elements(n))

    def sort_key(self, x):
        return repr(x)

    # serialization ---------------------------------------------------
    def to_json(self, x):
        if x is BASE:
            return "*"
        return self._to_json(x)

    def from_json(self, obj):
        if obj == "*":
            return BASE
        return self._from_json(obj)

    def _to_json(self, x):
        return x

    def _from_json(self, obj):
        for n in range(1, self.max_arity + 1):
            if obj in self.elements(n):
                return obj
        raise ValueError(f"{obj!r} is not an element of {self.name}")


class TrivialOperad(OperadSpec):
    """I: the unit alone in arity one."""

    name = "I"
    unit = "id"

    def _elements(self, n):
        return ["id"] if n == 1 else []

    def arity(self, x):
        if x != "id":
            raise ValueError(f"{x!r} is not in I")
        return 1

    def _compose(self, x, i, y):
        return "id"


class ComPlus(OperadSpec):
    """Com₊: one point c_n in each positive arity; element = n."""

    name = "Com+"
    unit = 1

    def _elements(self, n):
        return [n]

    def arity(self, x):
        if not isinstance(x, int) or isinstance(x, bool) or x < 1:
            raise ValueError(f"{x!r} is not in Com+")
        return x

    def _compose(self, x, i, y):
        return x + y - 1

    def _to_json(self, x):
        return f"c{x}"

    def _from_json(self, obj):
        if isinstance(obj, str) and obj.startswith("c") and obj[1:].isdigit() and int(obj[1:]) >= 1:
            return int(obj[1:])
        raise ValueError(f"{obj!r} is not an element of Com+ (expected 'c<n>')")


class AssPlus(OperadSpec):
    """Ass₊: total orders on the inputs, stored as words (w₁, …, wₙ)."""

    name = "Ass+"
    unit = (1,)
    max_arity = 5

    def _elements(self, n):
        return list(itertools.permutations(range(1, n + 1)))

    def arity(self, x):
        return len(x)

    def _compose(self, x, i, y):
        m = len(y)
        out = []
        for w in x:
            if w == i:
                out.extend(v + i - 1 for v in y)
            elif w > i:
                out.append(w + m - 1)
            else:
                out.append(w)
        return tuple(out)

    def _relabel(self, x, sigma):
        return tuple(sigma[w - 1] for w in x)

    def _to_json(self, x):
        return list(x)

    def _from_json(self, obj):
        if isinstance(obj, list) and sorted(obj) == list(range(1, len(obj) + 1)) and obj:
            return tuple(obj)
        raise ValueError(f"{obj!r} is not an element of Ass+ (expected a permutation word)")


class SignOperad(OperadSpec):
    """Two signed points (n, ±1) per arity n ≥ 2 and the unit (1, +1).

    x∘ᵢy carries the sign of x; a group element acts by flipping every sign
    when ``parity(g)`` is odd.
    """

    name = "Sign"
    unit = (1, 1)

    def __init__(self, group: GroupSpec | None = None, parity: Callable | None = None):
        super().__init__()
        self.acting_group = group or cyclic(2)
        self.parity = parity or (lambda g: g % 2)

    def _elements(self, n):
        return [(1, 1)] if n == 1 else [(n, 1), (n, -1)]

    def arity(self, x):
        return x[0]

    def _compose(self, x, i, y):
        if x[0] == 1:
            return y
        return (x[0] + y[0] - 1, x[1])

    def _act(self, g, x):
        if x[0] >= 2 and self.parity(g) % 2:
            return (x[0], -x[1])
        return x

    def _to_json(self, x):
        if x == (1, 1):
            return "id"
        return f"{'+' if x[1] > 0 else '-'}{x[0]}"

    def _from_json(self, obj):
        if obj == "id":
            return (1, 1)
        if isinstance(obj, str) and len(obj) > 1 and obj[0] in "+-" and obj[1:].isdigit() and int(obj[1:]) >= 2:
            return (int(obj[1:]), 1 if obj[0] == "+" else -1)
        raise ValueError(f"{obj!r} is not an element of Sign (expected 'id', '+n' or '-n')")


class FreeOperad(OperadSpec):
    """Free operad on symmetric generators; elements are stable labeled trees.

    Leaves of an element tree are the inputs 1..n.  The unit is the empty
    tree.  ``action(g, name)`` optionally lets a group permute generators.
    """

    finite = False

    def __init__(self, signature: dict, group: GroupSpec | None = None, action: Callable | None = None, name="Free"):
        super().__init__()
        if any(a < 2 for a in signature.values()):
            raise ValueError("free generators must have arity at least 2")
        self.signature = dict(signature)
        self.name = name
        self.unit = Leaf(1)
        self.acting_group = group
        self._action = action

    def _elements(self, n):
        raise ValueError("the free operad is infinite; elements are not enumerated")

    def elements(self, n):
        if n == 1:
            return [self.unit]
        if n <= 0:
            return []
        raise ValueError("the free operad is infinite; elements are not enumerated")

    def has_arity(self, n):
        reachable = {1}
        for k in range(2, n + 1):
            for a in set(self.signature.values()):
                sums = {0}
                for _ in range(a):
                    sums = {s + r for s in sums for r in reachable if s + r <= k}
                if k in sums:
                    reachable.add(k)
                    break
        return n in reachable

    def arity(self, x):
        return len(x.leafset)

    def contains(self, x, n):
        if x is BASE:
            return True
        if not isinstance(x, (Leaf, Vertex)) or x.leafset != frozenset(range(1, n + 1)):
            return False
        if isinstance(x, Leaf):
            return True
        return all(v.label in self.signature and v.arity == self.signature[v.label] for _, v in trees.vertices(x))

    def _compose(self, x, i, y):
        m = len(y.leafset)
        shifted = trees.relabel_leaves(x, lambda j: j if j < i else (("hole",) if j == i else j + m - 1))
        inner = trees.relabel_leaves(y, lambda j: j + i - 1)
        return trees.graft(shifted, ("hole",), inner)

    def _relabel(self, x, sigma):
        return trees.relabel_leaves(x, lambda j: sigma[j - 1])

    def _act(self, g, x):
        if self._action is None:
            return x
        return trees.map_labels(x, lambda name: self._action(g, name))

    def random_element(self, n, rng):
        if n == 1:
            return self.unit
        arities = sorted(set(self.signature.values()))
        names = sorted(self.signature)

        def build(labels):
            if len(labels) == 1:
                return Leaf(labels[0])
            choices = [a for a in arities if a <= len(labels)]
            a = rng.choice(choices)
            rng.shuffle(labels)
            cuts = sorted(rng.sample(range(1, len(labels)), a - 1))
            parts = [labels[s:e] for s, e in zip([0] + cuts, cuts + [len(labels)])]
            gen = rng.choice([g for g in names if self.signature[g] == a])
            return trees.make_vertex([build(list(p)) for p in parts], gen)

        for _ in range(100):
            try:
                t = build(list(range(1, n + 1)))
            except (ValueError, IndexError):
                continue
            if all(v.arity == self.signature[v.label] for _, v in trees.vertices(t)):
                return t
        raise ValueError(f"could not build a free element of arity {n}")

    def sort_key(self, x):
        return json.dumps(trees.tree_to_json(x), sort_keys=True)

    def _to_json(self, x):
        return trees.tree_to_json(x)

    def _from_json(self, obj):
        t = trees.tree_from_json(obj)
        if not self.contains(t, len(t.leafset)):
            raise ValueError("not an element of the free operad")
        return t


class TableOperad(OperadSpec):
    """An operad given by explicit finite tables (see ``from_table``)."""

    def __init__(self, name, elements: dict, unit, compose: dict, sym: dict, act: dict,
                 augment: dict, group: GroupSpec | None, max_arity: int):
        super().__init__()
        self.name = name
        self._els = {n: list(v) for n, v in elements.items()}
        self._arity = {x: n for n, v in self._els.items() for x in v}
        self.unit = unit
        self._compose_table = compose
        self._sym = sym
        self._act_table = act
        self._augment = augment
        self.acting_group = group
        self.max_arity = max_arity

    def _elements(self, n):
        return self._els.get(n, [])

    def arity(self, x):
        if x not in self._arity:
            raise ValueError(f"{x!r} is not an element of {self.name}")
        return self._arity[x]

    def _compose(self, x, i, y):
        try:
            return self._compose_table[x, i, y]
        except KeyError:
            raise KeyError(f"composition {x}∘{i}{y} missing from table") from None

    def _relabel(self, x, sigma):
        return self._sym.get((x, sigma), x)

    def _act(self, g, x):
        return self._act_table.get((g, x), x)

    def augment(self, m):
        return m is not BASE and self._augment.get(m, True)

    @classmethod
    def from_table(cls, obj: dict) -> "TableOperad":
        def el(v):
            return BASE if v == "*" else v

        try:
            elements = {int(k): list(v) for k, v in obj["elements"].items()}
            group = GroupSpec.from_table(obj["group"]) if "group" in obj else None
            compose = {(x, int(i), y): el(z) for x, i, y, z in obj.get("compose", [])}
            sym = {(x, tuple(p)): el(y) for x, p, y in obj.get("sym", [])}
            act = {(g, x): el(y) for g, x, y in obj.get("act", [])}
            augment = {k: bool(v) for k, v in obj.get("augment", {}).items()}
            max_arity = int(obj.get("max_arity", max(elements) if elements else 1))
            return cls(obj.get("name", "table"), elements, obj["unit"], compose, sym, act, augment, group, max_arity)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed operad table: {exc!r}") from None

    def table_json(self) -> dict:
        out = {
            "name": self.name,
            "max_arity": self.max_arity,
            "unit": self.unit,
            "elements": {str(n): v for n, v in sorted(self._els.items())},
            "compose": [[x, i, y, "*" if z is BASE else z] for (x, i, y), z in self._compose_table.items()],
            "sym": [[x, list(p), "*" if y is BASE else y] for (x, p), y in self._sym.items()],
            "act": [[g, x, "*" if y is BASE else y] for (g, x), y in self._act_table.items()],
            "augment": self._augment,
        }
        if self.acting_group is not None:
            out["group"] = self.acting_group.table_json()
        return out


def tabulate(Q: OperadSpec, max_arity: int | None = None) -> TableOperad:
    """Copy a finite operad (with string-encoded elements) into a table."""
    top = max_arity or Q.max_arity
    enc = {}
    for n in range(1, top + 1):
        for x in Q.elements(n):
            enc[x] = json.dumps(Q.to_json(x), sort_keys=True)
    elements = {n: [enc[x] for x in Q.elements(n)] for n in range(1, top + 1) if Q.elements(n)}
    compose, sym, act = {}, {}, {}
    for n in range(1, top + 1):
        for m in range(1, top - n + 2):
            for x in Q.elements(n):
                for y in Q.elements(m):
                    for i in range(1, n + 1):
                        z = Q.compose(x, i, y)
                        compose[enc[x], i, enc[y]] = BASE if z is BASE else enc[z]
        for x in Q.elements(n):
            for sigma in itertools.permutations(range(1, n + 1)):
                y = Q.relabel(x, sigma)
                if y != x:
                    sym[enc[x], sigma] = enc[y]
            if Q.acting_group is not None:
                for g in Q.acting_group.elements:
                    y = Q.act(g, x)
                    if y != x:
                        act[g, enc[x]] = enc[y]
    augment = {enc[m]: Q.augment(m) for m in Q.elements(1)}
    return TableOperad(Q.name, elements, enc[Q.unit], compose, sym, act, augment, Q.acting_group, top)


class Semidirect(OperadSpec):
    """P⋊G with elements (p, (g₁, …, gₙ)).

    (a; g)∘ᵢ(b; h) = (a ∘ᵢ gᵢ·b; g₁…gᵢ₋₁, gᵢh₁…gᵢhₘ, gᵢ₊₁…gₙ).
    """

    def __init__(self, P: OperadSpec, G: GroupSpec, max_arity: int | None = None):
        super().__init__()
        if not P.reduced:
            raise ValueError(f"{P.name} is not reduced")
        if P.acting_group is not None and P.acting_group != G:
            raise ValueError(f"{P.name} is a {P.acting_group.name}-operad, not a {G.name}-operad")
        self.P, self.G = P, G
        self.name = f"{P.name}⋊{G.name}"
        self.unit = (P.unit, (G.identity,))
        self.max_arity = max_arity or min(P.max_arity, 5)
        self.finite = P.finite

    def _elements(self, n):
        return [(p, gs) for p in self.P.elements(n) for gs in itertools.product(self.G.elements, repeat=n)]

    def arity(self, x):
        return len(x[1])

    def contains(self, x, n):
        if x is BASE:
            return True
        try:
            p, gs = x
            return len(gs) == n and self.P.contains(p, n) and all(g in self.G for g in gs)
        except (TypeError, ValueError):
            return False

    def _compose(self, x, i, y):
        (a, g), (b, h) = x, y
        gi = g[i - 1]
        c = self.P.compose(a, i, self.P.act(gi, b))
        if c is BASE:
            return BASE
        mul = self.G.mul
        return (c, g[:i - 1] + tuple(mul(gi, hj) for hj in h) + g[i:])

    def _relabel(self, x, sigma):
        p, gs = x
        new = [None] * len(gs)
        for k, s in enumerate(sigma):
            new[s - 1] = gs[k]
        return (self.P.relabel(p, sigma), tuple(new))

    def augment(self, m):
        return m is not BASE

    def random_element(self, n, rng):
        return (self.P.random_element(n, rng), tuple(rng.choice(self.G.elements) for _ in range(n)))

    def has_arity(self, n):
        return self.P.has_arity(n)

    def sort_key(self, x):
        return (self.P.sort_key(x[0]), tuple(self.G.sort_key(g) for g in x[1]))

    def _to_json(self, x):
        return {"p": self.P.to_json(x[0]), "g": [self.G.to_json(g) for g in x[1]]}

    def _from_json(self, obj):
        if not isinstance(obj, dict) or set(obj) != {"p", "g"} or not isinstance(obj["g"], list):
            raise ValueError(f"{obj!r} is not a semi-direct element (expected {{'p', 'g'}})")
        p = self.P.from_json(obj["p"])
        gs = tuple(self.G.from_json(g) for g in obj["g"])
        if p is BASE:
            return BASE
        if self.P.arity(p) != len(gs):
            raise ValueError("arity of p does not match the number of group labels")
        return (p, gs)

    def pure(self, p):
        """(p; e, …, e)."""
        return (p, (self.G.identity,) * self.P.arity(p))

    def unary(self, g):
        return (self.P.unit, (g,))


def semidirect(P: OperadSpec, G: GroupSpec, max_arity: int | None = None) -> Semidirect:
    return Semidirect(P, G, max_arity)


class ReducedR(OperadSpec):
    """R(Q): arity one replaced by the unit alone, everything else unchanged."""

    def __init__(self, Q: OperadSpec):
        super().__init__()
        self.Q = Q
        self.name = f"R({Q.name})"
        self.unit = Q.unit
        self.max_arity = Q.max_arity
        self.finite = Q.finite
        self.acting_group = Q.acting_group

    def elements(self, n):
        return [self.unit] if n == 1 else self.Q.elements(n)

    def arity(self, x):
        return self.Q.arity(x)

    def contains(self, x, n):
        if n == 1:
            return x is BASE or x == self.unit
        return self.Q.contains(x, n)

    def _compose(self, x, i, y):
        return self.Q.compose(x, i, y)

    def _relabel(self, x, sigma):
        return self.Q.relabel(x, sigma)

    def _act(self, g, x):
        return self.Q.act(g, x)

    def random_element(self, n, rng):
        return self.unit if n == 1 else self.Q.random_element(n, rng)

    def has_arity(self, n):
        return n == 1 or self.Q.has_arity(n)

    def sort_key(self, x):
        return self.Q.sort_key(x)

    def _to_json(self, x):
        return self.Q.to_json(x)

    def _from_json(self, obj):
        return self.Q.from_json(obj)


def reduce_R(Q: OperadSpec) -> OperadSpec:
    return ReducedR(Q)


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        root = x
        while self.parent.get(root, root) != root:
            root = self.parent[root]
        while x != root:
            self.parent[x], x = root, self.parent.get(x, x)
        return root

    def union(self, x, y, key) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if key(ry) < key(rx):
            rx, ry = ry, rx
        self.parent[ry] = rx
        return True


class QuotientL(OperadSpec):
    """L(Q): the quotient forcing every arity-one element to act as the unit.

    Computed on arities 1..max_arity as the smallest operad congruence
    containing q∘ᵢm ~ q and m∘₁q ~ q for non-base m in Q(1).
    """

    def __init__(self, Q: OperadSpec, max_arity: int | None = None):
        super().__init__()
        if not Q.finite:
            raise ValueError("L is only computed for finite operads")
        if not Q.strongly_augmented:
            raise ValueError(f"{Q.name} is not strongly augmented")
        self.Q = Q
        self.name = f"L({Q.name})"
        self.unit = Q.unit
        self.max_arity = max_arity or min(Q.max_arity, 4)
        self.acting_group = Q.acting_group
        self._uf = _UnionFind()
        self._close()

    def _key(self, x):
        if x is BASE:
            return (0, 0, "")
        return (1, self.Q.arity(x), self.Q.sort_key(x))

    def _close(self):
        Q, uf, top = self.Q, self._uf, self.max_arity
        units = Q.elements(1)
        all_els = {n: Q.elements(n) for n in range(1, top + 1)}
        pending = []
        for n, els in all_els.items():
            for q in els:
                for m in units:
                    for i in range(1, n + 1):
                        pending.append((Q.compose(q, i, m), q))
                    pending.append((Q.compose(m, 1, q), q))
        for a, b in pending:
            uf.union(a, b, self._key)
        changed = True
        while changed:
            changed = False
            for n, els in all_els.items():
                for x in els:
                    r = uf.find(x)
                    if r == x:
                        continue
                    if r is BASE:
                        images = self._images(x, None, all_els)
                        for img in images:
                            changed |= uf.union(img, BASE, self._key)
                        continue
                    for a, b in zip(self._images(x, None, all_els), self._images(r, x, all_els)):
                        changed |= uf.union(a, b, self._key)

    def _images(self, x, _, all_els):
        """All one-step structure-map images of x in a fixed order."""
        Q, top = self.Q, self.max_arity
        n = Q.arity(x)
        out = []
        for m in range(1, top - n + 2):
            for y in all_els.get(m, []):
                for i in range(1, n + 1):
                    out.append(Q.compose(x, i, y))
        for k in range(1, top - 1 + 1):
            if k + n - 1 > top:
                break
            for y in all_els.get(k, []):
                for i in range(1, k + 1):
                    out.append(Q.compose(y, i, x))
        for sigma in adjacent_transpositions(n):
            out.append(Q.relabel(x, sigma))
        if Q.acting_group is not None:
            for g in Q.acting_group.elements:
                out.append(Q.act(g, x))
        return out

    def project(self, x):
        """The cocone map Q → L(Q)."""
        if x is BASE:
            return BASE
        if self.Q.arity(x) > self.max_arity:
            raise ValueError("element beyond the computed arity range")
        return self._uf.find(x)

    def classes(self, n: int) -> dict:
        out = {}
        for x in self.Q.elements(n):
            out.setdefault(self.project(x), []).append(x)
        return out

    def _elements(self, n):
        if n > self.max_arity:
            return []
        reps = {self.project(x) for x in self.Q.elements(n)}
        reps.discard(BASE)
        return sorted(reps, key=self._key)

    def arity(self, x):
        return self.Q.arity(x)

    def _compose(self, x, i, y):
        return self.project(self.Q.compose(x, i, y))

    def _relabel(self, x, sigma):
        return self.project(self.Q.relabel(x, sigma))

    def _act(self, g, x):
        return self.project(self.Q.act(g, x))

    def sort_key(self, x):
        return self.Q.sort_key(x)

    def _to_json(self, x):
        return self.Q.to_json(x)

    def _from_json(self, obj):
        return self.project(self.Q.from_json(obj))


def quotient_L(Q: OperadSpec, max_arity: int | None = None) -> OperadSpec:
    return QuotientL(Q, max_arity)


# ---------------------------------------------------------------- checks


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple

    def __str__(self):
        return f"{self.axiom}: {self.witness!r}"


def evaluate_tree_composition(Q: OperadSpec, t, labels=None):
    """Iterated composite of a labeled tree, inputs numbered by sorted leaves.

    ``labels`` maps vertex paths to elements; by default vertex labels are
    read from the tree itself.
    """
    def label_of(path, v):
        return v.label if labels is None else labels[path]

    def go(node, path):
        if isinstance(node, Leaf):
            return Q.unit, [node.leaf]
        x = label_of(path, node)
        if x is not BASE and Q.arity(x) != node.arity:
            raise ValueError(f"label {x!r} does not have arity {node.arity}")
        order = []
        parts = [go(c, path + (k,)) for k, c in enumerate(node.children)]
        for k in range(node.arity, 0, -1):
            x = Q.compose(x, k, parts[k - 1][0])
        for _, o in parts:
            order.extend(o)
        return x, order

    x, order = go(t, ())
    if x is BASE:
        return BASE
    ranks = {leaf: r + 1 for r, leaf in enumerate(sorted(order, key=trees.label_key))}
    return Q.relabel(x, tuple(ranks[leaf] for leaf in order))


def check_operad_axioms(Q: OperadSpec, max_arity: int | None = None, limit: int = 50) -> list:
    """Every violated axiom instance (up to ``limit``) on arities 0..max_arity."""
    top = Q.max_arity if max_arity is None else max_arity
    out: list = []

    def bad(axiom, *witness):
        out.append(Violation(axiom, witness))
        return len(out) >= limit

    if Q.elements(0):
        if bad("pointed", "elements(0) must be {*}", tuple(Q.elements(0))):
            return out
    if not Q.contains(Q.unit, 1) or Q.unit not in Q.elements(1):
        bad("unit", "unit is not a non-base element of arity 1", Q.unit)
        return out
    els = {n: Q.elements(n) for n in range(1, top + 1)}

    def safe(f, *args):
        try:
            return f(*args)
        except Exception as exc:  # table gaps surface as violations
            return exc

    def is_elem(z, n):
        return not isinstance(z, Exception) and Q.contains(z, n)

    comp = {}
    for n in range(1, top + 1):
        for m in range(1, top - n + 2):
            for x in els[n]:
                for y in els[m]:
                    for i in range(1, n + 1):
                        z = safe(Q.compose, x, i, y)
                        comp[x, i, y] = z
                        if not is_elem(z, n + m - 1):
                            if bad("closure", x, i, y, z):
                                return out
    if out:
        return out
    def tab(x, i, y):
        # closure holds from here on, so every non-base composite is tabulated
        if x is BASE or y is BASE:
            return BASE
        return comp[x, i, y]

    u = Q.unit
    for n in range(1, top + 1):
        for x in els[n]:
            if comp[u, 1, x] != x and bad("left unit", u, 1, x, comp[u, 1, x]):
                return out
            for i in range(1, n + 1):
                if comp[x, i, u] != x and bad("right unit", x, i, u, comp[x, i, u]):
                    return out
    for n in range(1, top + 1):
        for y in els[n]:
            if Q.compose(BASE, 1, y) is not BASE or Q.compose(y, 1, BASE) is not BASE:
                if bad("basepoint absorption", y):
                    return out
        for sigma in adjacent_transpositions(n):
            if Q.relabel(BASE, sigma) is not BASE and bad("basepoint absorption", "relabel", sigma):
                return out
    for n in range(1, top + 1):
        for m in range(1, top - n + 2):
            for k in range(1, top - n - m + 3):
                for x in els[n]:
                    for y in els[m]:
                        for z in els[k]:
                            for i in range(1, n + 1):
                                xy = comp[x, i, y]
                                for j in range(1, m + 1):
                                    lhs = tab(xy, i + j - 1, z)
                                    rhs = tab(x, i, tab(y, j, z))
                                    if lhs != rhs and bad("sequential associativity", x, i, y, j, z):
                                        return out
                                for j in range(i + 1, n + 1):
                                    lhs = tab(xy, j + m - 1, z)
                                    rhs = tab(tab(x, j, z), i, y)
                                    if lhs != rhs and bad("parallel associativity", x, i, y, j, z):
                                        return out
    for n in range(1, top + 1):
        for x in els[n]:
            if Q.relabel(x, identity_perm(n)) != x and bad("symmetric identity", x):
                return out
            for tau in adjacent_transpositions(n):
                y = safe(Q.relabel, x, tau)
                if not is_elem(y, n):
                    if bad("symmetric closure", x, tau, y):
                        return out
                    continue
                for sigma in itertools.permutations(range(1, n + 1)):
                    lhs = Q.relabel(y, sigma)
                    rhs = Q.relabel(x, compose_perms(tau, sigma))
                    if lhs != rhs and bad("symmetric action", x, tau, sigma):
                        return out
    for n in range(1, top + 1):
        for m in range(1, top - n + 2):
            for x in els[n]:
                for y in els[m]:
                    for i in range(1, n + 1):
                        xy = comp[x, i, y]
                        for sigma in adjacent_transpositions(n):
                            tau = identity_perm(m)
                            lhs = Q.relabel(xy, block_permutation(sigma, i, tau))
                            rhs = Q.compose(Q.relabel(x, sigma), sigma[i - 1], y)
                            if lhs != rhs and bad("equivariance", x, i, y, sigma):
                                return out
                        for tau in adjacent_transpositions(m):
                            sigma = identity_perm(n)
                            lhs = Q.relabel(xy, block_permutation(sigma, i, tau))
                            rhs = Q.compose(x, i, Q.relabel(y, tau))
                            if lhs != rhs and bad("equivariance", x, i, y, tau):
                                return out
    if not Q.augment(u) and bad("augmentation", "unit maps to the basepoint", u):
        return out
    if Q.augment(BASE) and bad("augmentation", "basepoint maps to the non-base point"):
        return out
    for m in els[1]:
        for mm in els[1]:
            lhs = Q.augment(comp[m, 1, mm])
            if lhs != (Q.augment(m) and Q.augment(mm)) and bad("augmentation is multiplicative", m, mm):
                return out
    G = Q.acting_group
    if G is not None:
        e = G.identity
        for n in range(1, top + 1):
            for x in els[n]:
                if Q.act(e, x) != x and bad("group identity", x):
                    return out
                for g in G.elements:
                    gx = safe(Q.act, g, x)
                    if not is_elem(gx, n):
                        if bad("group closure", g, x, gx):
                            return out
                        continue
                    for h in G.elements:
                        if Q.act(h, gx) != Q.act(G.mul(h, g), x) and bad("group action", h, g, x):
                            return out
                    for tau in adjacent_transpositions(n):
                        if Q.act(g, Q.relabel(x, tau)) != Q.relabel(gx, tau) and bad("group/symmetric commute", g, x, tau):
                            return out
        for g in G.elements:
            if Q.act(g, u) != u and bad("group fixes unit", g, u):
                return out
            if Q.act(g, BASE) is not BASE and bad("basepoint absorption", "act", g):
                return out
        for (x, i, y), z in comp.items():
            for g in G.elements:
                lhs = Q.act(g, z)
                rhs = Q.compose(Q.act(g, x), i, Q.act(g, y))
                if lhs != rhs and bad("group/composition commute", g, x, i, y):
                    return out
    return out
