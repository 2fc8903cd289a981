"""One-dimensional bar constructions BG, EG, ẼG and B(G,G,G) of a monoid.

A word is a list of weights t₀, …, t_k summing to one interleaved with
labels g₁, …, g_k, with optional module labels at the ends.  Reading left to
right goes from the root end of a branch to its leaf end.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Any, Optional

from .trees import fraction_from_json, fraction_to_json


class Variant(str, Enum):
    BG = "BG"            # B(*, G, *)
    EG = "EG"            # B(*, G, G): right module
    EGTILDE = "EGtilde"  # B(G, G, *): left module
    BGGG = "BGGG"        # B(G, G, G)

    @property
    def has_left(self) -> bool:
        return self in (Variant.EGTILDE, Variant.BGGG)

    @property
    def has_right(self) -> bool:
        return self in (Variant.EG, Variant.BGGG)

    @classmethod
    def of(cls, has_left: bool, has_right: bool) -> "Variant":
        return {(False, False): cls.BG, (False, True): cls.EG,
                (True, False): cls.EGTILDE, (True, True): cls.BGGG}[has_left, has_right]


class OperadMonoid:
    """The monoid Q(1) under ∘₁, so words can be read off any bar point."""

    def __init__(self, Q):
        self.Q = Q
        self.identity = Q.unit
        self.name = f"{Q.name}(1)"

    def mul(self, x, y):
        return self.Q.compose(x, 1, y)

    def prod(self, xs, start=None):
        acc = self.identity if start is None else start
        for x in xs:
            acc = self.mul(acc, x)
        return acc


@dataclass(frozen=True)
class MonoidBarWord:
    variant: Variant
    weights: tuple
    labels: tuple = ()
    left: Any = None
    right: Any = None
    monoid: Any = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        object.__setattr__(self, "weights", tuple(Fraction(t) for t in self.weights))
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.weights) != len(self.labels) + 1:
            raise ValueError("a word needs exactly one more weight than labels")
        if (self.left is not None) != self.variant.has_left:
            raise ValueError(f"{self.variant.value} words {'need' if self.variant.has_left else 'have no'} a left module")
        if (self.right is not None) != self.variant.has_right:
            raise ValueError(f"{self.variant.value} words {'need' if self.variant.has_right else 'have no'} a right module")

    @property
    def length(self) -> int:
        return len(self.labels)

    def is_canonical(self) -> bool:
        return normalize_word(self) == self


def _check_weights(weights) -> None:
    if sum(weights) != 1:
        raise ValueError(f"word weights sum to {sum(weights)}, not 1")
    if any(t < 0 or t > 1 for t in weights):
        raise ValueError("word weights must lie in [0, 1]")


def make_word(variant, weights, labels=(), left=None, right=None, monoid=None) -> MonoidBarWord:
    """Build a word and return its canonical form."""
    return normalize_word(MonoidBarWord(Variant(variant), weights, labels, left, right, monoid))


def empty_word(variant, monoid, left=None, right=None) -> MonoidBarWord:
    v = Variant(variant)
    e = monoid.identity
    return MonoidBarWord(v, (Fraction(1),), (),
                         (e if left is None else left) if v.has_left else None,
                         (e if right is None else right) if v.has_right else None, monoid)


def word_redexes(w: MonoidBarWord) -> list:
    e = w.monoid.identity
    k = w.length
    out = [("unit", j) for j, g in enumerate(w.labels) if g == e]
    out += [("internal", j) for j in range(1, k) if w.weights[j] == 0]
    if k and w.weights[0] == 0:
        out.append(("left", 0))
    if k and w.weights[-1] == 0:
        out.append(("right", 0))
    return out


def _apply(w: MonoidBarWord, rule: str, j: int) -> MonoidBarWord:
    ts, gs = list(w.weights), list(w.labels)
    M = w.monoid
    left, right = w.left, w.right
    if rule == "unit":
        del gs[j]
        ts[j:j + 2] = [ts[j] + ts[j + 1]]
    elif rule == "internal":
        gs[j - 1:j + 1] = [M.mul(gs[j - 1], gs[j])]
        del ts[j]
    elif rule == "left":
        g = gs.pop(0)
        ts.pop(0)
        if w.variant.has_left:
            left = M.mul(left, g)
    elif rule == "right":
        g = gs.pop()
        ts.pop()
        if w.variant.has_right:
            right = M.mul(g, right)
    return MonoidBarWord(w.variant, tuple(ts), tuple(gs), left, right, M)


def normalize_word(w: MonoidBarWord, rng=None) -> MonoidBarWord:
    """Apply the face and degeneracy identifications to a fixpoint.

    With ``rng`` the redex applied at each step is chosen at random, which
    is how confluence is tested.
    """
    if w.monoid is None:
        raise ValueError("word has no monoid attached")
    _check_weights(w.weights)
    while True:
        redexes = word_redexes(w)
        if not redexes:
            return w
        rule, j = rng.choice(redexes) if rng is not None else redexes[0]
        w = _apply(w, rule, j)


def label_product(w: MonoidBarWord):
    """left·g₁⋯g_k·right, omitting absent modules."""
    M = w.monoid
    acc = w.left if w.variant.has_left else M.identity
    acc = M.prod(w.labels, acc)
    if w.variant.has_right:
        acc = M.mul(acc, w.right)
    return acc


def _require(w: MonoidBarWord, *variants) -> None:
    if w.variant not in variants:
        names = " or ".join(v.value for v in variants)
        raise ValueError(f"expected a {names} word, got {w.variant.value}")


def mu(w: MonoidBarWord):
    """The multiplication map B(G,G,G) → G."""
    _require(w, Variant.BGGG)
    return label_product(w)


def gamma(z: MonoidBarWord) -> MonoidBarWord:
    """EG → B(G,G,G): put the inverse of the total product in the left slot."""
    _require(z, Variant.EG)
    G = z.monoid
    left = G.inv(G.mul(G.prod(z.labels), z.right))
    return MonoidBarWord(Variant.BGGG, z.weights, z.labels, left, z.right, G)


def pr_r(w: MonoidBarWord) -> MonoidBarWord:
    """B(G,G,G) → ẼG forgetting the right module."""
    _require(w, Variant.BGGG)
    return normalize_word(MonoidBarWord(Variant.EGTILDE, w.weights, w.labels, w.left, None, w.monoid))


def pr_root(w: MonoidBarWord) -> MonoidBarWord:
    """EG → BG forgetting the right module."""
    _require(w, Variant.EG)
    return normalize_word(MonoidBarWord(Variant.BG, w.weights, w.labels, None, None, w.monoid))


def forget_left(w: MonoidBarWord) -> MonoidBarWord:
    _require(w, Variant.EGTILDE, Variant.BGGG)
    v = Variant.of(False, w.variant.has_right)
    return normalize_word(MonoidBarWord(v, w.weights, w.labels, None, w.right, w.monoid))


def beta_e(w: MonoidBarWord) -> MonoidBarWord:
    """Place e in the right module: ẼG → B(G,G,G) and BG → EG."""
    _require(w, Variant.EGTILDE, Variant.BG)
    v = Variant.BGGG if w.variant is Variant.EGTILDE else Variant.EG
    return normalize_word(MonoidBarWord(v, w.weights, w.labels, w.left, w.monoid.identity, w.monoid))


def act_right(w: MonoidBarWord, g) -> MonoidBarWord:
    _require(w, Variant.EG, Variant.BGGG)
    return replace(w, right=w.monoid.mul(w.right, g))


def act_left(g, w: MonoidBarWord) -> MonoidBarWord:
    _require(w, Variant.EGTILDE, Variant.BGGG)
    return replace(w, left=w.monoid.mul(g, w.left))


def graft_scale(a: MonoidBarWord, b: MonoidBarWord, u) -> MonoidBarWord:
    """Concatenate ``a`` scaled by u and ``b`` scaled by 1-u.

    The right module of ``a`` and the left module of ``b`` fuse into one
    internal label at the junction.
    """
    u = Fraction(u)
    if not 0 <= u <= 1:
        raise ValueError("graft parameter must lie in [0, 1]")
    if not a.variant.has_right or not b.variant.has_left:
        raise ValueError("graft needs a right module on the left word and a left module on the right word")
    M = a.monoid
    weights = tuple(u * t for t in a.weights) + tuple((1 - u) * t for t in b.weights)
    labels = a.labels + (M.mul(a.right, b.left),) + b.labels
    v = Variant.of(a.variant.has_left, b.variant.has_right)
    return normalize_word(MonoidBarWord(v, weights, labels, a.left, b.right, M))


def contract_eg(s, w: MonoidBarWord) -> MonoidBarWord:
    """The contraction of EG onto the one-vertex word e, at time s."""
    _require(w, Variant.EG)
    point = empty_word(Variant.BGGG, w.monoid)
    return graft_scale(w, point, 1 - Fraction(s))


def scale_into(w: MonoidBarWord, total) -> tuple:
    """Weights of ``w`` multiplied by ``total`` (used when pasting onto a branch)."""
    return tuple(total * t for t in w.weights)


# ---------------------------------------------------------------- JSON


def word_to_json(w: MonoidBarWord, enc=lambda g: g) -> dict:
    out = {
        "variant": w.variant.value,
        "weights": [fraction_to_json(t) for t in w.weights],
        "labels": [enc(g) for g in w.labels],
    }
    if w.variant.has_left:
        out["left"] = enc(w.left)
    if w.variant.has_right:
        out["right"] = enc(w.right)
    return out


def word_from_json(obj: dict, monoid, dec=lambda g: g, normalize: bool = True) -> MonoidBarWord:
    if not isinstance(obj, dict):
        raise ValueError("word must be a JSON object")
    try:
        v = Variant(obj["variant"])
    except (KeyError, ValueError):
        raise ValueError(f"unknown word variant {obj.get('variant')!r}") from None
    weights = [fraction_from_json(t) for t in obj.get("weights", [])]
    labels = [dec(g) for g in obj.get("labels", [])]
    left = dec(obj["left"]) if "left" in obj else None
    right = dec(obj["right"]) if "right" in obj else None
    w = MonoidBarWord(v, tuple(weights), tuple(labels), left, right, monoid)
    _check_weights(w.weights)
    return normalize_word(w) if normalize else w
