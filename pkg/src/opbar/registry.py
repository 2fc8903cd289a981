"""Named operads and groups, and the JSON encodings of points.

Point files::

    {"operad": "Com+", "group": "Z/2", "tree": <tree>}
    {"operad": "Com+", "group": "Z/2", "basepoint": true, "leaves": [1, 2]}

Equivariant point files carry an EG word as well::

    {"operad": "Com+", "group": "Z/2", "zeta": <word>, "psi": <tree>}

With a group the point lives over P⋊G and vertex labels are
``{"p": <P element>, "g": [<group elements>]}``; without one it lives over P.
"""
from __future__ import annotations

import functools
import json
import re
from typing import Optional

from . import trees
from .barpoints import BarPoint, basepoint, normalize
from .equivalence import EquivariantPoint, canonicalize_equivariant, equivariant_basepoint
from .monoidbar import Variant, word_from_json, word_to_json
from .operads import (AssPlus, ComPlus, FreeOperad, GroupSpec, OperadSpec, Semidirect, SignOperad,
                      TableOperad, TrivialOperad, cyclic, symmetric3, trivial_group)

OPERAD_NAMES = ("I", "Com+", "Ass+", "Sign", "Free")
BUNDLED_PAIRS = (("Com+", "Z/2"), ("Com+", "Z/4"), ("Ass+", "Z/3"), ("Sign", "Z/2"), ("Com+", "S3"))
FREE_SIGNATURE = {"m": 2, "t": 3}


class SchemaError(ValueError):
    """Input that does not match a documented JSON schema."""


@functools.lru_cache(maxsize=None)
def group(name: str) -> GroupSpec:
    if name == "S3":
        return symmetric3()
    if name == "1":
        return trivial_group()
    m = re.fullmatch(r"Z/(\d+)", name)
    if m and int(m.group(1)) >= 1:
        return cyclic(int(m.group(1)))
    raise SchemaError(f"unknown group {name!r} (expected Z/k, S3 or 1)")


def _even_cyclic(name: str) -> bool:
    m = re.fullmatch(r"Z/(\d+)", name)
    return bool(m) and int(m.group(1)) % 2 == 0


@functools.lru_cache(maxsize=None)
def _named(name: str, group_name: Optional[str]) -> OperadSpec:
    G = group(group_name) if group_name else None
    if name == "I":
        P = TrivialOperad()
    elif name == "Com+":
        P = ComPlus()
    elif name == "Ass+":
        P = AssPlus()
    elif name == "Sign":
        if G is not None and not _even_cyclic(group_name):
            raise SchemaError(f"Sign needs an even cyclic group (g acts by its parity), got {group_name!r}")
        P = SignOperad(G or cyclic(2))
    elif name == "Free":
        P = FreeOperad(FREE_SIGNATURE)
    else:
        raise SchemaError(f"unknown operad {name!r} (expected one of {', '.join(OPERAD_NAMES)} or a --spec table)")
    return Semidirect(P, G) if G is not None else P


def operad(name: str, group_name: Optional[str] = None, table: Optional[dict] = None) -> OperadSpec:
    """Resolve an operad by name; ``table`` supplies a user-defined P."""
    if table is not None:
        P = TableOperad.from_table(table)
        if name not in (None, P.name):
            raise SchemaError(f"point is over {name!r} but the loaded table is {P.name!r}")
        if group_name is None:
            return P
        G = P.acting_group if P.acting_group is not None and P.acting_group.name == group_name else group(group_name)
        return Semidirect(P, G)
    try:
        return _named(name, group_name)
    except ValueError as exc:
        raise SchemaError(str(exc)) from None


def bundled_pairs() -> list:
    return [operad(p, g) for p, g in BUNDLED_PAIRS]


def _names(Q: OperadSpec) -> dict:
    if isinstance(Q, Semidirect):
        return {"operad": Q.P.name, "group": Q.G.name}
    return {"operad": Q.name}


# ---------------------------------------------------------------- points


def point_to_json(p: BarPoint) -> dict:
    out = _names(p.operad)
    if p.is_base:
        out["basepoint"] = True
        out["leaves"] = sorted(p.leafset, key=trees.label_key)
    else:
        out["tree"] = trees.tree_to_json(p.tree, p.operad.to_json)
    return out


def _leaves_from_json(obj) -> frozenset:
    ls = obj.get("leaves")
    if not isinstance(ls, list) or not ls:
        raise SchemaError("a basepoint needs a nonempty 'leaves' list")
    return frozenset(ls)


def raw_from_json(obj, table: Optional[dict] = None):
    """(operad, raw tree or None, leafset) from a point object."""
    if not isinstance(obj, dict) or "operad" not in obj:
        raise SchemaError("point JSON must be an object with an 'operad' field")
    Q = operad(obj["operad"], obj.get("group"), table)
    if obj.get("basepoint"):
        return Q, None, _leaves_from_json(obj)
    if "tree" not in obj:
        raise SchemaError("point JSON needs 'tree' or 'basepoint': true")
    try:
        raw = trees.tree_from_json(obj["tree"], Q.from_json, Q.relabel)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad tree: {exc}") from None
    return Q, raw, raw.leafset


def point_from_json(obj, table: Optional[dict] = None) -> BarPoint:
    Q, raw, leafset = raw_from_json(obj, table)
    if raw is None:
        return basepoint(leafset, Q)
    try:
        return normalize(raw, Q)
    except ValueError as exc:
        raise SchemaError(f"invalid point: {exc}") from None


# ---------------------------------------------------------------- equivariant points


def equivariant_to_json(x: EquivariantPoint, QG: Semidirect) -> dict:
    out = _names(QG)
    if x.is_base:
        out["basepoint"] = True
        out["leaves"] = sorted(x.leafset, key=trees.label_key)
    else:
        out["zeta"] = word_to_json(x.zeta, QG.G.to_json)
        out["psi"] = trees.tree_to_json(x.psi.tree, QG.P.to_json)
    return out


def equivariant_from_json(obj, table: Optional[dict] = None) -> tuple:
    """(EquivariantPoint, P⋊G)."""
    if not isinstance(obj, dict) or "operad" not in obj or "group" not in obj:
        raise SchemaError("equivariant point JSON needs 'operad' and 'group'")
    QG = operad(obj["operad"], obj["group"], table)
    if obj.get("basepoint"):
        return equivariant_basepoint(_leaves_from_json(obj), QG.P), QG
    if "zeta" not in obj or "psi" not in obj:
        raise SchemaError("equivariant point JSON needs 'zeta' and 'psi'")
    try:
        zeta = word_from_json(obj["zeta"], QG.G, QG.G.from_json)
        if zeta.variant is not Variant.EG:
            raise SchemaError("zeta must be an EG word")
        psi = normalize(trees.tree_from_json(obj["psi"], QG.P.from_json, QG.P.relabel), QG.P)
    except SchemaError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"invalid equivariant point: {exc}") from None
    return canonicalize_equivariant(zeta, psi), QG


def is_equivariant(obj) -> bool:
    return isinstance(obj, dict) and "zeta" in obj


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False)
