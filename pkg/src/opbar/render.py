"""Static DOT renderings of bar points.

Stable vertices are boxes, unary vertices are circles and every edge carries
its weight.  Branch words are listed horizontally in a side table with the
root end on the left and the leaf end on the right.
"""
from __future__ import annotations

import json

from . import trees
from .barpoints import BarPoint, read_chains
from .trees import Leaf, Vertex


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _label_text(Q, x) -> str:
    return json.dumps(Q.to_json(x), sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def _weight_text(w) -> str:
    return "?" if w is None else trees.fraction_to_json(w)


def render_tree(node, Q, title: str = "point") -> str:
    lines = [f"digraph {_quote(title)} {{", "  rankdir=BT;", "  node [fontname=\"Helvetica\"];",
             "  root [shape=point];"]
    names = {}

    def name(path):
        return names.setdefault(path, f"n{len(names)}")

    for path, n in trees.iter_nodes(node):
        nid = name(path)
        if isinstance(n, Leaf):
            lines.append(f"  {nid} [shape=plaintext, label={_quote(str(n.leaf))}];")
        elif n.arity == 1:
            lines.append(f"  {nid} [shape=circle, label={_quote(_label_text(Q, n.label))}];")
        else:
            lines.append(f"  {nid} [shape=box, label={_quote(_label_text(Q, n.label))}];")
        below = "root" if not path else name(path[:-1])
        lines.append(f"  {below} -> {nid} [label={_quote(_weight_text(n.weight))}];")
    words = _branch_rows(node, Q)
    if words:
        text = "".join(_quote(r)[1:-1] + "\\l" for r in words)
        lines.append(f'  words [shape=note, label="{text}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _branch_rows(node, Q) -> list:
    """One text row per branch with a nonempty word: root end on the left."""
    try:
        _, chains = read_chains(node)
    except (ValueError, AttributeError):
        return []
    rows = []
    for b in sorted(chains, key=lambda b: (b.position != "root", sorted(map(trees.label_key, b.clade)))):
        labels, weights = chains[b]
        if not labels:
            continue
        parts = [_weight_text(weights[0])]
        for x, w in zip(labels, weights[1:]):
            parts += [f"[{_label_text(Q, x)}]", _weight_text(w)]
        clade = ",".join(str(l) for l in sorted(b.clade, key=trees.label_key))
        rows.append(f"{b.position} {{{clade}}}: " + " ".join(parts))
    return rows


def render_point(p: BarPoint, title: str = "point") -> str:
    if p.is_base:
        leaves = ",".join(str(l) for l in sorted(p.leafset, key=trees.label_key))
        return (f"digraph {_quote(title)} {{\n"
                f"  base [shape=doublecircle, label={_quote('* (' + leaves + ')')}];\n}}\n")
    return render_tree(p.tree, p.operad, title)
