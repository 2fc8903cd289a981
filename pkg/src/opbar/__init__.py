"""Bar constructions of finite pointed operads with exact rational weights.

The modules follow the data flow: ``trees`` (weighted leaf-labeled trees),
``operads`` (finite operads, groups, P⋊G, L and R), ``barpoints`` (canonical
forms of bar points), ``monoidbar`` (bar words of a group), ``cooperad``
(degrafting), ``equivalence`` (σ, π and the homotopy H) and ``probes``
(continuity and membership probes).
"""
from __future__ import annotations

from .barpoints import BarPoint, basepoint, normalize
from .cooperad import DecompositionRequest, decompose
from .equivalence import EquivariantPoint, homotopy_H, pi, sigma
from .monoidbar import MonoidBarWord, Variant, normalize_word
from .operads import BASE, GroupSpec, OperadSpec, Semidirect, check_operad_axioms
from .trees import Leaf, Vertex

__all__ = [
    "BASE", "BarPoint", "DecompositionRequest", "EquivariantPoint", "GroupSpec", "Leaf", "MonoidBarWord",
    "OperadSpec", "Semidirect", "Variant", "Vertex", "basepoint", "check_operad_axioms", "decompose",
    "homotopy_H", "normalize", "normalize_word", "pi", "sigma",
]

__version__ = "0.1.0"
