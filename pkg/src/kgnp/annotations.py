"""Runtime algebra of fuzzy / probabilistic annotation tuples.

Tuples have a fixed length per program.  Fuzzy tuples combine by
elementwise maximum (neutral element: all zeros), probabilistic tuples by
elementwise product (neutral element: all ones).  Concept-valued elements
are resolved to numbers through the program's declared anchors before
combining.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .ast import Annotation
from .errors import EngineError


def neutral(mode: str, n: int) -> tuple:
    if mode == "p":
        return (1.0,) * n
    return (0.0,) * n


def resolve(annotation: Annotation, anchors: dict) -> tuple:
    """Map concept elements to their numeric anchors."""
    out = []
    for e in annotation.elements:
        if isinstance(e, str):
            if e not in anchors:
                raise EngineError("undeclared concept %r in annotation" % e)
            out.append(float(anchors[e]))
        else:
            out.append(float(e))
    return tuple(out)


def combine(mode: str, x: Sequence[float], y: Sequence[float]) -> tuple:
    if len(x) != len(y):
        raise EngineError(
            "annotation length mismatch: %d vs %d" % (len(x), len(y))
        )
    if mode == "p":
        return tuple(a * b for a, b in zip(x, y))
    return tuple(max(a, b) for a, b in zip(x, y))


def propagate(
    head_static: Sequence[float], body_dynamic: Iterable[Sequence[float]], mode: str
) -> tuple:
    """Runtime tuple of a proved head: combine the head's static tuple with
    every body predicate's dynamic tuple."""
    result = tuple(head_static)
    for t in body_dynamic:
        result = combine(mode, result, t)
    return result


def compare_tuples(x: Sequence[float], y: Sequence[float]) -> str:
    """Componentwise order: 'le', 'ge', 'eq' or 'incomparable'."""
    if len(x) != len(y):
        raise EngineError(
            "annotation length mismatch: %d vs %d" % (len(x), len(y))
        )
    le = all(a <= b for a, b in zip(x, y))
    ge = all(a >= b for a, b in zip(x, y))
    if le and ge:
        return "eq"
    if le:
        return "le"
    if ge:
        return "ge"
    return "incomparable"
