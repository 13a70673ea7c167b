"""Term representation shared by the parser, the stores and the engine.

Terms follow the usual Prolog convention: identifiers starting with an
uppercase letter or ``_`` are variables, everything else is an atom.
Capitalised constants must be quoted (``'Wang'``).  In triple files there
are no variables, so bare capitalised identifiers are read as atoms there.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Atom:
    name: str

    def __str__(self) -> str:
        return format_atom(self.name)


@dataclass(frozen=True)
class Num:
    value: Union[int, float]

    def __str__(self) -> str:
        return format_number(self.value)


@dataclass(frozen=True)
class Struct:
    functor: str
    args: tuple

    def __post_init__(self):
        if not self.args:
            raise ValueError("compound term needs at least one argument")

    def __str__(self) -> str:
        return "%s(%s)" % (format_atom(self.functor), ", ".join(map(str, self.args)))


@dataclass(frozen=True, eq=False)
class Obj:
    """Host-object wrapper (vectors, neighbour lists) flowing through goals."""

    value: object

    def __str__(self) -> str:
        return "<obj:%s>" % type(self.value).__name__


Term = Union[Var, Atom, Num, Struct, Obj]

_PLAIN_ATOM = re.compile(r"[a-z][A-Za-z0-9_-]*\Z")


def format_atom(name: str) -> str:
    if _PLAIN_ATOM.match(name):
        return name
    return "'%s'" % name.replace("\\", "\\\\").replace("'", "\\'")


def format_number(value: Union[int, float]) -> str:
    # repr round-trips floats bit-exactly; ints print plainly.
    if isinstance(value, bool):
        raise TypeError("bool is not a term number")
    return repr(value) if isinstance(value, float) else str(value)


def is_ground(t: Term) -> bool:
    if isinstance(t, Var):
        return False
    if isinstance(t, Struct):
        return all(is_ground(a) for a in t.args)
    return True


def term_vars(t: Term, acc=None) -> set:
    if acc is None:
        acc = set()
    if isinstance(t, Var):
        acc.add(t.name)
    elif isinstance(t, Struct):
        for a in t.args:
            term_vars(a, acc)
    return acc


@dataclass(frozen=True)
class Triplet:
    """One (head, relation, tail) knowledge unit."""

    head: Term
    relation: str
    tail: Term

    def __post_init__(self):
        if not self.relation:
            raise ValueError("triplet relation must be non-empty")
        for slot, value in (("head", self.head), ("tail", self.tail)):
            if isinstance(value, Atom) and not value.name:
                raise ValueError("triplet %s must be non-empty" % slot)

    def __str__(self) -> str:
        return "(%s, %s, %s)" % (self.head, format_atom(self.relation), self.tail)
