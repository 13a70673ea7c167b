"""Abstract syntax of KGN-Prolog programs.

A rule body is a disjunction of conjunctions.  Goals are predicate calls
(optionally annotated and/or tagged with a graph-set directive), bounded or
unbounded ``Fail``, or a nested disjunction group.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .terms import Term, Var
from .terms import Triplet


@dataclass(frozen=True)
class Annotation:
    mode: str  # "f" (fuzzy) or "p" (probabilistic)
    elements: tuple  # floats in [0, 1] and/or concept names (str)

    def __post_init__(self):
        if self.mode not in ("f", "p"):
            raise ValueError("annotation mode must be 'f' or 'p'")
        for e in self.elements:
            if isinstance(e, (int, float)) and not 0.0 <= float(e) <= 1.0:
                raise ValueError("annotation value %r outside [0, 1]" % (e,))


@dataclass(frozen=True)
class Call:
    name: str  # predicate name, lowercase-normalized
    args: tuple = ()
    annotation: Optional[Annotation] = None
    source: Optional[tuple] = None  # kg names from a #...# directive

    @property
    def arity(self) -> int:
        return len(self.args)

    def key(self):
        return (self.name, len(self.args))


@dataclass(frozen=True)
class FailGoal:
    bound: Union[int, Var, None] = None  # None: unbounded repetition


@dataclass(frozen=True)
class Disj:
    """Parenthesized disjunction group inside a conjunction."""

    alternatives: tuple  # tuple of goal tuples


Goal = Union[Call, FailGoal, Disj]


@dataclass(frozen=True)
class Rule:
    head: Call
    body: tuple  # tuple of conjunctions; each conjunction a tuple of goals
    origin: Optional[str] = None  # kg name the rule belongs to


@dataclass
class Program:
    rules: list = field(default_factory=list)
    data: list = field(default_factory=list)  # ground Call facts
    data_lists: dict = field(default_factory=dict)  # name -> list of terms
    concept_anchors: dict = field(default_factory=dict)  # concept -> number in [0,1]
    emba: Optional[str] = None  # declared embedding algorithm
    mode: Optional[str] = None  # "f" | "p" once any annotation appears

    def clauses(self, name: str, arity: int):
        """Facts first, then rules, in source order."""
        for fact in self.data:
            if fact.name == name and fact.arity == arity:
                yield Rule(head=fact, body=((),))
        for rule in self.rules:
            if rule.head.name == name and rule.head.arity == arity:
                yield rule

    def defines(self, name: str, arity: int) -> bool:
        return any(f.name == name and f.arity == arity for f in self.data) or any(
            r.head.name == name and r.head.arity == arity for r in self.rules
        )

    @property
    def annotation_length(self) -> int:
        return self._annotation_length()

    def _annotation_length(self) -> int:
        n = 0
        for rule in self.rules:
            for conj in rule.body:
                for g in conj:
                    if isinstance(g, Call) and g.annotation is not None:
                        n = len(g.annotation.elements)
        for fact in self.data:
            if fact.annotation is not None:
                n = len(fact.annotation.elements)
        return n


def triplet_as_predicate(t: Triplet) -> Call:
    """A triplet (A, B, C) used as the predicate B(A, C)."""
    return Call(t.relation.lower(), (t.head, t.tail))
