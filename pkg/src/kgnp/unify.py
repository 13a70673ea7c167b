"""Unification: standard most-general unifier and the one-sided comparative
variant, where a ground fact numerically entails a goal with a different
comparative relation name (Eq(a, 75) entails Larger(a, 70))."""

from __future__ import annotations

import math
from typing import Dict, Optional, Tuple

from .ast import Call
from .errors import EngineError
from .terms import Atom, Num, Obj, Struct, Term, Var

Bindings = Dict[str, Term]


def walk(t: Term, b: Bindings) -> Term:
    while isinstance(t, Var) and t.name in b:
        t = b[t.name]
    return t


def resolve(t: Term, b: Bindings) -> Term:
    """Apply the substitution exhaustively."""
    t = walk(t, b)
    if isinstance(t, Struct):
        return Struct(t.functor, tuple(resolve(a, b) for a in t.args))
    return t


def occurs(name: str, t: Term, b: Bindings) -> bool:
    t = walk(t, b)
    if isinstance(t, Var):
        return t.name == name
    if isinstance(t, Struct):
        return any(occurs(name, a, b) for a in t.args)
    return False


def unify_terms(
    x: Term, y: Term, b: Optional[Bindings], occurs_check: bool = True
) -> Optional[Bindings]:
    """Extend b with the MGU of x and y, or None on clash."""
    if b is None:
        return None
    x = walk(x, b)
    y = walk(y, b)
    if isinstance(x, Var):
        if isinstance(y, Var) and y.name == x.name:
            return b
        if occurs_check and occurs(x.name, y, b):
            return None
        b2 = dict(b)
        b2[x.name] = y
        return b2
    if isinstance(y, Var):
        return unify_terms(y, x, b, occurs_check)
    if isinstance(x, Atom) and isinstance(y, Atom):
        return b if x.name == y.name else None
    if isinstance(x, Num) and isinstance(y, Num):
        return b if x.value == y.value and type(x.value) is type(y.value) else None
    if isinstance(x, Obj) and isinstance(y, Obj):
        return b if x is y else None
    if isinstance(x, Struct) and isinstance(y, Struct):
        if x.functor != y.functor or len(x.args) != len(y.args):
            return None
        for xa, ya in zip(x.args, y.args):
            b = unify_terms(xa, ya, b, occurs_check)
            if b is None:
                return None
        return b
    return None


def unify(p: Call, q: Call, b: Bindings, occurs_check: bool = True) -> Optional[Bindings]:
    """MGU of two call goals; None (failure) when names or arities differ."""
    if p.name != q.name or len(p.args) != len(q.args):
        return None
    for pa, qa in zip(p.args, q.args):
        b = unify_terms(pa, qa, b, occurs_check)
        if b is None:
            return None
    return b


# -- comparative relations ----------------------------------------------

# relation name -> value v maps to an interval of reals asserted to contain
# the quantity.  Entailment is interval inclusion.
_INF = math.inf


def _interval(name: str, v: float) -> Tuple[float, float, bool, bool]:
    # (lo, hi, lo_closed, hi_closed)
    if name == "eq":
        return (v, v, True, True)
    if name == "larger":
        return (v, _INF, False, True)
    if name == "larger-eq":
        return (v, _INF, True, True)
    if name == "smaller":
        return (-_INF, v, True, False)
    if name == "smaller-eq":
        return (-_INF, v, True, True)
    raise EngineError("unknown comparative relation %r" % name)


COMPARATIVE_RELATIONS = frozenset(
    {"eq", "larger", "smaller", "larger-eq", "smaller-eq"}
)


def interval_entails(
    fact_rel: str, fact_value: float, goal_rel: str, goal_value: float
) -> bool:
    """Does `fact_rel(x, fact_value)` entail `goal_rel(x, goal_value)`?
    True iff the fact's interval is contained in the goal's."""
    flo, fhi, flc, fhc = _interval(fact_rel, fact_value)
    glo, ghi, glc, ghc = _interval(goal_rel, goal_value)
    if flo < glo or (flo == glo and flc and not glc):
        return False
    if fhi > ghi or (fhi == ghi and fhc and not ghc):
        return False
    return True


def comparative_unify(
    fact: Call, goal: Call, b: Bindings, occurs_check: bool = True
) -> Optional[Bindings]:
    """One-sided: the ground fact validates the goal.  Both must be binary
    comparative predicates sharing the first-argument shape up to MGU."""
    if goal.name not in COMPARATIVE_RELATIONS or fact.name not in COMPARATIVE_RELATIONS:
        return None
    if len(fact.args) != 2 or len(goal.args) != 2:
        return None
    b2 = unify_terms(fact.args[0], goal.args[0], b, occurs_check)
    if b2 is None:
        return None
    fv = walk(fact.args[1], b2)
    gv = walk(goal.args[1], b2)
    if isinstance(gv, Var):
        # Unbound goal value: only a same-relation match can bind it.
        if fact.name == goal.name:
            return unify_terms(gv, fv, b2, occurs_check)
        return None
    if not isinstance(fv, Num) or not isinstance(gv, Num):
        raise EngineError(
            "comparative unification needs numeric operands, got %s and %s" % (fv, gv)
        )
    if interval_entails(fact.name, float(fv.value), goal.name, float(gv.value)):
        return b2
    return None
