"""SLD resolution with backtracking over a knowledge-graph network.

Goals run left to right, clauses in source order.  Lookup order for a goal
executed in graph G's context: G's local-program data, G's triplets (used
as predicates, including comparative unification), G's local-program rules,
then the calling program's data and rules.  ``#KG#`` directives switch the
context to the named graph, subject to network links and the callee's
access policy.  ``Fail(N)`` bounds re-backtracking of its conjunction to N
alternatives; annotation tuples propagate by max (fuzzy) or product
(probabilistic).
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

from . import annotations as ann_ops
from .ast import Annotation, Call, Disj, FailGoal, Program, Rule, triplet_as_predicate
from .errors import (
    AccessDenied,
    DataError,
    DepthLimitExceeded,
    EngineError,
    LinkMissing,
    UnknownPredicate,
)
from .store import KGNetwork, KnowledgeGraph, _policy_filter
from .terms import Atom, Num, Obj, Struct, Term, Var, term_vars
from .unify import (
    COMPARATIVE_RELATIONS,
    Bindings,
    comparative_unify,
    resolve,
    unify,
    unify_terms,
    walk,
)

sys.setrecursionlimit(200000)


class _Abort(Exception):
    """A Fail(N) budget was exhausted: abandon the owning conjunction."""

    def __init__(self, token):
        self.token = token


class _Cut(Exception):
    def __init__(self, token):
        self.token = token


@dataclass
class Solution:
    bindings: Dict[str, Term]
    annotation: tuple
    trace: Optional[List[str]] = None


@dataclass(frozen=True)
class Ctx:
    graph: Optional[str] = None  # None: top-level session
    via_lpp: bool = False


class Session:
    """Mutable per-query state shared by the side-effecting built-ins."""

    def __init__(self, seed: int = 0):
        self.sink: List[str] = []
        self.counters: Dict[str, int] = {}
        self.buffers: Dict[str, list] = {}
        self.datasets: Dict[str, list] = {}  # name -> list of MTuple
        self.records: Dict[str, object] = {}  # id -> MTuple with unknown label
        self.spaces: Dict[str, object] = {}  # name -> EmbeddingSpace
        self.schema = None
        self.bad_spec = None
        self.seed = seed

    def write(self, line: str):
        self.sink.append(line)

    def bump(self, name: str) -> int:
        self.counters[name] = self.counters.get(name, 0) + 1
        return self.counters[name]


# Built-ins that perform statistics over graph data; denied wholesale in a
# graph whose policy carries any deny-statistics group rule.
STAT_BUILTINS = frozenset({"count", "volume", "quotient", "distribute", "filter", "display"})

# Functional (term-level) built-ins, resolved by eval_term.
FUNCTIONS = frozenset(
    {
        "rdf",
        "vec",
        "head",
        "relation",
        "tail",
        "v-head",
        "v-relation",
        "v-tail",
        "quotient",
        "volume",
        "size",
        "attribute-name",
        "v-distance",
        "+",
        "-",
        "*",
        "/",
    }
)


class Engine:
    def __init__(
        self,
        program: Optional[Program] = None,
        network: Optional[KGNetwork] = None,
        session: Optional[Session] = None,
        occurs_check: bool = True,
        max_depth: int = 10000,
    ):
        self.program = program if program is not None else Program()
        self.network = network
        self.session = session if session is not None else Session()
        self.occurs_check = occurs_check
        self.max_depth = max_depth
        self._rename_n = 0
        programs = [self.program]
        if network is not None:
            programs += [
                g.local_program
                for g in network.graphs.values()
                if g.local_program is not None
            ]
        modes = {p.mode for p in programs if p.mode is not None}
        if len(modes) > 1:
            raise EngineError("fuzzy and probabilistic programs mixed in one network")
        self.mode = modes.pop() if modes else "f"
        self.ann_n = max((p.annotation_length for p in programs), default=0)
        self.concept_anchors: Dict[str, float] = {}
        for p in programs:
            self.concept_anchors.update(p.concept_anchors)

    # -- public API -----------------------------------------------------

    def solve(
        self,
        goals: tuple,
        max_solutions: Optional[int] = None,
        trace: bool = False,
    ) -> Iterator[Solution]:
        qvars = set()
        _goal_vars(goals, qvars)
        token, gen = self._activation(goals, {}, 0, Ctx(), None)
        count = 0
        try:
            for b, ann in gen:
                sol = Solution(
                    {v: resolve(Var(v), b) for v in sorted(qvars)},
                    ann,
                    [_fmt_goal(g, b) for g in goals if isinstance(g, Call)]
                    if trace
                    else None,
                )
                yield sol
                count += 1
                if max_solutions is not None and count >= max_solutions:
                    return
        except _Cut as e:
            if e.token is not token:
                raise

    # -- resolution machinery -------------------------------------------

    def _neutral(self) -> tuple:
        return ann_ops.neutral(self.mode, self.ann_n)

    def _static(self, annotation: Optional[Annotation]) -> tuple:
        if annotation is None:
            return self._neutral()
        t = ann_ops.resolve(annotation, self.concept_anchors)
        if len(t) != self.ann_n:
            raise EngineError(
                "annotation length %d differs from program length %d"
                % (len(t), self.ann_n)
            )
        return t

    def _activation(self, conj, b, depth, ctx, head_name):
        token = object()

        def gen():
            try:
                yield from self._seq(conj, 0, b, self._neutral(), depth, ctx, token, {}, head_name)
            except _Abort as e:
                if e.token is not token:
                    raise

        return token, gen()

    def _seq(self, goals, i, b, ann, depth, ctx, token, counters, head_name):
        if i == len(goals):
            yield b, ann
            return
        g = goals[i]
        if isinstance(g, FailGoal):
            budget = self._fail_budget(g, b, ctx, head_name)
            counters[i] = counters.get(i, 0) + 1
            if budget is not None and counters[i] >= budget:
                raise _Abort(token)
            return  # plain failure: drive backtracking
        if isinstance(g, Disj):
            tokens = []
            for alt in g.alternatives:
                t2, gen = self._activation(alt, b, depth, ctx, head_name)
                tokens.append(t2)
                try:
                    for b2, ann2 in gen:
                        yield from self._seq(
                            goals,
                            i + 1,
                            b2,
                            ann_ops.combine(self.mode, ann, ann2),
                            depth,
                            ctx,
                            token,
                            counters,
                            head_name,
                        )
                except _Cut as e:
                    if e.token in tokens:
                        return
                    raise
            return
        if g.name == "cut" and not g.args:
            yield from self._seq(goals, i + 1, b, ann, depth, ctx, token, counters, head_name)
            raise _Cut(token)
        static = self._static(g.annotation)
        for b2, dyn in self._solve_call(g, b, depth, ctx):
            contrib = ann_ops.combine(self.mode, static, dyn)
            yield from self._seq(
                goals,
                i + 1,
                b2,
                ann_ops.combine(self.mode, ann, contrib),
                depth,
                ctx,
                token,
                counters,
                head_name,
            )

    def _fail_budget(self, g: FailGoal, b: Bindings, ctx: Ctx, head_name) -> Optional[int]:
        bound = g.bound
        if isinstance(bound, Var):
            val = walk(bound, b)
            if not isinstance(val, Num) or not isinstance(val.value, int) or val.value <= 0:
                raise EngineError("Fail bound %s is not a positive integer" % val)
            bound = val.value
        cap = None
        graph = self._graph(ctx)
        if graph is not None and head_name is not None:
            cap = graph.policy.loop_caps.get(head_name) or graph.policy.loop_caps.get("*")
        if bound is None:
            return cap
        return bound if cap is None else min(bound, cap)

    def _graph(self, ctx: Ctx) -> Optional[KnowledgeGraph]:
        if ctx.graph is None or self.network is None:
            return None
        return self.network.graph(ctx.graph)

    def _solve_call(self, g: Call, b: Bindings, depth: int, ctx: Ctx):
        if depth > self.max_depth:
            raise DepthLimitExceeded("resolution depth limit %d exceeded" % self.max_depth)
        if g.source is not None:
            if self.network is None:
                raise EngineError("#KG# directive without a network")
            bare = Call(g.name, g.args)
            for target in g.source:
                graph = self.network.graph(target)
                if ctx.graph is not None and ctx.graph != target:
                    if not self.network.has_link(ctx.graph, target):
                        raise LinkMissing(
                            "no call link from %r to %r" % (ctx.graph, target)
                        )
                yield from self._resolve_in(bare, b, depth, Ctx(target, False))
            return
        yield from self._resolve_in(g, b, depth, ctx)

    def _resolve_in(self, g: Call, b: Bindings, depth: int, ctx: Ctx):
        name, arity = g.name, len(g.args)
        graph = self._graph(ctx)
        lpp: Optional[Program] = graph.local_program if graph is not None else None
        if graph is not None:
            policy = graph.policy
            if name in policy.function_blocklist:
                raise AccessDenied(
                    "operation %r is blocked in graph %r" % (name, graph.name)
                )
            if name in STAT_BUILTINS and policy.denied_groups("deny-statistics"):
                raise AccessDenied(
                    "statistics are denied in graph %r" % graph.name
                )
        chain = [p for p in (lpp, self.program) if p is not None]
        defined = any(p.defines(name, arity) for p in chain)
        comparative = name in COMPARATIVE_RELATIONS and arity == 2
        if not defined and name in BUILTINS:
            yield from BUILTINS[name](self, g.args, b, depth, ctx)
            return
        has_relation = graph is not None and arity == 2 and (
            any(t.relation.lower() == name for t in graph.triplets)
            or comparative
        )
        if not defined and not has_relation and not comparative and name not in FUNCTIONS:
            raise UnknownPredicate("unknown predicate %s/%d" % (name, arity))

        # (1) local-program data, (2) triplets, (3) local-program rules,
        # then the calling program's data and rules.
        if lpp is not None:
            yield from self._match_facts(lpp, g, b)
        if graph is not None and arity == 2:
            yield from self._match_triplets(graph, g, b, ctx)
        if lpp is not None:
            yield from self._match_rules(lpp, g, b, depth, ctx, via_lpp=True)
        yield from self._match_facts(self.program, g, b)
        yield from self._match_rules(self.program, g, b, depth, ctx, via_lpp=False)

    def _match_one(self, fact: Call, g: Call, b: Bindings) -> Optional[Bindings]:
        if fact.name == g.name:
            b2 = unify(fact, g, b, self.occurs_check)
            if b2 is not None:
                return b2
        if (
            g.name in COMPARATIVE_RELATIONS
            and fact.name in COMPARATIVE_RELATIONS
            and len(g.args) == 2
            and len(fact.args) == 2
        ):
            return comparative_unify(fact, g, b, self.occurs_check)
        return None

    def _match_facts(self, prog: Program, g: Call, b: Bindings):
        comparative = g.name in COMPARATIVE_RELATIONS and len(g.args) == 2
        for fact in prog.data:
            if fact.name == g.name and fact.arity == g.arity:
                pass
            elif comparative and fact.name in COMPARATIVE_RELATIONS and fact.arity == 2:
                pass
            else:
                continue
            b2 = self._match_one(fact, g, b)
            if b2 is not None:
                yield b2, self._static(fact.annotation)

    def _match_triplets(self, graph: KnowledgeGraph, g: Call, b: Bindings, ctx: Ctx):
        if graph.policy.lpp_only and not ctx.via_lpp:
            return
        comparative = g.name in COMPARATIVE_RELATIONS
        for t in _policy_filter(graph, graph.triplets):
            fc = triplet_as_predicate(t)
            if fc.name != g.name and not (
                comparative and fc.name in COMPARATIVE_RELATIONS
            ):
                continue
            b2 = self._match_one(fc, g, b)
            if b2 is not None:
                yield b2, self._neutral()

    def _match_rules(self, prog: Program, g: Call, b: Bindings, depth: int, ctx: Ctx, via_lpp: bool):
        ctx2 = Ctx(ctx.graph, ctx.via_lpp or via_lpp)
        for rule in prog.rules:
            if rule.head.name != g.name or rule.head.arity != g.arity:
                continue
            head, body = self._rename(rule)
            b2 = unify(head, g, b, self.occurs_check)
            if b2 is None:
                continue
            head_static = self._static(head.annotation)
            tokens = []
            try:
                for conj in body:
                    t2, gen = self._activation(conj, b2, depth + 1, ctx2, rule.head.name)
                    tokens.append(t2)
                    for b3, body_ann in gen:
                        yield b3, ann_ops.propagate(head_static, [body_ann], self.mode)
            except _Cut as e:
                if e.token in tokens:
                    return
                raise

    # -- clause renaming ------------------------------------------------

    def _rename(self, rule: Rule) -> Tuple[Call, tuple]:
        self._rename_n += 1
        suffix = "__%d" % self._rename_n
        mapping: Dict[str, Var] = {}

        def rt(t: Term) -> Term:
            if isinstance(t, Var):
                if t.name not in mapping:
                    mapping[t.name] = Var(t.name + suffix)
                return mapping[t.name]
            if isinstance(t, Struct):
                return Struct(t.functor, tuple(rt(a) for a in t.args))
            return t

        def rg(goal):
            if isinstance(goal, Call):
                return Call(goal.name, tuple(rt(a) for a in goal.args), goal.annotation, goal.source)
            if isinstance(goal, FailGoal):
                if isinstance(goal.bound, Var):
                    return FailGoal(rt(goal.bound))
                return goal
            return Disj(tuple(tuple(rg(x) for x in alt) for alt in goal.alternatives))

        head = rg(rule.head)
        body = tuple(tuple(rg(x) for x in conj) for conj in rule.body)
        return head, body

    # -- term evaluation ------------------------------------------------

    def eval_term(self, t: Term, b: Bindings, ctx: Ctx) -> Term:
        t = resolve(t, b)
        if isinstance(t, Struct):
            f = t.functor
            args = [self.eval_term(a, b, ctx) for a in t.args]
            if f in ("+", "-", "*", "/") and len(args) == 2:
                x, y = (_num(a) for a in args)
                if f == "+":
                    return Num(x + y)
                if f == "-":
                    return Num(x - y)
                if f == "*":
                    return Num(x * y)
                if y == 0:
                    raise EngineError("division by zero")
                return Num(x / y)
            if f == "quotient" and len(args) == 2:
                y = _num(args[1])
                if y == 0:
                    raise EngineError("division by zero")
                return Num(_num(args[0]) / y)
            if f == "size" and len(args) == 1:
                return Num(len(_objlist(args[0])))
            if f == "volume" and len(args) == 1:
                a = args[0]
                if isinstance(a, Struct) and a.functor == "buffer" and len(a.args) == 1:
                    key = _atom_name(a.args[0])
                    return Num(len(self.session.buffers.get(key, [])))
                return Num(len(_objlist(a)))
            if f == "attribute-name" and len(args) == 1:
                names = self.program.data_lists.get("attribute")
                if names is None:
                    raise EngineError("no 'attribute' data list declared")
                j = int(_num(args[0]))
                if not 1 <= j <= len(names):
                    raise EngineError("attribute index %d out of range" % j)
                return names[j - 1]
            if f in ("head", "relation", "tail", "v-head", "v-relation", "v-tail") and len(args) == 1:
                w = args[0]
                want = "vec" if f.startswith("v-") else "rdf"
                if isinstance(w, Struct) and w.functor == want and len(w.args) == 3:
                    idx = {"head": 0, "relation": 1, "tail": 2}[f.replace("v-", "")]
                    return w.args[idx]
                raise EngineError("%s applied to non-triplet term %s" % (f, w))
            if f == "v-distance" and len(args) == 2:
                import numpy as np

                x = _vector(args[0])
                y = _vector(args[1])
                return Num(float(np.linalg.norm(np.asarray(x) - np.asarray(y))))
            return Struct(f, tuple(args))
        return t


def _goal_vars(goals, acc):
    for g in goals:
        if isinstance(g, Call):
            for a in g.args:
                term_vars(a, acc)
        elif isinstance(g, FailGoal) and isinstance(g.bound, Var):
            acc.add(g.bound.name)
        elif isinstance(g, Disj):
            for alt in g.alternatives:
                _goal_vars(alt, acc)


def _fmt_goal(g: Call, b: Bindings) -> str:
    args = ", ".join(str(resolve(a, b)) for a in g.args)
    return "%s(%s)" % (g.name, args) if g.args else g.name


def _num(t: Term) -> float:
    if isinstance(t, Num):
        return t.value
    raise EngineError("expected a number, got %s" % t)


def _atom_name(t: Term) -> str:
    if isinstance(t, Atom):
        return t.name.lower()
    raise EngineError("expected a symbol, got %s" % t)


def _objlist(t: Term) -> list:
    if isinstance(t, Obj) and isinstance(t.value, list):
        return t.value
    raise EngineError("expected a host list, got %s" % t)


def _vector(t: Term):
    if isinstance(t, Obj):
        return t.value
    raise EngineError("expected a vector, got %s" % t)


# -- built-in predicates -------------------------------------------------


def _u(engine, x: Term, y: Term, b: Bindings):
    b2 = unify_terms(x, y, b, engine.occurs_check)
    if b2 is not None:
        yield b2, engine._neutral()


def _visible(engine: Engine, ctx: Ctx):
    graph = engine._graph(ctx)
    if graph is None:
        return None
    if graph.policy.lpp_only and not ctx.via_lpp:
        raise AccessDenied(
            "graph %r may only be visited through its local program" % graph.name
        )
    return _policy_filter(graph, graph.triplets)


def _bi_tr1(functor):
    def fn(engine, args, b, depth, ctx):
        triplets = _visible(engine, ctx)
        if triplets is None:
            return
        for t in triplets:
            yield from _u(
                engine, args[0], Struct(functor, (t.head, Atom(t.relation), t.tail)), b
            )

    return fn


def _bi_tr2(engine, args, b, depth, ctx):
    triplets = _visible(engine, ctx)
    if triplets is None:
        return
    for t in triplets:
        b2 = unify_terms(args[0], t.head, b, engine.occurs_check)
        b2 = unify_terms(args[1], Atom(t.relation), b2, engine.occurs_check)
        b2 = unify_terms(args[2], t.tail, b2, engine.occurs_check)
        if b2 is not None:
            yield b2, engine._neutral()


def _bi_component(slot, functor="rdf"):
    idx = {"head": 0, "relation": 1, "tail": 2}[slot]

    def fn(engine, args, b, depth, ctx):
        w = resolve(args[0], b)
        if isinstance(w, Struct) and w.functor == functor and len(w.args) == 3:
            yield from _u(engine, args[1], w.args[idx], b)

    return fn


def _named_graph(engine: Engine, t: Term, b: Bindings) -> Optional[KnowledgeGraph]:
    t = walk(t, b)
    if isinstance(t, Atom) and engine.network is not None:
        name = t.name
        if name in engine.network.graphs:
            return engine.network.graphs[name]
    return None


def _bi_is_class(engine, args, b, depth, ctx):
    graph = _named_graph(engine, args[1], b)
    if graph is None:
        return
    for cname in graph.classes:
        yield from _u(engine, args[0], Atom(cname), b)


def _bi_is_schema(engine, args, b, depth, ctx):
    graph = _named_graph(engine, args[1], b)
    if graph is None:
        return
    for sname in sorted(graph.schemas):
        yield from _u(engine, args[0], Atom(sname), b)


def _class_members(engine, graph, cname_term, b):
    cname = walk(cname_term, b)
    if isinstance(cname, Atom):
        items = [(cname.name.lower(), m) for m in graph.members(cname.name)]
    else:
        items = [(c, m) for c, ms in graph.classes.items() for m in ms]
    return items


def _bi_in_class(engine, args, b, depth, ctx):
    graph = engine._graph(ctx)
    if graph is None:
        return
    for cname, member in _class_members(engine, graph, args[1], b):
        b2 = unify_terms(args[1], Atom(cname), b, engine.occurs_check)
        b2 = unify_terms(args[0], member, b2, engine.occurs_check)
        if b2 is not None:
            yield b2, engine._neutral()


def _bi_is_class_of(engine, args, b, depth, ctx):
    graph = _named_graph(engine, args[2], b)
    if graph is None:
        return
    for cname, member in _class_members(engine, graph, args[1], b):
        b2 = unify_terms(args[1], Atom(cname), b, engine.occurs_check)
        b2 = unify_terms(args[0], member, b2, engine.occurs_check)
        if b2 is not None:
            yield b2, engine._neutral()


def _bi_output(engine, args, b, depth, ctx):
    # An argument holding a triplet pattern with free variables turns
    # Output into an enumerator: one line (and one solution) per visible
    # triplet matching the pattern, which is what drives Fail loops.
    pattern = None
    for a in args:
        r = resolve(a, b)
        if (
            isinstance(r, Struct)
            and r.functor in ("rdf", "vec")
            and len(r.args) == 3
            and term_vars(r)
        ):
            pattern = r
            break
    if pattern is None:
        engine.session.write(", ".join(str(engine.eval_term(a, b, ctx)) for a in args))
        yield b, engine._neutral()
        return
    triplets = _visible(engine, ctx)
    if triplets is None:
        return
    for t in triplets:
        b2 = unify_terms(pattern.args[0], t.head, b, engine.occurs_check)
        b2 = unify_terms(pattern.args[1], Atom(t.relation), b2, engine.occurs_check)
        b2 = unify_terms(pattern.args[2], t.tail, b2, engine.occurs_check)
        if b2 is not None:
            engine.session.write(
                ", ".join(str(engine.eval_term(a, b2, ctx)) for a in args)
            )
            yield b2, engine._neutral()


def _bi_true(engine, args, b, depth, ctx):
    yield b, engine._neutral()


def _bi_outputv_lpp(engine, args, b, depth, ctx):
    w = resolve(args[0], b)
    if not (isinstance(w, Struct) and w.functor == "vec" and len(w.args) == 3):
        raise EngineError("outputV-LPP expects a Vec(X, Y, Z) argument")
    graph = engine._graph(ctx)
    if graph is None:
        return
    for t in _policy_filter(graph, graph.triplets):
        b2 = unify_terms(w.args[0], t.head, b, engine.occurs_check)
        b2 = unify_terms(w.args[1], Atom(t.relation), b2, engine.occurs_check)
        b2 = unify_terms(w.args[2], t.tail, b2, engine.occurs_check)
        if b2 is not None:
            engine.session.write(
                str(Struct("vec", (t.head, Atom(t.relation), t.tail)))
            )
            yield b2, engine._neutral()


def _bi_print(engine, args, b, depth, ctx):
    engine.session.write(" ".join(str(engine.eval_term(a, b, ctx)) for a in args))
    yield b, engine._neutral()


def _bi_count(engine, args, b, depth, ctx):
    yield from _u(engine, args[0], Num(engine.session.bump("count")), b)


def _dataset(engine: Engine):
    if not engine.session.datasets:
        return []
    if "default" in engine.session.datasets:
        return engine.session.datasets["default"]
    return next(iter(engine.session.datasets.values()))


def _bi_input(engine, args, b, depth, ctx):
    for mt in _dataset(engine):
        yield from _u(engine, args[0], Obj(mt), b)


def _bi_positive(engine, args, b, depth, ctx):
    from .mtuples import POSITIVE

    if len(args) == 1:
        a = walk(args[0], b)
        if isinstance(a, Obj) and getattr(a.value, "label", None) == POSITIVE:
            yield b, engine._neutral()
        return
    s = walk(args[0], b)
    if not isinstance(s, Obj) or not isinstance(s.value, list):
        raise EngineError("Positive/2 expects a neighbour list")
    kept = [entry for entry in s.value if entry[1] == POSITIVE]
    yield from _u(engine, args[1], Obj(kept), b)


def _bi_transform(engine, args, b, depth, ctx):
    from .mtuples import derived_record

    a = walk(args[0], b)
    if not isinstance(a, Obj):
        raise EngineError("Transform expects a record")
    schema = engine.session.schema
    if schema is None:
        raise EngineError("no dataset schema loaded")
    pairs = list(derived_record(a.value, schema).items())
    yield from _u(engine, args[1], Obj(pairs), b)


def _bi_distribute(engine, args, b, depth, ctx):
    a = walk(args[0], b)
    if not isinstance(a, Obj) or not isinstance(a.value, list):
        raise EngineError("Distribute expects attribute pairs")
    for attr, value in a.value:
        engine.session.buffers.setdefault(attr, []).append(value)
    yield from _u(engine, args[1], Obj(engine.session.buffers), b)


def _bi_filter(engine, args, b, depth, ctx):
    spec = engine.session.bad_spec
    if spec is None:
        raise EngineError("no bad-value specification loaded")
    for attr, values in engine.session.buffers.items():
        pred = spec.get(attr)
        if pred is None:
            continue
        engine.session.buffers[attr] = [v for v in values if pred(v)]
    yield b, engine._neutral()


def _bi_display(engine, args, b, depth, ctx):
    total = engine.eval_term(args[1], b, ctx)
    n = _num(total)
    if n <= 0:
        raise EngineError("Display needs a positive count")
    names = engine.program.data_lists.get("attribute")
    keys = [_atom_name(t) for t in names] if names else sorted(engine.session.buffers)
    for key in keys:
        rate = len(engine.session.buffers.get(key, [])) / n
        engine.session.write("%s: %s" % (key, rate))
    yield b, engine._neutral()


def _bi_increase(engine, args, b, depth, ctx):
    """Bound argument: no-op.  Unbound: enumerate 1, 2, 3, … as choice
    points, the counter idiom of bounded Fail loops."""
    a = walk(args[0], b)
    if not isinstance(a, Var):
        yield b, engine._neutral()
        return
    i = 0
    while True:
        i += 1
        b2 = unify_terms(a, Num(i), b, engine.occurs_check)
        if b2 is None:
            return
        yield b2, engine._neutral()


def _bi_collect(engine, args, b, depth, ctx):
    b2 = unify_terms(args[0], Obj(engine.session.buffers), b, engine.occurs_check)
    if b2 is None:
        return
    count = engine.session.counters.get("count", 0)
    yield from _u(engine, args[1], Num(count), b2)


def _space(engine: Engine, t: Term, b: Bindings):
    name = walk(t, b)
    if not isinstance(name, Atom):
        raise EngineError("expected a vector-space name, got %s" % name)
    space = engine.session.spaces.get(name.name)
    if space is None:
        raise EngineError("unknown vector space %r" % name.name)
    return space


def _bi_construct(engine, args, b, depth, ctx):
    from .embedding import construct_virtual_vector

    data = walk(args[0], b)
    record = None
    if isinstance(data, Obj):
        record = data.value
    elif isinstance(data, Struct) and data.functor == "data" and len(data.args) == 1:
        rid = walk(data.args[0], b)
        if isinstance(rid, Atom):
            record = engine.session.records.get(rid.name)
    if record is None:
        raise EngineError("Construct: unknown record %s" % data)
    space = _space(engine, args[1], b)
    j = walk(args[2], b)
    if not isinstance(j, Num):
        raise EngineError("Construct needs a numeric J")
    vv = construct_virtual_vector(space, record, int(j.value))
    yield from _u(engine, args[3], Obj(vv.vector), b)


def _bi_nearest(engine, args, b, depth, ctx):
    from .embedding import knn_neighbors

    r = walk(args[0], b)
    if not isinstance(r, Obj):
        raise EngineError("Nearest expects a vector")
    space = _space(engine, args[1], b)
    k = walk(args[2], b)
    if not isinstance(k, Num):
        raise EngineError("Nearest needs a numeric K")
    neighbors = knn_neighbors(space, r.value, int(k.value))
    yield from _u(engine, args[3], Obj([(nid, label) for nid, label in neighbors]), b)


def _bi_divide(engine, args, b, depth, ctx):
    x = _num(engine.eval_term(args[0], b, ctx))
    y = _num(engine.eval_term(args[1], b, ctx))
    if y == 0:
        raise EngineError("division by zero")
    yield from _u(engine, args[2], Num(x / y), b)


def _bi_embed(engine, args, b, depth, ctx):
    from .embedding import EmbedConfig, train_transmeth

    alg = walk(args[0], b)
    dataset_name = walk(args[1], b)
    space_name = walk(args[2], b)
    n = walk(args[3], b)
    if not (
        isinstance(alg, Atom)
        and isinstance(dataset_name, Atom)
        and isinstance(space_name, Atom)
        and isinstance(n, Num)
    ):
        raise EngineError("Embed expects (algorithm, kg, kg-v, dimension)")
    data = engine.session.datasets.get(dataset_name.name)
    if not data:
        raise EngineError("unknown dataset %r" % dataset_name.name)
    m = len(data[0].triplets)
    config = EmbedConfig(m=m, n=int(n.value), seed=engine.session.seed)
    engine.session.spaces[space_name.name] = train_transmeth(data, config)
    yield b, engine._neutral()


def _bi_t_to_v(engine, args, b, depth, ctx):
    space = _space(engine, args[2], b)
    x = walk(args[0], b)
    if not isinstance(x, Atom) or x.name not in space.hh:
        raise EngineError("T-to-V: unknown data unit %s" % x)
    yield from _u(engine, args[1], Obj(space.hh[x.name].combined), b)


def _bi_v_to_t(engine, args, b, depth, ctx):
    from .embedding import knn_neighbors

    space = _space(engine, args[2], b)
    y = walk(args[0], b)
    if not isinstance(y, Obj):
        raise EngineError("V-to-T expects a vector")
    (nid, _label), = knn_neighbors(space, y.value, 1)
    yield from _u(engine, args[1], Atom(nid), b)


def _bi_v_op(engine, args, b, depth, ctx):
    import numpy as np

    x = walk(args[0], b)
    y = walk(args[1], b)
    if not isinstance(x, Obj) or not isinstance(y, Obj):
        raise EngineError("V-Op expects two vectors")
    yield from _u(engine, args[2], Obj(np.asarray(x.value) + np.asarray(y.value)), b)


def _bi_cnn(engine, args, b, depth, ctx):
    space = _space(engine, args[0], b)
    x = walk(args[1], b)
    if not isinstance(x, Atom) or x.name not in space.hh:
        raise EngineError("cnn: unknown sample %s" % x)
    yield from _u(engine, args[2], Obj(space.hh[x.name].combined), b)


def _bi_is(engine, args, b, depth, ctx):
    value = engine.eval_term(args[1], b, ctx)
    if not isinstance(value, Num):
        raise EngineError("is/2 right side did not evaluate to a number")
    yield from _u(engine, args[0], value, b)


def _bi_not(engine, args, b, depth, ctx):
    t = resolve(args[0], b)
    if isinstance(t, Struct):
        goal = Call(t.functor, t.args)
    elif isinstance(t, Atom):
        goal = Call(t.name.lower())
    else:
        raise EngineError("not/1 expects a callable term")
    for _ in engine._solve_call(goal, b, depth + 1, ctx):
        return
    yield b, engine._neutral()


BUILTINS = {
    "true": _bi_true,
    "tr1": _bi_tr1("rdf"),
    "v-tr1": _bi_tr1("vec"),
    "tr2": _bi_tr2,
    "v-tr2": _bi_tr2,
    "head": _bi_component("head"),
    "relation": _bi_component("relation"),
    "tail": _bi_component("tail"),
    "v-head": _bi_component("head", "vec"),
    "v-relation": _bi_component("relation", "vec"),
    "v-tail": _bi_component("tail", "vec"),
    "is-class": _bi_is_class,
    "is-schema": _bi_is_schema,
    "in-class": _bi_in_class,
    "is-class-of": _bi_is_class_of,
    "output": _bi_output,
    "output-v": _bi_output,
    "outputv": _bi_output,
    "outputv-lpp": _bi_outputv_lpp,
    "print": _bi_print,
    "count": _bi_count,
    "input": _bi_input,
    "positive": _bi_positive,
    "transform": _bi_transform,
    "distribute": _bi_distribute,
    "filter": _bi_filter,
    "display": _bi_display,
    "increase": _bi_increase,
    "collect": _bi_collect,
    "construct": _bi_construct,
    "nearest": _bi_nearest,
    "divide": _bi_divide,
    "embed": _bi_embed,
    "t-to-v": _bi_t_to_v,
    "v-to-t": _bi_v_to_t,
    "v-op": _bi_v_op,
    "cnn": _bi_cnn,
    "is": _bi_is,
    "not": _bi_not,
}
