"""Named triplet graphs, network topology and federated access policies.

Triple files are UTF-8, one record per line:

    (head, relation, tail)      # a triplet
    class(Person, Zhang_Yimou)  # class membership
    schema(Films)               # schema declaration
    # comment

Identifiers in triple files are data, so bare capitalised names are atoms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .errors import AccessDenied, DataError, LinkMissing, ParseError
from .parser import _Parser, tokenize
from .terms import Atom, Struct, Term, Triplet


@dataclass
class AccessPolicy:
    """Federated protection at entity, group, graph and function level."""

    entity_blocklist: Set[Term] = field(default_factory=set)
    group_rules: Set[Tuple[str, str]] = field(default_factory=set)  # (name, mode)
    lpp_only: bool = False
    function_blocklist: Set[str] = field(default_factory=set)
    loop_caps: Dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        for name, mode in self.group_rules:
            if mode not in ("deny-read", "deny-statistics"):
                raise DataError("unknown group rule mode %r" % mode)
        for ctx, cap in self.loop_caps.items():
            if not isinstance(cap, int) or cap <= 0:
                raise DataError("loop cap for %r must be a positive integer" % ctx)

    def denied_groups(self, mode: str) -> Set[str]:
        return {name for name, m in self.group_rules if m == mode}


@dataclass
class KnowledgeGraph:
    name: str
    triplets: List[Triplet] = field(default_factory=list)
    classes: Dict[str, Set[Term]] = field(default_factory=dict)
    schemas: Set[str] = field(default_factory=set)
    policy: AccessPolicy = field(default_factory=AccessPolicy)
    local_program: Optional[object] = None  # parsed Program (the graph's LPP)

    def members(self, class_name: str) -> Set[Term]:
        return self.classes.get(class_name.lower(), set())

    def in_class(self, entity: Term, class_name: str) -> bool:
        return entity in self.members(class_name)


class KGNetwork:
    """Named graphs plus directed call links."""

    def __init__(self):
        self.graphs: Dict[str, KnowledgeGraph] = {}
        self.links: Set[Tuple[str, str]] = set()

    def add_graph(self, graph: KnowledgeGraph):
        if graph.name in self.graphs:
            raise DataError("duplicate graph name %r" % graph.name)
        self.graphs[graph.name] = graph

    def add_link(self, caller: str, callee: str):
        for name in (caller, callee):
            if name not in self.graphs:
                raise DataError("link endpoint %r names no graph" % name)
        self.links.add((caller, callee))

    def has_link(self, caller: str, callee: str) -> bool:
        return (caller, callee) in self.links

    def graph(self, name: str) -> KnowledgeGraph:
        if name not in self.graphs:
            raise DataError("unknown graph %r" % name)
        return self.graphs[name]


# -- triple files -------------------------------------------------------


def _strip_comment(line: str) -> str:
    out = []
    quoted = False
    i = 0
    while i < len(line):
        c = line[i]
        if c == "'" and (i == 0 or line[i - 1] != "\\"):
            quoted = not quoted
        if c == "#" and not quoted:
            break
        out.append(c)
        i += 1
    return "".join(out)


def parse_triple_line(line: str, lineno: int) -> Tuple[str, object]:
    """Returns ('triplet', Triplet), ('class', (name, member)) or ('schema', name)."""
    try:
        p = _Parser(tokenize(line), data_mode=True)
        if p.at("("):
            p.advance()
            head = p.parse_term()
            p.expect(",")
            rel = p.parse_term()
            p.expect(",")
            tail = p.parse_term()
            p.expect(")")
            p.expect("eof")
            if not isinstance(rel, Atom):
                raise ParseError("triplet relation must be a symbol")
            return "triplet", Triplet(head, rel.name, tail)
        term = p.parse_term()
        p.expect("eof")
    except ParseError as exc:
        raise ParseError("bad triple line: %s" % exc, lineno) from None
    if isinstance(term, Struct) and term.functor == "class" and len(term.args) == 2:
        cname = term.args[0]
        if not isinstance(cname, Atom):
            raise ParseError("class name must be a symbol", lineno)
        return "class", (cname.name.lower(), term.args[1])
    if isinstance(term, Struct) and term.functor == "schema" and len(term.args) == 1:
        sname = term.args[0]
        if not isinstance(sname, Atom):
            raise ParseError("schema name must be a symbol", lineno)
        return "schema", sname.name.lower()
    raise ParseError("unrecognized triple-file record", lineno)


def load_triples(source: str, name: str) -> KnowledgeGraph:
    graph = KnowledgeGraph(name=name)
    with open(source, encoding="utf-8") as fh:
        text = fh.read()
    load_triples_text(text, graph)
    return graph


def load_triples_text(text: str, graph: KnowledgeGraph) -> KnowledgeGraph:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        kind, value = parse_triple_line(line, lineno)
        if kind == "triplet":
            graph.triplets.append(value)
        elif kind == "class":
            cname, member = value
            graph.classes.setdefault(cname, set()).add(member)
        else:
            graph.schemas.add(value)
    if not graph.triplets:
        raise DataError("empty graph %r" % graph.name)
    entities = set()
    for t in graph.triplets:
        entities.add(t.head)
        entities.add(t.tail)
    for cname, members in graph.classes.items():
        for m in members:
            if m not in entities:
                raise DataError(
                    "class %r member %s appears in no triplet of graph %r"
                    % (cname, m, graph.name)
                )
    return graph


# -- queries ------------------------------------------------------------


def _mentions(term: Term, entity: Term) -> bool:
    if term == entity:
        return True
    if isinstance(term, Struct):
        return any(_mentions(a, entity) for a in term.args)
    return False


def triplet_mentions(t: Triplet, entity: Term) -> bool:
    return _mentions(t.head, entity) or _mentions(t.tail, entity)


def _policy_filter(graph: KnowledgeGraph, triplets: Iterable[Triplet]) -> List[Triplet]:
    policy = graph.policy
    deny_read = policy.denied_groups("deny-read")
    if any(s in deny_read for s in graph.schemas):
        return []
    blocked_members: Set[Term] = set()
    for cname in deny_read:
        blocked_members |= graph.members(cname)
    out = []
    for t in triplets:
        if any(triplet_mentions(t, e) for e in policy.entity_blocklist):
            continue
        if any(_mentions(t.head, m) or _mentions(t.tail, m) for m in blocked_members):
            continue
        out.append(t)
    return out


def query_triples(
    graph: KnowledgeGraph,
    pattern: Tuple[Optional[Term], Optional[str], Optional[Term]],
    requester: Optional[str] = None,
    network: Optional[KGNetwork] = None,
    via_lpp: bool = False,
) -> List[Triplet]:
    """Pattern slots set to None act as wildcards.  `requester` names the
    calling graph; None means the top-level session."""
    if (
        requester is not None
        and network is not None
        and requester != graph.name
        and not network.has_link(requester, graph.name)
    ):
        raise LinkMissing("no call link from %r to %r" % (requester, graph.name))
    if graph.policy.lpp_only and not via_lpp:
        raise AccessDenied(
            "graph %r may only be visited through its local program" % graph.name
        )
    head, relation, tail = pattern
    rel = relation.lower() if relation is not None else None
    hits = [
        t
        for t in graph.triplets
        if (head is None or t.head == head)
        and (rel is None or t.relation.lower() == rel)
        and (tail is None or t.tail == tail)
    ]
    return _policy_filter(graph, hits)


def snapshot(
    graphs: Sequence[KnowledgeGraph],
    entity: Term,
    caps: Optional[Tuple[int, int]] = None,
) -> List[Tuple[str, Triplet]]:
    """All triplets with `entity` in head position (at most caps[0] in total),
    then all with `entity` in tail position (at most caps[1]); grouped per
    graph, tagged with graph of origin."""
    if not any(g.in_class(entity, "person") for g in graphs):
        return []
    n1, n2 = caps if caps is not None else (None, None)
    heads_taken = 0
    tails_taken = 0
    out: List[Tuple[str, Triplet]] = []
    for g in graphs:
        visible = _policy_filter(g, g.triplets) if not g.policy.lpp_only else []
        for t in visible:
            if t.head == entity:
                if n1 is None or heads_taken < n1:
                    out.append((g.name, t))
                    heads_taken += 1
        for t in visible:
            if t.tail == entity:
                if n2 is None or tails_taken < n2:
                    out.append((g.name, t))
                    tails_taken += 1
    return out
