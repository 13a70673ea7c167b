"""Triplet graphs: file parsing, access policies and snapshots."""

from __future__ import annotations

import pytest

from kgnp.errors import AccessDenied, DataError, LinkMissing, ParseError
from kgnp.store import (
    AccessPolicy,
    KGNetwork,
    KnowledgeGraph,
    load_triples_text,
    parse_triple_line,
    query_triples,
    snapshot,
)
from kgnp.terms import Atom, Num, Triplet

BASE = """
(Li, born-in, Beijing)
(Li, directed, Hero)
(Gong, starred-in, Hero)
(Board, awarded, Li)  # an inbound edge
class(Person, Li)
class(Person, Gong)
class(Secret, Gong)
schema(Films)
"""


def graph(policy=None, name="g", text=BASE):
    g = KnowledgeGraph(name=name)
    if policy is not None:
        g.policy = policy
    load_triples_text(text, g)
    return g


# -- parsing --------------------------------------------------------------


def test_parse_triplet_line():
    kind, t = parse_triple_line("(Li, directed, Hero)", 1)
    assert kind == "triplet"
    assert t == Triplet(Atom("Li"), "directed", Atom("Hero"))


def test_parse_numeric_tail():
    _, t = parse_triple_line("(Hero, released, 2002)", 1)
    assert t.tail == Num(2002)


def test_parse_class_and_schema():
    assert parse_triple_line("class(Person, Li)", 1) == ("class", ("person", Atom("Li")))
    assert parse_triple_line("schema(Films)", 1) == ("schema", "films")


@pytest.mark.parametrize(
    "line",
    ["(a, b)", "(a, b, c, d)", "class(X)", "schema()", "just-an-atom", "(a, 7, c)"],
)
def test_parse_bad_lines(line):
    with pytest.raises(ParseError):
        parse_triple_line(line, 1)


def test_comments_and_blank_lines_skipped():
    g = graph()
    assert len(g.triplets) == 4
    assert g.members("person") == {Atom("Li"), Atom("Gong")}
    assert g.schemas == {"films"}


def test_empty_graph_rejected():
    with pytest.raises(DataError):
        graph(text="# nothing here\n")


def test_class_member_must_appear():
    with pytest.raises(DataError):
        graph(text="(a, r, b)\nclass(Person, Ghost)\n")


# -- queries and policy ---------------------------------------------------


def test_query_wildcards():
    g = graph()
    assert len(query_triples(g, (None, None, None))) == 4
    hits = query_triples(g, (Atom("Li"), None, None))
    assert {t.relation for t in hits} == {"born-in", "directed"}
    assert query_triples(g, (None, "directed", Atom("Hero")))[0].head == Atom("Li")
    assert query_triples(g, (None, "nope", None)) == []


def test_entity_blocklist():
    g = graph(AccessPolicy(entity_blocklist={Atom("Hero")}))
    hits = query_triples(g, (None, None, None))
    assert all(t.head != Atom("Hero") and t.tail != Atom("Hero") for t in hits)
    assert len(hits) == 2


def test_deny_read_group():
    g = graph(AccessPolicy(group_rules={("secret", "deny-read")}))
    hits = query_triples(g, (None, None, None))
    assert all(Atom("Gong") not in (t.head, t.tail) for t in hits)


def test_deny_read_schema_hides_graph():
    g = graph(AccessPolicy(group_rules={("films", "deny-read")}))
    assert query_triples(g, (None, None, None)) == []


def test_lpp_only_gate():
    g = graph(AccessPolicy(lpp_only=True))
    with pytest.raises(AccessDenied):
        query_triples(g, (None, None, None))
    assert len(query_triples(g, (None, None, None), via_lpp=True)) == 4


def test_bad_policy_values():
    with pytest.raises(DataError):
        AccessPolicy(group_rules={("g", "deny-write")})
    with pytest.raises(DataError):
        AccessPolicy(loop_caps={"r": 0})


# -- network topology -----------------------------------------------------


def network_pair():
    net = KGNetwork()
    net.add_graph(graph(name="a"))
    net.add_graph(graph(name="b"))
    net.add_link("a", "b")
    return net


def test_link_required_between_graphs():
    net = network_pair()
    assert query_triples(net.graph("b"), (None, None, None), requester="a", network=net)
    with pytest.raises(LinkMissing):
        query_triples(net.graph("a"), (None, None, None), requester="b", network=net)


def test_duplicate_graph_and_bad_link():
    net = network_pair()
    with pytest.raises(DataError):
        net.add_graph(graph(name="a"))
    with pytest.raises(DataError):
        net.add_link("a", "zzz")


# -- snapshots ------------------------------------------------------------


def big_graph(n_heads, n_tails, name="big"):
    lines = ["class(Person, Li)"]
    for i in range(n_heads):
        lines.append("(Li, likes, t%d)" % i)
    for i in range(n_tails):
        lines.append("(s%d, knows, Li)" % i)
    return graph(name=name, text="\n".join(lines))


def test_snapshot_order_and_caps():
    g = big_graph(150, 150)
    out = snapshot([g], Atom("Li"), caps=(120, 130))
    assert len(out) == 250
    heads = [t for _, t in out if t.head == Atom("Li")]
    tails = [t for _, t in out if t.tail == Atom("Li")]
    assert len(heads) == 120 and len(tails) == 130
    # head-position block comes first
    assert all(t.head == Atom("Li") for _, t in out[:120])


def test_snapshot_uncapped():
    g = big_graph(3, 2)
    out = snapshot([g], Atom("Li"))
    assert len(out) == 5


def test_snapshot_requires_person():
    g = graph(text="(a, r, b)\n")
    assert snapshot([g], Atom("a")) == []


def test_snapshot_multi_graph_tagged():
    g1 = big_graph(2, 1, name="one")
    g2 = big_graph(1, 2, name="two")
    out = snapshot([g1, g2], Atom("Li"))
    assert {name for name, _ in out} == {"one", "two"}
    assert len(out) == 6
