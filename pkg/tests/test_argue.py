"""Preference competition: set orders, profiles, ranking and parsers."""

from __future__ import annotations

import random

import pytest

from kgnp.argue import (
    Argument,
    Characteristic,
    CompetitorProfile,
    ComparisonGraph,
    ElementOrder,
    Session,
    competitor_profiles,
    element_le,
    parse_order,
    parse_session,
    poset_compare,
    rank_competitors,
)
from kgnp.errors import DataError, ParseError

MODES = ("angelic", "demonic", "complete")


# -- independent oracle ----------------------------------------------------


def random_poset(rng, size):
    """A random partial order on c0..c{size-1} via transitive closure of a
    forward-edge DAG."""
    elems = ["c%d" % i for i in range(size)]
    reach = {e: {e} for e in elems}
    for i in range(size):
        for j in range(i + 1, size):
            if rng.random() < 0.4:
                reach[elems[i]].add(elems[j])
    changed = True
    while changed:
        changed = False
        for e in elems:
            for f in list(reach[e]):
                if not reach[f] <= reach[e]:
                    reach[e] |= reach[f]
                    changed = True
    return elems, reach


def oracle_compare(s1, s2, reach, mode):
    le = lambda u, v: v in reach[u]
    if mode == "angelic":
        return all(any(le(u, v) for v in s2) for u in s1)
    if mode == "demonic":
        return all(any(le(u, v) for u in s1) for v in s2)
    return oracle_compare(s1, s2, reach, "angelic") and oracle_compare(
        s1, s2, reach, "demonic"
    )


def order_from_reach(elems, reach):
    return ElementOrder(
        elements=set(elems),
        le_pairs={(a, b) for a in elems for b in reach[a]},
    )


def random_subset(rng, elems):
    s = {e for e in elems if rng.random() < 0.5}
    return s or {rng.choice(elems)}


def test_set_orders_match_quantifier_oracle():
    rng = random.Random(13)
    checked = 0
    while checked < 10_000:
        elems, reach = random_poset(rng, rng.randint(2, 6))
        order = order_from_reach(elems, reach)
        for _ in range(10):
            s1 = random_subset(rng, elems)
            s2 = random_subset(rng, elems)
            for mode in MODES:
                assert poset_compare(s1, s2, order, mode) == oracle_compare(
                    s1, s2, reach, mode
                ), (s1, s2, mode)
                checked += 1


def test_set_orders_reflexive_transitive():
    rng = random.Random(17)
    for _ in range(250):
        elems, reach = random_poset(rng, rng.randint(2, 5))
        order = order_from_reach(elems, reach)
        sets = [random_subset(rng, elems) for _ in range(4)]
        for mode in MODES:
            for s in sets:
                assert poset_compare(s, s, order, mode)
            for a in sets:
                for b in sets:
                    for c in sets:
                        if poset_compare(a, b, order, mode) and poset_compare(
                            b, c, order, mode
                        ):
                            assert poset_compare(a, c, order, mode)


def test_set_orders_not_antisymmetric_on_sets():
    """{1,2} and {2} relate both ways under the angelic order yet differ —
    the order is a preorder on sets, which is why ranking merges nodes."""
    assert poset_compare({"1", "2"}, {"2"}, None, "angelic")
    assert poset_compare({"2"}, {"1", "2"}, None, "angelic")


def test_complete_iff_angelic_and_demonic():
    rng = random.Random(19)
    for _ in range(500):
        elems, reach = random_poset(rng, rng.randint(2, 5))
        order = order_from_reach(elems, reach)
        s1 = random_subset(rng, elems)
        s2 = random_subset(rng, elems)
        assert poset_compare(s1, s2, order, "complete") == (
            poset_compare(s1, s2, order, "angelic")
            and poset_compare(s1, s2, order, "demonic")
        )


def test_numeric_truth_table():
    s1, s2 = {"4", "6"}, {"2", "8"}
    assert poset_compare(s1, s2, None, "angelic") is True
    assert poset_compare(s2, s1, None, "angelic") is False
    assert poset_compare(s1, s2, None, "demonic") is False
    assert poset_compare(s2, s1, None, "demonic") is True
    assert poset_compare(s1, s2, None, "complete") is False


def test_empty_sets_rejected():
    with pytest.raises(DataError):
        poset_compare(set(), {"1"}, None, "angelic")
    with pytest.raises(DataError):
        poset_compare({"1"}, set(), None, "demonic")


# -- element comparison ----------------------------------------------------


def test_element_le_numeric_and_percent():
    assert element_le("40", "70")
    assert not element_le("70", "40")
    assert element_le(
        Characteristic("cure-rate", "40%"), Characteristic("cure-rate", "70%")
    )
    assert element_le("70", "70")


def test_element_le_sorts_never_mix():
    a = Characteristic("cure-rate", "40")
    b = Characteristic("cost", "70")
    assert not element_le(a, b)
    assert not element_le(b, a)


def test_element_le_words_need_declared_order():
    order = parse_order("poor <= fair <= good.")
    assert element_le("poor", "good", order)
    assert not element_le("good", "poor", order)
    with pytest.raises(DataError):
        element_le("poor", "stellar", order)
    with pytest.raises(DataError):
        element_le("poor", "good")  # no order at all


def test_element_le_numeric_vs_word():
    order = parse_order("poor <= good.")
    assert not element_le("40", Characteristic(None, "good"), order)


def test_order_sort_tags_apply_to_plain_words():
    order = parse_order("slow <= fast.\nsort fast : speed.\nsort slow : speed.")
    a = Characteristic(None, "slow")
    b = Characteristic("speed", "fast")
    assert element_le(a, b, order)  # the tag lifts the bare word into speed
    assert not element_le(a, Characteristic("cost", "fast"), order)


# -- parsers ---------------------------------------------------------------

SESSION = """
# consultation transcript
d1/A1 cure-rate(40%), cost(high) <- regimen-a.
d2/A2 cure-rate(70%) <- regimen-b;
d1/A3 cost(low) <- regimen-b.
/4 voice(20%) <- regimen-a
"""


def test_parse_session():
    s = parse_session(SESSION)
    assert [a.index for a in s.arguments] == [1, 2, 3, 4]
    assert s.arguments[0].speaker == "d1"
    assert s.arguments[3].speaker is None
    assert s.arguments[0].head == (
        Characteristic("cure-rate", "40%"),
        Characteristic("cost", "high"),
    )
    assert s.arguments[0].body == (Characteristic("regimen-a", "regimen-a"),)


@pytest.mark.parametrize(
    "line",
    ["d1/A1 cure-rate(40%)", "d1 cure-rate(40%) <- a", "d1/xx c(1) <- a", "d1/A1 <-"],
)
def test_parse_session_errors(line):
    with pytest.raises(ParseError):
        parse_session(line)


def test_indices_must_increase():
    with pytest.raises(DataError):
        parse_session("d/A2 c(1) <- a.\nd/A1 c(2) <- a.")


def test_parse_order_chains_and_sorts():
    order = parse_order("poor <= fair <= good.\nsort good : rating.")
    assert order.declared_le("poor", "good")
    assert order.sorts == {"good": "rating"}


def test_parse_order_rejects_cycles():
    with pytest.raises(DataError):
        parse_order("a <= b.\nb <= a.")


# -- profiles --------------------------------------------------------------


def test_latest_wins_per_sort():
    s = parse_session(
        "d/1 voice(50%) <- a.\nd/2 cost(low) <- a.\nd/3 voice(20%) <- a."
    )
    (p,) = competitor_profiles(s, merge="latest-wins")
    assert p.characteristics == frozenset(
        {Characteristic("voice", "20%"), Characteristic("cost", "low")}
    )


def test_union_keeps_everything():
    s = parse_session("d/1 voice(50%) <- a.\nd/2 voice(20%) <- a.")
    (p,) = competitor_profiles(s, merge="union")
    assert len(p.characteristics) == 2


def test_sorts_filter():
    s = parse_session("d/1 voice(50%), cost(low) <- a.")
    (p,) = competitor_profiles(s, sorts={"cost"})
    assert p.characteristics == frozenset({Characteristic("cost", "low")})


def test_multi_body_rejected():
    s = Session(
        [
            Argument(
                "d",
                1,
                (Characteristic("c", "1"),),
                (Characteristic(None, "a"), Characteristic(None, "b")),
            )
        ]
    )
    with pytest.raises(DataError):
        competitor_profiles(s)


def test_headless_arguments_are_data_only():
    s = parse_session("d/1 axiom(x) <- .")
    assert competitor_profiles(s) == [] or all(
        p.characteristics for p in competitor_profiles(s)
    )


# -- ranking ---------------------------------------------------------------


def profile(name, *chars):
    return CompetitorProfile(name, frozenset(chars))


def c(sort, value):
    return Characteristic(sort, value)


def test_rank_merges_equals_and_orders_worse_first():
    """Two regimens claiming identical profiles collapse into one node,
    with the dominated third below them."""
    a = profile("A", c("cure-rate", "70%"))
    r1 = profile("R1", c("cure-rate", "70%"))
    r2 = profile("R2", c("cure-rate", "40%"))
    g = rank_competitors([a, r1, r2])
    assert g.nodes == [("A", "R1"), ("R2",)]
    assert g.edges == [("R2", "A=R1")]


def test_rank_transitive_reduction():
    order = parse_order("take-out <= hemi <= radio.")
    profs = [
        profile("hemi", c("t", "hemi")),
        profile("radio", c("t", "radio")),
        profile("take-out", c("t", "take-out")),
    ]
    g = rank_competitors(profs, order=order)
    assert sorted(g.edges) == [("hemi", "radio"), ("take-out", "hemi")]


def test_rank_preference_then_fallback():
    order = parse_order("low <= high.")
    a = profile("a", c("cure-rate", "70%"), c("cost", "high"))
    b = profile("b", c("cure-rate", "70%"), c("cost", "low"))
    g = rank_competitors([a, b], order=order, preference="cure-rate")
    # preferred sort ties; the remaining characteristics break it
    assert g.edges == [("b", "a")]


def test_rank_incomparable_by_preference():
    a = profile("a", c("cure-rate", "70%"))
    b = profile("b", c("cost", "10"))
    g = rank_competitors([a, b], preference="cure-rate")
    assert g.edges == []
    assert sorted(g.nodes) == [("a",), ("b",)]


def test_rank_output_is_acyclic():
    rng = random.Random(23)
    for _ in range(60):
        elems, reach = random_poset(rng, 4)
        order = order_from_reach(elems, reach)
        profs = [
            profile("p%d" % i, *(c("t", e) for e in random_subset(rng, elems)))
            for i in range(rng.randint(2, 5))
        ]
        g = rank_competitors(profs, order=order)
        # Kahn's algorithm must consume every node
        nodes = [ComparisonGraph.label(n) for n in g.nodes]
        indeg = {n: 0 for n in nodes}
        for _, b in g.edges:
            indeg[b] += 1
        queue = [n for n in nodes if indeg[n] == 0]
        seen = 0
        while queue:
            n = queue.pop()
            seen += 1
            for x, y in g.edges:
                if x == n:
                    indeg[y] -= 1
                    if indeg[y] == 0:
                        queue.append(y)
        assert seen == len(nodes)


def test_rank_duplicate_names_rejected():
    with pytest.raises(DataError):
        rank_competitors([profile("a", c("t", "1")), profile("a", c("t", "2"))])


# -- output formats --------------------------------------------------------


def test_edge_list_and_dot():
    g = ComparisonGraph(nodes=[("A", "B"), ("C",)], edges=[("C", "A=B")])
    assert g.to_edge_list() == "A=B\nC\nC -> A=B\n"
    dot = g.to_dot()
    assert dot.startswith("digraph competition {")
    assert '"C" -> "A=B";' in dot
    assert dot.endswith("}\n")


# -- full consultation flow ------------------------------------------------


def test_consultation_latest_wins_changes_outcome():
    """A doctor lowering a regimen's claimed rate late in the session must
    defeat the earlier, higher claim."""
    text = (
        "d/1 cure-rate(70%) <- a.\n"
        "d/2 cure-rate(70%) <- b.\n"
        "d/3 cure-rate(40%) <- a.\n"
    )
    profiles = competitor_profiles(parse_session(text))
    g = rank_competitors(profiles, preference="cure-rate")
    assert g.edges == [("a", "b")]
