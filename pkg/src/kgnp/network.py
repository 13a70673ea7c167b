"""Network descriptions: a TOML file naming graphs, their triple files,
optional local programs, access policies, and the directed call links.

    [[graph]]
    name = "films"
    triples = "films.triples"
    program = "films.kgnpl"          # optional local program

    [graph.policy]
    entity_blocklist = ["'Wang'"]    # terms, triple-file syntax
    deny_read = ["person"]           # class/schema names
    deny_statistics = []
    lpp_only = false
    function_blocklist = []
    [graph.policy.loop_caps]
    snapshot = 250

    [[link]]
    from = "session"
    to = "films"

Relative paths resolve against the TOML file's directory.
"""

from __future__ import annotations

import os
from typing import Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import DataError
from .parser import parse_program, parse_term_text
from .store import AccessPolicy, KGNetwork, KnowledgeGraph, load_triples_text


def _policy_from_table(table: dict, graph_name: str) -> AccessPolicy:
    known = {
        "entity_blocklist",
        "deny_read",
        "deny_statistics",
        "lpp_only",
        "function_blocklist",
        "loop_caps",
    }
    unknown = set(table) - known
    if unknown:
        raise DataError(
            "unknown policy keys %s for graph %r" % (sorted(unknown), graph_name)
        )
    entities = {
        parse_term_text(t, data_mode=True) for t in table.get("entity_blocklist", [])
    }
    rules = {(name.lower(), "deny-read") for name in table.get("deny_read", [])}
    rules |= {(name.lower(), "deny-statistics") for name in table.get("deny_statistics", [])}
    return AccessPolicy(
        entity_blocklist=entities,
        group_rules=rules,
        lpp_only=bool(table.get("lpp_only", False)),
        function_blocklist={f.lower() for f in table.get("function_blocklist", [])},
        loop_caps={k.lower(): v for k, v in table.get("loop_caps", {}).items()},
    )


def load_network(path: str) -> KGNetwork:
    base = os.path.dirname(os.path.abspath(path))
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise DataError("bad network file %s: %s" % (path, exc)) from None
    network = KGNetwork()
    for table in doc.get("graph", []):
        if "name" not in table or "triples" not in table:
            raise DataError("every [[graph]] needs `name` and `triples` (%s)" % path)
        name = table["name"]
        triples_path = os.path.join(base, table["triples"])
        if not os.path.exists(triples_path):
            raise DataError("triple file %s for graph %r not found" % (triples_path, name))
        graph = KnowledgeGraph(name=name)
        with open(triples_path, encoding="utf-8") as fh:
            load_triples_text(fh.read(), graph)
        if "policy" in table:
            graph.policy = _policy_from_table(table["policy"], name)
        if "program" in table:
            program_path = os.path.join(base, table["program"])
            if not os.path.exists(program_path):
                raise DataError(
                    "program file %s for graph %r not found" % (program_path, name)
                )
            with open(program_path, encoding="utf-8") as fh:
                graph.local_program = parse_program(fh.read())
        network.add_graph(graph)
    for link in doc.get("link", []):
        if "from" not in link or "to" not in link:
            raise DataError("every [[link]] needs `from` and `to` (%s)" % path)
        network.add_link(link["from"], link["to"])
    return network
