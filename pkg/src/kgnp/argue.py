"""Preference competition over bi-sectioned arguments.

A consultation transcript is a timed sequence of arguments, each a rule
`characteristics <- competitor`.  Competitors collect characteristic sets,
which compare under the angelic (Hoare), demonic (Plotkin) or complete
(Egli-Milner) set order; numeric percent values order within their sort,
word values through a declared element order.  The result is a directed
acyclic comparison graph, optionally driven by one preferred sort.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .errors import DataError, ParseError

_NUMERIC = re.compile(r"[-+]?\d+(?:\.\d+)?%?\Z")


@dataclass(frozen=True)
class Characteristic:
    sort: Optional[str]  # technical meaning; None when sorts are ignored
    value: str

    @property
    def numeric(self) -> Optional[float]:
        if _NUMERIC.match(self.value):
            return float(self.value.rstrip("%"))
        return None

    def __str__(self) -> str:
        if self.sort is not None and self.sort != self.value:
            return "%s(%s)" % (self.sort, self.value)
        return self.value


@dataclass(frozen=True)
class Argument:
    speaker: Optional[str]
    index: int
    head: Tuple[Characteristic, ...]
    body: Tuple[Characteristic, ...]

    def __post_init__(self):
        if not self.head and not self.body:
            raise DataError("argument %d has neither head nor body" % self.index)


@dataclass
class Session:
    arguments: List[Argument] = field(default_factory=list)

    def __post_init__(self):
        prev = None
        for a in self.arguments:
            if prev is not None and a.index <= prev:
                raise DataError("argument indices must increase (at %d)" % a.index)
            prev = a.index


@dataclass
class ElementOrder:
    """Declared `a <= b` pairs (kept reflexively-transitively closed) plus
    optional element -> sort tags."""

    elements: Set[str] = field(default_factory=set)
    le_pairs: Set[Tuple[str, str]] = field(default_factory=set)
    sorts: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self._close()

    def _close(self):
        for e in self.elements:
            self.le_pairs.add((e, e))
        changed = True
        while changed:
            changed = False
            for a, b in list(self.le_pairs):
                for c, d in list(self.le_pairs):
                    if b == c and (a, d) not in self.le_pairs:
                        self.le_pairs.add((a, d))
                        changed = True
        for a, b in self.le_pairs:
            if a != b and (b, a) in self.le_pairs:
                raise DataError("element order is not antisymmetric: %r ~ %r" % (a, b))

    def declared_le(self, a: str, b: str) -> bool:
        return a == b or (a, b) in self.le_pairs

    def sort_of(self, value: str) -> Optional[str]:
        return self.sorts.get(value)


@dataclass(frozen=True)
class CompetitorProfile:
    competitor: str
    characteristics: FrozenSet[Characteristic]


@dataclass
class ComparisonGraph:
    """Nodes are groups of mutually-dominating competitors; an edge a -> b
    reads `a is equal to or less than b`."""

    nodes: List[Tuple[str, ...]]
    edges: List[Tuple[str, str]]  # between node labels

    @staticmethod
    def label(group: Tuple[str, ...]) -> str:
        return "=".join(group)

    def to_edge_list(self) -> str:
        lines = [self.label(g) for g in self.nodes]
        lines += ["%s -> %s" % (a, b) for a, b in self.edges]
        return "\n".join(lines) + "\n"

    def to_dot(self, name: str = "competition") -> str:
        out = ["digraph %s {" % name]
        for g in self.nodes:
            out.append('  "%s";' % self.label(g))
        for a, b in self.edges:
            out.append('  "%s" -> "%s";' % (a, b))
        out.append("}")
        return "\n".join(out) + "\n"


# -- parsing -------------------------------------------------------------


def _split_top(text: str) -> List[str]:
    """Split on commas outside parentheses."""
    parts, depth, cur = [], 0, []
    for c in text:
        if c == "(":
            depth += 1
        elif c == ")":
            depth = max(0, depth - 1)
        if c == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(c)
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


def _parse_characteristic(text: str, lineno: int) -> Characteristic:
    text = text.strip()
    i = text.find("(")
    if i < 0:
        if not text:
            raise ParseError("empty predicate", lineno)
        return Characteristic(sort=text, value=text)
    name = text[:i].strip()
    if not name or not text.endswith(")"):
        raise ParseError("malformed predicate %r" % text, lineno)
    return Characteristic(sort=name, value=text[i + 1 : -1].strip())


def parse_session(text: str) -> Session:
    """One argument per line: `speaker/index head-list <- body-list`, either
    list possibly empty (not both); `;`/`.`-terminated lines and `#` comment
    lines are tolerated."""
    arguments = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip().rstrip(";.").strip()
        if not line or line.startswith("#"):
            continue
        if "<-" not in line:
            raise ParseError("argument line needs a '<-'", lineno)
        left, _, rest = line.partition(" ")
        if "/" not in left or "<-" in left:
            raise ParseError("argument line needs a speaker/index prefix", lineno)
        speaker, _, idx_text = left.partition("/")
        idx_text = idx_text.strip()
        m = re.fullmatch(r"[A-Za-z]*(\d+)", idx_text)
        if not m:
            raise ParseError("bad argument index %r" % idx_text, lineno)
        index = int(m.group(1))
        head_text, _, body_text = rest.partition("<-")
        head = tuple(_parse_characteristic(p, lineno) for p in _split_top(head_text))
        body = tuple(_parse_characteristic(p, lineno) for p in _split_top(body_text))
        if not head and not body:
            raise ParseError("argument with empty head and body", lineno)
        arguments.append(Argument(speaker or None, index, head, body))
    return Session(arguments)


def parse_order(text: str) -> ElementOrder:
    """`a <= b` lines plus `sort x : cure-rate` lines."""
    order = ElementOrder()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip().rstrip(";.").strip()
        if not line or line.startswith("#"):
            continue
        if line.lower().startswith("sort "):
            rest = line[5:]
            value, sep, sort = rest.partition(":")
            if not sep:
                raise ParseError("sort line needs `sort value : sort-name`", lineno)
            order.sorts[value.strip()] = sort.strip()
            continue
        if "<=" not in line:
            raise ParseError("expected `a <= b` or a sort line", lineno)
        chain = [p.strip() for p in line.split("<=")]
        if any(not p for p in chain):
            raise ParseError("empty element in order chain", lineno)
        for a, b in zip(chain, chain[1:]):
            order.elements.update((a, b))
            order.le_pairs.add((a, b))
    order._close()
    return order


# -- profiles ------------------------------------------------------------


def competitor_profiles(
    session: Session,
    merge: str = "latest-wins",
    sorts: Optional[Set[str]] = None,
) -> List[CompetitorProfile]:
    """Group head characteristics by the single body-side competitor.
    `latest-wins` keeps, per sort, the latest claim; `union` keeps all.
    With `sorts` given, characteristics of other sorts are ignored."""
    if merge not in ("latest-wins", "union"):
        raise DataError("unknown merge mode %r" % merge)
    by_comp: Dict[str, list] = {}
    for a in session.arguments:
        if not a.body:
            continue  # data argument, no competitor
        if len(a.body) != 1:
            raise DataError(
                "argument %d has %d body predicates; the competition model "
                "allows exactly one" % (a.index, len(a.body))
            )
        competitor = a.body[0].sort or a.body[0].value
        bucket = by_comp.setdefault(competitor, [])
        for ch in a.head:
            if sorts is not None and ch.sort not in sorts:
                continue
            bucket.append((a.index, ch))
    profiles = []
    for competitor, claims in by_comp.items():
        if merge == "union":
            kept = [ch for _, ch in claims]
        else:
            latest: Dict[Optional[str], Tuple[int, Characteristic]] = {}
            for idx, ch in claims:
                if ch.sort not in latest or idx >= latest[ch.sort][0]:
                    latest[ch.sort] = (idx, ch)
            kept = [ch for _, ch in latest.values()]
        profiles.append(CompetitorProfile(competitor, frozenset(kept)))
    return profiles


# -- set partial orders --------------------------------------------------


def _as_characteristic(x) -> Characteristic:
    if isinstance(x, Characteristic):
        return x
    return Characteristic(sort=None, value=str(x))


def element_le(u, v, order: Optional[ElementOrder] = None) -> bool:
    u = _as_characteristic(u)
    v = _as_characteristic(v)
    us = u.sort if u.sort is not None else (order.sort_of(u.value) if order else None)
    vs = v.sort if v.sort is not None else (order.sort_of(v.value) if order else None)
    if us != vs:
        return False  # different technical meanings never compare
    un, vn = u.numeric, v.numeric
    if un is not None and vn is not None:
        return un <= vn
    if un is not None or vn is not None:
        return False
    if order is None:
        raise DataError("no order declared for %r and %r" % (u.value, v.value))
    for w in (u.value, v.value):
        if w not in order.elements:
            raise DataError("element %r outside the declared order" % w)
    return order.declared_le(u.value, v.value)


def poset_compare(s1, s2, order: Optional[ElementOrder], mode: str) -> bool:
    """angelic: every s1 element is dominated in s2; demonic: every s2
    element dominates some s1 element; complete: both."""
    a = [_as_characteristic(x) for x in s1]
    b = [_as_characteristic(x) for x in s2]
    if not a or not b:
        raise DataError("set comparison needs non-empty sets")
    if mode == "angelic":
        return all(any(element_le(u, v, order) for v in b) for u in a)
    if mode == "demonic":
        return all(any(element_le(u, v, order) for u in a) for v in b)
    if mode == "complete":
        return poset_compare(a, b, order, "angelic") and poset_compare(a, b, order, "demonic")
    raise DataError("unknown comparison mode %r" % mode)


# -- competitor ranking --------------------------------------------------


def _profile_le(
    a: CompetitorProfile,
    b: CompetitorProfile,
    order: Optional[ElementOrder],
    preference: Optional[str],
    mode: str = "angelic",
) -> Optional[bool]:
    """a <= b; None marks 'incomparable by preference'."""
    if preference is None:
        return poset_compare(a.characteristics, b.characteristics, order, mode)
    pa = [c for c in a.characteristics if c.sort == preference]
    pb = [c for c in b.characteristics if c.sort == preference]
    if not pa or not pb:
        return None
    fwd = poset_compare(pa, pb, order, mode)
    rev = poset_compare(pb, pa, order, mode)
    if fwd and not rev:
        return True
    if rev and not fwd:
        return False
    if not fwd and not rev:
        return None
    ra = [c for c in a.characteristics if c.sort != preference]
    rb = [c for c in b.characteristics if c.sort != preference]
    if not ra or not rb:
        return bool(ra) <= bool(rb)  # ties with nothing left stay ties
    return poset_compare(ra, rb, order, mode)


def rank_competitors(
    profiles: Sequence[CompetitorProfile],
    order: Optional[ElementOrder] = None,
    preference: Optional[str] = None,
    mode: str = "angelic",
) -> ComparisonGraph:
    names = [p.competitor for p in profiles]
    if len(set(names)) != len(names):
        raise DataError("duplicate competitor profiles")
    le: Dict[Tuple[str, str], bool] = {}
    by_name = {p.competitor: p for p in profiles}
    for a in profiles:
        for b in profiles:
            r = _profile_le(a, b, order, preference, mode)
            le[(a.competitor, b.competitor)] = bool(r)

    # merge mutual-<= competitors into one node
    groups: List[List[str]] = []
    placed: Dict[str, int] = {}
    for n in names:
        for gi, g in enumerate(groups):
            rep = g[0]
            if le[(n, rep)] and le[(rep, n)]:
                g.append(n)
                placed[n] = gi
                break
        else:
            placed[n] = len(groups)
            groups.append([n])
    nodes = [tuple(sorted(g)) for g in groups]
    labels = [ComparisonGraph.label(g) for g in nodes]

    def group_le(i: int, j: int) -> bool:
        return i != j and le[(nodes[i][0], nodes[j][0])] and not le[(nodes[j][0], nodes[i][0])]

    strict = {(i, j) for i in range(len(nodes)) for j in range(len(nodes)) if group_le(i, j)}
    reduced = []
    for i, j in sorted(strict):
        if any((i, k) in strict and (k, j) in strict for k in range(len(nodes))):
            continue
        reduced.append((labels[i], labels[j]))
    return ComparisonGraph(nodes=nodes, edges=reduced)
