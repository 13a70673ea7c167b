"""Parser for KGN-Prolog program files (``.kgnpl``) and queries.

Concrete grammar (comments start with ``%``):

    rule       := head "<-" body "." | fact "."
    body       := conj { ";" conj }
    conj       := goal { "," goal }
    goal       := [ directive ] ( "(" body ")" | call ) [ annotation ]
    call       := name [ "(" term { "," term } ")" ]
    directive  := "#" name "#" | "#(" name { "," name } ")#"
    annotation := "@" ("f"|"p") "(" element { "," element } ")"
    data       := "Data" ":" name ":" term { "," term } "."
    concepts   := "Concepts" ":" name "=" number { "," ... } "."
    emba       := "EMBA" ":" name "."

``Fail`` / ``Fail(N)`` is recognized in goal position.  Predicate and functor
names are case-insensitive and normalized to lowercase; argument identifiers
follow the Prolog convention (uppercase / ``_`` start means variable), so
capitalised constants are written quoted: ``'Wang'``.
"""

from __future__ import annotations

import re
from typing import List, Optional, Tuple

from .ast import Annotation, Call, Disj, FailGoal, Goal, Program, Rule
from .errors import ParseError
from .terms import Atom, Num, Struct, Term, Var, format_atom, format_number, is_ground

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>%[^\n]*)
  | (?P<number>\d+\.\d+(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+|\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*(?:-[A-Za-z0-9_]+)*)
  | (?P<quoted>'(?:\\.|[^'\\])*')
  | (?P<arrow><-)
  | (?P<punct>[().,;#@:=?\-])
    """,
    re.VERBOSE,
)


class Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col

    def __repr__(self):
        return "Token(%s, %r)" % (self.kind, self.text)


def tokenize(text: str) -> List[Token]:
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError("unexpected character %r" % text[pos], line, col)
        kind = m.lastgroup
        raw = m.group()
        if kind not in ("ws", "comment"):
            if kind == "punct" or kind == "arrow":
                tokens.append(Token(raw, raw, line, col))
            else:
                tokens.append(Token(kind, raw, line, col))
        newlines = raw.count("\n")
        if newlines:
            line += newlines
            col = len(raw) - raw.rfind("\n")
        else:
            col += len(raw)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


def _unquote(raw: str) -> str:
    body = raw[1:-1]
    return body.replace("\\'", "'").replace("\\\\", "\\")


def _is_var_name(name: str) -> bool:
    return name[0].isupper() or name[0] == "_"


class _Parser:
    def __init__(self, tokens: List[Token], data_mode: bool = False):
        self.tokens = tokens
        self.i = 0
        self.data_mode = data_mode  # no variables; bare capitalised names are atoms
        self.mode: Optional[str] = None  # annotation mode seen so far

    # -- token plumbing -------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, kind: str) -> Token:
        if self.tok.kind != kind:
            raise ParseError(
                "expected %r, found %r" % (kind, self.tok.text or "end of input"),
                self.tok.line,
                self.tok.col,
            )
        return self.advance()

    def at(self, kind: str) -> bool:
        return self.tok.kind == kind

    # -- terms ----------------------------------------------------------

    def parse_term(self) -> Term:
        t = self.tok
        if t.kind == "number":
            self.advance()
            return Num(_to_number(t.text))
        if t.kind == "-":
            self.advance()
            n = self.expect("number")
            v = _to_number(n.text)
            return Num(-v)
        if t.kind == "quoted":
            self.advance()
            return Atom(_unquote(t.text))
        if t.kind == "name":
            self.advance()
            if self.at("("):
                self.advance()
                args = [self.parse_term()]
                while self.at(","):
                    self.advance()
                    args.append(self.parse_term())
                self.expect(")")
                return Struct(t.text.lower(), tuple(args))
            if not self.data_mode and _is_var_name(t.text):
                return Var(t.text)
            return Atom(t.text)
        raise ParseError("expected a term, found %r" % t.text, t.line, t.col)

    # -- goals ----------------------------------------------------------

    def parse_directive(self) -> Tuple[str, ...]:
        self.expect("#")
        names = []
        if self.at("("):
            self.advance()
            names.append(self.expect("name").text)
            while self.at(","):
                self.advance()
                names.append(self.expect("name").text)
            self.expect(")")
        else:
            names.append(self.expect("name").text)
        self.expect("#")
        return tuple(names)

    def parse_annotation(self) -> Annotation:
        self.expect("@")
        mode_tok = self.expect("name")
        mode = mode_tok.text.lower()
        if mode not in ("f", "p"):
            raise ParseError(
                "annotation mode must be f or p, found %r" % mode_tok.text,
                mode_tok.line,
                mode_tok.col,
            )
        if self.mode is None:
            self.mode = mode
        elif self.mode != mode:
            raise ParseError(
                "fuzzy and probabilistic annotations mixed in one program",
                mode_tok.line,
                mode_tok.col,
            )
        self.expect("(")
        elements = [self._annotation_element()]
        while self.at(","):
            self.advance()
            elements.append(self._annotation_element())
        close = self.expect(")")
        try:
            return Annotation(mode, tuple(elements))
        except ValueError as e:
            raise ParseError(str(e), close.line, close.col) from None

    def _annotation_element(self):
        t = self.tok
        if t.kind == "number":
            self.advance()
            return float(t.text)
        if t.kind == "name":
            self.advance()
            return t.text.lower()
        raise ParseError("bad annotation element %r" % t.text, t.line, t.col)

    def parse_goal(self) -> Goal:
        source = None
        if self.at("#"):
            source = self.parse_directive()
        if self.at("("):
            self.advance()
            body = self.parse_body()
            self.expect(")")
            goal: Goal
            if len(body) == 1:
                goals = body[0]
                if source is not None:
                    goals = tuple(_with_source(g, source) for g in goals)
                if len(goals) == 1:
                    goal = goals[0]
                else:
                    goal = Disj((goals,))
            else:
                if source is not None:
                    body = tuple(
                        tuple(_with_source(g, source) for g in conj) for conj in body
                    )
                goal = Disj(body)
            return goal
        name_tok = self.expect("name")
        name = name_tok.text.lower()
        args: tuple = ()
        if self.at("("):
            self.advance()
            terms = [self.parse_term()]
            while self.at(","):
                self.advance()
                terms.append(self.parse_term())
            self.expect(")")
            args = tuple(terms)
        if name == "fail":
            if len(args) > 1:
                raise ParseError("Fail takes at most one bound", name_tok.line, name_tok.col)
            bound = None
            if args:
                a = args[0]
                if isinstance(a, Num) and isinstance(a.value, int) and a.value > 0:
                    bound = a.value
                elif isinstance(a, Var):
                    bound = a
                else:
                    raise ParseError(
                        "Fail bound must be a positive integer or a variable",
                        name_tok.line,
                        name_tok.col,
                    )
            return FailGoal(bound)
        annotation = None
        if self.at("@"):
            annotation = self.parse_annotation()
        return Call(name, args, annotation, source)

    def parse_conj(self) -> tuple:
        goals = [self.parse_goal()]
        while self.at(","):
            self.advance()
            goals.append(self.parse_goal())
        return tuple(goals)

    def parse_body(self) -> tuple:
        conjs = [self.parse_conj()]
        while self.at(";"):
            self.advance()
            conjs.append(self.parse_conj())
        return tuple(conjs)

    # -- top level ------------------------------------------------------

    def parse_program(self) -> Program:
        program = Program()
        while not self.at("eof"):
            t = self.tok
            if t.kind == "name" and t.text.lower() in ("data", "concepts", "emba"):
                nxt = self.tokens[self.i + 1]
                if nxt.kind == ":":
                    self._parse_section(program, t.text.lower())
                    continue
            self._parse_clause(program)
        program.mode = self.mode
        _check_annotation_lengths(program)
        return program

    def _parse_section(self, program: Program, kw: str):
        self.advance()  # keyword
        self.expect(":")
        if kw == "emba":
            name = self.expect("name").text.lower()
            self.expect(".")
            program.emba = name
            return
        if kw == "concepts":
            while True:
                cname = self.expect("name").text.lower()
                self.expect("=")
                neg = False
                if self.at("-"):
                    self.advance()
                    neg = True
                num = float(self.expect("number").text)
                program.concept_anchors[cname] = -num if neg else num
                if self.at(","):
                    self.advance()
                    continue
                break
            self.expect(".")
            return
        # Data: name: v1, v2, ... .
        name_tok = self.expect("name")
        name = name_tok.text.lower()
        self.expect(":")
        values = [self.parse_term()]
        while self.at(","):
            self.advance()
            values.append(self.parse_term())
        self.expect(".")
        if name in program.data_lists:
            raise ParseError("duplicate data list %r" % name, name_tok.line, name_tok.col)
        program.data_lists[name] = values

    def _parse_clause(self, program: Program):
        head = self.parse_goal()
        if not isinstance(head, Call):
            t = self.tok
            raise ParseError("rule head must be a single predicate", t.line, t.col)
        if self.at("<-"):
            self.advance()
            body = self.parse_body()
            self.expect(".")
            program.rules.append(Rule(head=head, body=body))
        else:
            self.expect(".")
            if not all(is_ground(a) for a in head.args):
                tok = self.tokens[self.i - 1]
                raise ParseError(
                    "fact %s contains variables" % head.name, tok.line, tok.col
                )
            program.data.append(head)

    def parse_query(self) -> Tuple[tuple, Optional[tuple]]:
        if self.at("?"):  # the leading marker is optional on input
            self.advance()
        if self.at("eof"):
            t = self.tok
            raise ParseError("empty query", t.line, t.col)
        source = None
        if self.at("#"):
            source = self.parse_directive()
        goals = self.parse_conj()
        if self.at("."):
            self.advance()
        self.expect("eof")
        if source is not None:
            goals = tuple(_with_source(g, source) for g in goals)
        return goals, source


def _with_source(goal: Goal, source: tuple) -> Goal:
    if isinstance(goal, Call) and goal.source is None:
        return Call(goal.name, goal.args, goal.annotation, source)
    if isinstance(goal, Disj):
        return Disj(
            tuple(tuple(_with_source(g, source) for g in conj) for conj in goal.alternatives)
        )
    return goal


def _to_number(text: str):
    if re.fullmatch(r"\d+", text):
        return int(text)
    return float(text)


def _check_annotation_lengths(program: Program):
    lengths = set()

    def visit(call):
        if isinstance(call, Call) and call.annotation is not None:
            lengths.add(len(call.annotation.elements))

    for fact in program.data:
        visit(fact)
    for rule in program.rules:
        visit(rule.head)
        for conj in rule.body:
            for g in conj:
                if isinstance(g, Disj):
                    for alt in g.alternatives:
                        for sub in alt:
                            visit(sub)
                else:
                    visit(g)
    if len(lengths) > 1:
        raise ParseError("annotation tuples of different lengths: %s" % sorted(lengths))


# -- public API ---------------------------------------------------------


def parse_program(text: str) -> Program:
    return _Parser(tokenize(text)).parse_program()


def parse_query(text: str) -> Tuple[tuple, Optional[tuple]]:
    return _Parser(tokenize(text)).parse_query()


def parse_term_text(text: str, data_mode: bool = False) -> Term:
    p = _Parser(tokenize(text), data_mode=data_mode)
    term = p.parse_term()
    p.expect("eof")
    return term


# -- printer (round-trip partner of the parser) -------------------------


def print_term(t: Term) -> str:
    return str(t)


def print_goal(goal: Goal) -> str:
    if isinstance(goal, FailGoal):
        if goal.bound is None:
            return "Fail"
        bound = goal.bound.name if isinstance(goal.bound, Var) else str(goal.bound)
        return "Fail(%s)" % bound
    if isinstance(goal, Disj):
        return "(%s)" % "; ".join(
            ", ".join(print_goal(g) for g in conj) for conj in goal.alternatives
        )
    parts = []
    if goal.source is not None:
        if len(goal.source) == 1:
            parts.append("#%s#" % goal.source[0])
        else:
            parts.append("#(%s)#" % ", ".join(goal.source))
    text = format_atom(goal.name)
    if goal.args:
        text += "(%s)" % ", ".join(print_term(a) for a in goal.args)
    parts.append(text)
    if goal.annotation is not None:
        elems = ", ".join(
            format_number(e) if isinstance(e, float) else e
            for e in goal.annotation.elements
        )
        parts[-1] += " @%s(%s)" % (goal.annotation.mode, elems)
    return " ".join(parts)


def print_program(program: Program) -> str:
    lines = []
    if program.emba:
        lines.append("EMBA: %s." % program.emba)
    if program.concept_anchors:
        pairs = ", ".join(
            "%s = %s" % (k, format_number(float(v)))
            for k, v in program.concept_anchors.items()
        )
        lines.append("Concepts: %s." % pairs)
    for name, values in program.data_lists.items():
        lines.append("Data: %s: %s." % (name, ", ".join(print_term(v) for v in values)))
    for fact in program.data:
        lines.append("%s." % print_goal(fact))
    for rule in program.rules:
        body = ";\n    ".join(
            ", ".join(print_goal(g) for g in conj) for conj in rule.body
        )
        lines.append("%s <- %s." % (print_goal(rule.head), body))
    return "\n".join(lines) + ("\n" if lines else "")
