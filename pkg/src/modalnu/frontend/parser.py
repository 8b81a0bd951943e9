"""Recursive-descent parser for ``.spec`` files.

A file is a sequence of blocks::

    system dmts fig1 {
      alphabet grant, idle, req, work;
      states X, Y;
      initial X;
      may X req Y;
      must Y { grant X, work Y };
    }

    trrel facts { tr t3 t1; }

Identifiers are ``[A-Za-z0-9_][A-Za-z0-9_'.]*``; any other name can be
written in double quotes. ``#`` starts a comment.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..core import (
    FF,
    TT,
    Aa,
    And,
    Box,
    Diamond,
    Dmts,
    HmlDecl,
    HybridExpr,
    Lts,
    Not,
    NuExprNF,
    Or,
    Var,
    validate,
)

KINDS = ("lts", "dmts", "aa", "nu", "hml", "hybrid")

CLAUSES = {
    "lts": {"trans"},
    "dmts": {"may", "must"},
    "aa": {"tran"},
    "nu": {"diamond", "box"},
    "hml": {"def"},
    "hybrid": {"def"},
}


class ParseError(ValueError):
    def __init__(self, message, line=None, col=None):
        self.line, self.col = line, col
        where = f"line {line}, column {col}: " if line is not None else ""
        super().__init__(where + message)


class SpecError(ValueError):
    """A block parsed but does not describe a valid system."""

    def __init__(self, block, problems):
        self.block, self.problems = block, list(problems)
        super().__init__(f"system {block}: " + "; ".join(self.problems))


@dataclass
class SpecFile:
    systems: dict = field(default_factory=dict)
    trrels: dict = field(default_factory=dict)

    def get(self, name):
        if name not in self.systems:
            known = ", ".join(self.systems) or "none"
            raise KeyError(f"no system named {name!r} (known: {known})")
        return self.systems[name]


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<ident>[A-Za-z0-9_][A-Za-z0-9_'.]*)
  | (?P<punct>[{};,=<>\[\]()&|!])
    """,
    re.VERBOSE,
)


@dataclass
class Token:
    kind: str
    value: str
    line: int
    col: int


def tokenize(text):
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        value = m.group()
        if kind == "string":
            tokens.append(Token("name", re.sub(r"\\(.)", r"\1", value[1:-1]), line, pos - line_start + 1))
        elif kind == "ident":
            tokens.append(Token("ident", value, line, pos - line_start + 1))
        elif kind == "punct":
            tokens.append(Token("punct", value, line, pos - line_start + 1))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = pos + value.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = tokenize(text)
        self.i = 0

    # token helpers
    @property
    def tok(self):
        return self.tokens[self.i]

    def fail(self, message, tok=None):
        tok = tok or self.tok
        raise ParseError(message, tok.line, tok.col)

    def at(self, value):
        return self.tok.kind == "punct" and self.tok.value == value

    def at_word(self, word):
        return self.tok.kind == "ident" and self.tok.value == word

    def expect(self, value):
        if not self.at(value):
            self.fail(f"expected {value!r}, found {self.describe()}")
        self.i += 1

    def describe(self):
        t = self.tok
        return "end of input" if t.kind == "eof" else repr(t.value)

    def name(self, what="name"):
        t = self.tok
        if t.kind not in ("ident", "name"):
            self.fail(f"expected {what}, found {self.describe()}")
        self.i += 1
        return t.value

    def names(self, terminator=";"):
        out = []
        if self.at(terminator):
            return out
        out.append(self.name())
        while self.at(","):
            self.i += 1
            out.append(self.name())
        return out

    # file structure
    def parse(self):
        spec = SpecFile()
        while self.tok.kind != "eof":
            start = self.tok
            word = self.name("'system' or 'trrel'")
            if word == "system":
                kind_tok = self.tok
                kind = self.name("system kind")
                if kind not in KINDS:
                    self.fail(f"unknown system kind {kind!r}", kind_tok)
                name_tok = self.tok
                name = self.name("system name")
                if name in spec.systems:
                    self.fail(f"duplicate system name {name!r}", name_tok)
                spec.systems[name] = self.system_body(kind, name)
            elif word == "trrel":
                name_tok = self.tok
                name = self.name("relation name")
                if name in spec.trrels:
                    self.fail(f"duplicate relation name {name!r}", name_tok)
                spec.trrels[name] = self.trrel_body()
            else:
                self.fail(f"expected 'system' or 'trrel', found {word!r}", start)
        return spec

    def trrel_body(self):
        self.expect("{")
        pairs = set()
        while not self.at("}"):
            if self.name("'tr'") != "tr":
                self.fail("expected 'tr'", self.tokens[self.i - 1])
            pairs.add((self.name(), self.name()))
            self.expect(";")
        self.expect("}")
        return frozenset(pairs)

    def system_body(self, kind, name):
        self.expect("{")
        b = {
            "alphabet": [], "states": [], "initial": [], "trans": [], "may": [], "must": [],
            "tran": {}, "diamond": {}, "box": {}, "def": {},
        }
        while not self.at("}"):
            word_tok = self.tok
            word = self.name("clause keyword")
            if word in ("alphabet", "states", "initial"):
                b[word] += self.names()
            elif word in CLAUSES[kind]:
                getattr(self, "clause_" + word)(b)
            else:
                self.fail(f"clause {word!r} is not allowed in a {kind} system", word_tok)
            self.expect(";")
        self.expect("}")
        system = self.build(kind, b)
        problems = validate(system)
        if problems:
            raise SpecError(name, problems)
        return system

    def pair_set(self):
        self.expect("{")
        pairs = set()
        while not self.at("}"):
            pairs.add((self.name("action"), self.name("state")))
            if not self.at("}"):
                self.expect(",")
        self.expect("}")
        return frozenset(pairs)

    def clause_trans(self, b):
        b["trans"].append((self.name(), self.name("action"), self.name()))

    def clause_may(self, b):
        b["may"].append((self.name(), self.name("action"), self.name()))

    def clause_must(self, b):
        s = self.name()
        b["must"].append((s, self.pair_set()))

    def clause_tran(self, b):
        s = self.name()
        sets = b["tran"].setdefault(s, set())
        while self.at("{"):
            sets.add(self.pair_set())

    def clause_diamond(self, b):
        x = self.name()
        b["diamond"].setdefault(x, set()).add(self.pair_set())

    def clause_box(self, b):
        x, a = self.name(), self.name("action")
        self.expect("{")
        ys = self.names("}")
        self.expect("}")
        b["box"].setdefault((x, a), set()).update(ys)

    def clause_def(self, b):
        x_tok = self.tok
        x = self.name()
        if x in b["def"]:
            self.fail(f"variable {x!r} defined twice", x_tok)
        self.expect("=")
        b["def"][x] = self.formula()

    # formulas
    def formula(self):
        f = self.conjunction()
        while self.at("|"):
            self.i += 1
            f = Or(f, self.conjunction())
        return f

    def conjunction(self):
        f = self.unary()
        while self.at("&"):
            self.i += 1
            f = And(f, self.unary())
        return f

    def unary(self):
        if self.at("!"):
            self.i += 1
            return Not(self.unary())
        if self.at("<"):
            self.i += 1
            a = self.name("action")
            self.expect(">")
            return Diamond(a, self.unary())
        if self.at("["):
            self.i += 1
            actions = self.names("]")
            if not actions:
                self.fail("box needs at least one action")
            self.expect("]")
            body = self.unary()
            out = Box(actions[0], body)
            for a in actions[1:]:
                out = And(out, Box(a, body))
            return out
        if self.at("("):
            self.i += 1
            f = self.formula()
            self.expect(")")
            return f
        t = self.tok
        if t.kind == "ident" and t.value in ("tt", "ff"):
            self.i += 1
            return TT if t.value == "tt" else FF
        return Var(self.name("formula"))

    def build(self, kind, b):
        sigma, states, initials = b["alphabet"], b["states"], b["initial"]
        if kind == "lts":
            return Lts(sigma, states, initials, b["trans"])
        if kind == "dmts":
            return Dmts(sigma, states, initials, b["may"], b["must"])
        if kind == "aa":
            return Aa(sigma, states, initials, b["tran"])
        if kind == "nu":
            return NuExprNF(sigma, states, initials, b["diamond"], b["box"])
        if kind == "hml":
            return HmlDecl(sigma, states, initials, b["def"])
        return HybridExpr(sigma, states, initials, b["def"])


def parse(text) -> SpecFile:
    return _Parser(text).parse()


def parse_formula(text):
    p = _Parser(text)
    f = p.formula()
    if p.tok.kind != "eof":
        p.fail(f"unexpected {p.describe()} after formula")
    return f


def parse_tr_lines(text):
    """Pairs from a plain relation file: lines ``tr s t`` with ``#`` comments."""
    p = _Parser(text)
    pairs = set()
    while p.tok.kind != "eof":
        if p.name("'tr'") != "tr":
            p.fail("expected 'tr'", p.tokens[p.i - 1])
        pairs.add((p.name(), p.name()))
        if p.at(";"):
            p.i += 1
    return frozenset(pairs)
