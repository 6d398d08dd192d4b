"""Recursive-descent parser for the do-notation DSL.

    sig {
      type C; type U
      value xor: C, C -> C
      pure unif: -> C
      effect seed: U -> U
    }
    prog bob(m: C) -> (C):
      rand_b() ~> k
      return(xor(m, k))

Statements are separated by newlines or ``;``.  ``#`` starts a comment.
"""

from __future__ import annotations

import re
from typing import Dict, List, Optional, Tuple

from ..errors import DoSyntaxError, DuplicateName, UnknownGenerator
from .syntax import App, Program, Signature, Stmt, Var

KEYWORDS = {"sig", "type", "value", "pure", "effect", "prog", "return"}

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+) |
    (?P<comment>\#[^\n]*) |
    (?P<nl>\n) |
    (?P<arrow>->|~>) |
    (?P<ident>[A-Za-z_][A-Za-z0-9_']*) |
    (?P<sym>[{}():;,])
""", re.VERBOSE)


class Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind, self.text, self.line, self.col = kind, text, line, col

    def __repr__(self):
        return f"{self.kind}:{self.text!r}@{self.line}:{self.col}"


def tokenize(text: str) -> List[Token]:
    toks: List[Token] = []
    line, line_start, depth, pos = 1, 0, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if not m:
            raise DoSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind == "nl":
            if depth == 0:
                toks.append(Token("sep", "\n", line, col))
            line += 1
            line_start = m.end()
        elif kind == "sym":
            if s == "(":
                depth += 1
            elif s == ")":
                depth = max(0, depth - 1)
            toks.append(Token("sep" if s == ";" else "sym", s, line, col))
        elif kind in ("arrow", "ident"):
            toks.append(Token(kind, s, line, col))
        pos = m.end()
    toks.append(Token("eof", "", line, pos - line_start + 1))
    return toks


class Parser:
    def __init__(self, text: str, sig: Optional[Signature] = None):
        self.toks = tokenize(text)
        self.i = 0
        self.sig = sig
        self.programs: Dict[str, Program] = {}

    # token helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        return DoSyntaxError(msg, tok.line, tok.col)

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind != "eof"

    def expect(self, text: str) -> Token:
        if not self.at(text):
            shown = self.tok.text.replace("\n", "newline") or "end of input"
            raise self.error(f"expected {text!r}, found {shown!r}")
        t = self.tok
        self.i += 1
        return t

    def ident(self) -> Token:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            shown = t.text.replace("\n", "newline") or "end of input"
            raise self.error(f"expected an identifier, found {shown!r}")
        self.i += 1
        return t

    def skip_seps(self):
        while self.tok.kind == "sep":
            self.i += 1

    # grammar

    def parse(self) -> Tuple[Signature, Dict[str, Program]]:
        self.skip_seps()
        if self.at("sig"):
            if self.sig is not None:
                raise self.error("signature already given")
            self.sig = self.signature()
        if self.sig is None:
            self.sig = Signature()
        self.skip_seps()
        while self.tok.kind != "eof":
            if not self.at("prog"):
                raise self.error(f"expected 'prog', found {self.tok.text!r}")
            p = self.program()
            if p.name in self.programs:
                raise DuplicateName(f"program {p.name!r} defined twice (line {p.pos[0]})")
            self.programs[p.name] = p
            self.skip_seps()
        return self.sig, self.programs

    def name_list(self) -> List[str]:
        """Comma list of names, optionally parenthesised; ``()`` is empty."""
        names = []
        if self.at("("):
            self.expect("(")
            if not self.at(")"):
                names.append(self.ident().text)
                while self.at(","):
                    self.expect(",")
                    names.append(self.ident().text)
            self.expect(")")
            return names
        if self.tok.kind == "ident" and self.tok.text not in KEYWORDS:
            names.append(self.ident().text)
            while self.at(","):
                self.expect(",")
                names.append(self.ident().text)
        return names

    def signature(self) -> Signature:
        self.expect("sig")
        self.skip_seps()
        self.expect("{")
        types: List[str] = []
        tables = {"value": {}, "pure": {}, "effect": {}}
        seen = set()
        self.skip_seps()
        while not self.at("}"):
            t = self.tok
            if self.at("type"):
                self.expect("type")
                for name in self.name_list() or [self.ident().text]:
                    if name in types:
                        raise DuplicateName(f"type {name!r} declared twice (line {t.line})")
                    types.append(name)
            elif t.text in tables:
                self.i += 1
                name_tok = self.ident()
                name = name_tok.text
                if name in seen:
                    raise DuplicateName(f"generator {name!r} declared twice (line {name_tok.line})")
                seen.add(name)
                self.expect(":")
                ins = self.name_list()
                self.expect("->")
                outs = self.name_list()
                if t.text == "value":
                    if len(outs) != 1:
                        raise self.error(f"value generator {name!r} must have exactly one output", name_tok)
                    tables["value"][name] = (tuple(ins), outs[0])
                else:
                    tables[t.text][name] = (tuple(ins), tuple(outs))
            else:
                raise self.error(f"expected a declaration, found {t.text!r}")
            if not self.at("}"):
                if self.tok.kind != "sep":
                    raise self.error(f"expected ';' or newline, found {self.tok.text!r}")
            self.skip_seps()
        self.expect("}")
        return Signature(tuple(types), tables["value"], tables["pure"], tables["effect"])

    def program(self) -> Program:
        start = self.expect("prog")
        name = self.ident().text
        self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                x = self.ident().text
                self.expect(":")
                params.append((x, self.ident().text))
                if not self.at(","):
                    break
                self.expect(",")
        self.expect(")")
        self.expect("->")
        ret_types = self.name_list()
        self.expect(":")
        stmts = []
        self.skip_seps()
        while not self.at("return"):
            if self.tok.kind == "eof":
                raise self.error(f"program {name!r} has no return")
            stmts.append(self.statement())
            if not self.at("return") and self.tok.kind != "sep":
                raise self.error(f"expected ';' or newline after statement, found {self.tok.text!r}")
            self.skip_seps()
        self.expect("return")
        self.expect("(")
        rets = self.terms(")")
        self.expect(")")
        if self.tok.kind not in ("sep", "eof"):
            raise self.error(f"unexpected {self.tok.text!r} after return")
        return Program(name, tuple(params), tuple(stmts), tuple(rets), tuple(ret_types),
                       self.sig, (start.line, start.col))

    def statement(self) -> Stmt:
        gtok = self.ident()
        gen = gtok.text
        kind = self.sig.kind(gen)
        if kind is None:
            raise UnknownGenerator(f"unknown generator {gen!r} at line {gtok.line}, column {gtok.col}")
        if kind == "value":
            raise self.error(f"value generator {gen!r} must be used inside a term, not as a statement", gtok)
        self.expect("(")
        args = self.terms(")")
        self.expect(")")
        arrow = self.tok
        if arrow.kind != "arrow":
            raise self.error(f"expected '->' or '~>' after {gen}(...)")
        self.i += 1
        want = "->" if kind == "pure" else "~>"
        if arrow.text != want:
            raise self.error(f"{kind} generator {gen!r} must be bound with {want!r}", arrow)
        binds = self.name_list()
        return Stmt(kind, gen, tuple(args), tuple(binds), (gtok.line, gtok.col))

    def terms(self, closer: str) -> list:
        out = []
        if self.at(closer):
            return out
        out.append(self.term())
        while self.at(","):
            self.expect(",")
            out.append(self.term())
        return out

    def term(self):
        t = self.ident()
        if self.at("("):
            kind = self.sig.kind(t.text)
            if kind is None:
                raise UnknownGenerator(f"unknown generator {t.text!r} at line {t.line}, column {t.col}")
            if kind != "value":
                raise self.error(f"{kind} generator {t.text!r} cannot appear inside a term", t)
            self.expect("(")
            args = self.terms(")")
            self.expect(")")
            return App(t.text, tuple(args))
        return Var(t.text)


def parse(text: str, sig: Optional[Signature] = None) -> Tuple[Signature, Dict[str, Program]]:
    """Parse a DSL source into its signature and programs keyed by name."""
    return Parser(text, sig).parse()


def parse_program(text: str, sig: Optional[Signature] = None) -> Program:
    """Parse a source expected to hold exactly one program."""
    _, progs = parse(text, sig)
    if len(progs) != 1:
        raise DoSyntaxError(f"expected one program, found {len(progs)}")
    return next(iter(progs.values()))
