"""Recursive-descent parser for the concrete FNM syntax.

A source file is a sequence of ``;``-separated statements::

    # producer / consumer
    P := prod.(P | D);
    D := ~a.0;
    C := <a>.del.C;
    main = (nu a) (P | C);

A lone expression statement is accepted in place of ``main = ...``.
Constant names start with an upper-case letter and may end in primes
(``C1'``).  Action names start with a lower-case letter.  In open terms a
lower-case identifier not followed by ``.`` is a variable.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import CategoryError, DefinitionError, FnmSyntaxError
from .syntax import (
    NIL,
    Action,
    Const,
    ConstEnv,
    Par,
    Prefix,
    Restrict,
    Strong,
    Sum,
    Term,
    Var,
    category,
    is_guarded,
)

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+) |
    (?P<nl>\n) |
    (?P<comment>\#[^\n]*) |
    (?P<assign>:=) |
    (?P<const>[A-Z][A-Za-z0-9_]*'*) |
    (?P<ident>[a-z_][A-Za-z0-9_]*'?) |
    (?P<zero>0) |
    (?P<sym>[~<>.+|();=,])
    """,
    re.VERBOSE,
)

KEYWORDS = {"tau", "nu", "main"}


@dataclass
class Tok:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list:
    toks = []
    line, col, i = 1, 1, 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if not m:
            raise FnmSyntaxError(f"unexpected character {text[i]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind == "nl":
            line, col = line + 1, 1
        else:
            if kind not in ("ws", "comment"):
                toks.append(Tok(kind if kind != "sym" else s, s, line, col))
            col += len(s)
        i = m.end()
    toks.append(Tok("eof", "", line, col))
    return toks


@dataclass
class Program:
    """A parsed source: the main term (``None`` if absent) and the constant definitions."""

    term: Term | None
    env: ConstEnv
    definitions: list  # constant names in source order


class _Parser:
    def __init__(self, text: str, allow_vars: bool, env: ConstEnv | None):
        self.toks = tokenize(text)
        self.i = 0
        self.allow_vars = allow_vars
        self.env = env if env is not None else ConstEnv()
        self.refs: list = []  # (name, tok) of constant references

    # -- token helpers -----------------------------------------------------
    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def advance(self) -> Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind: str, what: str | None = None) -> Tok:
        if self.tok.kind != kind:
            self.error(f"expected {what or repr(kind)}, found {self.describe(self.tok)}")
        return self.advance()

    def describe(self, t: Tok) -> str:
        return "end of input" if t.kind == "eof" else repr(t.text)

    def error(self, msg: str, tok: Tok | None = None):
        t = tok or self.tok
        raise FnmSyntaxError(msg, t.line, t.col)

    def cat_error(self, msg: str, tok: Tok):
        raise CategoryError(msg, tok.line, tok.col)

    # -- statements --------------------------------------------------------------
    def program(self) -> Program:
        main = None
        main_tok = None
        defs = []
        while self.tok.kind != "eof":
            if self.tok.kind == ";":
                self.advance()
                continue
            if self.tok.kind == "const" and self.peek().kind == "assign":
                ntok = self.advance()
                self.advance()
                btok = self.tok
                body = self.expr()
                if not is_guarded(body):
                    self.cat_error(f"body of constant {ntok.text} must be guarded, found a {category(body)} term", btok)
                if ntok.text in self.env:
                    self.error(f"constant {ntok.text} defined twice", ntok)
                self.env.define(ntok.text, body)
                defs.append(ntok.text)
            else:
                t0 = self.tok
                if self.tok.kind == "ident" and self.tok.text == "main" and self.peek().kind == "=":
                    self.advance()
                    self.advance()
                    t0 = self.tok
                if main is not None:
                    self.error("more than one main term", t0)
                main, main_tok = self.expr(), t0
            if self.tok.kind != "eof":
                self.expect(";", "';'")
        for name, tok in self.refs:
            if name not in self.env:
                raise DefinitionError(f"{tok.line}:{tok.col}: undefined constant {name}")
        return Program(main, self.env, defs)

    # -- expressions ---------------------------------------------------------------
    def is_nu(self) -> bool:
        return self.tok.kind == "(" and self.peek().kind == "ident" and self.peek().text == "nu"

    def expr(self) -> Term:
        if self.is_nu():
            self.advance()
            self.advance()
            names = [self.name_tok().text]
            while self.tok.kind == ",":
                self.advance()
                names.append(self.name_tok().text)
            self.expect(")", "')'")
            body = self.expr()
            for a in reversed(names):
                body = Restrict(a, body)
            return body
        return self.par()

    def name_tok(self) -> Tok:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS or t.text.endswith("'"):
            self.error(f"expected an action name, found {self.describe(t)}")
        return self.advance()

    def par(self) -> Term:
        t0 = self.tok
        left = self.sum()
        self.check_par_operand(left, t0)
        while self.tok.kind == "|":
            self.advance()
            t1 = self.tok
            right = self.sum()
            self.check_par_operand(right, t1)
            left = Par(left, right)
        return left

    def check_par_operand(self, t: Term, tok: Tok):
        if isinstance(t, Restrict):
            self.cat_error("restriction is only allowed at top level, not inside a parallel composition", tok)

    def sum(self) -> Term:
        t0 = self.tok
        left = self.prefix()
        if self.tok.kind != "+":
            return left
        self.check_summand(left, t0)
        while self.tok.kind == "+":
            self.advance()
            t1 = self.tok
            right = self.prefix()
            self.check_summand(right, t1)
            left = Sum(left, right)
        return left

    def check_summand(self, t: Term, tok: Tok):
        if not is_guarded(t):
            what = {"sequential": "constant or variable", "parallel": "parallel composition"}.get(
                category(t), "restriction"
            )
            self.cat_error(f"a {what} cannot be a summand; summands must be guarded", tok)

    def action(self) -> tuple:
        """Parse an action if one starts here and is followed by '.', else return None."""
        t = self.tok
        if t.kind == "~":
            self.advance()
            n = self.tok
            if n.kind != "ident" or n.text in KEYWORDS:
                self.error(f"expected a name after '~', found {self.describe(n)}")
            self.advance()
            if self.tok.kind != ".":
                self.error(f"expected '.' after action ~{n.text}")
            return Action("out", n.text.rstrip("'"), n.text.endswith("'")), t
        if t.kind == "ident" and t.text not in ("nu", "main"):
            if self.peek().kind == ".":
                self.advance()
                if t.text == "tau":
                    return Action("tau"), t
                return Action("in", t.text.rstrip("'"), t.text.endswith("'")), t
            return None
        return None

    def prefix(self) -> Term:
        t = self.tok
        if t.kind == "<":
            self.advance()
            n = self.tok
            if n.kind == "~":
                self.cat_error("a strong prefix must carry an input action", n)
            if n.kind != "ident" or n.text in KEYWORDS:
                self.error(f"expected an input name inside '<...>', found {self.describe(n)}")
            self.advance()
            self.expect(">", "'>'")
            self.expect(".", "'.'")
            ct = self.tok
            cont = self.prefix()
            if not is_guarded(cont):
                self.cat_error(f"a strong prefix must be followed by a guarded term, found a {category(cont)} term", ct)
            return Strong(Action("in", n.text.rstrip("'"), n.text.endswith("'")), cont)
        act = self.action()
        if act is not None:
            a, _ = act
            self.expect(".", "'.'")
            ct = self.tok
            cont = self.prefix()
            if isinstance(cont, Restrict):
                self.cat_error("a prefix cannot be followed by a restriction", ct)
            return Prefix(a, cont)
        return self.atom()

    def atom(self) -> Term:
        t = self.tok
        if t.kind == "zero":
            self.advance()
            return NIL
        if t.kind == "const":
            self.advance()
            self.refs.append((t.text, t))
            return Const(t.text)
        if t.kind == "ident":
            if t.text in KEYWORDS:
                self.error(f"unexpected keyword {t.text!r}")
            if self.allow_vars:
                self.advance()
                return Var(t.text)
            self.error(f"expected '.' after action {t.text}", self.peek())
        if self.is_nu():
            return self.expr()
        if t.kind == "(":
            self.advance()
            e = self.expr()
            self.expect(")", "')'")
            return e
        self.error(f"expected a term, found {self.describe(t)}")


def parse_program(text: str, *, allow_vars: bool = False, env: ConstEnv | None = None) -> Program:
    """Parse a whole source file.  Raises :class:`FnmSyntaxError` (with line/column) or :class:`DefinitionError`."""
    return _Parser(text, allow_vars, env).program()


def parse(text: str, env: ConstEnv | None = None, *, allow_vars: bool = False) -> tuple:
    """Parse a source text and return ``(term, env)``; a missing main term is an error."""
    prog = parse_program(text, allow_vars=allow_vars, env=env)
    if prog.term is None:
        raise FnmSyntaxError("no main term", 1, 1)
    return prog.term, prog.env


def parse_term(text: str, env: ConstEnv | None = None, *, allow_vars: bool = False) -> Term:
    """Parse a single expression, resolving constants in ``env`` (which may be extended by definitions in ``text``)."""
    return parse(text, env, allow_vars=allow_vars)[0]
