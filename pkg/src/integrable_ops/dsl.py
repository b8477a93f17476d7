"""Text syntax for terms: parser and printer.

Grammar (``*`` binds tighter than ``v``, which binds tighter than ``+``/``-``)::

    term   := sum
    sum    := join (("+" | "-") join)*
    join   := unary ("v" unary)*
    unary  := "-" unary | coef "*" unary | atom
    coef   := RATIONAL | IDENT | "[" index-expr "]"
    atom   := "x" INT | "zero" | "one" | "(" term ")"
            | "trunc(" term ")" | "meet(" term "," term ")" | "abs(" term ")"
            | "pos(" term ")" | "neg(" term ")" | "sq(" term ")"
            | "pow[" RATIONAL "](" term ")"
            | "tsup[" IDENT "] cap=" term ":" schema
    schema := IDENT "*(" term ")" ["+" term]                 # affine, IDENT = the index
            | "mono(" ("inc" | "dec") "," INT "," term ")"
            | "list(" term ("," term)* ")"

``tsup`` extends as far to the right as possible; the printer wraps it in
parentheses whenever it is nested. Inside ``[...]`` the index-expression
language has ``+ - * / ^``, ``min``/``max`` and parentheses; constant
subexpressions are folded while parsing.

The printer emits fully parenthesised canonical text, so
``parse(format_term(t)) == t`` for every term built from primitive nodes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .exact import IrrationalLiteral, format_rational, rational
from .terms import (
    DECREASING, INCREASING, AbsPow, Add, Affine, FamilyList, IBin, IConst, IFun, IndexExpr,
    IVar, Join, Monotone, One, Proj, Scale, Signature, Square, Term, TermError, Trunc,
    TruncSup, Zero, absolute, check_signature, eval_iexpr, format_iexpr, iexpr_indices, meet,
    negpart, pos,
)


class ParseError(TermError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<var>x\d+)\b
  | (?P<num>\d+(?:\.\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()\[\],:=])
    """,
    re.VERBOSE,
)

_KEYWORDS = {
    "zero", "one", "trunc", "meet", "abs", "pos", "neg", "sq", "pow", "tsup", "cap",
    "mono", "inc", "dec", "list", "v", "min", "max",
}
_IRRATIONAL_NAMES = {"pi", "e", "sqrt", "tau", "inf", "nan", "log", "exp"}


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list:
    toks, pos_, line, line_start = [], 0, 1, 0
    while pos_ < len(text):
        m = _TOKEN_RE.match(text, pos_)
        if not m:
            raise ParseError(f"unexpected character {text[pos_]!r}", line, pos_ - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        if kind == "ws":
            for i, ch in enumerate(chunk):
                if ch == "\n":
                    line += 1
                    line_start = pos_ + i + 1
        else:
            if kind == "ident" and chunk in _KEYWORDS:
                kind = "kw"
            toks.append(_Tok(kind, chunk, line, pos_ - line_start + 1))
        pos_ = m.end()
    toks.append(_Tok("eof", "", line, pos_ - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str, sig: Signature | None):
        self.toks = _tokenize(text)
        self.i = 0
        self.sig = sig

    # -- token helpers
    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, message: str, tok: _Tok | None = None):
        tok = tok or self.tok
        raise ParseError(message, tok.line, tok.col)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "kw") and self.tok.text == text

    def expect(self, text: str) -> _Tok:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        tok = self.tok
        self.i += 1
        return tok

    def expect_int(self) -> int:
        if self.tok.kind != "num" or "." in self.tok.text:
            self.error("expected an integer")
        value = int(self.tok.text)
        self.i += 1
        return value

    # -- literals
    def rational_literal(self):
        text = self.tok.text
        self.i += 1
        if self.at("/") and self.peek().kind == "num":
            self.i += 1
            den = self.tok.text
            self.i += 1
            if "." in text or "." in den:
                self.error("fractions take integer numerator and denominator")
            text = f"{text}/{den}"
        return rational(text)

    # -- terms
    def parse(self) -> Term:
        t = self.sum()
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.text!r}")
        return t

    def sum(self) -> Term:
        t = self.join()
        while self.at("+") or self.at("-"):
            op = self.tok.text
            self.i += 1
            rhs = self.join()
            t = Add(t, rhs) if op == "+" else Add(t, Scale(rational(-1), rhs))
        return t

    def join(self) -> Term:
        t = self.unary()
        while self.at("v"):
            self.i += 1
            t = Join(t, self.unary())
        return t

    def unary(self) -> Term:
        if self.at("-"):
            self.i += 1
            if self.tok.kind == "num" and self._scaled_literal_ahead():
                coef = -self.rational_literal()
                self.expect("*")
                return Scale(coef, self.unary())
            return Scale(rational(-1), self.unary())
        if self.tok.kind == "num":
            if not self._scaled_literal_ahead():
                self.error("a bare number is not a term; constants appear as coefficients")
            coef = self.rational_literal()
            self.expect("*")
            return Scale(coef, self.unary())
        if self.tok.kind == "ident" and self.peek().text == "*":
            if self.tok.text in _IRRATIONAL_NAMES:
                tok = self.tok
                raise IrrationalLiteral(
                    f"{tok.text!r} is not rational (line {tok.line}, column {tok.col})")
            name = self.tok.text
            self.i += 2
            return Scale(IVar(name), self.unary())
        if self.at("["):
            self.i += 1
            coef = self.iexpr()
            self.expect("]")
            self.expect("*")
            return Scale(coef, self.unary())
        return self.atom()

    def _scaled_literal_ahead(self) -> bool:
        k = 1
        if self.peek(1).text == "/" and self.peek(2).kind == "num":
            k = 3
        return self.peek(k).text == "*"

    def atom(self) -> Term:
        tok = self.tok
        if tok.kind == "var":
            self.i += 1
            return Proj(int(tok.text[1:]))
        if tok.kind == "ident":
            if tok.text in _IRRATIONAL_NAMES:
                raise IrrationalLiteral(
                    f"{tok.text!r} is not rational (line {tok.line}, column {tok.col})")
            self.error(f"unknown name {tok.text!r}")
        if self.at("("):
            self.i += 1
            t = self.sum()
            self.expect(")")
            return t
        if tok.kind != "kw":
            self.error(f"unexpected {tok.text or 'end of input'!r}")
        word = tok.text
        self.i += 1
        if word == "zero":
            return Zero()
        if word == "one":
            if self.sig is Signature.TRUNCATED:
                raise_sig(tok, "'one' is not in the truncated signature")
            return One()
        if word == "tsup":
            return self.tsup()
        if word == "pow":
            if self.sig in (Signature.TRUNCATED, Signature.UNITAL):
                raise_sig(tok, "'pow' needs the extended signature")
            self.expect("[")
            if self.tok.kind != "num":
                self.error("expected a rational exponent")
            q = self.rational_literal()
            self.expect("]")
            self.expect("(")
            arg = self.sum()
            self.expect(")")
            return AbsPow(q, arg)
        if word in ("trunc", "abs", "pos", "neg", "sq"):
            self.expect("(")
            arg = self.sum()
            self.expect(")")
            if word == "trunc":
                if self.sig in (Signature.UNITAL, Signature.EXTENDED):
                    return meet(arg, One())
                return Trunc(arg)
            if word == "sq":
                if self.sig in (Signature.TRUNCATED, Signature.UNITAL):
                    raise_sig(tok, "'sq' needs the extended signature")
                return Square(arg)
            return {"abs": absolute, "pos": pos, "neg": negpart}[word](arg)
        if word == "meet":
            self.expect("(")
            a = self.sum()
            self.expect(",")
            b = self.sum()
            self.expect(")")
            return meet(a, b)
        self.error(f"unexpected keyword {word!r}", tok)

    def tsup(self) -> Term:
        self.expect("[")
        if self.tok.kind != "ident":
            self.error("expected an index name")
        index = self.tok.text
        self.i += 1
        self.expect("]")
        self.expect("cap")
        self.expect("=")
        cap = self.sum()
        self.expect(":")
        schema = self.schema(index)
        try:
            return TruncSup(cap, schema, index)
        except TermError as exc:
            self.error(str(exc))

    def schema(self, index: str):
        if self.at("mono"):
            self.i += 1
            self.expect("(")
            if not (self.at(INCREASING) or self.at(DECREASING)):
                self.error("expected 'inc' or 'dec'")
            direction = self.tok.text
            self.i += 1
            self.expect(",")
            hint = self.expect_int()
            if hint < 1:
                self.error("stabilization hint must be positive")
            self.expect(",")
            body = self.sum()
            self.expect(")")
            return Monotone(body, direction, hint)
        if self.at("list"):
            self.i += 1
            self.expect("(")
            members = [self.sum()]
            while self.at(","):
                self.i += 1
                members.append(self.sum())
            self.expect(")")
            return FamilyList(tuple(members))
        if self.tok.kind == "ident" and self.peek().text == "*":
            if self.tok.text != index:
                self.error(f"affine schema must scale by the index {index!r}")
            self.i += 2
            self.expect("(")
            u = self.sum()
            self.expect(")")
            v = Zero()
            if self.at("+"):
                self.i += 1
                v = self.sum()
            return Affine(u, v)
        self.error("unsupported schema; expected 'IDX*(...)', 'mono(...)' or 'list(...)'")

    # -- index expressions
    def iexpr(self) -> IndexExpr:
        e = self.iterm()
        while self.at("+") or self.at("-"):
            op = self.tok.text
            self.i += 1
            e = _fold(IBin(op, e, self.iterm()))
        return e

    def iterm(self) -> IndexExpr:
        e = self.ifactor()
        while self.at("*") or self.at("/"):
            op = self.tok.text
            self.i += 1
            e = _fold(IBin(op, e, self.ifactor()))
        return e

    def ifactor(self) -> IndexExpr:
        if self.at("-"):
            self.i += 1
            return _fold(IBin("-", IConst(0), self.ifactor()))
        base = self.iatom()
        if self.at("^"):
            self.i += 1
            return _fold(IBin("^", base, self.ifactor()))
        return base

    def iatom(self) -> IndexExpr:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return IConst(rational(tok.text))
        if tok.kind == "ident":
            if tok.text in _IRRATIONAL_NAMES:
                raise IrrationalLiteral(
                    f"{tok.text!r} is not rational (line {tok.line}, column {tok.col})")
            self.i += 1
            return IVar(tok.text)
        if self.at("min") or self.at("max"):
            self.i += 1
            self.expect("(")
            a = self.iexpr()
            self.expect(",")
            b = self.iexpr()
            self.expect(")")
            return _fold(IFun(tok.text, (a, b)))
        if self.at("("):
            self.i += 1
            e = self.iexpr()
            self.expect(")")
            return e
        self.error("expected an index expression")


def raise_sig(tok: _Tok, message: str):
    from .terms import SignatureViolation

    raise SignatureViolation(f"{message} (line {tok.line}, column {tok.col})")


def _fold(e: IndexExpr) -> IndexExpr:
    if iexpr_indices(e):
        return e
    return IConst(eval_iexpr(e, {}))


def parse(text: str, sig: Signature | str | None = None) -> Term:
    """Parse DSL text into a term.

    With ``sig=None`` every node kind is accepted as written. With an explicit
    signature the term is validated against it, and under ``u``/``ext``
    ``trunc(f)`` is rewritten to ``meet(f, one)``.
    """
    sig = Signature.parse(sig) if sig is not None else None
    term = _Parser(text, sig).parse()
    if sig is not None:
        check_signature(term, sig)
    return term


# -- printer ---------------------------------------------------------------------


def format_term(t: Term) -> str:
    return _fmt(t, top=True)


def _coef_text(c) -> str:
    if isinstance(c, IndexExpr):
        return f"[{format_iexpr(c)}]"
    return format_rational(c)


def _fmt(t: Term, top: bool = False) -> str:
    if isinstance(t, Proj):
        return f"x{t.index}"
    if isinstance(t, Zero):
        return "zero"
    if isinstance(t, One):
        return "one"
    if isinstance(t, Add):
        return f"({_fmt(t.left)} + {_fmt(t.right)})"
    if isinstance(t, Join):
        return f"({_fmt(t.left)} v {_fmt(t.right)})"
    if isinstance(t, Scale):
        return f"{_coef_text(t.coef)}*({_fmt(t.arg)})"
    if isinstance(t, Trunc):
        return f"trunc({_fmt(t.arg)})"
    if isinstance(t, Square):
        return f"sq({_fmt(t.arg)})"
    if isinstance(t, AbsPow):
        return f"pow[{format_rational(t.exponent)}]({_fmt(t.arg)})"
    if isinstance(t, TruncSup):
        s = t.schema
        if isinstance(s, Affine):
            schema = f"{t.index}*({_fmt(s.u)})"
            if s.v != Zero():
                schema += f" + {_fmt(s.v)}"
        elif isinstance(s, Monotone):
            schema = f"mono({s.direction}, {s.hint}, {_fmt(s.body)})"
        else:
            schema = "list(" + ", ".join(_fmt(m) for m in s.members) + ")"
        text = f"tsup[{t.index}] cap={_fmt(t.cap)} : {schema}"
        return text if top else f"({text})"
    raise TypeError(f"cannot format {type(t).__name__}")
