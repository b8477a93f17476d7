"""Term AST over the truncated (t), unital (u) and extended (ext) signatures.

Terms are immutable trees. The only infinitary node is :class:`TruncSup`,
whose countable family is described finitely by a schema:

* :class:`Affine` -- ``f_n = n*u + v`` with ``u``, ``v`` free of the index;
* :class:`Monotone` -- a body containing the index symbol, declared
  increasing or decreasing (a decreasing declaration turns the node into the
  dual countable meet ``inf_n (f_n v cap)``);
* :class:`FamilyList` -- a finite family, extended constantly by its last
  member.

Every term of the signature denotes a cylinder-measurable function of its
variables (countable suprema of measurable functions are measurable), so no
runtime measurability check exists anywhere in the package.

A multi-index supremum ``sup_{n,k}`` is written as two nested ``TruncSup``
nodes with distinct index names.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Union

from .exact import ZERO, PiecewiseAffine, Rational, format_rational, rational


class Signature(enum.Enum):
    TRUNCATED = "t"
    UNITAL = "u"
    EXTENDED = "ext"

    @classmethod
    def parse(cls, text) -> "Signature":
        if isinstance(text, cls):
            return text
        for sig in cls:
            if sig.value == text:
                return sig
        raise ValueError(f"unknown signature {text!r}; expected t, u or ext")


class TermError(ValueError):
    pass


class SignatureViolation(TermError):
    pass


class SchemaError(TermError):
    pass


class MissingIndex(TermError):
    pass


# -- index expressions (coefficients that depend on a TruncSup index) ---------


class IndexExpr:
    """Rational-valued expression in index symbols, used as a Scale coefficient."""

    __slots__ = ()

    def __add__(self, other):
        return IBin("+", self, as_iexpr(other))

    def __radd__(self, other):
        return IBin("+", as_iexpr(other), self)

    def __sub__(self, other):
        return IBin("-", self, as_iexpr(other))

    def __rsub__(self, other):
        return IBin("-", as_iexpr(other), self)

    def __mul__(self, other):
        if isinstance(other, Term):
            return Scale(self, other)
        return IBin("*", self, as_iexpr(other))

    def __rmul__(self, other):
        return IBin("*", as_iexpr(other), self)

    def __truediv__(self, other):
        return IBin("/", self, as_iexpr(other))

    def __rtruediv__(self, other):
        return IBin("/", as_iexpr(other), self)

    def __pow__(self, other):
        return IBin("^", self, as_iexpr(other))

    def __rpow__(self, other):
        return IBin("^", as_iexpr(other), self)

    def __neg__(self):
        return IBin("-", IConst(ZERO), self)


@dataclass(frozen=True)
class IConst(IndexExpr):
    value: Rational

    def __post_init__(self):
        object.__setattr__(self, "value", rational(self.value))


@dataclass(frozen=True)
class IVar(IndexExpr):
    name: str


@dataclass(frozen=True)
class IBin(IndexExpr):
    op: str
    left: IndexExpr
    right: IndexExpr

    def __post_init__(self):
        if self.op not in "+-*/^":
            raise TermError(f"unknown index operator {self.op!r}")


@dataclass(frozen=True)
class IFun(IndexExpr):
    name: str
    args: tuple

    def __post_init__(self):
        if self.name not in ("min", "max") or len(self.args) != 2:
            raise TermError("index functions are min(a, b) and max(a, b)")


def as_iexpr(x) -> IndexExpr:
    if isinstance(x, IndexExpr):
        return x
    if isinstance(x, str):
        return IVar(x)
    return IConst(rational(x))


def iexpr_indices(e: IndexExpr) -> frozenset:
    if isinstance(e, IVar):
        return frozenset([e.name])
    if isinstance(e, IBin):
        return iexpr_indices(e.left) | iexpr_indices(e.right)
    if isinstance(e, IFun):
        return iexpr_indices(e.args[0]) | iexpr_indices(e.args[1])
    return frozenset()


def eval_iexpr(e: IndexExpr, env) -> Rational:
    if isinstance(e, IConst):
        return e.value
    if isinstance(e, IVar):
        try:
            return rational(env[e.name])
        except KeyError:
            raise MissingIndex(f"index {e.name!r} is not bound") from None
    if isinstance(e, IFun):
        a, b = eval_iexpr(e.args[0], env), eval_iexpr(e.args[1], env)
        return min(a, b) if e.name == "min" else max(a, b)
    a, b = eval_iexpr(e.left, env), eval_iexpr(e.right, env)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    if e.op == "/":
        if b == 0:
            raise ZeroDivisionError("division by zero in index expression")
        return a / b
    if b.denominator != 1:
        raise TermError("index exponents must be integers")
    if a == 0 and b < 0:
        raise ZeroDivisionError("zero to a negative power in index expression")
    return a ** int(b)


def iexpr_to_pwa(e: IndexExpr, index: str, env) -> PiecewiseAffine | None:
    """``t -> e[index := t]`` as a piecewise-affine function, if it is one."""
    if index not in iexpr_indices(e):
        return PiecewiseAffine.constant(eval_iexpr(e, env))
    if isinstance(e, IVar):
        return PiecewiseAffine.affine(1, 0)
    if isinstance(e, IFun):
        a = iexpr_to_pwa(e.args[0], index, env)
        b = iexpr_to_pwa(e.args[1], index, env)
        if a is None or b is None:
            return None
        return a.minimum(b) if e.name == "min" else a.maximum(b)
    a = iexpr_to_pwa(e.left, index, env)
    b = iexpr_to_pwa(e.right, index, env)
    if a is None or b is None:
        return None
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a + (-b)
    if e.op == "*" and (a.is_constant() or b.is_constant()):
        return a * b
    if e.op == "/" and b.is_constant() and b.pieces[0][1] != 0:
        return a.scale(1 / b.pieces[0][1])
    return None


def substitute_iexpr(e: IndexExpr, name: str, value) -> IndexExpr:
    if name not in iexpr_indices(e):
        return e
    if isinstance(e, IVar):
        return IConst(value)
    if isinstance(e, IFun):
        return IFun(e.name, tuple(substitute_iexpr(a, name, value) for a in e.args))
    return IBin(e.op, substitute_iexpr(e.left, name, value), substitute_iexpr(e.right, name, value))


def format_iexpr(e: IndexExpr) -> str:
    if isinstance(e, IConst):
        text = format_rational(e.value)
        return text if e.value.denominator == 1 and e.value >= 0 else f"({text})"
    if isinstance(e, IVar):
        return e.name
    if isinstance(e, IFun):
        return f"{e.name}({format_iexpr(e.args[0])}, {format_iexpr(e.args[1])})"
    return f"({format_iexpr(e.left)} {e.op} {format_iexpr(e.right)})"


# -- terms ---------------------------------------------------------------------


class Term:
    """Base class of AST nodes. Operators build terms: ``+ - | &`` and scalar ``*``."""

    __slots__ = ()

    def __add__(self, other):
        return Add(self, other)

    def __sub__(self, other):
        return Add(self, Scale(rational(-1), other))

    def __neg__(self):
        return Scale(rational(-1), self)

    def __or__(self, other):
        return Join(self, other)

    def __and__(self, other):
        return meet(self, other)

    def __rmul__(self, coef):
        if isinstance(coef, (IndexExpr, str)):
            return Scale(as_iexpr(coef), self)
        return Scale(rational(coef), self)

    def children(self) -> tuple:
        return ()

    @cached_property
    def indices(self) -> frozenset:
        """Index symbols referenced but not bound inside this term."""
        out = frozenset()
        for c in self.children():
            out |= c.indices
        return out

    def __str__(self) -> str:
        from .dsl import format_term

        return format_term(self)


@dataclass(frozen=True, eq=True)
class Proj(Term):
    index: int

    def __post_init__(self):
        if not isinstance(self.index, int) or isinstance(self.index, bool) or self.index < 0:
            raise TermError("variable indices are nonnegative integers")


@dataclass(frozen=True)
class Zero(Term):
    pass


@dataclass(frozen=True)
class One(Term):
    pass


@dataclass(frozen=True)
class Add(Term):
    left: Term
    right: Term

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Scale(Term):
    coef: Union[Rational, IndexExpr]
    arg: Term

    def __post_init__(self):
        if not isinstance(self.coef, IndexExpr):
            object.__setattr__(self, "coef", rational(self.coef))

    def children(self):
        return (self.arg,)

    @cached_property
    def indices(self) -> frozenset:
        own = iexpr_indices(self.coef) if isinstance(self.coef, IndexExpr) else frozenset()
        return own | self.arg.indices


@dataclass(frozen=True)
class Join(Term):
    left: Term
    right: Term

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Trunc(Term):
    arg: Term

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class Square(Term):
    arg: Term

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class AbsPow(Term):
    """``|arg| ** exponent`` for a positive rational exponent."""

    exponent: Rational
    arg: Term

    def __post_init__(self):
        object.__setattr__(self, "exponent", rational(self.exponent))
        if self.exponent <= 0:
            raise TermError("AbsPow needs a positive exponent")

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class Affine:
    """``f_n = n*u + v``."""

    u: Term
    v: Term = field(default_factory=Zero)

    def terms(self) -> tuple:
        return (self.u, self.v)


INCREASING = "inc"
DECREASING = "dec"


@dataclass(frozen=True)
class Monotone:
    body: Term
    direction: str = INCREASING
    hint: int = 64

    def __post_init__(self):
        if self.direction not in (INCREASING, DECREASING):
            raise SchemaError("direction must be 'inc' or 'dec'")
        if not isinstance(self.hint, int) or self.hint < 1:
            raise SchemaError("stabilization hint must be a positive integer")

    def terms(self) -> tuple:
        return (self.body,)


@dataclass(frozen=True)
class FamilyList:
    members: tuple

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if not self.members:
            raise SchemaError("a finite family needs at least one member")

    def terms(self) -> tuple:
        return self.members


Schema = Union[Affine, Monotone, FamilyList]


@dataclass(frozen=True)
class TruncSup(Term):
    """``sup_n (f_n ^ cap)`` for the family described by ``schema``."""

    cap: Term
    schema: Schema
    index: str = "n"

    def __post_init__(self):
        if isinstance(self.schema, Affine):
            for part in self.schema.terms():
                if self.index in part.indices:
                    raise SchemaError(
                        f"affine schema parts must not mention their own index {self.index!r}"
                    )
        elif not isinstance(self.schema, (Monotone, FamilyList)):
            raise SchemaError(f"unsupported schema {type(self.schema).__name__}")

    def children(self):
        return (self.cap,) + self.schema.terms()

    @cached_property
    def indices(self) -> frozenset:
        out = self.cap.indices
        for part in self.schema.terms():
            inner = part.indices
            if isinstance(self.schema, Monotone):
                inner = inner - {self.index}
            out |= inner
        return out

    def first_member(self) -> Term:
        """``f_0`` of the family."""
        if isinstance(self.schema, Affine):
            return self.schema.v
        if isinstance(self.schema, FamilyList):
            return self.schema.members[0]
        return substitute_index(self.schema.body, self.index, ZERO)


# -- derived operators -----------------------------------------------------------


def meet(f: Term, g: Term) -> Term:
    """``f ^ g = -((-f) v (-g))``."""
    return Scale(rational(-1), Join(Scale(rational(-1), f), Scale(rational(-1), g)))


def pos(f: Term) -> Term:
    return Join(f, Zero())


def negpart(f: Term) -> Term:
    """``f^- = -(f ^ 0)``."""
    return Scale(rational(-1), meet(f, Zero()))


def absolute(f: Term) -> Term:
    """``|f| = f^+ + f^-`` with ``f^- = -(f ^ 0) >= 0``."""
    return Add(pos(f), negpart(f))


def countable_meet(cap: Term, body: Term, index: str = "n", hint: int = 64) -> Term:
    """``inf_n (f_n v cap) = -sup_n ((-f_n) ^ (-cap))`` for a decreasing family."""
    return Scale(rational(-1), TruncSup(Scale(rational(-1), cap),
                                        Monotone(Scale(rational(-1), body), INCREASING, hint),
                                        index))


_DERIVED = {"meet": (meet, 2), "pos": (pos, 1), "negpart": (negpart, 1), "abs": (absolute, 1)}


def derived(kind: str, *args: Term) -> Term:
    try:
        fn, arity = _DERIVED[kind]
    except KeyError:
        raise TermError(f"unknown derived operator {kind!r}") from None
    if len(args) != arity:
        raise TermError(f"{kind} takes {arity} argument(s), got {len(args)}")
    return fn(*args)


def x(i: int) -> Proj:
    return Proj(i)


# -- structural utilities -----------------------------------------------------------


def iter_nodes(t: Term):
    stack = [t]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children()))


def free_vars(t: Term) -> tuple:
    """Sorted Proj indices occurring anywhere in ``t`` (caps and schemas included)."""
    return tuple(sorted({n.index for n in iter_nodes(t) if isinstance(n, Proj)}))


def arity(t: Term) -> int:
    fv = free_vars(t)
    return fv[-1] + 1 if fv else 0


def size(t: Term) -> int:
    return sum(1 for _ in iter_nodes(t))


def substitute_index(t: Term, name: str, value) -> Term:
    """Replace the index symbol ``name`` by the constant ``value``.

    A Monotone schema binding the same name shadows it in its body.
    """
    if name not in t.indices:
        return t
    if isinstance(t, Scale):
        coef = t.coef
        if isinstance(coef, IndexExpr):
            coef = substitute_iexpr(coef, name, rational(value))
        return Scale(coef, substitute_index(t.arg, name, value))
    if isinstance(t, (Add, Join)):
        return type(t)(substitute_index(t.left, name, value), substitute_index(t.right, name, value))
    if isinstance(t, (Trunc, Square)):
        return type(t)(substitute_index(t.arg, name, value))
    if isinstance(t, AbsPow):
        return AbsPow(t.exponent, substitute_index(t.arg, name, value))
    if isinstance(t, TruncSup):
        cap = substitute_index(t.cap, name, value)
        s = t.schema
        if isinstance(s, Affine):
            schema = Affine(substitute_index(s.u, name, value), substitute_index(s.v, name, value))
        elif isinstance(s, FamilyList):
            schema = FamilyList(tuple(substitute_index(m, name, value) for m in s.members))
        elif t.index == name:
            schema = s
        else:
            schema = Monotone(substitute_index(s.body, name, value), s.direction, s.hint)
        return TruncSup(cap, schema, t.index)
    return t


_T_ONLY = (Trunc,)
_U_ONLY = (One,)
_EXT_ONLY = (Square, AbsPow)


def signature_of(t: Term) -> Signature:
    """Smallest signature containing every node of ``t``.

    Terms mixing ``One`` with ``Trunc`` are reported as EXTENDED.
    """
    kinds = {type(n) for n in iter_nodes(t)}
    if kinds & set(_EXT_ONLY):
        return Signature.EXTENDED
    has_one, has_trunc = One in kinds, Trunc in kinds
    if has_one and has_trunc:
        return Signature.EXTENDED
    if has_one:
        return Signature.UNITAL
    return Signature.TRUNCATED


def check_signature(t: Term, sig: Signature) -> None:
    sig = Signature.parse(sig)
    for node in iter_nodes(t):
        if sig is Signature.TRUNCATED and isinstance(node, _U_ONLY + _EXT_ONLY):
            raise SignatureViolation(f"{type(node).__name__} is not in the truncated signature")
        if sig is Signature.UNITAL and isinstance(node, _T_ONLY + _EXT_ONLY):
            raise SignatureViolation(f"{type(node).__name__} is not in the unital signature")
        if sig is Signature.EXTENDED and isinstance(node, _T_ONLY):
            raise SignatureViolation("Trunc is not in the extended signature; use meet(f, one)")


def is_certifiable_kind(t: Term) -> bool:
    return not any(isinstance(n, _EXT_ONLY) for n in iter_nodes(t))


__all__ = [
    "Signature", "TermError", "SignatureViolation", "SchemaError", "MissingIndex",
    "IndexExpr", "IConst", "IVar", "IBin", "IFun", "as_iexpr", "eval_iexpr", "iexpr_indices",
    "iexpr_to_pwa", "format_iexpr", "Term", "Proj", "Zero", "One", "Add", "Scale", "Join",
    "Trunc", "Square", "AbsPow", "Affine", "Monotone", "FamilyList", "TruncSup", "INCREASING",
    "DECREASING", "meet", "pos", "negpart", "absolute", "countable_meet", "derived", "x",
    "iter_nodes", "free_vars", "arity", "size", "substitute_index", "signature_of",
    "check_signature", "is_certifiable_kind",
]
