"""Concrete algebras and the identity catalog.

Three kinds of carrier, all with pointwise operations on rational vectors:

* ``FinitePowerAlgebra(k)``: functions on a k-point set (``k = 1`` is the
  real line restricted to the rationals);
* ``SigmaIdealQuotient(k, N)``: the same modulo functions vanishing off N,
  represented canonically by the coordinates outside N.

An identity is a chain of terms over element variables ``x0, x1, ...``
related by ``=`` or ``<=``. Checking evaluates every side coordinatewise on
seeded random elements.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .evaluation import evaluate
from .exact import ONE, ZERO, format_rational, rational, sup_affine_capped
from .sampling import random_rational
from .terms import (
    Add, Affine, FamilyList, IVar, Join, Monotone, One, Proj, Scale, Term, TermError, Trunc,
    TruncSup, Zero, free_vars, meet, negpart, pos,
)


class UnsupportedOperation(TermError):
    pass


class DimensionMismatch(ValueError):
    pass


# -- carriers ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FinitePowerAlgebra:
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("carrier needs at least one point")

    @property
    def name(self) -> str:
        return "r" if self.dim == 1 else f"power:{self.dim}"

    @property
    def width(self) -> int:
        """Number of stored coordinates per element."""
        return self.dim

    def element(self, values) -> tuple:
        values = tuple(rational(v) for v in values)
        if len(values) != self.width:
            raise DimensionMismatch(f"{self.name} elements have {self.width} coordinates")
        return values

    def unit(self) -> tuple:
        return (ONE,) * self.width

    def zero(self) -> tuple:
        return (ZERO,) * self.width

    def random_element(self, rng: random.Random) -> tuple:
        return tuple(random_rational(rng) for _ in range(self.width))

    def evaluate(self, t: Term, env: Mapping[int, tuple]) -> tuple:
        """Coordinatewise value of ``t`` with ``x_j`` bound to ``env[j]``."""
        return tuple(evaluate(t, {j: e[c] for j, e in env.items()}) for c in range(self.width))

    def leq(self, a: tuple, b: tuple) -> bool:
        return all(p <= q for p, q in zip(a, b))


RealModel = FinitePowerAlgebra(1)


@dataclass(frozen=True)
class SigmaIdealQuotient(FinitePowerAlgebra):
    null: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        super().__post_init__()
        null = frozenset(int(i) for i in self.null)
        if not null <= set(range(self.dim)):
            raise DimensionMismatch(f"null set {sorted(null)} is not inside 0..{self.dim - 1}")
        if len(null) == self.dim:
            raise ValueError("the null set must not be the whole carrier")
        object.__setattr__(self, "null", null)

    @property
    def name(self) -> str:
        return f"quotient:{self.dim}:" + ",".join(str(i) for i in sorted(self.null))

    @property
    def kept(self) -> tuple:
        return tuple(i for i in range(self.dim) if i not in self.null)

    @property
    def width(self) -> int:
        return self.dim - len(self.null)

    def quotient_map(self, vector) -> tuple:
        vector = tuple(rational(v) for v in vector)
        if len(vector) != self.dim:
            raise DimensionMismatch(f"expected a vector of length {self.dim}")
        return tuple(vector[i] for i in self.kept)

    def section(self, element) -> tuple:
        """Representative of the class, 0 on the null set."""
        element = self.element(element)
        out = [ZERO] * self.dim
        for i, v in zip(self.kept, element):
            out[i] = v
        return tuple(out)


def parse_model(spec: str) -> FinitePowerAlgebra:
    """``r``, ``power:K`` or ``quotient:K:i,j,...`` (null coordinates)."""
    parts = spec.split(":")
    try:
        if parts == ["r"]:
            return RealModel
        if parts[0] == "power" and len(parts) == 2:
            return FinitePowerAlgebra(int(parts[1]))
        if parts[0] == "quotient" and len(parts) == 3:
            null = [int(i) for i in parts[2].split(",") if i.strip()]
            return SigmaIdealQuotient(int(parts[1]), frozenset(null))
    except ValueError as exc:
        raise ValueError(f"bad model {spec!r}: {exc}") from None
    raise ValueError(f"bad model {spec!r}; use r, power:K or quotient:K:i,j")


# -- element-level truncated suprema ------------------------------------------------------


@dataclass(frozen=True)
class AffineFamily:
    """Elements ``f_n = n*u + v``."""

    u: tuple
    v: tuple


@dataclass(frozen=True)
class ListFamily:
    """Finitely many elements, the last one repeated."""

    members: tuple


def truncsup_model(model: FinitePowerAlgebra, cap, family) -> tuple:
    cap = model.element(cap)
    if isinstance(family, AffineFamily):
        u, v = model.element(family.u), model.element(family.v)
        return tuple(sup_affine_capped(a, b, c) for a, b, c in zip(u, v, cap))
    if isinstance(family, ListFamily):
        if not family.members:
            raise ValueError("empty family")
        members = [model.element(m) for m in family.members]
        return tuple(max(min(m[c], cap[c]) for m in members) for c in range(model.width))
    raise UnsupportedOperation(f"unsupported family {type(family).__name__}")


# -- identity catalog ---------------------------------------------------------------------

EQ = "="
LEQ = "<="


@dataclass(frozen=True)
class Identity:
    ident: str
    sides: tuple
    relation: str = EQ
    positive: tuple = ()
    note: str = ""

    @property
    def arity(self) -> int:
        used = set()
        for s in self.sides:
            used.update(free_vars(s))
        return max(used, default=-1) + 1

    def __str__(self) -> str:
        rel = f" {self.relation} "
        text = rel.join(str(s) for s in self.sides)
        if self.positive:
            text += "   [" + ", ".join(f"x{i} >= 0" for i in self.positive) + "]"
        return f"{self.ident}: {text}"


def _x(i):
    return Proj(i)


def _neg(t):
    return Scale(rational(-1), t)


def _sub(a, b):
    return Add(a, _neg(b))


def _catalog() -> tuple:
    f, g, h, k = _x(0), _x(1), _x(2), _x(3)
    n, i = IVar("n"), IVar("i")
    fp = pos(f)
    fam = (f, g, h)

    def sup_list(cap, members, index="n"):
        return TruncSup(cap, FamilyList(tuple(members)), index)

    T4P_rhs = TruncSup(fp, Affine(Trunc(fp)))
    T5P_body = _sub(Scale(n, fp), Trunc(Scale(n, fp)))
    inner = TruncSup(Scale(i, f), FamilyList((Trunc(g), Trunc(h))), "k")
    doppio_body = _sub(Scale(i, f), inner)

    identities = [
        Identity("TS1", (sup_list(k, fam), sup_list(k, [meet(m, k) for m in fam])),
                 note="capping the family by g first changes nothing"),
        Identity("TS2", (TruncSup(h, Affine(f, g)),
                         Join(meet(g, h), TruncSup(h, Affine(f, Add(f, g))))),
                 note="split off the first member"),
        Identity("TS3", (sup_list(k, [meet(f, h), meet(g, h)]), h), LEQ,
                 note="a family below h stays below h"),
        Identity("T1", (Trunc(f), _sub(Trunc(fp), negpart(f))),
                 note="truncation acts on the positive part"),
        Identity("T2", (Zero(), Trunc(f)), LEQ, positive=(0,),
                 note="truncation keeps positive elements positive"),
        Identity("T3", (meet(f, Trunc(g)), Trunc(f), f), LEQ, positive=(0, 1),
                 note="f ^ trunc(g) <= trunc(f) <= f"),
        Identity("T4P", (fp, T4P_rhs), note="f+ recovered from n*trunc(f+)"),
        Identity("T5P", (fp, TruncSup(fp, Monotone(T5P_body, "inc", 64))),
                 note="f+ recovered from n*f+ - trunc(n*f+)"),
        Identity("W1", (meet(One(), Zero()), Zero()), note="the unit is positive"),
        Identity("W2", (f, TruncSup(f, Affine(meet(f, One())))), positive=(0,),
                 note="the unit is weak"),
        Identity("DISTRIB", (meet(f, Join(Join(g, h), k)),
                             Join(Join(meet(f, g), meet(f, h)), meet(f, k))),
                 note="meets distribute over joins"),
        Identity("SUMDISTRIB", (TruncSup(h, Affine(f, Add(g, k))),
                                meet(Add(TruncSup(h, Affine(f, g)), k), h)), positive=(3,),
                 note="a positive shift passes through the truncated supremum"),
        Identity("TRUNCSUB", (Trunc(Add(f, g)), Add(Trunc(f), Trunc(g))), LEQ, positive=(0, 1),
                 note="truncation is subadditive on positives"),
        Identity("TRUNCMONO", (_sub(f, Trunc(f)), _sub(Add(f, g), Trunc(Add(f, g)))), LEQ,
                 positive=(0, 1), note="a - trunc(a) is monotone (b = a + |x1| >= a)"),
        Identity("MEETUNIT", (_sub(meet(fp, g), negpart(f)), meet(f, g)), positive=(1,),
                 note="(a+ ^ u) - a- = a ^ u"),
        Identity("DOUBLESUP", (f, TruncSup(f, Monotone(doppio_body, "inc", 64), "i")),
                 positive=(0, 1, 2), note="nested truncated suprema collapse"),
    ]
    return tuple(identities)


def _mutations() -> dict:
    """One documented syntactic break per identity; each must be refuted."""
    f, g, h, k = _x(0), _x(1), _x(2), _x(3)
    fp = pos(f)
    fam = (f, g, h)
    cat = {i.ident: i for i in CATALOG}

    def swap(ident, sides=None, **kw):
        base = cat[ident]
        return Identity(ident + "~", sides if sides is not None else base.sides,
                        kw.get("relation", base.relation), kw.get("positive", base.positive),
                        kw.get("note", ""))

    return {
        "TS1": swap("TS1", (cat["TS1"].sides[0],
                            TruncSup(k, FamilyList(tuple(Join(m, k) for m in fam)))),
                    note="members joined with g instead of met"),
        "TS2": swap("TS2", (cat["TS2"].sides[0], TruncSup(h, Affine(f, Add(f, g)))),
                    note="first member dropped"),
        "TS3": swap("TS3", (TruncSup(k, FamilyList((f, g))), h), note="h dropped inside"),
        "T1": swap("T1", (Trunc(f), Add(Trunc(fp), negpart(f))), note="+f- instead of -f-"),
        "T2": swap("T2", positive=(), note="positivity hypothesis dropped"),
        "T3": swap("T3", (Trunc(f), meet(f, Trunc(g)), f), note="first link reversed"),
        "T4P": swap("T4P", (fp, TruncSup(fp, FamilyList((Trunc(fp),)))), note="factor n dropped"),
        "T5P": swap("T5P", (fp, TruncSup(fp, FamilyList((_sub(fp, Trunc(fp)),)))),
                    note="factor n dropped"),
        "W1": swap("W1", (meet(One(), Zero()), One()), note="equated with the unit"),
        "W2": swap("W2", (f, TruncSup(f, FamilyList((meet(f, One()),)))), note="factor n dropped"),
        "DISTRIB": swap("DISTRIB", (Join(f, Join(Join(g, h), k)), cat["DISTRIB"].sides[1]),
                        note="join in place of the outer meet"),
        "SUMDISTRIB": swap("SUMDISTRIB", (cat["SUMDISTRIB"].sides[0],
                                          Add(TruncSup(h, Affine(f, g)), k)),
                           note="final meet with g dropped"),
        "TRUNCSUB": swap("TRUNCSUB", tuple(reversed(cat["TRUNCSUB"].sides)),
                         note="inequality reversed"),
        "TRUNCMONO": swap("TRUNCMONO", (_sub(f, Trunc(f)), _sub(g, Trunc(g))),
                          note="side condition a <= b dropped"),
        "MEETUNIT": swap("MEETUNIT", (Add(meet(fp, g), negpart(f)), meet(f, g)),
                         note="+a- instead of -a-"),
        "DOUBLESUP": swap("DOUBLESUP", (f, TruncSup(
            f, FamilyList((_sub(f, TruncSup(f, FamilyList((Trunc(g), Trunc(h))), "k")),)), "i")),
                          note="factor i dropped"),
    }


CATALOG = _catalog()
IDENTITY_IDS = tuple(i.ident for i in CATALOG)
MUTATIONS = _mutations()


def get_identity(ident: str) -> Identity:
    for i in CATALOG:
        if i.ident == ident.upper():
            return i
    raise KeyError(f"unknown identity {ident!r}; known: {', '.join(IDENTITY_IDS)}")


# -- checking -----------------------------------------------------------------------------


@dataclass(frozen=True)
class IdentityResult:
    ident: str
    holds: bool
    samples: int
    counterexample: dict | None = None
    values: tuple | None = None

    def line(self) -> str:
        if self.holds:
            return f"{self.ident} holds samples={self.samples}"
        at = ",".join(f"x{j}=({';'.join(format_rational(v) for v in e)})"
                      for j, e in sorted(self.counterexample.items()))
        return f"{self.ident} FAILS at={at}"


def random_instance(model: FinitePowerAlgebra, identity: Identity, rng: random.Random,
                    arity: int | None = None) -> dict:
    env = {}
    for j in range(identity.arity if arity is None else arity):
        e = model.random_element(rng)
        if j in identity.positive:
            e = tuple(abs(v) for v in e)
        env[j] = e
    return env


def _holds_at(model, identity: Identity, env: dict):
    values = [model.evaluate(s, env) for s in identity.sides]
    for a, b in zip(values, values[1:]):
        ok = a == b if identity.relation == EQ else model.leq(a, b)
        if not ok:
            return False, tuple(values)
    return True, tuple(values)


def check_identity(model: FinitePowerAlgebra, identity, samples: int = 10_000,
                   seed: int = 0) -> IdentityResult:
    """Exact check on ``samples`` seeded instantiations; the first failure is returned."""
    if isinstance(identity, str):
        identity = get_identity(identity)
    if samples < 1:
        raise ValueError("samples must be positive")
    rng = random.Random(f"{seed}:{identity.ident}:{model.name}")
    arity = identity.arity
    for s in range(samples):
        env = random_instance(model, identity, rng, arity)
        ok, values = _holds_at(model, identity, env)
        if not ok:
            return IdentityResult(identity.ident, False, s + 1, env, values)
    return IdentityResult(identity.ident, True, samples)


def check_catalog(model: FinitePowerAlgebra, samples: int = 10_000, seed: int = 0,
                  idents: Sequence[str] | None = None) -> list:
    chosen = CATALOG if idents is None else [get_identity(i) for i in idents]
    return [check_identity(model, i, samples, seed) for i in chosen]


# -- homomorphism property ----------------------------------------------------------------

PRIMITIVE_PROBES = (
    Add(_x(0), _x(1)),
    Join(_x(0), _x(1)),
    Scale(rational("-3/2"), _x(0)),
    Trunc(_x(0)),
    One(),
    Zero(),
    TruncSup(_x(2), Affine(_x(0), _x(1))),
    TruncSup(_x(2), FamilyList((_x(0), _x(1)))),
)


def check_homomorphism(quotient: SigmaIdealQuotient, samples: int = 1000, seed: int = 0):
    """``quotient_map`` commutes with every primitive; returns the first failure or None."""
    power = FinitePowerAlgebra(quotient.dim)
    rng = random.Random(seed)
    for _ in range(samples):
        env = {j: power.random_element(rng) for j in range(3)}
        qenv = {j: quotient.quotient_map(e) for j, e in env.items()}
        for t in PRIMITIVE_PROBES:
            if quotient.quotient_map(power.evaluate(t, env)) != quotient.evaluate(t, qenv):
                return t, env
    return None


__all__ = [
    "UnsupportedOperation", "DimensionMismatch", "FinitePowerAlgebra", "RealModel",
    "SigmaIdealQuotient", "parse_model", "AffineFamily", "ListFamily", "truncsup_model",
    "Identity", "CATALOG", "IDENTITY_IDS", "MUTATIONS", "get_identity", "IdentityResult",
    "check_identity", "check_catalog", "check_homomorphism", "EQ", "LEQ",
]
