"""Linear-bound certificates, interval enclosures and classification.

A certificate ``(k, lambda)`` for a term ``t`` asserts that for every point
``v``::

    |t(v)| <= k + sum_j lambda_j * |v_j|

With ``k = 0`` the operation maps p-integrable families to p-integrable
functions over every measure space; with ``k >= 0`` it does so over every
finite measure space. Either kind of bound also makes ``t`` bounded on
bounded boxes, hence ``infinity``-integrability preserving.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .evaluation import evaluate
from .exact import ONE, ZERO, Interval, Rational, format_rational, rational
from .terms import (
    DECREASING, AbsPow, Add, FamilyList, IndexExpr, Join, Monotone, One, Proj, Scale, Square,
    Term, TermError, Trunc, TruncSup, Zero, eval_iexpr, free_vars, is_certifiable_kind,
)


class NotCertifiable(TermError):
    pass


@dataclass(frozen=True)
class BoundCertificate:
    k: Rational = ZERO
    lam: Mapping[int, Rational] = field(default_factory=dict)

    def __post_init__(self):
        k = rational(self.k)
        lam = {int(i): rational(c) for i, c in self.lam.items() if rational(c) != 0}
        if k < 0 or any(c < 0 for c in lam.values()):
            raise ValueError("certificate constants must be nonnegative")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "lam", dict(sorted(lam.items())))

    def __hash__(self):
        return hash((self.k, tuple(self.lam.items())))

    def __add__(self, other: "BoundCertificate") -> "BoundCertificate":
        lam = dict(self.lam)
        for i, c in other.lam.items():
            lam[i] = lam.get(i, ZERO) + c
        return BoundCertificate(self.k + other.k, lam)

    def scaled(self, c) -> "BoundCertificate":
        c = abs(rational(c))
        return BoundCertificate(c * self.k, {i: c * v for i, v in self.lam.items()})

    def maximum(self, other: "BoundCertificate") -> "BoundCertificate":
        lam = dict(self.lam)
        for i, c in other.lam.items():
            lam[i] = max(lam.get(i, ZERO), c)
        return BoundCertificate(max(self.k, other.k), lam)

    def bound_at(self, point) -> Rational:
        return self.k + sum((c * abs(rational(point[i])) for i, c in self.lam.items()), ZERO)

    def bound_on_box(self, box: Mapping[int, Interval]) -> Rational:
        return self.k + sum((c * box[i].magnitude() for i, c in self.lam.items()), ZERO)

    def __str__(self) -> str:
        inner = ",".join(f"{i}:{format_rational(c)}" for i, c in self.lam.items())
        return f"k={format_rational(self.k)} lambda={{{inner}}}"


JOIN_MAX = "max"
JOIN_SUM = "sum"


def infer_bound(t: Term, join_rule: str = JOIN_MAX) -> BoundCertificate:
    """Certificate by structural recursion.

    Join uses the componentwise max (``|f v g| <= |f| v |g|``); the looser
    sum rule is available as ``join_rule="sum"``. A truncated supremum is
    bounded by ``cert(cap) + cert(f_0)`` because ``f_0 ^ g <= sup <= g``.
    """
    if join_rule not in (JOIN_MAX, JOIN_SUM):
        raise ValueError(f"unknown join rule {join_rule!r}")
    return _infer(t, join_rule)


def _infer(t: Term, rule: str) -> BoundCertificate:
    if isinstance(t, Proj):
        return BoundCertificate(ZERO, {t.index: ONE})
    if isinstance(t, Zero):
        return BoundCertificate()
    if isinstance(t, One):
        return BoundCertificate(ONE)
    if isinstance(t, Add):
        return _infer(t.left, rule) + _infer(t.right, rule)
    if isinstance(t, Join):
        a, b = _infer(t.left, rule), _infer(t.right, rule)
        return a.maximum(b) if rule == JOIN_MAX else a + b
    if isinstance(t, Scale):
        c = t.coef
        if isinstance(c, IndexExpr):
            # only reachable after an index has been fixed to a constant
            c = eval_iexpr(c, {})
        return _infer(t.arg, rule).scaled(c)
    if isinstance(t, Trunc):
        return _infer(t.arg, rule)
    if isinstance(t, TruncSup):
        return _infer(t.cap, rule) + _infer(t.first_member(), rule)
    if isinstance(t, (Square, AbsPow)):
        raise NotCertifiable(f"{type(t).__name__} admits no linear bound")
    raise TypeError(f"cannot certify {type(t).__name__}")


def check_certificate(t, cert: BoundCertificate, point) -> bool:
    """Exact check of ``|t(point)| <= k + sum lambda_j |point_j|``.

    ``t`` is a term or any callable taking the point.
    """
    value = evaluate(t, point) if isinstance(t, Term) else rational(t(point))
    return abs(value) <= cert.bound_at(point)


# -- interval enclosure ---------------------------------------------------------------


def interval_bound(t: Term, box: Mapping[int, Interval]) -> Interval:
    """Sound enclosure of ``t`` over the box (not necessarily tight)."""
    if isinstance(t, Proj):
        try:
            return box[t.index]
        except KeyError:
            raise TermError(f"box does not cover x{t.index}") from None
    if isinstance(t, Zero):
        return Interval.point(ZERO)
    if isinstance(t, One):
        return Interval.point(ONE)
    if isinstance(t, Add):
        return interval_bound(t.left, box).add(interval_bound(t.right, box))
    if isinstance(t, Join):
        return interval_bound(t.left, box).join(interval_bound(t.right, box))
    if isinstance(t, Scale):
        c = t.coef
        if isinstance(c, IndexExpr):
            c = eval_iexpr(c, {})
        return interval_bound(t.arg, box).scale(c)
    if isinstance(t, Trunc):
        return interval_bound(t.arg, box).min_with(ONE)
    if isinstance(t, Square):
        return interval_bound(t.arg, box).square()
    if isinstance(t, AbsPow):
        return interval_bound(t.arg, box).abs_pow(t.exponent)
    if isinstance(t, TruncSup):
        cap = interval_bound(t.cap, box)
        s = t.schema
        if isinstance(s, Monotone) and s.direction == DECREASING:
            # cap <= inf_n (f_n v cap) <= f_0 v cap
            first = interval_bound(t.first_member(), box)
            return Interval(cap.lo, first.join(cap).hi)
        if isinstance(s, FamilyList):
            members = [interval_bound(m, box).meet(cap) for m in s.members]
            lo = max(m.lo for m in members)
            hi = max(m.hi for m in members)
            return Interval(lo, hi)
        # f_0 ^ cap <= sup <= cap
        first = interval_bound(t.first_member(), box)
        return Interval(first.meet(cap).lo, cap.hi)
    raise TypeError(f"cannot bound {type(t).__name__}")


def symmetric_box(indices, m) -> dict:
    m = rational(m)
    return {i: Interval(-m, m) for i in indices}


# -- classification -------------------------------------------------------------------


@dataclass(frozen=True)
class Classification:
    preserves_integrability: bool
    preserves_finite_measure_integrability: bool
    preserves_infty_integrability: bool
    certificate: BoundCertificate | None = None
    box_bound_witness: tuple | None = None

    def flags_line(self) -> str:
        def b(v):
            return "true" if v else "false"

        return (f"integrability={b(self.preserves_integrability)} "
                f"finite={b(self.preserves_finite_measure_integrability)} "
                f"infty={b(self.preserves_infty_integrability)}")


DEFAULT_BOX_RADII = (1, 10, 100)


def classify(t: Term, boxes=None) -> Classification:
    """Classify ``t`` by the integrability notions it provably preserves.

    Certifiable terms get their flags from :func:`infer_bound`. For terms with
    extended nodes only the boundedness flag is decided here, on the given
    boxes (default: symmetric boxes of radius 1, 10, 100); the other flags are
    reported false, pending a witness search.
    """
    if is_certifiable_kind(t):
        cert = infer_bound(t)
        return Classification(cert.k == 0, True, True, cert)
    if boxes is None:
        boxes = [symmetric_box(free_vars(t), m) for m in DEFAULT_BOX_RADII]
    witness = None
    finite = True
    for box in boxes:
        try:
            enclosure = interval_bound(t, box)
        except (OverflowError, ZeroDivisionError):
            finite = False
            break
        witness = (dict(box), enclosure)
    return Classification(False, False, finite and witness is not None, None, witness)
