"""Compile indicators, simple functions and dominated ladders into terms.

Everything produced here (outside the unital variant of :func:`indicator_gt`)
is a truncated-signature term and therefore certifies with ``k = 0``.

The basic gadget: for ``h >= 0``::

    1_{h > 1} = tsup[m] cap=trunc(h) : m*(h - trunc(h))

since ``h - trunc(h)`` is positive exactly when ``h > 1``. Arguments are passed
through ``pos`` first so that negative inputs give 0 rather than ``h``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence, Union

from gmpy2 import mpq

from .evaluation import evaluate
from .exact import ONE, ZERO, Rational, format_rational, rational
from .terms import (
    IBin, IConst, IFun, IndexExpr, IVar, Add, Affine, Join, Monotone, One, Proj, Scale, Signature,
    Term, TermError, Trunc, TruncSup, Zero, countable_meet, free_vars, meet, pos,
)


class NonpositiveThreshold(TermError):
    pass


class DominatorTooSmall(TermError):
    pass


class LadderNotIncreasing(TermError):
    pass


class EmptyRegion(TermError):
    pass


# -- indicators ----------------------------------------------------------------------------


def indicator_gt_term(f: Term, c: Union[Rational, IndexExpr] = ONE, index: str = "m",
                      unital: bool = False) -> Term:
    """``1_{c*f > 1}``; ``c`` may depend on an outer index."""
    h = Scale(c, pos(f)) if isinstance(c, IndexExpr) or c != 1 else pos(f)
    cap = meet(h, One()) if unital else Trunc(h)
    return TruncSup(cap, Affine(Add(h, Scale(rational(-1), cap))), index)


def _check_threshold(lam) -> Rational:
    lam = rational(lam)
    if lam <= 0:
        raise NonpositiveThreshold(f"threshold must be positive, got {format_rational(lam)}")
    return lam


def indicator_gt(i: int, lam, sig=Signature.TRUNCATED) -> Term:
    """Term equal to 1 where ``x_i > lam`` and 0 elsewhere.

    In the truncated signature ``lam`` must be positive. With the unit
    available (``sig="u"``) any rational threshold works, by shifting
    ``x_i`` by ``1 - lam`` units.
    """
    sig = Signature.parse(sig)
    if sig is Signature.TRUNCATED:
        return indicator_gt_term(Proj(i), 1 / _check_threshold(lam))
    lam = rational(lam)
    shifted = Add(Proj(i), Scale(1 - lam, One())) if lam != 1 else Proj(i)
    return indicator_gt_term(shifted, ONE, unital=True)


def q_coefficient(lam: Rational, index: str = "n") -> IndexExpr:
    """``1/q_n`` with ``q_n = lam * (1 - 2^-(n+1))``, increasing to ``lam``."""
    n = IVar(index)
    q = IBin("*", IConst(lam), IBin("-", IConst(ONE),
                                    IBin("^", IConst(mpq(1, 2)), IBin("+", n, IConst(ONE)))))
    return IBin("/", IConst(ONE), q)


def indicator_ge(i: int, lam, hint: int = 64) -> Term:
    """Term equal to 1 where ``x_i >= lam`` and 0 elsewhere.

    Realized as the countable meet of ``1_{x_i > q_n}`` under the cap 0. A
    point with ``x_i < lam`` is settled once ``q_n >= x_i``; that needs
    ``n + 1 >= log2(lam / (lam - x_i))``, so points closer to ``lam`` than
    ``lam * 2^-(hint+1)`` are beyond the hint. Points with ``x_i >= lam``
    never reach the cap; their value is exact but evaluation reports a
    StabilityWarning.
    """
    lam = _check_threshold(lam)
    body = indicator_gt_term(Proj(i), q_coefficient(lam, "n"), index="m")
    return countable_meet(Zero(), body, index="n", hint=hint)


# -- regions -------------------------------------------------------------------------------


@dataclass(frozen=True)
class ThresholdSet:
    var: int
    relation: str
    lam: Rational

    def __post_init__(self):
        if self.relation not in (">", ">="):
            raise ValueError(f"relation must be '>' or '>=', got {self.relation!r}")
        object.__setattr__(self, "lam", _check_threshold(self.lam))

    def contains(self, point) -> bool:
        v = point[self.var]
        return v > self.lam if self.relation == ">" else v >= self.lam

    def thresholds(self):
        yield self.var, self.lam

    def __str__(self):
        return f"x{self.var} {self.relation} {format_rational(self.lam)}"


@dataclass(frozen=True)
class AllOf:
    parts: tuple

    def __post_init__(self):
        if not self.parts:
            raise EmptyRegion("a region needs at least one part")

    def contains(self, point) -> bool:
        return all(p.contains(point) for p in self.parts)

    def thresholds(self):
        for p in self.parts:
            yield from p.thresholds()


@dataclass(frozen=True)
class AnyOf(AllOf):
    def contains(self, point) -> bool:
        return any(p.contains(point) for p in self.parts)


Region = Union[ThresholdSet, AllOf, AnyOf]


def region_vars(region: Region) -> list:
    return sorted({i for i, _ in region.thresholds()})


def verification_axis(thresholds: Sequence) -> list:
    """Sample values around each threshold, plus 0 and a negative value."""
    values = {ZERO, rational(-1)}
    for lam in thresholds:
        values.update((lam / 2, lam, lam + mpq(1, 2) * lam, lam + 1, 2 * lam + 3))
    return sorted(values)


def verification_grid(regions: Sequence, terms: Sequence = ()) -> list:
    """Product grid over every variable of the regions and terms."""
    per_var: dict = {}
    for r in regions:
        for i, lam in r.thresholds():
            per_var.setdefault(i, []).append(lam)
    for t in terms:
        for i in free_vars(t):
            per_var.setdefault(i, [])
    variables = sorted(per_var)
    axes = [verification_axis(per_var[i]) for i in variables]
    return [dict(zip(variables, coords)) for coords in itertools.product(*axes)]


def _region_body(region: Region, y: Term) -> Term:
    if isinstance(region, ThresholdSet):
        xi, lam = Proj(region.var), region.lam
        if region.relation == ">":
            # y * 1_{x_i > lam}
            return TruncSup(y, Affine(pos(Add(xi, Scale(-lam, y)))))
        # y - y * 1_{x_i < lam}
        below = TruncSup(y, Affine(pos(Add(Scale(lam, y), Scale(rational(-1), xi)))))
        return Add(y, Scale(rational(-1), below))
    parts = [_region_body(p, y) for p in region.parts]
    combine = meet if type(region) is AllOf else Join
    out = parts[0]
    for p in parts[1:]:
        out = combine(out, p)
    return out


def region_indicator(region: Region, g: Term, grid: Sequence | None = None) -> Term:
    """Indicator of ``region`` built under the dominator ``g`` (``g >= 1`` on the region).

    With ``y = 1_{g > 1/2}`` each threshold becomes ``y * 1_{x_i > lam}`` (or
    its ``>=`` counterpart), and meets and joins of these are indicators of
    intersections and unions inside ``{y = 1}``, which contains the region.
    """
    points = verification_grid([region], [g]) if grid is None else grid
    for point in points:
        if region.contains(point) and evaluate(g, point) < 1:
            raise DominatorTooSmall(
                f"dominator is {format_rational(evaluate(g, point))} < 1 inside the region at "
                + ",".join(f"x{i}={format_rational(v)}" for i, v in sorted(point.items())))
    y = indicator_gt_term(g, rational(2))
    return _region_body(region, y)


# -- simple functions and ladders ------------------------------------------------------------


@dataclass(frozen=True)
class SimpleFunctionSpec:
    entries: tuple  # of (coefficient >= 0, region)
    dominator: Term

    def __post_init__(self):
        entries = tuple((rational(c), r) for c, r in self.entries)
        if any(c < 0 for c, _ in entries):
            raise ValueError("simple-function coefficients must be nonnegative")
        object.__setattr__(self, "entries", entries)

    def value(self, point) -> Rational:
        return sum((c for c, r in self.entries if r.contains(point)), ZERO)

    def grid(self) -> list:
        return verification_grid([r for _, r in self.entries], [self.dominator])


def _check_dominated(spec: SimpleFunctionSpec, points) -> None:
    # only the support matters: off it the simple function is 0 whatever g is
    for point in points:
        v = spec.value(point)
        if v > 0 and v > (g := evaluate(spec.dominator, point)):
            raise DominatorTooSmall(
                f"spec value {format_rational(v)} exceeds dominator {format_rational(g)} at "
                + ",".join(f"x{i}={format_rational(u)}" for i, u in sorted(point.items())))


def simple_term(spec: SimpleFunctionSpec, grid: Sequence | None = None) -> Term:
    """Sum of ``c * 1_R`` over the entries, each indicator built under ``g / c``."""
    points = spec.grid() if grid is None else grid
    _check_dominated(spec, points)
    out: Term | None = None
    for c, region in spec.entries:
        if c == 0:
            continue
        term = Scale(c, region_indicator(region, Scale(1 / c, spec.dominator), points))
        out = term if out is None else Add(out, term)
    return Zero() if out is None else out


def _step(n: IVar, k: int) -> IndexExpr:
    """``min(max(n - k + 1, 0), 1)``: 0 before step k, 1 from step k on."""
    shifted = IBin("+", n, IConst(rational(1 - k)))
    return IFun("min", (IFun("max", (shifted, IConst(ZERO))), IConst(ONE)))


def ladder_term(ladder: Sequence[SimpleFunctionSpec], g: Term, index: str = "n") -> Term:
    """``tsup[n] cap=g`` over the increasing family ``s_0, s_1, ..., s_last, s_last, ...``."""
    if not ladder:
        raise ValueError("ladder needs at least one step")
    points = verification_grid([r for spec in ladder for _, r in spec.entries],
                               [g] + [spec.dominator for spec in ladder])
    for k in range(1, len(ladder)):
        for point in points:
            if ladder[k].value(point) < ladder[k - 1].value(point):
                raise LadderNotIncreasing(
                    f"step {k} drops below step {k - 1} at "
                    + ",".join(f"x{i}={format_rational(v)}" for i, v in sorted(point.items())))
    capped = SimpleFunctionSpec(ladder[-1].entries, g)
    _check_dominated(capped, points)
    steps = [simple_term(spec, points) for spec in ladder]
    body = steps[0]
    n = IVar(index)
    for k in range(1, len(steps)):
        diff = Add(steps[k], Scale(rational(-1), steps[k - 1]))
        body = Add(body, Scale(_step(n, k), diff))
    return TruncSup(g, Monotone(body, "inc", max(len(ladder), 1)), index)


__all__ = [
    "NonpositiveThreshold", "DominatorTooSmall", "LadderNotIncreasing", "EmptyRegion",
    "indicator_gt_term", "indicator_gt", "indicator_ge", "q_coefficient", "ThresholdSet",
    "AllOf", "AnyOf", "region_vars", "verification_grid", "region_indicator",
    "SimpleFunctionSpec", "simple_term", "ladder_term",
]
