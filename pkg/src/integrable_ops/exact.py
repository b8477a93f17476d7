"""Exact rational scalars, closed intervals and piecewise-affine functions.

Everything here is exact. Rationals are :class:`gmpy2.mpq` values; no
floating point is ever used on an evaluation path.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import gmpy2
from gmpy2 import mpq, mpz

Rational = type(mpq())

ZERO = mpq(0)
ONE = mpq(1)

_INT_RE = re.compile(r"^[+-]?\d+$")
_FRAC_RE = re.compile(r"^[+-]?\d+/\d+$")
_DEC_RE = re.compile(r"^[+-]?(\d+\.\d*|\.\d+)$")


class IrrationalLiteral(ValueError):
    """A literal that does not denote an exact rational number."""


def rational(value) -> Rational:
    """Convert ``value`` to an exact rational.

    Accepts ints, ``Fraction``, ``mpq``/``mpz`` and strings of the form
    ``-12/7``, ``3`` or ``0.25`` (decimals are converted exactly). Floats are
    refused: their binary value is rarely what the caller meant.
    """
    if isinstance(value, Rational):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, (int, type(mpz()))):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        text = value.strip()
        if _INT_RE.match(text):
            return mpq(int(text))
        if _FRAC_RE.match(text):
            num, den = text.split("/")
            if int(den) == 0:
                raise ZeroDivisionError(f"zero denominator in {value!r}")
            return mpq(int(num), int(den))
        if _DEC_RE.match(text):
            f = Fraction(text)
            return mpq(f.numerator, f.denominator)
        raise IrrationalLiteral(f"not an exact rational literal: {value!r}")
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass a string or Fraction")
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def format_rational(q) -> str:
    q = rational(q)
    if q.denominator == 1:
        return str(int(q.numerator))
    return f"{int(q.numerator)}/{int(q.denominator)}"


def floor(q) -> int:
    return int(math.floor(q))


def ceil(q) -> int:
    return int(math.ceil(q))


# -- rational bounds on real powers -------------------------------------------

_ROOT_BITS = 48


def _iroot_bounds(num: int, den: int, b: int) -> tuple[Rational, Rational]:
    """Rational lo <= (num/den)^(1/b) <= hi with relative gap about 2^-48."""
    if num == 0:
        return ZERO, ZERO
    if b == 1:
        q = mpq(num, den)
        return q, q
    # (num/den)^(1/b) = (num * den^(b-1))^(1/b) / den
    base = mpz(num) * mpz(den) ** (b - 1)
    shift = max(0, -(-(_ROOT_BITS * b - base.bit_length()) // b))
    root, exact = gmpy2.iroot(base * (mpz(1) << (shift * b)), b)
    scale = mpz(den) << shift
    lo = mpq(root, scale)
    hi = lo if exact else mpq(root + 1, scale)
    return lo, hi


def power_bounds(x, p) -> tuple[Rational, Rational]:
    """Rational enclosure ``lo <= x**p <= hi`` for rational x >= 0, p > 0.

    Exact (``lo == hi``) whenever the power is itself rational.
    """
    x, p = rational(x), rational(p)
    if x < 0 or p <= 0:
        raise ValueError("power_bounds needs x >= 0 and p > 0")
    a, b = int(p.numerator), int(p.denominator)
    xa = x**a
    return _iroot_bounds(int(xa.numerator), int(xa.denominator), b)


def power_upper(x, p) -> Rational:
    return power_bounds(x, p)[1]


def power_lower(x, p) -> Rational:
    return power_bounds(x, p)[0]


# -- dyadic expansions ----------------------------------------------------------


class NonDyadicWeight(ValueError):
    """A weight whose binary expansion does not terminate."""


def binary_exponents(a) -> list[int]:
    """Exponents ``z`` (descending) with ``sum(2**z) == a`` for dyadic ``a >= 0``."""
    a = rational(a)
    if a < 0:
        raise ValueError("weights must be nonnegative")
    den = int(a.denominator)
    if den & (den - 1):
        raise NonDyadicWeight(f"{format_rational(a)} has an infinite binary expansion")
    shift = den.bit_length() - 1
    num = int(a.numerator)
    return [i - shift for i in range(num.bit_length() - 1, -1, -1) if num >> i & 1]


def pow2(z: int) -> Rational:
    return mpq(2) ** z


# -- suprema over the naturals --------------------------------------------------


def sup_affine_capped(a, b, c) -> Rational:
    """``sup_{n >= 0} min(a*n + b, c)`` in closed form."""
    a, b, c = rational(a), rational(b), rational(c)
    if a > 0:
        return c
    return min(b, c)


@dataclass(frozen=True)
class Interval:
    lo: Rational
    hi: Rational

    def __post_init__(self):
        object.__setattr__(self, "lo", rational(self.lo))
        object.__setattr__(self, "hi", rational(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, q) -> "Interval":
        return cls(q, q)

    def __contains__(self, q) -> bool:
        return self.lo <= q <= self.hi

    def __str__(self) -> str:
        return f"[{format_rational(self.lo)},{format_rational(self.hi)}]"

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def add(self, other: "Interval") -> "Interval":
        return Interval(self.lo + other.lo, self.hi + other.hi)

    def scale(self, c) -> "Interval":
        c = rational(c)
        if c >= 0:
            return Interval(c * self.lo, c * self.hi)
        return Interval(c * self.hi, c * self.lo)

    def neg(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def join(self, other: "Interval") -> "Interval":
        """Image of pointwise max."""
        return Interval(max(self.lo, other.lo), max(self.hi, other.hi))

    def meet(self, other: "Interval") -> "Interval":
        """Image of pointwise min."""
        return Interval(min(self.lo, other.lo), min(self.hi, other.hi))

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def min_with(self, c) -> "Interval":
        return self.meet(Interval.point(c))

    def max_with(self, c) -> "Interval":
        return self.join(Interval.point(c))

    def magnitude(self) -> Rational:
        return max(abs(self.lo), abs(self.hi))

    def abs(self) -> "Interval":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return self.neg()
        return Interval(0, self.magnitude())

    def square(self) -> "Interval":
        a = self.abs()
        return Interval(a.lo * a.lo, a.hi * a.hi)

    def abs_pow(self, q) -> "Interval":
        a = self.abs()
        return Interval(power_lower(a.lo, q), power_upper(a.hi, q))


# -- piecewise-affine functions on [0, +inf) -----------------------------------


@dataclass(frozen=True)
class PiecewiseAffine:
    """A function on ``[0, +inf)``, affine between consecutive breakpoints.

    ``pieces[k]`` = (slope, intercept) on the k-th segment; segment 0 is
    ``[0, breakpoints[0]]`` and the last one is ``[breakpoints[-1], +inf)``.
    """

    breakpoints: tuple
    pieces: tuple
    continuous: bool = True

    def __post_init__(self):
        bps = tuple(rational(b) for b in self.breakpoints)
        pcs = tuple((rational(s), rational(c)) for s, c in self.pieces)
        if len(pcs) != len(bps) + 1:
            raise ValueError("need exactly one more piece than breakpoints")
        if any(b <= 0 for b in bps) or any(x >= y for x, y in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be positive and strictly increasing")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "pieces", pcs)

    @classmethod
    def _trusted(cls, breakpoints: tuple, pieces: tuple, continuous: bool = True):
        # internal results are valid by construction; skip coercion and checks
        out = object.__new__(cls)
        object.__setattr__(out, "breakpoints", breakpoints)
        object.__setattr__(out, "pieces", pieces)
        object.__setattr__(out, "continuous", continuous)
        return out

    @classmethod
    def constant(cls, c) -> "PiecewiseAffine":
        return cls((), ((0, c),))

    @classmethod
    def affine(cls, slope, intercept) -> "PiecewiseAffine":
        return cls((), ((slope, intercept),))

    def segment_index(self, t) -> int:
        for k, b in enumerate(self.breakpoints):
            if t < b:
                return k
        return len(self.breakpoints)

    def __call__(self, t) -> Rational:
        t = rational(t)
        if t < 0:
            raise ValueError("piecewise-affine functions live on [0, +inf)")
        s, c = self.pieces[self.segment_index(t)]
        return s * t + c

    def is_constant(self) -> bool:
        return len(self.pieces) == 1 and self.pieces[0][0] == 0

    def segments(self):
        """Yield (lo, hi, slope, intercept); hi is None for the last one."""
        bounds = (ZERO,) + self.breakpoints
        for k, (s, c) in enumerate(self.pieces):
            hi = self.breakpoints[k] if k < len(self.breakpoints) else None
            yield bounds[k], hi, s, c

    def _simplified(self) -> "PiecewiseAffine":
        bps, pcs = [], [self.pieces[0]]
        for b, piece in zip(self.breakpoints, self.pieces[1:]):
            if piece == pcs[-1]:
                continue
            bps.append(b)
            pcs.append(piece)
        return PiecewiseAffine._trusted(tuple(bps), tuple(pcs), self.continuous)

    def _refined(self, breakpoints: Iterable) -> list:
        """Pieces of self on the refinement given by sorted ``breakpoints``."""
        return [self.pieces[self.segment_index(t)] for t in _midpoints(breakpoints)]

    def _combine(self, other: "PiecewiseAffine", op) -> "PiecewiseAffine":
        bps = sorted(set(self.breakpoints) | set(other.breakpoints))
        pairs = zip(self._refined(bps), other._refined(bps))
        return PiecewiseAffine._trusted(tuple(bps), tuple(op(p, q) for p, q in pairs),
                                        self.continuous and other.continuous)._simplified()

    def __add__(self, other: "PiecewiseAffine") -> "PiecewiseAffine":
        return self._combine(other, lambda p, q: (p[0] + q[0], p[1] + q[1]))

    def scale(self, c) -> "PiecewiseAffine":
        c = rational(c)
        pieces = tuple((c * s, c * i) for s, i in self.pieces)
        return PiecewiseAffine._trusted(self.breakpoints, pieces, self.continuous)._simplified()

    def __neg__(self) -> "PiecewiseAffine":
        return self.scale(-1)

    def __mul__(self, other: "PiecewiseAffine") -> "PiecewiseAffine":
        """Product; defined only when one factor is constant."""
        if other.is_constant():
            return self.scale(other.pieces[0][1])
        if self.is_constant():
            return other.scale(self.pieces[0][1])
        raise ValueError("product of two non-constant piecewise-affine functions")

    def maximum(self, other: "PiecewiseAffine") -> "PiecewiseAffine":
        return self._extremum(other, True)

    def minimum(self, other: "PiecewiseAffine") -> "PiecewiseAffine":
        return self._extremum(other, False)

    def _extremum(self, other: "PiecewiseAffine", larger: bool) -> "PiecewiseAffine":
        if not self.breakpoints and not other.breakpoints:
            (a, b), (c, d) = self.pieces[0], other.pieces[0]
            if a == c:
                keep = self if (b >= d) == larger else other
                return PiecewiseAffine._trusted((), keep.pieces, True)
        bps = sorted(set(self.breakpoints) | set(other.breakpoints))
        # split every segment where the two affine pieces cross
        crossings = set()
        lows = [ZERO] + bps
        highs = bps + [None]
        for lo, hi, p, q in zip(lows, highs, self._refined(bps), other._refined(bps)):
            if p[0] != q[0]:
                t = (q[1] - p[1]) / (p[0] - q[0])
                if t > lo and (hi is None or t < hi):
                    crossings.add(t)
        bps = sorted(set(bps) | crossings)
        pieces = []
        for t, p, q in zip(_midpoints(bps), self._refined(bps), other._refined(bps)):
            pv, qv = p[0] * t + p[1], q[0] * t + q[1]
            pieces.append(p if (pv >= qv if larger else pv <= qv) else q)
        return PiecewiseAffine._trusted(tuple(bps), tuple(pieces),
                                        self.continuous and other.continuous)._simplified()

    def min_with(self, c) -> "PiecewiseAffine":
        return self.minimum(PiecewiseAffine.constant(c))


def _midpoints(breakpoints: Sequence) -> list:
    """One interior sample point per segment of the partition."""
    pts, prev = [], ZERO
    for b in breakpoints:
        pts.append((prev + b) / 2)
        prev = b
    pts.append(prev + 1)
    return pts


def pwa_sup_capped(f: PiecewiseAffine, cap) -> Rational:
    """``sup_{n >= 0 integer} min(f(n), cap)`` computed segment by segment.

    On each bounded segment an affine function restricted to the integers
    peaks at one of the two integers closest to the segment ends. On the
    unbounded last segment a positive slope means the cap is reached.
    """
    cap = rational(cap)
    best = None
    for lo, hi, slope, icpt in f.segments():
        if hi is None and slope > 0:
            return cap
        # integers of [lo, hi) run from ceil(lo) to ceil(hi) - 1
        candidates = {ceil(lo)}
        if hi is not None:
            candidates.update((ceil(hi) - 1, floor(hi)))
        for n in candidates:
            if n < lo:
                continue
            value = min(f(n), cap)
            if best is None or value > best:
                best = value
    if best is None:
        # every bounded segment is free of integers; impossible since 0 is in segment 0
        raise AssertionError("no integer candidate found")
    return best
