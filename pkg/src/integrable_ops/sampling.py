"""Seeded generators for rationals, points and random terms."""

from __future__ import annotations

import random
from typing import Sequence

from gmpy2 import mpq

from .terms import (
    Add, Affine, FamilyList, IVar, Join, Monotone, One, Proj, Scale, Signature, Term, Trunc,
    TruncSup, Zero,
)

# lattice identities fail at kinks, so the kinks are sampled on purpose
BOUNDARY_VALUES = tuple(mpq(v) for v in (0, 1, -1, 2, -2)) + (mpq(1, 2), mpq(-1, 2))


def random_rational(rng: random.Random, bound: int = 1000, boundary_rate: float = 0.1,
                    boundary: Sequence = BOUNDARY_VALUES):
    if boundary_rate and rng.random() < boundary_rate:
        return rng.choice(boundary)
    return mpq(rng.randint(-bound, bound), rng.randint(1, bound))


def random_point(rng: random.Random, variables: Sequence[int], bound: int = 1000,
                 boundary_rate: float = 0.1) -> dict:
    return {i: random_rational(rng, bound, boundary_rate) for i in variables}


def random_large_point(rng: random.Random, variables: Sequence[int], magnitude: int = 10**6) -> dict:
    """Coordinates spread over [-magnitude, magnitude], small ones included."""
    point = {}
    for i in variables:
        scale = rng.choice((1, 10, 1000, magnitude))
        point[i] = mpq(rng.randint(-scale * 1000, scale * 1000), rng.randint(1, 1000))
        if abs(point[i]) > magnitude:
            point[i] = mpq(magnitude if point[i] > 0 else -magnitude)
    return point


def random_coefficient(rng: random.Random):
    return mpq(rng.randint(-12, 12), rng.randint(1, 6))


def random_term(rng: random.Random, depth: int = 6, nvars: int = 4,
                sig: Signature = Signature.TRUNCATED, schemas: bool = True) -> Term:
    """A random term of height at most ``depth`` over ``x0 .. x{nvars-1}``.

    Truncated-supremum nodes use affine, finite-list and increasing monotone
    schemas; monotone bodies have the shape ``n*(a v 0) + b`` so the
    declaration is honest.
    """
    sig = Signature.parse(sig)

    def leaf() -> Term:
        r = rng.random()
        if sig is Signature.UNITAL and r < 0.15:
            return One()
        if r < 0.25:
            return Zero()
        return Proj(rng.randrange(nvars))

    def build(d: int) -> Term:
        if d <= 1 or rng.random() < 0.2:
            return leaf()
        kinds = ["add", "scale", "join", "join"]
        if sig is Signature.TRUNCATED:
            kinds.append("trunc")
        if schemas:
            kinds += ["affine", "list"]
            if d >= 4:
                kinds.append("mono")
        kind = rng.choice(kinds)
        if kind == "add":
            return Add(build(d - 1), build(d - 1))
        if kind == "scale":
            return Scale(random_coefficient(rng), build(d - 1))
        if kind == "join":
            return Join(build(d - 1), build(d - 1))
        if kind == "trunc":
            return Trunc(build(d - 1))
        cap = build(d - 1)
        if kind == "affine":
            return TruncSup(cap, Affine(build(d - 1), build(d - 1)))
        if kind == "list":
            return TruncSup(cap, FamilyList(tuple(build(d - 1) for _ in range(rng.randint(1, 3)))))
        body = Add(Scale(IVar("n"), Join(build(d - 4), Zero())), build(d - 2))
        return TruncSup(cap, Monotone(body, "inc", 64))

    return build(depth)
