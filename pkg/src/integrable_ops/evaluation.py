"""Exact pointwise semantics of terms.

A term ``t`` with variables ``x_j`` (j in J) denotes the function
``Q^J -> Q`` obtained by structural recursion. Truncation is ``min(f, 1)``
for every sign of ``f``; a ``TruncSup`` node is evaluated in closed form
(affine and finite families) or through its piecewise-affine dependence on the
index. Only when neither applies are the members probed one by one, under
the schema's stabilization hint.

Terms are compiled once into nested closures and cached on the node.
"""

from __future__ import annotations

import itertools
import random
import warnings
from dataclasses import dataclass
from typing import Callable, Mapping

from .exact import (
    ONE, ZERO, Interval, PiecewiseAffine, Rational, ceil, floor, format_rational, pwa_sup_capped,
    rational, sup_affine_capped,
)
from .terms import (
    DECREASING, AbsPow, Add, Affine, FamilyList, IndexExpr, Join, Monotone, One, Proj, Scale,
    Square, Term, TermError, Trunc, TruncSup, Zero, eval_iexpr, free_vars, iexpr_to_pwa,
)


class MissingVariable(TermError):
    pass


class SchemaNotMonotone(TermError):
    pass


class IrrationalValue(TermError):
    pass


class StabilityWarning(UserWarning):
    """A monotone schema did not visibly stabilize within its hint."""


_EMPTY: dict = {}


def evaluate(t: Term, point, env: Mapping | None = None) -> Rational:
    """Exact value of ``t`` at ``point``.

    ``point`` maps variable indices to rationals (a dict, or a sequence
    indexed by position). ``env`` binds free index symbols, if any.
    """
    fn = compiled(t)
    try:
        return fn(point, env or _EMPTY)
    except (KeyError, IndexError) as exc:
        missing = exc.args[0] if exc.args else "?"
        raise MissingVariable(f"no value for variable x{missing}") from None


def as_point(values) -> dict:
    if isinstance(values, Mapping):
        return {int(k): rational(v) for k, v in values.items()}
    return {i: rational(v) for i, v in enumerate(values)}


# -- compilation -----------------------------------------------------------------

_Fn = Callable[[object, Mapping], Rational]


def compiled(t: Term) -> _Fn:
    fn = t.__dict__.get("_compiled")
    if fn is None:
        fn = _compile(t)
        t.__dict__["_compiled"] = fn
    return fn


def _compile(t: Term) -> _Fn:
    if isinstance(t, Proj):
        i = t.index

        def proj(x, env):
            try:
                return x[i]
            except (KeyError, IndexError):
                raise KeyError(i) from None

        return proj
    if isinstance(t, Zero):
        return lambda x, env: ZERO
    if isinstance(t, One):
        return lambda x, env: ONE
    if isinstance(t, Add):
        a, b = compiled(t.left), compiled(t.right)
        return lambda x, env: a(x, env) + b(x, env)
    if isinstance(t, Join):
        a, b = compiled(t.left), compiled(t.right)

        def join(x, env):
            p, q = a(x, env), b(x, env)
            return p if p >= q else q

        return join
    if isinstance(t, Scale):
        f = compiled(t.arg)
        if isinstance(t.coef, IndexExpr):
            coef = t.coef
            return lambda x, env: eval_iexpr(coef, env) * f(x, env)
        c = t.coef
        if c == -1:
            return lambda x, env: -f(x, env)
        return lambda x, env: c * f(x, env)
    if isinstance(t, Trunc):
        f = compiled(t.arg)

        def trunc(x, env):
            v = f(x, env)
            return v if v <= ONE else ONE

        return trunc
    if isinstance(t, Square):
        f = compiled(t.arg)

        def square(x, env):
            v = f(x, env)
            return v * v

        return square
    if isinstance(t, AbsPow):
        f = compiled(t.arg)
        q = t.exponent
        return lambda x, env: _abs_pow(f(x, env), q)
    if isinstance(t, TruncSup):
        return _compile_truncsup(t)
    raise TypeError(f"cannot evaluate {type(t).__name__}")


def _abs_pow(v: Rational, q: Rational) -> Rational:
    from .exact import power_bounds

    lo, hi = power_bounds(abs(v), q)
    if lo != hi:
        raise IrrationalValue(f"|{format_rational(v)}|^{format_rational(q)} is not rational")
    return lo


def _compile_truncsup(t: TruncSup) -> _Fn:
    cap = compiled(t.cap)
    s = t.schema
    if isinstance(s, Affine):
        u, v = compiled(s.u), compiled(s.v)

        def affine(x, env):
            c = cap(x, env)
            if u(x, env) > 0:
                return c
            b = v(x, env)
            return b if b <= c else c

        return affine
    if isinstance(s, FamilyList):
        members = [compiled(m) for m in s.members]

        def family(x, env):
            c = cap(x, env)
            return max(min(m(x, env), c) for m in members)

        return family
    return lambda x, env: eval_schema_sup(s, cap(x, env), x, t.index, env)


# -- schema suprema --------------------------------------------------------------


def eval_schema_sup(schema, cap_value, point, index: str = "n", env: Mapping | None = None):
    """Value of the truncated supremum of ``schema`` under ``cap_value`` at ``point``.

    Affine: ``sup_affine_capped(u(x), v(x), cap)``. Increasing monotone:
    ``sup_n min(f_n(x), cap)``. Decreasing monotone: the dual countable meet
    ``inf_n max(f_n(x), cap)``.
    """
    env = dict(env or _EMPTY)
    cap_value = rational(cap_value)
    if isinstance(schema, Affine):
        a = evaluate(schema.u, point, env)
        b = evaluate(schema.v, point, env)
        return sup_affine_capped(a, b, cap_value)
    if isinstance(schema, FamilyList):
        return max(min(evaluate(m, point, env), cap_value) for m in schema.members)
    if not isinstance(schema, Monotone):
        raise TypeError(f"unsupported schema {type(schema).__name__}")
    env.pop(index, None)
    lifted = lift_index(schema.body, index, point, env)
    if lifted is not None:
        return _monotone_closed_form(schema, lifted, cap_value)
    return _monotone_probe(schema, cap_value, point, index, env)


def _monotone_closed_form(schema: Monotone, f: PiecewiseAffine, cap) -> Rational:
    increasing = schema.direction != DECREASING
    # between consecutive probe integers f is affine, so checking the probes
    # checks monotonicity for every n, not just a window
    probes = {0}
    for b in f.breakpoints:
        probes.update((floor(b), ceil(b)))
    probes.add(max(probes) + 1)
    previous = None
    for n in sorted(probes):
        value = min(f(n), cap) if increasing else max(f(n), cap)
        _check_step(previous, value, increasing, n)
        previous = value
    tail_slope = f.pieces[-1][0]
    if (increasing and tail_slope < 0) or (not increasing and tail_slope > 0):
        raise SchemaNotMonotone("declared monotone schema eventually moves the other way")
    if increasing:
        return pwa_sup_capped(f, cap)
    return -pwa_sup_capped(-f, -cap)


def _monotone_probe(schema: Monotone, cap, point, index: str, env: dict) -> Rational:
    increasing = schema.direction != DECREASING
    previous = None
    for n in range(schema.hint + 1):
        env[index] = n
        f = evaluate(schema.body, point, env)
        value = min(f, cap) if increasing else max(f, cap)
        _check_step(previous, value, increasing, n)
        if value == cap:
            # the cap bounds every member, so reaching it settles the limit
            return cap
        previous = value
    warnings.warn(
        f"monotone schema not stabilized within {schema.hint} steps; "
        f"returning the value at the hint ({format_rational(previous)})",
        StabilityWarning,
        stacklevel=3,
    )
    return previous


def _check_step(previous, value, increasing: bool, n: int) -> None:
    if previous is None:
        return
    if (increasing and value < previous) or (not increasing and value > previous):
        raise SchemaNotMonotone(
            f"declared {'increasing' if increasing else 'decreasing'} schema moves the other "
            f"way at n={n}: {format_rational(previous)} -> {format_rational(value)}"
        )


def lift_index(t: Term, index: str, point, env: Mapping) -> PiecewiseAffine | None:
    """``s -> value of t with index := s`` as a piecewise-affine function of s >= 0.

    Returns None when the dependence on the index is not piecewise affine
    (for example a coefficient ``1/(1 - 2^-n)``).
    """
    if index not in t.indices:
        return PiecewiseAffine.constant(evaluate(t, point, env))
    if isinstance(t, Add):
        a = lift_index(t.left, index, point, env)
        b = a and lift_index(t.right, index, point, env)
        return None if b is None else a + b
    if isinstance(t, Join):
        a = lift_index(t.left, index, point, env)
        b = a and lift_index(t.right, index, point, env)
        return None if b is None else a.maximum(b)
    if isinstance(t, Trunc):
        a = lift_index(t.arg, index, point, env)
        return None if a is None else a.min_with(ONE)
    if isinstance(t, Scale):
        if isinstance(t.coef, IndexExpr):
            c = iexpr_to_pwa(t.coef, index, env)
        else:
            c = PiecewiseAffine.constant(t.coef)
        a = c and lift_index(t.arg, index, point, env)
        if a is None or not (a.is_constant() or c.is_constant()):
            return None
        return c * a
    if isinstance(t, TruncSup):
        if isinstance(t.schema, Monotone) or t.index == index:
            return None
        cap = lift_index(t.cap, index, point, env)
        if cap is None:
            return None
        if isinstance(t.schema, FamilyList):
            out = None
            for m in t.schema.members:
                f = lift_index(m, index, point, env)
                if f is None:
                    return None
                f = f.minimum(cap)
                out = f if out is None else out.maximum(f)
            return out
        if index in t.schema.u.indices:
            return None
        if evaluate(t.schema.u, point, env) > 0:
            return cap
        v = lift_index(t.schema.v, index, point, env)
        return None if v is None else v.minimum(cap)
    return None


# -- grids and random comparison ---------------------------------------------------


def grid_axis(interval: Interval, steps: int) -> list:
    if steps < 1:
        raise ValueError("steps must be a positive integer")
    if steps == 1:
        return [interval.lo]
    width = interval.hi - interval.lo
    return [interval.lo + width * k / (steps - 1) for k in range(steps)]


def eval_on_grid(t: Term, box: Mapping, steps: int) -> list:
    """Values of ``t`` on the uniform rational grid over ``box`` (endpoints included)."""
    fv = free_vars(t)
    missing = [i for i in fv if i not in box]
    if missing:
        raise MissingVariable(f"box does not cover x{missing[0]}")
    axes = [grid_axis(box[i], steps) for i in fv]
    out = []
    for coords in itertools.product(*axes):
        point = dict(zip(fv, coords))
        out.append((point, evaluate(t, point)))
    return out


@dataclass(frozen=True)
class FreeEqResult:
    agree: bool
    samples: int
    point: dict | None = None
    values: tuple | None = None


class SignatureMismatch(TermError):
    pass


def free_eq(t1: Term, t2: Term, samples: int = 10_000, seed: int = 0,
            sig=None) -> FreeEqResult:
    """Randomized test of ``t1 == t2`` as functions (equality in the free algebra).

    Agreement on every sample is evidence, not proof; a difference is a
    certificate of inequality. With ``sig`` given, both terms must belong to
    that signature.
    """
    from .sampling import random_point
    from .terms import SignatureViolation, check_signature

    if sig is not None:
        for t in (t1, t2):
            try:
                check_signature(t, sig)
            except SignatureViolation as exc:
                raise SignatureMismatch(str(exc)) from None
    variables = sorted(set(free_vars(t1)) | set(free_vars(t2)))
    rng = random.Random(seed)
    for k in range(samples):
        point = random_point(rng, variables)
        a, b = evaluate(t1, point), evaluate(t2, point)
        if a != b:
            return FreeEqResult(False, k + 1, point, (a, b))
    return FreeEqResult(True, samples)
