import random
import warnings

import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from integrable_ops.dsl import parse
from integrable_ops.evaluation import (
    MissingVariable, SchemaNotMonotone, StabilityWarning, eval_on_grid, eval_schema_sup,
    evaluate, free_eq,
)
from integrable_ops.exact import Interval
from integrable_ops.sampling import random_point, random_term
from integrable_ops.synthesis import q_coefficient
from integrable_ops.terms import (
    Affine, IVar, Monotone, One, Proj, Scale, Trunc, Zero, absolute, meet, negpart, pos,
)
from strategies import rationals

IND = parse("tsup[n] cap=trunc(x0) : n*(x0 - trunc(x0))")


def test_trunc_at_two():
    assert evaluate(Trunc(Proj(0)), {0: mpq(2)}) == 1


def test_trunc_keeps_negative_values():
    assert evaluate(Trunc(Proj(0)), {0: mpq(-7, 2)}) == mpq(-7, 2)


@pytest.mark.parametrize("x, expected", [(3, 1), (1, 0), (mpq(1, 2), 0)])
def test_indicator_above_one(x, expected):
    assert evaluate(IND, {0: mpq(x)}) == expected


def test_zero_is_zero_anywhere():
    assert evaluate(Zero(), {}) == 0
    assert evaluate(Zero(), {5: mpq(9)}) == 0


def test_missing_variable():
    with pytest.raises(MissingVariable):
        evaluate(Proj(2), {0: mpq(1)})


class TestSchemaSup:
    def test_affine_reaches_cap(self):
        assert eval_schema_sup(Affine(One(), Zero()), 5, {}) == 5

    def _ind_ge_family(self):
        # decreasing family 1_{x > q_n}, q_n -> 2
        from integrable_ops.synthesis import indicator_gt_term
        return Monotone(indicator_gt_term(Proj(0), q_coefficient(mpq(2)), "m"), "dec", 64)

    def test_decreasing_at_threshold(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", StabilityWarning)
            assert eval_schema_sup(self._ind_ge_family(), 0, {0: mpq(2)}) == 1

    def test_decreasing_below_threshold(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error", StabilityWarning)
            assert eval_schema_sup(self._ind_ge_family(), 0, {0: mpq(3, 2)}) == 0

    def test_monotone_increasing_closed_form(self):
        body = Scale(IVar("n"), Proj(0))
        assert eval_schema_sup(Monotone(body), 7, {0: mpq(1, 3)}) == 7
        assert eval_schema_sup(Monotone(body), 7, {0: mpq(0)}) == 0

    @pytest.mark.parametrize("direction, x", [("inc", -1), ("dec", 1)])
    def test_dishonest_declaration(self, direction, x):
        body = Scale(IVar("n"), Proj(0))
        with pytest.raises(SchemaNotMonotone):
            eval_schema_sup(Monotone(body, direction), 100, {0: mpq(x)})

    @given(rationals(50), rationals(50), rationals(200))
    def test_affine_matches_enumeration(self, a, b, cap):
        point = {0: a, 1: b}
        closed = eval_schema_sup(Affine(Proj(0), Proj(1)), cap, point)
        brute = max(min(n * a + b, cap) for n in range(2000))
        assert closed >= brute
        if a <= 0 or 1999 * a + b >= cap:
            assert closed == brute


class TestGrid:
    def test_projection(self):
        rows = eval_on_grid(Proj(0), {0: Interval(0, 1)}, 3)
        assert [v for _, v in rows] == [0, mpq(1, 2), 1]

    def test_indicator_grid(self):
        rows = eval_on_grid(IND, {0: Interval(0, 2)}, 5)
        assert [p[0] for p, _ in rows] == [0, mpq(1, 2), 1, mpq(3, 2), 2]
        assert [v for _, v in rows] == [0, 0, 0, 1, 1]

    def test_closed_term(self):
        rows = eval_on_grid(One(), {}, 4)
        assert rows == [({}, 1)]

    def test_box_must_cover(self):
        with pytest.raises(MissingVariable):
            eval_on_grid(Proj(1), {0: Interval(0, 1)}, 2)

    def test_bad_steps(self):
        with pytest.raises(ValueError):
            eval_on_grid(Proj(0), {0: Interval(0, 1)}, 0)


def _sample_pairs(n, seed):
    rng = random.Random(seed)
    for _ in range(n):
        sig = rng.choice(["t", "u"])
        f = random_term(rng, depth=4, nvars=3, sig=sig)
        g = random_term(rng, depth=4, nvars=3, sig=sig)
        yield f, g, random_point(rng, range(3))


def test_lattice_group_laws():
    for f, g, x in _sample_pairs(10_000 // 20, seed=7):
        ef, eg = evaluate(f, x), evaluate(g, x)
        assert evaluate(f | g, x) + evaluate(meet(f, g), x) == ef + eg
        assert evaluate(absolute(f), x) >= 0
        assert evaluate(pos(f), x) - evaluate(negpart(f), x) == ef


@given(st.integers(0, 10**9))
def test_truncation_laws(seed):
    rng = random.Random(seed)
    f = random_term(rng, depth=4, nvars=2)
    g = random_term(rng, depth=4, nvars=2)
    x = random_point(rng, range(2))
    ef, eg = evaluate(f, x), evaluate(g, x)
    tf = evaluate(Trunc(f), x)
    assert tf == min(ef, 1)
    if ef >= 0:
        assert tf <= ef
    # f ^ trunc(g) <= trunc(f) for g >= 0 at the point
    if eg >= 0:
        assert min(ef, evaluate(Trunc(g), x)) <= tf


def test_deterministic():
    rng = random.Random(11)
    terms = [random_term(rng, depth=6) for _ in range(50)]
    points = [random_point(rng, range(4)) for _ in range(5)]
    first = [[evaluate(t, x) for x in points] for t in terms]
    again = [[evaluate(t, x) for x in points] for t in terms]
    assert first == again


class TestFreeEq:
    def test_equal_terms(self):
        assert free_eq(parse("x0 v x1"), parse("x1 v x0"), samples=500).agree

    def test_different_terms(self):
        res = free_eq(parse("trunc(x0)"), parse("x0"), samples=500)
        assert not res.agree and res.values[0] != res.values[1]
