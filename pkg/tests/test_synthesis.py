import random
import warnings

import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from integrable_ops.certify import infer_bound
from integrable_ops.dsl import format_term, parse
from integrable_ops.evaluation import StabilityWarning, evaluate
from integrable_ops.synthesis import (
    AllOf, AnyOf, DominatorTooSmall, EmptyRegion, LadderNotIncreasing, NonpositiveThreshold,
    SimpleFunctionSpec, ThresholdSet, indicator_ge, indicator_gt, ladder_term, region_indicator,
    simple_term, verification_grid,
)
from integrable_ops.terms import Proj, Scale, Signature, Zero, check_signature, meet, signature_of
from strategies import rationals


def at(t, *coords):
    return evaluate(t, dict(enumerate(map(mpq, coords))))


def quiet(t, *coords):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", StabilityWarning)
        return at(t, *coords)


class TestIndicatorGt:
    @pytest.mark.parametrize("x, expected", [(3, 1), (1, 0), (mpq(1, 2), 0)])
    def test_unit_threshold(self, x, expected):
        assert at(indicator_gt(0, 1), x) == expected

    def test_strict(self):
        assert at(indicator_gt(0, 2), 2) == 0

    @pytest.mark.parametrize("lam", [-1, 0])
    def test_nonpositive(self, lam):
        with pytest.raises(NonpositiveThreshold):
            indicator_gt(0, lam)

    @given(rationals(100, positive=True), rationals(1000))
    def test_zero_one_valued(self, lam, x):
        assert at(indicator_gt(0, lam), x) == (1 if x > lam else 0)

    def test_certifies_with_zero_constant(self):
        t = indicator_gt(2, mpq(7, 3))
        assert signature_of(t) is Signature.TRUNCATED and infer_bound(t).k == 0

    @pytest.mark.parametrize("lam", [-2, 0, mpq(1, 2), 3])
    def test_unital_variant_any_threshold(self, lam):
        t = indicator_gt(0, lam, sig="u")
        check_signature(t, "u")
        for x in (lam - 1, lam, lam + mpq(1, 100), lam + 5):
            assert at(t, x) == (1 if x > lam else 0)


class TestIndicatorGe:
    @pytest.mark.parametrize("x, expected", [(2, 1), (5, 1)])
    def test_at_or_above(self, x, expected):
        assert quiet(indicator_ge(0, 2), x) == expected

    def test_below_is_settled_without_warning(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error", StabilityWarning)
            assert at(indicator_ge(0, 2), mpq(3, 2)) == 0
            assert at(indicator_ge(0, 2), -3) == 0

    def test_close_below(self):
        assert quiet(indicator_ge(0, 2), mpq(1999, 1000)) == 0

    def test_nonpositive(self):
        with pytest.raises(NonpositiveThreshold):
            indicator_ge(0, 0)

    @given(rationals(100, positive=True), rationals(1000), st.booleans())
    def test_exact_including_boundary(self, lam, x, on_boundary):
        if on_boundary:
            x = lam
        assert quiet(indicator_ge(0, lam), x) == (1 if x >= lam else 0)

    def test_round_trips_through_text(self):
        t = indicator_ge(1, mpq(5, 2))
        assert parse(format_term(t)) == t
        assert infer_bound(t).k == 0


class TestRegions:
    def test_intersection(self):
        region = AllOf((ThresholdSet(0, ">", 1), ThresholdSet(1, ">", 2)))
        t = region_indicator(region, meet(Proj(0), Proj(1)))
        assert at(t, 2, 3) == 1
        assert at(t, 2, 1) == 0

    def test_absorption(self):
        union = AnyOf((ThresholdSet(0, ">", 1), ThresholdSet(0, ">", 3)))
        single = ThresholdSet(0, ">", 1)
        g = Scale(2, Proj(0))
        a, b = region_indicator(union, g), region_indicator(single, g)
        for point in verification_grid([union]):
            assert evaluate(a, point) == evaluate(b, point)

    def test_closed_threshold(self):
        t = region_indicator(ThresholdSet(0, ">=", 2), Proj(0))
        assert [at(t, x) for x in (2, 3, mpq(3, 2), -1)] == [1, 1, 0, 0]

    def test_empty(self):
        with pytest.raises(EmptyRegion):
            AllOf(())

    def test_bad_relation(self):
        with pytest.raises(ValueError):
            ThresholdSet(0, "<", 1)

    def test_dominator_too_small(self):
        with pytest.raises(DominatorTooSmall):
            region_indicator(ThresholdSet(0, ">", 1), Scale(mpq(1, 10), Proj(0)))

    def test_grid_agreement_off_boundaries(self):
        region = AnyOf((AllOf((ThresholdSet(0, ">", 1), ThresholdSet(1, ">=", 3))),
                        ThresholdSet(1, ">", 10)))
        g = Scale(10, Proj(0)) + Proj(1)
        t = region_indicator(region, g)
        for point in verification_grid([region]):
            if region.contains(point):
                assert evaluate(t, point) == 1
            elif evaluate(g, point) >= 0:
                assert evaluate(t, point) == 0


class TestSimple:
    def test_single_entry(self):
        spec = SimpleFunctionSpec(((mpq(3, 2), ThresholdSet(0, ">", 1)),), Scale(2, Proj(0)))
        t = simple_term(spec)
        assert at(t, 2) == mpq(3, 2) and at(t, mpq(1, 2)) == 0

    def test_empty(self):
        assert simple_term(SimpleFunctionSpec((), Proj(0))) == Zero()

    def test_disjoint_regions_add(self):
        r1 = AllOf((ThresholdSet(0, ">", 1), ThresholdSet(1, ">", 5)))
        r2 = ThresholdSet(1, ">=", 6)
        spec = SimpleFunctionSpec(((1, r1), (2, r2)), Scale(3, Proj(0)) + Scale(3, Proj(1)))
        t = simple_term(spec)
        for point in spec.grid():
            value = evaluate(t, point)
            if evaluate(spec.dominator, point) >= 0:
                assert value == spec.value(point)
            assert value >= 0
            if value > 0:
                assert value <= evaluate(spec.dominator, point)
        assert infer_bound(t).k == 0

    def test_negative_coefficient(self):
        with pytest.raises(ValueError):
            SimpleFunctionSpec(((-1, ThresholdSet(0, ">", 1)),), Proj(0))

    def test_undominated(self):
        spec = SimpleFunctionSpec(((5, ThresholdSet(0, ">", 1)),), Proj(0))
        with pytest.raises(DominatorTooSmall):
            simple_term(spec)


class TestLadder:
    g = Scale(4, Proj(0))

    def steps(self):
        s1 = SimpleFunctionSpec(((1, ThresholdSet(0, ">", 1)),), self.g)
        s2 = SimpleFunctionSpec(((1, ThresholdSet(0, ">", 1)), (2, ThresholdSet(0, ">", 3))), self.g)
        return s1, s2

    def test_single_step(self):
        s1, _ = self.steps()
        t, simple = ladder_term([s1], self.g), simple_term(s1)
        for x in (0, 1, 2, 5, mpq(1, 3)):
            assert at(t, x) == min(at(simple, x), at(self.g, x))

    def test_two_steps(self):
        t = ladder_term(list(self.steps()), self.g)
        assert [at(t, x) for x in (0, 2, 6)] == [0, 1, 3]
        assert infer_bound(t).k == 0

    def test_not_increasing(self):
        s1, s2 = self.steps()
        with pytest.raises(LadderNotIncreasing):
            ladder_term([s2, s1], self.g)

    def test_empty(self):
        with pytest.raises(ValueError):
            ladder_term([], self.g)


def test_synthesized_terms_are_certified():
    rng = random.Random(8)
    for _ in range(30):
        lam = mpq(rng.randint(1, 50), rng.randint(1, 7))
        for t in (indicator_gt(rng.randint(0, 3), lam), indicator_ge(rng.randint(0, 3), lam)):
            cert = infer_bound(t)
            assert cert.k == 0
