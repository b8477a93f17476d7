import random

import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from integrable_ops.certify import infer_bound
from integrable_ops.dsl import parse
from integrable_ops.exact import NonDyadicWeight
from integrable_ops.sampling import random_term
from integrable_ops.terms import Proj, arity as term_arity
from integrable_ops.witness import (
    DIVERGES, INCONCLUSIVE, INVALID, Mode, NotFound, SearchConfig, WeightTooLarge, WitnessConfig,
    WitnessFormatError, build_witness, conditional_model_total, conditionally_partitionable_atoms,
    find_violation, format_witness, growth_factor, parse_witness, partitionable_atoms, threshold,
    verify_witness,
)

SQ = parse("sq(x0)")


class TestFindViolation:
    def test_square_at_three(self):
        wp = find_violation(SQ, 3, WitnessConfig(search=SearchConfig(base=3)))
        assert wp.point == (9,) and wp.value == 81

    def test_projection_has_none(self):
        for n in range(1, 6):
            assert find_violation(Proj(0), n, WitnessConfig(search=SearchConfig(budget=500))) is None

    def test_square_at_zero(self):
        wp = find_violation(SQ, 0, WitnessConfig())
        assert wp.point == (1,) and wp.value == 1

    def test_finite_mode_needs_more(self):
        cfg = WitnessConfig(mode=Mode.FINITE)
        wp = find_violation(SQ, 0, cfg)
        # |tau| > (1/b_0)^(1/p) = 2
        assert abs(wp.value) > 2

    def test_callable_needs_arity(self):
        with pytest.raises(ValueError):
            find_violation(lambda v: v[0], 0, WitnessConfig())
        assert find_violation(lambda v: v[0] ** 3, 2, WitnessConfig(), arity=1) is not None

    @given(st.integers(0, 30), st.sampled_from([mpq(1), mpq(2), mpq(3, 2), mpq(5, 3)]))
    def test_returned_points_violate(self, n, p):
        cfg = WitnessConfig(p=p, search=SearchConfig(budget=400))
        wp = find_violation(SQ, n, cfg)
        if wp is not None:
            assert abs(wp.value) > threshold(n, wp.point, cfg)

    @given(st.integers(0, 40), st.integers(1, 4), st.integers(1, 3))
    def test_growth_factor_is_upper_bound(self, n, a, b):
        p = mpq(a + b, b)
        r = growth_factor(n, p)
        # r >= 2^(n/p)  <=>  r^(p_num) >= 2^(n p_den)
        assert r ** p.numerator >= mpq(2) ** (n * p.denominator)


class TestBuild:
    def test_square_two_atoms(self):
        b = build_witness(SQ, WitnessConfig(atoms=2, search=SearchConfig(base=3)))
        assert [w for _, w in b.space.atoms] == [1, mpq(1, 9)]
        assert b.tables == {0: (1, 3)}

    def test_constant_one(self):
        b = build_witness(parse("one"), WitnessConfig(atoms=1))
        assert [w for _, w in b.space.atoms] == [1]
        assert b.violation.points[0].value == 1

    def test_constant_one_measure_grows(self):
        b = build_witness(parse("one"), WitnessConfig(atoms=25))
        assert b.space.total() == 25

    def test_empty(self):
        b = build_witness(SQ, WitnessConfig(atoms=0))
        assert b.space.atoms == () and b.violation.points == ()

    def test_not_found_names_the_index(self):
        with pytest.raises(NotFound) as info:
            build_witness(Proj(0), WitnessConfig(atoms=3, search=SearchConfig(budget=200)))
        assert info.value.n == 1


class TestVerify:
    def test_square_hundred_atoms(self):
        cfg = WitnessConfig(atoms=100)
        b = build_witness(SQ, cfg)
        report = verify_witness(b.space, b.tables, SQ, cfg, threshold_value=50)
        assert report.image_sum == 100
        assert report.verdict == DIVERGES and report.exact
        assert report.source_sums[0] <= report.prefix_constants[0] + 2
        assert report.source_sums[0] <= report.tail_bounds[0]

    def test_empty_is_inconclusive(self):
        cfg = WitnessConfig(atoms=0)
        b = build_witness(SQ, cfg)
        report = verify_witness(b.space, b.tables, SQ, cfg)
        assert report.image_sum == 0 and report.verdict == INCONCLUSIVE
        assert all(v == 0 for v in report.source_sums.values())

    def test_threshold_not_reached(self):
        cfg = WitnessConfig(atoms=5)
        b = build_witness(SQ, cfg)
        assert verify_witness(b.space, b.tables, SQ, cfg, threshold_value=6).verdict == INCONCLUSIVE

    def test_tampered_tables_are_invalid(self):
        cfg = WitnessConfig(atoms=5)
        b = build_witness(SQ, cfg)
        # a huge source value on the last atom breaks the source bound
        tables = {0: b.tables[0][:-1] + (b.tables[0][-1] * 10**6,)}
        assert verify_witness(b.space, tables, SQ, cfg).verdict == INVALID

    def test_finite_mode(self):
        cfg = WitnessConfig(atoms=12, mode=Mode.FINITE)
        b = build_witness(SQ, cfg)
        assert all(w < cfg.b(n) for n, (_, w) in enumerate(b.space.atoms))
        report = verify_witness(b.space, b.tables, SQ, cfg)
        assert report.verdict == DIVERGES and report.total_measure < 1

    def test_fractional_p_uses_enclosures(self):
        cfg = WitnessConfig(p=mpq(3, 2), atoms=20)
        b = build_witness(SQ, cfg)
        report = verify_witness(b.space, b.tables, SQ, cfg)
        assert not report.exact
        assert report.verdict == DIVERGES
        assert report.image_sum >= 10

    def test_text_round_trip(self):
        cfg = WitnessConfig(p=2, atoms=6, mode=Mode.FINITE)
        b = build_witness(SQ, cfg)
        text = format_witness(b, cfg)
        assert text.splitlines()[0] == "p=2 mode=F N=6"
        cfg2, space, tables = parse_witness(text)
        assert (cfg2.p, cfg2.mode, cfg2.atoms) == (2, Mode.FINITE, 6)
        assert space == b.space and tables == b.tables
        assert verify_witness(space, tables, SQ, cfg2).verdict == DIVERGES

    @pytest.mark.parametrize("text", ["", "p=1 mode=A N=1\natom 0 weight x", "p=1 mode=Q N=0",
                                      "p=1 mode=A N=1\nval 0 0 1"])
    def test_bad_witness_files(self, text):
        with pytest.raises(WitnessFormatError):
            parse_witness(text)


class TestPartitions:
    def test_three_quarters(self):
        [atoms] = partitionable_atoms([mpq(3, 4)])
        assert atoms == [((0, -1), mpq(1, 2)), ((0, -2), mpq(1, 4))]

    def test_one(self):
        assert partitionable_atoms([1]) == [[((0, 0), 1)]]

    def test_non_dyadic(self):
        with pytest.raises(NonDyadicWeight):
            partitionable_atoms([mpq(1, 3)])

    @given(st.lists(st.tuples(st.integers(0, 10**6), st.integers(0, 25)), max_size=12))
    def test_sums_and_unique_labels(self, raw):
        weights = [mpq(a, 2**k) for a, k in raw]
        sets = partitionable_atoms(weights)
        labels = [label for s in sets for label, _ in s]
        assert len(labels) == len(set(labels))
        for a, s in zip(weights, sets):
            assert sum((w for _, w in s), mpq(0)) == a

    def test_conditional_three_halves(self):
        [atoms] = conditionally_partitionable_atoms([mpq(3, 2)])
        assert sorted(w for _, w in atoms) == [mpq(1, 2), 1]
        assert {label for label, _ in atoms} == {(0, 0), (0, 1)}

    def test_conditional_too_large(self):
        with pytest.raises(WeightTooLarge):
            conditionally_partitionable_atoms([mpq(1, 2), mpq(3, 2)])

    def test_conditional_labels_respect_rows(self):
        weights = [mpq(3, 2), mpq(3, 4), mpq(5, 16), mpq(1, 8)]
        for n, atoms in enumerate(conditionally_partitionable_atoms(weights)):
            assert all(label[0] == n and label[1] >= n for label, _ in atoms)

    def test_normalized(self):
        [atoms] = conditionally_partitionable_atoms([mpq(3, 2)], normalized=True)
        assert sum(w for _, w in atoms) == mpq(3, 8)

    def test_model_total(self):
        assert conditional_model_total(20) == 4 - 2 * mpq(1, 2**19)
        assert conditional_model_total(20, normalized=True) == 1 - mpq(1, 2**20)


def _consistency_cases():
    rng = random.Random(3)
    for _ in range(6):
        t = random_term(rng, depth=4, nvars=3)
        yield t


@pytest.mark.parametrize("t", list(_consistency_cases()), ids=lambda t: f"size{len(str(t))}")
def test_certified_terms_resist_search(t):
    # the n-th inequality can only be refuted by a certified term while some
    # coordinate j >= n is free or 2^(n/p) is below the certificate's slopes
    cert = infer_bound(t)
    m = term_arity(t)
    top = max(cert.lam.values(), default=mpq(1))
    cfg = WitnessConfig(search=SearchConfig(budget=10_000))
    for n in range(m, 21):
        if growth_factor(n, 1) >= top:
            assert find_violation(t, n, cfg) is None
