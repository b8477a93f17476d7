import random

import pytest
from gmpy2 import mpq

from integrable_ops.models import (
    IDENTITY_IDS, MUTATIONS, AffineFamily, DimensionMismatch, FinitePowerAlgebra,
    ListFamily, RealModel, SigmaIdealQuotient, check_catalog, check_homomorphism, check_identity,
    get_identity, parse_model, truncsup_model,
)
from integrable_ops.terms import Affine, One, Proj, TruncSup, Trunc, pos

MODELS = ["r", "power:3", "power:5", "quotient:3:2", "quotient:5:1,3"]


def test_catalog_ids():
    assert IDENTITY_IDS == ("TS1", "TS2", "TS3", "T1", "T2", "T3", "T4P", "T5P", "W1", "W2",
                            "DISTRIB", "SUMDISTRIB", "TRUNCSUB", "TRUNCMONO", "MEETUNIT",
                            "DOUBLESUP")
    assert set(MUTATIONS) == set(IDENTITY_IDS)


def test_unknown_identity():
    with pytest.raises(KeyError):
        get_identity("NOPE")


@pytest.mark.parametrize("ident", ["TS1", "TRUNCSUB"])
def test_real_model_examples(ident):
    res = check_identity(RealModel, ident, 10_000)
    assert res.holds and res.line() == f"{ident} holds samples=10000"


def test_t4p_form():
    f = Proj(0)
    assert get_identity("T4P").sides == (pos(f), TruncSup(pos(f), Affine(Trunc(pos(f)))))


@pytest.mark.parametrize("spec", MODELS)
def test_catalog_holds(spec):
    model = parse_model(spec)
    for res in check_catalog(model, samples=400, seed=1):
        assert res.holds, res.line()


@pytest.mark.parametrize("ident", sorted(MUTATIONS))
def test_mutations_are_refuted(ident):
    res = check_identity(RealModel, MUTATIONS[ident], 10_000)
    assert not res.holds
    assert res.line().startswith(f"{ident}~ FAILS at=")


def test_same_seed_same_counterexample():
    a = check_identity(RealModel, MUTATIONS["TS3"], 10_000, seed=4)
    b = check_identity(RealModel, MUTATIONS["TS3"], 10_000, seed=4)
    assert a == b


class TestModels:
    @pytest.mark.parametrize("spec, name, width", [
        ("r", "r", 1), ("power:4", "power:4", 4), ("quotient:5:1,3", "quotient:5:1,3", 3),
    ])
    def test_parse(self, spec, name, width):
        m = parse_model(spec)
        assert (m.name, m.width) == (name, width)

    @pytest.mark.parametrize("spec", ["", "power", "power:0", "quotient:3:5", "quotient:2:0,1",
                                      "lattice:3"])
    def test_bad_spec(self, spec):
        with pytest.raises(ValueError):
            parse_model(spec)

    def test_unit_is_all_ones(self):
        m = FinitePowerAlgebra(3)
        assert m.unit() == (1, 1, 1)
        assert m.evaluate(One(), {}) == (1, 1, 1)

    def test_element_dimension(self):
        with pytest.raises(DimensionMismatch):
            FinitePowerAlgebra(2).element((1, 2, 3))


class TestTruncSupModel:
    def test_affine(self):
        m = FinitePowerAlgebra(2)
        assert truncsup_model(m, (5, 5), AffineFamily((1, 0), (0, 2))) == (5, 2)

    def test_constant_family(self):
        m = FinitePowerAlgebra(3)
        c = (mpq(1, 2), -4, 7)
        assert truncsup_model(m, c, ListFamily((c,))) == m.element(c)

    def test_quotient_ignores_null_values(self):
        q = SigmaIdealQuotient(3, frozenset({2}))
        p = FinitePowerAlgebra(3)
        a = truncsup_model(p, (5, 5, 1), AffineFamily((1, 0, 9), (0, 2, -9)))
        b = truncsup_model(p, (5, 5, -8), AffineFamily((1, 0, 0), (0, 2, 3)))
        assert q.quotient_map(a) == q.quotient_map(b)


class TestQuotient:
    q = SigmaIdealQuotient(3, frozenset({2}))

    def test_same_class(self):
        assert self.q.quotient_map((1, 2, 7)) == self.q.quotient_map((1, 2, 9))

    def test_section(self):
        rep = self.q.section(self.q.quotient_map((1, 2, 7)))
        assert rep[:2] == (1, 2)
        assert self.q.quotient_map(rep) == self.q.quotient_map((1, 2, 7))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            self.q.quotient_map((1, 2))

    @pytest.mark.parametrize("dim, null", [(3, {2}), (5, {1, 3}), (4, set())])
    def test_homomorphism(self, dim, null):
        assert check_homomorphism(SigmaIdealQuotient(dim, frozenset(null)), 1000) is None

    def test_map_commutes_with_join(self):
        rng = random.Random(0)
        p = FinitePowerAlgebra(3)
        for _ in range(100):
            f, g = p.random_element(rng), p.random_element(rng)
            joined = tuple(max(a, b) for a, b in zip(f, g))
            assert self.q.quotient_map(joined) == tuple(
                max(a, b) for a, b in zip(self.q.quotient_map(f), self.q.quotient_map(g)))
