import itertools
import json
from fractions import Fraction

import pytest

from disco_rmt.limit_moments import (
    BudgetExceeded,
    LabeledPairing,
    PairPartition,
    catalan,
    constrained_moment,
    crosses,
    double_factorial,
    enumerate_pair_partitions,
    gaussian_moment,
    height,
    height_moment,
    is_non_crossing,
    limit_moment_disco,
    moment_bounds,
    moment_table,
)

from oracles import free_sum_moment


def brute_force_moment(g_weight, s_weight, two_k):
    """Literal sum over every labelled pairing, using LabeledPairing.is_valid."""
    total = Fraction(0)
    for p in enumerate_pair_partitions(two_k):
        for labels in itertools.product("GS", repeat=p.k):
            lp = LabeledPairing(p, labels)
            if lp.is_valid():
                total += lp.weight(g_weight, s_weight)
    return total


class TestPairPartitions:
    def test_two_points(self):
        assert [p.chords for p in enumerate_pair_partitions(2)] == [((1, 2),)]

    def test_four_points(self):
        got = [p.chords for p in enumerate_pair_partitions(4)]
        assert got == [((1, 2), (3, 4)), ((1, 3), (2, 4)), ((1, 4), (2, 3))]

    @pytest.mark.parametrize("two_k", [2, 4, 6, 8, 10, 12])
    def test_counts_and_uniqueness(self, two_k):
        parts = [p.chords for p in enumerate_pair_partitions(two_k)]
        assert len(parts) == double_factorial(two_k - 1)
        assert len(set(parts)) == len(parts)
        assert sum(is_non_crossing(PairPartition(c)) for c in parts) == catalan(two_k // 2)

    def test_from_word(self):
        assert PairPartition.from_word("abab").chords == ((1, 3), (2, 4))
        assert PairPartition.from_word("abba").chords == ((1, 4), (2, 3))
        with pytest.raises(ValueError):
            PairPartition.from_word("aab")

    def test_rejects_bad_chords(self):
        with pytest.raises(ValueError):
            PairPartition(((1, 2), (2, 3)))
        with pytest.raises(ValueError):
            PairPartition(((3, 4), (1, 2)))

    def test_crosses(self):
        assert crosses((1, 3), (2, 4))
        assert crosses((2, 4), (1, 3))
        assert not crosses((1, 4), (2, 3))
        assert not crosses((1, 2), (3, 4))

    def test_odd_or_nonpositive_rejected(self):
        with pytest.raises(ValueError):
            list(enumerate_pair_partitions(3))
        with pytest.raises(ValueError):
            list(enumerate_pair_partitions(0))

    def test_enumeration_budget(self):
        with pytest.raises(BudgetExceeded):
            list(enumerate_pair_partitions(18))


class TestClosedForms:
    def test_catalan(self):
        assert [catalan(n) for n in range(8)] == [1, 1, 2, 5, 14, 42, 132, 429]

    def test_double_factorial(self):
        assert [double_factorial(n) for n in (-1, 0, 1, 3, 5, 7, 13)] == [1, 1, 1, 3, 15, 105, 135135]

    def test_gaussian(self):
        assert [gaussian_moment(h) for h in range(1, 9)] == [0, 1, 0, 3, 0, 15, 0, 105]


class TestHeight:
    def test_examples(self):
        assert height(PairPartition.from_word("aabb")) == 2
        assert height(PairPartition.from_word("abab")) == 0
        assert height(PairPartition.from_word("abacbc")) == 0
        assert height(PairPartition.from_word("aabcbc")) == 1

    def test_height_moment_small(self):
        # 2: one diagram of height 1; 4: heights 2, 0, 2
        assert height_moment(2) == 2
        assert height_moment(4) == 4 + 1 + 4

    @pytest.mark.parametrize("two_k", [2, 4, 6, 8, 10, 12])
    def test_equals_unit_weight_labelling(self, two_k):
        assert height_moment(two_k) == constrained_moment(1, 1, two_k)


class TestConstrainedMoment:
    def test_pure_semicircle(self):
        for two_k in (2, 4, 6, 8, 10):
            assert constrained_moment(0, 1, two_k) == catalan(two_k // 2)

    def test_pure_gaussian(self):
        for two_k in (2, 4, 6, 8, 10):
            assert constrained_moment(1, 0, two_k) == double_factorial(two_k - 1)

    @pytest.mark.parametrize("two_k", [2, 4, 6, 8, 10])
    @pytest.mark.parametrize("weights", [(Fraction(1, 2), Fraction(1, 2)), (1, 1), (Fraction(1, 3), 2)])
    def test_literal_labelling_oracle(self, weights, two_k):
        assert constrained_moment(*weights, two_k) == brute_force_moment(*weights, two_k)

    @pytest.mark.parametrize("two_k", [2, 4, 6, 8, 10, 12])
    @pytest.mark.parametrize("depth", [1, 2, 3, 5])
    def test_free_cumulant_oracle(self, depth, two_k):
        g = Fraction(1, 2 ** depth)
        assert limit_moment_disco(depth, two_k) == free_sum_moment(g, 1 - g, two_k)

    def test_d1_values(self):
        assert [limit_moment_disco(1, h) for h in (2, 4, 6, 8)] == [1, Fraction(9, 4), 7, Fraction(431, 16)]

    def test_homogeneity(self):
        # scaling both variances by c scales the 2k-th moment by c**k
        for two_k in (4, 6, 8):
            base = constrained_moment(Fraction(1, 3), Fraction(2, 3), two_k)
            assert constrained_moment(Fraction(2, 3), Fraction(4, 3), two_k) == 2 ** (two_k // 2) * base

    def test_negative_weight_rejected(self):
        with pytest.raises(ValueError):
            constrained_moment(-1, 1, 4)

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            constrained_moment(1, 1, 16)


class TestDiscoLimit:
    def test_depth_zero_is_gaussian(self):
        assert [limit_moment_disco(0, h) for h in (2, 4, 6)] == [1, 3, 15]

    def test_odd_orders_vanish(self):
        assert limit_moment_disco(3, 5) == 0

    @pytest.mark.parametrize("depth", range(1, 9))
    def test_fourth_moment_closed_form(self, depth):
        assert limit_moment_disco(depth, 4) == 2 + Fraction(1, 4 ** depth)

    def test_monotone_in_depth(self):
        for two_k in (4, 6, 8, 10):
            values = [limit_moment_disco(d, two_k) for d in range(0, 9)]
            assert all(x > y for x, y in zip(values, values[1:]))
            assert values[-1] > catalan(two_k // 2)

    def test_bounds(self):
        assert moment_bounds(2) == (2, 2, 2)
        assert moment_bounds(4) == (8, 12, 9)
        assert moment_bounds(8) == (224, 1680, 431)


class TestMomentTable:
    def test_csv(self):
        t = moment_table("disco", [2, 4], depth=1)
        assert t.name == "disco_d1"
        assert t.to_csv() == "two_k,exact_num,exact_den,float\n2,1,1,1.0\n4,9,4,2.25\n"

    def test_json_roundtrip(self):
        t = moment_table("semicircle", [2, 4, 6])
        doc = json.loads(t.to_json())
        assert [r["exact_num"] for r in doc["rows"]] == [1, 2, 5]
        assert {r["provenance"] for r in doc["rows"]} == {"closed-form"}

    def test_height_series(self):
        assert [r.value for r in moment_table("height", [2, 4]).rows] == [2, 9]

    def test_unknown_series(self):
        with pytest.raises(ValueError):
            moment_table("poisson", [2])
