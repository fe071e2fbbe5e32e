"""Exact distribution algebra: TV metric and its four workhorse bounds."""

from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from timeability.dist import (BudgetError, DiscreteDistribution, condition,
                              distribution_from_document,
                              distribution_to_document, expectation, mixture,
                              pushforward, tv_distance)

pm = DiscreteDistribution.point_mass
uniform = DiscreteDistribution.uniform


def outcomes1(values):
    return [(F(v),) for v in values]


@st.composite
def distributions(draw, arity=1, max_support=6, value_pool=None):
    pool = value_pool or [F(n, d) for n in range(-4, 5) for d in (1, 2, 3)]
    size = draw(st.integers(1, max_support))
    outcome_list = draw(st.lists(
        st.tuples(*([st.sampled_from(pool)] * arity)),
        min_size=size, max_size=size, unique=True))
    weights = draw(st.lists(st.integers(1, 9), min_size=len(outcome_list),
                            max_size=len(outcome_list)))
    total = sum(weights)
    return DiscreteDistribution.from_pairs(
        (o, F(w, total)) for o, w in zip(outcome_list, weights))


class TestConstruction:
    def test_probabilities_must_sum_to_one(self):
        with pytest.raises(ValueError, match="sum"):
            DiscreteDistribution.from_pairs([((1,), F(1, 2)), ((2,), F(1, 3))])

    def test_zero_probabilities_dropped(self):
        d = DiscreteDistribution.from_pairs(
            [((1,), F(1)), ((2,), F(0))])
        assert d.outcomes() == [(1,)]

    def test_arity_mismatch(self):
        with pytest.raises(ValueError, match="arity"):
            DiscreteDistribution.from_pairs([((1,), F(1, 2)), ((1, 2), F(1, 2))])

    def test_budget(self):
        with pytest.raises(BudgetError):
            DiscreteDistribution.from_pairs(
                (((i,), F(1, 100)) for i in range(100)), budget=10)

    def test_integral_coordinates_normalise(self):
        d = DiscreteDistribution.from_pairs([((F(2, 1),), F(1))])
        assert d.prob((2,)) == 1


class TestTvDistance:
    def test_identical_point_masses(self):
        assert tv_distance(pm((F(1),)), pm((F(1),))) == 0

    def test_disjoint_point_masses(self):
        assert tv_distance(pm((F(1),)), pm((F(2),))) == 1

    def test_shifted_uniform_windows(self):
        # enumerated by hand: the windows share three of four points
        a = uniform(outcomes1([1, 2, 3, 4]))
        b = uniform(outcomes1([2, 3, 4, 5]))
        assert tv_distance(a, b) == F(1, 4)

    def test_arity_mismatch(self):
        with pytest.raises(ValueError, match="arity"):
            tv_distance(pm((1,)), pm((1, 2)))

    @given(distributions(), distributions())
    @settings(max_examples=60, deadline=None)
    def test_symmetric_and_bounded(self, a, b):
        d = tv_distance(a, b)
        assert d == tv_distance(b, a)
        assert 0 <= d <= 1
        assert (d == 0) == (a == b)

    @given(distributions(), distributions(), distributions())
    @settings(max_examples=60, deadline=None)
    def test_triangle_inequality(self, a, b, c):
        assert tv_distance(a, c) <= tv_distance(a, b) + tv_distance(b, c)


class TestMixture:
    def test_identity(self):
        d = uniform(outcomes1([1, 2]))
        assert mixture([F(1)], [d]) == d

    def test_two_point_masses(self):
        d = mixture([F(1, 2), F(1, 2)], [pm((F(0),)), pm((F(1),))])
        assert d.prob((0,)) == F(1, 2)
        assert d.prob((1,)) == F(1, 2)

    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValueError, match="sum"):
            mixture([F(1, 2)], [pm((1,))])

    @given(st.data())
    @settings(max_examples=50, deadline=None)
    def test_mixture_tv_bound_with_disjoint_equality(self, data):
        # same mixing weights on both sides
        k = data.draw(st.integers(2, 3))
        raw = data.draw(st.lists(st.integers(1, 5), min_size=k, max_size=k))
        total = sum(raw)
        weights = [F(w, total) for w in raw]
        pools = [[F(j) for j in range(10 * i, 10 * i + 4)] for i in range(k)]
        parts_a = [data.draw(distributions(value_pool=pools[i]))
                   for i in range(k)]
        parts_b = [data.draw(distributions(value_pool=pools[i]))
                   for i in range(k)]
        lhs = tv_distance(mixture(weights, parts_a), mixture(weights, parts_b))
        rhs = sum(w * tv_distance(a, b)
                  for w, a, b in zip(weights, parts_a, parts_b))
        assert lhs <= rhs
        # the pools are pairwise disjoint, so this is an equality
        assert lhs == rhs


class TestPushforward:
    def test_constant_map(self):
        d = uniform(outcomes1([1, 2, 3]))
        assert pushforward(d, lambda o: (F(7),)) == pm((F(7),))

    def test_injective_map_keeps_probabilities(self):
        d = DiscreteDistribution.from_pairs(
            [((F(1),), F(1, 3)), ((F(2),), F(2, 3))])
        image = pushforward(d, lambda o: (o[0] + 10,))
        assert sorted(image.support.values()) == sorted(d.support.values())

    def test_floor_merges(self):
        d = uniform([(F(1, 2),), (F(3, 2),)])
        image = pushforward(d, lambda o: (F(o[0].numerator // o[0].denominator),))
        assert image == DiscreteDistribution.from_pairs(
            [((0,), F(1, 2)), ((1,), F(1, 2))])

    @given(distributions(), distributions(), st.permutations(list(range(12))))
    @settings(max_examples=60, deadline=None)
    def test_data_processing_inequality(self, a, b, table):
        def f(outcome):
            x = outcome[0]
            bucket = (x.numerator * 5 + x.denominator) % 12
            return (F(table[bucket] % 4),)

        assert tv_distance(pushforward(a, f), pushforward(b, f)) <= tv_distance(a, b)


class TestCondition:
    def test_independent_flag_is_identity(self):
        joint = DiscreteDistribution.from_pairs(
            [((F(1), F(1)), F(1, 4)), ((F(1), F(0)), F(1, 4)),
             ((F(2), F(1)), F(1, 4)), ((F(2), F(0)), F(1, 4))])
        conditioned = condition(joint, 1)
        assert conditioned == uniform(outcomes1([1, 2]))

    def test_forced_example(self):
        joint = DiscreteDistribution.from_pairs(
            [((F(0), F(1)), F(1, 2)), ((F(1), F(0)), F(1, 2))])
        assert condition(joint, 1) == pm((F(0),))

    def test_zero_probability_event(self):
        joint = DiscreteDistribution.from_pairs([((F(0), F(1)), F(1))])
        with pytest.raises(ValueError, match="probability 0"):
            condition(joint, 0)

    @given(st.data())
    @settings(max_examples=80, deadline=None)
    def test_conditioning_bound(self, data):
        # random joint over (x1, x2, t) with t in {0, 1} and P(t=1) > 0
        triples = data.draw(st.lists(
            st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 1)),
            min_size=1, max_size=10, unique=True))
        if not any(t == 1 for _, _, t in triples):
            triples.append((0, 0, 1))
        weights = data.draw(st.lists(st.integers(1, 5),
                                     min_size=len(triples),
                                     max_size=len(triples)))
        total = sum(weights)
        joint = DiscreteDistribution.from_pairs(
            ((F(a), F(b), F(t)), F(w, total))
            for (a, b, t), w in zip(triples, weights))
        eps = sum((p for o, p in joint.support.items() if o[2] == 0), F(0))
        x1 = pushforward(joint, lambda o: (o[0],))
        x2 = pushforward(joint, lambda o: (o[1],))
        delta = tv_distance(x1, x2)
        x1c = pushforward(condition(joint, 1), lambda o: (o[0],))
        x2c = pushforward(condition(joint, 1), lambda o: (o[1],))
        assert tv_distance(x1c, x2c) <= (delta + eps) / (1 - eps)


class TestExpectationAndMeanGap:
    def test_point_mass(self):
        assert expectation(pm((F(5, 7),))) == F(5, 7)

    def test_uniform_symmetry(self):
        assert expectation(uniform(outcomes1([1, 2, 3]))) == 2

    def test_forced(self):
        d = DiscreteDistribution.from_pairs([((F(0),), F(1, 4)), ((F(1),), F(3, 4))])
        assert expectation(d) == F(3, 4)

    def test_arity_guard(self):
        with pytest.raises(ValueError, match="arity"):
            expectation(pm((1, 2)))

    @given(st.data())
    @settings(max_examples=80, deadline=None)
    def test_mean_gap_bound(self, data):
        # supports in [0, hi], means at least 1 apart -> TV >= 1/hi
        hi = data.draw(st.integers(2, 8))
        a = data.draw(distributions(
            value_pool=[F(v) for v in range(0, hi - 1)]))
        shift = 1 + data.draw(st.sampled_from([F(0), F(1, 2), F(1)]))
        if any(o[0] + shift > hi for o in a.support):
            shift = F(1)
        b = pushforward(a, lambda o: (o[0] + shift,))
        assert expectation(b) >= expectation(a) + 1
        assert tv_distance(a, b) >= F(1, hi)


def test_document_round_trip():
    d = DiscreteDistribution.from_pairs(
        [((F(1, 3), F(2)), F(1, 2)), ((F(0), F(5, 4)), F(1, 2))])
    doc = distribution_to_document(d)
    assert distribution_from_document(doc) == d
    assert doc == distribution_to_document(distribution_from_document(doc))
