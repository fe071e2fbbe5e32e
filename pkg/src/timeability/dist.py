"""Exact finite discrete distributions over tuples of rationals.

Outcomes are fixed-arity tuples, probabilities are positive rationals that
sum to exactly 1, and every operation here (total variation distance,
mixtures, pushforwards, conditioning, expectation) is computed with exact
arithmetic. No floating point enters this module.

Integral coordinates are normalised to Python ints (which hash and compare
equal to the corresponding Fraction), so distributions with large integer
supports stay cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .rational import format_rational, parse_rational

DEFAULT_BUDGET = 10**6

Coordinate = int | Fraction
Outcome = tuple


class BudgetError(Exception):
    """An exact enumeration would exceed the support-size budget."""


def _coordinate(x) -> Coordinate:
    if isinstance(x, bool):
        raise ValueError("outcome coordinates must be rationals")
    if isinstance(x, int):
        return x
    f = x if isinstance(x, Fraction) else Fraction(x)
    return int(f) if f.denominator == 1 else f


def as_outcome(xs: Iterable) -> Outcome:
    return tuple(_coordinate(x) for x in xs)


@dataclass(frozen=True)
class DiscreteDistribution:
    """Finite map outcome tuple -> positive probability, summing to 1."""

    support: Mapping[Outcome, Fraction]
    arity: int

    @staticmethod
    def from_pairs(pairs: Iterable[tuple[Sequence, Fraction]],
                   budget: int = DEFAULT_BUDGET) -> "DiscreteDistribution":
        """Build a distribution, merging duplicate outcomes exactly."""
        acc: dict[Outcome, Fraction] = {}
        arity = None
        for outcome, prob in pairs:
            key = as_outcome(outcome)
            if arity is None:
                arity = len(key)
            elif len(key) != arity:
                raise ValueError(
                    f"outcome arity mismatch: {len(key)} != {arity}")
            p = Fraction(prob)
            if p < 0:
                raise ValueError(f"negative probability {p} for {key}")
            if p == 0:
                continue
            acc[key] = acc.get(key, Fraction(0)) + p
            if len(acc) > budget:
                raise BudgetError(
                    f"support exceeds budget of {budget} outcomes")
        if arity is None:
            raise ValueError("a distribution needs at least one outcome")
        total = sum(acc.values())
        if total != 1:
            raise ValueError(f"probabilities sum to {total}, expected 1")
        return DiscreteDistribution(support=acc, arity=arity)

    @staticmethod
    def point_mass(outcome: Sequence) -> "DiscreteDistribution":
        return DiscreteDistribution.from_pairs([(outcome, Fraction(1))])

    @staticmethod
    def uniform(outcomes: Sequence[Sequence]) -> "DiscreteDistribution":
        n = len(outcomes)
        if n == 0:
            raise ValueError("uniform distribution needs outcomes")
        p = Fraction(1, n)
        return DiscreteDistribution.from_pairs((o, p) for o in outcomes)

    def prob(self, outcome: Sequence) -> Fraction:
        return self.support.get(as_outcome(outcome), Fraction(0))

    def outcomes(self) -> list[Outcome]:
        return sorted(self.support)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiscreteDistribution):
            return NotImplemented
        return self.arity == other.arity and dict(self.support) == dict(other.support)


def tv_distance(a: DiscreteDistribution, b: DiscreteDistribution) -> Fraction:
    """Total variation distance: sum over x of max(P_a(x) - P_b(x), 0)."""
    if a.arity != b.arity:
        raise ValueError(f"arity mismatch: {a.arity} != {b.arity}")
    total = Fraction(0)
    for outcome, pa in a.support.items():
        pb = b.support.get(outcome)
        if pb is None:
            total += pa
        elif pa > pb:
            total += pa - pb
    return total


def mixture(weights: Sequence[Fraction],
            parts: Sequence[DiscreteDistribution],
            budget: int = DEFAULT_BUDGET) -> DiscreteDistribution:
    """Exact convex combination of equal-arity distributions."""
    if len(weights) != len(parts):
        raise ValueError("one weight per part")
    ws = [Fraction(w) for w in weights]
    if any(w <= 0 for w in ws):
        raise ValueError("weights must be positive")
    total = sum(ws)
    if total != 1:
        raise ValueError(f"weights sum to {total}, expected 1")
    pairs = []
    for w, part in zip(ws, parts):
        for outcome, p in part.support.items():
            pairs.append((outcome, w * p))
    return DiscreteDistribution.from_pairs(pairs, budget=budget)


def pushforward(d: DiscreteDistribution,
                f: Callable[[Outcome], Sequence]) -> DiscreteDistribution:
    """Image distribution of f, merging outcomes that collide."""
    return DiscreteDistribution.from_pairs(
        (f(outcome), p) for outcome, p in d.support.items())


def condition(joint: DiscreteDistribution, flag) -> DiscreteDistribution:
    """Condition on the last coordinate equalling ``flag``; drop it.

    The conditioning event must have positive probability.
    """
    if joint.arity < 2:
        raise ValueError("conditioning needs arity >= 2 (outcome, flag)")
    want = _coordinate(flag)
    mass = Fraction(0)
    kept: list[tuple[Outcome, Fraction]] = []
    for outcome, p in joint.support.items():
        if outcome[-1] == want:
            mass += p
            kept.append((outcome[:-1], p))
    if mass == 0:
        raise ValueError(f"conditioning event flag={flag!r} has probability 0")
    return DiscreteDistribution.from_pairs((o, p / mass) for o, p in kept)


def expectation(d: DiscreteDistribution) -> Fraction:
    """Exact mean of a distribution over 1-tuples."""
    if d.arity != 1:
        raise ValueError(f"expectation needs arity 1, got {d.arity}")
    return sum((Fraction(o[0]) * p for o, p in d.support.items()), Fraction(0))


def distribution_to_document(d: DiscreteDistribution) -> list[dict]:
    """Canonical document form: outcomes in lexicographic order."""
    return [
        {"outcome": [format_rational(x) for x in outcome],
         "prob": format_rational(d.support[outcome])}
        for outcome in sorted(d.support)
    ]


def distribution_from_document(doc) -> DiscreteDistribution:
    if not isinstance(doc, list):
        raise ValueError("distribution document must be a list of entries")
    pairs = []
    for entry in doc:
        pairs.append((
            [parse_rational(x) for x in entry["outcome"]],
            parse_rational(entry["prob"]),
        ))
    return DiscreteDistribution.from_pairs(pairs)
