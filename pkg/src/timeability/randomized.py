"""Randomized timings, exact epsilon verification, chain constructions.

A randomized timing is a finite rational-probability mixture of
deterministic timings of one game. The timing information a player holds at
a node is the tuple of times of their own nodes on the root path; the
verifier reports the exact worst-case total variation distance between
those tuples over all pairs of nodes inside one information set.

Chain distributions (strictly increasing integer tuples) drive the
universal approximate-timing construction: a base two-coordinate chain is a
shifted uniform window, and the recursive step prepends a uniform start and
draws each gap uniformly from {1..2^x} where x is the inner chain's
coordinate. The recursive result is kept in factored form: its joint
support grows multiplicatively with the start window, while every subset
marginal stays small enough to enumerate exactly.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .dist import (BudgetError, DEFAULT_BUDGET, DiscreteDistribution,
                   tv_distance)
from .exact import DeterministicTiming
from .game import DECISION, Game, content_digest
from .rational import format_rational, parse_rational


@dataclass(frozen=True)
class RandomizedTiming:
    atoms: tuple[tuple[Fraction, DeterministicTiming], ...]

    def validate_against(self, g: Game) -> None:
        total = Fraction(0)
        for prob, timing in self.atoms:
            if prob <= 0:
                raise ValueError("atom probabilities must be positive")
            total += prob
            timing.validate_against(g)
        if total != 1:
            raise ValueError(f"atom probabilities sum to {total}, expected 1")

    @staticmethod
    def lift(t: DeterministicTiming) -> "RandomizedTiming":
        return RandomizedTiming(atoms=((Fraction(1), t),))


def own_time_nodes(g: Game, v: int) -> list[int]:
    """The owning player's decision nodes on the root path, v included."""
    node = g.nodes[v]
    if node.kind != DECISION:
        raise ValueError(f"node {v} is not a decision node")
    p = node.player
    return [u for u in g.path_from_root(v)
            if g.nodes[u].kind == DECISION and g.nodes[u].player == p]


def timing_information(g: Game, rt: RandomizedTiming, v: int) -> DiscreteDistribution:
    """Distribution of the player's own-time tuple at node v."""
    nodes = own_time_nodes(g, v)
    return DiscreteDistribution.from_pairs(
        (tuple(timing.times[u] for u in nodes), prob)
        for prob, timing in rt.atoms)


@dataclass(frozen=True)
class EpsilonReport:
    achieved: Fraction
    worst_pair: tuple[str, int, int] | None  # (infoset, node, node)
    pairs_checked: int


def verify_epsilon_timing(g: Game, rt: RandomizedTiming,
                          budget: int = DEFAULT_BUDGET) -> EpsilonReport:
    """Exact worst-case TV of timing information inside information sets.

    The timing is an epsilon-timing iff the achieved value is strictly
    below epsilon; that comparison is the caller's.
    """
    if len(rt.atoms) > budget:
        raise BudgetError(
            f"{len(rt.atoms)} atoms exceed the budget of {budget}; "
            "use the Monte Carlo estimator instead")
    achieved = Fraction(0)
    worst = None
    pairs = 0
    for infoset, members in g.infosets.items():
        dists = {v: timing_information(g, rt, v) for v in members}
        for i, v in enumerate(members):
            for w in members[i + 1:]:
                pairs += 1
                d = tv_distance(dists[v], dists[w])
                if d > achieved:
                    achieved = d
                    worst = (infoset, v, w)
    return EpsilonReport(achieved=achieved, worst_pair=worst, pairs_checked=pairs)


@dataclass(frozen=True)
class EstimateReport:
    estimate: Fraction
    std_error: float
    worst_pair: tuple[str, int, int] | None


def estimate_epsilon_timing(g: Game,
                            sampler: Callable[[random.Random], DeterministicTiming],
                            seed: int, samples: int) -> EstimateReport:
    """Monte Carlo TV estimate for samplers too large to enumerate.

    Sample-splitting keeps the estimate honest: the first half of each
    pair's substream picks the witness event (the outcomes where one node
    looks more likely), the second half estimates that event's probability
    gap, so selection noise does not inflate the estimate. Each information
    set pair draws from its own substream derived from the seed, so results
    do not depend on evaluation order.
    """
    if samples < 2:
        raise ValueError("need at least 2 samples")
    best = Fraction(0)
    best_se = 0.0
    worst = None
    for infoset, members in g.infosets.items():
        for i, v in enumerate(members):
            for w in members[i + 1:]:
                rng = random.Random(f"{seed}:{infoset}:{v}:{w}")
                nodes_v = own_time_nodes(g, v)
                nodes_w = own_time_nodes(g, w)
                half = samples // 2
                counts_v: dict[tuple, int] = {}
                counts_w: dict[tuple, int] = {}
                draws = []
                for k in range(samples):
                    t = sampler(rng)
                    tup_v = tuple(t.times[u] for u in nodes_v)
                    tup_w = tuple(t.times[u] for u in nodes_w)
                    if k < half:
                        counts_v[tup_v] = counts_v.get(tup_v, 0) + 1
                        counts_w[tup_w] = counts_w.get(tup_w, 0) + 1
                    else:
                        draws.append((tup_v, tup_w))
                witness = {o for o in set(counts_v) | set(counts_w)
                           if counts_v.get(o, 0) > counts_w.get(o, 0)}
                n2 = len(draws)
                diffs = [(a in witness) - (b in witness) for a, b in draws]
                total = sum(diffs)
                estimate = max(Fraction(total, n2), Fraction(0))
                mean = total / n2
                var = sum((d - mean) ** 2 for d in diffs) / n2
                se = math.sqrt(var / n2)
                if estimate > best or (estimate == best and worst is None):
                    best, best_se, worst = estimate, se, (infoset, v, w)
    return EstimateReport(estimate=best, std_error=best_se, worst_pair=worst)


# ---------------------------------------------------------------------------
# Chain distributions


def _check_chain_outcome(outcome: tuple) -> None:
    prev = 0
    for x in outcome:
        if not isinstance(x, int):
            raise ValueError(f"chain outcomes must be integers, got {x!r}")
        if x <= prev:
            raise ValueError(f"chain outcome {outcome} is not strictly increasing from 1")
        prev = x


class ChainDistribution:
    """Strictly increasing integer tuples with exact subset marginals."""

    arity: int

    def marginal(self, indices: Sequence[int]) -> DiscreteDistribution:
        raise NotImplementedError

    def to_distribution(self, budget: int = DEFAULT_BUDGET) -> DiscreteDistribution:
        raise NotImplementedError

    def max_value(self) -> int:
        raise NotImplementedError


@dataclass(frozen=True)
class ExplicitChain(ChainDistribution):
    dist: DiscreteDistribution

    def __post_init__(self):
        for outcome in self.dist.support:
            _check_chain_outcome(outcome)
        object.__setattr__(self, "arity", self.dist.arity)

    def marginal(self, indices: Sequence[int]) -> DiscreteDistribution:
        idx = _checked_indices(indices, self.arity)
        return DiscreteDistribution.from_pairs(
            (tuple(outcome[i - 1] for i in idx), p)
            for outcome, p in self.dist.support.items())

    def to_distribution(self, budget: int = DEFAULT_BUDGET) -> DiscreteDistribution:
        if len(self.dist.support) > budget:
            raise BudgetError(f"support exceeds budget of {budget}")
        return self.dist

    def max_value(self) -> int:
        return max(outcome[-1] for outcome in self.dist.support)


def _checked_indices(indices: Sequence[int], arity: int) -> tuple[int, ...]:
    idx = tuple(indices)
    if not idx or any(not (1 <= i <= arity) for i in idx):
        raise ValueError(f"indices must be within 1..{arity}")
    if list(idx) != sorted(set(idx)):
        raise ValueError("indices must be strictly increasing")
    return idx


def _convolve_uniform(weights: list[int], offset: int, width: int) -> tuple[list[int], int]:
    """Convolve an integer-weight array with uniform counts on {1..width}."""
    prefix = [0]
    for w in weights:
        prefix.append(prefix[-1] + w)
    n = len(weights)
    out = []
    for s in range(n + width):
        lo = max(0, s + 1 - width)
        hi = min(n, s + 1)
        out.append(prefix[hi] - prefix[lo] if hi > lo else 0)
    return out, offset + 1


def _uniform_weights(width: int) -> tuple[list[int], int]:
    return [1] * width, 1


def _convolve_many(widths: Sequence[int]) -> tuple[list[int], int]:
    weights, offset = _uniform_weights(widths[0])
    for width in widths[1:]:
        weights, offset = _convolve_uniform(weights, offset, width)
    return weights, offset


@dataclass(frozen=True)
class UniformGapChain(ChainDistribution):
    """Y1 uniform on {1..start_max}; per mixture case, gap j uniform on
    {1..gap_maxima[j]} independently."""

    start_max: int
    cases: tuple[tuple[Fraction, tuple[int, ...]], ...]

    def __post_init__(self):
        if self.start_max < 1:
            raise ValueError("start_max must be >= 1")
        if not self.cases:
            raise ValueError("need at least one case")
        n_gaps = len(self.cases[0][1])
        total = Fraction(0)
        for prob, gaps in self.cases:
            if prob <= 0:
                raise ValueError("case probabilities must be positive")
            if len(gaps) != n_gaps:
                raise ValueError("all cases must have the same arity")
            if any(gap < 1 for gap in gaps):
                raise ValueError("gap maxima must be >= 1")
            total += prob
        if total != 1:
            raise ValueError(f"case probabilities sum to {total}, expected 1")
        object.__setattr__(self, "arity", n_gaps + 1)

    def max_value(self) -> int:
        return self.start_max + max(sum(gaps) for _, gaps in self.cases)

    def _marginal_weights(self, indices: Sequence[int]) -> tuple[dict[tuple, int], int]:
        """Exact integer weights over a common denominator.

        Per case, the selected coordinates split into a first coordinate
        (start plus the gaps before it) and independent increments (the
        gaps between consecutive selected indices); each is a convolution
        of uniforms with integer counts.
        """
        idx = _checked_indices(indices, self.arity)
        denom = 1
        for prob, gaps in self.cases:
            case_denom = prob.denominator * self.start_max
            for gap in gaps:
                case_denom *= gap
            denom = denom * case_denom // math.gcd(denom, case_denom)
        acc: dict[tuple, int] = {}
        for prob, gaps in self.cases:
            case_denom = self.start_max
            for gap in gaps:
                case_denom *= gap
            scale_frac = Fraction(prob * denom, case_denom)
            assert scale_frac.denominator == 1
            scale = scale_frac.numerator
            segments = [[self.start_max] + [gaps[t] for t in range(idx[0] - 1)]]
            for a, b in zip(idx, idx[1:]):
                segments.append([gaps[t] for t in range(a - 1, b - 1)])
            pieces = [_convolve_many(seg) for seg in segments]
            # marginalised trailing gaps contribute their full count
            used = idx[-1] - 1
            for t in range(used, len(gaps)):
                scale *= gaps[t]
            first_weights, first_offset = pieces[0]
            inc_pieces = pieces[1:]

            def emit(prefix: tuple[int, ...], weight: int, depth: int):
                if depth == len(inc_pieces):
                    key = prefix
                    acc[key] = acc.get(key, 0) + weight * scale
                    return
                weights, offset = inc_pieces[depth]
                base = prefix[-1]
                for i, w in enumerate(weights):
                    if w:
                        emit(prefix + (base + i + offset,), weight * w, depth + 1)

            for i, w in enumerate(first_weights):
                if w:
                    emit((i + first_offset,), w, 0)
        return acc, denom

    def marginal(self, indices: Sequence[int]) -> DiscreteDistribution:
        weights, denom = self._marginal_weights(indices)
        return DiscreteDistribution(
            support={k: Fraction(w, denom) for k, w in weights.items()},
            arity=len(_checked_indices(indices, self.arity)))

    def to_distribution(self, budget: int = DEFAULT_BUDGET) -> DiscreteDistribution:
        size = 0
        for _, gaps in self.cases:
            case_size = self.start_max
            for gap in gaps:
                case_size *= gap
            size += case_size
        if size > budget:
            raise BudgetError(
                f"joint support of {size} outcomes exceeds budget {budget}; "
                "subset marginals remain available")
        weights, denom = self._marginal_weights(range(1, self.arity + 1))
        return DiscreteDistribution(
            support={k: Fraction(w, denom) for k, w in weights.items()},
            arity=self.arity)


def indist_base(N: int, k: int) -> ExplicitChain:
    """X1 uniform on {1..N-k}, X2 = X1 + k; both coordinates within N."""
    if not (1 <= k < N):
        raise ValueError(f"need 1 <= k < N, got k={k}, N={N}")
    p = Fraction(1, N - k)
    return ExplicitChain(DiscreteDistribution.from_pairs(
        ((x, x + k), p) for x in range(1, N - k + 1)))


def indist_recursive(inner: ChainDistribution, B: int,
                     budget: int = DEFAULT_BUDGET) -> UniformGapChain:
    """Prepend a uniform start on {1..B}; gap i is uniform on {1..2^{X_i}}."""
    if B < 1:
        raise ValueError("B must be >= 1")
    if inner.arity < 2:
        raise ValueError("inner chain must have arity >= 2")
    inner_dist = inner.to_distribution(budget)
    cases = tuple(
        (p, tuple(2 ** x for x in outcome))
        for outcome, p in sorted(inner_dist.support.items()))
    return UniformGapChain(start_max=B, cases=cases)


def verify_indistinguishable_subsets(cd: ChainDistribution, m: int) -> Fraction:
    """Max TV over all pairs of m-element index subsets' sorted tuples."""
    if not (1 <= m < cd.arity):
        raise ValueError(f"need 1 <= m < arity={cd.arity}")
    from itertools import combinations
    subsets = list(combinations(range(1, cd.arity + 1), m))
    marginals = {s: cd.marginal(s) for s in subsets}
    worst = Fraction(0)
    for i, a in enumerate(subsets):
        for b in subsets[i + 1:]:
            d = tv_distance(marginals[a], marginals[b])
            if d > worst:
                worst = d
    return worst


def subset_indistinguishability(cd: ChainDistribution) -> Fraction:
    """Max over all subset sizes m < arity."""
    return max(verify_indistinguishable_subsets(cd, m)
               for m in range(1, cd.arity))


def timing_from_chain(g: Game, cd: ChainDistribution,
                      budget: int = DEFAULT_BUDGET) -> RandomizedTiming:
    """Root at 0, every node at depth d gets the chain's d-th coordinate."""
    depth = g.max_history_nodes()
    if cd.arity < depth - 1:
        raise ValueError(
            f"chain arity {cd.arity} is too small for histories of "
            f"{depth} nodes")
    dist = cd.to_distribution(budget)
    depth_of: dict[int, int] = {g.root: 0}
    order = [g.root]
    stack = [g.root]
    while stack:
        v = stack.pop()
        for edge in g.nodes[v].children:
            depth_of[edge.node] = depth_of[v] + 1
            order.append(edge.node)
            stack.append(edge.node)
    atoms = []
    for outcome, p in sorted(dist.support.items()):
        times = {v: Fraction(0) if d == 0 else Fraction(outcome[d - 1])
                 for v, d in depth_of.items()}
        atoms.append((p, DeterministicTiming(times=times)))
    return RandomizedTiming(atoms=tuple(atoms))


def shifted_window_timing(g: Game, N: int) -> RandomizedTiming:
    """Window timing for a two-stage game: a chance root decides which of
    two players moves first; a start offset i is drawn uniformly from
    {1..N-1}, the first mover plays at time i and the second at i + 1."""
    if N < 4:
        raise ValueError("N must be >= 4")
    root = g.nodes[g.root]
    if root.kind != "chance" or len(root.children) != 2:
        raise ValueError("expected a chance root with two branches")
    first_movers = []
    for edge in root.children:
        child = g.nodes[edge.node]
        if child.kind != DECISION:
            raise ValueError("each branch must start with a decision node")
        first_movers.append(child)
    if first_movers[0].player == first_movers[1].player:
        raise ValueError("the two branches must open with different players")
    for mover in first_movers:
        other = first_movers[1] if mover is first_movers[0] else first_movers[0]
        for edge in mover.children:
            grand = g.nodes[edge.node]
            if grand.kind == DECISION and grand.player != other.player:
                raise ValueError("second movers must belong to the other player")

    atoms = []
    p = Fraction(1, N - 1)
    for i in range(1, N):
        times: dict[int, Fraction] = {g.root: Fraction(0)}
        stack = [(edge.node, 1) for edge in root.children]
        while stack:
            v, depth = stack.pop()
            node = g.nodes[v]
            if node.kind == DECISION and depth == 1:
                times[v] = Fraction(i)
            elif node.kind == DECISION and depth == 2:
                times[v] = Fraction(i + 1)
            else:
                times[v] = times[g.parent[v]] + 1
            stack.extend((e.node, depth + 1) for e in node.children)
        atoms.append((p, DeterministicTiming(times=times)))
    return RandomizedTiming(atoms=tuple(atoms))


# ---------------------------------------------------------------------------
# documents


def randomized_timing_to_document(g: Game, rt: RandomizedTiming) -> dict:
    return {
        "game": content_digest(g),
        "atoms": [
            {"prob": format_rational(prob),
             "times": {str(v): format_rational(x)
                       for v, x in sorted(t.times.items())}}
            for prob, t in rt.atoms
        ],
    }


def randomized_timing_from_document(doc, g: Game | None = None) -> RandomizedTiming:
    if not isinstance(doc, dict) or "atoms" not in doc:
        raise ValueError("randomized timing document must have 'atoms'")
    if g is not None and doc.get("game") not in (None, content_digest(g)):
        raise ValueError("timing document was made for a different game")
    atoms = tuple(
        (parse_rational(atom["prob"]),
         DeterministicTiming(times={int(v): parse_rational(x)
                                    for v, x in atom["times"].items()}))
        for atom in doc["atoms"])
    return RandomizedTiming(atoms=atoms)
