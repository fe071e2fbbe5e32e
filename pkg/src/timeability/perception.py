"""Imperfect timekeeping: actual vs perceived times under clock bounds.

A clock bound pair (l, u) sandwiches how a player may perceive elapsed
time: between two of their nodes with actual times x_v < x_w, the perceived
gap y_w - y_v must lie in [l(x_w - x_v), u(x_w - x_v)]. The achieved
epsilon is measured on perceived timing information only.

Bounds come from a small closed grammar, scale(q): t -> q*t and
powmax(k): t -> max(t, t^k), so the existence question for the explicit
construction (does u eventually dwarf any linear multiple of l?) is
decidable by inspection rather than by probing arbitrary callables.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .dist import DiscreteDistribution, tv_distance
from .game import DECISION, Game
from .randomized import own_time_nodes
from .rational import format_rational, parse_rational


@dataclass(frozen=True)
class ClockBound:
    kind: str  # "scale" | "powmax"
    q: Fraction | None = None
    k: int | None = None

    def __post_init__(self):
        if self.kind == "scale":
            if self.q is None or self.q <= 0:
                raise ValueError("scale needs a positive factor")
        elif self.kind == "powmax":
            if self.k is None or self.k < 1:
                raise ValueError("powmax needs an exponent >= 1")
        else:
            raise ValueError(f"unknown clock bound kind {self.kind!r}")

    def __call__(self, t: Fraction) -> Fraction:
        t = Fraction(t)
        if t < 0:
            raise ValueError("clock bounds apply to nonnegative gaps")
        if self.kind == "scale":
            return self.q * t
        return max(t, t ** self.k)

    def valid_as_lower(self) -> bool:
        """l(t) <= t for all t >= 0, weakly increasing."""
        if self.kind == "scale":
            return self.q <= 1
        return self.k == 1  # powmax(1) is the identity

    def valid_as_upper(self) -> bool:
        """u(t) >= t for all t >= 0, weakly increasing."""
        if self.kind == "scale":
            return self.q >= 1
        return True

    def linear_slope(self) -> Fraction:
        """Slope for the bounds that are linear (scale, powmax(1))."""
        if self.kind == "scale":
            return self.q
        if self.k == 1:
            return Fraction(1)
        raise ValueError("powmax(k >= 2) is not linear")


def scale(q) -> ClockBound:
    return ClockBound(kind="scale", q=Fraction(q))


def powmax(k: int) -> ClockBound:
    return ClockBound(kind="powmax", k=k)


def parse_clock_bound(text: str) -> ClockBound:
    """CLI syntax: scale:1/2 or powmax:2."""
    kind, _, arg = text.partition(":")
    if kind == "scale":
        return scale(parse_rational(arg))
    if kind == "powmax":
        return powmax(int(arg))
    raise ValueError(f"unknown clock bound {text!r}")


def format_clock_bound(b: ClockBound) -> str:
    if b.kind == "scale":
        return f"scale:{format_rational(b.q)}"
    return f"powmax:{b.k}"


@dataclass(frozen=True)
class PerceivedTiming:
    """Atoms of (probability, node -> (actual time, perceived time))."""

    atoms: tuple[tuple[Fraction, dict[int, tuple[Fraction, Fraction]]], ...]


@dataclass(frozen=True)
class LuReport:
    structural_ok: bool
    violation: str | None
    achieved: Fraction


def verify_lu_timing(g: Game, pt: PerceivedTiming, lower: ClockBound,
                     upper: ClockBound) -> LuReport:
    """Per atom: the actual times form a timing and every same-player
    ancestor pair satisfies the sandwich; across atoms: worst TV of the
    perceived own-time tuples inside information sets."""
    if not lower.valid_as_lower():
        raise ValueError("lower bound must satisfy l(t) <= t")
    if not upper.valid_as_upper():
        raise ValueError("upper bound must satisfy u(t) >= t")
    total = Fraction(0)
    violation = None
    for atom_no, (prob, xy) in enumerate(pt.atoms):
        if prob <= 0:
            raise ValueError("atom probabilities must be positive")
        total += prob
        if set(xy) != set(g.nodes):
            raise ValueError(f"atom {atom_no} must label every node")
        if violation is not None:
            continue
        root_x = xy[g.root][0]
        if root_x < 0:
            violation = f"atom {atom_no}: negative root time"
            continue
        for node in g.nodes.values():
            for edge in node.children:
                if xy[edge.node][0] < xy[node.node_id][0] + 1:
                    violation = (f"atom {atom_no}: actual-time gap violation "
                                 f"at edge {node.node_id}->{edge.node}")
                    break
            if violation:
                break
        if violation:
            continue
        for v in sorted(g.nodes):
            if g.nodes[v].kind != DECISION:
                continue
            ancestors = own_time_nodes(g, v)
            for u in ancestors[:-1]:
                dx = xy[v][0] - xy[u][0]
                dy = xy[v][1] - xy[u][1]
                if not (lower(dx) <= dy <= upper(dx)):
                    violation = (
                        f"atom {atom_no}: perceived gap {format_rational(dy)} "
                        f"for nodes {u}->{v} outside "
                        f"[{format_rational(lower(dx))}, "
                        f"{format_rational(upper(dx))}]")
                    break
            if violation:
                break
    if total != 1:
        raise ValueError(f"atom probabilities sum to {total}, expected 1")

    achieved = Fraction(0)
    for members in g.infosets.values():
        dists = {}
        for v in members:
            nodes = own_time_nodes(g, v)
            dists[v] = DiscreteDistribution.from_pairs(
                (tuple(xy[u][1] for u in nodes), prob)
                for prob, xy in pt.atoms)
        for i, v in enumerate(members):
            for w in members[i + 1:]:
                d = tv_distance(dists[v], dists[w])
                if d > achieved:
                    achieved = d
    return LuReport(structural_ok=violation is None, violation=violation,
                    achieved=achieved)


def construct_lu_timing(g: Game, lower: ClockBound,
                        upper: ClockBound) -> PerceivedTiming:
    """The explicit exact construction for clock pairs whose ratio u/l is
    unbounded: find t0 >= 1 with u(t0) >= M * l(M * t0) (M = longest
    history in nodes), place node v at actual time depth(v) * t0 and
    perceived time (own-node ordinal) * l(M * t0). Perception then depends
    only on the ordinal, so information sets leak nothing: epsilon is 0.

    Clock pairs with bounded ratio (both linear) are rejected; no t0 can
    absorb a whole history into one perceived step.
    """
    if not lower.valid_as_lower():
        raise ValueError("lower bound must satisfy l(t) <= t")
    if not upper.valid_as_upper():
        raise ValueError("upper bound must satisfy u(t) >= t")
    if not (upper.kind == "powmax" and upper.k >= 2):
        raise ValueError(
            "rejected: u/l stays bounded for "
            f"{format_clock_bound(lower)}, {format_clock_bound(upper)}; "
            "the construction needs a superlinear upper bound")
    slope = lower.linear_slope()
    M = g.max_history_nodes()

    t0 = 1
    while Fraction(t0) ** (upper.k - 1) < slope * M * M:
        t0 *= 2
    assert upper(Fraction(t0)) >= M * lower(Fraction(M * t0))

    perceived_step = lower(Fraction(M * t0))
    xy: dict[int, tuple[Fraction, Fraction]] = {}
    stack = [(g.root, 0, {p: 0 for p in range(1, len(g.players) + 1)})]
    while stack:
        v, depth, counts = stack.pop()
        node = g.nodes[v]
        if node.kind == DECISION:
            counts = dict(counts)
            counts[node.player] += 1
            y = counts[node.player] * perceived_step
        else:
            y = Fraction(depth * t0)
        xy[v] = (Fraction(depth * t0), y)
        for edge in node.children:
            stack.append((edge.node, depth + 1, counts))
    return PerceivedTiming(atoms=((Fraction(1), xy),))


def gap_ratio_event_probability(c: int, separator_atoms) -> Fraction:
    """Diagnostic for four separator times: the probability that both
    (x4 - x2)/(x4 - x1) and (x3 - x1)/(x4 - x1) reach 2/c^2, i.e. that the
    middle separators hug neither end. No bound is asserted; this only
    measures a given timing.

    separator_atoms: iterable of (probability, (x1, x2, x3, x4)).
    """
    threshold = Fraction(2, c * c)
    total = Fraction(0)
    hit = Fraction(0)
    for prob, xs in separator_atoms:
        x1, x2, x3, x4 = (Fraction(x) for x in xs)
        total += prob
        span = x4 - x1
        if span <= 0:
            raise ValueError("separator times must increase")
        if (x4 - x2) / span >= threshold and (x3 - x1) / span >= threshold:
            hit += prob
    if total != 1:
        raise ValueError(f"probabilities sum to {total}, expected 1")
    return hit


# ---------------------------------------------------------------------------
# documents


def perceived_timing_to_document(pt: PerceivedTiming) -> dict:
    return {"atoms": [
        {"prob": format_rational(prob),
         "xy": {str(v): [format_rational(x), format_rational(y)]
                for v, (x, y) in sorted(xy.items())}}
        for prob, xy in pt.atoms]}


def perceived_timing_from_document(doc) -> PerceivedTiming:
    atoms = []
    for rec in doc["atoms"]:
        xy = {int(v): (parse_rational(pair[0]), parse_rational(pair[1]))
              for v, pair in rec["xy"].items()}
        atoms.append((parse_rational(rec["prob"]), xy))
    return PerceivedTiming(atoms=tuple(atoms))
