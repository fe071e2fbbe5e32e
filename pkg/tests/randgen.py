"""Random games, timings and independent oracles for the test suite.

The oracles here deliberately avoid the library's own algorithms: exact
timeability is decided by longest-path relaxation over per-class
constraints, and best responses by exhaustive pure-strategy enumeration.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import product

from timeability.exact import DeterministicTiming
from timeability.game import (CHANCE, DECISION, LEAF, ChildEdge, Game, Node)
from timeability.randomized import RandomizedTiming

ACTIONS = ("l", "r")


def _random_unit_fraction(rng: random.Random) -> Fraction:
    den = rng.randint(1, 8)
    return Fraction(rng.randint(0, den), den)


def random_game(rng: random.Random, n_players: int = 2, max_depth: int = 4,
                max_chance_children: int = 3, leaf_bias: float = 0.25,
                max_own: int | None = None,
                merge: str = "recall") -> Game:
    """Random valid game. merge="recall" groups decision nodes by the
    owner's observation history (guaranteeing perfect recall); "random"
    partitions each player's nodes arbitrarily, which may produce recall
    violations and cyclic contractions. Decision nodes all have two actions
    so any same-player merge is label-consistent.
    """
    nodes: dict[int, Node] = {}
    counter = [0]

    def fresh() -> int:
        counter[0] += 1
        return counter[0] - 1

    # first pass: grow the tree, remember each decision node's observation
    # trace for the owner (own past merged infosets and actions)
    traces: dict[int, tuple] = {}

    def build(depth: int, own: dict[int, tuple], own_counts: dict[int, int]) -> int:
        v = fresh()
        if depth >= max_depth or (depth > 0 and rng.random() < leaf_bias):
            nodes[v] = Node(node_id=v, kind=LEAF, payoffs=tuple(
                _random_unit_fraction(rng) for _ in range(n_players)))
            return v
        if rng.random() < 0.4:
            width = rng.randint(2, max_chance_children)
            raw = [rng.randint(1, 5) for _ in range(width)]
            total = sum(raw)
            children = tuple(
                ChildEdge(node=build(depth + 1, own, own_counts),
                          action=f"c{i}", prob=Fraction(w, total))
                for i, w in enumerate(raw))
            nodes[v] = Node(node_id=v, kind=CHANCE, children=children)
            return v
        eligible = [p for p in range(1, n_players + 1)
                    if max_own is None or own_counts[p] < max_own]
        if not eligible:
            nodes[v] = Node(node_id=v, kind=LEAF, payoffs=tuple(
                _random_unit_fraction(rng) for _ in range(n_players)))
            return v
        p = rng.choice(eligible)
        trace = own[p]
        traces[v] = (p, trace)
        children = []
        for i, action in enumerate(ACTIONS):
            next_own = dict(own)
            next_own[p] = trace + (i,)
            next_counts = dict(own_counts)
            next_counts[p] += 1
            children.append(ChildEdge(
                node=build(depth + 1, next_own, next_counts), action=action))
        nodes[v] = Node(node_id=v, kind=DECISION, player=p, infoset="?",
                        children=tuple(children))
        return v

    root = build(0, {p: () for p in range(1, n_players + 1)},
                 {p: 0 for p in range(1, n_players + 1)})

    decision_ids = sorted(traces)
    if merge == "recall":
        keys = {v: traces[v] for v in decision_ids}
    elif merge == "random":
        keys = {}
        group_count: dict[int, int] = {}
        for v in decision_ids:
            p = traces[v][0]
            groups = group_count.setdefault(p, rng.randint(1, 3))
            keys[v] = (p, rng.randrange(groups))
    else:
        raise ValueError(merge)

    label_of: dict[tuple, str] = {}
    finished = {}
    for v, node in nodes.items():
        if node.kind != DECISION:
            finished[v] = node
            continue
        key = keys[v]
        if key not in label_of:
            label_of[key] = f"s{len(label_of)}"
        finished[v] = Node(node_id=v, kind=DECISION, player=node.player,
                           infoset=label_of[key], children=node.children)
    return Game(players=tuple(str(p) for p in range(1, n_players + 1)),
                nodes=finished, root=root)


def random_timing(rng: random.Random, g: Game) -> DeterministicTiming:
    extras = (Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2))
    times = {g.root: rng.choice((Fraction(0), Fraction(1, 2), Fraction(1)))}
    stack = [g.root]
    while stack:
        v = stack.pop()
        for edge in g.nodes[v].children:
            times[edge.node] = times[v] + 1 + rng.choice(extras)
            stack.append(edge.node)
    return DeterministicTiming(times=times)


def random_randomized_timing(rng: random.Random, g: Game,
                             max_atoms: int = 3) -> RandomizedTiming:
    count = rng.randint(1, max_atoms)
    raw = [rng.randint(1, 4) for _ in range(count)]
    total = sum(raw)
    return RandomizedTiming(atoms=tuple(
        (Fraction(w, total), random_timing(rng, g)) for w in raw))


def random_profile(rng: random.Random, g: Game,
                   players: set[int]) -> dict[str, tuple[Fraction, ...]]:
    profile = {}
    for infoset, members in g.infosets.items():
        if g.nodes[members[0]].player not in players:
            continue
        arity = len(g.nodes[members[0]].children)
        raw = [rng.randint(1, 4) for _ in range(arity)]
        total = sum(raw)
        profile[infoset] = tuple(Fraction(w, total) for w in raw)
    return profile


def brute_force_exact_timeable(g: Game) -> bool:
    """Longest-path relaxation over per-class +1 constraints.

    Classes are information sets (decision nodes) and single chance nodes;
    leaves are unconstrained. The relaxation stabilises within one pass per
    class exactly when an exact small-integer timing exists.
    """
    cls: dict[int, tuple] = {}
    for v, node in g.nodes.items():
        if not node.children:
            continue
        cls[v] = (("i", node.infoset) if node.kind == DECISION
                  else ("c", v))
    times = {key: 0 for key in set(cls.values())}
    constraints = [
        (cls[v], cls[e.node])
        for v in cls
        for e in g.nodes[v].children if e.node in cls
    ]
    for _ in range(len(times) + 1):
        changed = False
        for a, b in constraints:
            if times[b] < times[a] + 1:
                times[b] = times[a] + 1
                changed = True
        if not changed:
            return True
    return False


def exhaustive_best_response(g: Game, p: int, others) -> Fraction:
    """Max expected payoff over player p's pure strategies, by enumeration."""
    own = [(infoset, len(g.nodes[members[0]].children))
           for infoset, members in sorted(g.infosets.items())
           if g.nodes[members[0]].player == p]

    def evaluate(choice: dict[str, int]) -> Fraction:
        total = Fraction(0)
        stack = [(g.root, Fraction(1))]
        while stack:
            v, reach = stack.pop()
            node = g.nodes[v]
            if node.kind == LEAF:
                total += reach * node.payoffs[p - 1]
                continue
            if node.kind == CHANCE:
                for edge in node.children:
                    stack.append((edge.node, reach * edge.prob))
                continue
            if node.player == p:
                stack.append((node.children[choice[node.infoset]].node, reach))
            else:
                probs = others[node.infoset]
                for i, edge in enumerate(node.children):
                    if probs[i]:
                        stack.append((edge.node, reach * probs[i]))
        return total

    best = None
    for combo in product(*(range(arity) for _, arity in own)):
        value = evaluate({infoset: a for (infoset, _), a in zip(own, combo)})
        if best is None or value > best:
            best = value
    return best if best is not None else evaluate({})
