"""Games augmented with timing information, and what that information buys.

Playing a game under a randomized timing really means playing a larger
game: a fresh chance root draws the timing atom, each branch is a copy of
the original tree, and two copies of decision nodes stay in one information
set only when the owner's observed time tuples agree. The gap between the
best response in the augmented game and in the original game is the exact
value of the leaked timing information; it never exceeds the player's
maximum number of moves per history times the achieved epsilon, provided
payoffs live in [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .dist import DEFAULT_BUDGET, BudgetError
from .exact import DeterministicTiming
from .game import (CHANCE, DECISION, LEAF, ChildEdge, Game, Node, experience,
                   validate)
from .randomized import RandomizedTiming, own_time_nodes, verify_epsilon_timing
from .rational import format_rational

# information set id -> probability vector over its ordered actions
BehaviorProfile = Mapping[str, Sequence[Fraction]]


def validate_profile(g: Game, profile: BehaviorProfile,
                     players: set[int]) -> None:
    """Check the profile covers exactly the given players' infosets."""
    for infoset, members in g.infosets.items():
        owner = g.nodes[members[0]].player
        if owner not in players:
            continue
        if infoset not in profile:
            raise ValueError(f"profile missing infoset {infoset!r}")
        probs = profile[infoset]
        arity = len(g.nodes[members[0]].children)
        if len(probs) != arity:
            raise ValueError(
                f"profile for {infoset!r} has {len(probs)} entries, "
                f"expected {arity}")
        if any(p < 0 for p in probs) or sum(probs, Fraction(0)) != 1:
            raise ValueError(f"profile for {infoset!r} is not a distribution")


def uniform_profile(g: Game, players: set[int]) -> dict[str, tuple[Fraction, ...]]:
    out = {}
    for infoset, members in g.infosets.items():
        if g.nodes[members[0]].player in players:
            arity = len(g.nodes[members[0]].children)
            out[infoset] = tuple([Fraction(1, arity)] * arity)
    return out


@dataclass(frozen=True)
class AugmentedGame:
    game: Game
    node_origin: dict[int, tuple[int, int]]        # node -> (original, atom)
    infoset_origin: dict[str, tuple[str, tuple]]   # infoset -> (original, times)


def _augmented_infoset_id(orig: str, times: tuple) -> str:
    inner = ",".join(format_rational(t) for t in times)
    return f"{orig}@({inner})"


def augment(g: Game, rt: RandomizedTiming,
            budget: int = DEFAULT_BUDGET) -> AugmentedGame:
    """Build the timing-augmented game.

    The new root is a chance node with one branch per timing atom; payoffs
    are copied unchanged; each copied decision node's information set is
    keyed by (original information set, owner's observed time tuple).
    """
    rt.validate_against(g)
    if len(rt.atoms) * len(g.nodes) > budget:
        raise BudgetError(
            f"{len(rt.atoms)} atoms x {len(g.nodes)} nodes exceeds "
            f"budget {budget}")

    own_cache = {
        v: own_time_nodes(g, v)
        for v in g.nodes if g.nodes[v].kind == DECISION
    }

    nodes: dict[int, Node] = {}
    node_origin: dict[int, tuple[int, int]] = {}
    infoset_origin: dict[str, tuple[str, tuple]] = {}
    next_id = 1
    root_edges = []
    order = sorted(g.nodes)
    for atom_index, (prob, timing) in enumerate(rt.atoms):
        new_id = {v: next_id + i for i, v in enumerate(order)}
        next_id += len(order)
        root_edges.append(ChildEdge(node=new_id[g.root],
                                    action=f"t{atom_index}", prob=prob))
        for v in order:
            node = g.nodes[v]
            infoset = None
            if node.kind == DECISION:
                times = tuple(timing.times[u] for u in own_cache[v])
                infoset = _augmented_infoset_id(node.infoset, times)
                infoset_origin.setdefault(infoset, (node.infoset, times))
            children = tuple(
                ChildEdge(node=new_id[e.node], action=e.action, prob=e.prob)
                for e in node.children)
            nodes[new_id[v]] = Node(
                node_id=new_id[v], kind=node.kind, player=node.player,
                infoset=infoset, children=children, payoffs=node.payoffs)
            node_origin[new_id[v]] = (v, atom_index)

    nodes[0] = Node(node_id=0, kind=CHANCE, children=tuple(root_edges))
    aug = Game(players=g.players, nodes=nodes, root=0)
    return AugmentedGame(game=aug, node_origin=node_origin,
                         infoset_origin=infoset_origin)


def lift_profile(ag: AugmentedGame, profile: BehaviorProfile) -> dict[str, Sequence[Fraction]]:
    """Extend a timing-oblivious profile to every timing refinement."""
    return {new: profile[orig]
            for new, (orig, _) in ag.infoset_origin.items()
            if orig in profile}


def best_response_value(g: Game, p: int, others: BehaviorProfile) -> Fraction:
    """Exact best-response value of player p against a fixed profile.

    Backward induction over p's information sets in order of decreasing
    experience length: at each set the action maximising the sum of subtree
    values weighted by chance-and-opponents reach probabilities is chosen,
    ties toward the lowest action index. Requires perfect recall for p.
    """
    if not (1 <= p <= len(g.players)):
        raise ValueError(f"no player {p}")
    own_infosets: dict[str, tuple[int, ...]] = {}
    for infoset, members in g.infosets.items():
        if g.nodes[members[0]].player != p:
            continue
        exps = {experience(g, v, p) for v in members}
        if len(exps) > 1:
            raise ValueError(
                f"player {p} lacks perfect recall at infoset {infoset!r}")
        own_infosets[infoset] = members
    validate_profile(g, others, set(range(1, len(g.players) + 1)) - {p})

    # chance-and-opponents reach probability of every node
    reach: dict[int, Fraction] = {g.root: Fraction(1)}
    stack = [g.root]
    while stack:
        v = stack.pop()
        node = g.nodes[v]
        for i, edge in enumerate(node.children):
            w = Fraction(1)
            if node.kind == CHANCE:
                w = edge.prob
            elif node.kind == DECISION and node.player != p:
                w = others[node.infoset][i]
            reach[edge.node] = reach[v] * w
            stack.append(edge.node)

    depth_order = sorted(
        own_infosets,
        key=lambda s: (-len(experience(g, own_infosets[s][0], p)), s))
    choice: dict[str, int] = {}
    value: dict[int, Fraction] = {}

    def subtree_value(v: int) -> Fraction:
        # iterative post-order; p's choices below are already fixed
        pending = [v]
        while pending:
            u = pending[-1]
            if u in value:
                pending.pop()
                continue
            node = g.nodes[u]
            if node.kind == LEAF:
                value[u] = node.payoffs[p - 1]
                pending.pop()
                continue
            if node.kind == DECISION and node.player == p:
                child = node.children[choice[node.infoset]].node
                if child in value:
                    value[u] = value[child]
                    pending.pop()
                else:
                    pending.append(child)
                continue
            missing = [e.node for e in node.children if e.node not in value]
            if missing:
                pending.extend(missing)
                continue
            total = Fraction(0)
            for i, edge in enumerate(node.children):
                w = edge.prob if node.kind == CHANCE else others[node.infoset][i]
                total += w * value[edge.node]
            value[u] = total
            pending.pop()
        return value[v]

    for infoset in depth_order:
        members = own_infosets[infoset]
        arity = len(g.nodes[members[0]].children)
        best_score = None
        best_action = 0
        for a in range(arity):
            score = sum(
                (reach[v] * subtree_value(g.nodes[v].children[a].node)
                 for v in members), Fraction(0))
            if best_score is None or score > best_score:
                best_score = score
                best_action = a
        choice[infoset] = best_action

    return subtree_value(g.root)


@dataclass(frozen=True)
class AdvantageReport:
    base_value: Fraction
    timed_value: Fraction
    gain: Fraction
    achieved_epsilon: Fraction
    max_own_nodes: int
    bound: Fraction


def timing_advantage(g: Game, rt: RandomizedTiming, p: int,
                     others: BehaviorProfile,
                     budget: int = DEFAULT_BUDGET) -> AdvantageReport:
    """Exact value of timing information for player p, with its bound.

    gain = best response in the augmented game (opponents lifted
    timing-obliviously) minus best response in the original game; the bound
    is m_p times the achieved epsilon of the timing. Payoffs must be in
    [0, 1] for the bound to mean anything.
    """
    report = validate(g)
    if not report.payoffs_in_unit_interval:
        raise ValueError("timing advantage needs payoffs in [0, 1]")
    base = best_response_value(g, p, others)
    ag = augment(g, rt, budget=budget)
    timed = best_response_value(ag.game, p, lift_profile(ag, others))
    eps = verify_epsilon_timing(g, rt, budget=budget).achieved
    m_p = report.max_own_nodes[p]
    gain = timed - base
    bound = m_p * eps
    if gain > bound:
        raise AssertionError(
            f"timing advantage {gain} exceeds bound {bound}; "
            "this should be impossible")
    return AdvantageReport(base_value=base, timed_value=timed, gain=gain,
                           achieved_epsilon=eps, max_own_nodes=m_p,
                           bound=bound)


# ---------------------------------------------------------------------------
# the one-player guessing family and its delay timing


def guessing_game(m: int, k: int) -> Game:
    """m rounds; chance draws from {1..k}; the player guesses or passes.

    A correct guess pays 1 and ends the game, a wrong guess pays 0 and ends
    the game; passing reveals the drawn value and moves to the next round.
    The last round forbids passing. One player, so payoff vectors have
    length 1.
    """
    if m < 1 or k < 2:
        raise ValueError("need m >= 1 and k >= 2")
    nodes: dict[int, Node] = {}
    counter = [0]

    def fresh() -> int:
        counter[0] += 1
        return counter[0] - 1

    def build_round(round_no: int, revealed: tuple[int, ...]) -> int:
        chance_id = fresh()
        player_ids = []
        for value in range(1, k + 1):
            player_ids.append((fresh(), value))
        infoset = f"r{round_no}" + (
            "" if not revealed else "|" + ",".join(map(str, revealed)))
        chance_children = []
        for node_id, value in player_ids:
            chance_children.append(
                ChildEdge(node=node_id, action=f"v{value}", prob=Fraction(1, k)))
            actions = []
            for guess in range(1, k + 1):
                leaf_id = fresh()
                payoff = Fraction(1) if guess == value else Fraction(0)
                nodes[leaf_id] = Node(node_id=leaf_id, kind=LEAF,
                                      payoffs=(payoff,))
                actions.append(ChildEdge(node=leaf_id, action=f"guess{guess}"))
            if round_no < m:
                next_chance = build_round(round_no + 1, revealed + (value,))
                actions.append(ChildEdge(node=next_chance, action="pass"))
            nodes[node_id] = Node(node_id=node_id, kind=DECISION, player=1,
                                  infoset=infoset, children=tuple(actions))
        nodes[chance_id] = Node(node_id=chance_id, kind=CHANCE,
                                children=tuple(chance_children))
        return chance_id

    root = build_round(1, ())
    return Game(players=("guesser",), nodes=nodes, root=root)


def delay_timing(g: Game, eps0: Fraction,
                 budget: int = DEFAULT_BUDGET) -> RandomizedTiming:
    """Each decision node is independently delayed, with probability eps0,
    by the value chance just drew (the 1-based index of the chance edge
    above it); the delay shifts the node and everything below it.

    Works for any game whose decision nodes all sit directly under chance
    nodes, which the guessing family guarantees. The mixture has one atom
    per subset of delayed nodes, hence the budget guard.
    """
    eps0 = Fraction(eps0)
    if not (0 < eps0 < 1):
        raise ValueError("eps0 must be in (0, 1)")
    decision_nodes = sorted(
        v for v in g.nodes if g.nodes[v].kind == DECISION)
    if (1 << len(decision_nodes)) > budget:
        raise BudgetError(
            f"2^{len(decision_nodes)} delay atoms exceed budget {budget}")
    delay_amount: dict[int, int] = {}
    for v in decision_nodes:
        parent = g.parent.get(v)
        if parent is None or g.nodes[parent].kind != CHANCE:
            raise ValueError(
                f"decision node {v} is not directly under a chance node")
        delay_amount[v] = g.action_index(parent, v) + 1

    atoms = []
    for mask in range(1 << len(decision_nodes)):
        prob = Fraction(1)
        delayed = set()
        for i, v in enumerate(decision_nodes):
            if mask >> i & 1:
                delayed.add(v)
                prob *= eps0
            else:
                prob *= 1 - eps0
        times: dict[int, Fraction] = {g.root: Fraction(0)}
        stack = [e.node for e in g.nodes[g.root].children]
        while stack:
            v = stack.pop()
            t = times[g.parent[v]] + 1
            if v in delayed:
                t += delay_amount[v]
            times[v] = t
            stack.extend(e.node for e in g.nodes[v].children)
        atoms.append((prob, DeterministicTiming(times=times)))
    return RandomizedTiming(atoms=tuple(atoms))
