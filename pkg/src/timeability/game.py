"""Finite extensive-form games: data model, exchange format, validation.

A game is a rooted tree of chance / decision / leaf nodes. Decision nodes
carry a 1-based player index and an information-set id; chance nodes carry
exact rational move probabilities; leaves carry one rational payoff per
player. Games are immutable after construction and all operations here are
pure, so values are safe to share across threads.

The exchange format is JSON with all rationals as strings; see
``parse_game`` / ``serialize_game``. The serializer emits a canonical field
order and lowest-terms rationals, so serialize(parse(serialize(g))) is
byte-identical to serialize(g).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping

from .rational import format_rational, parse_rational

CHANCE = "chance"
DECISION = "decision"
LEAF = "leaf"

_KINDS = (CHANCE, DECISION, LEAF)


class GameFormatError(Exception):
    """A game document is syntactically or semantically malformed."""

    def __init__(self, message: str, line: int | None = None,
                 column: int | None = None):
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)
        self.line = line
        self.column = column


@dataclass(frozen=True, slots=True)
class ChildEdge:
    node: int
    action: str
    prob: Fraction | None = None  # chance edges only


@dataclass(frozen=True, slots=True)
class Node:
    node_id: int
    kind: str
    player: int | None = None
    infoset: str | None = None
    children: tuple[ChildEdge, ...] = ()
    payoffs: tuple[Fraction, ...] | None = None


# One player's view of the past: (infoset id, action index taken) for each
# of their own decision nodes strictly above the current node.
Experience = tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class Game:
    players: tuple[str, ...]
    nodes: Mapping[int, Node]
    root: int

    @cached_property
    def parent(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for node in self.nodes.values():
            for edge in node.children:
                out[edge.node] = node.node_id
        return out

    @cached_property
    def infosets(self) -> dict[str, tuple[int, ...]]:
        """Information-set id -> decision node ids, ascending."""
        groups: dict[str, list[int]] = {}
        for node_id in sorted(self.nodes):
            node = self.nodes[node_id]
            if node.kind == DECISION and node.infoset is not None:
                groups.setdefault(node.infoset, []).append(node_id)
        return {k: tuple(v) for k, v in groups.items()}

    def path_from_root(self, v: int) -> list[int]:
        if v not in self.nodes:
            raise KeyError(f"unknown node {v}")
        path = [v]
        while path[-1] != self.root:
            path.append(self.parent[path[-1]])
        path.reverse()
        return path

    def action_index(self, parent_id: int, child_id: int) -> int:
        for i, edge in enumerate(self.nodes[parent_id].children):
            if edge.node == child_id:
                return i
        raise KeyError(f"{child_id} is not a child of {parent_id}")

    def max_history_nodes(self) -> int:
        """Largest number of nodes on any root-to-leaf path."""
        best = 1
        stack = [(self.root, 1)]
        while stack:
            v, depth = stack.pop()
            node = self.nodes[v]
            if not node.children:
                best = max(best, depth)
            for edge in node.children:
                stack.append((edge.node, depth + 1))
        return best


@dataclass(frozen=True)
class ValidationReport:
    tree_ok: bool
    kinds_ok: bool
    chance_ok: bool
    infosets_ok: bool
    payoffs_ok: bool
    perfect_recall: bool
    payoffs_in_unit_interval: bool
    max_own_nodes: dict[int, int]  # player index -> m_p
    problems: tuple[str, ...] = field(default=())

    @property
    def structurally_valid(self) -> bool:
        return (self.tree_ok and self.kinds_ok and self.chance_ok
                and self.infosets_ok and self.payoffs_ok)


def experience(g: Game, v: int, p: int) -> Experience:
    """Player p's (infoset, action index) pairs strictly above v."""
    path = g.path_from_root(v)
    out = []
    for here, nxt in zip(path, path[1:]):
        node = g.nodes[here]
        if node.kind == DECISION and node.player == p:
            out.append((node.infoset, g.action_index(here, nxt)))
    return tuple(out)


def _check_tree(g: Game, problems: list[str]) -> bool:
    ok = True
    if g.root not in g.nodes:
        problems.append(f"root {g.root} is not a node")
        return False
    indegree: dict[int, int] = {node_id: 0 for node_id in g.nodes}
    for node in g.nodes.values():
        for edge in node.children:
            if edge.node not in g.nodes:
                problems.append(
                    f"node {node.node_id} references missing child {edge.node}")
                return False
            indegree[edge.node] += 1
    if indegree[g.root] != 0:
        problems.append(f"root {g.root} has a parent")
        ok = False
    for node_id, deg in indegree.items():
        if node_id != g.root and deg != 1:
            problems.append(f"node {node_id} has {deg} parents, expected 1")
            ok = False
    if not ok:
        return False
    seen = 0
    stack = [g.root]
    visited = set()
    while stack:
        v = stack.pop()
        if v in visited:
            continue
        visited.add(v)
        seen += 1
        stack.extend(e.node for e in g.nodes[v].children)
    if seen != len(g.nodes):
        problems.append(
            f"{len(g.nodes) - seen} nodes are unreachable from the root")
        return False
    return True


def _check_kinds(g: Game, problems: list[str]) -> bool:
    ok = True
    n = len(g.players)
    for node in g.nodes.values():
        nid = node.node_id
        if node.kind not in _KINDS:
            problems.append(f"node {nid} has unknown kind {node.kind!r}")
            ok = False
            continue
        if node.kind == LEAF:
            if node.children:
                problems.append(f"leaf {nid} has children")
                ok = False
            if node.payoffs is None:
                problems.append(f"leaf {nid} has no payoffs")
                ok = False
            if node.player is not None or node.infoset is not None:
                problems.append(f"leaf {nid} carries player or infoset")
                ok = False
            continue
        if not node.children:
            problems.append(f"{node.kind} node {nid} has no children")
            ok = False
        if node.payoffs is not None:
            problems.append(f"{node.kind} node {nid} carries payoffs")
            ok = False
        if node.kind == CHANCE:
            if node.player is not None or node.infoset is not None:
                problems.append(f"chance node {nid} carries player or infoset")
                ok = False
            for edge in node.children:
                if edge.prob is None:
                    problems.append(
                        f"chance node {nid} has an edge without probability")
                    ok = False
        else:  # decision
            if node.player is None or not (1 <= node.player <= n):
                problems.append(f"decision node {nid} has bad player {node.player!r}")
                ok = False
            if node.infoset is None:
                problems.append(f"decision node {nid} has no infoset")
                ok = False
            for edge in node.children:
                if edge.prob is not None:
                    problems.append(
                        f"decision node {nid} has an edge with a probability")
                    ok = False
    return ok


def _check_chance(g: Game, problems: list[str]) -> bool:
    ok = True
    for node in g.nodes.values():
        if node.kind != CHANCE:
            continue
        probs = [e.prob for e in node.children if e.prob is not None]
        if any(p <= 0 for p in probs):
            problems.append(f"chance node {node.node_id} has a non-positive probability")
            ok = False
        total = sum(probs, Fraction(0))
        if total != 1:
            problems.append(
                f"chance node {node.node_id}: probabilities sum to "
                f"{format_rational(total)}, expected 1")
            ok = False
    return ok


def _check_infosets(g: Game, problems: list[str]) -> bool:
    ok = True
    owner: dict[str, int] = {}
    labels: dict[str, tuple[str, ...]] = {}
    for node in g.nodes.values():
        if node.kind != DECISION or node.infoset is None:
            continue
        acts = tuple(e.action for e in node.children)
        if node.infoset not in owner:
            owner[node.infoset] = node.player
            labels[node.infoset] = acts
            continue
        if owner[node.infoset] != node.player:
            problems.append(
                f"infoset {node.infoset!r} owned by both player "
                f"{owner[node.infoset]} and player {node.player}")
            ok = False
        if labels[node.infoset] != acts:
            problems.append(
                f"infoset {node.infoset!r} has inconsistent action labels")
            ok = False
    return ok


def _check_payoffs(g: Game, problems: list[str]) -> bool:
    ok = True
    n = len(g.players)
    for node in g.nodes.values():
        if node.kind == LEAF and node.payoffs is not None:
            if len(node.payoffs) != n:
                problems.append(
                    f"leaf {node.node_id} has {len(node.payoffs)} payoffs "
                    f"for {n} players")
                ok = False
    return ok


def validate(g: Game) -> ValidationReport:
    """Structural verdicts plus perfect-recall and payoff-range flags.

    Structural failures never raise here; the report carries them, so a
    deliberately corrupted game can be inspected.
    """
    problems: list[str] = []
    tree_ok = _check_tree(g, problems)
    kinds_ok = _check_kinds(g, problems)
    chance_ok = _check_chance(g, problems) if kinds_ok else False
    infosets_ok = _check_infosets(g, problems) if kinds_ok else False
    payoffs_ok = _check_payoffs(g, problems) if kinds_ok else False

    recall = False
    unit = False
    m_p: dict[int, int] = {}
    if tree_ok and kinds_ok:
        recall = True
        for infoset, members in g.infosets.items():
            p = g.nodes[members[0]].player
            exps = {experience(g, v, p) for v in members}
            if len(exps) > 1:
                recall = False
                problems.append(
                    f"infoset {infoset!r} mixes different experiences "
                    f"(imperfect recall)")
        unit = all(
            Fraction(0) <= pay <= Fraction(1)
            for node in g.nodes.values() if node.kind == LEAF
            for pay in (node.payoffs or ())
        )
        m_p = {p: 0 for p in range(1, len(g.players) + 1)}
        stack: list[tuple[int, tuple[int, ...]]] = [
            (g.root, tuple([0] * len(g.players)))]
        while stack:
            v, counts = stack.pop()
            node = g.nodes[v]
            if node.kind == DECISION:
                counts = tuple(
                    c + 1 if i == node.player - 1 else c
                    for i, c in enumerate(counts))
            if not node.children:
                for i, c in enumerate(counts):
                    if c > m_p[i + 1]:
                        m_p[i + 1] = c
            for edge in node.children:
                stack.append((edge.node, counts))

    return ValidationReport(
        tree_ok=tree_ok, kinds_ok=kinds_ok, chance_ok=chance_ok,
        infosets_ok=infosets_ok, payoffs_ok=payoffs_ok,
        perfect_recall=recall, payoffs_in_unit_interval=unit,
        max_own_nodes=m_p, problems=tuple(problems))


def _node_from_record(rec: dict) -> Node:
    if not isinstance(rec, dict):
        raise GameFormatError(f"node record must be an object, got {rec!r}")
    try:
        node_id = rec["id"]
        kind = rec["kind"]
    except KeyError as exc:
        raise GameFormatError(f"node record missing field {exc}") from exc
    if not isinstance(node_id, int) or node_id < 0:
        raise GameFormatError(f"node id must be a non-negative integer: {node_id!r}")
    if kind not in _KINDS:
        raise GameFormatError(f"node {node_id}: unknown kind {kind!r}")

    player = rec.get("player")
    infoset = rec.get("infoset")
    if kind == DECISION and infoset is None:
        # implicit singleton information set
        infoset = f"~{node_id}"
    if kind != DECISION and (player is not None or infoset is not None):
        raise GameFormatError(
            f"node {node_id}: only decision nodes carry player/infoset")

    children = []
    for i, crec in enumerate(rec.get("children", [])):
        action = crec.get("action", str(i))
        prob = crec.get("prob")
        try:
            target = crec["node"]
        except KeyError as exc:
            raise GameFormatError(
                f"node {node_id}: child record missing 'node'") from exc
        if kind == CHANCE:
            if prob is None:
                raise GameFormatError(
                    f"chance node {node_id}: child {target} has no probability")
            prob = parse_rational(prob)
        elif prob is not None:
            raise GameFormatError(
                f"{kind} node {node_id}: child {target} must not carry a probability")
        children.append(ChildEdge(node=target, action=str(action), prob=prob))

    payoffs = rec.get("payoffs")
    if kind == LEAF:
        if payoffs is None:
            raise GameFormatError(f"leaf {node_id} has no payoffs")
        payoffs = tuple(parse_rational(x) for x in payoffs)
    elif payoffs is not None:
        raise GameFormatError(f"{kind} node {node_id} must not carry payoffs")

    return Node(node_id=node_id, kind=kind, player=player, infoset=infoset,
                children=tuple(children), payoffs=payoffs)


def parse_game(text: str) -> Game:
    """Parse a UTF-8 game document; raise GameFormatError on any violation."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GameFormatError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    return game_from_document(doc)


def game_from_document(doc) -> Game:
    if not isinstance(doc, dict):
        raise GameFormatError("game document must be a JSON object")
    for want in ("players", "nodes", "root"):
        if want not in doc:
            raise GameFormatError(f"game document missing field {want!r}")
    players = tuple(str(p) for p in doc["players"])
    if not players:
        raise GameFormatError("game needs at least one player")
    nodes: dict[int, Node] = {}
    for rec in doc["nodes"]:
        try:
            node = _node_from_record(rec)
        except ValueError as exc:
            raise GameFormatError(str(exc)) from exc
        if node.node_id in nodes:
            raise GameFormatError(f"duplicate node id {node.node_id}")
        nodes[node.node_id] = node
    for node in nodes.values():
        if node.kind == DECISION and not (1 <= node.player <= len(players)
                                          if node.player is not None else False):
            raise GameFormatError(
                f"decision node {node.node_id}: player must be in 1..{len(players)}")
    g = Game(players=players, nodes=nodes, root=doc["root"])
    report = validate(g)
    if not report.structurally_valid:
        raise GameFormatError(report.problems[0])
    return g


def game_to_document(g: Game) -> dict:
    nodes = []
    for node_id in sorted(g.nodes):
        node = g.nodes[node_id]
        rec: dict = {"id": node_id, "kind": node.kind}
        if node.player is not None:
            rec["player"] = node.player
        if node.infoset is not None:
            rec["infoset"] = node.infoset
        if node.children:
            rec["children"] = [
                {"node": e.node, "action": e.action,
                 **({"prob": format_rational(e.prob)} if e.prob is not None else {})}
                for e in node.children
            ]
        if node.payoffs is not None:
            rec["payoffs"] = [format_rational(x) for x in node.payoffs]
        nodes.append(rec)
    return {"players": list(g.players), "root": g.root, "nodes": nodes}


def serialize_game(g: Game) -> str:
    return json.dumps(game_to_document(g), indent=2) + "\n"


def content_digest(g: Game) -> str:
    """Stable digest of the canonical serialization."""
    return hashlib.sha256(serialize_game(g).encode("utf-8")).hexdigest()
