"""Exact timeability: information-set contraction, cycle test, timings.

A game is exactly timeable iff contracting every information set of its
tree (leaves dropped) yields a directed graph with no oriented cycle. The
contraction and the cycle test both run in time linear in the number of
nodes plus edges, so the decision procedure scales to million-node games.

When the contraction is acyclic, a topological numbering of the contracted
vertices is itself an exact deterministic timing: all nodes of an
information set share the vertex's index, every child is at least one
above its parent, and leaves sit one above their parents.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .game import CHANCE, DECISION, Game
from .rational import format_rational, parse_rational


@dataclass(frozen=True)
class ContractedGraph:
    """One vertex per information set and per chance node; leaves dropped."""

    labels: tuple[str, ...]                 # vertex index -> display label
    adjacency: tuple[tuple[int, ...], ...]  # deduplicated, label-sorted
    vertex_of_node: dict[int, int]          # non-leaf node id -> vertex index


@dataclass(frozen=True)
class DeterministicTiming:
    """Node id -> nonnegative rational time, child >= parent + 1."""

    times: Mapping[int, Fraction]

    def validate_against(self, g: Game) -> None:
        if set(self.times) != set(g.nodes):
            raise ValueError("timing must assign a time to every node")
        if self.times[g.root] < 0:
            raise ValueError("root time must be nonnegative")
        for node in g.nodes.values():
            for edge in node.children:
                if self.times[edge.node] < self.times[node.node_id] + 1:
                    raise ValueError(
                        f"gap violation: node {edge.node} at "
                        f"{self.times[edge.node]} under {node.node_id} at "
                        f"{self.times[node.node_id]}")

    def is_exact(self, g: Game) -> bool:
        """True when every information set shares a single time."""
        for members in g.infosets.values():
            first = self.times[members[0]]
            if any(self.times[v] != first for v in members[1:]):
                return False
        return True


def contract_infosets(g: Game) -> ContractedGraph:
    labels: list[str] = []
    index_of: dict[str, int] = {}
    vertex_of_node: dict[int, int] = {}

    for node_id in sorted(g.nodes):
        node = g.nodes[node_id]
        if not node.children:
            continue
        label = node.infoset if node.kind == DECISION else f"chance@{node_id}"
        idx = index_of.get(label)
        if idx is None:
            idx = len(labels)
            index_of[label] = idx
            labels.append(label)
        vertex_of_node[node_id] = idx

    # self-loops are kept: a child sharing its parent's information set is
    # already an oriented cycle
    edge_sets: list[set[int]] = [set() for _ in labels]
    for node_id, u in vertex_of_node.items():
        for edge in g.nodes[node_id].children:
            w = vertex_of_node.get(edge.node)
            if w is not None:
                edge_sets[u].add(w)

    adjacency = tuple(
        tuple(sorted(targets, key=lambda i: labels[i]))
        for targets in edge_sets
    )
    return ContractedGraph(labels=tuple(labels), adjacency=adjacency,
                           vertex_of_node=vertex_of_node)


def find_cycle(cg: ContractedGraph) -> list[str] | None:
    """First directed cycle met by a deterministic DFS, or None.

    Self-loops in the source tree cannot occur, but a node whose parent
    shares its information set contracts to a self-loop; those are reported
    as one-vertex cycles.
    """
    n = len(cg.labels)
    color = [0] * n  # 0 white, 1 on stack, 2 done
    order = sorted(range(n), key=lambda i: cg.labels[i])

    for start in order:
        if color[start] != 0:
            continue
        path = [start]
        iters = [iter(cg.adjacency[start])]
        color[start] = 1
        while path:
            advanced = False
            for w in iters[-1]:
                if color[w] == 1:
                    at = path.index(w)
                    return [cg.labels[v] for v in path[at:]]
                if color[w] == 0:
                    color[w] = 1
                    path.append(w)
                    iters.append(iter(cg.adjacency[w]))
                    advanced = True
                    break
            if not advanced:
                color[path.pop()] = 2
                iters.pop()
    return None


def _topological_index(cg: ContractedGraph) -> dict[int, int] | None:
    """Kahn's algorithm; ties broken by smallest vertex label first."""
    n = len(cg.labels)
    indegree = [0] * n
    for targets in cg.adjacency:
        for w in targets:
            indegree[w] += 1
    heap = [(cg.labels[v], v) for v in range(n) if indegree[v] == 0]
    heapq.heapify(heap)
    index: dict[int, int] = {}
    while heap:
        _, v = heapq.heappop(heap)
        index[v] = len(index)
        for w in cg.adjacency[v]:
            indegree[w] -= 1
            if indegree[w] == 0:
                heapq.heappush(heap, (cg.labels[w], w))
    if len(index) != n:
        return None
    return index


def exact_deterministic_timing(g: Game) -> DeterministicTiming | None:
    """Exact timing from the contraction's topological order, else None."""
    cg = contract_infosets(g)
    index = _topological_index(cg)
    if index is None:
        return None
    times: dict[int, Fraction] = {}
    for node_id, v in cg.vertex_of_node.items():
        times[node_id] = Fraction(index[v])
    # leaves: one above their parent
    for node_id in sorted(g.nodes):
        node = g.nodes[node_id]
        for edge in node.children:
            if edge.node not in times:
                times[edge.node] = times[node_id] + 1
    return DeterministicTiming(times=times)


def floor_timing(t: DeterministicTiming) -> DeterministicTiming:
    """Integer-valued timing; floor preserves both gaps and exactness."""
    floored = {v: Fraction(time.numerator // time.denominator)
               for v, time in t.times.items()}
    return DeterministicTiming(times=floored)


def layout(g: Game, t: DeterministicTiming) -> dict[int, tuple[Fraction, Fraction]]:
    """Drawing coordinates: children strictly below parents, and two
    decision nodes share a y-coordinate iff they share an information set.

    Requires an exact, integer-valued timing. Each drawing class (an
    information set, a chance node, a leaf) gets an ordinal i out of q
    classes and its nodes sit at y = -(time - i/q); distinct fractional
    offsets keep equal-time classes apart while gaps of at least one keep
    children strictly below parents.
    """
    t.validate_against(g)
    if not t.is_exact(g):
        raise ValueError("layout needs an exact timing")
    if any(x.denominator != 1 for x in t.times.values()):
        raise ValueError("layout needs an integer-valued timing")

    classes: list[tuple[str, list[int]]] = []
    for infoset in sorted(g.infosets):
        classes.append((infoset, list(g.infosets[infoset])))
    for node_id in sorted(g.nodes):
        node = g.nodes[node_id]
        if node.kind == CHANCE:
            classes.append((f"chance@{node_id}", [node_id]))
        elif not node.children:
            classes.append((f"leaf@{node_id}", [node_id]))

    q = len(classes)
    y: dict[int, Fraction] = {}
    for ordinal, (_, members) in enumerate(classes, start=1):
        for v in members:
            y[v] = -(t.times[v] - Fraction(ordinal, q))

    # in-order x positions: leaves 0, 1, 2, ... left to right, parents at
    # the mean of their children (post-order, iterative)
    x: dict[int, Fraction] = {}
    next_leaf = 0
    stack: list[tuple[int, bool]] = [(g.root, False)]
    while stack:
        v, expanded = stack.pop()
        node = g.nodes[v]
        if not node.children:
            x[v] = Fraction(next_leaf)
            next_leaf += 1
        elif expanded:
            xs = [x[e.node] for e in node.children]
            x[v] = sum(xs, Fraction(0)) / len(xs)
        else:
            stack.append((v, True))
            stack.extend((e.node, False) for e in reversed(node.children))
    return {v: (x[v], y[v]) for v in g.nodes}


def layout_to_dot(g: Game, t: DeterministicTiming) -> str:
    """DOT rendering with same-y nodes pinned to one rank."""
    coords = layout(g, t)
    by_y: dict[Fraction, list[int]] = {}
    for v, (_, yv) in coords.items():
        by_y.setdefault(yv, []).append(v)
    lines = ["digraph game {"]
    for v in sorted(g.nodes):
        node = g.nodes[v]
        shape = {CHANCE: "diamond", DECISION: "circle"}.get(node.kind, "box")
        label = node.infoset if node.kind == DECISION else str(v)
        lines.append(f'  n{v} [shape={shape} label="{label}"];')
    for v in sorted(g.nodes):
        for edge in g.nodes[v].children:
            lines.append(f'  n{v} -> n{edge.node} [label="{edge.action}"];')
    for yv in sorted(by_y, reverse=True):
        members = " ".join(f"n{v};" for v in sorted(by_y[yv]))
        lines.append(f"  {{ rank=same; {members} }}  /* y = {yv} */")
    lines.append("}")
    return "\n".join(lines) + "\n"


def timing_to_document(t: DeterministicTiming) -> dict:
    return {"times": {str(v): format_rational(x)
                      for v, x in sorted(t.times.items())}}


def timing_from_document(doc) -> DeterministicTiming:
    if not isinstance(doc, dict) or "times" not in doc:
        raise ValueError("timing document must be an object with 'times'")
    return DeterministicTiming(times={
        int(v): parse_rational(x) for v, x in doc["times"].items()})


def serialize_timing(t: DeterministicTiming) -> str:
    return json.dumps(timing_to_document(t), indent=2) + "\n"
