"""Generators for the concrete games and agendas used throughout.

figure1 builds the three two-player coin-guessing variants; the symmetric
choiceless machinery (a chance root assigning one of n! numberings to the
players, then a fixed single-child sequence) and the agenda family provide
the hard-to-time instances. Separators in an agenda are stored as token 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

from .game import CHANCE, DECISION, LEAF, ChildEdge, Game, Node

SEPARATOR = 0


@dataclass(frozen=True)
class SymmetricChoicelessGame:
    n_players: int
    seq: tuple[int, ...]

    def __post_init__(self):
        if not self.seq:
            raise ValueError("sequence must be nonempty")
        if any(not (1 <= s <= self.n_players) for s in self.seq):
            raise ValueError("sequence entries must be players 1..n")


@dataclass(frozen=True)
class Agenda:
    n_players: int
    seq: tuple[int, ...]  # players 1..n and SEPARATOR tokens

    def __post_init__(self):
        if not self.seq:
            raise ValueError("sequence must be nonempty")
        if any(s != SEPARATOR and not (1 <= s <= self.n_players)
               for s in self.seq):
            raise ValueError("sequence entries must be separators or players 1..n")

    def occurrences(self, player: int) -> int:
        return sum(1 for s in self.seq if s == player)

    @property
    def separator_count(self) -> int:
        return sum(1 for s in self.seq if s == SEPARATOR)


def format_agenda(a: Agenda, letters_from: int | None = None) -> str:
    """Compact display: '|' for separators, digits for small player ids,
    letters a.. for ids at or above letters_from, [id] otherwise."""
    out = []
    for s in a.seq:
        if s == SEPARATOR:
            out.append("|")
        elif letters_from is not None and s >= letters_from:
            out.append(chr(ord("a") + s - letters_from))
        elif s <= 9:
            out.append(str(s))
        else:
            out.append(f"[{s}]")
    return "".join(out)


def agenda_display(a: Agenda) -> str:
    """Display with the newest 16 players lettered when that reconstructs
    the recursive family's printed form."""
    if a.n_players >= 19:
        return format_agenda(a, letters_from=a.n_players - 15)
    return format_agenda(a)


# ---------------------------------------------------------------------------
# Figure 1

_FIG1_PAYOFFS = {
    "a": {
        # left subtree: player 1 first; right: player 2 first
        7: ("1", "0"), 8: ("1", "1"), 9: ("0", "0"), 10: ("0", "1"),
        11: ("0", "1"), 12: ("1", "1"), 13: ("0", "0"), 14: ("1", "0"),
    },
}


def _leaf(node_id: int, payoffs: tuple[str, str]) -> Node:
    return Node(node_id=node_id, kind=LEAF,
                payoffs=tuple(Fraction(p) for p in payoffs))


def _decision(node_id: int, player: int, infoset: str,
              children: list[tuple[int, str]]) -> Node:
    return Node(node_id=node_id, kind=DECISION, player=player, infoset=infoset,
                children=tuple(ChildEdge(node=c, action=a) for c, a in children))


def _coin(node_id: int, heads: int, tails: int) -> Node:
    half = Fraction(1, 2)
    return Node(node_id=node_id, kind=CHANCE, children=(
        ChildEdge(node=heads, action="H", prob=half),
        ChildEdge(node=tails, action="T", prob=half)))


def figure1(variant: str) -> Game:
    """The three introductory games: a coin decides who moves first and
    each player guesses whether they went first (payoff 1 when right).

    (a) both players always move, neither can tell the order: not exactly
    timeable. (b) player 1 moves only after heads, and first: exactly
    timeable. (c) the second mover is only offered a bet if the first
    guessed correctly: not exactly timeable.
    """
    if variant == "a":
        nodes = {
            0: _coin(0, 1, 2),
            1: _decision(1, 1, "P1", [(3, "first"), (4, "second")]),
            2: _decision(2, 2, "P2", [(5, "first"), (6, "second")]),
            3: _decision(3, 2, "P2", [(7, "first"), (8, "second")]),
            4: _decision(4, 2, "P2", [(9, "first"), (10, "second")]),
            5: _decision(5, 1, "P1", [(11, "first"), (12, "second")]),
            6: _decision(6, 1, "P1", [(13, "first"), (14, "second")]),
        }
        for leaf_id, payoffs in _FIG1_PAYOFFS["a"].items():
            nodes[leaf_id] = _leaf(leaf_id, payoffs)
        return Game(players=("1", "2"), nodes=nodes, root=0)

    if variant == "b":
        nodes = {
            0: _coin(0, 1, 2),
            1: _decision(1, 1, "P1", [(3, "first"), (4, "second")]),
            2: _decision(2, 2, "P2", [(5, "first"), (6, "second")]),
            3: _decision(3, 2, "P2", [(7, "first"), (8, "second")]),
            4: _decision(4, 2, "P2", [(9, "first"), (10, "second")]),
            5: _leaf(5, ("0", "1")),
            6: _leaf(6, ("0", "0")),
            7: _leaf(7, ("1", "0")),
            8: _leaf(8, ("1", "1")),
            9: _leaf(9, ("0", "0")),
            10: _leaf(10, ("0", "1")),
        }
        return Game(players=("1", "2"), nodes=nodes, root=0)

    if variant == "c":
        nodes = {
            0: _coin(0, 1, 2),
            1: _decision(1, 1, "P1", [(3, "first"), (4, "second")]),
            2: _decision(2, 2, "P2", [(5, "first"), (6, "second")]),
            3: _decision(3, 2, "P2", [(7, "first"), (8, "second")]),
            4: _leaf(4, ("0", "0")),
            5: _decision(5, 1, "P1", [(9, "first"), (10, "second")]),
            6: _leaf(6, ("0", "0")),
            7: _leaf(7, ("1", "0")),
            8: _leaf(8, ("1", "1")),
            9: _leaf(9, ("0", "1")),
            10: _leaf(10, ("1", "1")),
        }
        return Game(players=("1", "2"), nodes=nodes, root=0)

    raise ValueError(f"unknown variant {variant!r}, expected a, b or c")


# ---------------------------------------------------------------------------
# symmetric choiceless games


def expand_choiceless(scg: SymmetricChoicelessGame,
                      limit: int = 720) -> Game:
    """Expand to an explicit tree: a chance root draws one of the n!
    numberings uniformly, then a single-child chain follows the sequence
    under that numbering. Nodes merge into one information set when they
    have the same owner and the same count of prior own nodes. All payoffs
    are 0; the interest of these games is purely in their timings.
    """
    n = scg.n_players
    factorial = 1
    for i in range(2, n + 1):
        factorial *= i
    if factorial > limit:
        raise ValueError(f"{n}! = {factorial} branches exceed limit {limit}")

    nodes: dict[int, Node] = {}
    root_children = []
    prob = Fraction(1, factorial)
    next_id = 1
    zero_payoffs = tuple([Fraction(0)] * n)
    for perm in permutations(range(1, n + 1)):
        # perm[j] is the player to whom chance assigned the number j+1
        chain_ids = list(range(next_id, next_id + len(scg.seq) + 1))
        next_id = chain_ids[-1] + 1
        root_children.append(ChildEdge(
            node=chain_ids[0],
            action="".join(str(p) for p in perm), prob=prob))
        own_count = {p: 0 for p in range(1, n + 1)}
        for pos, symbol in enumerate(scg.seq):
            owner = perm[symbol - 1]
            infoset = f"p{owner}#{own_count[owner]}"
            own_count[owner] += 1
            nodes[chain_ids[pos]] = Node(
                node_id=chain_ids[pos], kind=DECISION, player=owner,
                infoset=infoset,
                children=(ChildEdge(node=chain_ids[pos + 1], action="go"),))
        nodes[chain_ids[-1]] = Node(node_id=chain_ids[-1], kind=LEAF,
                                    payoffs=zero_payoffs)
    nodes[0] = Node(node_id=0, kind=CHANCE, children=tuple(root_children))
    return Game(players=tuple(str(p) for p in range(1, n + 1)),
                nodes=nodes, root=0)


# ---------------------------------------------------------------------------
# the recursive agenda family

_BASE_SEQ = (2, SEPARATOR, 3, 3, 3, 2, SEPARATOR, 1, 1, 1, SEPARATOR, 2)

# what each of the four woven players contributes to the five segments a
# window of four consecutive separators touches (0..3 = the group's players)
_WINDOW_PIECES = ((1, 3), (2, 2), (0, 3, 3, 0), (1, 1), (0, 2))


def agenda_Ar(r: int) -> Agenda:
    """The recursive hard-to-time agenda family.

    Level 1 is the fixed base agenda on three players. Each later level
    wraps the previous agenda in double separators, registers every old
    player once in the new first and last blocks, and weaves 16 fresh
    players around the separator windows (four per window, cycling with
    period four) so that separator gaps must grow or shrink fast.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    seq = list(_BASE_SEQ)
    n = 3
    for _ in range(r - 1):
        old_players = list(range(1, n + 1))
        segments: list[list[int]] = [[]]
        for token in seq:
            if token == SEPARATOR:
                segments.append([])
            else:
                segments[-1].append(token)
        # || old-players | ... | old-players ||
        segments = ([[], list(old_players)] + segments
                    + [list(old_players), []])
        sep_count = len(segments) - 1
        fresh = list(range(n + 1, n + 17))
        additions: list[list[int]] = [[] for _ in segments]
        for window in range(1, sep_count - 2):
            group = fresh[4 * ((window - 1) % 4):4 * ((window - 1) % 4) + 4]
            for piece_no, piece in enumerate(_WINDOW_PIECES):
                additions[window - 1 + piece_no].extend(group[i] for i in piece)
        seq = []
        for i, segment in enumerate(segments):
            if i:
                seq.append(SEPARATOR)
            seq.extend(additions[i])
            seq.extend(segment)
        n += 16
    return Agenda(n_players=n, seq=tuple(seq))


def strip_separators(a: Agenda) -> SymmetricChoicelessGame:
    """Drop the separators; keep the player alphabet, renumbering by first
    appearance only when it is not already exactly 1..n."""
    players = [s for s in a.seq if s != SEPARATOR]
    distinct = sorted(set(players))
    if distinct == list(range(1, len(distinct) + 1)):
        renumber = {p: p for p in distinct}
    else:
        renumber = {}
        for p in players:
            if p not in renumber:
                renumber[p] = len(renumber) + 1
    return SymmetricChoicelessGame(
        n_players=len(distinct),
        seq=tuple(renumber[p] for p in players))


def gamma_r(r: int) -> SymmetricChoicelessGame:
    """The separator-free game one level up the agenda family."""
    return strip_separators(agenda_Ar(r + 1))


def perception_game(c: int) -> Agenda:
    """The 2n-player agenda (n = 4c^4 + 1) whose separator gaps betray any
    clock that is only off by a factor of c:
    1 2 .. n | (n+1)(n+1) .. (2n)(2n) | | 1 1 2 2 .. n n | (n+1) .. (2n)."""
    if c < 1:
        raise ValueError("c must be >= 1")
    n = 4 * c ** 4 + 1
    seq: list[int] = list(range(1, n + 1))
    seq.append(SEPARATOR)
    for p in range(n + 1, 2 * n + 1):
        seq.extend((p, p))
    seq.extend((SEPARATOR, SEPARATOR))
    for p in range(1, n + 1):
        seq.extend((p, p))
    seq.append(SEPARATOR)
    seq.extend(range(n + 1, 2 * n + 1))
    return Agenda(n_players=2 * n, seq=tuple(seq))


# ---------------------------------------------------------------------------
# documents


def agenda_to_document(a: Agenda) -> dict:
    return {"n": a.n_players,
            "seq": ["|" if s == SEPARATOR else s for s in a.seq]}


def agenda_from_document(doc) -> Agenda:
    return Agenda(
        n_players=int(doc["n"]),
        seq=tuple(SEPARATOR if s == "|" else int(s) for s in doc["seq"]))


def choiceless_to_document(scg: SymmetricChoicelessGame) -> dict:
    return {"n": scg.n_players, "seq": list(scg.seq)}


def choiceless_from_document(doc) -> SymmetricChoicelessGame:
    return SymmetricChoicelessGame(n_players=int(doc["n"]),
                                   seq=tuple(int(s) for s in doc["seq"]))
