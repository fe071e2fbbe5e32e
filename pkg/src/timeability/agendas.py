"""Timings of agendas and of symmetric choiceless games.

An (epsilon, lambda)-timing of an agenda gives random times to every player
occurrence and every separator: separator times are nonnegative and grow by
at least one, each player's own times strictly increase, player times may
stray at most lambda to the wrong side of any separator, and any two
players with the same occurrence count must have time tuples within total
variation epsilon.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Mapping, Sequence

from .dist import DiscreteDistribution, tv_distance
from .families import SEPARATOR, Agenda, SymmetricChoicelessGame
from .rational import format_rational, parse_rational


@dataclass(frozen=True)
class AgendaAtom:
    prob: Fraction
    separator_times: tuple[Fraction, ...]
    player_times: Mapping[int, tuple[Fraction, ...]]


@dataclass(frozen=True)
class AgendaTiming:
    atoms: tuple[AgendaAtom, ...]

    def check_shape(self, a: Agenda) -> None:
        total = Fraction(0)
        for atom in self.atoms:
            if atom.prob <= 0:
                raise ValueError("atom probabilities must be positive")
            total += atom.prob
            if len(atom.separator_times) != a.separator_count:
                raise ValueError("wrong number of separator times")
            for p in range(1, a.n_players + 1):
                k = a.occurrences(p)
                got = len(atom.player_times.get(p, ()))
                if got != k:
                    raise ValueError(
                        f"player {p}: {got} times for {k} occurrences")
        if total != 1:
            raise ValueError(f"atom probabilities sum to {total}, expected 1")


@dataclass(frozen=True)
class AgendaReport:
    domains_ok: bool
    separator_gaps_ok: bool
    player_increase_ok: bool
    before_ok: bool
    after_ok: bool
    first_violation: str | None
    max_tv: Fraction
    worst_pair: tuple[int, int] | None
    verdict: bool


def _positions(a: Agenda) -> tuple[list[int], dict[int, list[int]]]:
    sep_pos: list[int] = []
    player_pos: dict[int, list[int]] = {}
    for pos, s in enumerate(a.seq):
        if s == SEPARATOR:
            sep_pos.append(pos)
        else:
            player_pos.setdefault(s, []).append(pos)
    return sep_pos, player_pos


def verify_agenda_timing(a: Agenda, t: AgendaTiming, epsilon: Fraction,
                         lam: Fraction) -> AgendaReport:
    """Check the six timing requirements; 1-5 per atom, 6 across atoms."""
    t.check_shape(a)
    epsilon = Fraction(epsilon)
    lam = Fraction(lam)
    sep_pos, player_pos = _positions(a)

    domains = gaps = increase = before = after = True
    first: str | None = None

    def note(message: str):
        nonlocal first
        if first is None:
            first = message

    for atom_no, atom in enumerate(t.atoms):
        if any(x < 0 for x in atom.separator_times):
            domains = False
            note(f"atom {atom_no}: negative separator time")
        for j in range(len(atom.separator_times) - 1):
            if atom.separator_times[j] + 1 > atom.separator_times[j + 1]:
                gaps = False
                note(f"atom {atom_no}: separators {j + 1},{j + 2} closer than 1")
        for p, times in atom.player_times.items():
            for j in range(len(times) - 1):
                if not times[j] < times[j + 1]:
                    increase = False
                    note(f"atom {atom_no}: player {p} times not increasing")
        for p, occ_positions in player_pos.items():
            times = atom.player_times[p]
            for j1, pos in enumerate(occ_positions):
                for j2, sep in enumerate(sep_pos):
                    if pos < sep and not times[j1] <= atom.separator_times[j2] + lam:
                        before = False
                        note(f"atom {atom_no}: player {p} occurrence {j1 + 1} "
                             f"exceeds separator {j2 + 1} by more than lambda")
                    if pos > sep and not times[j1] >= atom.separator_times[j2] - lam:
                        after = False
                        note(f"atom {atom_no}: player {p} occurrence {j1 + 1} "
                             f"trails separator {j2 + 1} by more than lambda")

    max_tv = Fraction(0)
    worst = None
    players = sorted(player_pos)
    dists: dict[int, DiscreteDistribution] = {}
    for p in players:
        dists[p] = DiscreteDistribution.from_pairs(
            (atom.player_times[p], atom.prob) for atom in t.atoms)
    for i, p in enumerate(players):
        for q in players[i + 1:]:
            if a.occurrences(p) != a.occurrences(q):
                continue
            d = tv_distance(dists[p], dists[q])
            if d > max_tv:
                max_tv = d
                worst = (p, q)

    structural = domains and gaps and increase and before and after
    return AgendaReport(
        domains_ok=domains, separator_gaps_ok=gaps,
        player_increase_ok=increase, before_ok=before, after_ok=after,
        first_violation=first, max_tv=max_tv, worst_pair=worst,
        verdict=structural and max_tv <= epsilon)


# ---------------------------------------------------------------------------
# symmetric choiceless game timings


@dataclass(frozen=True)
class SymmetricGameTiming:
    """Atoms of (probability, rows), one row of times per numbering."""

    atoms: tuple[tuple[Fraction, Mapping[tuple[int, ...], tuple[Fraction, ...]]], ...]

    def check_shape(self, scg: SymmetricChoicelessGame) -> None:
        perms = list(permutations(range(1, scg.n_players + 1)))
        total = Fraction(0)
        for prob, rows in self.atoms:
            if prob <= 0:
                raise ValueError("atom probabilities must be positive")
            total += prob
            if set(rows) != set(perms):
                raise ValueError("rows must cover every numbering")
            for perm, times in rows.items():
                if len(times) != len(scg.seq):
                    raise ValueError("row length must match the sequence")
                for i in range(len(times) - 1):
                    if times[i] + 1 > times[i + 1]:
                        raise ValueError(
                            f"row {perm}: times must grow by at least 1")
        if total != 1:
            raise ValueError(f"atom probabilities sum to {total}, expected 1")


def symmetrize(scg: SymmetricChoicelessGame,
               t: SymmetricGameTiming, limit: int = 720) -> SymmetricGameTiming:
    """Make a timing symmetric without hurting it: replace the row used for
    every numbering by the row of one uniformly random numbering. Realized
    exactly as the n!-fold mixture; the maximum time never grows."""
    t.check_shape(scg)
    perms = list(permutations(range(1, scg.n_players + 1)))
    if len(perms) > limit:
        raise ValueError(f"{scg.n_players}! exceeds limit {limit}")
    share = Fraction(1, len(perms))
    merged: dict[tuple[Fraction, ...], Fraction] = {}
    for prob, rows in t.atoms:
        for pi in perms:
            row = tuple(rows[pi])
            merged[row] = merged.get(row, Fraction(0)) + prob * share
    atoms = tuple(
        (p, {perm: row for perm in perms})
        for row, p in sorted(merged.items()))
    return SymmetricGameTiming(atoms=atoms)


def is_symmetric(t: SymmetricGameTiming) -> bool:
    return all(len({tuple(times) for times in rows.values()}) == 1
               for _, rows in t.atoms)


def symmetric_epsilon(scg: SymmetricChoicelessGame,
                      t: SymmetricGameTiming) -> Fraction:
    """Worst-case TV between any player's first j own times under any two
    numberings (the subset criterion for symmetric choiceless games)."""
    t.check_shape(scg)
    perms = list(permutations(range(1, scg.n_players + 1)))
    own_positions: dict[tuple[tuple[int, ...], int], list[int]] = {}
    for perm in perms:
        for p in range(1, scg.n_players + 1):
            number = perm.index(p) + 1
            own_positions[(perm, p)] = [
                i for i, s in enumerate(scg.seq) if s == number]

    worst = Fraction(0)
    for p in range(1, scg.n_players + 1):
        for a_i, sigma in enumerate(perms):
            for sigma2 in perms[a_i + 1:]:
                pos1 = own_positions[(sigma, p)]
                pos2 = own_positions[(sigma2, p)]
                for j in range(1, min(len(pos1), len(pos2)) + 1):
                    d1 = DiscreteDistribution.from_pairs(
                        (tuple(rows[sigma][i] for i in pos1[:j]), prob)
                        for prob, rows in t.atoms)
                    d2 = DiscreteDistribution.from_pairs(
                        (tuple(rows[sigma2][i] for i in pos2[:j]), prob)
                        for prob, rows in t.atoms)
                    d = tv_distance(d1, d2)
                    if d > worst:
                        worst = d
    return worst


# ---------------------------------------------------------------------------
# nonnegativity shift


def shift_function(lam: Fraction):
    """The increasing bijection (-inf, lam] -> (0, lam] with f(x) >= x:
    f(x) = (lam/2)/(1-x) for x <= 0, affine from lam/2 to lam on (0, lam],
    identity above lam."""
    lam = Fraction(lam)
    if lam <= 0:
        raise ValueError("lambda must be positive")
    delta = lam / 2

    def f(x: Fraction) -> Fraction:
        x = Fraction(x)
        if x > lam:
            return x
        if x > 0:
            return delta + x * (lam - delta) / lam
        return delta / (1 - x)

    return f


def self_check_shift(lam: Fraction, points: int = 1000) -> None:
    """Grid check that the shift is increasing and dominates the identity."""
    lam = Fraction(lam)
    f = shift_function(lam)
    lo, hi = -2 * lam - 5, 2 * lam + 5
    step = (hi - lo) / points
    prev_x = prev_y = None
    for i in range(points + 1):
        x = lo + i * step
        y = f(x)
        if y < x or (x <= lam and y <= 0):
            raise AssertionError(f"shift fails f(x) >= x at {x}")
        if prev_x is not None and not y > prev_y:
            raise AssertionError(f"shift not increasing between {prev_x} and {x}")
        prev_x, prev_y = x, y


def shift_nonneg(a: Agenda, t: AgendaTiming, lam: Fraction, N: Fraction,
                 self_check: bool = False) -> AgendaTiming:
    """Move all player times into [0, N] while preserving requirements 1-5
    and leaving every same-count TV unchanged (the shift is injective)."""
    lam = Fraction(lam)
    N = Fraction(N)
    if not lam < N:
        raise ValueError("need lambda < N")
    t.check_shape(a)
    for atom in t.atoms:
        for times in (atom.separator_times, *atom.player_times.values()):
            if any(x > N for x in times):
                raise ValueError(f"a time exceeds N = {N}")
    f = shift_function(lam)
    if self_check:
        self_check_shift(lam)
    atoms = tuple(
        AgendaAtom(
            prob=atom.prob,
            separator_times=atom.separator_times,
            player_times={
                p: tuple(f(x) for x in times)
                for p, times in atom.player_times.items()
            })
        for atom in t.atoms)
    return AgendaTiming(atoms=atoms)


# ---------------------------------------------------------------------------
# gap growth classifier


@dataclass(frozen=True)
class GapVerdict:
    case: str  # "increasing" | "decreasing" | "neither"
    growth_certified: bool
    failing_window: int | None


def classify_gaps(xs: Sequence[Fraction], c: Fraction) -> GapVerdict:
    """Window test on a strictly increasing sequence: every window of four
    either sees its gaps explode (case increasing) or collapse (case
    decreasing), and whichever case holds comes with a certified growth
    rate of c - 1/c - 1 relative to the running span. Mixed windows or
    arithmetic-progression windows yield "neither"."""
    xs = [Fraction(x) for x in xs]
    c = Fraction(c)
    if c <= 2:
        raise ValueError("c must exceed 2")
    if len(xs) < 4:
        raise ValueError("need at least 4 points")
    if any(not xs[i] < xs[i + 1] for i in range(len(xs) - 1)):
        raise ValueError("sequence must be strictly increasing")

    def cond1(i: int) -> bool:
        return (xs[i + 2] < ((c - 1) * xs[i] + xs[i + 3]) / c
                and xs[i + 1] < ((c - 1) * xs[i] + xs[i + 2]) / c)

    def cond2(i: int) -> bool:
        return (xs[i + 1] > (xs[i] + (c - 1) * xs[i + 3]) / c
                and xs[i + 2] > (xs[i + 1] + (c - 1) * xs[i + 3]) / c)

    windows = range(len(xs) - 3)
    all1 = all2 = True
    failing = None
    for i in windows:
        c1, c2 = cond1(i), cond2(i)
        if not c1:
            all1 = False
        if not c2:
            all2 = False
        if not c1 and not c2 and failing is None:
            failing = i
    if not all1 and not all2:
        return GapVerdict(case="neither", growth_certified=False,
                          failing_window=failing if failing is not None else 0)

    rate = c - Fraction(1) / c - 1
    n = len(xs)
    if all1:
        certified = all(
            xs[i + 1] - xs[i] >= rate * (xs[i] - xs[0])
            for i in range(1, n - 1))
        return GapVerdict(case="increasing", growth_certified=certified,
                          failing_window=None)
    certified = all(
        xs[i] - xs[i - 1] >= rate * (xs[n - 1] - xs[i])
        for i in range(1, n - 1))
    return GapVerdict(case="decreasing", growth_certified=certified,
                      failing_window=None)


# ---------------------------------------------------------------------------
# documents


def agenda_timing_to_document(t: AgendaTiming) -> dict:
    return {"atoms": [
        {"prob": format_rational(atom.prob),
         "sep_times": [format_rational(x) for x in atom.separator_times],
         "player_times": {str(p): [format_rational(x) for x in times]
                          for p, times in sorted(atom.player_times.items())}}
        for atom in t.atoms]}


def agenda_timing_from_document(doc) -> AgendaTiming:
    atoms = []
    for rec in doc["atoms"]:
        atoms.append(AgendaAtom(
            prob=parse_rational(rec["prob"]),
            separator_times=tuple(parse_rational(x) for x in rec["sep_times"]),
            player_times={int(p): tuple(parse_rational(x) for x in times)
                          for p, times in rec["player_times"].items()}))
    return AgendaTiming(atoms=tuple(atoms))


def symmetric_timing_to_document(t: SymmetricGameTiming) -> dict:
    return {"atoms": [
        {"prob": format_rational(prob),
         "rows": {",".join(map(str, perm)): [format_rational(x) for x in times]
                  for perm, times in sorted(rows.items())}}
        for prob, rows in t.atoms]}


def symmetric_timing_from_document(doc) -> SymmetricGameTiming:
    atoms = []
    for rec in doc["atoms"]:
        rows = {tuple(int(x) for x in perm.split(",")):
                tuple(parse_rational(x) for x in times)
                for perm, times in rec["rows"].items()}
        atoms.append((parse_rational(rec["prob"]), rows))
    return SymmetricGameTiming(atoms=tuple(atoms))
