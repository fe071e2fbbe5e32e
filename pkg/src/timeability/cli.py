"""Command-line front end: files in, documents and verdicts out.

Exit codes: 0 success or affirmative verdict, 1 well-formed negative
verdict (not exactly timeable, epsilon not reached, a failed check),
2 usage or format errors. All numeric output is lowest-terms exact
rationals, and output is byte-identical across runs for identical inputs
and seed.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from . import augmented, exact, families, randomized
from .agendas import (agenda_timing_from_document, agenda_timing_to_document,
                      symmetric_timing_from_document,
                      symmetric_timing_to_document, symmetrize,
                      verify_agenda_timing)
from .dist import (BudgetError, DEFAULT_BUDGET, distribution_from_document,
                   tv_distance)
from .exact import (contract_infosets, exact_deterministic_timing, find_cycle,
                    layout_to_dot, timing_to_document)
from .game import Game, GameFormatError, game_to_document, parse_game
from .perception import (construct_lu_timing, parse_clock_bound,
                         perceived_timing_from_document,
                         perceived_timing_to_document, verify_lu_timing)
from .randomized import (indist_base, indist_recursive,
                         randomized_timing_from_document,
                         randomized_timing_to_document,
                         subset_indistinguishability, timing_from_chain,
                         verify_epsilon_timing)
from .rational import format_rational, parse_rational


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _load_json(path: str):
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise GameFormatError(exc.msg, line=exc.lineno, column=exc.colno)


def _load_game(path: str) -> Game:
    return parse_game(_read(path))


def _emit(document, out: str | None) -> None:
    text = json.dumps(document, indent=2) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _print_cycle(cycle: list[str]) -> None:
    closed = cycle + [cycle[0]]
    print("not exactly timeable")
    print("cycle: " + " -> ".join(closed))


def _cmd_check(args) -> int:
    g = _load_game(args.game)
    cycle = find_cycle(contract_infosets(g))
    if cycle is not None:
        _print_cycle(cycle)
        return 1
    print("exactly timeable")
    if args.dot:
        timing = exact_deterministic_timing(g)
        with open(args.dot, "w", encoding="utf-8") as handle:
            handle.write(layout_to_dot(g, timing))
    return 0


def _cmd_exact_time(args) -> int:
    g = _load_game(args.game)
    timing = exact_deterministic_timing(g)
    if timing is None:
        _print_cycle(find_cycle(contract_infosets(g)))
        return 1
    _emit(timing_to_document(timing), args.output)
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as handle:
            handle.write(layout_to_dot(g, timing))
    return 0


def _cmd_eps_time(args) -> int:
    g = _load_game(args.game)
    epsilon = parse_rational(args.epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    depth = g.max_history_nodes()
    need = max(2, depth - 1)
    if need == 2:
        window = int(1 / epsilon) + 2
        chain = indist_base(window, 1)
    else:
        chain = indist_base(9, 1)
        for _ in range(need - 2):
            chain = indist_recursive(chain, args.start_window,
                                     budget=args.budget)
    achieved_subsets = subset_indistinguishability(chain)
    rt = timing_from_chain(g, chain, budget=args.budget)
    report = verify_epsilon_timing(g, rt, budget=args.budget)
    _emit(randomized_timing_to_document(g, rt), args.output)
    print(f"achieved: {format_rational(report.achieved)}")
    if report.achieved >= epsilon:
        print(f"requested epsilon {format_rational(epsilon)} not reached "
              f"(subset indistinguishability {format_rational(achieved_subsets)})")
        return 1
    return 0


def _cmd_verify_timing(args) -> int:
    g = _load_game(args.game)
    rt = randomized_timing_from_document(_load_json(args.timing), g)
    if args.samples:
        atoms = rt.atoms
        weights = [float(p) for p, _ in atoms]

        def sampler(rng: random.Random):
            return rng.choices(atoms, weights=weights)[0][1]

        report = randomized.estimate_epsilon_timing(
            g, sampler, seed=args.seed, samples=args.samples)
        print(f"estimate: {format_rational(report.estimate)}")
        print(f"std-error: {report.std_error:.6g}")
        achieved = report.estimate
    else:
        rt.validate_against(g)
        report = verify_epsilon_timing(g, rt, budget=args.budget)
        print(f"achieved: {format_rational(report.achieved)}")
        if report.worst_pair:
            infoset, v, w = report.worst_pair
            print(f"worst pair: infoset {infoset} nodes {v},{w}")
        achieved = report.achieved
    if args.epsilon is not None:
        epsilon = parse_rational(args.epsilon)
        return 0 if achieved < epsilon else 1
    return 0


def _cmd_tv(args) -> int:
    a = distribution_from_document(_load_json(args.a))
    b = distribution_from_document(_load_json(args.b))
    print(format_rational(tv_distance(a, b)))
    return 0


def _cmd_augment(args) -> int:
    g = _load_game(args.game)
    rt = randomized_timing_from_document(_load_json(args.timing), g)
    ag = augmented.augment(g, rt, budget=args.budget)
    _emit({
        "game": game_to_document(ag.game),
        "origin": {
            "nodes": {str(v): list(pair) for v, pair in
                      sorted(ag.node_origin.items())},
            "infosets": {new: [orig, [format_rational(t) for t in times]]
                         for new, (orig, times) in
                         sorted(ag.infoset_origin.items())},
        },
    }, args.output)
    return 0


def _cmd_advantage(args) -> int:
    g = _load_game(args.game)
    rt = randomized_timing_from_document(_load_json(args.timing), g)
    player = args.player
    others = set(range(1, len(g.players) + 1)) - {player}
    if args.profile:
        doc = _load_json(args.profile)
        profile = {infoset: tuple(parse_rational(x) for x in probs)
                   for infoset, probs in doc.items()}
    else:
        profile = augmented.uniform_profile(g, others)
    report = augmented.timing_advantage(g, rt, player, profile,
                                        budget=args.budget)
    print(f"base value: {format_rational(report.base_value)}")
    print(f"timed value: {format_rational(report.timed_value)}")
    print(f"gain: {format_rational(report.gain)}")
    print(f"achieved epsilon: {format_rational(report.achieved_epsilon)}")
    print(f"bound: {format_rational(report.bound)} "
          f"({report.max_own_nodes} x achieved)")
    return 0


def _cmd_family(args) -> int:
    kind = args.kind
    if kind in ("fig1a", "fig1b", "fig1c"):
        g = families.figure1(kind[-1])
        _emit(game_to_document(g), args.output)
        return 0
    if kind == "guessing":
        g = augmented.guessing_game(args.m, args.k)
        _emit(game_to_document(g), args.output)
        return 0
    if kind == "agenda-ar":
        a = families.agenda_Ar(args.r)
        print(families.agenda_display(a))
        if args.output:
            _emit(families.agenda_to_document(a), args.output)
        return 0
    if kind == "gamma-r":
        scg = families.gamma_r(args.r)
        _emit(families.choiceless_to_document(scg), args.output)
        return 0
    if kind == "perception":
        a = families.perception_game(args.c)
        print(families.format_agenda(a))
        if args.output:
            _emit(families.agenda_to_document(a), args.output)
        return 0
    if kind == "expand":
        scg = families.choiceless_from_document(_load_json(args.choiceless))
        g = families.expand_choiceless(scg, limit=args.limit)
        _emit(game_to_document(g), args.output)
        return 0
    raise ValueError(f"unknown family kind {kind!r}")


def _cmd_verify_agenda(args) -> int:
    a = families.agenda_from_document(_load_json(args.agenda))
    t = agenda_timing_from_document(_load_json(args.timing))
    report = verify_agenda_timing(a, t, parse_rational(args.epsilon),
                                  parse_rational(args.lam))
    print(f"requirements 1-5: "
          f"{'ok' if report.first_violation is None else report.first_violation}")
    print(f"max tv: {format_rational(report.max_tv)}")
    if report.worst_pair:
        print(f"worst pair: players {report.worst_pair[0]},{report.worst_pair[1]}")
    print(f"verdict: {'ok' if report.verdict else 'fail'}")
    return 0 if report.verdict else 1


def _cmd_symmetrize(args) -> int:
    scg = families.choiceless_from_document(_load_json(args.choiceless))
    t = symmetric_timing_from_document(_load_json(args.timing))
    out = symmetrize(scg, t, limit=args.limit)
    _emit(symmetric_timing_to_document(out), args.output)
    return 0


def _cmd_lu_time(args) -> int:
    g = _load_game(args.game)
    lower = parse_clock_bound(args.lower)
    upper = parse_clock_bound(args.upper)
    try:
        pt = construct_lu_timing(g, lower, upper)
    except ValueError as exc:
        if "rejected" in str(exc):
            print(str(exc))
            return 1
        raise
    _emit(perceived_timing_to_document(pt), args.output)
    return 0


def _cmd_verify_lu(args) -> int:
    g = _load_game(args.game)
    pt = perceived_timing_from_document(_load_json(args.timing))
    lower = parse_clock_bound(args.lower)
    upper = parse_clock_bound(args.upper)
    report = verify_lu_timing(g, pt, lower, upper)
    print(f"structural: {'ok' if report.structural_ok else report.violation}")
    print(f"achieved: {format_rational(report.achieved)}")
    ok = report.structural_ok
    if args.epsilon is not None:
        ok = ok and report.achieved < parse_rational(args.epsilon)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="timeability",
        description="decide, verify and construct timings of extensive-form games")
    parser.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                        help="cap on exact enumeration sizes")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="is the game exactly timeable?")
    p.add_argument("game")
    p.add_argument("--dot", help="write a layered drawing (DOT) here")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("exact-time", help="emit an exact deterministic timing")
    p.add_argument("game")
    p.add_argument("-o", "--output")
    p.add_argument("--dot")
    p.set_defaults(func=_cmd_exact_time)

    p = sub.add_parser("eps-time", help="construct an approximate timing")
    p.add_argument("game")
    p.add_argument("--epsilon", required=True)
    p.add_argument("--start-window", type=int, default=64,
                   help="uniform start window for the recursive chain")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_eps_time)

    p = sub.add_parser("verify-timing", help="achieved epsilon of a timing")
    p.add_argument("game")
    p.add_argument("timing")
    p.add_argument("--epsilon")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_verify_timing)

    p = sub.add_parser("tv", help="total variation distance of two distributions")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=_cmd_tv)

    p = sub.add_parser("augment", help="build the timing-augmented game")
    p.add_argument("game")
    p.add_argument("timing")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_augment)

    p = sub.add_parser("advantage", help="value of timing information")
    p.add_argument("game")
    p.add_argument("timing")
    p.add_argument("--player", type=int, required=True)
    p.add_argument("--profile", help="behavior profile document for the others")
    p.set_defaults(func=_cmd_advantage)

    p = sub.add_parser("family", help="generate a named game or agenda")
    p.add_argument("--kind", required=True,
                   choices=["fig1a", "fig1b", "fig1c", "guessing",
                            "agenda-ar", "gamma-r", "perception", "expand"])
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--c", type=int, default=1)
    p.add_argument("--choiceless", help="choiceless-game document to expand")
    p.add_argument("--limit", type=int, default=720)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_family)

    p = sub.add_parser("verify-agenda", help="check an agenda timing")
    p.add_argument("agenda")
    p.add_argument("timing")
    p.add_argument("--epsilon", required=True)
    p.add_argument("--lam", required=True)
    p.set_defaults(func=_cmd_verify_agenda)

    p = sub.add_parser("symmetrize", help="symmetrize a choiceless-game timing")
    p.add_argument("choiceless")
    p.add_argument("timing")
    p.add_argument("--limit", type=int, default=720)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_symmetrize)

    p = sub.add_parser("lu-time", help="explicit exact clock-bounded timing")
    p.add_argument("game")
    p.add_argument("--lower", required=True, help="e.g. scale:1/2")
    p.add_argument("--upper", required=True, help="e.g. powmax:2")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_lu_time)

    p = sub.add_parser("verify-lu", help="check a clock-bounded timing")
    p.add_argument("game")
    p.add_argument("timing")
    p.add_argument("--lower", required=True)
    p.add_argument("--upper", required=True)
    p.add_argument("--epsilon")
    p.set_defaults(func=_cmd_verify_lu)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GameFormatError, BudgetError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
