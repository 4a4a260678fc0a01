"""Command-line interface.

Exit codes: 0 on success, 2 for unreadable or malformed input, 3 when a
construction exceeds its size budget.
"""

from __future__ import annotations

import argparse
import csv
import sys

from .automaton import AutomatonError, CostParityAutomaton, TrivialVerdict, UltimatelyPeriodicWord, accepts_up
from .families import FAMILIES
from .games import DEFAULT_BUFFER_BUDGET, ResourceError, build_fixed_lookahead_game
from .io import ParseError, load_automaton, parse_word, save_automaton
from .rfunctions import theoretical_bounds
from .solver import cost_parity_winner, optimal_uniform_cost, solve_exists
from .streett import StreettCostAutomaton, accepts_up_streett

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_RESOURCE = 3

# exact integers beyond this many bits print as M*2^E (M odd); decimal
# conversion of the closed-form cost bound alone would take hours
DECIMAL_BITS = 4096

if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)


def format_big(x: int) -> str:
    if x.bit_length() <= DECIMAL_BITS:
        return str(x)
    e = (x & -x).bit_length() - 1
    m = x >> e
    if e == 0:
        return str(x)
    return f"2^{e}" if m == 1 else f"{m}*2^{e}"


class _InputError(Exception):
    pass


def _load(path, parity_only=True):
    try:
        A = load_automaton(path)
    except OSError as exc:
        raise _InputError(f"cannot read {path}: {exc.strerror}") from None
    except (ParseError, AutomatonError) as exc:
        raise _InputError(str(exc)) from None
    if parity_only and isinstance(A, StreettCostAutomaton):
        raise _InputError("games are only supported for parity automata with costs (cpa v1)")
    return A


def _trivial(verdict: TrivialVerdict, out):
    print(f"verdict={verdict.kind}", file=out)
    print(f"winner={'O' if verdict.kind == 'universal' else 'I'}", file=out)


def cmd_generate(args, out):
    gen = FAMILIES[args.family]
    if args.family == "infguess":
        A = gen()
    else:
        if args.n is None:
            raise _InputError(f"--n is required for {args.family}")
        try:
            A = gen(args.n)
        except AutomatonError as exc:
            raise _InputError(str(exc)) from None
    save_automaton(A, args.output)
    print(f"wrote {A.name} with {A.n_states} states to {args.output}", file=out)


def cmd_solve(args, out):
    A = _load(args.automaton)
    if isinstance(A, TrivialVerdict):
        _trivial(A, out)
        return
    G = build_fixed_lookahead_game(A, args.lookahead, budget=args.budget)
    print(f"winner={cost_parity_winner(G)}", file=out)
    if args.bound is not None:
        within = cost_parity_winner(G, args.bound) == "O"
        print(f"bound={args.bound} within_bound={'true' if within else 'false'}", file=out)


def cmd_optimal(args, out):
    A = _load(args.automaton)
    if isinstance(A, TrivialVerdict):
        _trivial(A, out)
        if A.kind == "universal":
            print("optimal_cost=0", file=out)
        return
    G = build_fixed_lookahead_game(A, args.lookahead, budget=args.budget)
    b = optimal_uniform_cost(G)
    if b is None:
        print("winner=I", file=out)
    else:
        print("winner=O", file=out)
        print(f"optimal_cost={b}", file=out)


def cmd_exists(args, out):
    A = _load(args.automaton)
    if isinstance(A, TrivialVerdict):
        _trivial(A, out)
        return
    res = solve_exists(A, budget=args.budget)
    print(f"winner={res.winner}", file=out)
    print(f"classes={res.classes} arena_vertices={res.arena_vertices}", file=out)
    print(f"lookahead_bound={format_big(res.lookahead_bound)}", file=out)


def tradeoff_rows(A: CostParityAutomaton, max_lookahead: int, budget=DEFAULT_BUFFER_BUDGET):
    rows = []
    for k in range(max_lookahead + 1):
        b = optimal_uniform_cost(build_fixed_lookahead_game(A, k, budget=budget))
        rows.append((k, "I" if b is None else "O", "" if b is None else b))
    return rows


def cmd_tradeoff(args, out):
    A = _load(args.automaton)
    if isinstance(A, TrivialVerdict):
        _trivial(A, out)
        return
    rows = tradeoff_rows(A, args.max_lookahead, args.budget)
    header = ("lookahead", "winner", "optimal_cost")
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    print(",".join(header), file=out)
    for r in rows:
        print(",".join(map(str, r)), file=out)


def cmd_check_word(args, out):
    A = _load(args.automaton, parity_only=False)
    if isinstance(A, TrivialVerdict):
        A = A.automaton
    try:
        word = UltimatelyPeriodicWord(parse_word(args.prefix), parse_word(args.period))
        if isinstance(A, StreettCostAutomaton):
            ok, cost = accepts_up_streett(A, word)
        else:
            ok, cost = accepts_up(A, word)
    except (ParseError, AutomatonError) as exc:
        raise _InputError(str(exc)) from None
    cost_s = "inf" if cost == float("inf") else str(int(cost))
    print(f"accept={'true' if ok else 'false'} cost={cost_s}", file=out)


def cmd_bounds(args, out):
    A = _load(args.automaton)
    if isinstance(A, TrivialVerdict):
        _trivial(A, out)
        return
    lookahead, cost = theoretical_bounds(A)
    print(f"lookahead_bound={format_big(lookahead)}", file=out)
    print(f"cost_bound={format_big(cost)}", file=out)


def build_parser():
    p = argparse.ArgumentParser(prog="delaycost", description="Delay games with parity-with-costs winning conditions.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write an automaton of a built-in family")
    g.add_argument("family", choices=sorted(FAMILIES))
    g.add_argument("--n", type=int)
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_generate)

    def with_automaton(sp):
        sp.add_argument("--automaton", required=True)
        return sp

    def with_budget(sp, default):
        sp.add_argument("--budget", type=int, default=default, help="size budget for the arena")
        return sp

    s = with_budget(with_automaton(sub.add_parser("solve", help="winner with constant lookahead")), DEFAULT_BUFFER_BUDGET)
    s.add_argument("--lookahead", type=int, required=True)
    s.add_argument("--bound", type=int)
    s.set_defaults(func=cmd_solve)

    o = with_budget(with_automaton(sub.add_parser("optimal-cost", help="least uniform cost with constant lookahead")),
                    DEFAULT_BUFFER_BUDGET)
    o.add_argument("--lookahead", type=int, required=True)
    o.set_defaults(func=cmd_optimal)

    e = with_budget(with_automaton(sub.add_parser("exists", help="winner for some lookahead")), None)
    e.set_defaults(func=cmd_exists)

    t = with_budget(with_automaton(sub.add_parser("tradeoff", help="optimal cost for lookahead 0..K")),
                    DEFAULT_BUFFER_BUDGET)
    t.add_argument("--max-lookahead", type=int, required=True)
    t.add_argument("--csv")
    t.set_defaults(func=cmd_tradeoff)

    c = with_automaton(sub.add_parser("check-word", help="acceptance of u v^omega (pairs written a/b)"))
    c.add_argument("--prefix", default="")
    c.add_argument("--period", required=True)
    c.set_defaults(func=cmd_check_word)

    b = with_automaton(sub.add_parser("bounds", help="closed-form lookahead and cost bounds"))
    b.set_defaults(func=cmd_bounds)
    return p


def run_cli(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if getattr(args, "lookahead", 0) is not None and getattr(args, "lookahead", 0) < 0:
        print("error: lookahead must be non-negative", file=sys.stderr)
        return EXIT_INPUT
    try:
        args.func(args, out)
    except _InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    return EXIT_OK


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
