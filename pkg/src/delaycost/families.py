"""Automaton families with known delay-game behaviour.

All families except :func:`gen_infinity_guess` are finitary Büchi automata:
colors 1 and 2 only, every transition an increment.
"""

from __future__ import annotations

from itertools import product

from .automaton import AutomatonError, CostParityAutomaton

SHARP = "#"


class _Builder:
    def __init__(self, in_alphabet, out_alphabet):
        self.in_alphabet = tuple(in_alphabet)
        self.out_alphabet = tuple(out_alphabet)
        self.colors = []
        self.names = []
        self.delta = {}

    def state(self, color, name=""):
        self.colors.append(color)
        self.names.append(name)
        return len(self.colors) - 1

    def edge(self, q, a, b, target, inc=True, overwrite=False):
        key = (q, a, b)
        if key in self.delta and not overwrite:
            return
        self.delta[key] = (target, inc)

    def fill(self, q, target, inc=True):
        """Route every still undefined letter pair at ``q`` to ``target``."""
        for a, b in product(self.in_alphabet, self.out_alphabet):
            self.edge(q, a, b, target, inc)

    def build(self, initial, name):
        return CostParityAutomaton(self.in_alphabet, self.out_alphabet, self.colors, initial, self.delta, name=name)


def _bad_pair_states(B: _Builder, n: int, single_round: bool):
    letters = [str(j) for j in range(1, n + 1)]
    init = B.state(1, "init")
    final = B.state(2, "final")
    gadgets = {j: (B.state(1, f"l{j}"), B.state(1, f"r{j}")) for j in range(1, n + 1)}
    acc = B.state(2, "acc_sink")
    rej = B.state(1, "rej_sink")

    for x in letters:
        for j in range(1, n + 1):
            B.edge(init, x, str(j), gadgets[j][0])
    for j, (l, r) in gadgets.items():
        for x in letters:
            for y in letters:
                xi = int(x)
                if xi == j:
                    B.edge(l, x, y, r)
                    B.edge(r, x, y, r)
                elif xi < j:
                    B.edge(l, x, y, l)
                    B.edge(r, x, y, r)
                else:
                    B.edge(l, x, y, l)
                    B.edge(r, x, y, l)
        B.edge(r, str(j), SHARP, final)
    for x in letters:
        for y in letters:
            B.edge(final, x, y, final)
    if single_round:
        B.fill(final, final)
    else:
        for y in letters:
            B.edge(final, SHARP, y, init)
        # a restart answered by '#' would let O escape every later round
        B.edge(final, SHARP, SHARP, rej)
    for q in [init] + [s for pair in gadgets.values() for s in pair]:
        for y in B.out_alphabet:
            B.edge(q, SHARP, y, acc)
        for x in letters:
            B.edge(q, x, SHARP, rej)
    B.fill(final, rej)
    B.fill(acc, acc)
    B.fill(rej, rej)
    return init


def gen_bad_pair(n: int) -> CostParityAutomaton:
    """Bad j-pair automaton with ``2n + 4`` states over ``{1..n, #}^2``.

    Player O announces ``j`` with her first letter and has to close a bad
    j-pair (two ``j`` with no larger letter in between) by answering the
    second ``j`` with ``#``.
    """
    if n <= 1:
        raise AutomatonError("bad-pair automaton needs n > 1")
    alphabet = [str(j) for j in range(1, n + 1)] + [SHARP]
    B = _Builder(alphabet, alphabet)
    init = _bad_pair_states(B, n, single_round=False)
    return B.build(init, f"badpair({n})")


def gen_tradeoff_basic(n: int) -> CostParityAutomaton:
    """Hub automaton over ``{0,1}^2`` with ``n + 2`` states.

    At the hub Player O guesses the next input letter; a wrong guess sends
    the run through a path of ``n - 1`` extra transitions.
    """
    if n <= 0:
        raise AutomatonError("tradeoff-basic needs n > 0")
    B = _Builder("01", "01")
    hub = B.state(2, "hub")
    guess = {"0": B.state(1, "guess0"), "1": B.state(1, "guess1")}
    path = [B.state(1, f"path{i}") for i in range(n - 1)]
    entry = path[0] if path else hub
    for a in "01":
        for b in "01":
            B.edge(hub, a, b, guess[b])
            for g, q in guess.items():
                B.edge(q, a, b, hub if a == g else entry)
            for i, q in enumerate(path):
                B.edge(q, a, b, path[i + 1] if i + 1 < len(path) else hub)
    return B.build(hub, f"tradeoff-basic({n})")


def gen_tradeoff_exp(n: int) -> CostParityAutomaton:
    """Player O's first letter picks between a cost-``n`` cycle and a one-shot bad-pair game.

    Output ``#`` in the first round enters the cycle; any other output enters
    the bad-pair component, which is won with cost 0 exactly when the
    lookahead is at least ``2^n``.
    """
    if n <= 1:
        raise AutomatonError("tradeoff-exp needs n > 1")
    alphabet = [str(j) for j in range(1, n + 1)] + [SHARP]
    B = _Builder(alphabet, alphabet)
    start = B.state(2, "start")
    init = _bad_pair_states(B, n, single_round=True)
    cycle = [B.state(2, "cycle0")] + [B.state(1, f"cycle{i}") for i in range(1, n + 1)]
    for i, q in enumerate(cycle):
        B.fill(q, cycle[(i + 1) % len(cycle)])
    for a in alphabet:
        B.edge(start, a, SHARP, cycle[1])
    B.fill(start, init)
    return B.build(start, f"tradeoff-exp({n})")


def gen_tradeoff_gradual(n: int) -> CostParityAutomaton:
    """Gradual lookahead/cost tradeoff automaton with ``n^2 + 3n + 3`` states.

    Output letters are pairs ``(j, b)``, written ``"j:b"``: at the hub Player O
    predicts that the input ``j`` positions ahead is ``b``.  A correct
    prediction returns to the hub with cost ``2(n+1) - j``.  Wrong predictions
    for ``j >= 2`` lead to a rejecting sink, a wrong ``j = 1`` prediction costs
    ``2(n+1)``.
    """
    if n <= 0:
        raise AutomatonError("tradeoff-gradual needs n > 0")
    outs = [f"{j}:{b}" for j in range(1, n + 1) for b in "01"]
    B = _Builder("01", outs)
    hub = B.state(2, "hub")
    sink = B.state(1, "sink")
    B.fill(sink, sink)

    # chain: wrong -> E1 -(2)-> E2 ... -(2)-> En -(2)-> hub
    def path(src, dst, length, tag):
        q = src
        for i in range(length - 1):
            nxt = B.state(1, f"{tag}.{i}")
            B.fill(q, nxt)
            q = nxt
        B.fill(q, dst)

    entries = {j: B.state(1, f"E{j}") for j in range(1, n + 1)}
    wrong = B.state(1, "W")
    path(wrong, entries[1], 1, "W")
    for j in range(1, n):
        path(entries[j], entries[j + 1], 2, f"E{j}")
    path(entries[n], hub, 2, f"E{n}")

    for j in range(1, n + 1):
        for b in "01":
            branch = [B.state(1, f"P{j}{b}.{i}") for i in range(j)]
            for a in "01":
                B.edge(hub, a, f"{j}:{b}", branch[0])
            for i in range(j - 1):
                B.fill(branch[i], branch[i + 1])
            check = branch[-1]
            for a in "01":
                if a == b:
                    target = entries[j]
                else:
                    target = wrong if j == 1 else sink
                for y in outs:
                    B.edge(check, a, y, target)
    return B.build(hub, f"tradeoff-gradual({n})")


def gen_infinity_guess() -> CostParityAutomaton:
    """Player O's first output claims whether the input has infinitely many 1s.

    Output ``1`` claims infinitely many, ``0`` claims finitely many.  All
    transitions are epsilon, so acceptance is the plain parity condition.
    """
    B = _Builder("01", "01")
    start = B.state(2, "start")
    inf_seen0 = B.state(1, "inf.last0")
    inf_seen1 = B.state(2, "inf.last1")
    fin_seen0 = B.state(2, "fin.last0")
    fin_seen1 = B.state(3, "fin.last1")
    claim = {"1": (inf_seen0, inf_seen1), "0": (fin_seen0, fin_seen1)}
    for a in "01":
        for b in "01":
            B.edge(start, a, b, claim[b][int(a)], inc=False)
            for last0, last1 in claim.values():
                B.edge(last0, a, b, last1 if a == "1" else last0, inc=False)
                B.edge(last1, a, b, last1 if a == "1" else last0, inc=False)
    return B.build(start, "infinity-guess")


def bad_pair_free_word(n: int) -> list:
    """The word ``w_n`` over ``{1..n}`` of length ``2^n - 1`` without bad pairs."""
    if n < 1:
        raise ValueError("n must be positive")
    w = [1]
    for j in range(2, n + 1):
        w = w + [j] + w
    return w


def has_bad_pair(word, j=None) -> bool:
    """Whether ``word`` contains two occurrences of some letter with no larger letter in between."""
    last = {}
    for i, x in enumerate(word):
        if x in last and (j is None or x == j):
            if all(y <= x for y in word[last[x] + 1:i]):
                return True
        last[x] = i
    return False


FAMILIES = {
    "badpair": gen_bad_pair,
    "tradeoff-basic": gen_tradeoff_basic,
    "tradeoff-exp": gen_tradeoff_exp,
    "tradeoff-gradual": gen_tradeoff_gradual,
    "infguess": lambda n=None: gen_infinity_guess(),
}
