"""Streett automata with costs: per-pair cost-of-response, run types, acceptance.

A Streett pair ``(Q_j, P_j)`` has requests ``Q_j`` answered by visits to
``P_j``; every transition carries one cost flag per pair.  A request is
answered by any position at or after it, so a state in ``Q_j`` and ``P_j``
answers itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

from .automaton import INF, AutomatonError, CostParityAutomaton, Run, Step, UltimatelyPeriodicWord

BOT, P, Q, PQ = None, "p", "q", "pq"


@dataclass(frozen=True)
class StreettCostAutomaton:
    """Deterministic, complete Streett automaton with one cost function per pair.

    ``delta`` maps ``(q, a, b)`` to ``(q', flags)`` where ``flags[j]`` is true
    for an increment with respect to pair ``j``.
    """

    in_alphabet: tuple
    out_alphabet: tuple
    n_states: int
    initial: int
    pairs: tuple
    delta: dict = field(compare=False)
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "in_alphabet", tuple(self.in_alphabet))
        object.__setattr__(self, "out_alphabet", tuple(self.out_alphabet))
        n = int(self.n_states)
        if n <= 0:
            raise AutomatonError("automaton needs at least one state")
        if not 0 <= self.initial < n:
            raise AutomatonError(f"initial state {self.initial} is not a state")
        pairs = tuple((frozenset(Qj), frozenset(Pj)) for Qj, Pj in self.pairs)
        for Qj, Pj in pairs:
            if any(not 0 <= q < n for q in Qj | Pj):
                raise AutomatonError("Streett pair mentions an unknown state")
        object.__setattr__(self, "pairs", pairs)
        table = {}
        J = len(pairs)
        for q in range(n):
            for a in self.in_alphabet:
                for b in self.out_alphabet:
                    try:
                        target, flags = self.delta[(q, a, b)]
                    except KeyError:
                        raise AutomatonError(f"missing transition for {(q, a, b)!r}") from None
                    flags = tuple(bool(f) for f in flags)
                    if len(flags) != J:
                        raise AutomatonError(f"transition {(q, a, b)!r} needs {J} cost flags")
                    if not 0 <= target < n:
                        raise AutomatonError(f"transition {(q, a, b)!r} targets unknown state {target}")
                    table[(q, a, b)] = (int(target), flags)
        if len(table) != len(self.delta):
            raise AutomatonError("transitions over unknown states or letters")
        object.__setattr__(self, "delta", table)

    def __eq__(self, other):
        if not isinstance(other, StreettCostAutomaton):
            return NotImplemented
        return (self.in_alphabet, self.out_alphabet, self.n_states, self.initial, self.pairs, self.delta) == (
            other.in_alphabet, other.out_alphabet, other.n_states, other.initial, other.pairs, other.delta)

    __hash__ = object.__hash__

    @property
    def states(self):
        return range(self.n_states)

    @property
    def n_pairs(self) -> int:
        return len(self.pairs)

    @property
    def size(self) -> int:
        return self.n_states + len(self.pairs)

    def step(self, q, letter):
        a, b = letter
        try:
            return self.delta[(q, a, b)]
        except KeyError:
            raise AutomatonError(f"letter {letter!r} not in the alphabet") from None


class StreettRunType(NamedTuple):
    start: int
    end: int
    g: tuple    # per pair: None, "p", "q" or "pq"
    inc: tuple  # per pair: increment seen


def run_on_streett(A: StreettCostAutomaton, start: int, word) -> Run:
    steps = []
    q = start
    for letter in word:
        letter = tuple(letter)
        q2, flags = A.step(q, letter)
        steps.append(Step(q, letter, q2, flags, None))
        q = q2
    return Run(start, tuple(steps))


def lasso_streett(A: StreettCostAutomaton, word: UltimatelyPeriodicWord) -> tuple:
    prefix = list(run_on_streett(A, A.initial, word.prefix).steps)
    q = prefix[-1].target if prefix else A.initial
    seen, blocks = {}, []
    while q not in seen:
        seen[q] = len(blocks)
        block = run_on_streett(A, q, word.period)
        blocks.append(block.steps)
        q = block.end
    first = seen[q]
    for block in blocks[:first]:
        prefix.extend(block)
    cycle = [s for block in blocks[first:] for s in block]
    return Run(A.initial, tuple(prefix)), Run(q, tuple(cycle))


def _cycle_cost(states, flags, i, j, Pj):
    """Pair-``j`` cost from cycle position ``i`` to the first response at or after it."""
    length = len(states)
    cost = 0
    for d in range(length + 1):
        pos = (i + d) % length
        if states[pos] in Pj:
            return cost
        if flags[pos][j]:
            cost += 1
    return INF


def stcor(A: StreettCostAutomaton, prefix: Run, cycle: Run, n: int, j: int):
    """Cost-of-response of pair ``j`` at position ``n`` of ``prefix . cycle^omega``."""
    if n < 0:
        raise AutomatonError("position must be non-negative")
    if not cycle.steps or cycle.start != cycle.end or cycle.start != prefix.end:
        raise AutomatonError("cycle must be a non-empty loop starting where the prefix ends")
    Qj, Pj = A.pairs[j]
    # unroll enough of the run that every answer, if any, is inside the window
    reps = (n // len(cycle)) + 3
    states = prefix.states + [s.target for _ in range(reps) for s in cycle.steps]
    flags = [s.inc for s in prefix.steps] + [s.inc for _ in range(reps) for s in cycle.steps]
    if states[n] not in Qj:
        return 0
    cost = 0
    for m in range(n, len(flags)):
        if states[m] in Pj:
            return cost
        if flags[m][j]:
            cost += 1
    return INF


def stcor_agg(A: StreettCostAutomaton, prefix: Run, cycle: Run, n: int):
    """Maximum of the per-pair costs-of-response at position ``n``."""
    return max((stcor(A, prefix, cycle, n, j) for j in range(A.n_pairs)), default=0)


def accepts_up_streett(A: StreettCostAutomaton, word: UltimatelyPeriodicWord) -> tuple:
    """Return ``(accepted, limsup cost)`` for the run on an ultimately periodic word."""
    _, cycle = lasso_streett(A, word)
    states = cycle.states[:-1]
    flags = [s.inc for s in cycle.steps]
    worst = 0
    for j, (Qj, Pj) in enumerate(A.pairs):
        for i, q in enumerate(states):
            if q not in Qj:
                continue
            value = _cycle_cost(states, flags, i, j, Pj)
            if value == INF:
                return False, INF
            worst = max(worst, value)
    return True, worst


def _g(resp: bool, req: bool):
    if resp and req:
        return PQ
    if resp:
        return P
    if req:
        return Q
    return BOT


def _split(g):
    return g in (P, PQ), g in (Q, PQ)


def streett_init(A: StreettCostAutomaton, q: int) -> StreettRunType:
    g = tuple(_g(q in Pj, q in Qj and q not in Pj) for Qj, Pj in A.pairs)
    return StreettRunType(q, q, g, (False,) * A.n_pairs)


def streett_update(A: StreettCostAutomaton, t: StreettRunType, letter) -> StreettRunType:
    q1, flags = A.step(t.end, tuple(letter))
    g = []
    for (Qj, Pj), gj in zip(A.pairs, t.g):
        resp, req = _split(gj)
        if q1 in Pj:
            resp, req = True, False
        elif q1 in Qj:
            req = True
        g.append(_g(resp, req))
    inc = tuple(a or b for a, b in zip(t.inc, flags))
    return StreettRunType(t.start, q1, tuple(g), inc)


def streett_type_of_run(A: StreettCostAutomaton, run: Run) -> StreettRunType:
    """Type computed from the definition by scanning all positions."""
    if not run.steps:
        raise AutomatonError("types are defined for non-empty runs only")
    states = run.states
    g = []
    for Qj, Pj in A.pairs:
        resp = any(q in Pj for q in states)
        req = any(q in Qj and not any(r in Pj for r in states[i:]) for i, q in enumerate(states))
        g.append(_g(resp, req))
    inc = tuple(any(s.inc[j] for s in run.steps) for j in range(A.n_pairs))
    return StreettRunType(run.start, run.end, tuple(g), inc)


def compose_streett_types(t1: StreettRunType, t2: StreettRunType) -> StreettRunType:
    if t1.end != t2.start:
        raise AutomatonError(f"cannot compose types ending in {t1.end} and starting in {t2.start}")
    g = []
    for g1, g2 in zip(t1.g, t2.g):
        r1, q1 = _split(g1)
        r2, q2 = _split(g2)
        g.append(_g(r1 or r2, q2 or (q1 and not r2)))
    return StreettRunType(t1.start, t2.end, tuple(g), tuple(a or b for a, b in zip(t1.inc, t2.inc)))


def streett_fold_type(A: StreettCostAutomaton, start: int, word) -> StreettRunType:
    t = streett_init(A, start)
    for letter in word:
        t = streett_update(A, t, letter)
    return t


def parity_to_streett(A: CostParityAutomaton) -> StreettCostAutomaton:
    """One pair per odd color ``c``: requests of color ``c``, responses of even color above ``c``."""
    odd = sorted(c for c in A.color_set if c % 2 == 1)
    pairs = []
    for c in odd:
        Qj = {q for q in A.states if A.colors[q] == c}
        Pj = {q for q in A.states if A.colors[q] % 2 == 0 and A.colors[q] > c}
        pairs.append((Qj, Pj))
    delta = {key: (q2, (inc,) * len(odd)) for key, (q2, inc) in A.delta.items()}
    return StreettCostAutomaton(A.in_alphabet, A.out_alphabet, A.n_states, A.initial, pairs, delta,
                                name=f"streett({A.name})" if A.name else "")


def streett_lookahead_bound(A: StreettCostAutomaton) -> int:
    """Closed-form sufficient constant lookahead ``2^(n^4 * 2^(3k) + 1)`` for ``k`` pairs."""
    n, k = A.n_states, A.n_pairs
    return 1 << (n**4 * (1 << (3 * k)) + 1)
