"""Parity automata with costs: runs, cost-of-response and run types.

Letters of the product alphabet are pairs ``(a, b)`` with ``a`` an input
letter and ``b`` an output letter.  Every transition carries a cost flag,
``True`` for an increment-transition and ``False`` for an epsilon-transition.
A missing color (``max`` of an empty set) is represented by ``None``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

INF = float("inf")


class AutomatonError(ValueError):
    """Raised for malformed automata or letters outside the alphabet."""


class TrivialAutomatonError(AutomatonError):
    """Raised when a game operation is asked to handle a trivial automaton."""

    def __init__(self, verdict: "TrivialVerdict"):
        super().__init__(f"automaton is trivial: language is {verdict.kind}")
        self.verdict = verdict


@dataclass(frozen=True)
class TrivialVerdict:
    """Answer for an automaton whose colors all have the same parity."""

    kind: str  # "universal" or "empty"
    automaton: "CostParityAutomaton" = field(repr=False, compare=False, default=None)


@dataclass(frozen=True)
class CostParityAutomaton:
    """Deterministic, complete parity automaton with costs.

    ``delta`` maps ``(q, a, b)`` to ``(q', inc)``.
    """

    in_alphabet: tuple
    out_alphabet: tuple
    colors: tuple
    initial: int
    delta: dict = field(compare=False)
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "in_alphabet", tuple(self.in_alphabet))
        object.__setattr__(self, "out_alphabet", tuple(self.out_alphabet))
        object.__setattr__(self, "colors", tuple(int(c) for c in self.colors))
        n = len(self.colors)
        if n == 0:
            raise AutomatonError("automaton needs at least one state")
        if not 0 <= self.initial < n:
            raise AutomatonError(f"initial state {self.initial} is not a state")
        if any(c < 0 for c in self.colors):
            raise AutomatonError("colors must be non-negative")
        if len(set(self.in_alphabet)) != len(self.in_alphabet) or not self.in_alphabet:
            raise AutomatonError("input alphabet must be non-empty and duplicate-free")
        if len(set(self.out_alphabet)) != len(self.out_alphabet) or not self.out_alphabet:
            raise AutomatonError("output alphabet must be non-empty and duplicate-free")
        table = {}
        for q in range(n):
            for a in self.in_alphabet:
                for b in self.out_alphabet:
                    try:
                        target, inc = self.delta[(q, a, b)]
                    except KeyError:
                        raise AutomatonError(f"missing transition for {(q, a, b)!r}") from None
                    if not 0 <= target < n:
                        raise AutomatonError(f"transition {(q, a, b)!r} targets unknown state {target}")
                    table[(q, a, b)] = (int(target), bool(inc))
        if len(table) != len(self.delta):
            extra = set(self.delta) - set(table)
            raise AutomatonError(f"transitions over unknown states or letters: {sorted(map(repr, extra))[:3]}")
        object.__setattr__(self, "delta", table)

    def __eq__(self, other):
        if not isinstance(other, CostParityAutomaton):
            return NotImplemented
        return (
            self.in_alphabet == other.in_alphabet
            and self.out_alphabet == other.out_alphabet
            and self.colors == other.colors
            and self.initial == other.initial
            and self.delta == other.delta
        )

    __hash__ = object.__hash__

    @property
    def n_states(self) -> int:
        return len(self.colors)

    @property
    def states(self) -> range:
        return range(len(self.colors))

    @property
    def color_set(self) -> frozenset:
        return frozenset(self.colors)

    @property
    def is_trivial(self) -> bool:
        parities = {c % 2 for c in self.colors}
        return len(parities) < 2

    def trivial_verdict(self) -> Optional[TrivialVerdict]:
        if not self.is_trivial:
            return None
        kind = "universal" if self.colors[0] % 2 == 0 else "empty"
        return TrivialVerdict(kind, self)

    def require_nontrivial(self) -> None:
        verdict = self.trivial_verdict()
        if verdict is not None:
            raise TrivialAutomatonError(verdict)

    def step(self, q: int, letter) -> tuple:
        a, b = letter
        try:
            return self.delta[(q, a, b)]
        except KeyError:
            raise AutomatonError(f"letter {letter!r} not in the alphabet") from None

    def answers(self, c) -> frozenset:
        """Colors of the automaton that answer the request ``c``."""
        if c is None:
            return frozenset()
        return frozenset(d for d in self.color_set if d > c and d % 2 == 0)


class Step(NamedTuple):
    source: int
    letter: tuple
    target: int
    inc: bool
    target_color: int


@dataclass(frozen=True)
class Run:
    start: int
    steps: tuple = ()

    @property
    def end(self) -> int:
        return self.steps[-1].target if self.steps else self.start

    @property
    def cost(self) -> int:
        return sum(1 for s in self.steps if s.inc)

    @property
    def states(self) -> list:
        return [self.start] + [s.target for s in self.steps]

    def __len__(self):
        return len(self.steps)


class RunType(NamedTuple):
    start: int
    end: int
    c0: Optional[int]  # largest even color (response) seen
    c1: Optional[int]  # largest unanswered odd color (request)
    inc: bool


@dataclass(frozen=True)
class UltimatelyPeriodicWord:
    prefix: tuple
    period: tuple

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(tuple(p) for p in self.prefix))
        object.__setattr__(self, "period", tuple(tuple(p) for p in self.period))
        if not self.period:
            raise AutomatonError("period of an ultimately periodic word must be non-empty")


def _max(x, y):
    if x is None:
        return y
    if y is None:
        return x
    return max(x, y)


def run_on(A: CostParityAutomaton, start: int, word: Iterable) -> Run:
    steps = []
    q = start
    for letter in word:
        letter = tuple(letter)
        q2, inc = A.step(q, letter)
        steps.append(Step(q, letter, q2, inc, A.colors[q2]))
        q = q2
    return Run(start, tuple(steps))


def lasso(A: CostParityAutomaton, word: UltimatelyPeriodicWord) -> tuple:
    """Split the run on ``u v^omega`` into a prefix run and a cycle run.

    The cycle run starts and ends in the same state and is repeated forever
    after the prefix run.
    """
    prefix = list(run_on(A, A.initial, word.prefix).steps)
    q = prefix[-1].target if prefix else A.initial
    seen = {}
    blocks = []
    while q not in seen:
        seen[q] = len(blocks)
        block = run_on(A, q, word.period)
        blocks.append(block.steps)
        q = block.end
    first = seen[q]
    for block in blocks[:first]:
        prefix.extend(block)
    cycle = [s for block in blocks[first:] for s in block]
    return Run(A.initial, tuple(prefix)), Run(q, tuple(cycle))


def _position_view(prefix: Run, cycle: Run):
    """Return (state_at, inc_into) closures over positions of the infinite run."""
    p = len(prefix)
    c = len(cycle)
    states = prefix.states + [s.target for s in cycle.steps]
    incs = [s.inc for s in prefix.steps] + [s.inc for s in cycle.steps]

    def idx(n):
        return n if n <= p else p + (n - p - 1) % c + 1

    def state_at(n):
        return states[idx(n)]

    def inc_into(n):
        # flag of the transition from position n-1 to n
        return incs[idx(n) - 1]

    return state_at, inc_into


def cor(A: CostParityAutomaton, prefix: Run, cycle: Run, n: int):
    """Cost-of-response at position ``n`` of the run ``prefix . cycle^omega``."""
    if n < 0:
        raise AutomatonError("position must be non-negative")
    if not cycle.steps or cycle.start != cycle.end or cycle.start != prefix.end:
        raise AutomatonError("cycle must be a non-empty loop starting where the prefix ends")
    state_at, inc_into = _position_view(prefix, cycle)
    c = A.colors[state_at(n)]
    if c % 2 == 0:
        return 0
    answer = A.answers(c)
    cost = 0
    # beyond this horizon the run only repeats positions already scanned
    horizon = n + len(prefix) + 2 * len(cycle)
    for m in range(n + 1, horizon + 1):
        if inc_into(m):
            cost += 1
        if A.colors[state_at(m)] in answer:
            return cost
    return INF


def _cycle_limsup(colors_of, cycle: Run, answers) -> float:
    """Largest cost-of-response over request positions of a repeated cycle."""
    states = cycle.states[:-1]
    incs = [s.inc for s in cycle.steps]
    length = len(states)
    worst = 0
    for i, q in enumerate(states):
        c = colors_of[q]
        if c % 2 == 0:
            continue
        ans = answers(c)
        cost = 0
        found = False
        for d in range(1, length + 1):
            j = (i + d) % length
            if incs[(i + d - 1) % length]:
                cost += 1
            if colors_of[states[j]] in ans:
                found = True
                break
        if not found:
            return INF
        worst = max(worst, cost)
    return worst


def accepts_up(A: CostParityAutomaton, word: UltimatelyPeriodicWord) -> tuple:
    """Return ``(accepted, limsup cost)`` for the run of ``A`` on ``word``."""
    _, cycle = lasso(A, word)
    value = _cycle_limsup(A.colors, cycle, A.answers)
    return value != INF, value


def init_type(A: CostParityAutomaton, q: int) -> RunType:
    c = A.colors[q]
    if c % 2 == 0:
        return RunType(q, q, c, None, False)
    return RunType(q, q, None, c, False)


def update_type(A: CostParityAutomaton, t: RunType, letter) -> RunType:
    q1, inc = A.step(t.end, tuple(letter))
    c = A.colors[q1]
    if c % 2 == 0:
        c0 = _max(t.c0, c)
        c1 = None if t.c1 is not None and c > t.c1 else t.c1
    else:
        c0 = t.c0
        c1 = _max(t.c1, c)
    return RunType(t.start, q1, c0, c1, t.inc or inc)


def type_of_run(A: CostParityAutomaton, run: Run) -> RunType:
    if not run.steps:
        raise AutomatonError("types are defined for non-empty runs only")
    cols = [A.colors[q] for q in run.states]
    evens = [c for c in cols if c % 2 == 0]
    c0 = max(evens) if evens else None
    c1 = None
    for j, c in enumerate(cols):
        if c % 2 == 1 and not any(d % 2 == 0 and d > c for d in cols[j + 1:]):
            c1 = _max(c1, c)
    return RunType(run.start, run.end, c0, c1, any(s.inc for s in run.steps))


def compose_types(t1: RunType, t2: RunType) -> RunType:
    if t1.end != t2.start:
        raise AutomatonError(f"cannot compose types ending in {t1.end} and starting in {t2.start}")
    c1 = t2.c1
    if t1.c1 is not None and not (t2.c0 is not None and t2.c0 > t1.c1):
        c1 = _max(c1, t1.c1)
    return RunType(t1.start, t2.end, _max(t1.c0, t2.c0), c1, t1.inc or t2.inc)


def fold_type(A: CostParityAutomaton, start: int, word: Sequence) -> RunType:
    t = init_type(A, start)
    for letter in word:
        t = update_type(A, t, letter)
    return t
