"""Typed-state powerset functions ``r_x`` and their equivalence classes.

For an input word ``x``, ``r_x`` maps every state ``q`` to the set of pairs
``(q', t)`` such that some output word of length ``|x|`` leads from ``q`` to
``q'`` with a run of type ``t``.  Two input words are equivalent when their
functions coincide.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .automaton import CostParityAutomaton, compose_types, run_on, type_of_run


class RFunction(tuple):
    """Tuple indexed by state; entry ``q`` is a frozenset of ``(q', RunType)`` pairs."""

    __slots__ = ()

    def __new__(cls, table):
        return super().__new__(cls, (frozenset(row) for row in table))

    def __call__(self, q):
        return self[q]


def letter_rfunction(A: CostParityAutomaton, a) -> RFunction:
    if a not in A.in_alphabet:
        raise ValueError(f"unknown input letter {a!r}")
    table = []
    for q in A.states:
        row = set()
        for b in A.out_alphabet:
            run = run_on(A, q, [(a, b)])
            row.add((run.end, type_of_run(A, run)))
        table.append(row)
    return RFunction(table)


@lru_cache(maxsize=1 << 20)
def _compose_row(row_f, g):
    out = set()
    for q1, t1 in row_f:
        for q2, t2 in g[q1]:
            out.add((q2, compose_types(t1, t2)))
    return frozenset(out)


def compose_rfunctions(f: RFunction, g: RFunction) -> RFunction:
    """``r_{xy}`` from ``r_x`` and ``r_y``."""
    return RFunction(_compose_row(row, g) for row in f)


def rfunction_of_word(A: CostParityAutomaton, word) -> RFunction:
    word = list(word)
    if not word:
        raise ValueError("r-functions are defined for non-empty words")
    f = letter_rfunction(A, word[0])
    for a in word[1:]:
        f = compose_rfunctions(f, letter_rfunction(A, a))
    return f


def _fingerprint(functions) -> frozenset:
    return frozenset(functions)


@dataclass(frozen=True)
class ClassSet:
    """The set ``{r_x : |x| = 2^exponent}``.

    ``preperiod`` and ``period`` describe the eventually periodic sequence of
    sets obtained by repeated squaring, indexed by the exponent.
    """

    functions: frozenset
    exponent: int
    preperiod: int
    period: int
    automaton: CostParityAutomaton = field(repr=False, compare=False, default=None)

    def __len__(self):
        return len(self.functions)

    def __iter__(self):
        return iter(sorted(self.functions, key=_sort_key))


def _sort_key(f: RFunction):
    return tuple(sorted(repr(sorted(row, key=repr)) for row in f))


def square_classes(functions) -> frozenset:
    """All pairwise compositions ``f . g`` of a set of r-functions."""
    fs = list(functions)
    return frozenset(compose_rfunctions(f, g) for f in fs for g in fs)


def classes_for_exponent(A: CostParityAutomaton, e: int, max_steps: int = 10_000) -> ClassSet:
    """Equivalence classes of input words of length ``2^e``.

    The squaring sequence lives in a finite space, so it is eventually
    periodic; the exponent is reduced modulo the detected period.
    """
    if e < 0:
        raise ValueError("exponent must be non-negative")
    current = frozenset(letter_rfunction(A, a) for a in A.in_alphabet)
    history = [current]
    index = {_fingerprint(current): 0}
    j = 0
    while j < e:
        if j >= max_steps:
            raise RuntimeError("no periodicity detected within the step budget")
        current = square_classes(current)
        j += 1
        key = _fingerprint(current)
        if key in index:
            p = index[key]
            c = j - p
            target = p + (e - p) % c
            return ClassSet(history[target], e, p, c, A)
        index[key] = j
        history.append(current)
    return ClassSet(current, e, -1, 0, A)


def automaton_parameters(A: CostParityAutomaton) -> tuple:
    """``(n, k)``: number of states and number of distinct colors."""
    return A.n_states, len(A.color_set)


def lookahead_exponent(A: CostParityAutomaton) -> int:
    """Exponent ``e`` with ``2^e`` the block length used by the abstract game."""
    n, k = automaton_parameters(A)
    return 2 * n**4 * k**2 + 1


def theoretical_bounds(A: CostParityAutomaton) -> tuple:
    """Closed-form sufficient lookahead and cost bound as exact integers."""
    A.require_nontrivial()
    n, k = automaton_parameters(A)
    lookahead = 1 << (2 * n**4 * k**2 + 1)
    cost = n**3 * k**2 * (1 << (2 * n**7 * k**4 + 3))
    return lookahead, cost
