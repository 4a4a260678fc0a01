"""Parity and cost-parity game solving, with strategy extraction and certificate checks.

Cost-parity is reduced to plain parity: the product of an arena with
counters bounded by ``b`` (one counter per odd color) is a parity game in
which an extra, maximal odd color marks every counter overflow.  Player O
wins the product iff she can keep the limsup of the cost-of-response at or
below ``b``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from . import kernel
from .automaton import CostParityAutomaton
from .games import (
    PLAYER_I,
    PLAYER_O,
    CostParityGame,
    ResourceError,
    bisimulation_quotient,
    build_abstract_game,
    build_fixed_lookahead_game,
)
from .rfunctions import classes_for_exponent, lookahead_exponent, theoretical_bounds

DEFAULT_PRODUCT_LIMIT = 30_000_000


class NotWinningError(ValueError):
    """Player O does not win the requested game."""


@dataclass
class ProductGame:
    """Reachable part of ``G`` times counter maps with bound ``bound``."""

    game: CostParityGame
    source: CostParityGame
    base: np.ndarray
    code: np.ndarray
    overflow: np.ndarray
    origin: np.ndarray
    roots: np.ndarray
    bound: int
    odd_colors: tuple
    overflow_color: int

    def counters(self, p: int) -> dict:
        """Counter map of product vertex ``p``; ``None`` marks an absent request."""
        code = int(self.code[p])
        base = self.bound + 2
        out = {}
        for c in self.odd_colors:
            digit = code % base
            code //= base
            out[c] = None if digit == 0 else digit - 1
        return out

    def root(self, v: int) -> int:
        """Product vertex ``(v, no open requests)``."""
        return int(self._root_of[v])

    def __post_init__(self):
        self._root_of = {}
        for p in self.roots:
            self._root_of[int(self.base[p])] = int(p)


@dataclass
class SolveResult:
    """Winning regions and positional strategies of a game.

    For bounded solving the strategies live on ``product``; the maps on the
    original game record the choice made from ``(v, no open requests)``.
    """

    game: CostParityGame
    region_O: frozenset
    region_I: frozenset
    strategy_O: dict
    strategy_I: dict
    bound: Optional[int] = None
    product: Optional[ProductGame] = None
    product_winner: Optional[np.ndarray] = field(default=None, repr=False)
    product_strategy: Optional[np.ndarray] = field(default=None, repr=False)

    def winner(self, v=None) -> str:
        v = self.game.initial if v is None else v
        if v in self.region_O:
            return "O"
        if v in self.region_I:
            return "I"
        raise KeyError(f"vertex {v} was not solved")

    @property
    def memory_game(self) -> CostParityGame:
        return self.product.game if self.product is not None else self.game

    @property
    def memory_strategy(self) -> np.ndarray:
        """Edge index chosen at every memory vertex owned by its winner, else -1."""
        return self.product_strategy

    def memory_root(self, v: int) -> int:
        return self.product.root(v) if self.product is not None else v

    def with_strategy(self, vertex: int, edge: int) -> "SolveResult":
        """Copy whose memory strategy picks ``edge`` at memory vertex ``vertex``."""
        strat = self.product_strategy.copy()
        strat[vertex] = edge
        return SolveResult(self.game, self.region_O, self.region_I, dict(self.strategy_O), dict(self.strategy_I),
                           self.bound, self.product, self.product_winner, strat)


def _project(G: CostParityGame, winner, strategy, vertex_ids, memory_ids, targets_of) -> tuple:
    region_O, region_I, strat_O, strat_I = set(), set(), {}, {}
    for v, p in zip(vertex_ids, memory_ids):
        if winner[p] == PLAYER_O:
            region_O.add(v)
        else:
            region_I.add(v)
        e = int(strategy[p])
        if e >= 0:
            target = targets_of(e)
            (strat_O if G.owner[v] == PLAYER_O else strat_I)[v] = target
    return frozenset(region_O), frozenset(region_I), strat_O, strat_I


def solve_parity(G: CostParityGame) -> SolveResult:
    """Max-parity winner of every vertex, ignoring edge costs."""
    winner, strategy = kernel.solve_parity(G.owner, G.colors, G.offsets, G.targets)
    ids = range(G.n_vertices)
    regions = _project(G, winner, strategy, ids, ids, lambda e: int(G.targets[e]))
    return SolveResult(G, *regions, bound=None, product=None, product_winner=winner, product_strategy=strategy)


def overflow_color(G: CostParityGame) -> int:
    top = int(G.colors.max())
    return top + 1 if top % 2 == 0 else top + 2


def bounded_product(G: CostParityGame, b: int, roots=None, limit: int = DEFAULT_PRODUCT_LIMIT) -> ProductGame:
    """Parity game on ``(v, counters, overflow)`` for bound ``b``.

    Along an edge, counters of open requests grow by one on increments and
    overflow beyond ``b`` (the request is dropped and the step is marked);
    then the target's color answers smaller requests or opens its own.
    """
    if b < 0:
        raise ValueError("bound must be non-negative")
    roots = np.arange(G.n_vertices) if roots is None else np.asarray(sorted(set(int(r) for r in roots)), dtype=np.int64)
    odd = G.odd_colors()
    try:
        raw = kernel.build_product(G.owner, G.colors, G.offsets, G.targets, G.incs, np.array(odd, dtype=np.int64),
                                   int(b), roots, int(limit))
    except MemoryError:
        raise ResourceError(f"bounded product exceeds {limit} vertices at bound {b}", limit) from None
    except OverflowError:
        raise ResourceError(f"counter space (b+2)^{len(odd)} too large at bound {b}") from None
    fresh = overflow_color(G)
    base = raw["base"]
    colors = np.where(raw["overflow"] == 1, fresh, G.colors[base])
    owner = G.owner[base]
    game = CostParityGame(owner, colors, raw["offsets"], raw["targets"], G.incs[raw["origin"]], int(raw["roots"][0]))
    return ProductGame(game, G, base, raw["code"], raw["overflow"], raw["origin"], raw["roots"], int(b), odd, fresh)


def solve_with_bound(G: CostParityGame, b: int, roots=None, limit: int = DEFAULT_PRODUCT_LIMIT) -> SolveResult:
    """Solve the cost-parity game with uniform bound ``b`` through the counter product."""
    P = bounded_product(G, b, roots, limit)
    winner, strategy = kernel.solve_parity(P.game.owner, P.game.colors, P.game.offsets, P.game.targets)
    vertex_ids = [int(P.base[p]) for p in P.roots]
    regions = _project(G, winner, strategy, vertex_ids, [int(p) for p in P.roots], lambda e: int(G.targets[P.origin[e]]))
    return SolveResult(G, *regions, bound=int(b), product=P, product_winner=winner, product_strategy=strategy)


def _bounds_to_try(limit):
    b = 0
    while b < limit:
        yield b
        b = 1 if b == 0 else 2 * b
    yield limit


def solve_cost_parity(G: CostParityGame, roots=None, limit: int = DEFAULT_PRODUCT_LIMIT) -> SolveResult:
    """Cost-parity winner, i.e. the winner with uniform bound ``|V|``.

    Player O cannot win cost-parity where she loses plain parity, so bounds
    ``0, 1, 2, 4, ...`` are tried until every plain-parity win among
    ``roots`` is also a bounded win; monotonicity in the bound makes the
    first such bound as good as ``|V|``.
    """
    roots = list(range(G.n_vertices)) if roots is None else sorted(set(int(r) for r in roots))
    parity = solve_parity(G)
    wanted = [v for v in roots if v in parity.region_O]
    result = None
    for b in _bounds_to_try(G.n_vertices):
        result = solve_with_bound(G, b, roots, limit)
        if all(v in result.region_O for v in wanted):
            break
    return result


def optimal_uniform_cost(G: CostParityGame, limit: int = DEFAULT_PRODUCT_LIMIT, minimize: bool = True) -> Optional[int]:
    """Least ``b <= |V|`` with which Player O wins from the initial vertex, ``None`` if Player I wins.

    With ``minimize`` the game is first replaced by its bisimulation quotient,
    which has the same optimal bound.
    """
    if minimize:
        G, _ = bisimulation_quotient(G)
    v0 = G.initial
    if v0 not in solve_parity(G).region_O:
        return None

    def wins(b):
        return v0 in solve_with_bound(G, b, [v0], limit).region_O

    lo = -1
    hi = None
    for b in _bounds_to_try(G.n_vertices):
        if wins(b):
            hi = b
            break
        lo = b
    if hi is None:
        return None
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if wins(mid):
            hi = mid
        else:
            lo = mid
    return hi


def cost_parity_winner(G: CostParityGame, bound: Optional[int] = None, limit: int = DEFAULT_PRODUCT_LIMIT) -> str:
    """Winner from the initial vertex, with uniform bound ``bound`` or ``|V|`` if omitted.

    Works on the bisimulation quotient, so no strategies are returned; use
    :func:`solve_cost_parity` or :func:`solve_with_bound` for those.
    """
    Q, _ = bisimulation_quotient(G)
    if bound is None:
        return solve_cost_parity(Q, [Q.initial], limit).winner()
    return solve_with_bound(Q, bound, [Q.initial], limit).winner()


def _check_game_automaton(A):
    A.require_nontrivial()


def solve_delay_game(A: CostParityAutomaton, k: int, bound: Optional[int] = None, **kw) -> SolveResult:
    """Winner of the delay game with constant lookahead ``k``, optionally with a fixed cost bound."""
    G = build_fixed_lookahead_game(A, k, **kw)
    if bound is None:
        return solve_cost_parity(G, [G.initial])
    return solve_with_bound(G, bound, [G.initial])


def optimal_delay_cost(A: CostParityAutomaton, k: int, **kw) -> Optional[int]:
    return optimal_uniform_cost(build_fixed_lookahead_game(A, k, **kw))


@dataclass
class ExistsResult:
    winner: str
    classes: int
    arena_vertices: int
    lookahead_bound: int
    cost_bound: int


def solve_exists(A: CostParityAutomaton, quotient: bool = True, budget: Optional[int] = None) -> ExistsResult:
    """Whether Player O wins the delay game for some lookahead, via the abstract game."""
    lookahead, cost = theoretical_bounds(A)
    classes = classes_for_exponent(A, lookahead_exponent(A))
    G = build_abstract_game(A, classes, quotient=quotient, budget=budget)
    result = solve_cost_parity(G, [G.initial])
    return ExistsResult(result.winner(), len(classes), G.n_vertices, lookahead, cost)


class MealyStrategy:
    """Finite-state Player O strategy for a delay game with constant lookahead.

    Memory states are vertices of the solved product game at which Player I
    moves.  ``step(memory, a)`` appends the input letter ``a`` and returns the
    new memory and the output letter, or ``None`` while the initial buffer of
    ``lag`` letters is still being filled.
    """

    def __init__(self, initial, transition, output, lag, windows=None):
        self.initial = initial
        self.transition = transition
        self.output = output
        self.lag = lag
        self.windows = windows or {}

    @property
    def memory_states(self):
        return {self.initial} | {m for (m, _) in self.transition} | set(self.transition.values())

    def step(self, memory, letter):
        key = (memory, letter)
        return self.transition[key], self.output[key]

    def run(self, letters):
        """Output letters produced while reading ``letters``."""
        m = self.initial
        out = []
        for a in letters:
            m, b = self.step(m, a)
            if b is not None:
                out.append(b)
        return out


def extract_delay_strategy(A: CostParityAutomaton, k: int, b: int, **kw) -> MealyStrategy:
    """Transducer realising a bound-``b`` winning strategy with lookahead ``k``."""
    G = build_fixed_lookahead_game(A, k, **kw)
    result = solve_with_bound(G, b, [G.initial])
    if result.winner() != "O":
        raise NotWinningError(f"Player O has no strategy of cost <= {b} with lookahead {k}")
    return mealy_from_result(result, k)


def mealy_from_result(result: SolveResult, k: int) -> MealyStrategy:
    G = result.game
    P = result.product
    PG = P.game
    strat = result.product_strategy
    start = P.root(G.initial)
    transition, output, windows = {}, {}, {}
    seen = {start}
    queue = deque([start])
    while queue:
        m = queue.popleft()
        for e in range(PG.offsets[m], PG.offsets[m + 1]):
            a = G.edge_labels[P.origin[e]]
            m1 = int(PG.targets[e])
            b = None
            if PG.owner[m1] == PLAYER_O:
                f = int(strat[m1])
                if f < 0:
                    raise NotWinningError(f"no strategy at product vertex {m1}")
                b = G.edge_labels[P.origin[f]]
                windows[(m, a)] = G.labels[P.base[m1]][2]
                m1 = int(PG.targets[f])
            transition[(m, a)] = m1
            output[(m, a)] = b
            if m1 not in seen:
                seen.add(m1)
                queue.append(m1)
    return MealyStrategy(start, transition, output, k + 1, windows)


def _apply_counters(counters, inc, color, odd, b):
    """One counter update step; returns ``(new counters, overflow)``."""
    new = []
    overflow = False
    for c, x in zip(odd, counters):
        if x is not None and inc:
            x += 1
            if x > b:
                x = None
                overflow = True
        if color % 2 == 0:
            if c < color:
                x = None
        elif c == color and x is None:
            x = 0
        new.append(x)
    return tuple(new), overflow


def verify_strategy_certificate(G: CostParityGame, result: SolveResult, b: int) -> bool:
    """Re-check a claimed Player O win from the initial vertex with bound ``b``.

    The memory graph of the strategy (all Player I choices kept) is combined
    with freshly tracked counters; the check fails if some reachable cycle
    has an odd maximal color or passes through an overflow.
    """
    if G.initial not in result.region_O:
        return False
    M = result.memory_game
    strat = result.memory_strategy
    if strat is None:
        return False
    base = result.product.base if result.product is not None else np.arange(G.n_vertices)
    origin = result.product.origin if result.product is not None else np.arange(G.n_edges)
    odd = G.odd_colors()
    fresh = overflow_color(G)
    start = (result.memory_root(G.initial), (None,) * len(odd), False)
    index = {start: 0}
    order = [start]
    rows, cols = [], []
    head = 0
    while head < len(order):
        m, counters, _ = order[head]
        u = head
        head += 1
        v = int(base[m])
        if int(G.owner[v]) == PLAYER_O:
            e = int(strat[m])
            if e < 0 or not M.offsets[m] <= e < M.offsets[m + 1]:
                return False
            choices = [e]
        else:
            choices = range(int(M.offsets[m]), int(M.offsets[m + 1]))
        for e in choices:
            ge = int(origin[e])
            if int(G.targets[ge]) != int(base[M.targets[e]]):
                return False
            w = int(G.targets[ge])
            nc, ovf = _apply_counters(counters, bool(G.incs[ge]), int(G.colors[w]), odd, b)
            key = (int(M.targets[e]), nc, ovf)
            j = index.get(key)
            if j is None:
                j = len(order)
                index[key] = j
                order.append(key)
            rows.append(u)
            cols.append(j)
    n = len(order)
    colors = np.array([fresh if ovf else int(G.colors[base[m]]) for (m, _, ovf) in order], dtype=np.int64)
    rows = np.array(rows, dtype=np.int64)
    cols = np.array(cols, dtype=np.int64)
    for c in sorted(set(int(x) for x in colors if x % 2 == 1)):
        keep = colors <= c
        sel = keep[rows] & keep[cols]
        if not sel.any():
            continue
        graph = csr_matrix((np.ones(int(sel.sum())), (rows[sel], cols[sel])), shape=(n, n))
        _, comp = connected_components(graph, directed=True, connection="strong")
        sizes = np.bincount(comp, minlength=n)
        loops = np.zeros(n, dtype=bool)
        loops[rows[sel][rows[sel] == cols[sel]]] = True
        cyclic = (sizes[comp] > 1) | loops
        if np.any(cyclic & (colors == c) & keep):
            return False
    return True
