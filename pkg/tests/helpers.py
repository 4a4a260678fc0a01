"""Random instances and brute-force oracles shared by the tests."""

import random
from itertools import product

from delaycost.automaton import CostParityAutomaton, run_on, type_of_run
from delaycost.games import CostParityGame


def random_automaton(rng: random.Random, n=None, n_in=None, n_out=None, max_color=3, inc_prob=0.6,
                     nontrivial=True) -> CostParityAutomaton:
    n = n or rng.randint(2, 4)
    ins = [f"a{i}" for i in range(n_in or rng.randint(1, 2))]
    outs = [f"b{i}" for i in range(n_out or rng.randint(1, 2))]
    while True:
        colors = [rng.randint(0, max_color) for _ in range(n)]
        if not nontrivial or len({c % 2 for c in colors}) == 2:
            break
    delta = {}
    for q in range(n):
        for a in ins:
            for b in outs:
                delta[(q, a, b)] = (rng.randrange(n), rng.random() < inc_prob)
    return CostParityAutomaton(ins, outs, colors, rng.randrange(n), delta)


def random_word(rng, A, length):
    return [(rng.choice(A.in_alphabet), rng.choice(A.out_alphabet)) for _ in range(length)]


def random_game(rng: random.Random, n=None, max_color=2, max_out=3, inc_prob=0.5) -> CostParityGame:
    n = n or rng.randint(1, 7)
    owner = [rng.randint(0, 1) for _ in range(n)]
    colors = [rng.randint(0, max_color) for _ in range(n)]
    edges = []
    for u in range(n):
        for v in rng.sample(range(n), rng.randint(1, min(n, max_out))):
            edges.append((u, v, rng.random() < inc_prob))
    return CostParityGame.from_edges(owner, colors, edges, initial=0)


def brute_rfunction(A, q, x):
    """All (end, type) pairs over every output word paired with input word ``x``."""
    out = set()
    for ys in product(A.out_alphabet, repeat=len(x)):
        run = run_on(A, q, list(zip(x, ys)))
        out.add((run.end, type_of_run(A, run)))
    return frozenset(out)


def brute_rfunction_table(A, x):
    return tuple(brute_rfunction(A, q, x) for q in A.states)


def _has_cycle_through(w, succ, allowed):
    seen = set()
    stack = [v for v in succ[w] if allowed(v)]
    while stack:
        v = stack.pop()
        if v == w:
            return True
        if v in seen:
            continue
        seen.add(v)
        stack.extend(x for x in succ[v] if allowed(x))
    return False


def positional_parity_oracle(G: CostParityGame):
    """Player O's winning region by enumerating all her positional strategies."""
    n = G.n_vertices
    succs = [G.successors(v) for v in range(n)]
    o_vertices = [v for v in range(n) if G.owner[v] == 1]
    colors = [int(c) for c in G.colors]
    won = set()
    for choice in product(*[succs[v] for v in o_vertices]):
        fixed = dict(zip(o_vertices, choice))
        succ = [[fixed[v]] if v in fixed else succs[v] for v in range(n)]
        bad = set()
        for w in range(n):
            c = colors[w]
            if c % 2 == 1 and _has_cycle_through(w, succ, lambda v, c=c: colors[v] <= c):
                bad.add(w)
        for v in range(n):
            if v in won:
                continue
            seen = {v}
            stack = [v]
            ok = True
            while stack:
                x = stack.pop()
                if x in bad:
                    ok = False
                    break
                for y in succ[x]:
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            if ok:
                won.add(v)
    return won


def same_type_blocks(A, start, max_len):
    """Map ``type -> list of words`` of length ``<= max_len`` from ``start``, one witness per (type, length)."""
    from delaycost.automaton import init_type, update_type

    found = {}
    layer = {init_type(A, start): ()}
    letters = [(a, b) for a in A.in_alphabet for b in A.out_alphabet]
    for _ in range(max_len):
        nxt = {}
        for t, w in layer.items():
            for letter in letters:
                t2 = update_type(A, t, letter)
                if t2 not in nxt:
                    nxt[t2] = w + (letter,)
        for t, w in nxt.items():
            found.setdefault(t, []).append(w)
        layer = nxt
    return found


def replacement_instance(rng, A, block=8, d=8):
    """Replace every block of an ultimately periodic run by a random same-type block.

    Returns ``(original word, replaced word)`` as ultimately periodic words.
    """
    from delaycost.automaton import UltimatelyPeriodicWord, lasso, type_of_run, Run

    u = random_word(rng, A, rng.randint(0, 6))
    v = random_word(rng, A, rng.randint(1, 6))
    word = UltimatelyPeriodicWord(u, v)
    prefix, cycle = lasso(A, word)
    cache = {}

    def split(steps):
        parts = []
        i = 0
        while i < len(steps):
            size = rng.randint(1, block)
            parts.append(steps[i:i + size])
            i += size
        return parts

    def replace(steps):
        out = []
        for part in split(steps):
            start = part[0].source
            t = type_of_run(A, Run(start, tuple(part)))
            if start not in cache:
                cache[start] = same_type_blocks(A, start, d)
            out.extend(rng.choice(cache[start][t]))
        return out

    new_prefix = replace(list(prefix.steps))
    new_cycle = replace(list(cycle.steps))
    orig = UltimatelyPeriodicWord([s.letter for s in prefix.steps], [s.letter for s in cycle.steps])
    return orig, UltimatelyPeriodicWord(new_prefix, new_cycle)


def _attractor(vertices, succ, owner, player, target):
    attr = set(target)
    changed = True
    while changed:
        changed = False
        for v in vertices:
            if v in attr:
                continue
            nxt = [w for w in succ[v] if w in vertices]
            if (owner[v] == player and any(w in attr for w in nxt)) or \
                    (owner[v] != player and all(w in attr for w in nxt)):
                attr.add(v)
                changed = True
    return attr


def zielonka_sets(vertices, succ, owner, colors):
    """Textbook recursive max-parity solver on explicit sets; returns (W_even, W_odd).

    ``owner`` uses the game convention: 1 is the even player O, 0 is Player I.
    """
    vertices = set(vertices)
    if not vertices:
        return set(), set()
    top = max(colors[v] for v in vertices)
    p = top % 2
    A = _attractor(vertices, succ, owner, 1 - p, {v for v in vertices if colors[v] == top})
    W = zielonka_sets(vertices - A, succ, owner, colors)
    if not W[1 - p]:
        res = [set(), set()]
        res[p] = vertices
        return tuple(res)
    B = _attractor(vertices, succ, owner, p, W[1 - p])
    W2 = list(zielonka_sets(vertices - B, succ, owner, colors))
    W2[1 - p] = W2[1 - p] | B
    return tuple(W2)


def naive_bounded_winning(G: CostParityGame, b: int):
    """Vertices from which Player O wins with uniform bound ``b``.

    Independent product: states are (vertex, counter dict, overflowed) built
    with dictionaries, then solved with :func:`zielonka_sets`.
    """
    odd = sorted({int(c) for c in G.colors if c % 2 == 1})
    top = int(max(G.colors))
    fresh = top + 1 if top % 2 == 0 else top + 2

    def open_at(color, counters):
        counters = dict(counters)
        if color % 2 == 0:
            for c in list(counters):
                if c < color:
                    del counters[c]
        else:
            counters.setdefault(color, 0)
        return counters

    def key(v, counters, ovf):
        return (v, tuple(sorted(counters.items())), ovf)

    starts = {v: key(v, open_at(int(G.colors[v]), {}), False) for v in range(G.n_vertices)}
    succ, owner, colors = {}, {}, {}
    stack = list(starts.values())
    while stack:
        s = stack.pop()
        if s in succ:
            continue
        v, cs, ovf = s
        owner[s] = int(G.owner[v])
        colors[s] = fresh if ovf else int(G.colors[v])
        out = []
        for e in G.edges_of(v):
            w = int(G.targets[e])
            counters = {}
            overflow = False
            for c, x in cs:
                if G.incs[e]:
                    x += 1
                if x > b:
                    overflow = True
                else:
                    counters[c] = x
            t = key(w, open_at(int(G.colors[w]), counters), overflow)
            out.append(t)
            stack.append(t)
        succ[s] = out
    even, _ = zielonka_sets(set(succ), succ, owner, colors)
    return {v for v, s in starts.items() if s in even}


def random_streett(rng: random.Random, n=None, n_pairs=None, n_in=None, n_out=None, inc_prob=0.6):
    from delaycost.streett import StreettCostAutomaton

    n = n or rng.randint(2, 4)
    J = n_pairs if n_pairs is not None else rng.randint(1, 2)
    ins = [f"a{i}" for i in range(n_in or rng.randint(1, 2))]
    outs = [f"b{i}" for i in range(n_out or rng.randint(1, 2))]
    pairs = []
    for _ in range(J):
        Qj = {q for q in range(n) if rng.random() < 0.4}
        Pj = {q for q in range(n) if rng.random() < 0.35}
        pairs.append((Qj, Pj))
    delta = {}
    for q in range(n):
        for a in ins:
            for b in outs:
                delta[(q, a, b)] = (rng.randrange(n), tuple(rng.random() < inc_prob for _ in range(J)))
    return StreettCostAutomaton(ins, outs, n, rng.randrange(n), pairs, delta)
