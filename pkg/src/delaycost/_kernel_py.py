"""Pure-Python kernels, used when the compiled extension is unavailable.

Both kernels operate on compressed-row arrays: ``offsets``, ``targets``,
``incs`` describe the edges, ``owner[v]`` is 1 for Player O (who likes even
colors) and 0 for Player I.
"""

import numpy as np


def _predecessors(n, offsets, targets):
    preds = [[] for _ in range(n)]
    for u in range(n):
        for e in range(offsets[u], offsets[u + 1]):
            preds[targets[e]].append(e)
    return preds


def solve_parity(owner, colors, offsets, targets):
    """Recursive attractor decomposition for max-parity games.

    Returns ``(winner, strategy)``: ``winner[v]`` is 1 when Player O wins
    from ``v``, ``strategy[v]`` is the chosen edge index for vertices owned
    by their winner and -1 elsewhere.
    """
    owner = [int(x) for x in owner]
    colors = [int(x) for x in colors]
    offsets = [int(x) for x in offsets]
    targets = [int(x) for x in targets]
    n = len(owner)
    src = [0] * len(targets)
    for u in range(n):
        for e in range(offsets[u], offsets[u + 1]):
            src[e] = u
    preds = _predecessors(n, offsets, targets)
    winner = [0] * n
    strategy = [-1] * n

    def attract(alive, base, p):
        region = set(base)
        queue = list(base)
        count = {}
        head = 0
        while head < len(queue):
            v = queue[head]
            head += 1
            for e in preds[v]:
                u = src[e]
                if u not in alive or u in region:
                    continue
                if owner[u] == p:
                    region.add(u)
                    strategy[u] = e
                    queue.append(u)
                else:
                    if u not in count:
                        count[u] = sum(1 for f in range(offsets[u], offsets[u + 1]) if targets[f] in alive)
                    count[u] -= 1
                    if count[u] == 0:
                        region.add(u)
                        queue.append(u)
        return region

    def solve(alive):
        alive = set(alive)
        while alive:
            top = max(colors[v] for v in alive)
            p = 1 - (top & 1)
            top_set = [v for v in alive if colors[v] == top]
            A = attract(alive, top_set, p)
            sub = alive - A
            solve(sub)
            opp = [v for v in sub if winner[v] != p]
            if not opp:
                for v in A:
                    winner[v] = p
                for v in top_set:
                    if owner[v] == p:
                        strategy[v] = next(f for f in range(offsets[v], offsets[v + 1]) if targets[f] in alive)
                return
            Bset = attract(alive, opp, 1 - p)
            for v in Bset:
                winner[v] = 1 - p
            alive -= Bset

    solve(range(n))
    for v in range(n):
        if owner[v] != winner[v]:
            strategy[v] = -1
    return np.array(winner, dtype=np.uint8), np.array(strategy, dtype=np.int64)


def build_product(owner, colors, offsets, targets, incs, odd, b, roots, limit):
    """Reachable part of the bounded-counter product.

    Counters are stored as digits in base ``b + 2``: digit 0 is "no open
    request", digit ``x + 1`` is an open request with ``x`` increments.
    """
    colors = [int(x) for x in colors]
    offsets = [int(x) for x in offsets]
    targets = [int(x) for x in targets]
    incs = [int(x) for x in incs]
    odd = [int(c) for c in odd]
    m = len(odd)
    base = b + 2
    pos = {c: i for i, c in enumerate(odd)}
    index = {}
    pv, pcode, povf = [], [], []
    poff, ptgt, porigin = [], [], []

    def encode(dg):
        code = 0
        for x in reversed(dg):
            code = code * base + x
        return code

    def decode(code):
        dg = []
        for _ in range(m):
            dg.append(code % base)
            code //= base
        return dg

    def lookup(v, code, ovf):
        key = (v, code, ovf)
        i = index.get(key)
        if i is None:
            i = len(pv)
            if i >= limit:
                raise MemoryError(i)
            index[key] = i
            pv.append(v)
            pcode.append(code)
            povf.append(ovf)
        return i

    root_ids = [lookup(int(r), 0, 0) for r in roots]
    head = 0
    while head < len(pv):
        v, code = pv[head], pcode[head]
        head += 1
        poff.append(len(ptgt))
        digits = decode(code)
        for e in range(offsets[v], offsets[v + 1]):
            w = targets[e]
            dg = list(digits)
            ovf = 0
            if incs[e]:
                for i in range(m):
                    if dg[i]:
                        dg[i] += 1
                        if dg[i] > b + 1:
                            dg[i] = 0
                            ovf = 1
            c = colors[w]
            if c % 2 == 0:
                for i in range(m):
                    if odd[i] < c:
                        dg[i] = 0
            elif dg[pos[c]] == 0:
                dg[pos[c]] = 1
            ptgt.append(lookup(w, encode(dg), ovf))
            porigin.append(e)
    poff.append(len(ptgt))
    return {
        "base": np.array(pv, dtype=np.int32),
        "code": np.array(pcode, dtype=np.int64),
        "overflow": np.array(povf, dtype=np.uint8),
        "offsets": np.array(poff, dtype=np.int64),
        "targets": np.array(ptgt, dtype=np.int32),
        "origin": np.array(porigin, dtype=np.int64),
        "roots": np.array(root_ids, dtype=np.int64),
    }
