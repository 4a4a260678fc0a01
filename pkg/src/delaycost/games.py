"""Finite cost-parity arenas built from automata.

Two constructions are provided: the product of an automaton with a buffer
of ``k + 1`` input letters (a delay game with constant lookahead ``k``), and
the delay-free abstract game over equivalence classes of long input blocks.
"""

from __future__ import annotations

from collections import deque
from typing import Optional

import numpy as np

from .automaton import CostParityAutomaton, init_type
from .rfunctions import ClassSet

PLAYER_I = 0
PLAYER_O = 1

DEFAULT_BUFFER_BUDGET = 4_000_000


class ResourceError(RuntimeError):
    """A construction would exceed its configured size budget."""

    def __init__(self, message, size=None):
        super().__init__(message)
        self.size = size


class CostParityGame:
    """Arena with integer vertices, colored vertices and cost flags on edges.

    Edges are stored in compressed row form: the successors of ``v`` are
    ``targets[offsets[v]:offsets[v + 1]]`` with flags ``incs`` at the same
    positions.  ``owner[v]`` is ``PLAYER_O`` or ``PLAYER_I``.
    """

    def __init__(self, owner, colors, offsets, targets, incs, initial=0, labels=None, edge_labels=None):
        self.owner = np.ascontiguousarray(owner, dtype=np.uint8)
        self.colors = np.ascontiguousarray(colors, dtype=np.int64)
        self.offsets = np.ascontiguousarray(offsets, dtype=np.int64)
        self.targets = np.ascontiguousarray(targets, dtype=np.int32)
        self.incs = np.ascontiguousarray(incs, dtype=np.uint8)
        self.initial = int(initial)
        self.labels = labels
        self.edge_labels = edge_labels
        n = len(self.owner)
        if len(self.colors) != n or len(self.offsets) != n + 1:
            raise ValueError("owner, colors and offsets disagree on the number of vertices")
        if len(self.targets) != len(self.incs) or self.offsets[-1] != len(self.targets):
            raise ValueError("edge arrays are inconsistent")
        if n == 0:
            raise ValueError("a game needs at least one vertex")
        if not 0 <= self.initial < n:
            raise ValueError("initial vertex out of range")
        if np.any(np.diff(self.offsets) <= 0):
            dead = int(np.argmax(np.diff(self.offsets) <= 0))
            raise ValueError(f"vertex {dead} has no outgoing edge")
        if len(self.targets) and (self.targets.min() < 0 or self.targets.max() >= n):
            raise ValueError("edge target out of range")
        if np.any(self.colors < 0):
            raise ValueError("colors must be non-negative")
        if labels is not None and len(labels) != n:
            raise ValueError("one label per vertex expected")
        self._index = None

    @classmethod
    def from_edges(cls, owner, colors, edges, initial=0, labels=None):
        """Build from a list of ``(u, v, inc)`` or ``(u, v, inc, label)`` tuples."""
        n = len(owner)
        rows = [[] for _ in range(n)]
        for e in edges:
            rows[e[0]].append(e)
        offsets = [0]
        targets, incs, elabels = [], [], []
        for row in rows:
            for e in row:
                targets.append(e[1])
                incs.append(1 if e[2] else 0)
                elabels.append(e[3] if len(e) > 3 else None)
            offsets.append(len(targets))
        return cls(owner, colors, offsets, targets, incs, initial, labels, elabels)

    @property
    def n_vertices(self) -> int:
        return len(self.owner)

    @property
    def n_edges(self) -> int:
        return len(self.targets)

    def __len__(self):
        return self.n_vertices

    def edges_of(self, v):
        """Edge indices leaving ``v``."""
        return range(int(self.offsets[v]), int(self.offsets[v + 1]))

    def successors(self, v):
        return [int(w) for w in self.targets[self.offsets[v]:self.offsets[v + 1]]]

    def vertex(self, label) -> int:
        """Vertex id of a structured label."""
        if self.labels is None:
            raise KeyError("game has no vertex labels")
        if hasattr(self.labels, "lookup"):
            return self.labels.lookup(label)
        if self._index is None:
            self._index = {lab: i for i, lab in enumerate(self.labels)}
        return self._index[label]

    def odd_colors(self) -> tuple:
        return tuple(sorted(int(c) for c in np.unique(self.colors) if c % 2 == 1))


class _Builder:
    """Incremental construction with reachable-only exploration and edge merging."""

    def __init__(self):
        self.index = {}
        self.labels = []
        self.owner = []
        self.colors = []
        self.rows = []

    def vertex(self, label, owner, color):
        v = self.index.get(label)
        if v is None:
            v = len(self.labels)
            self.index[label] = v
            self.labels.append(label)
            self.owner.append(owner)
            self.colors.append(color)
            self.rows.append({})
            return v, True
        return v, False

    def edge(self, u, v, inc, label=None):
        row = self.rows[u]
        old = row.get(v)
        if old is None:
            row[v] = (inc, label)
        elif old[0] != inc:
            # parallel edges with different costs: the owner picks the better one
            keep_inc = self.owner[u] == PLAYER_I
            if old[0] != keep_inc:
                row[v] = (keep_inc, label)

    def build(self, initial=0) -> CostParityGame:
        offsets = [0]
        targets, incs, elabels = [], [], []
        for row in self.rows:
            for v, (inc, label) in row.items():
                targets.append(v)
                incs.append(1 if inc else 0)
                elabels.append(label)
            offsets.append(len(targets))
        return CostParityGame(self.owner, self.colors, offsets, targets, incs, initial, self.labels, elabels)


def fixed_lookahead_size(A: CostParityAutomaton, k: int) -> int:
    """Nominal number of buffered states ``|Q| * |Sigma_I|^(k+1)``."""
    return A.n_states * len(A.in_alphabet) ** (k + 1)


class BufferLabels:
    """Vertex labels of a fixed-lookahead game, decoded from vertex ids on demand.

    Buffers are stored as integers in base ``|Sigma_I|`` with the oldest
    letter most significant.
    """

    def __init__(self, letters, k, initial, o_states, i_states):
        self.letters = tuple(letters)
        self.k = k
        self.initial = initial
        s = len(self.letters)
        self._fill_start = [sum(s**i for i in range(length)) for length in range(k + 2)]
        self.n_fill = self._fill_start[k + 1]
        self.o_states = tuple(o_states)
        self.i_states = tuple(i_states)
        self._o_index = {q: i for i, q in enumerate(self.o_states)}
        self._i_index = {q: i for i, q in enumerate(self.i_states)}
        self.o_start = self.n_fill
        self.i_start = self.o_start + len(self.o_states) * s ** (k + 1)
        self.n = self.i_start + len(self.i_states) * s**k
        self._letter_index = {a: i for i, a in enumerate(self.letters)}

    def __len__(self):
        return self.n

    def __iter__(self):
        return (self[v] for v in range(self.n))

    def _word(self, code, length):
        s = len(self.letters)
        out = []
        for _ in range(length):
            code, d = divmod(code, s)
            out.append(self.letters[d])
        return tuple(reversed(out))

    def _code(self, word):
        s = len(self.letters)
        code = 0
        for a in word:
            code = code * s + self._letter_index[a]
        return code

    def __getitem__(self, v):
        v = int(v)
        if not 0 <= v < self.n:
            raise IndexError(v)
        s = len(self.letters)
        if v < self.o_start:
            length = max(i for i in range(self.k + 1) if self._fill_start[i] <= v)
            return ("F", self._word(v - self._fill_start[length], length))
        if v < self.i_start:
            q, code = divmod(v - self.o_start, s ** (self.k + 1))
            return ("O", self.o_states[q], self._word(code, self.k + 1))
        q, code = divmod(v - self.i_start, s**self.k)
        return ("I", self.i_states[q], self._word(code, self.k))

    def lookup(self, label) -> int:
        s = len(self.letters)
        try:
            if label[0] == "F" and len(label[1]) <= self.k:
                return self._fill_start[len(label[1])] + self._code(label[1])
            if label[0] == "O" and len(label[2]) == self.k + 1:
                return self.o_start + self._o_index[label[1]] * s ** (self.k + 1) + self._code(label[2])
            if label[0] == "I" and len(label[2]) == self.k:
                return self.i_start + self._i_index[label[1]] * s**self.k + self._code(label[2])
        except (KeyError, IndexError, TypeError):
            pass
        raise KeyError(label)


class LetterLabels:
    """Edge labels stored as indices into a shared letter table."""

    def __init__(self, letters, index):
        self.letters = tuple(letters)
        self.index = index

    def __len__(self):
        return len(self.index)

    def __getitem__(self, e):
        return self.letters[self.index[e]]

    def __iter__(self):
        return (self.letters[i] for i in self.index)


def _states_after_one_step(A: CostParityAutomaton) -> list:
    """States visited at some position ``n >= 1`` of some run from the initial state."""
    step = {q: {A.delta[(q, a, b)][0] for a in A.in_alphabet for b in A.out_alphabet} for q in A.states}
    seen = set(step[A.initial])
    stack = list(seen)
    while stack:
        for q2 in step[stack.pop()]:
            if q2 not in seen:
                seen.add(q2)
                stack.append(q2)
    return sorted(seen)


def build_fixed_lookahead_game(A: CostParityAutomaton, k: int, budget: int = DEFAULT_BUFFER_BUDGET) -> CostParityGame:
    """Product of ``A`` with a buffer of unanswered input letters.

    Vertex labels (see :class:`BufferLabels`):

    * ``("F", w)`` with ``|w| <= k``: Player I fills the initial buffer;
    * ``("O", q, w)`` with ``|w| = k + 1``: Player O answers ``w[0]``;
    * ``("I", q, w)`` with ``|w| = k``: Player I appends a letter.

    Edge labels are the input letter appended or the output letter chosen.
    Only states reachable in the automaton appear.  When two outputs lead
    to the same vertex with different cost flags, only the epsilon edge is
    kept since Player O would never pick the other one.
    """
    A.require_nontrivial()
    if k < 0:
        raise ValueError("lookahead must be non-negative")
    size = fixed_lookahead_size(A, k)
    if size > budget:
        raise ResourceError(f"buffer budget exceeded: |Q|*|Sigma_I|^(k+1) = {size} > {budget}", size)
    ins, outs = A.in_alphabet, A.out_alphabet
    s = len(ins)
    i_states = _states_after_one_step(A)
    o_states = sorted(set(i_states) | {A.initial})
    L = BufferLabels(ins, k, A.initial, o_states, i_states)
    sk, sk1 = s**k, s ** (k + 1)
    out_base = s  # edge letter ids: inputs first, then outputs
    letters = tuple(ins) + tuple(outs)
    i_pos = {q: i for i, q in enumerate(i_states)}
    o_pos = {q: i for i, q in enumerate(o_states)}

    owner = np.empty(L.n, dtype=np.uint8)
    colors = np.zeros(L.n, dtype=np.int64)
    owner[:L.o_start] = PLAYER_I
    owner[L.o_start:L.i_start] = PLAYER_O
    owner[L.i_start:] = PLAYER_I
    for q in i_states:
        start = L.i_start + i_pos[q] * sk
        colors[start:start + sk] = A.colors[q]

    degree = np.empty(L.n, dtype=np.int64)
    degree[:L.o_start] = s
    degree[L.i_start:] = s
    # per (state, first letter): merged output choices (target state, inc, output id)
    choices = {}
    for q in o_states:
        for ai, a in enumerate(ins):
            merged = {}
            for bi, b in enumerate(outs):
                q2, inc = A.delta[(q, a, b)]
                old = merged.get(q2)
                if old is None or (old[0] and not inc):
                    merged[q2] = (inc, bi)
            choices[(q, ai)] = [(q2, inc, bi) for q2, (inc, bi) in merged.items()]
            start = L.o_start + o_pos[q] * sk1 + ai * sk
            degree[start:start + sk] = len(choices[(q, ai)])
    offsets = np.zeros(L.n + 1, dtype=np.int64)
    np.cumsum(degree, out=offsets[1:])
    m = int(offsets[-1])
    targets = np.empty(m, dtype=np.int64)
    incs = np.zeros(m, dtype=np.uint8)
    elab = np.empty(m, dtype=np.int32 if len(letters) > 32000 else np.int16)
    letter_ids = np.arange(s, dtype=np.int64)

    # fill phase: ("F", w) -> ("F", w a) or ("O", q0, w a)
    for length in range(k + 1):
        first = L._fill_start[length]
        codes = np.arange(s**length, dtype=np.int64)
        nxt = (codes[:, None] * s + letter_ids[None, :]).ravel()
        if length < k:
            tgt = L._fill_start[length + 1] + nxt
        else:
            tgt = L.o_start + o_pos[A.initial] * sk1 + nxt
        e0 = offsets[first]
        targets[e0:e0 + len(tgt)] = tgt
        elab[e0:e0 + len(tgt)] = np.tile(letter_ids, s**length)

    # Player O answers the oldest letter: ("O", q, a w') -> ("I", q2, w')
    rest = np.arange(sk, dtype=np.int64)
    for q in o_states:
        for ai in range(s):
            opts = choices[(q, ai)]
            first = L.o_start + o_pos[q] * sk1 + ai * sk
            e0 = offsets[first]
            d = len(opts)
            block_t = np.empty((sk, d), dtype=np.int64)
            for j, (q2, inc, bi) in enumerate(opts):
                block_t[:, j] = L.i_start + i_pos[q2] * sk + rest
            targets[e0:e0 + sk * d] = block_t.ravel()
            incs[e0:e0 + sk * d] = np.tile(np.array([1 if inc else 0 for (_, inc, _) in opts], dtype=np.uint8), sk)
            elab[e0:e0 + sk * d] = np.tile(np.array([out_base + bi for (_, _, bi) in opts]), sk)

    # Player I appends a letter: ("I", q, w') -> ("O", q, w' a)
    nxt = (rest[:, None] * s + letter_ids[None, :]).ravel()
    for q in i_states:
        first = L.i_start + i_pos[q] * sk
        e0 = offsets[first]
        targets[e0:e0 + sk * s] = L.o_start + o_pos[q] * sk1 + nxt
        elab[e0:e0 + sk * s] = np.tile(letter_ids, sk)

    return CostParityGame(owner, colors, offsets, targets, incs, 0, L, LetterLabels(letters, elab))


def bisimulation_quotient(G: CostParityGame, seed: int = 0) -> tuple:
    """Coarsest partition whose members agree on owner and color as well as on
    their sets of (cost flag, successor class) pairs.

    Returns ``(Q, cls)`` with ``cls[v]`` the quotient vertex of ``v``.
    Bisimilar vertices produce the same color/cost traces under matching
    strategies, so winners and optimal bounds carry over.  Refinement uses
    random set hashes; the final partition is checked to be stable exactly
    and refined further if a collision slipped through.
    """
    n = G.n_vertices
    src = np.repeat(np.arange(n, dtype=np.int64), np.diff(G.offsets))
    tgt = G.targets.astype(np.int64)
    inc = G.incs.astype(np.int64)
    cls = np.unique(G.owner.astype(np.int64) << 40 | G.colors, return_inverse=True)[1].astype(np.int64).ravel()
    k = int(cls.max()) + 1
    rng = np.random.default_rng(seed)
    while True:
        key = cls[tgt] * 2 + inc
        pair = np.unique(src * (2 * k) + key)
        ps, pk = pair // (2 * k), pair % (2 * k)
        starts = np.flatnonzero(np.r_[True, ps[1:] != ps[:-1]])
        weights = rng.integers(0, np.iinfo(np.int64).max, size=2 * k, dtype=np.int64).astype(np.uint64)
        h = np.add.reduceat(weights[pk], starts)
        order = np.lexsort((h, cls))
        cs, hs = cls[order], h[order]
        brk = np.r_[True, (cs[1:] != cs[:-1]) | (hs[1:] != hs[:-1])]
        new = np.empty(n, dtype=np.int64)
        new[order] = np.cumsum(brk) - 1
        k2 = int(new.max()) + 1
        if k2 == k and _stable(cls, ps, pk, starts, k):
            break
        cls, k = new, k2
    # one representative per class supplies the quotient edges
    rep = np.full(k, -1, dtype=np.int64)
    rep[cls[::-1]] = np.arange(n - 1, -1, -1, dtype=np.int64)
    is_rep = np.zeros(n, dtype=bool)
    is_rep[rep] = True
    sel = is_rep[src]
    code = np.unique(cls[src[sel]] * (2 * k) + cls[tgt[sel]] * 2 + inc[sel])
    qs, qt, qi = code // (2 * k), (code // 2) % k, code % 2
    offsets = np.searchsorted(qs, np.arange(k + 1))
    Q = CostParityGame(G.owner[rep], G.colors[rep], offsets, qt, qi, int(cls[G.initial]))
    return Q, cls


def _stable(cls, ps, pk, starts, k) -> bool:
    """Whether all members of every class have the same (cost, class) successor set."""
    sizes = np.bincount(cls, minlength=k)
    counts = np.diff(np.r_[starts, len(ps)])
    lo = np.full(k, np.iinfo(np.int64).max)
    np.minimum.at(lo, cls, counts)
    if np.any(counts != lo[cls]):
        return False
    # equal set sizes plus every (class, key) pair shared by all members forces equal sets
    codes, shared = np.unique(cls[ps] * (2 * k) + pk, return_counts=True)
    return bool(np.all(shared == sizes[codes // (2 * k)]))


def build_abstract_game(A: CostParityAutomaton, classes: ClassSet, quotient: bool = False,
                        budget: Optional[int] = None) -> CostParityGame:
    """Delay-free arena over equivalence classes of input blocks.

    Labels use class indices into ``list(classes)``:

    * ``("vI",)``: the initial vertex of Player I;
    * ``("S", s, (q, t), 0)`` colored ``c0(t)`` and ``("S", s, (q, t), 1)``
      colored ``c1(t)``, with the edge between them carrying the cost flag of
      ``t``;
    * ``("O", s0, (q0, t0), s1)``: Player O picks ``(q1, t1)`` in ``r_{s0}(q0)``.

    With ``quotient=True`` Player O vertices forget ``t0``, which never
    influences the continuation, and Player I's choice of the next class
    goes through a color-0 hub ``("C", s, q)``.  This preserves the winner
    and all costs while shrinking the arena by a factor of ``|R|``.
    """
    A.require_nontrivial()
    if classes.automaton is not None and classes.automaton != A:
        raise ValueError("classes were computed for a different automaton")
    R = list(classes)
    m = len(R)
    B = _Builder()
    root, _ = B.vertex(("vI",), PLAYER_I, 0)
    qi = (A.initial, init_type(A, A.initial))
    queue = deque()

    def o_vertex(s0, typed, s1):
        if quotient:
            return B.vertex(("O", s0, typed[0], s1), PLAYER_O, 0)
        return B.vertex(("O", s0, typed, s1), PLAYER_O, 0)

    for s0 in range(m):
        for s1 in range(m):
            v, new = o_vertex(s0, qi, s1)
            B.edge(root, v, False, (s0, s1))
            if new:
                queue.append(v)
    while queue:
        u = queue.popleft()
        lab = B.labels[u]
        kind = lab[0]
        if kind == "O":
            s0, q0, s1 = lab[1], lab[2], lab[3]
            if not quotient:
                q0 = q0[0]
            for typed in R[s0][q0]:
                t = typed[1]
                v, new = B.vertex(("S", s1, typed, 0), PLAYER_I, t.c0 if t.c0 is not None else 0)
                B.edge(u, v, False, typed)
                if new:
                    queue.append(v)
        elif kind == "S":
            _, s, typed, phase = lab
            t = typed[1]
            if phase == 0:
                v, new = B.vertex(("S", s, typed, 1), PLAYER_I, t.c1 if t.c1 is not None else 0)
                B.edge(u, v, t.inc)
                if new:
                    queue.append(v)
            elif quotient:
                v, new = B.vertex(("C", s, typed[0]), PLAYER_I, 0)
                B.edge(u, v, False)
                if new:
                    queue.append(v)
            else:
                for s1 in range(m):
                    v, new = o_vertex(s, typed, s1)
                    B.edge(u, v, False, s1)
                    if new:
                        queue.append(v)
        else:
            _, s, q = lab
            for s1 in range(m):
                v, new = B.vertex(("O", s, q, s1), PLAYER_O, 0)
                B.edge(u, v, False, s1)
                if new:
                    queue.append(v)
        if budget is not None and len(B.labels) > budget:
            raise ResourceError(f"abstract game exceeds {budget} vertices", len(B.labels))
    return B.build(root)
