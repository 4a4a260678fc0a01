# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled kernels: bounded-counter product and recursive parity solving.

Same interface and semantics as ``_kernel_py``.
"""

from libc.stdint cimport int32_t, int64_t, uint8_t
from libcpp.vector cimport vector
from libcpp.unordered_map cimport unordered_map
from cython.operator cimport dereference as deref

import numpy as np

DEF MAX_DIGITS = 64


cdef class _Zielonka:
    cdef int64_t n
    cdef vector[uint8_t] owner
    cdef vector[int64_t] color
    cdef vector[int64_t] off
    cdef vector[int32_t] tgt
    cdef vector[int32_t] src
    cdef vector[int64_t] poff
    cdef vector[int64_t] pedge
    cdef vector[int32_t] alive
    cdef vector[uint8_t] winner
    cdef vector[int64_t] strat
    cdef vector[int64_t] mark
    cdef vector[int64_t] cmark
    cdef vector[int64_t] cnt
    cdef int64_t stamp

    def __init__(self, const uint8_t[:] owner, const int64_t[:] colors, const int64_t[:] offsets, const int32_t[:] targets):
        cdef int64_t n = owner.shape[0]
        cdef int64_t m = targets.shape[0]
        cdef int64_t u, e, v
        self.n = n
        self.owner.resize(n)
        self.color.resize(n)
        self.off.resize(n + 1)
        self.tgt.resize(m)
        self.src.resize(m)
        for u in range(n):
            self.owner[u] = owner[u]
            self.color[u] = colors[u]
        for u in range(n + 1):
            self.off[u] = offsets[u]
        for e in range(m):
            self.tgt[e] = targets[e]
        for u in range(n):
            for e in range(offsets[u], offsets[u + 1]):
                self.src[e] = <int32_t>u
        self.poff.assign(n + 1, 0)
        for e in range(m):
            self.poff[self.tgt[e] + 1] += 1
        for v in range(n):
            self.poff[v + 1] += self.poff[v]
        self.pedge.resize(m)
        cdef vector[int64_t] fill = self.poff
        for e in range(m):
            v = self.tgt[e]
            self.pedge[fill[v]] = e
            fill[v] += 1
        self.alive.assign(n, 0)
        self.winner.assign(n, 0)
        self.strat.assign(n, -1)
        self.mark.assign(n, 0)
        self.cmark.assign(n, 0)
        self.cnt.assign(n, 0)
        self.stamp = 0

    cdef void attract(self, int32_t d, vector[int32_t]& base, int p, vector[int32_t]& out) noexcept nogil:
        cdef size_t i, head
        cdef int32_t v, u
        cdef int64_t e, f, f2, s
        self.stamp += 1
        s = self.stamp
        out.clear()
        for i in range(base.size()):
            v = base[i]
            self.mark[v] = s
            out.push_back(v)
        head = 0
        while head < out.size():
            v = out[head]
            head += 1
            for e in range(self.poff[v], self.poff[v + 1]):
                f = self.pedge[e]
                u = self.src[f]
                if self.alive[u] < d or self.mark[u] == s:
                    continue
                if self.owner[u] == p:
                    self.mark[u] = s
                    self.strat[u] = f
                    out.push_back(u)
                else:
                    if self.cmark[u] != s:
                        self.cmark[u] = s
                        self.cnt[u] = 0
                        for f2 in range(self.off[u], self.off[u + 1]):
                            if self.alive[self.tgt[f2]] >= d:
                                self.cnt[u] += 1
                    self.cnt[u] -= 1
                    if self.cnt[u] == 0:
                        self.mark[u] = s
                        out.push_back(u)

    cdef void solve(self, int32_t d, vector[int32_t] verts) noexcept nogil:
        cdef vector[int32_t] top_set, A, sub, opp, B, rest
        cdef size_t i
        cdef int32_t v
        cdef int64_t top, e, sA
        cdef int p
        while verts.size() > 0:
            top = -1
            for i in range(verts.size()):
                if self.color[verts[i]] > top:
                    top = self.color[verts[i]]
            p = 1 - <int>(top & 1)
            top_set.clear()
            for i in range(verts.size()):
                if self.color[verts[i]] == top:
                    top_set.push_back(verts[i])
            self.attract(d, top_set, p, A)
            sA = self.stamp
            sub.clear()
            for i in range(verts.size()):
                if self.mark[verts[i]] != sA:
                    sub.push_back(verts[i])
            opp.clear()
            if sub.size() > 0:
                for i in range(sub.size()):
                    self.alive[sub[i]] = d + 1
                self.solve(d + 1, sub)
                for i in range(sub.size()):
                    self.alive[sub[i]] = d
                for i in range(sub.size()):
                    if self.winner[sub[i]] != p:
                        opp.push_back(sub[i])
            if opp.size() == 0:
                for i in range(A.size()):
                    self.winner[A[i]] = p
                for i in range(top_set.size()):
                    v = top_set[i]
                    if self.owner[v] == p:
                        for e in range(self.off[v], self.off[v + 1]):
                            if self.alive[self.tgt[e]] >= d:
                                self.strat[v] = e
                                break
                return
            self.attract(d, opp, 1 - p, B)
            for i in range(B.size()):
                self.winner[B[i]] = 1 - p
                self.alive[B[i]] = d - 1
            rest.clear()
            for i in range(verts.size()):
                if self.alive[verts[i]] >= d:
                    rest.push_back(verts[i])
            verts.swap(rest)

    def run(self):
        cdef vector[int32_t] verts
        cdef int64_t v
        for v in range(self.n):
            verts.push_back(<int32_t>v)
        with nogil:
            self.solve(0, verts)
        winner = np.empty(self.n, dtype=np.uint8)
        strategy = np.empty(self.n, dtype=np.int64)
        cdef uint8_t[:] w = winner
        cdef int64_t[:] s = strategy
        for v in range(self.n):
            w[v] = self.winner[v]
            s[v] = self.strat[v] if self.owner[v] == self.winner[v] else -1
        return winner, strategy


def solve_parity(owner, colors, offsets, targets):
    """Recursive attractor decomposition for max-parity games."""
    solver = _Zielonka(
        np.ascontiguousarray(owner, dtype=np.uint8),
        np.ascontiguousarray(colors, dtype=np.int64),
        np.ascontiguousarray(offsets, dtype=np.int64),
        np.ascontiguousarray(targets, dtype=np.int32),
    )
    return solver.run()


def build_product(owner, colors, offsets, targets, incs, odd, bound, roots, limit):
    """Reachable part of the bounded-counter product (see ``_kernel_py``)."""
    span_py = (int(bound) + 2) ** len(odd)
    if len(colors) * span_py * 2 >= (1 << 62):
        raise OverflowError("counter encoding does not fit in 64 bits")
    cdef int64_t b = bound
    cdef int64_t lim = limit
    cdef const int64_t[:] col = np.ascontiguousarray(colors, dtype=np.int64)
    cdef const int64_t[:] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef const int32_t[:] tgt = np.ascontiguousarray(targets, dtype=np.int32)
    cdef const uint8_t[:] inc = np.ascontiguousarray(incs, dtype=np.uint8)
    cdef const int64_t[:] oddc = np.ascontiguousarray(odd, dtype=np.int64)
    cdef const int64_t[:] rts = np.ascontiguousarray(roots, dtype=np.int64)
    cdef int m = oddc.shape[0]
    if m > MAX_DIGITS:
        raise ValueError("too many odd colors")
    cdef int64_t base = b + 2
    cdef int64_t n = col.shape[0]
    cdef int64_t span = span_py
    cdef int64_t maxc = 0
    cdef int64_t i, v, w, e, code, code2, key, c, head
    cdef int ovf, j
    for i in range(n):
        if col[i] > maxc:
            maxc = col[i]
    cdef vector[int] pos
    pos.assign(maxc + 1, -1)
    for j in range(m):
        if oddc[j] <= maxc:
            pos[oddc[j]] = j
    cdef int64_t digits[MAX_DIGITS]
    cdef int64_t dg[MAX_DIGITS]
    cdef unordered_map[int64_t, int32_t] index
    cdef unordered_map[int64_t, int32_t].iterator it
    cdef vector[int32_t] pv
    cdef vector[int64_t] pcode
    cdef vector[uint8_t] povf
    cdef vector[int64_t] poff
    cdef vector[int32_t] ptgt
    cdef vector[int64_t] porigin
    cdef int32_t pid
    root_ids = np.empty(rts.shape[0], dtype=np.int64)
    cdef int64_t[:] rid = root_ids
    for i in range(rts.shape[0]):
        key = rts[i] * span * 2
        it = index.find(key)
        if it == index.end():
            pid = <int32_t>pv.size()
            index[key] = pid
            pv.push_back(<int32_t>rts[i])
            pcode.push_back(0)
            povf.push_back(0)
        else:
            pid = deref(it).second
        rid[i] = pid
    cdef bint over_limit = False
    with nogil:
        head = 0
        while head < <int64_t>pv.size():
            v = pv[head]
            code = pcode[head]
            head += 1
            poff.push_back(<int64_t>ptgt.size())
            for j in range(m):
                digits[j] = code % base
                code = code // base
            for e in range(off[v], off[v + 1]):
                w = tgt[e]
                for j in range(m):
                    dg[j] = digits[j]
                ovf = 0
                if inc[e]:
                    for j in range(m):
                        if dg[j] != 0:
                            dg[j] += 1
                            if dg[j] > b + 1:
                                dg[j] = 0
                                ovf = 1
                c = col[w]
                if c % 2 == 0:
                    for j in range(m):
                        if oddc[j] < c:
                            dg[j] = 0
                else:
                    j = pos[c]
                    if dg[j] == 0:
                        dg[j] = 1
                code2 = 0
                for j in range(m - 1, -1, -1):
                    code2 = code2 * base + dg[j]
                key = (w * span + code2) * 2 + ovf
                it = index.find(key)
                if it == index.end():
                    pid = <int32_t>pv.size()
                    if pid >= lim:
                        over_limit = True
                        break
                    index[key] = pid
                    pv.push_back(<int32_t>w)
                    pcode.push_back(code2)
                    povf.push_back(<uint8_t>ovf)
                else:
                    pid = deref(it).second
                ptgt.push_back(pid)
                porigin.push_back(e)
            if over_limit:
                break
        poff.push_back(<int64_t>ptgt.size())
    if over_limit:
        raise MemoryError(lim)
    return {
        "base": np.asarray(<int32_t[:pv.size()]> pv.data()).copy() if pv.size() else np.zeros(0, np.int32),
        "code": np.asarray(<int64_t[:pcode.size()]> pcode.data()).copy() if pcode.size() else np.zeros(0, np.int64),
        "overflow": np.asarray(<uint8_t[:povf.size()]> povf.data()).copy() if povf.size() else np.zeros(0, np.uint8),
        "offsets": np.asarray(<int64_t[:poff.size()]> poff.data()).copy(),
        "targets": np.asarray(<int32_t[:ptgt.size()]> ptgt.data()).copy() if ptgt.size() else np.zeros(0, np.int32),
        "origin": np.asarray(<int64_t[:porigin.size()]> porigin.data()).copy() if porigin.size() else np.zeros(0, np.int64),
        "roots": root_ids,
    }
