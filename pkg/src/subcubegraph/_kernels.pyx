# cython: language_level=3
"""Compiled hot loops.  Must stay behaviourally identical to _pykernels.py."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t, uint8_t, int32_t
from libc.stdlib cimport malloc, calloc, free
from libc.string cimport memset, memcpy

cnp.import_array()

cdef extern from *:
    int popcount64 "__builtin_popcountll"(unsigned long long) nogil
    int ctz64 "__builtin_ctzll"(unsigned long long) nogil

BACKEND = "compiled"


cdef inline uint64_t last_word_mask(int d) nogil:
    cdef int r = d % 64
    if r == 0:
        return <uint64_t>0xFFFFFFFFFFFFFFFF
    return (<uint64_t>1 << r) - 1


cdef struct Ctx:
    const uint64_t* F
    const uint64_t* V
    int W
    int d
    int n
    int32_t* buf       # (d + 2) levels of n survivor slots
    int32_t* cnt       # (d + 2) levels of d coordinate counters
    uint64_t* rem      # coordinates not yet branched on
    uint64_t* assign   # values chosen on branched coordinates
    uint64_t* witness
    int64_t best
    int64_t target
    int stop
    uint64_t* hist
    int early


cdef Ctx* ctx_new(const uint64_t* F, const uint64_t* V, int n, int W, int d):
    cdef Ctx* c = <Ctx*>calloc(1, sizeof(Ctx))
    c.F = F
    c.V = V
    c.n = n if n > 0 else 1
    c.W = W
    c.d = d
    c.buf = <int32_t*>malloc(sizeof(int32_t) * c.n * (d + 2))
    c.cnt = <int32_t*>malloc(sizeof(int32_t) * (d if d > 0 else 1) * (d + 2))
    c.rem = <uint64_t*>calloc(W, sizeof(uint64_t))
    c.assign = <uint64_t*>calloc(W, sizeof(uint64_t))
    c.witness = <uint64_t*>calloc(W, sizeof(uint64_t))
    if c.buf == NULL or c.cnt == NULL:
        raise MemoryError()
    return c


cdef void ctx_free(Ctx* c):
    free(c.buf)
    free(c.cnt)
    free(c.rem)
    free(c.assign)
    free(c.witness)
    free(c)


cdef int count_coords(Ctx* c, int level, int count, int* choice) nogil:
    """Tally fixed-and-unbranched coordinates over the survivors.

    Returns the number of survivors with no such coordinate and stores the
    most-fixed coordinate (lowest index on ties) in choice (-1 if none).
    """
    cdef int32_t* surv = c.buf + <int64_t>level * c.n
    cdef int32_t* cnt = c.cnt + <int64_t>level * c.d
    cdef int t, w, u, b, nfull = 0, anyfixed, best_c = -1, best_v = 0
    cdef uint64_t m
    memset(cnt, 0, sizeof(int32_t) * c.d)
    for t in range(count):
        u = surv[t]
        anyfixed = 0
        for w in range(c.W):
            m = c.F[<int64_t>u * c.W + w] & c.rem[w]
            if m:
                anyfixed = 1
            while m:
                b = ctz64(m)
                cnt[w * 64 + b] += 1
                m &= m - 1
        if not anyfixed:
            nfull += 1
    for t in range(c.d):
        if cnt[t] > best_v:
            best_v = cnt[t]
            best_c = t
    choice[0] = best_c
    return nfull


cdef int split(Ctx* c, int level, int count, int coord, int bit) nogil:
    """Copy survivors compatible with coordinate=bit into the next level."""
    cdef int32_t* surv = c.buf + <int64_t>level * c.n
    cdef int32_t* nxt = c.buf + <int64_t>(level + 1) * c.n
    cdef int wd = coord >> 6
    cdef uint64_t mb = (<uint64_t>1) << (coord & 63)
    cdef int t, u, k = 0
    cdef uint64_t want = mb if bit else 0
    for t in range(count):
        u = surv[t]
        if (c.F[<int64_t>u * c.W + wd] & mb) == 0 or (c.V[<int64_t>u * c.W + wd] & mb) == want:
            nxt[k] = u
            k += 1
    return k


cdef int branch_size(Ctx* c, int level, int count, int coord, int bit) nogil:
    cdef int32_t* surv = c.buf + <int64_t>level * c.n
    cdef int wd = coord >> 6
    cdef uint64_t mb = (<uint64_t>1) << (coord & 63)
    cdef uint64_t want = mb if bit else 0
    cdef int t, u, k = 0
    for t in range(count):
        u = surv[t]
        if (c.F[<int64_t>u * c.W + wd] & mb) == 0 or (c.V[<int64_t>u * c.W + wd] & mb) == want:
            k += 1
    return k


cdef void depth_rec(Ctx* c, int level, int count) nogil:
    cdef int choice, nfull, n0, n1, first, b, k, nb, wd
    cdef uint64_t mb
    if count <= c.best or c.best >= c.target:
        return
    nfull = count_coords(c, level, count, &choice)
    if nfull == count:
        c.best = count
        memcpy(c.witness, c.assign, sizeof(uint64_t) * c.W)
        return
    n0 = branch_size(c, level, count, choice, 0)
    n1 = branch_size(c, level, count, choice, 1)
    first = 0 if n0 >= n1 else 1
    wd = choice >> 6
    mb = (<uint64_t>1) << (choice & 63)
    for k in range(2):
        b = first if k == 0 else 1 - first
        nb = n0 if b == 0 else n1
        if nb <= c.best:
            continue
        split(c, level, count, choice, b)
        c.rem[wd] &= ~mb
        if b:
            c.assign[wd] |= mb
        depth_rec(c, level + 1, nb)
        c.rem[wd] |= mb
        c.assign[wd] &= ~mb
        if c.best >= c.target:
            return


cdef void unc_rec(Ctx* c, int level, int count, int remaining) nogil:
    cdef int choice, nfull, n0, n1, first, b, k, nb, wd
    cdef uint64_t mb
    if c.stop:
        return
    if count == 0:
        c.hist[remaining] += 1
        if c.early:
            c.stop = 1
        return
    nfull = count_coords(c, level, count, &choice)
    if nfull > 0:
        return
    n0 = branch_size(c, level, count, choice, 0)
    n1 = branch_size(c, level, count, choice, 1)
    # fewer survivors first: reaches an uncovered leaf sooner
    first = 0 if n0 <= n1 else 1
    wd = choice >> 6
    mb = (<uint64_t>1) << (choice & 63)
    for k in range(2):
        b = first if k == 0 else 1 - first
        nb = n0 if b == 0 else n1
        split(c, level, count, choice, b)
        c.rem[wd] &= ~mb
        unc_rec(c, level + 1, nb, remaining - 1)
        c.rem[wd] |= mb
        if c.stop:
            return


def coverage_depth(cnp.ndarray[cnp.uint64_t, ndim=2] fixed, cnp.ndarray[cnp.uint64_t, ndim=2] values, int d,
                   cnp.ndarray[cnp.int64_t, ndim=1] idx, cnp.ndarray[cnp.uint64_t, ndim=1] pre_fixed,
                   cnp.ndarray[cnp.uint64_t, ndim=1] pre_values, long long target, long long floor=0):
    """Maximum number of candidates idx containing a common point of the subcube (pre_fixed, pre_values).

    Stops once the depth reaches target.  Branches that cannot exceed floor are
    pruned, so the result is max(depth, floor).  Returns (depth, witness words).
    """
    cdef int n = fixed.shape[0], W = fixed.shape[1]
    cdef Ctx* c = ctx_new(<const uint64_t*>fixed.data, <const uint64_t*>values.data, max(n, idx.shape[0]), W, d)
    cdef int t, w, k = 0, u, ok
    cdef uint64_t lastmask = last_word_mask(d)
    try:
        for w in range(W):
            c.rem[w] = ~pre_fixed[w]
            c.assign[w] = pre_values[w] & pre_fixed[w]
        c.rem[W - 1] &= lastmask
        for t in range(idx.shape[0]):
            u = <int>idx[t]
            ok = 1
            for w in range(W):
                if (c.F[<int64_t>u * W + w] & pre_fixed[w] & (c.V[<int64_t>u * W + w] ^ pre_values[w])) != 0:
                    ok = 0
                    break
            if ok:
                c.buf[k] = u
                k += 1
        c.best = floor
        c.target = target
        memcpy(c.witness, c.assign, sizeof(uint64_t) * W)
        with nogil:
            depth_rec(c, 0, k)
        wit = np.empty(W, dtype=np.uint64)
        for w in range(W):
            wit[w] = c.witness[w]
        return int(c.best), wit
    finally:
        ctx_free(c)


def uncovered_histogram(cnp.ndarray[cnp.uint64_t, ndim=2] fixed, cnp.ndarray[cnp.uint64_t, ndim=2] values,
                        int d, bint early_exit):
    """Uncovered region of Q_d as a histogram: hist[j] = number of uncovered leaf subcubes of dimension j."""
    cdef int n = fixed.shape[0], W = fixed.shape[1]
    cdef Ctx* c = ctx_new(<const uint64_t*>fixed.data, <const uint64_t*>values.data, n, W, d)
    cdef int t, w
    hist = np.zeros(d + 1, dtype=np.uint64)
    cdef cnp.uint64_t[::1] hv = hist
    try:
        for w in range(W):
            c.rem[w] = <uint64_t>0xFFFFFFFFFFFFFFFF
        c.rem[W - 1] = last_word_mask(d)
        for t in range(n):
            c.buf[t] = t
        c.hist = &hv[0]
        c.early = early_exit
        c.stop = 0
        with nogil:
            unc_rec(c, 0, n, d)
        return hist
    finally:
        ctx_free(c)


def adjacency_rows(cnp.ndarray[cnp.uint64_t, ndim=2] fixed, cnp.ndarray[cnp.uint64_t, ndim=2] values):
    cdef int n = fixed.shape[0], W = fixed.shape[1]
    cdef int nw = max(1, (n + 63) // 64)
    rows = np.zeros((n, nw), dtype=np.uint64)
    cdef cnp.uint64_t[:, ::1] R = rows
    cdef const uint64_t* F = <const uint64_t*>fixed.data
    cdef const uint64_t* V = <const uint64_t*>values.data
    cdef int u, v, w, ok
    with nogil:
        for u in range(n):
            for v in range(u + 1, n):
                ok = 1
                for w in range(W):
                    if (F[<int64_t>u * W + w] & F[<int64_t>v * W + w] & (V[<int64_t>u * W + w] ^ V[<int64_t>v * W + w])) != 0:
                        ok = 0
                        break
                if ok:
                    R[u, v >> 6] |= (<uint64_t>1) << (v & 63)
                    R[v, u >> 6] |= (<uint64_t>1) << (u & 63)
    return rows


def c4_count(cnp.ndarray[cnp.uint64_t, ndim=2] rows):
    """Number of 4-cycles: half the sum over vertex pairs of C(common neighbours, 2)."""
    cdef int n = rows.shape[0], nw = rows.shape[1]
    cdef const uint64_t* R = <const uint64_t*>rows.data
    cdef int u, v, w
    cdef uint64_t c, total = 0
    with nogil:
        for u in range(n):
            for v in range(u + 1, n):
                c = 0
                for w in range(nw):
                    c += popcount64(R[<int64_t>u * nw + w] & R[<int64_t>v * nw + w])
                total += c * (c - 1) // 2
    return int(total // 2)


def clique_hitting_scan(cnp.ndarray[cnp.uint64_t, ndim=2] fixed, cnp.ndarray[cnp.uint64_t, ndim=2] values,
                        int d, int s, int start, int stop):
    """First v in [start, stop) such that vertices 0..v contain an s-clique through v; -1 if none."""
    cdef int n = fixed.shape[0], W = fixed.shape[1]
    cdef Ctx* c = ctx_new(<const uint64_t*>fixed.data, <const uint64_t*>values.data, n, W, d)
    cdef const uint64_t* F = c.F
    cdef const uint64_t* V = c.V
    cdef uint64_t lastmask = last_word_mask(d)
    cdef int v, u, w, k, ok, found = -1
    try:
        with nogil:
            for v in range(start, stop):
                k = 0
                for u in range(v):
                    ok = 1
                    for w in range(W):
                        if (F[<int64_t>u * W + w] & F[<int64_t>v * W + w] & (V[<int64_t>u * W + w] ^ V[<int64_t>v * W + w])) != 0:
                            ok = 0
                            break
                    if ok:
                        c.buf[k] = u
                        k += 1
                if k < s - 1:
                    continue
                for w in range(W):
                    c.rem[w] = ~F[<int64_t>v * W + w]
                    c.assign[w] = V[<int64_t>v * W + w]
                c.rem[W - 1] &= lastmask
                c.best = s - 2
                c.target = s - 1
                depth_rec(c, 0, k)
                if c.best >= s - 1:
                    found = v
                    break
        return found
    finally:
        ctx_free(c)


def paint_cover(cnp.ndarray[cnp.uint64_t, ndim=2] fixed, cnp.ndarray[cnp.uint64_t, ndim=2] values, int d,
                cnp.ndarray[cnp.uint8_t, ndim=1] bitmap, int start, int stop, long long uncovered):
    """Mark the points of subcubes start..stop-1 in a 2**d byte map.

    Returns (v, uncovered): v is the first index after which nothing is
    uncovered (-1 if that never happens in the range).
    """
    cdef uint8_t* bm = <uint8_t*>bitmap.data
    cdef const uint64_t* F = <const uint64_t*>fixed.data
    cdef const uint64_t* V = <const uint64_t*>values.data
    cdef int W = fixed.shape[1]
    cdef uint64_t full = last_word_mask(d) if d > 0 else 0
    cdef uint64_t free_, sub, base
    cdef int v, found = -1
    if d > 40:
        raise ValueError("paint_cover supports d <= 40")
    with nogil:
        for v in range(start, stop):
            base = V[<int64_t>v * W]
            free_ = full & ~F[<int64_t>v * W]
            sub = free_
            while True:
                if bm[base | sub] == 0:
                    bm[base | sub] = 1
                    uncovered -= 1
                if sub == 0:
                    break
                sub = (sub - 1) & free_
            if uncovered == 0:
                found = v
                break
    return found, uncovered
