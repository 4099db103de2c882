"""Pure-Python versions of the compiled kernels (same signatures, same results).

Masks are handled as Python ints; the branching rules (most-fixed coordinate,
lowest index on ties; larger branch first with bit 0 on ties) match _kernels.pyx
exactly, so witnesses agree between backends.
"""

from __future__ import annotations

import sys

import numpy as np

BACKEND = "python"


def _as_ints(arr: np.ndarray) -> list[int]:
    w = arr.shape[1]
    out = [0] * arr.shape[0]
    for j in range(w):
        col = arr[:, j].tolist()
        shift = 64 * j
        for i, x in enumerate(col):
            out[i] |= int(x) << shift
    return out


def _to_words(x: int, w: int) -> np.ndarray:
    return np.array([(x >> (64 * j)) & 0xFFFFFFFFFFFFFFFF for j in range(w)], dtype=np.uint64)


def _choose(F, surv, rem):
    """(number of survivors free on rem, most-fixed coordinate or -1)."""
    counts: dict[int, int] = {}
    nfull = 0
    for u in surv:
        m = F[u] & rem
        if not m:
            nfull += 1
            continue
        while m:
            low = m & -m
            b = low.bit_length() - 1
            counts[b] = counts.get(b, 0) + 1
            m ^= low
    if not counts:
        return nfull, -1
    best = max(counts.values())
    return nfull, min(b for b, c in counts.items() if c == best)


def _branch(F, Vv, surv, coord, bit):
    mb = 1 << coord
    want = mb if bit else 0
    return [u for u in surv if not (F[u] & mb) or (Vv[u] & mb) == want]


class _Depth:
    def __init__(self, F, Vv, target, floor=0):
        self.F, self.V, self.target = F, Vv, target
        self.best = floor
        self.witness = 0

    def run(self, surv, rem, assign):
        if len(surv) <= self.best or self.best >= self.target:
            return
        nfull, c = _choose(self.F, surv, rem)
        if nfull == len(surv):
            self.best = len(surv)
            self.witness = assign
            return
        b0 = _branch(self.F, self.V, surv, c, 0)
        b1 = _branch(self.F, self.V, surv, c, 1)
        order = [(0, b0), (1, b1)] if len(b0) >= len(b1) else [(1, b1), (0, b0)]
        mb = 1 << c
        for bit, br in order:
            if len(br) <= self.best:
                continue
            self.run(br, rem & ~mb, assign | (mb if bit else 0))
            if self.best >= self.target:
                return


def _full(d: int) -> int:
    return (1 << d) - 1


def coverage_depth(fixed, values, d, idx, pre_fixed, pre_values, target, floor=0):
    F = _as_ints(fixed)
    Vv = _as_ints(values)
    pf = _as_ints(pre_fixed[None, :])[0]
    pv = _as_ints(pre_values[None, :])[0] & pf
    surv = [int(u) for u in idx if not (F[u] & pf & (Vv[u] ^ pv))]
    job = _Depth(F, Vv, target, floor)
    job.witness = pv
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * d + 100))
    job.run(surv, _full(d) & ~pf, pv)
    return job.best, _to_words(job.witness, fixed.shape[1])


def uncovered_histogram(fixed, values, d, early_exit):
    F = _as_ints(fixed)
    Vv = _as_ints(values)
    hist = np.zeros(d + 1, dtype=np.uint64)
    stop = False

    def rec(surv, rem, remaining):
        nonlocal stop
        if stop:
            return
        if not surv:
            hist[remaining] += np.uint64(1)
            if early_exit:
                stop = True
            return
        nfull, c = _choose(F, surv, rem)
        if nfull:
            return
        b0 = _branch(F, Vv, surv, c, 0)
        b1 = _branch(F, Vv, surv, c, 1)
        mb = 1 << c
        for br in ((b0, b1) if len(b0) <= len(b1) else (b1, b0)):
            rec(br, rem & ~mb, remaining - 1)
            if stop:
                return

    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * d + 100))
    rec(list(range(len(F))), _full(d), d)
    return hist


def _pair_block(fixed, values, rows_sl, cols_sl):
    f1, v1 = fixed[rows_sl, None, :], values[rows_sl, None, :]
    f2, v2 = fixed[None, cols_sl, :], values[None, cols_sl, :]
    return ~np.any(f1 & f2 & (v1 ^ v2), axis=2)


def adjacency_dense(fixed, values) -> np.ndarray:
    n = fixed.shape[0]
    adj = np.zeros((n, n), dtype=bool)
    step = max(1, 2_000_000 // max(1, n * fixed.shape[1]))
    for a in range(0, n, step):
        sl = slice(a, min(n, a + step))
        adj[sl] = _pair_block(fixed, values, sl, slice(None))
    np.fill_diagonal(adj, False)
    return adj


def pack_rows(adj: np.ndarray) -> np.ndarray:
    n = adj.shape[0]
    nw = max(1, (n + 63) // 64)
    padded = np.zeros((n, 64 * nw), dtype=bool)
    padded[:, :n] = adj
    return np.packbits(padded, axis=1, bitorder="little").view("<u8").astype(np.uint64).reshape(n, nw)


def unpack_rows(rows: np.ndarray, n: int) -> np.ndarray:
    raw = np.ascontiguousarray(rows.astype("<u8")).view(np.uint8).reshape(rows.shape[0], 8 * rows.shape[1])
    return np.unpackbits(raw, axis=1, bitorder="little")[:, :n].astype(bool)


def adjacency_rows(fixed, values):
    return pack_rows(adjacency_dense(fixed, values))


def c4_count(rows):
    n = rows.shape[0]
    a = unpack_rows(rows, n).astype(np.float64)
    common = a @ a  # exact: entries <= n < 2**53
    iu = np.triu_indices(n, 1)
    c = common[iu].astype(np.int64)
    return int((c * (c - 1) // 2).sum() // 2)


def clique_hitting_scan(fixed, values, d, s, start, stop):
    F = _as_ints(fixed)
    Vv = _as_ints(values)
    full = _full(d)
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * d + 100))
    for v in range(start, stop):
        fv, vv = F[v], Vv[v]
        nbrs = [u for u in range(v) if not (F[u] & fv & (Vv[u] ^ vv))]
        if len(nbrs) < s - 1:
            continue
        job = _Depth(F, Vv, s - 1, s - 2)
        job.run(nbrs, full & ~fv, vv)
        if job.best >= s - 1:
            return v
    return -1


def paint_cover(fixed, values, d, bitmap, start, stop, uncovered):
    if d > 40:
        raise ValueError("paint_cover supports d <= 40")
    full = _full(d)
    for v in range(start, stop):
        base = int(values[v, 0])
        free = full & ~int(fixed[v, 0])
        bits = [1 << i for i in range(d) if (free >> i) & 1]
        offs = np.zeros(1, dtype=np.int64)
        for b in bits:
            offs = np.concatenate([offs, offs + b])
        pts = base | offs
        fresh = int(np.count_nonzero(bitmap[pts] == 0))
        bitmap[pts] = 1
        uncovered -= fresh
        if uncovered == 0:
            return v, 0
    return -1, uncovered
