"""Intersection graphs of feature families, stored as packed bit rows."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from . import kernels
from ._pykernels import pack_rows, unpack_rows
from .models import FeatureFamily

CLIQUE_ORACLE_LIMIT = 64


class OracleLimitExceeded(ValueError):
    pass


class IntersectionGraph:
    """Simple graph on n vertices; ``rows[u]`` has bit v set iff uv is an edge."""

    def __init__(self, n: int, rows: np.ndarray):
        rows = np.ascontiguousarray(rows, dtype=np.uint64)
        if rows.shape != (n, max(1, (n + 63) // 64)):
            raise ValueError("row array has the wrong shape")
        rows.flags.writeable = False
        self.n = n
        self.rows = rows

    @classmethod
    def from_dense(cls, adj) -> IntersectionGraph:
        adj = np.asarray(adj, dtype=bool)
        if adj.shape[0] != adj.shape[1] or not np.array_equal(adj, adj.T) or adj.diagonal().any():
            raise ValueError("adjacency must be symmetric with zero diagonal")
        return cls(adj.shape[0], pack_rows(adj))

    @classmethod
    def from_edges(cls, n: int, edges) -> IntersectionGraph:
        adj = np.zeros((n, n), dtype=bool)
        for u, v in edges:
            adj[u, v] = adj[v, u] = True
        return cls.from_dense(adj)

    def dense(self) -> np.ndarray:
        return unpack_rows(self.rows, self.n)

    def has_edge(self, u: int, v: int) -> bool:
        return bool((int(self.rows[u, v >> 6]) >> (v & 63)) & 1)

    def neighbor_mask(self, u: int) -> int:
        out = 0
        for w, x in enumerate(self.rows[u].tolist()):
            out |= int(x) << (64 * w)
        return out

    def degrees(self) -> np.ndarray:
        return self.dense().sum(axis=1)

    def edges(self):
        a = self.dense()
        us, vs = np.nonzero(np.triu(a, 1))
        return list(zip(us.tolist(), vs.tolist()))

    def edge_list_text(self) -> str:
        return "".join(f"{u} {v}\n" for u, v in self.edges())

    def save_edge_list(self, path) -> None:
        Path(path).write_text(self.edge_list_text())


def build_graph(family: FeatureFamily, backend: str | None = None) -> IntersectionGraph:
    k = kernels.get(backend)
    return IntersectionGraph(len(family), k.adjacency_rows(family.fixed, family.values))


def edge_count(g: IntersectionGraph) -> int:
    return int(np.unpackbits(g.rows.view(np.uint8)).sum()) // 2


def count_c4(g: IntersectionGraph, backend: str | None = None) -> int:
    """Number of (unlabelled) 4-cycles."""
    if g.n < 4:
        return 0
    return kernels.get(backend).c4_count(g.rows)


def bron_kerbosch_max_clique(g: IntersectionGraph, limit: int = CLIQUE_ORACLE_LIMIT) -> int:
    """Clique number by Bron-Kerbosch with Tomita pivoting (exact, exponential)."""
    if g.n > limit:
        raise OracleLimitExceeded(f"graph has {g.n} vertices, oracle limit is {limit}")
    nbr = [g.neighbor_mask(u) for u in range(g.n)]
    best = 0

    def expand(size: int, P: int, X: int) -> None:
        nonlocal best
        if not P and not X:
            best = max(best, size)
            return
        if size + P.bit_count() <= best:
            return
        # pivot maximising |P & N(u)|
        PX = P | X
        pivot, pc = -1, -1
        while PX:
            low = PX & -PX
            u = low.bit_length() - 1
            c = (P & nbr[u]).bit_count()
            if c > pc:
                pivot, pc = u, c
            PX ^= low
        cand = P & ~nbr[pivot]
        while cand:
            low = cand & -cand
            v = low.bit_length() - 1
            expand(size + 1, P & nbr[v], X & nbr[v])
            P &= ~low
            X |= low
            cand ^= low

    expand(0, (1 << g.n) - 1, 0)
    return best
