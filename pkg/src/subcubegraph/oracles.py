"""Brute-force reference implementations used by selftest and the tests.

These enumerate points, pairs or vertex sets directly and share no code with
the fast paths beyond the family representation.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from .models import FeatureFamily


def _point_membership(family: FeatureFamily) -> np.ndarray:
    """(2**d, n) bool: point y lies in member v.  Needs d <= 20."""
    d = family.d
    if d > 20:
        raise ValueError("point enumeration is limited to d <= 20")
    pts = np.arange(1 << d, dtype=np.uint64)
    f = family.fixed[:, 0]
    v = family.values[:, 0]
    if len(family) == 0:
        return np.zeros((1 << d, 0), dtype=bool)
    return ((pts[:, None] ^ v[None, :]) & f[None, :]) == 0


def uncovered_by_scan(family: FeatureFamily) -> int:
    cov = _point_membership(family)
    return int((~cov.any(axis=1)).sum()) if cov.shape[1] else 1 << family.d


def depth_by_scan(family: FeatureFamily) -> int:
    cov = _point_membership(family)
    return int(cov.sum(axis=1).max()) if cov.shape[1] else 0


def adjacency_by_pairs(family: FeatureFamily) -> np.ndarray:
    subs = list(family)
    n = len(subs)
    adj = np.zeros((n, n), dtype=bool)
    for u in range(n):
        for v in range(u + 1, n):
            a, b = subs[u], subs[v]
            if not (a.fixed & b.fixed & (a.values ^ b.values)):
                adj[u, v] = adj[v, u] = True
    return adj


def c4_by_enumeration(adj: np.ndarray) -> int:
    """Unlabelled 4-cycles: each 4-set carries up to three of them."""
    n = adj.shape[0]
    total = 0
    for a, b, c, d in itertools.combinations(range(n), 4):
        for w, x, y, z in ((a, b, c, d), (a, b, d, c), (a, c, b, d)):
            if adj[w, x] and adj[x, y] and adj[y, z] and adj[z, w]:
                total += 1
    return total


def _all_k_subcubes(d: int, k: int):
    """Every k-dimensional subcube of Q_d as (fixed, values) int pairs."""
    full = (1 << d) - 1
    for free in itertools.combinations(range(d), k):
        fmask = full
        for i in free:
            fmask &= ~(1 << i)
        sub = fmask
        # enumerate every value assignment on the fixed coordinates
        while True:
            yield fmask, sub
            if sub == 0:
                break
            sub = (sub - 1) & fmask


def uniform_edge_prob_by_enumeration(d: int, k: int) -> Fraction:
    cubes = list(_all_k_subcubes(d, k))
    f = np.array([c[0] for c in cubes], dtype=np.int64)
    v = np.array([c[1] for c in cubes], dtype=np.int64)
    meet = 0
    for i in range(len(cubes)):
        meet += int(np.count_nonzero((f[i] & f & (v[i] ^ v)) == 0))
    return Fraction(meet, len(cubes) ** 2)


# per-coordinate states of a binomial subcube: 0, 1, or free
_STATES = ((0, 0), (0, 1), (1, None))


def _state_weight(st, p: Fraction) -> Fraction:
    return p if st[0] else (1 - p) / 2


def _meets(a, b) -> bool:
    return a[0] or b[0] or a[1] == b[1]


def coordinate_prob(m: int, event, p) -> Fraction:
    """Exact probability that m independent one-coordinate states satisfy ``event``."""
    p = Fraction(p)
    total = Fraction(0)
    for combo in itertools.product(_STATES, repeat=m):
        if event(combo):
            w = Fraction(1)
            for st in combo:
                w *= _state_weight(st, p)
            total += w
    return total


def clique_coordinate_prob(s: int, p) -> Fraction:
    """All s states share a value: the per-coordinate clique probability."""
    return coordinate_prob(s, lambda c: any(all(st[0] or st[1] == b for st in c) for b in (0, 1)), p)


def c4_coordinate_prob(p) -> Fraction:
    return coordinate_prob(4, lambda c: all(_meets(c[i], c[(i + 1) % 4]) for i in range(4)), p)


def joint_clique_coordinate_prob(s: int, i: int, p) -> Fraction:
    """Two s-sets overlapping in i states (2s - i states in total) both share a value."""
    def both(c):
        a, b = c[:s], c[s - i:]
        return all(any(all(st[0] or st[1] == bit for st in grp) for bit in (0, 1)) for grp in (a, b))
    return coordinate_prob(2 * s - i, both, p)
