"""Exact structural analysis of feature families.

By the Helly property of subcubes, a set of vertices is a clique iff their
feature subcubes share a point, so the clique number of the intersection
graph is the maximum number of family members containing a single point of
Q_d.  Everything here is computed by branching on coordinates; no graph is
built except in ``clique_members``.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from . import kernels
from .cube import Point, nwords
from .models import FamilyStream, FeatureFamily, ModelParams, SeedSpec

# largest d for which covering hitting times use a 2**d byte map
BITMAP_MAX_D = 26
_NO_TARGET = 2**62


@dataclass(frozen=True)
class Clique:
    s: int

    def __post_init__(self):
        if self.s < 1:
            raise ValueError("clique size must be >= 1")

    def __str__(self) -> str:
        return f"clique:{self.s}"


@dataclass(frozen=True)
class Cover:
    def __str__(self) -> str:
        return "cover"


Property = Clique | Cover


def parse_property(text: str) -> Property:
    text = text.strip().lower()
    if text == "cover":
        return Cover()
    name, _, s = text.partition(":")
    if name in ("clique", "k") and s:
        return Clique(int(s))
    raise ValueError(f"unknown property {text!r} (use 'cover' or 'clique:S')")


@dataclass(frozen=True)
class DepthWitness:
    depth: int
    witness: Point
    count: int

    def to_json(self) -> dict:
        return {"depth": self.depth, "witness": str(self.witness), "count": self.count}


@dataclass(frozen=True)
class CliqueMembership:
    s: int
    members: tuple[int, ...]
    member_dimensions: tuple[int, ...]

    def to_json(self) -> dict:
        return asdict(self) | {"members": list(self.members), "member_dimensions": list(self.member_dimensions)}

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def _point(d: int, ws: np.ndarray) -> Point:
    bits = 0
    for w, x in enumerate(ws.tolist()):
        bits |= int(x) << (64 * w)
    return Point(d, bits & ((1 << d) - 1))


def containing(family: FeatureFamily, y: Point) -> np.ndarray:
    """Boolean mask of family members containing y."""
    w = nwords(family.d)
    yw = np.array([(y.bits >> (64 * j)) & 0xFFFFFFFFFFFFFFFF for j in range(w)], dtype=np.uint64)
    return ~np.any(family.fixed & (family.values ^ yw), axis=1)


def max_coverage_depth(family: FeatureFamily, backend: str | None = None) -> DepthWitness:
    k = kernels.get(backend)
    w = nwords(family.d)
    zero = np.zeros(w, dtype=np.uint64)
    idx = np.arange(len(family), dtype=np.int64)
    depth, wit = k.coverage_depth(family.fixed, family.values, family.d, idx, zero, zero, _NO_TARGET)
    y = _point(family.d, wit)
    return DepthWitness(depth, y, int(containing(family, y).sum()))


def clique_number(family: FeatureFamily, backend: str | None = None) -> int:
    """Clique number of build_graph(family) (equal to the maximum coverage depth)."""
    return max_coverage_depth(family, backend).depth


def clique_members(family: FeatureFamily, s: int, backend: str | None = None) -> CliqueMembership:
    """Vertices lying in at least one s-clique, with their feature dimensions."""
    if s < 1:
        raise ValueError("s must be >= 1")
    n = len(family)
    dims = family.dimensions()
    if s == 1:
        return CliqueMembership(1, tuple(range(n)), tuple(int(x) for x in dims))
    k = kernels.get(backend)
    rows = k.adjacency_rows(family.fixed, family.values)
    degree = np.bitwise_count(rows).sum(axis=1)
    members = []
    for v in np.flatnonzero(degree >= s - 1).tolist():
        bits = np.unpackbits(rows[v].view(np.uint8), bitorder="little")[:n]
        idx = np.append(np.flatnonzero(bits), v).astype(np.int64)
        depth, _ = k.coverage_depth(family.fixed, family.values, family.d, idx,
                                    family.fixed[v], family.values[v], s, s - 1)
        if depth >= s:
            members.append(v)
    return CliqueMembership(s, tuple(members), tuple(int(dims[v]) for v in members))


def uncovered_count(family: FeatureFamily, backend: str | None = None) -> int:
    """Exact number of points of Q_d outside the union of the family."""
    hist = kernels.get(backend).uncovered_histogram(family.fixed, family.values, family.d, False)
    return sum(int(c) << j for j, c in enumerate(hist.tolist()))


def is_cover(family: FeatureFamily, backend: str | None = None) -> bool:
    hist = kernels.get(backend).uncovered_histogram(family.fixed, family.values, family.d, True)
    return not hist.any()


def _first_cover_bitmap(stream: FamilyStream, n_max: int, k) -> int | None:
    d = stream.params.d
    bitmap = np.zeros(1 << d, dtype=np.uint8)
    uncovered = 1 << d
    done, size = 0, 0
    while done < n_max:
        size = min(n_max, max(64, 2 * size))
        stream.grow_to(size)
        found, uncovered = k.paint_cover(stream.fixed[:size], stream.values[:size], d, bitmap, done, size, uncovered)
        if found >= 0:
            return found + 1
        done = size
    return None


def _first_cover_search(stream: FamilyStream, n_max: int, k) -> int | None:
    # covering is monotone along a prefix-consistent stream: gallop, then bisect
    def covered(n: int) -> bool:
        stream.grow_to(n)
        return is_cover(FeatureFamily(stream.params.d, stream.fixed[:n], stream.values[:n]), k.BACKEND)

    lo, hi = 0, 1
    while not covered(hi):
        if hi >= n_max:
            return None
        lo, hi = hi, min(n_max, 2 * hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if covered(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _first_clique(stream: FamilyStream, s: int, n_max: int, k) -> int | None:
    d = stream.params.d
    done, size = 0, 0
    while done < n_max:
        size = min(n_max, max(64, 2 * size))
        stream.grow_to(size)
        found = k.clique_hitting_scan(stream.fixed[:size], stream.values[:size], d, s, done, size)
        if found >= 0:
            return found + 1
        done = size
    return None


def hitting_time(params: ModelParams, prop: Property, seed: SeedSpec, n_max: int = 10**7,
                 backend: str | None = None, return_family: bool = False):
    """First n at which the first n sampled subcubes have the property.

    Returns None when n_max is reached without the property (saturated).  With
    return_family=True returns (n, family of the first n subcubes).
    """
    k = kernels.get(backend)
    stream = FamilyStream(params, seed)
    if isinstance(prop, Clique):
        if n_max < 1:
            n = None
        elif prop.s == 1:
            n = 1
        else:
            n = _first_clique(stream, prop.s, n_max, k)
    elif isinstance(prop, Cover):
        if params.d <= BITMAP_MAX_D:
            n = _first_cover_bitmap(stream, n_max, k)
        else:
            n = _first_cover_search(stream, n_max, k)
    else:
        raise TypeError(f"unknown property {prop!r}")
    if return_family:
        return n, stream.family(n if n is not None else stream.size)
    return n


def has_property(family: FeatureFamily, prop: Property, backend: str | None = None) -> bool:
    if isinstance(prop, Cover):
        return is_cover(family, backend)
    if len(family) < prop.s:
        return False
    k = kernels.get(backend)
    w = nwords(family.d)
    zero = np.zeros(w, dtype=np.uint64)
    idx = np.arange(len(family), dtype=np.int64)
    depth, _ = k.coverage_depth(family.fixed, family.values, family.d, idx, zero, zero, prop.s, prop.s - 1)
    return depth >= prop.s
