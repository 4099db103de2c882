"""Subcubes of the hypercube Q_d = {0,1}^d.

A subcube is a word over {0, 1, *}: starred coordinates are free, the rest are
fixed.  It is stored as two bit masks over the d coordinates (bit i of an
integer <-> coordinate i):

* ``fixed``  -- bit set iff the coordinate is fixed,
* ``values`` -- the fixed value, always 0 on free coordinates (canonical form,
  so equal subcubes compare equal bit for bit).

Coordinate 0 is the leftmost character of the text form.
"""

from __future__ import annotations

from dataclasses import dataclass

STAR = "*"
_STAR_CHARS = "*⋆"  # '*' and the math star


class DimensionMismatch(ValueError):
    pass


def _full(d: int) -> int:
    return (1 << d) - 1


@dataclass(frozen=True)
class Point:
    """An element of Q_d."""

    d: int
    bits: int

    def __post_init__(self):
        if self.d < 0:
            raise ValueError("d must be non-negative")
        if self.bits < 0 or self.bits >> self.d:
            raise ValueError(f"point bits out of range for d={self.d}")

    @classmethod
    def parse(cls, text: str) -> Point:
        text = text.strip()
        bits = 0
        for i, ch in enumerate(text):
            if ch == "1":
                bits |= 1 << i
            elif ch != "0":
                raise ValueError(f"invalid point character {ch!r} at position {i}")
        return cls(len(text), bits)

    def __str__(self) -> str:
        return "".join("1" if (self.bits >> i) & 1 else "0" for i in range(self.d))

    def complement(self) -> Point:
        return Point(self.d, self.bits ^ _full(self.d))


@dataclass(frozen=True)
class Subcube:
    d: int
    fixed: int
    values: int

    def __post_init__(self):
        if self.d < 0:
            raise ValueError("d must be non-negative")
        if self.fixed < 0 or self.fixed >> self.d:
            raise ValueError(f"fixed mask out of range for d={self.d}")
        if self.values & ~self.fixed:
            raise ValueError("values must be 0 on free coordinates")

    @classmethod
    def full(cls, d: int) -> Subcube:
        return cls(d, 0, 0)

    @classmethod
    def from_point(cls, y: Point) -> Subcube:
        return cls(y.d, _full(y.d), y.bits)

    @classmethod
    def parse(cls, text: str) -> Subcube:
        text = text.strip()
        fixed = values = 0
        for i, ch in enumerate(text):
            if ch == "0":
                fixed |= 1 << i
            elif ch == "1":
                fixed |= 1 << i
                values |= 1 << i
            elif ch not in _STAR_CHARS:
                raise ValueError(f"invalid subcube character {ch!r} at position {i}")
        return cls(len(text), fixed, values)

    def __str__(self) -> str:
        out = []
        for i in range(self.d):
            if not (self.fixed >> i) & 1:
                out.append(STAR)
            else:
                out.append("1" if (self.values >> i) & 1 else "0")
        return "".join(out)

    @property
    def dimension(self) -> int:
        return self.d - self.fixed.bit_count()

    @property
    def volume_log2(self) -> int:
        return self.dimension

    @property
    def volume(self) -> int:
        return 1 << self.dimension

    def points(self):
        """Iterate over the points of the subcube (2**dimension of them)."""
        free = _full(self.d) & ~self.fixed
        sub = free
        while True:
            yield Point(self.d, self.values | sub)
            if sub == 0:
                return
            sub = (sub - 1) & free


def _check(a_d: int, b_d: int) -> None:
    if a_d != b_d:
        raise DimensionMismatch(f"dimension mismatch: {a_d} != {b_d}")


def intersects(a: Subcube, b: Subcube) -> bool:
    _check(a.d, b.d)
    return ((a.values ^ b.values) & a.fixed & b.fixed) == 0


def intersection(a: Subcube, b: Subcube) -> Subcube | None:
    _check(a.d, b.d)
    if (a.values ^ b.values) & a.fixed & b.fixed:
        return None
    return Subcube(a.d, a.fixed | b.fixed, a.values | b.values)


def contains_point(a: Subcube, y: Point) -> bool:
    _check(a.d, y.d)
    return ((a.values ^ y.bits) & a.fixed) == 0


def restrict(a: Subcube, coord: int, bit: int) -> Subcube | None:
    """Trace of ``a`` on the half-cube {y : y[coord] = bit}, with ``coord`` deleted.

    The result lives in Q_{d-1}; ``None`` if ``a`` fixes ``coord`` to the other bit.
    """
    if not 0 <= coord < a.d:
        raise IndexError(f"coordinate {coord} out of range for d={a.d}")
    if bit not in (0, 1):
        raise ValueError("bit must be 0 or 1")
    if (a.fixed >> coord) & 1 and ((a.values >> coord) & 1) != bit:
        return None
    low = (1 << coord) - 1

    def drop(m: int) -> int:
        return (m & low) | ((m >> (coord + 1)) << coord)

    return Subcube(a.d - 1, drop(a.fixed), drop(a.values))


def dimension(a: Subcube) -> int:
    return a.dimension


def volume_log2(a: Subcube) -> int:
    return a.dimension


def hamming_distance(y: Point, z: Point) -> int:
    _check(y.d, z.d)
    return (y.bits ^ z.bits).bit_count()


def words(mask: int, nwords: int) -> list[int]:
    """Split a mask into little-endian 64-bit words."""
    return [(mask >> (64 * w)) & 0xFFFFFFFFFFFFFFFF for w in range(nwords)]


def from_words(ws) -> int:
    out = 0
    for w, x in enumerate(ws):
        out |= int(x) << (64 * w)
    return out


def nwords(d: int) -> int:
    return max(1, (d + 63) // 64)
