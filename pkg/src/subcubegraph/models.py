"""Random feature subcubes: the binomial and uniform models.

Families are stored word-parallel: two ``(n, W)`` uint64 arrays holding the
fixed masks and the values, ``W = ceil(d / 64)`` (at least 1).

Randomness comes from a Philox counter-based generator keyed by
``(master_seed, stream_id)``.  Every sampler consumes exactly ``d`` doubles per
subcube, row by row, so a family of size n is always a prefix of the family of
size n + 1 drawn from the same stream.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence, Union

import numpy as np

from .cube import Subcube, from_words, nwords, words


@dataclass(frozen=True)
class Binomial:
    d: int
    p: float

    def __post_init__(self):
        if self.d < 0:
            raise ValueError("d must be non-negative")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")

    @property
    def name(self) -> str:
        return "binomial"

    @property
    def param(self) -> str:
        return repr(float(self.p))


@dataclass(frozen=True)
class Uniform:
    d: int
    k: int

    def __post_init__(self):
        if not 0 <= self.k <= self.d:
            raise ValueError(f"need 0 <= k <= d, got k={self.k}, d={self.d}")

    @classmethod
    def from_alpha(cls, d: int, alpha: float) -> Uniform:
        return cls(d, int(np.floor(alpha * d)))

    @property
    def alpha(self) -> float:
        return self.k / self.d if self.d else 0.0

    @property
    def name(self) -> str:
        return "uniform"

    @property
    def param(self) -> str:
        return str(self.k)


ModelParams = Union[Binomial, Uniform]


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        for v in (self.master_seed, self.stream_id):
            if not 0 <= v < 2**64:
                raise ValueError("seeds must be unsigned 64-bit integers")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence([self.master_seed, self.stream_id])
        return np.random.Generator(np.random.Philox(ss))

    def stream(self, stream_id: int) -> SeedSpec:
        return SeedSpec(self.master_seed, stream_id)

    def __str__(self) -> str:
        return f"{self.master_seed}:{self.stream_id}"

    @classmethod
    def parse(cls, text: str) -> SeedSpec:
        master, _, stream = text.partition(":")
        return cls(int(master), int(stream or 0))


def _pack(bits: np.ndarray, d: int) -> np.ndarray:
    """(n, d) bool -> (n, W) little-endian uint64 words."""
    n = bits.shape[0]
    w = nwords(d)
    padded = np.zeros((n, 64 * w), dtype=bool)
    padded[:, :d] = bits
    return np.packbits(padded, axis=1, bitorder="little").view("<u8").astype(np.uint64).reshape(n, w)


def _unpack(words_: np.ndarray, d: int) -> np.ndarray:
    n = words_.shape[0]
    raw = np.ascontiguousarray(words_.astype("<u8")).view(np.uint8).reshape(n, -1)
    return np.unpackbits(raw, axis=1, bitorder="little")[:, :d].astype(bool)


class FeatureFamily:
    """An ordered list of subcubes of Q_d (index = vertex)."""

    def __init__(self, d: int, fixed: np.ndarray, values: np.ndarray, *, model: ModelParams | None = None,
                 seed: SeedSpec | None = None):
        fixed = np.ascontiguousarray(fixed, dtype=np.uint64)
        values = np.ascontiguousarray(values, dtype=np.uint64)
        w = nwords(d)
        if fixed.ndim != 2 or fixed.shape[1] != w or fixed.shape != values.shape:
            raise ValueError(f"expected two (n, {w}) word arrays")
        if np.any(values & ~fixed):
            raise ValueError("values must be 0 on free coordinates")
        if d % 64 and fixed.shape[0]:
            spill = ~np.uint64((1 << (d % 64)) - 1)
            if np.any(fixed[:, -1] & spill):
                raise ValueError("fixed mask has bits beyond d")
        fixed.flags.writeable = False
        values.flags.writeable = False
        self.d = d
        self.fixed = fixed
        self.values = values
        self.model = model
        self.seed = seed

    @classmethod
    def from_subcubes(cls, cubes: Sequence[Subcube], d: int | None = None, **kw) -> FeatureFamily:
        if d is None:
            if not cubes:
                raise ValueError("d is required for an empty family")
            d = cubes[0].d
        w = nwords(d)
        fixed = np.zeros((len(cubes), w), dtype=np.uint64)
        values = np.zeros((len(cubes), w), dtype=np.uint64)
        for i, c in enumerate(cubes):
            if c.d != d:
                raise ValueError(f"subcube {i} has d={c.d}, expected {d}")
            fixed[i] = words(c.fixed, w)
            values[i] = words(c.values, w)
        return cls(d, fixed, values, **kw)

    @classmethod
    def parse(cls, rows: Sequence[str], d: int | None = None) -> FeatureFamily:
        return cls.from_subcubes([Subcube.parse(r) for r in rows], d)

    @classmethod
    def empty(cls, d: int) -> FeatureFamily:
        w = nwords(d)
        return cls(d, np.zeros((0, w), np.uint64), np.zeros((0, w), np.uint64))

    def __len__(self) -> int:
        return self.fixed.shape[0]

    def __getitem__(self, i: int) -> Subcube:
        return Subcube(self.d, from_words(self.fixed[i]), from_words(self.values[i]))

    def __iter__(self) -> Iterator[Subcube]:
        return (self[i] for i in range(len(self)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, FeatureFamily):
            return NotImplemented
        return (self.d == other.d and self.fixed.shape == other.fixed.shape
                and np.array_equal(self.fixed, other.fixed) and np.array_equal(self.values, other.values))

    def __repr__(self) -> str:
        return f"FeatureFamily(d={self.d}, n={len(self)})"

    def prefix(self, n: int) -> FeatureFamily:
        return FeatureFamily(self.d, self.fixed[:n], self.values[:n], model=self.model, seed=self.seed)

    def append(self, cube: Subcube) -> FeatureFamily:
        other = FeatureFamily.from_subcubes([cube], self.d)
        return FeatureFamily(self.d, np.vstack([self.fixed, other.fixed]), np.vstack([self.values, other.values]))

    def dimensions(self) -> np.ndarray:
        if len(self) == 0:
            return np.zeros(0, dtype=np.int64)
        fixed_counts = _unpack(self.fixed, self.d).sum(axis=1)
        return self.d - fixed_counts

    def rows(self) -> list[str]:
        return [str(c) for c in self]

    # text format: header "d n model param seed", then one {0,1,*}^d row per vertex
    def dumps(self) -> str:
        if self.model is None:
            model, param = "fixed", "-"
        else:
            model, param = self.model.name, self.model.param
        seed = str(self.seed) if self.seed is not None else "-"
        lines = [f"{self.d} {len(self)} {model} {param} {seed}"]
        lines.extend(self.rows())
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.dumps())


class FamilyFormatError(ValueError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


def loads_family(text: str) -> FeatureFamily:
    lines = text.splitlines()
    if not lines:
        raise FamilyFormatError(1, "missing header")
    head = lines[0].split()
    if len(head) != 5:
        raise FamilyFormatError(1, "header must be 'd n model param seed'")
    try:
        d, n = int(head[0]), int(head[1])
    except ValueError:
        raise FamilyFormatError(1, "d and n must be integers") from None
    model_name, param, seed_txt = head[2], head[3], head[4]
    try:
        if model_name == "binomial":
            model = Binomial(d, float(param))
        elif model_name == "uniform":
            model = Uniform(d, int(param))
        elif model_name == "fixed":
            model = None
        else:
            raise FamilyFormatError(1, f"unknown model {model_name!r}")
        seed = None if seed_txt == "-" else SeedSpec.parse(seed_txt)
    except FamilyFormatError:
        raise
    except ValueError as exc:
        raise FamilyFormatError(1, str(exc)) from None
    body = lines[1:]
    # trailing blank lines are padding, except that d = 0 rows are themselves blank
    while len(body) > n and not body[-1].strip():
        body.pop()
    if len(body) != n:
        raise FamilyFormatError(len(lines), f"expected {n} rows, found {len(body)}")
    cubes = []
    for ln, row in enumerate(body, start=2):
        row = row.strip()
        if len(row) != d:
            raise FamilyFormatError(ln, f"row length {len(row)} != d={d}")
        try:
            cubes.append(Subcube.parse(row))
        except ValueError as exc:
            raise FamilyFormatError(ln, str(exc)) from None
    fam = FeatureFamily.from_subcubes(cubes, d)
    return FeatureFamily(d, fam.fixed, fam.values, model=model, seed=seed)


def load_family(path) -> FeatureFamily:
    return loads_family(Path(path).read_text())


def save_family(family: FeatureFamily, path) -> None:
    family.save(path)


# -- samplers ---------------------------------------------------------------

def _binomial_bits(u: np.ndarray, p: float):
    star = u < p
    one = u >= (1.0 + p) / 2.0
    return ~star, one


def _uniform_bits(u: np.ndarray, k: int):
    n, d = u.shape
    perm = np.tile(np.arange(d), (n, 1))
    rows = np.arange(n)
    # partial Fisher-Yates: positions 0..k-1 of perm become the free coordinates
    for j in range(k):
        r = j + np.minimum((u[:, j] * (d - j)).astype(np.int64), d - j - 1)
        pj = perm[:, j].copy()
        perm[:, j] = perm[rows, r]
        perm[rows, r] = pj
    fixed = np.ones((n, d), dtype=bool)
    one = np.zeros((n, d), dtype=bool)
    if k:
        fixed[rows[:, None], perm[:, :k]] = False
    if k < d:
        one[rows[:, None], perm[:, k:]] = u[:, k:] < 0.5
    return fixed, one


def sample_block(params: ModelParams, rng: np.random.Generator, m: int):
    """Draw m subcubes as (fixed, values) word arrays, consuming m*d doubles."""
    d = params.d
    u = rng.random((m, d))
    if isinstance(params, Binomial):
        fixed, one = _binomial_bits(u, params.p)
    elif isinstance(params, Uniform):
        fixed, one = _uniform_bits(u, params.k)
    else:
        raise TypeError(f"unknown model {params!r}")
    return _pack(fixed, d), _pack(one & fixed, d)


def sample_binomial_subcube(params: Binomial, rng: np.random.Generator) -> Subcube:
    f, v = sample_block(params, rng, 1)
    return Subcube(params.d, from_words(f[0]), from_words(v[0]))


def sample_uniform_subcube(params: Uniform, rng: np.random.Generator) -> Subcube:
    f, v = sample_block(params, rng, 1)
    return Subcube(params.d, from_words(f[0]), from_words(v[0]))


_BLOCK = 1 << 16


def sample_family(params: ModelParams, n: int, seed: SeedSpec) -> FeatureFamily:
    if n < 0:
        raise ValueError("n must be non-negative")
    rng = seed.generator()
    w = nwords(params.d)
    fixed = np.empty((n, w), dtype=np.uint64)
    values = np.empty((n, w), dtype=np.uint64)
    for start in range(0, n, _BLOCK):
        m = min(_BLOCK, n - start)
        fixed[start:start + m], values[start:start + m] = sample_block(params, rng, m)
    return FeatureFamily(params.d, fixed, values, model=params, seed=seed)


@dataclass
class FamilyStream:
    """Grows a family from one seed stream in blocks; every prefix matches sample_family."""

    params: ModelParams
    seed: SeedSpec
    fixed: np.ndarray = field(init=False)
    values: np.ndarray = field(init=False)
    size: int = field(init=False, default=0)

    def __post_init__(self):
        self._rng = self.seed.generator()
        w = nwords(self.params.d)
        self.fixed = np.empty((0, w), dtype=np.uint64)
        self.values = np.empty((0, w), dtype=np.uint64)

    def grow_to(self, n: int) -> None:
        if n <= self.size:
            return
        cap = self.fixed.shape[0]
        if n > cap:
            new_cap = max(n, 2 * cap, 64)
            w = self.fixed.shape[1]
            f = np.empty((new_cap, w), dtype=np.uint64)
            v = np.empty((new_cap, w), dtype=np.uint64)
            f[:self.size] = self.fixed[:self.size]
            v[:self.size] = self.values[:self.size]
            self.fixed, self.values = f, v
        for start in range(self.size, n, _BLOCK):
            m = min(_BLOCK, n - start)
            self.fixed[start:start + m], self.values[start:start + m] = sample_block(self.params, self._rng, m)
        self.size = n

    def family(self, n: int | None = None) -> FeatureFamily:
        n = self.size if n is None else n
        self.grow_to(n)
        return FeatureFamily(self.params.d, self.fixed[:n].copy(), self.values[:n].copy(),
                             model=self.params, seed=self.seed)
