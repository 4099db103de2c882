"""Both kernel backends against the brute-force oracles and each other."""

import numpy as np
import pytest
from hypothesis import given, settings

from subcubegraph import kernels, oracles
from subcubegraph.cube import nwords
from subcubegraph.models import Binomial, SeedSpec, Uniform, sample_family

from conftest import families

needs_both = pytest.mark.skipif(len(kernels.available()) < 2, reason="compiled kernels not built")


def _depth(k, fam, target=2**62, floor=0):
    w = nwords(fam.d)
    z = np.zeros(w, dtype=np.uint64)
    return k.coverage_depth(fam.fixed, fam.values, fam.d, np.arange(len(fam), dtype=np.int64), z, z, target, floor)


def test_backend_selection():
    assert kernels.get("python").BACKEND == "python"
    assert kernels.get(None) is kernels.active
    with pytest.raises(ValueError):
        kernels.get("gpu")
    assert "python" in kernels.available()


@settings(max_examples=150, deadline=None)
@given(families(max_d=10, max_n=20))
def test_depth_matches_point_scan(fam):
    ref = oracles.depth_by_scan(fam)
    for b in kernels.available():
        depth, wit = _depth(kernels.get(b), fam)
        assert depth == ref
        if depth:
            y = int(wit[0])
            inside = ((y ^ fam.values[:, 0]) & fam.fixed[:, 0]) == 0
            assert int(inside.sum()) == depth


@settings(max_examples=150, deadline=None)
@given(families(max_d=11, max_n=30))
def test_uncovered_histogram_matches_point_scan(fam):
    ref = oracles.uncovered_by_scan(fam)
    for b in kernels.available():
        hist = kernels.get(b).uncovered_histogram(fam.fixed, fam.values, fam.d, False)
        assert sum(int(c) << j for j, c in enumerate(hist.tolist())) == ref
        early = kernels.get(b).uncovered_histogram(fam.fixed, fam.values, fam.d, True)
        assert bool(early.any()) == (ref > 0)


@settings(max_examples=100, deadline=None)
@given(families(max_d=9, max_n=20))
def test_adjacency_rows_match_pairs(fam):
    ref = oracles.adjacency_by_pairs(fam)
    from subcubegraph._pykernels import unpack_rows

    for b in kernels.available():
        rows = kernels.get(b).adjacency_rows(fam.fixed, fam.values)
        assert rows.shape == (len(fam), max(1, (len(fam) + 63) // 64))
        assert np.array_equal(unpack_rows(rows, len(fam)), ref)


@settings(max_examples=60, deadline=None)
@given(families(max_d=6, min_n=0, max_n=11))
def test_c4_count_matches_enumeration(fam):
    ref_adj = oracles.adjacency_by_pairs(fam)
    ref = oracles.c4_by_enumeration(ref_adj)
    for b in kernels.available():
        k = kernels.get(b)
        assert k.c4_count(k.adjacency_rows(fam.fixed, fam.values)) == ref


def test_floor_prunes_without_changing_decisions(backend):
    k = kernels.get(backend)
    fam = sample_family(Binomial(12, 0.5), 60, SeedSpec(4))
    full, _ = _depth(k, fam)
    for floor in range(0, full + 3):
        got, _ = _depth(k, fam, floor=floor)
        assert got == max(full, floor)


@needs_both
@pytest.mark.parametrize("params", [Binomial(70, 0.5), Uniform(100, 60), Binomial(130, 0.7)])
def test_backends_agree_on_multiword_families(params):
    fam = sample_family(params, 120, SeedSpec(12))
    py, cc = kernels.get("python"), kernels.get("compiled")
    d1, w1 = _depth(py, fam)
    d2, w2 = _depth(cc, fam)
    assert d1 == d2 and np.array_equal(w1, w2)
    assert np.array_equal(py.adjacency_rows(fam.fixed, fam.values), cc.adjacency_rows(fam.fixed, fam.values))
    for s in (2, 3, 4):
        assert py.clique_hitting_scan(fam.fixed, fam.values, fam.d, s, 0, len(fam)) == \
            cc.clique_hitting_scan(fam.fixed, fam.values, fam.d, s, 0, len(fam))


@needs_both
@settings(max_examples=80, deadline=None)
@given(families(max_d=10, max_n=25))
def test_backends_return_identical_witnesses(fam):
    d1, w1 = _depth(kernels.get("python"), fam)
    d2, w2 = _depth(kernels.get("compiled"), fam)
    assert d1 == d2 and np.array_equal(w1, w2)
    h1 = kernels.get("python").uncovered_histogram(fam.fixed, fam.values, fam.d, False)
    h2 = kernels.get("compiled").uncovered_histogram(fam.fixed, fam.values, fam.d, False)
    assert np.array_equal(h1, h2)


def test_paint_cover_counts_points(backend):
    k = kernels.get(backend)
    fam = sample_family(Binomial(8, 0.4), 200, SeedSpec(6))
    bitmap = np.zeros(1 << 8, dtype=np.uint8)
    found, left = k.paint_cover(fam.fixed, fam.values, 8, bitmap, 0, len(fam), 1 << 8)
    # the first prefix whose union is everything
    first = next((n for n in range(1, len(fam) + 1) if oracles.uncovered_by_scan(fam.prefix(n)) == 0), None)
    if first is None:
        assert found == -1 and left == oracles.uncovered_by_scan(fam)
    else:
        assert found == first - 1 and left == 0


def test_paint_cover_rejects_large_d(backend):
    k = kernels.get(backend)
    fam = sample_family(Binomial(41, 0.4), 2, SeedSpec(6))
    with pytest.raises(ValueError):
        k.paint_cover(fam.fixed, fam.values, 41, np.zeros(1, dtype=np.uint8), 0, 2, 1)
