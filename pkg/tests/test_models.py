import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings

from subcubegraph.models import (
    Binomial, FamilyFormatError, FamilyStream, FeatureFamily, SeedSpec, Uniform, load_family, loads_family,
    sample_binomial_subcube, sample_family, sample_uniform_subcube, save_family,
)

from conftest import families


def test_param_validation():
    with pytest.raises(ValueError):
        Binomial(4, 1.5)
    with pytest.raises(ValueError):
        Uniform(4, 5)
    assert Uniform.from_alpha(40, 0.5) == Uniform(40, 20)
    assert Uniform(40, 20).alpha == 0.5


def test_seed_spec():
    assert SeedSpec.parse("7") == SeedSpec(7, 0)
    assert SeedSpec.parse("7:3") == SeedSpec(7, 3)
    assert str(SeedSpec(7, 3)) == "7:3"
    with pytest.raises(ValueError):
        SeedSpec(-1)


@pytest.mark.parametrize("params", [Binomial(13, 0.4), Uniform(13, 5), Binomial(70, 0.5), Uniform(130, 60)])
def test_sampling_is_deterministic_and_stream_separated(params):
    a = sample_family(params, 50, SeedSpec(1, 0))
    assert a == sample_family(params, 50, SeedSpec(1, 0))
    assert a != sample_family(params, 50, SeedSpec(1, 1))
    assert a != sample_family(params, 50, SeedSpec(2, 0))


@pytest.mark.parametrize("params", [Binomial(9, 0.3), Uniform(9, 4)])
def test_prefix_property_across_blocks(params):
    big = sample_family(params, (1 << 16) + 300, SeedSpec(5))
    for n in (0, 1, 17, 1 << 16, (1 << 16) + 1):
        assert sample_family(params, n, SeedSpec(5)) == big.prefix(n)


def test_family_stream_matches_sample_family():
    params = Binomial(20, 0.5)
    s = FamilyStream(params, SeedSpec(3, 2))
    for n in (1, 5, 64, 65, 1000, 70000):
        s.grow_to(n)
    assert s.family(70000) == sample_family(params, 70000, SeedSpec(3, 2))


def test_single_subcube_samplers_consume_the_same_stream():
    rng = SeedSpec(11).generator()
    cubes = [sample_binomial_subcube(Binomial(8, 0.5), rng) for _ in range(5)]
    assert FeatureFamily.from_subcubes(cubes) == sample_family(Binomial(8, 0.5), 5, SeedSpec(11))
    rng = SeedSpec(11).generator()
    cubes = [sample_uniform_subcube(Uniform(8, 3), rng) for _ in range(5)]
    assert FeatureFamily.from_subcubes(cubes) == sample_family(Uniform(8, 3), 5, SeedSpec(11))


def test_binomial_marginals():
    d, p, n = 10, 0.3, 40000
    fam = sample_family(Binomial(d, p), n, SeedSpec(8))
    dims = fam.dimensions()
    sd = math.sqrt(d * p * (1 - p) / n)
    assert abs(dims.mean() - d * p) < 4 * sd
    rows = np.array([list(r) for r in fam.rows()])
    ones = (rows == "1").mean(axis=0)
    # each coordinate is 1 with probability (1-p)/2
    assert np.all(np.abs(ones - (1 - p) / 2) < 4 * math.sqrt(0.35 * 0.65 / n))


def test_uniform_free_sets_are_uniform():
    d, k, n = 5, 2, 30000
    fam = sample_family(Uniform(d, k), n, SeedSpec(9))
    assert set(fam.dimensions().tolist()) == {k}
    counts = {c: 0 for c in combinations(range(d), k)}
    for r in fam.rows():
        counts[tuple(i for i, ch in enumerate(r) if ch == "*")] += 1
    m = math.comb(d, k)
    expected = n / m
    sd = math.sqrt(n * (1 / m) * (1 - 1 / m))
    assert all(abs(c - expected) < 4.5 * sd for c in counts.values())
    rows = np.array([list(r) for r in fam.rows()])
    fixed_ones = (rows == "1").sum() / (n * (d - k))
    assert abs(fixed_ones - 0.5) < 4 * math.sqrt(0.25 / (n * (d - k)))


def test_edge_cases_of_models():
    assert set(sample_family(Binomial(6, 1.0), 20, SeedSpec(1)).rows()) == {"******"}
    assert set(sample_family(Binomial(6, 0.0), 20, SeedSpec(1)).dimensions().tolist()) == {0}
    assert set(sample_family(Uniform(6, 6), 3, SeedSpec(1)).rows()) == {"******"}
    assert len(sample_family(Binomial(0, 0.5), 4, SeedSpec(1))) == 4


@settings(max_examples=50, deadline=None)
@given(families(min_d=0, max_d=70, max_n=8))
def test_text_round_trip(fam):
    assert loads_family(fam.dumps()) == fam


def test_file_round_trip_keeps_metadata(tmp_path):
    fam = sample_family(Uniform(6, 3), 5, SeedSpec(7, 2))
    path = tmp_path / "f.txt"
    save_family(fam, path)
    back = load_family(path)
    assert back == fam and back.model == Uniform(6, 3) and back.seed == SeedSpec(7, 2)
    assert path.read_text().splitlines()[0] == "6 5 uniform 3 7:2"


@pytest.mark.parametrize("text, line", [
    ("", 1),
    ("2 1 fixed -\n0*\n", 1),
    ("2 1 nope - -\n0*\n", 1),
    ("2 2 fixed - -\n0*\n", 2),
    ("2 2 fixed - -\n0*\n0x\n", 3),
    ("2 2 fixed - -\n0*\n0*1\n", 3),
    ("3 1 binomial 1.5 -\n0*1\n", 1),
])
def test_parse_errors_name_the_line(text, line):
    with pytest.raises(FamilyFormatError) as exc:
        loads_family(text)
    assert exc.value.line == line
    assert f"line {line}" in str(exc.value)


def test_family_helpers():
    fam = FeatureFamily.parse(["0*", "*0", "1*"])
    assert len(fam) == 3 and str(fam[1]) == "*0"
    assert fam.dimensions().tolist() == [1, 1, 1]
    assert fam.append(fam[0]).rows() == ["0*", "*0", "1*", "0*"]
    assert len(FeatureFamily.empty(4)) == 0
    with pytest.raises(ValueError):
        fam.fixed[0, 0] = 0  # read-only storage
