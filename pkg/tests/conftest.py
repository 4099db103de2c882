import numpy as np
import pytest
from hypothesis import strategies as st

from subcubegraph import kernels
from subcubegraph.cube import Subcube
from subcubegraph.models import FeatureFamily

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(params=kernels.available())
def backend(request):
    return request.param


@st.composite
def subcubes(draw, d=None, min_d=0, max_d=12):
    if d is None:
        d = draw(st.integers(min_d, max_d))
    fixed = draw(st.integers(0, (1 << d) - 1)) if d else 0
    values = draw(st.integers(0, (1 << d) - 1)) & fixed if d else 0
    return Subcube(d, fixed, values)


@st.composite
def families(draw, min_d=1, max_d=10, min_n=0, max_n=25, sparse=True):
    d = draw(st.integers(min_d, max_d))
    n = draw(st.integers(min_n, max_n))
    cubes = []
    for _ in range(n):
        fixed = draw(st.integers(0, (1 << d) - 1))
        if sparse and draw(st.booleans()):
            # bias towards few fixed coordinates so intersections are common
            fixed &= draw(st.integers(0, (1 << d) - 1))
        values = draw(st.integers(0, (1 << d) - 1)) & fixed
        cubes.append(Subcube(d, fixed, values))
    return FeatureFamily.from_subcubes(cubes, d)


def random_family(rng: np.random.Generator, d: int, n: int, free_prob: float = 0.5) -> FeatureFamily:
    cubes = []
    for _ in range(n):
        free = rng.random(d) < free_prob
        one = rng.random(d) < 0.5
        fixed = sum(1 << i for i in range(d) if not free[i])
        values = sum(1 << i for i in range(d) if not free[i] and one[i])
        cubes.append(Subcube(d, fixed, values))
    return FeatureFamily.from_subcubes(cubes, d)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
