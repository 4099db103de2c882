"""Covering transitions at dimensions where the exact certificate is cheap.

Finite-d midpoints include the log-correction; tolerance matches the d=40 criteria.
"""

import pytest

from subcubegraph import theory as T
from subcubegraph.analysis import Cover
from subcubegraph.experiments import ExperimentConfig, grid, monotone_violations, n_for, threshold_scan
from subcubegraph.models import Binomial, SeedSpec, Uniform


@pytest.mark.slow
@pytest.mark.parametrize("params, pred", [
    (Binomial(16, 0.3), T.cover_midpoint_binomial(16, 0.3)),
    (Binomial(18, 0.3), T.cover_midpoint_binomial(18, 0.3)),
    (Uniform(18, 9), T.cover_midpoint_uniform(18, 0.5)),
])
def test_small_d_cover_midpoint(params, pred):
    xs = grid(round(pred - 0.2, 2), round(pred + 0.2, 2), 0.01)
    cfg = ExperimentConfig(params, Cover(), xs, 200, SeedSpec(77), n_cap=max(n_for(x, params.d) for x in xs))
    res = threshold_scan(cfg, budget=False)
    assert res.midpoint is not None and abs(res.midpoint - pred) <= 0.05
    assert not monotone_violations(res.curve)
