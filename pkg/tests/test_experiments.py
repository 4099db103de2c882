import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from subcubegraph import experiments as E
from subcubegraph import theory as T
from subcubegraph.analysis import Clique, Cover
from subcubegraph.models import Binomial, SeedSpec, Uniform


@given(st.integers(1, 500).flatmap(lambda n: st.tuples(st.integers(0, n), st.just(n))))
def test_wilson_invariants(kn):
    k, n = kn
    s = E.TrialStats.wilson(k, n)
    assert 0 <= s.ci_low <= s.estimate <= s.ci_high <= 1


def test_wilson_coverage():
    rng = np.random.default_rng(0)
    batches, size = 1000, 200
    hits = rng.binomial(size, 0.3, size=batches)
    stats = [E.TrialStats.wilson(int(h), size) for h in hits]
    covered = sum(1 for s in stats if s.ci_low <= 0.3 <= s.ci_high)
    assert covered >= 930


def test_config_validation():
    with pytest.raises(E.ConfigError):
        E.ExperimentConfig(Binomial(10, 0.5), Clique(2), (0.1,), 0, SeedSpec(1))
    with pytest.raises(E.ConfigError):
        E.ExperimentConfig(Binomial(10, 0.5), Clique(2), (-0.1,), 5, SeedSpec(1))
    with pytest.raises(E.ConfigError):
        E.ExperimentConfig(Binomial(10, 0.5), Clique(2), (2.0,), 5, SeedSpec(1), n_cap=100)
    assert E.grid(0, 0.05, 0.01) == (0.0, 0.01, 0.02, 0.03, 0.04, 0.05)
    assert E.n_for(0.0, 30) == 1


def test_estimate_probability_trivial_cases():
    cfg = E.ExperimentConfig(Binomial(10, 0.5), Clique(1), (0.0, 0.3), 50, SeedSpec(1))
    assert E.estimate_probability(cfg, 0.3).estimate == 1.0
    cfg = E.ExperimentConfig(Binomial(10, 0.3), Cover(), (0.0,), 300, SeedSpec(2))
    assert E.estimate_probability(cfg, 0.0).estimate <= 1e-3
    with pytest.raises(E.ConfigError):
        E.estimate_probability(E.ExperimentConfig(Binomial(10, 0.3), Cover(), (0.0,), 3, SeedSpec(2), n_cap=5), 1.0)


@pytest.mark.parametrize("params, prop, xs", [
    (Binomial(20, 0.5), Clique(2), E.grid(0.0, 0.2, 0.02)),
    (Uniform(12, 5), Clique(3), E.grid(0.05, 0.35, 0.05)),
    (Binomial(9, 0.3), Cover(), E.grid(0.3, 0.9, 0.1)),
])
def test_hitting_scan_equals_direct_scan(params, prop, xs):
    cfg = E.ExperimentConfig(params, prop, xs, 40, SeedSpec(31), n_cap=10**6)
    a = E.threshold_scan(cfg, method="hitting")
    b = E.threshold_scan(cfg, method="direct")
    assert a.curve == b.curve
    assert a.midpoint == b.midpoint
    assert not E.monotone_violations(a.curve)


def test_scan_is_reproducible_and_worker_independent():
    cfg = E.ExperimentConfig(Binomial(20, 0.5), Clique(2), E.grid(0, 0.2, 0.02), 60, SeedSpec(8), n_cap=10**4)
    a = E.threshold_scan(cfg)
    assert a.to_csv() == E.threshold_scan(cfg).to_csv()
    assert a.to_json() == E.threshold_scan(cfg, workers=2).to_json()


def test_scan_estimates_increase():
    cfg = E.ExperimentConfig(Binomial(20, 0.5), Clique(2), E.grid(0, 0.2, 0.01), 200, SeedSpec(12), n_cap=10**4)
    res = E.threshold_scan(cfg)
    ests = [c.estimate for c in res.curve]
    assert ests == sorted(ests)
    assert res.midpoint is not None and abs(res.midpoint - T.t_Ks_binomial(2, 0.5)) < 0.05


def test_scan_outputs():
    cfg = E.ExperimentConfig(Binomial(12, 0.5), Clique(2), (0.0, 0.1, 0.3), 10, SeedSpec(3), n_cap=10**3)
    res = E.threshold_scan(cfg)
    lines = res.to_csv().splitlines()
    assert lines[0] == "x,n,trials,successes,estimate,ci_low,ci_high"
    assert len(lines) == 4
    s = res.summary()
    assert s["predicted_threshold"] == T.t_Ks_binomial(2, 0.5)
    assert set(s) >= {"observed_midpoint", "hitting_samples", "curve"}


def test_crossing():
    assert E.crossing([0, 1, 2], [0.0, 0.25, 0.75]) == pytest.approx(1.5)
    assert E.crossing([0, 1], [0.6, 0.9]) is None
    assert E.crossing([0, 1], [0.1, 0.2]) is None


def test_monotone_violation_detector():
    lo = E.TrialStats(0.1, 0.0, 0.2, 10, 1)
    hi = E.TrialStats(0.9, 0.8, 1.0, 10, 9)
    assert E.monotone_violations([lo, hi]) == []
    assert E.monotone_violations([hi, lo]) == [(0, 1)]


def test_budget_check():
    ok = E.ExperimentConfig(Binomial(16, 0.3), Cover(), E.grid(0.4, 0.9, 0.05), 20, SeedSpec(1), n_cap=10**8)
    assert E.check_budget(ok).ops > 0
    big = E.ExperimentConfig(Binomial(40, 0.3), Cover(), E.grid(0.45, 0.6, 0.01), 200, SeedSpec(1), n_cap=10**12)
    with pytest.raises(E.BudgetExceeded):
        E.check_budget(big)
    with pytest.raises(E.BudgetExceeded):
        E.threshold_scan(big)


def test_hitting_ensemble_trivial():
    ens = E.hitting_ensemble(Binomial(12, 0.5), Clique(1), 20, SeedSpec(1))
    assert ens.samples == [1] * 20 and ens.normalized == [0.0] * 20 and ens.mean == 0.0


def test_hitting_ensemble_two_point_law():
    # first repeat among fair bits: N = 2 or 3 with probability 1/2 each
    runs = 100_000
    ens = E.hitting_ensemble(Binomial(1, 0.0), Clique(2), runs, SeedSpec(5))
    assert set(ens.samples) == {2, 3}
    # E[N] = 2/2 + 3/2 = 2.5 and sd(N) = 0.5
    mean = np.mean(ens.samples)
    assert abs(mean - 2.5) < 4 * 0.5 / math.sqrt(runs)


def test_hitting_ensemble_saturation():
    ens = E.hitting_ensemble(Binomial(30, 0.0), Clique(3), 10, SeedSpec(1), n_max=3)
    assert ens.saturated == 10 and ens.failed and math.isnan(ens.mean)


def test_dimension_at_hitting_s1():
    d, p, runs = 40, 0.3, 400
    st_ = E.dimension_at_hitting(1, Binomial(d, p), runs, SeedSpec(9))
    sd = math.sqrt(p * (1 - p) / (d * runs))
    assert abs(st_.mean - p) < 3 * sd
    assert st_.predicted == p


def test_dimension_at_hitting_small():
    st_ = E.dimension_at_hitting(2, Binomial(30, 0.5), 60, SeedSpec(10))
    assert len(st_.per_run) == 60 and abs(st_.mean - T.alpha_s(0.5, 2)) < 0.1
    assert st_.summary()["predicted_alpha_s"] == T.alpha_s(0.5, 2)


def test_quasirandomness_complete_graph():
    rep = E.quasirandomness_report(16, 0.0, 30, 1, SeedSpec(1))
    assert rep.edges == math.comb(30, 2) and rep.c4 == 3 * math.comb(30, 4)
    assert rep.edge_rel_error == 0 and rep.c4_rel_error == 0


def test_quasirandomness_range_check():
    with pytest.raises(E.ConfigError):
        E.quasirandomness_report(64, 0.5, 10, 1, SeedSpec(1))
    rep = E.quasirandomness_report(64, 0.125, 400, 2, SeedSpec(2))
    assert rep.edge_rel_error < 0.05
