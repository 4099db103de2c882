"""Monte Carlo harness: probability estimates, threshold scans, hitting times.

Trial t of an experiment seeded with ``SeedSpec(m, s)`` uses stream ``s + t``.
Because families drawn from one stream are prefix-consistent and the
properties studied are monotone, the event "property holds at n" equals
"hitting time <= n".  Scans therefore compute one hitting time per trial and
read off every grid point from it (common random numbers); this is exactly
the result of evaluating each grid point directly on the same streams.
"""

from __future__ import annotations

import json
import math
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import analysis, kernels, theory
from .analysis import BITMAP_MAX_D, Clique, Cover, Property
from .graph import build_graph, count_c4, edge_count
from .models import Binomial, ModelParams, SeedSpec, sample_family

Z95 = statistics.NormalDist().inv_cdf(0.975)

# defaults for check_budget: elementary kernel operations and resident bytes
DEFAULT_OPS_BUDGET = 2e11
DEFAULT_MEM_BUDGET = 2 * 1024**3


class ConfigError(ValueError):
    """An experiment configuration that violates its contract."""


class BudgetExceeded(ConfigError):
    pass


def n_for(x: float, d: int) -> int:
    return int(round(math.exp(x * d)))


@dataclass(frozen=True)
class ExperimentConfig:
    model: ModelParams
    prop: Property
    x_grid: tuple[float, ...]
    trials: int
    seed: SeedSpec
    n_cap: int = 10**7

    def __post_init__(self):
        object.__setattr__(self, "x_grid", tuple(float(x) for x in self.x_grid))
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not self.x_grid:
            raise ConfigError("x grid is empty")
        if any(x < 0 for x in self.x_grid):
            raise ConfigError("x values must be non-negative")
        if self.n_cap < self.max_n:
            raise ConfigError(f"n_cap={self.n_cap} is below the largest grid size {self.max_n}")

    @property
    def max_n(self) -> int:
        return max(n_for(x, self.model.d) for x in self.x_grid)

    def trial_seed(self, t: int) -> SeedSpec:
        return SeedSpec(self.seed.master_seed, self.seed.stream_id + t)

    def predicted_threshold(self) -> float:
        return theory.threshold_for(self.model, self.prop)


def grid(lo: float, hi: float, step: float) -> tuple[float, ...]:
    m = int(round((hi - lo) / step))
    return tuple(round(lo + i * step, 12) for i in range(m + 1))


@dataclass(frozen=True)
class TrialStats:
    estimate: float
    ci_low: float
    ci_high: float
    trials: int
    successes: int

    @classmethod
    def wilson(cls, successes: int, trials: int, z: float = Z95) -> TrialStats:
        if trials < 1:
            raise ValueError("trials must be >= 1")
        ph = successes / trials
        z2 = z * z
        den = 1 + z2 / trials
        centre = (ph + z2 / (2 * trials)) / den
        half = z * math.sqrt(ph * (1 - ph) / trials + z2 / (4 * trials * trials)) / den
        lo = max(0.0, centre - half)
        hi = min(1.0, centre + half)
        return cls(ph, min(lo, ph), max(hi, ph), trials, successes)


# -- cost model ---------------------------------------------------------------

@dataclass(frozen=True)
class Budget:
    ops: float
    bytes: float

    def describe(self) -> str:
        return f"~{self.ops:.3g} kernel operations, ~{self.bytes / 2**30:.3g} GiB resident"


def _cover_certificate_ops(params: ModelParams, n: int) -> float:
    """Rough work to certify a cover by coordinate branching.

    A region with j assigned coordinates is closed once some member's fixed
    coordinates all lie among them; with free probability a and agreement
    probability r = (1 + a)/2 that needs n a^(d-j) r^j >= 1.  Until then the
    tree has about 2^j nodes each scanning about n r^j survivors.
    """
    d = params.d
    a = params.p if isinstance(params, Binomial) else params.alpha
    r = (1 + a) / 2
    j = d
    if a >= 1:
        j = 0
    elif a > 0:
        need = d * math.log(1 / a) - math.log(max(n, 1))
        j = 0 if need <= 0 else min(d, math.ceil(need / math.log(r / a)))
    return float(n) * (2 * r) ** j + 2.0**j


def estimate_cost(config: ExperimentConfig, method: str = "hitting") -> Budget:
    d = config.model.d
    w = max(1, (d + 63) // 64)
    n = config.max_n
    per_trial_rng = n * d
    family_bytes = 16 * w * n
    if isinstance(config.prop, Cover):
        if d <= BITMAP_MAX_D:
            vol = theory.expected_volume(d, config.model.p) if isinstance(config.model, Binomial) \
                else 2.0**config.model.k
            per_trial = 2.0**d + n * vol + per_trial_rng
            mem = family_bytes + 2.0**d
        else:
            evals = 2 * max(1, math.ceil(math.log2(max(n, 2)))) if method == "hitting" else len(config.x_grid)
            per_trial = evals * _cover_certificate_ops(config.model, n) + per_trial_rng
            mem = family_bytes
    else:
        s = config.prop.s
        per_trial = n * n * w + n * (2.0 ** min(s, 30)) + per_trial_rng
        mem = family_bytes
    if method == "direct":
        per_trial *= len(config.x_grid)
    return Budget(per_trial * config.trials, mem)


def check_budget(config: ExperimentConfig, method: str = "hitting", ops_limit: float = DEFAULT_OPS_BUDGET,
                 mem_limit: float = DEFAULT_MEM_BUDGET) -> Budget:
    """Raise BudgetExceeded when the configuration cannot finish on this machine."""
    b = estimate_cost(config, method)
    if b.ops > ops_limit or b.bytes > mem_limit:
        raise BudgetExceeded(
            f"{config.prop} on {config.model} with {config.trials} trials up to n={config.max_n}: "
            f"{b.describe()} exceeds the budget of {ops_limit:.3g} ops / {mem_limit / 2**30:.3g} GiB")
    return b


# -- parallel plumbing ----------------------------------------------------------

def _map(fn, items, workers: int | None):
    items = list(items)
    if not workers or workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        # map preserves input order, so aggregation is independent of scheduling
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def default_workers() -> int:
    return max(1, int(os.environ.get("SUBCUBEGRAPH_WORKERS", "1")))


# -- probability estimates --------------------------------------------------------

def _direct_trial(job):
    params, prop, seed, n, backend = job
    return analysis.has_property(sample_family(params, n, seed), prop, backend)


def estimate_probability(config: ExperimentConfig, x: float, backend: str | None = None,
                         workers: int | None = None) -> TrialStats:
    """P(property) at n = round(e^{xd}), each trial evaluated exactly on its own stream."""
    n = n_for(x, config.model.d)
    if n > config.n_cap:
        raise ConfigError(f"n={n} exceeds n_cap={config.n_cap}")
    jobs = [(config.model, config.prop, config.trial_seed(t), n, backend) for t in range(config.trials)]
    hits = _map(_direct_trial, jobs, workers)
    return TrialStats.wilson(int(sum(hits)), config.trials)


@dataclass
class ScanResult:
    config: ExperimentConfig
    curve: list[TrialStats]
    midpoint: float | None
    hitting_samples: list[int | None] = field(default_factory=list)

    @property
    def predicted_threshold(self) -> float:
        return self.config.predicted_threshold()

    def csv_rows(self):
        d = self.config.model.d
        yield ("x", "n", "trials", "successes", "estimate", "ci_low", "ci_high")
        for x, st in zip(self.config.x_grid, self.curve):
            yield (repr(x), n_for(x, d), st.trials, st.successes, repr(st.estimate), repr(st.ci_low), repr(st.ci_high))

    def to_csv(self) -> str:
        return "".join(",".join(str(c) for c in row) + "\n" for row in self.csv_rows())

    def summary(self) -> dict:
        cfg = self.config
        return {
            "model": cfg.model.name,
            "d": cfg.model.d,
            "param": cfg.model.param,
            "property": str(cfg.prop),
            "trials": cfg.trials,
            "seed": str(cfg.seed),
            "predicted_threshold": self.predicted_threshold,
            "observed_midpoint": self.midpoint,
            "out_of_range": self.midpoint is None,
            "curve": [dict(x=x, n=n_for(x, cfg.model.d), **st.__dict__) for x, st in zip(cfg.x_grid, self.curve)],
            "hitting_samples": self.hitting_samples,
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2)


def crossing(xs, ys, level: float = 0.5) -> float | None:
    """x where the curve first rises through ``level``, by linear interpolation."""
    if not ys or ys[0] >= level:
        return None
    for i in range(1, len(ys)):
        if ys[i] >= level:
            x0, x1, y0, y1 = xs[i - 1], xs[i], ys[i - 1], ys[i]
            return x0 + (level - y0) * (x1 - x0) / (y1 - y0)
    return None


def _hit_job(job):
    params, prop, seed, n_max, backend = job
    return analysis.hitting_time(params, prop, seed, n_max=n_max, backend=backend)


def threshold_scan(config: ExperimentConfig, method: str = "hitting", backend: str | None = None,
                   workers: int | None = None, budget: bool = True) -> ScanResult:
    if budget:
        check_budget(config, method)
    d = config.model.d
    if method == "direct":
        curve = [estimate_probability(config, x, backend, workers) for x in config.x_grid]
        samples: list[int | None] = []
    elif method == "hitting":
        jobs = [(config.model, config.prop, config.trial_seed(t), config.max_n, backend)
                for t in range(config.trials)]
        samples = _map(_hit_job, jobs, workers)
        curve = []
        for x in config.x_grid:
            n = n_for(x, d)
            ok = sum(1 for h in samples if h is not None and h <= n)
            curve.append(TrialStats.wilson(ok, config.trials))
    else:
        raise ValueError(f"unknown scan method {method!r}")
    mid = crossing(list(config.x_grid), [c.estimate for c in curve])
    return ScanResult(config, curve, mid, samples)


def monotone_violations(curve: list[TrialStats]) -> list[tuple[int, int]]:
    """Pairs (i, j), i < j, where ci_high at j lies strictly below ci_low at i."""
    out = []
    for j in range(len(curve)):
        for i in range(j):
            if curve[j].ci_high < curve[i].ci_low:
                out.append((i, j))
    return out


# -- hitting times -------------------------------------------------------------

@dataclass
class HittingEnsemble:
    d: int
    samples: list[int | None]
    normalized: list[float]
    mean: float
    stdev: float

    @property
    def saturated(self) -> int:
        return sum(1 for s in self.samples if s is None)

    @property
    def saturation_rate(self) -> float:
        return self.saturated / len(self.samples)

    @property
    def failed(self) -> bool:
        return self.saturation_rate > 0.05

    def summary(self) -> dict:
        return {"d": self.d, "runs": len(self.samples), "mean": self.mean, "stdev": self.stdev,
                "saturated": self.saturated, "saturation_rate": self.saturation_rate,
                "samples": self.samples, "normalized": self.normalized}


def hitting_ensemble(params: ModelParams, prop: Property, runs: int, seed: SeedSpec, n_max: int = 10**7,
                     backend: str | None = None, workers: int | None = None) -> HittingEnsemble:
    if runs < 1:
        raise ConfigError("runs must be >= 1")
    jobs = [(params, prop, SeedSpec(seed.master_seed, seed.stream_id + t), n_max, backend) for t in range(runs)]
    samples = _map(_hit_job, jobs, workers)
    d = params.d
    norm = [math.log(n) / d if d else 0.0 for n in samples if n is not None]
    mean = math.fsum(norm) / len(norm) if norm else math.nan
    sd = statistics.stdev(norm) if len(norm) > 1 else 0.0
    return HittingEnsemble(d, samples, norm, mean, sd)


# -- dimensions at the hitting time -------------------------------------------------

@dataclass
class DimensionStats:
    s: int
    d: int
    per_run: list[float]
    mean: float
    stdev: float
    predicted: float
    saturated: int

    @property
    def gap(self) -> float:
        return abs(self.mean - self.predicted)

    def summary(self) -> dict:
        return {"s": self.s, "d": self.d, "runs": len(self.per_run) + self.saturated, "mean": self.mean,
                "stdev": self.stdev, "predicted_alpha_s": self.predicted, "gap": self.gap,
                "saturated": self.saturated, "per_run": self.per_run}


def _dims_job(job):
    s, params, seed, n_max, backend = job
    n, fam = analysis.hitting_time(params, Clique(s), seed, n_max=n_max, backend=backend, return_family=True)
    if n is None:
        return None
    dims = analysis.clique_members(fam, s, backend).member_dimensions
    return float(np.mean(dims)) / params.d


def dimension_at_hitting(s: int, params: ModelParams, runs: int, seed: SeedSpec, n_max: int = 10**7,
                         backend: str | None = None, workers: int | None = None) -> DimensionStats:
    """Mean dimension/d of the vertices lying in s-cliques at the s-clique hitting time.

    Each run contributes the average over its clique members; the reported
    mean is over runs.
    """
    if s < 1:
        raise ConfigError("s must be >= 1")
    if runs < 1:
        raise ConfigError("runs must be >= 1")
    jobs = [(s, params, SeedSpec(seed.master_seed, seed.stream_id + t), n_max, backend) for t in range(runs)]
    res = _map(_dims_job, jobs, workers)
    per_run = [r for r in res if r is not None]
    mean = math.fsum(per_run) / len(per_run) if per_run else math.nan
    sd = statistics.stdev(per_run) if len(per_run) > 1 else 0.0
    if isinstance(params, Binomial):
        pred = theory.alpha_s(params.p, s)
    else:
        pred = params.alpha
    return DimensionStats(s, params.d, per_run, mean, sd, pred, len(res) - len(per_run))


# -- quasirandomness --------------------------------------------------------------

@dataclass
class QuasiReport:
    d: int
    epsilon: float
    n: int
    trials: int
    edges: float
    c4: float
    edges_predicted: float
    c4_predicted: float
    c4_predicted_q4: float

    @property
    def edge_rel_error(self) -> float:
        return abs(self.edges - self.edges_predicted) / self.edges_predicted

    @property
    def c4_rel_error(self) -> float:
        return abs(self.c4 - self.c4_predicted) / self.c4_predicted

    @property
    def c4_rel_error_q4(self) -> float:
        return abs(self.c4 - self.c4_predicted_q4) / self.c4_predicted_q4

    def summary(self) -> dict:
        return dict(self.__dict__, edge_rel_error=self.edge_rel_error, c4_rel_error=self.c4_rel_error,
                    c4_rel_error_q4=self.c4_rel_error_q4)


def quasirandomness_report(d: int, epsilon: float, n: int, trials: int, seed: SeedSpec,
                           backend: str | None = None, enforce_range: bool = True) -> QuasiReport:
    """Edge and 4-cycle counts of G(n, d, 1 - epsilon) against closed forms.

    Counts are averaged over ``trials`` independent graphs.
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ConfigError("epsilon must lie in [0, 1]")
    if enforce_range and epsilon > 0 and not 0.25 <= epsilon**2 * d <= 4:
        raise ConfigError(f"epsilon^2 d = {epsilon**2 * d:.4g} is outside [1/4, 4]")
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    params = Binomial(d, 1.0 - epsilon)
    edges, c4 = [], []
    for t in range(trials):
        fam = sample_family(params, n, SeedSpec(seed.master_seed, seed.stream_id + t))
        g = build_graph(fam, backend)
        edges.append(edge_count(g))
        c4.append(count_c4(g, backend))
    q = theory.binomial_edge_prob(d, params.p)
    quads = n * (n - 1) * (n - 2) * (n - 3) / 8
    return QuasiReport(d, epsilon, n, trials, float(np.mean(edges)), float(np.mean(c4)),
                       math.comb(n, 2) * q, quads * theory.c4_prob(d, params.p), quads * q**4)


def backend_name(backend: str | None) -> str:
    return kernels.get(backend).BACKEND


__all__ = [
    "Budget", "BudgetExceeded", "ConfigError", "DimensionStats", "ExperimentConfig", "HittingEnsemble",
    "QuasiReport", "ScanResult", "TrialStats", "check_budget", "crossing", "dimension_at_hitting",
    "estimate_cost", "estimate_probability", "grid", "hitting_ensemble", "monotone_violations", "n_for",
    "quasirandomness_report", "threshold_scan",
]
