"""Oracle cross-checks run by ``subcubes selftest``."""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import analysis, kernels, oracles, theory
from .analysis import Clique, Cover
from .graph import bron_kerbosch_max_clique, build_graph
from .models import Binomial, SeedSpec, Uniform, sample_family


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail} ({self.seconds:.2f}s)"


def random_params(rng: np.random.Generator, d_lo: int, d_hi: int):
    d = int(rng.integers(d_lo, d_hi + 1))
    if rng.random() < 0.5:
        return Binomial(d, float(rng.choice([0.0, 0.2, 0.5, 0.8, 1.0, rng.random()])))
    return Uniform(d, int(rng.integers(0, d + 1)))


def check_helly(seed: int, count: int = 300) -> CheckResult:
    rng = np.random.default_rng(seed)
    bad = 0
    for t in range(count):
        params = random_params(rng, 1, 10)
        fam = sample_family(params, int(rng.integers(1, 31)), SeedSpec(seed, t))
        bk = bron_kerbosch_max_clique(build_graph(fam))
        for b in kernels.available():
            if analysis.clique_number(fam, b) != bk:
                bad += 1
    return CheckResult("helly", bad == 0, f"{count} families, {bad} mismatches")


def check_uncovered(seed: int, count: int = 200) -> CheckResult:
    rng = np.random.default_rng(seed + 1)
    bad = 0
    for t in range(count):
        params = random_params(rng, 1, 12)
        fam = sample_family(params, int(rng.integers(1, 60)), SeedSpec(seed + 1, t))
        ref = oracles.uncovered_by_scan(fam)
        for b in kernels.available():
            if analysis.uncovered_count(fam, b) != ref:
                bad += 1
    return CheckResult("uncovered", bad == 0, f"{count} families, {bad} mismatches")


def check_uniform_edge_prob(max_d: int = 7) -> CheckResult:
    bad = [(d, k) for d in range(1, max_d + 1) for k in range(d + 1)
           if oracles.uniform_edge_prob_by_enumeration(d, k) != theory.exact_uniform_edge_prob_fraction(d, k)]
    return CheckResult("uniform-edge-prob", not bad, f"d <= {max_d}, mismatches {bad}")


def check_coordinate_formulas() -> CheckResult:
    bad = []
    for p in (Fraction(0), Fraction(1, 3), Fraction(1, 2), Fraction(4, 5), Fraction(1)):
        r = (1 + p) / 2
        for s in (1, 2, 3, 4):
            if oracles.clique_coordinate_prob(s, p) != 2 * r**s - p**s:
                bad.append(("clique", s, p))
        if oracles.c4_coordinate_prob(p) != 2 * r**4 - p**4 + p**2 * (1 - p) ** 2:
            bad.append(("c4", p))
        for s, i in ((2, 0), (2, 1), (3, 1), (3, 2)):
            got = float(oracles.joint_clique_coordinate_prob(s, i, p))
            if abs(got - theory.joint_clique_prob(s, i, 1, float(p))) > 1e-12:
                bad.append(("joint", s, i, p))
    return CheckResult("coordinate-formulas", not bad, f"mismatches {bad}")


def check_lemma_grid(max_s: int = 30) -> CheckResult:
    worst, edge = 0.0, 0.0
    for j in range(101):
        y = Fraction(j, 100)
        for s in range(1, max_s + 1):
            for i in range(s + 1):
                g = theory.lemma_a_gap(y, i, s)
                worst = min(worst, g)
                if i in (0, s):
                    edge = max(edge, abs(g))
    ok = worst >= -1e-9 and edge <= 1e-9
    return CheckResult("lemma-grid", ok, f"min gap {worst:.3g}, max |gap| at i in {{0,s}} {edge:.3g}")


def check_backends(seed: int) -> CheckResult:
    if len(kernels.available()) < 2:
        return CheckResult("backends", True, "compiled backend not built; skipped")
    bad = 0
    for t in range(6):
        for params, prop in ((Binomial(24, 0.5), Clique(2)), (Binomial(20, 0.4), Clique(3)),
                             (Binomial(10, 0.3), Cover()), (Uniform(12, 4), Cover())):
            sd = SeedSpec(seed, t)
            if analysis.hitting_time(params, prop, sd, backend="python") != \
                    analysis.hitting_time(params, prop, sd, backend="compiled"):
                bad += 1
    return CheckResult("backends", bad == 0, f"hitting times, {bad} disagreements")


def run_all(seed: int = 0, quick: bool = False) -> list[CheckResult]:
    checks = [
        lambda: check_helly(seed, 60 if quick else 300),
        lambda: check_uncovered(seed, 40 if quick else 200),
        lambda: check_uniform_edge_prob(5 if quick else 7),
        check_coordinate_formulas,
        lambda: check_lemma_grid(10 if quick else 30),
        lambda: check_backends(seed),
    ]
    out = []
    for fn in checks:
        t0 = time.perf_counter()
        try:
            res = fn()
        except Exception as exc:  # a crash is a failed check, not an aborted run
            res = CheckResult(getattr(fn, "__name__", "check"), False, f"raised {exc!r}")
        res.seconds = time.perf_counter() - t0
        out.append(res)
    return out
