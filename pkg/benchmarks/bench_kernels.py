"""Compiled vs pure-Python kernels on representative workloads.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--quick]

Each case runs through the public API with an explicit backend; results from the
two backends are compared before timings are reported.
"""

from __future__ import annotations

import argparse
import sys
import time

from subcubegraph import analysis, kernels
from subcubegraph.analysis import Clique, Cover
from subcubegraph.graph import build_graph
from subcubegraph.models import Binomial, SeedSpec, Uniform, sample_family


def cases(quick: bool):
    scale = 1 if quick else 4
    fam_depth = sample_family(Binomial(24, 0.5), 150 * scale, SeedSpec(1))
    fam_cover = sample_family(Uniform(20, 10), 400 * scale, SeedSpec(2))
    fam_wide = sample_family(Binomial(100, 0.5), 100 * scale, SeedSpec(3))
    fam_graph = sample_family(Binomial(30, 0.5), 300 * scale, SeedSpec(4))
    return [
        ("max coverage depth  d=24 n=%d" % len(fam_depth), lambda b: analysis.clique_number(fam_depth, b)),
        ("max coverage depth  d=100 n=%d" % len(fam_wide), lambda b: analysis.clique_number(fam_wide, b)),
        ("uncovered count     d=20 n=%d" % len(fam_cover), lambda b: analysis.uncovered_count(fam_cover, b)),
        ("adjacency           d=30 n=%d" % len(fam_graph), lambda b: int(build_graph(fam_graph, b).degrees().sum())),
        ("triangle hitting    d=%d" % (40 if quick else 50),
         lambda b: [analysis.hitting_time(Binomial(24 if quick else 30, 0.5), Clique(3), SeedSpec(5, t), backend=b)
                    for t in range(3)]),
        ("cover hitting       d=16 p=0.3",
         lambda b: [analysis.hitting_time(Binomial(16, 0.3), Cover(), SeedSpec(6, t), backend=b) for t in range(3)]),
    ]


def timed(fn, backend, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(backend)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="smaller inputs")
    args = ap.parse_args(argv)
    if kernels.compiled is None:
        print("compiled kernels not available; build with: python3 setup.py build_ext --inplace", file=sys.stderr)
        return 1
    print(f"{'case':<36} {'python s':>10} {'compiled s':>11} {'speedup':>8}")
    for name, fn in cases(args.quick):
        tp, rp = timed(fn, "python", args.repeat)
        tc, rc = timed(fn, "compiled", args.repeat)
        if rp != rc:
            print(f"{name}: backends disagree ({rp!r} vs {rc!r})", file=sys.stderr)
            return 1
        print(f"{name:<36} {tp:>10.4f} {tc:>11.4f} {tp / max(tc, 1e-9):>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
