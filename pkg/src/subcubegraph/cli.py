"""``subcubes`` command-line entry point.

Every subcommand takes ``--config FILE`` (INI, one section named after the
subcommand or ``[DEFAULT]``); explicit flags override config values.
Exit status: 0 success, 1 configuration violation, 2 usage error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import datetime as _dt
import hashlib
import io
import json
import math
import sys
from pathlib import Path

from . import __version__, analysis, experiments, selftest, theory
from .analysis import parse_property
from .experiments import ConfigError, ExperimentConfig
from .graph import build_graph
from .models import Binomial, FamilyFormatError, SeedSpec, Uniform, load_family, loads_family, sample_family

RANDOMIZED = {"gen", "scan", "hit", "dims", "quasi"}

DEFAULTS = {
    "format": "csv",
    "p": None,
    "k": None,
    "alpha": None,
    "trials": 100,
    "runs": 100,
    "n_max": 10**7,
    "n_cap": None,
    "method": "hitting",
    "workers": 1,
    "backend": None,
    "x_step": 0.01,
    "graphs": 1,
    "quick": False,
}


class UsageError(Exception):
    pass


def _seed(text: str) -> SeedSpec:
    try:
        return SeedSpec.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad seed {text!r}: {exc}")


def _s_range(text: str) -> list[int]:
    """'2..5', '2,3,7' or '4'."""
    out: list[int] = []
    for part in text.split(","):
        lo, sep, hi = part.partition("..")
        out.extend(range(int(lo), int(hi) + 1) if sep else [int(lo)])
    if not out or min(out) < 1:
        raise argparse.ArgumentTypeError("clique sizes must be >= 1")
    return out


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _model_args(p: argparse.ArgumentParser, need_d: bool = True) -> None:
    p.add_argument("--model", choices=["binomial", "uniform"])
    if need_d:
        p.add_argument("--d", type=int)
    p.add_argument("--p", type=float, help="binomial free-coordinate probability")
    p.add_argument("--k", type=int, help="uniform subcube dimension")
    p.add_argument("--alpha", type=float, help="uniform dimension fraction (k = floor(alpha d))")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="subcubes", description="Random subcube intersection graphs.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def cmd(name: str, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_, argument_default=argparse.SUPPRESS)
        p.add_argument("--seed", type=_seed, help="master seed, optionally 'master:stream'")
        p.add_argument("--out", type=Path, help="output file (a manifest is written next to it)")
        p.add_argument("--format", choices=["csv", "json"])
        p.add_argument("--config", type=Path, help="INI config file; flags override it")
        p.add_argument("--backend", choices=["python", "compiled"])
        return p

    p = cmd("gen", "sample a feature family")
    _model_args(p)
    p.add_argument("--n", type=int)

    for name, help_ in (("graph", "family -> edge list"), ("clique", "family -> clique number and witness"),
                        ("cover", "family -> uncovered point count")):
        p = cmd(name, help_)
        p.add_argument("family", type=Path, nargs="?")
        if name == "clique":
            p.add_argument("--members", type=int, help="also list vertices lying in cliques of this size")

    p = cmd("thresholds", "closed-form threshold table")
    _model_args(p, need_d=False)
    p.add_argument("--s", type=_s_range)

    p = cmd("scan", "threshold transition scan")
    _model_args(p)
    p.add_argument("--property", type=parse_property)
    p.add_argument("--x-min", dest="x_min", type=float)
    p.add_argument("--x-max", dest="x_max", type=float)
    p.add_argument("--x-step", dest="x_step", type=float)
    p.add_argument("--x-grid", dest="x_grid", type=_floats, help="explicit comma-separated x values")
    p.add_argument("--trials", type=int)
    p.add_argument("--n-cap", dest="n_cap", type=int)
    p.add_argument("--method", choices=["hitting", "direct"])
    p.add_argument("--workers", type=int)

    p = cmd("hit", "hitting-time ensemble")
    _model_args(p)
    p.add_argument("--property", type=parse_property)
    p.add_argument("--runs", type=int)
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--workers", type=int)

    p = cmd("dims", "clique-member dimensions at the hitting time")
    _model_args(p)
    p.add_argument("--s", type=int)
    p.add_argument("--runs", type=int)
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--workers", type=int)

    p = cmd("quasi", "edge and 4-cycle counts against closed forms")
    p.add_argument("--d", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--graphs", type=int, help="independent graphs to average over")

    p = cmd("selftest", "oracle cross-checks")
    p.add_argument("--quick", action="store_true")
    return ap


# -- configuration merging --------------------------------------------------------

def _actions(parser: argparse.ArgumentParser, command: str) -> dict:
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    return {a.dest: a for a in sub.choices[command]._actions if a.dest != "help"}


def _from_config(path: Path, command: str, actions: dict) -> dict:
    cp = configparser.ConfigParser()
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    section = cp[command] if cp.has_section(command) else cp.defaults()
    out = {}
    for key, raw in section.items():
        dest = key.replace("-", "_")
        act = actions.get(dest)
        if act is None or dest == "config":
            raise ConfigError(f"config key {key!r} is not an option of {command}")
        try:
            if isinstance(act, argparse._StoreTrueAction):
                out[dest] = cp.BOOLEAN_STATES[raw.lower()]
            elif act.type is None:
                out[dest] = raw
            else:
                out[dest] = act.type(raw)
        except (ValueError, KeyError, argparse.ArgumentTypeError) as exc:
            raise ConfigError(f"config key {key!r}: bad value {raw!r} ({exc})")
    return out


def resolve(parser: argparse.ArgumentParser, argv) -> dict:
    ns = parser.parse_args(argv)
    given = vars(ns)
    command = given["command"]
    actions = _actions(parser, command)
    opts = {k: v for k, v in DEFAULTS.items() if k in actions}
    if "config" in given:
        opts.update(_from_config(given["config"], command, actions))
    opts.update(given)
    if command in RANDOMIZED and opts.get("seed") is None:
        raise UsageError(f"{command} needs an explicit --seed")
    return opts


def _need(opts: dict, *keys: str) -> None:
    missing = [k for k in keys if opts.get(k) is None]
    if missing:
        raise UsageError("missing option(s): " + ", ".join("--" + k.replace("_", "-") for k in missing))


def model_from(opts: dict):
    _need(opts, "model", "d")
    try:
        if opts["model"] == "binomial":
            _need(opts, "p")
            return Binomial(opts["d"], opts["p"])
        if opts.get("k") is not None:
            return Uniform(opts["d"], opts["k"])
        _need(opts, "alpha")
        return Uniform.from_alpha(opts["d"], opts["alpha"])
    except ValueError as exc:
        raise ConfigError(str(exc))


# -- output ---------------------------------------------------------------

def _csv_text(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _jsonable(opts: dict) -> dict:
    out = {}
    for k, v in sorted(opts.items()):
        if isinstance(v, (str, int, float, bool, list)) or v is None:
            out[k] = v
        else:
            out[k] = str(v)
    return out


class Output:
    def __init__(self, opts: dict):
        self.opts = opts
        self.started = _dt.datetime.now(_dt.timezone.utc).isoformat()
        self.written: list[Path] = []

    def emit(self, text: str, path: Path | None = None) -> None:
        path = path or self.opts.get("out")
        if path is None:
            sys.stdout.write(text)
            return
        path = Path(path)
        path.write_text(text)
        self.written.append(path)

    def finish(self) -> None:
        if not self.written:
            return
        hashed = {
            "command": self.opts["command"],
            "config": _jsonable({k: v for k, v in self.opts.items() if k not in ("out", "config")}),
            "seed": str(self.opts["seed"]) if self.opts.get("seed") is not None else None,
            "version": __version__,
            "outputs": [{"path": p.name, "sha256": hashlib.sha256(p.read_bytes()).hexdigest()}
                        for p in self.written],
        }
        body = json.dumps(hashed, sort_keys=True)
        manifest = dict(hashed, content_sha256=hashlib.sha256(body.encode()).hexdigest(),
                        started=self.started, finished=_dt.datetime.now(_dt.timezone.utc).isoformat())
        first = self.written[0]
        first.with_name(first.name + ".manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def _read_family(opts: dict):
    path = opts.get("family")
    if path is None:
        return loads_family(sys.stdin.read())
    return load_family(path)


# -- commands ---------------------------------------------------------------

def cmd_gen(opts, out: Output) -> int:
    _need(opts, "n")
    params = model_from(opts)
    if opts["n"] < 0:
        raise ConfigError("n must be non-negative")
    fam = sample_family(params, opts["n"], opts["seed"])
    if opts["format"] == "json":
        out.emit(json.dumps({"d": fam.d, "n": len(fam), "model": params.name, "param": params.param,
                             "seed": str(opts["seed"]), "rows": fam.rows()}) + "\n")
    else:
        out.emit(fam.dumps())
    return 0


def cmd_graph(opts, out: Output) -> int:
    g = build_graph(_read_family(opts), opts["backend"])
    if opts["format"] == "json":
        out.emit(json.dumps({"n": g.n, "edges": [list(e) for e in g.edges()]}) + "\n")
    else:
        out.emit(g.edge_list_text())
    return 0


def cmd_clique(opts, out: Output) -> int:
    fam = _read_family(opts)
    dw = analysis.max_coverage_depth(fam, opts["backend"])
    res = dw.to_json()
    if opts.get("members") is not None:
        res["membership"] = analysis.clique_members(fam, opts["members"], opts["backend"]).to_json()
    if opts["format"] == "json":
        out.emit(json.dumps(res) + "\n")
    else:
        out.emit(f"{dw.depth}\n{dw.witness}\n")
    return 0


def cmd_cover(opts, out: Output) -> int:
    fam = _read_family(opts)
    u = analysis.uncovered_count(fam, opts["backend"])
    if opts["format"] == "json":
        out.emit(json.dumps({"d": fam.d, "n": len(fam), "uncovered": u, "cover": u == 0}) + "\n")
    else:
        out.emit(f"{u}\n")
    return 0


def cmd_thresholds(opts, out: Output) -> int:
    _need(opts, "model", "s")
    if opts["model"] == "binomial":
        _need(opts, "p")
        value = opts["p"]
    else:
        _need(opts, "alpha")
        value = opts["alpha"]
    try:
        rows = theory.threshold_rows(opts["model"], opts["s"], value)
    except ValueError as exc:
        raise ConfigError(str(exc))
    header = ("model", "s", "p_or_alpha", "t_Ks", "t_cover", "alpha_s")
    if opts["format"] == "json":
        out.emit(json.dumps([dict(zip(header, r)) for r in rows], indent=2) + "\n")
    else:
        out.emit(_csv_text([header] + [(m, s, repr(v), repr(a), repr(b), repr(c)) for m, s, v, a, b, c in rows]))
    return 0


def cmd_scan(opts, out: Output) -> int:
    _need(opts, "property")
    params = model_from(opts)
    if opts.get("x_grid"):
        xs = tuple(opts["x_grid"])
    else:
        _need(opts, "x_min", "x_max")
        xs = experiments.grid(opts["x_min"], opts["x_max"], opts["x_step"])
    n_cap = opts["n_cap"] if opts["n_cap"] is not None else max(experiments.n_for(x, params.d) for x in xs)
    cfg = ExperimentConfig(params, opts["property"], xs, opts["trials"], opts["seed"], n_cap)
    res = experiments.threshold_scan(cfg, opts["method"], opts["backend"], opts["workers"])
    if opts["format"] == "json":
        out.emit(res.to_json() + "\n")
    else:
        out.emit(res.to_csv())
        if opts.get("out") is not None:
            out.emit(res.to_json() + "\n", Path(str(opts["out"]) + ".summary.json"))
    return 0


def cmd_hit(opts, out: Output) -> int:
    _need(opts, "property")
    params = model_from(opts)
    ens = experiments.hitting_ensemble(params, opts["property"], opts["runs"], opts["seed"], opts["n_max"],
                                       opts["backend"], opts["workers"])
    summary = dict(ens.summary(), property=str(opts["property"]),
                   predicted_threshold=theory.threshold_for(params, opts["property"]))
    if opts["format"] == "json":
        out.emit(json.dumps(summary, indent=2) + "\n")
    else:
        out.emit(_csv_text([("run", "n", "log_n_over_d")] + [
            (i, "" if n is None else n, "" if n is None else repr(math.log(n) / params.d))
            for i, n in enumerate(ens.samples)]))
    if ens.failed:
        print(f"saturation rate {ens.saturation_rate:.1%} exceeds 5%", file=sys.stderr)
        return 1
    return 0


def cmd_dims(opts, out: Output) -> int:
    _need(opts, "s")
    params = model_from(opts)
    st = experiments.dimension_at_hitting(opts["s"], params, opts["runs"], opts["seed"], opts["n_max"],
                                          opts["backend"], opts["workers"])
    if opts["format"] == "json":
        out.emit(json.dumps(st.summary(), indent=2) + "\n")
    else:
        out.emit(_csv_text([("run", "mean_member_dim_over_d")] + [(i, repr(v)) for i, v in enumerate(st.per_run)]))
    if st.per_run and st.saturated / (len(st.per_run) + st.saturated) > 0.05:
        print("saturation rate exceeds 5%", file=sys.stderr)
        return 1
    return 0


def cmd_quasi(opts, out: Output) -> int:
    _need(opts, "d", "epsilon", "n")
    rep = experiments.quasirandomness_report(opts["d"], opts["epsilon"], opts["n"], opts["graphs"],
                                             opts["seed"], opts["backend"])
    s = rep.summary()
    if opts["format"] == "json":
        out.emit(json.dumps(s, indent=2) + "\n")
    else:
        out.emit(_csv_text([tuple(s)] + [tuple(repr(v) if isinstance(v, float) else v for v in s.values())]))
    return 0


def cmd_selftest(opts, out: Output) -> int:
    seed = opts.get("seed") or SeedSpec(0)
    results = selftest.run_all(seed.master_seed, quick=opts["quick"])
    if opts["format"] == "json":
        out.emit(json.dumps([{"name": r.name, "passed": r.passed, "detail": r.detail} for r in results]) + "\n")
    else:
        out.emit("".join(r.line() + "\n" for r in results))
    return 0 if all(r.passed for r in results) else 1


COMMANDS = {
    "gen": cmd_gen, "graph": cmd_graph, "clique": cmd_clique, "cover": cmd_cover, "thresholds": cmd_thresholds,
    "scan": cmd_scan, "hit": cmd_hit, "dims": cmd_dims, "quasi": cmd_quasi, "selftest": cmd_selftest,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        opts = resolve(parser, argv)
    except SystemExit as exc:  # argparse usage errors and --help
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"subcubes: error: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"subcubes: config error: {exc}", file=sys.stderr)
        return 1
    out = Output(opts)
    try:
        code = COMMANDS[opts["command"]](opts, out)
    except UsageError as exc:
        print(f"subcubes: error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, FamilyFormatError, OSError) as exc:
        print(f"subcubes: {exc}", file=sys.stderr)
        return 1
    out.finish()
    return code


if __name__ == "__main__":
    sys.exit(main())
