"""``fredholm-lab`` command line.

Exit codes: 0 all identities pass, 1 verification failure (or a loop that
cannot be wound), 2 invalid input or configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from fredholm_lab import extension as ex
from fredholm_lab import family as fa
from fredholm_lab import grassmann as gr
from fredholm_lab import serialize as se
from fredholm_lab import suites
from fredholm_lab import symplectic as sy
from fredholm_lab.errors import FredholmLabError, InsufficientSampling, NotClosed, SchemaError
from fredholm_lab.family import DEFAULT_REFINE_DEPTH
from fredholm_lab.grassmann import Subspace
from fredholm_lab.numeric import Tolerance

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
SEED_ENV = "FREDHOLM_LAB_SEED"


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    seed: int
    trials: int
    dim_max: int
    tol: Tolerance
    suites: tuple
    out: str | None = None
    fmt: str = "json"
    jobs: int = 1
    fault_trial: int | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("--trials must be at least 1")
        if self.dim_max < 2:
            raise ConfigError("--dim-max must be at least 2")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.jobs < 1:
            raise ConfigError("--jobs must be at least 1")
        if self.fault_trial is not None and not 0 <= self.fault_trial < self.trials:
            raise ConfigError("--fault-inject trial is out of range")

    def to_dict(self):
        return {"seed": self.seed, "trials": self.trials, "dim_max": self.dim_max,
                "tol_rank": self.tol.rank_rel, "tol_gap": self.tol.gap_abs, "suites": list(self.suites)}


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _tolerance(args) -> Tolerance:
    try:
        return Tolerance(rank_rel=args.tol_rank, gap_abs=args.tol_gap)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


# -- index -------------------------------------------------------------------


def _boundary_condition(value, p: ex.NestedPair, field: str, tol: Tolerance, op=None) -> Subspace:
    if value == "zero":
        return Subspace.zero(p.ambient_dim)
    if value == "beta":
        return p.beta
    if value == "cauchy" and op is not None:
        return ex.cauchy_data(op, tol, pair=p)
    if isinstance(value, str):
        raise SchemaError(field, f"unknown keyword {value!r}")
    l = se.subspace_from_json(value, field, tol)
    if l.ambient_dim != p.ambient_dim:
        raise SchemaError(field, f"must live in the {p.ambient_dim}-dimensional ambient space")
    try:
        ex.check_in_beta(p, l, tol)
    except FredholmLabError as exc:
        raise SchemaError(field, str(exc)) from exc
    return l


def index_document(doc, tol: Tolerance) -> tuple[dict, bool]:
    """Evaluate an index file; returns the JSON result and whether every identity passed."""
    if not isinstance(doc, dict):
        raise SchemaError("file", "expected a JSON object")
    if "pair" in doc:
        pair = doc["pair"]
        s = se.subspace_from_json(se._require(pair, "s", "pair"), "pair.s", tol)
        t = se.subspace_from_json(se._require(pair, "t", "pair"), "pair.t", tol)
        if s.ambient_dim != t.ambient_dim:
            raise SchemaError("pair", "s and t live in different ambient spaces")
        r = gr.pair_index(s, t, tol)
        return {"kind": "pair", "ambient": s.ambient_dim, "dim_s": s.dim, "dim_t": t.dim, **r.to_dict()}, True
    if "operator" in doc:
        op = se.operator_pair_from_json(doc["operator"], "operator", tol)
        p = ex.graphs(op, tol)
        l = _boundary_condition(doc.get("l", "zero"), p, "l", tol, op)
        rep = ex.verify_point_index_formula(op, l, tol, strict=False, pair=p)
        real = ex.realization(op, l, tol, pair=p)
        return {"kind": "operator", "index": real.index, "dim_ker": real.kernel.dim,
                "dim_coker": real.coker_dim, "dim_beta": p.beta.dim, "dim_l": l.dim,
                "formula": "pass" if rep.passed else "fail", "report": rep.to_dict()}, rep.passed
    if "nested" in doc:
        p = se.nested_pair_from_json(doc["nested"], "nested", tol)
        m = se.subspace_from_json(se._require(doc, "m", ""), "m", tol)
        if m.ambient_dim != p.ambient_dim:
            raise SchemaError("m", f"must live in C^{p.ambient_dim}")
        l = _boundary_condition(doc.get("l", "zero"), p, "l", tol)
        rep = ex.kk_defect(p, m, l, tol, strict=False)
        return {"kind": "nested", "index": rep.values["index_ambient"], "index_beta": rep.values["index_beta"],
                "dim_k": rep.values["dim_k"], "dim_k_prime": rep.values["dim_k_prime"],
                "formula": "pass" if rep.passed else "fail", "report": rep.to_dict()}, rep.passed
    raise SchemaError("file", "expected one of the keys 'pair', 'operator', 'nested'")


def cmd_index(args) -> int:
    tol = _tolerance(args)
    result, ok = index_document(se.load_json(args.file), tol)
    _emit(se.dumps(se.to_plain(result)), args.out)
    return EXIT_PASS if ok else EXIT_FAIL


# -- verify ------------------------------------------------------------------


def _run_one(cfg: RunConfig, suite: str, trial: int) -> dict:
    corrupt = cfg.fault_trial == trial and suite == cfg.suites[0]
    record = {"suite": suite, "trial": trial, "seed": cfg.seed}
    try:
        rep = suites.run_trial(suite, cfg.seed, trial, cfg.dim_max, cfg.tol, corrupt)
    except FredholmLabError as exc:
        record.update(passed=False, error=f"{type(exc).__name__}: {exc}", checks=[])
        return record
    record.update(passed=rep.passed, checks=[(c.name, c.passed) for c in rep.checks],
                  failures=[c.to_dict() for c in rep.failures])
    return record


def run_verify(cfg: RunConfig) -> dict:
    """Run the selected suites; the result depends only on ``cfg`` (not on ``jobs``)."""
    tasks = [(s, t) for s in cfg.suites for t in range(cfg.trials)]
    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            records = list(pool.map(lambda st: _run_one(cfg, *st), tasks))
    else:
        records = [_run_one(cfg, s, t) for s, t in tasks]
    summary, failures = {}, []
    for suite in cfg.suites:
        rows = [r for r in records if r["suite"] == suite]
        tally: dict = {}
        for r in rows:
            for name, ok in r["checks"]:
                passed, total = tally.get(name, (0, 0))
                tally[name] = (passed + int(ok), total + 1)
        failed = [r for r in rows if not r["passed"]]
        summary[suite] = {"trials": len(rows), "failed": len(failed),
                          "checks": {k: {"passed": v[0], "total": v[1]} for k, v in sorted(tally.items())}}
        for r in failed:
            entry = {"suite": suite, "trial": r["trial"], "seed": r["seed"]}
            if "error" in r:
                entry["error"] = r["error"]
            else:
                entry["failures"] = r["failures"]
            failures.append(entry)
    return {"config": cfg.to_dict(), "pass": not failures, "suites": summary, "failures": failures}


def verify_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["suite", "check", "passed", "total"])
    for suite, info in report["suites"].items():
        for name, c in info["checks"].items():
            w.writerow([suite, name, c["passed"], c["total"]])
    return buf.getvalue()


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError as exc:
        raise ConfigError(f"{SEED_ENV} is not an integer: {env!r}") from exc


def cmd_verify(args) -> int:
    cfg = RunConfig(
        seed=_seed(args), trials=args.trials, dim_max=args.dim_max, tol=_tolerance(args),
        suites=suites.SUITES if args.suite == "all" else (args.suite,), out=args.out,
        fmt=args.format, jobs=args.jobs, fault_trial=args.fault_inject,
    )
    report = run_verify(cfg)
    _emit(verify_csv(report) if cfg.fmt == "csv" else se.dumps(se.to_plain(report)), cfg.out)
    for f in report["failures"]:
        what = f.get("error") or "; ".join(c["name"] for c in f["failures"])
        print(f"FAIL {f['suite']} trial {f['trial']} (seed {f['seed']}): {what}", file=sys.stderr)
    return EXIT_PASS if report["pass"] else EXIT_FAIL


# -- winding -----------------------------------------------------------------


def cmd_winding(args) -> int:
    tol = _tolerance(args)
    if not 0 <= args.refine_max <= DEFAULT_REFINE_DEPTH:
        raise ConfigError(f"--refine-max must lie in [0, {DEFAULT_REFINE_DEPTH}]")
    doc = se.load_json(args.file)
    loop = se.loop_from_json(doc, "loop", tol)
    try:
        if loop.kind == "subspace":
            if "symplectic" in doc:
                sp = se.symplectic_from_json(doc["symplectic"], "symplectic", tol)
            else:
                sp = sy.standard_symplectic(loop.samples[0].ambient_dim // 2, tol)
            ref = se.subspace_from_json(doc["reference"], "reference", tol) if "reference" in doc else loop.samples[0]
            if not loop.closed or fa.closure_gap(loop) > tol.gap_abs:
                raise NotClosed("Lagrangian loop does not close")
            u_loop = fa.relative_unitary_loop(sp, loop, ref, tol)
        else:
            u_loop = loop
        refine = fa.geodesic_refiner(u_loop) if args.refine_max else None
        rep = fa.winding_number(u_loop, refine, args.refine_max, tol)
    except (InsufficientSampling, NotClosed) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except FredholmLabError as exc:
        raise SchemaError("loop", f"{type(exc).__name__}: {exc}") from exc
    if args.format == "csv":
        _emit(rep.phase_csv(), args.out)
    else:
        _emit(se.dumps(se.to_plain({**rep.to_dict(), "samples": len(loop), "kind": loop.kind})), args.out)
    return EXIT_PASS


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-rank", type=float, default=1e-10, help="relative singular-value threshold")
    common.add_argument("--tol-gap", type=float, default=1e-8, help="absolute projector-gap threshold")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    parser = argparse.ArgumentParser(prog="fredholm-lab", description="Index calculus for pairs of subspaces.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", parents=[common], help="index of a pair, operator realization or nested instance")
    p.add_argument("file")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("verify", parents=[common], help="run randomized identity suites")
    p.add_argument("--suite", choices=(*suites.SUITES, "all"), default="all")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=None, help=f"master seed (fallback: ${SEED_ENV}, then 0)")
    p.add_argument("--dim-max", type=int, default=10)
    p.add_argument("--jobs", type=int, default=1, help="worker threads")
    p.add_argument("--fault-inject", type=int, nargs="?", const=0, default=None, metavar="TRIAL",
                   help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("winding", parents=[common], help="winding number of a loop file")
    p.add_argument("file")
    p.add_argument("--refine-max", type=int, default=0,
                   help="bisection depth for coarse steps (0 disables refinement)")
    p.set_defaults(func=cmd_winding)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FredholmLabError as exc:
        # invariant violations in the input (non-finite entries, bad nesting, ...)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
