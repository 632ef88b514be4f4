"""Command line entry point: ``dirhyper {verify,gap,shatter,embed,mu}``.

Every subcommand builds a report dict
``{"experiment", "params", "seed", "status", "metrics", "violations"}`` and
writes it as JSON, or as CSV with one row per trial or grid cell.  Exit codes:
0 pass, 1 violation, 2 invalid parameters.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import bregman, instances, shatter, verify
from .errors import DomainError, InvalidParameterError

EXIT_PASS, EXIT_VIOLATION, EXIT_INVALID = 0, 1, 2


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _clean(obj):
    """JSON-safe copy: numpy scalars unwrapped, non-finite floats as strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def make_report(experiment, params, seed, metrics, violations, rows):
    status = "violation" if violations else "pass"
    return {
        "experiment": experiment,
        "params": params,
        "seed": seed,
        "status": status,
        "metrics": metrics,
        "violations": violations,
        "_rows": rows,
    }


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        body = {k: v for k, v in report.items() if k != "_rows"}
        return json.dumps(_clean(body), indent=2) + "\n"
    rows = [_clean(r) for r in report.get("_rows", [])]
    fields: list[str] = []
    for r in rows:
        for k in r:
            if k not in fields:
                fields.append(k)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n", restval="")
    w.writeheader()
    for r in rows:
        w.writerow({k: json.dumps(v) if isinstance(v, (dict, list)) else v for k, v in r.items()})
    return buf.getvalue()


# --------------------------------------------------------------------------
# verify


def _result_violation(r: verify.CheckResult) -> dict:
    return {"check": r.check, "params": r.params, "worst": r.worst, "witness": r.witness}


def cmd_verify(args) -> dict:
    if args.max_dim < 1 or args.functions < 2:
        raise InvalidParameterError("need --max-dim >= 1 and --functions >= 2")
    for p in args.ps + args.fourier_ps + args.counterexample_ps:
        if not 0.0 < p < 1.0:
            raise InvalidParameterError(f"probabilities must lie in (0, 1), got {p}")
    if not args.asymptotic_ps or max(args.asymptotic_ps) > 0.5 or min(args.asymptotic_ps) <= 0:
        raise InvalidParameterError("--asymptotic-ps must lie in (0, 0.5]")
    dims = range(1, args.max_dim + 1)
    fourier_dims = range(1, (args.fourier_max_dim or args.max_dim) + 1)

    summary = verify.SweepSummary()
    summary.results += verify.fourier_checks(fourier_dims, args.fourier_ps, args.functions, args.seed).results
    summary.results += verify.identity_checks(dims, args.ps, args.functions, args.seed).results
    cases = verify.hypercontractivity_cases(args.ps)
    summary.results += verify.hypercontractivity_sweep(dims, cases, args.functions, args.seed).results
    summary.results.append(verify.asymptotic_check(args.asymptotic_ps))
    if args.include_counterexample:
        summary.results += [verify.counterexample(p) for p in args.counterexample_ps]

    worst = {}
    for r in summary.results:
        if r.status == "not-applicable":
            continue
        key = r.check if r.check != "hypercontractivity" else f"hypercontractivity:{r.params['variant']}"
        worst.setdefault(key, []).append(r.worst)
    metrics = {
        "trials": summary.trials,
        "cells": len(summary.results),
        "by_check": summary.by_check(),
        "worst": {k: (min(v) if k.startswith("hyper") or k == "counterexample" else max(v))
                  for k, v in worst.items()},
        "skipped_cells": [r.params for r in summary.skipped],
    }
    params = {"max_dim": args.max_dim, "fourier_max_dim": max(fourier_dims), "ps": args.ps,
              "fourier_ps": args.fourier_ps, "functions": args.functions,
              "asymptotic_ps": args.asymptotic_ps,
              "include_counterexample": args.include_counterexample,
              "counterexample_ps": args.counterexample_ps if args.include_counterexample else []}
    rows = [r.row() for r in summary.results]
    return make_report("verify", params, args.seed, metrics,
                       [_result_violation(r) for r in summary.violations], rows)


# --------------------------------------------------------------------------
# gap


def cmd_gap(args) -> dict:
    cfg = instances.GapInstanceConfig(args.dim, args.n, args.eps, args.mu, args.seed,
                                      args.concentration_c, args.perturb_mu)
    if cfg.n < 2:
        raise InvalidParameterError("n must be >= 2: no cross distances otherwise")
    th = instances.GapThresholds(args.ratio_low, args.ratio_high, args.max_outside,
                                 args.separation_factor, args.min_separated, args.max_z)
    inst = instances.generate(cfg)
    if args.save_instance:
        with open(args.save_instance, "w") as fh:
            json.dump(inst.to_json(), fh)
    rep = instances.gap_statistics(inst, th)
    violations = [{"check": k, "witness": {"config": vars(cfg)}} for k, ok in rep.checks.items() if not ok]
    params = {"dim": cfg.dim, "n": cfg.n, "eps": cfg.eps, "mu": cfg.mu, "perturb_mu": cfg.perturb_mu,
              "concentration_c": cfg.concentration_c, "thresholds": vars(th)}
    metrics = {**rep.metrics, "checks": rep.checks}
    return make_report("gap", params, args.seed, metrics, violations, rep.rows())


# --------------------------------------------------------------------------
# shatter


def shatter_families(d: int, count: int, rng: np.random.Generator, kmin: int, kmax: int):
    """Yield (family, density, A): half random subcubes, half random subsets, plus Hamming balls at 1^d."""
    kmax = min(kmax, d)
    for i in range(count):
        k = int(rng.integers(kmin, kmax + 1))
        if i < count // 2:
            yield "subcube", 2.0**-k, shatter.random_subcube(d, k, rng)
        else:
            yield "subset", 2.0**-k, shatter.random_subset(d, 2.0**-k, rng)
    weights = np.cumsum([math.comb(d, r) for r in range(d + 1)]) / 2.0**d
    for r in range(d + 1):
        if weights[r] > 2.0**-kmin:
            break
        yield "hamming-ball", float(weights[r]), shatter.hamming_ball(d, (1 << d) - 1, r)


def cmd_shatter(args) -> dict:
    d = args.dim
    if not 1 <= d <= 20:
        raise InvalidParameterError("shatter needs 1 <= d <= 20")
    if not 1 <= args.kmin <= args.kmax:
        raise InvalidParameterError("need 1 <= --kmin <= --kmax")
    grid = [shatter.ShatterParams(e, m, args.c0, args.c1) for e in args.eps for m in args.mu]
    rows, violations = [], []
    metrics: dict = {"cells": []}
    for ci, sp in enumerate(grid):
        rng = verify.cell_rng(args.seed, 4, ci)
        worst_c1 = math.inf
        n_fam = 0
        for fi, (fam, a, A) in enumerate(shatter_families(d, args.families, rng, args.kmin, args.kmax)):
            res = shatter.shattering_report(A, sp, a)
            n_fam += 1
            worst_c1 = min(worst_c1, res.c1_max)
            rows.append({"kind": "family", "eps": sp.eps, "mu": sp.mu, "index": fi, "family": fam,
                         "a": a, "lhs": res.lhs, "rhs": res.rhs, "c1_max": res.c1_max,
                         "status": "pass" if res.holds else "violation"})
            if not res.holds:
                violations.append({"check": "heavy-set", "params": {"eps": sp.eps, "mu": sp.mu, "a": a},
                                   "witness": {"family": fam, "A": np.flatnonzero(A.values).tolist()}})
        parts = []
        if args.partition in ("bit-sample", "all"):
            parts.append(shatter.make_partition("bit-sample", d, k=args.k))
        if args.partition in ("random-balanced", "all"):
            parts.append(shatter.make_partition("random-balanced", d, rng=verify.cell_rng(args.seed, 5, ci), m=args.m))
        if args.partition in ("seeded-hash", "all"):
            parts.append(shatter.make_partition("seeded-hash", d, m=args.m, seed=args.seed))
        if args.load_partition:
            with open(args.load_partition) as fh:
                parts.append(shatter.Partition.from_json(json.load(fh)))
        cell = {"eps": sp.eps, "mu": sp.mu, "families": n_fam, "family_c1_max": worst_c1,
                "mu_at_least_inv_eps": sp.mu_at_least_inv_eps,
                "eps_within_bound": sp.eps <= args.eps_bound, "partitions": []}
        for part in parts:
            pr = shatter.partition_shatter(part, sp, args.threshold)
            status = "not-applicable" if not pr.applicable else ("pass" if pr.holds else "violation")
            rows.append({"kind": "partition", "eps": sp.eps, "mu": sp.mu, "partition": part.kind, "m": pr.m,
                         "light_cells": pr.light_cells, "lhs": pr.violation_fraction, "rhs": pr.bound,
                         "threshold": pr.threshold, "c1_max": pr.c1_max, "status": status})
            cell["partitions"].append({"kind": part.kind, "m": pr.m, "light_cells": pr.light_cells,
                                       "violation_fraction": pr.violation_fraction, "bound": pr.bound,
                                       "c1_max": pr.c1_max, "status": status, "notes": pr.notes})
            if status == "violation":
                violations.append({"check": "partition", "params": {"eps": sp.eps, "mu": sp.mu},
                                   "witness": {"partition": part.to_json()}})
        metrics["cells"].append(cell)
    params = {"dim": d, "eps": args.eps, "mu": args.mu, "c0": args.c0, "c1": args.c1,
              "families": args.families, "kmin": args.kmin, "kmax": args.kmax,
              "partition": args.partition, "k": args.k, "m": args.m, "threshold": args.threshold,
              "eps_bound": args.eps_bound}
    return make_report("shatter", params, args.seed, metrics, violations, rows)


# --------------------------------------------------------------------------
# embed


def pm_sweep(instances_n: int, max_dim: int, max_points: int, seed: int):
    """Random partial-match instances; half the queries are built to dominate a data point."""
    rows = []
    for i in range(instances_n):
        rng = verify.cell_rng(seed, 6, i)
        d = int(rng.integers(1, max_dim + 1))
        P = rng.integers(0, 1 << d, size=int(rng.integers(1, max_points + 1))).tolist()
        q = int(rng.integers(0, 1 << d))
        if i % 2 == 0:
            q |= int(P[int(rng.integers(0, len(P)))])
        res = bregman.pm_reduction_check(P, q, d)
        rows.append((d, len(P), res))
    return rows


def cmd_embed(args) -> dict:
    names = list(bregman.GENERATORS) if args.generator == "all" else [args.generator]
    if args.pm_max_dim < 1 or args.pm_max_points < 1:
        raise InvalidParameterError("--pm-max-dim and --pm-max-points must be >= 1")
    rows, violations = [], []
    metrics: dict = {"embedding": {}}
    for name in names:
        gen = bregman.get_generator(name)
        anchors = bregman.EmbeddingAnchors.for_generator(gen, args.a, args.b)
        cube = bregman.induced_cube_params(gen, args.a, args.b)
        res = bregman.verify_embedding(gen, anchors, args.dim, args.trials, verify.cell_rng(args.seed, 7))
        ok = res <= args.tol
        metrics["embedding"][name] = {"c0": anchors.c0, "residual": res, "cube_scale": cube.scale,
                                      "cube_mu": cube.mu}
        rows.append({"kind": "embedding", "generator": name, "d": args.dim, "c0": anchors.c0,
                     "residual": res, "status": "pass" if ok else "violation"})
        if not ok:
            violations.append({"check": "embedding", "params": {"generator": name, "a": args.a, "b": args.b,
                                                                "d": args.dim}, "worst": res, "witness": None})
    pm = pm_sweep(args.pm_instances, args.pm_max_dim, args.pm_max_points, args.seed)
    bad = [(d, n, r) for d, n, r in pm if not r.consistent]
    metrics["partial_match"] = {"instances": len(pm), "inconsistent": len(bad),
                                "dominated": sum(r.pm_answer for _, _, r in pm)}
    for i, (d, n, r) in enumerate(pm):
        rows.append({"kind": "partial-match", "index": i, "d": d, "points": n, "pm": r.pm_answer,
                     "ann": r.ann_answer, "min_distance": r.min_distance,
                     "status": "pass" if r.consistent else "violation"})
    for i, (d, n, r) in enumerate(pm):
        if not r.consistent:
            violations.append({"check": "partial-match", "params": {"index": i, "d": d},
                               "witness": {"seed": args.seed, "index": i}})
    params = {"generator": args.generator, "a": args.a, "b": args.b, "dim": args.dim, "tol": args.tol,
              "pm_instances": args.pm_instances, "pm_max_dim": args.pm_max_dim,
              "pm_max_points": args.pm_max_points}
    return make_report("embed", params, args.seed, metrics, violations, rows)


# --------------------------------------------------------------------------
# mu


def cmd_mu(args) -> dict:
    if len(args.interval) != 2:
        raise InvalidParameterError("--interval takes two numbers lo,hi")
    names = list(bregman.GENERATORS) if args.generator == "all" else [args.generator]
    rows, violations, metrics = [], [], {}
    for name in names:
        grid = bregman.asymmetry_grid(name, args.interval, args.grid_n)
        hess = bregman.asymmetry_hessian(name, args.interval)
        rel = abs(grid - hess) / hess
        ok = rel <= args.tol
        metrics[name] = {"grid": grid, "hessian": hess, "relative_gap": rel,
                         "grid_le_hessian": grid <= hess + 1e-9}
        rows.append({"generator": name, "lo": args.interval[0], "hi": args.interval[1], "grid": grid,
                     "hessian": hess, "relative_gap": rel, "status": "pass" if ok else "violation"})
        if not ok:
            violations.append({"check": "grid-vs-hessian", "params": {"generator": name,
                                                                      "interval": args.interval},
                               "worst": rel, "witness": {"grid": grid, "hessian": hess}})
    params = {"generator": args.generator, "interval": args.interval, "grid_n": args.grid_n, "tol": args.tol}
    return make_report("mu", params, None, metrics, violations, rows)


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dirhyper", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", default=None, help="output file (default stdout)")
        if seed:
            p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("verify", help="Fourier checks, operator identities, hypercontractivity sweep")
    common(p)
    p.add_argument("--max-dim", type=int, default=10)
    p.add_argument("--fourier-max-dim", type=int, default=None)
    p.add_argument("--ps", type=_floats, default=[0.01, 0.02, 0.05, 0.1, 0.2])
    p.add_argument("--p", dest="ps", type=_floats, help="alias of --ps")
    p.add_argument("--fourier-ps", type=_floats,
                   default=[round(0.05 + 0.1 * i, 2) for i in range(10)])
    p.add_argument("--functions", type=int, default=200, help="random functions per grid cell")
    p.add_argument("--asymptotic-ps", type=_floats,
                   default=[round(0.0005 * i, 6) for i in range(1, 41)])
    p.add_argument("--include-counterexample", action="store_true",
                   help="add the unrestricted exponent-2 case at d=1 (expected to fail)")
    p.add_argument("--counterexample-ps", type=_floats, default=[0.1, 0.5, 0.9])
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gap", help="sample a gap instance and report distance statistics")
    common(p)
    p.add_argument("--dim", "-d", type=int, default=10_000)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--eps", type=float, default=0.01)
    p.add_argument("--mu", type=float, default=10.0)
    p.add_argument("--perturb-mu", type=float, default=None)
    p.add_argument("--concentration-c", type=float, default=1.0)
    p.add_argument("--ratio-low", type=float, default=1.0)
    p.add_argument("--ratio-high", type=float, default=3.0)
    p.add_argument("--max-outside", type=float, default=0.01)
    p.add_argument("--separation-factor", type=float, default=10.0)
    p.add_argument("--min-separated", type=float, default=0.99)
    p.add_argument("--max-z", type=float, default=3.0)
    p.add_argument("--save-instance", default=None)
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("shatter", help="heavy-set and partition shattering checks")
    common(p)
    p.add_argument("--dim", "-d", type=int, default=14)
    p.add_argument("--eps", type=_floats, default=[0.05, 0.1])
    p.add_argument("--mu", type=_floats, default=[10.0, 20.0])
    p.add_argument("--c0", type=float, default=0.01)
    p.add_argument("--c1", type=float, default=0.01)
    p.add_argument("--eps-bound", type=float, default=0.01,
                   help="'sufficiently small' eps; reported, not enforced")
    p.add_argument("--families", type=int, default=200)
    p.add_argument("--kmin", type=int, default=4)
    p.add_argument("--kmax", type=int, default=7)
    p.add_argument("--partition", choices=("bit-sample", "random-balanced", "seeded-hash", "all", "none"),
                   default="all")
    p.add_argument("--k", type=int, default=7)
    p.add_argument("--m", type=int, default=128)
    p.add_argument("--threshold", choices=("sqrt", "linear"), default="sqrt")
    p.add_argument("--load-partition", default=None, help="JSON partition to check as well")
    p.set_defaults(func=cmd_shatter)

    p = sub.add_parser("embed", help="pseudo-Hamming embedding and partial-match reduction")
    common(p)
    p.add_argument("--generator", default="all", choices=(*bregman.GENERATORS, "all"))
    p.add_argument("--a", type=float, default=0.2)
    p.add_argument("--b", type=float, default=0.7)
    p.add_argument("--dim", "-d", type=int, default=8)
    p.add_argument("--trials", type=int, default=10_000, help="random pairs when d exceeds 12")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--pm-instances", type=int, default=10_000)
    p.add_argument("--pm-max-dim", type=int, default=12)
    p.add_argument("--pm-max-points", type=int, default=8)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("mu", help="asymmetry of a generator on an interval: grid vs Hessian ratio")
    common(p, seed=False)
    p.add_argument("--generator", default="itakura-saito", choices=(*bregman.GENERATORS, "all"))
    p.add_argument("--interval", type=_floats, default=[1.0, 4.0])
    p.add_argument("--grid-n", type=int, default=2001)
    p.add_argument("--tol", type=float, default=0.02)
    p.set_defaults(func=cmd_mu)
    return ap


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:  # argparse uses 2 for usage errors already
        return int(exc.code or 0)
    try:
        report = args.func(args)
    except (InvalidParameterError, DomainError) as exc:
        print(f"dirhyper {args.command}: invalid parameters: {exc}", file=sys.stderr)
        err = {"experiment": args.command, "params": {}, "seed": getattr(args, "seed", None),
               "status": "error", "metrics": {"error": str(exc)}, "violations": [], "_rows": []}
        if args.format == "json":
            _emit(render(err, "json"), args.out)
        return EXIT_INVALID
    _emit(render(report, args.format), args.out)
    return EXIT_VIOLATION if report["status"] == "violation" else EXIT_PASS


if __name__ == "__main__":
    raise SystemExit(main())
