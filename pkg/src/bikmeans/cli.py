"""Command-line entry point: bikmeans <subcommand> ..."""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import io
from .bench import ExperimentSpec, GeneratorSpec, generate, run_experiment
from .bounds import alpha_local, alpha_lp_closed, alpha_lp_tight, alpha_pipage, bounds_table
from .core import ClusteringError
from .local import SearchConfig, run_local_search
from .lp import normalize, solve_lp
from .oracle import brute_kmeans, brute_kmedian, verify_centroid_set
from .reduce import ReductionConfig, build_instance
from .rounding import prepare, resolve_m, round_many


def _out(text: str, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_gen(a):
    X = generate(GeneratorSpec(kind=a.kind, n=a.n, p=a.p, true_k=a.true_k,
                               separation=a.separation), a.seed)
    if a.out:
        io.write_points_csv(a.out, X)
    else:
        for row in X.points:
            print(",".join(repr(float(v)) for v in row))


def cmd_reduce(a):
    X = io.read_points_csv(a.points)
    cfg = ReductionConfig(epsilon=a.epsilon, seed=a.seed, target_dim_cap=a.target_dim_cap,
                          grid_scale_base=a.grid_base, centroid_method=a.centroid_method,
                          centroid_cap=a.centroid_cap)
    red = build_instance(X, cfg)
    _out(io.dumps(io.instance_to_dict(red.instance)), a.out)
    if a.report:
        io.write_json(a.report, {"schema": io.SCHEMA, **red.report()})


def cmd_lp(a):
    inst = io.instance_from_dict(io.read_json(a.instance))
    raw = solve_lp(inst, a.k, tol=a.tol, method=a.method)
    sol = normalize(raw, inst)
    _out(io.dumps(io.fractional_to_dict(sol, solver=raw.solver)), a.out)


def cmd_round(a):
    inst = io.instance_from_dict(io.read_json(a.instance))
    sol = io.fractional_from_dict(io.read_json(a.solution), inst)
    m, beta = resolve_m(sol.k, beta=a.beta, m=a.m)
    balls, wmap, part = prepare(sol, beta)
    stats = round_many(sol, inst, beta, a.trials, seed=a.seed, partition=part)
    rep = {"schema": io.SCHEMA, "beta": float(beta), "k": sol.k, "seed": a.seed,
           **stats.summary(),
           "selected_balls": list(wmap.selected),
           "diagnostics": [{"x": x, "R": float(r), "R_beta": balls[x].radius,
                            "witness": wmap.witness[x]}
                           for x, r in enumerate(sol.radii)]}
    _out(io.dumps(rep), a.out)
    if a.trials_csv:
        with open(a.trials_csv, "w") as fh:
            fh.write("trial,cost,ratio\n")
            for t, (c, r) in enumerate(zip(stats.costs, stats.ratios)):
                fh.write(f"{t},{float(c)!r},{float(r)!r}\n")


def cmd_localsearch(a):
    inst = io.instance_from_dict(io.read_json(a.instance))
    trace = run_local_search(inst, SearchConfig(m=a.m, p=a.p, delta=a.delta, init=a.init,
                                                seed=a.seed, max_iters=a.max_iters))
    fin = trace.final
    doc = {"schema": io.SCHEMA, "converged": trace.converged, "threshold": trace.threshold,
           "initial": list(trace.initial), "initial_cost": trace.initial_cost,
           "steps": [{"closed": list(s.closed), "opened": list(s.opened),
                      "old_cost": s.old_cost, "new_cost": s.new_cost} for s in trace.steps]}
    _out(io.dumps(doc), a.out)
    if a.solution:
        io.write_json(a.solution, {"schema": io.SCHEMA, "opened": list(fin.opened),
                                   "assignment": list(fin.assignment),
                                   "per_point_cost": list(fin.per_point_cost),
                                   "total_cost": fin.total_cost})


def cmd_bounds(a):
    if a.beta is not None:
        b = a.beta
        t = alpha_lp_tight(b)
        lines = [f"beta {b!r}",
                 f"alpha_lp_closed {alpha_lp_closed(b, as_printed=a.as_printed)!r}",
                 f"alpha_lp_tight {t.value!r}",
                 f"argmax_gamma {t.argmax_gamma!r}"]
        for p in (1, 2, 3):
            lines.append(f"alpha_local_p{p} {alpha_local(b, p)!r}")
        lines.append(f"alpha_local_pinf {alpha_local(b, math.inf)!r}")
        lines.append(f"alpha_pipage {alpha_pipage(b)!r}")
        _out("\n".join(lines) + "\n", a.out)
        return
    rows = bounds_table(a.beta_min, a.beta_max, a.step, as_printed=a.as_printed)
    cols = list(rows[0]) if rows else ["beta"]
    text = ",".join(cols) + "\n" + "".join(
        ",".join(repr(float(r[c])) for c in cols) + "\n" for r in rows)
    _out(text, a.out)


def cmd_oracle(a):
    if a.what == "kmeans":
        res = brute_kmeans(io.read_points_csv(a.input), a.k)
        doc = {"opt_cost": res.opt_cost, "partition": res.partition}
    elif a.what == "kmedian":
        res = brute_kmedian(io.instance_from_dict(io.read_json(a.input)), a.k)
        doc = {"opt_cost": res.opt_cost, "centers": res.centers}
    else:
        X = io.read_points_csv(a.input)
        C = io.read_points_csv(a.candidates)
        res = verify_centroid_set(X, C, a.eps)
        doc = {"ok": res.ok, "worst_subset": res.worst_subset, "worst_ratio": res.worst_ratio}
    _out(io.dumps({"schema": io.SCHEMA, **doc}), a.out)


def cmd_bench(a):
    spec = ExperimentSpec.load(a.spec)
    rep = run_experiment(spec, out=a.out, jobs=a.jobs)
    sys.stdout.write(io.dumps(rep.summary))
    return 1 if rep.failed else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bikmeans", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", metavar="{gen,reduce,lp,round,localsearch,bounds,oracle,bench}")

    g = sub.add_parser("gen", help="generate a point cloud CSV")
    g.add_argument("--kind", choices=["gaussian-mixture", "uniform-cube"], default="gaussian-mixture")
    g.add_argument("--n", type=int, default=8)
    g.add_argument("--p", type=int, default=2)
    g.add_argument("--true-k", type=int, default=2)
    g.add_argument("--separation", type=float, default=5.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", help="output CSV (default stdout)")
    g.set_defaults(fn=cmd_gen)

    r = sub.add_parser("reduce", help="k-means points CSV -> k-median instance JSON")
    r.add_argument("points")
    r.add_argument("--epsilon", type=float, default=0.3)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--target-dim-cap", type=int)
    r.add_argument("--grid-base", type=float, default=2.0)
    r.add_argument("--centroid-method", choices=["auto", "grid", "subsets"], default="auto")
    r.add_argument("--centroid-cap", type=int, default=200_000)
    r.add_argument("--out", help="instance JSON (default stdout)")
    r.add_argument("--report", help="reduction report JSON")
    r.set_defaults(fn=cmd_reduce)

    lp = sub.add_parser("lp", help="solve and normalize the LP relaxation")
    lp.add_argument("instance")
    lp.add_argument("--k", type=int, required=True)
    lp.add_argument("--tol", type=float, default=1e-7)
    lp.add_argument("--method", choices=["auto", "simplex", "highs"], default="auto")
    lp.add_argument("--out")
    lp.set_defaults(fn=cmd_lp)

    rd = sub.add_parser("round", help="randomized rounding trials of an LP solution")
    rd.add_argument("--instance", required=True)
    rd.add_argument("--solution", required=True)
    grp = rd.add_mutually_exclusive_group(required=True)
    grp.add_argument("--beta", type=float)
    grp.add_argument("--m", type=int, help="number of groups; beta = m/k")
    rd.add_argument("--trials", type=int, default=100)
    rd.add_argument("--seed", type=int, default=0)
    rd.add_argument("--out")
    rd.add_argument("--trials-csv")
    rd.set_defaults(fn=cmd_round)

    ls = sub.add_parser("localsearch", help="p-swap local search with m open centers")
    ls.add_argument("instance")
    ls.add_argument("--m", type=int, required=True)
    ls.add_argument("--p", type=int, default=1)
    ls.add_argument("--delta", type=float, default=1e-3)
    ls.add_argument("--init", choices=["greedy", "random"], default="greedy")
    ls.add_argument("--seed", type=int, default=0)
    ls.add_argument("--max-iters", type=int, default=10_000)
    ls.add_argument("--out", help="trace JSON (default stdout)")
    ls.add_argument("--solution", help="final solution JSON")
    ls.set_defaults(fn=cmd_localsearch)

    b = sub.add_parser("bounds", help="evaluate the approximation-ratio formulas")
    b.add_argument("--beta", type=float, help="single beta; otherwise a CSV over a range")
    b.add_argument("--beta-min", type=float, default=1.05)
    b.add_argument("--beta-max", type=float, default=4.0)
    b.add_argument("--step", type=float, default=0.05)
    b.add_argument("--as-printed", action="store_true",
                   help="closed form with 6b/(1-b) instead of 6b/(b-1)")
    b.add_argument("--out")
    b.set_defaults(fn=cmd_bounds)

    o = sub.add_parser("oracle", help="brute-force ground truth on tiny inputs")
    o.add_argument("what", choices=["kmeans", "kmedian", "centroid"])
    o.add_argument("input", help="points CSV (kmeans, centroid) or instance JSON (kmedian)")
    o.add_argument("--k", type=int, default=1)
    o.add_argument("--candidates", help="candidate centers CSV (centroid)")
    o.add_argument("--eps", type=float, default=0.1)
    o.add_argument("--out")
    o.set_defaults(fn=cmd_oracle)

    be = sub.add_parser("bench", help="run an experiment spec (JSON or TOML)")
    be.add_argument("spec")
    be.add_argument("--out", help="directory for instances/, solutions/, report.csv, summary.json")
    be.add_argument("--jobs", type=int, default=1)
    be.set_defaults(fn=cmd_bench)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    a = ap.parse_args(argv)
    if a.cmd is None:
        ap.print_usage(sys.stderr)
        return 2
    try:
        rc = a.fn(a)
    except ClusteringError as e:
        sys.stderr.write(json.dumps({"error": type(e).__name__, "message": str(e)}) + "\n")
        return 1
    except OSError as e:
        sys.stderr.write(json.dumps({"error": type(e).__name__, "message": str(e)}) + "\n")
        return 1
    return rc or 0


if __name__ == "__main__":
    sys.exit(main())
