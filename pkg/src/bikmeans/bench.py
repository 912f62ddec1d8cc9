"""Experiment harness: generators, the k-means++ baseline and batch reports."""

from __future__ import annotations

import csv
import io as _io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .bounds import BOUNDS_VERSION, alpha_local, alpha_lp_tight
from .core import (ClusteringError, ClusteringSolution, ConfigError, PointSet, assign,
                   cost_partition_kmeans, sq_dists)
from .local import SearchConfig, run_local_search
from .lp import solve_lp, normalize
from .oracle import MAX_KMEANS_POINTS, MAX_KMEDIAN_SUBSETS, brute_kmeans, brute_kmedian
from .reduce import ReductionConfig, build_instance
from .rounding import prepare, resolve_m, round_many

ALGORITHMS = ("lp-round", "local-search", "kmeanspp-baseline")
LOCAL_SLACK = 1.1


@dataclass
class GeneratorSpec:
    kind: str = "gaussian-mixture"  # gaussian-mixture | uniform-cube | file
    n: int = 8
    p: int = 2
    true_k: int = 2
    separation: float = 5.0
    path: str | None = None


@dataclass
class ExperimentSpec:
    generator: GeneratorSpec = field(default_factory=GeneratorSpec)
    k: int = 2
    beta: float | None = 2.0
    m: int | None = None
    p_swap: int = 2
    epsilon: float = 0.3
    trials: int = 100
    seeds: list[int] = field(default_factory=lambda: [0])
    algorithms: list[str] = field(default_factory=lambda: list(ALGORITHMS))
    delta: float = 1e-3
    lp_method: str = "auto"

    def __post_init__(self):
        if isinstance(self.generator, dict):
            self.generator = GeneratorSpec(**self.generator)
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not self.seeds:
            raise ConfigError("need at least one seed")
        bad = set(self.algorithms) - set(ALGORITHMS)
        if bad:
            raise ConfigError(f"unknown algorithms {sorted(bad)}")
        if self.m is not None:
            self.beta = None
        resolve_m(self.k, beta=self.beta, m=self.m)

    @property
    def m_groups(self) -> int:
        return resolve_m(self.k, beta=self.beta, m=self.m)[0]

    @property
    def beta_eff(self) -> float:
        return float(resolve_m(self.k, beta=self.beta, m=self.m)[1])

    @classmethod
    def load(cls, path) -> "ExperimentSpec":
        path = Path(path)
        text = path.read_text()
        if path.suffix == ".toml":
            try:
                import tomllib
            except ModuleNotFoundError:
                import tomli as tomllib
            data = tomllib.loads(text)
        else:
            import json
            data = json.loads(text)
        return cls(**data)


def generate(gen: GeneratorSpec, seed: int) -> PointSet:
    if gen.kind == "file":
        if not gen.path:
            raise ConfigError("file generator needs a path")
        return io.read_points_csv(gen.path)
    if gen.n < 1:
        raise ConfigError("need at least one point")
    rng = np.random.default_rng(seed)
    if gen.kind == "uniform-cube":
        return PointSet(rng.uniform(0.0, 1.0, size=(gen.n, gen.p)))
    if gen.kind == "gaussian-mixture":
        means = rng.normal(size=(gen.true_k, gen.p)) * gen.separation
        labels = np.arange(gen.n) % gen.true_k
        return PointSet(means[labels] + rng.normal(size=(gen.n, gen.p)))
    raise ConfigError(f"unknown generator kind {gen.kind!r}")


def kmeanspp_baseline(X: PointSet, m: int, seed: int = 0) -> ClusteringSolution:
    """D^2 seeding of m centers among the input points, no Lloyd steps."""
    if not 1 <= m <= X.n:
        raise ConfigError(f"m={m} must lie in [1, {X.n}]")
    rng = np.random.default_rng(seed)
    D = sq_dists(X.points, X.points)
    chosen = [int(rng.integers(X.n))]
    closest = D[chosen[0]].copy()
    for _ in range(m - 1):
        tot = closest.sum()
        if tot <= 0:
            rest = [i for i in range(X.n) if i not in chosen]
            c = int(rest[0])
        else:
            c = int(rng.choice(X.n, p=closest / tot))
        chosen.append(c)
        closest = np.minimum(closest, D[c])
    return assign(D, chosen)


REPORT_COLUMNS = ["instance", "seed", "algorithm", "n", "n_centers", "k", "m", "beta",
                  "lp_value", "opt_kmedian", "opt_kmeans", "mean_cost", "kmeans_cost",
                  "ratio", "std", "bound", "bound_name", "bounds_version", "status", "message"]


def _row(**kw) -> dict:
    row = {c: "" for c in REPORT_COLUMNS}
    row["bounds_version"] = BOUNDS_VERSION
    row.update(kw)
    return row


def run_instance(spec: ExperimentSpec, index: int) -> tuple[list[dict], dict]:
    """All requested algorithms on one generated instance; errors become rows."""
    seed = spec.seeds[index]
    k, m, beta = spec.k, spec.m_groups, spec.beta_eff
    base = dict(instance=index, seed=seed, k=k, m=m, beta=beta)
    artifacts: dict = {}
    try:
        X = generate(spec.generator, seed)
        red = build_instance(X, ReductionConfig(epsilon=spec.epsilon, seed=seed))
    except ClusteringError as e:
        return [_row(**base, algorithm="reduce", status="error",
                     message=f"{type(e).__name__}: {e}")], artifacts
    inst = red.instance
    artifacts["instance"] = io.instance_to_dict(inst)
    base.update(n=X.n, n_centers=inst.n_centers)
    opt_med = None
    if math.comb(inst.n_centers, min(k, inst.n_centers)) <= MAX_KMEDIAN_SUBSETS:
        opt_med = brute_kmedian(inst, k).opt_cost
        base["opt_kmedian"] = opt_med
    opt_means = brute_kmeans(X, k).opt_cost if X.n <= MAX_KMEANS_POINTS else None
    if opt_means is not None:
        base["opt_kmeans"] = opt_means
    rows = []

    if "lp-round" in spec.algorithms:
        try:
            raw = solve_lp(inst, k, method=spec.lp_method)
            sol = normalize(raw, inst)
            _, _, part = prepare(sol, beta)
            stats = round_many(sol, inst, beta, spec.trials, seed=seed, partition=part)
            bound = alpha_lp_tight(beta).value
            tol = 3 * stats.std / math.sqrt(spec.trials)
            ok = stats.mean_ratio <= bound + tol
            rows.append(_row(**base, algorithm="lp-round", lp_value=sol.lp_value,
                             mean_cost=float(stats.costs.mean()), ratio=stats.mean_ratio,
                             std=stats.std, bound=bound, bound_name="alpha_lp_tight",
                             status="pass" if ok else "fail"))
            artifacts["lp"] = io.fractional_to_dict(sol, solver=raw.solver)
        except ClusteringError as e:
            rows.append(_row(**base, algorithm="lp-round", status="error",
                             message=f"{type(e).__name__}: {e}"))

    if "local-search" in spec.algorithms:
        try:
            trace = run_local_search(inst, SearchConfig(m=m, p=min(spec.p_swap, m),
                                                        delta=spec.delta))
            cost = trace.final.total_cost
            kcost = cost_partition_kmeans(X, red.pull_back(trace.final.partition()))
            bound = alpha_local(beta, spec.p_swap) * LOCAL_SLACK
            if opt_med is None:
                status, ratio = "unchecked", ""
            else:
                ratio = 0.0 if opt_med <= 0 else cost / opt_med
                status = "pass" if cost <= bound * opt_med + 1e-9 else "fail"
            rows.append(_row(**base, algorithm="local-search", mean_cost=cost,
                             kmeans_cost=kcost, ratio=ratio, bound=bound,
                             bound_name="alpha_local*1.1", status=status))
            artifacts["local"] = {"schema": io.SCHEMA, "opened": list(trace.final.opened),
                                  "cost": cost, "iterations": len(trace.steps),
                                  "converged": trace.converged}
        except ClusteringError as e:
            rows.append(_row(**base, algorithm="local-search", status="error",
                             message=f"{type(e).__name__}: {e}"))

    if "kmeanspp-baseline" in spec.algorithms:
        mm = min(m, X.n)
        costs = [kmeanspp_baseline(X, mm, seed=seed * 100_003 + t).total_cost
                 for t in range(spec.trials)]
        mean = float(np.mean(costs))
        ratio = "" if opt_means is None else (0.0 if opt_means <= 0 else mean / opt_means)
        rows.append(_row(**base, algorithm="kmeanspp-baseline", mean_cost=mean,
                         kmeans_cost=mean, ratio=ratio, status="info"))
    return rows, artifacts


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def report_csv(rows: list[dict]) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in REPORT_COLUMNS])
    return buf.getvalue()


@dataclass
class ExperimentReport:
    rows: list[dict]
    summary: dict

    @property
    def failed(self) -> bool:
        return any(r["status"] in ("fail", "error") for r in self.rows)


def _run_one(args):
    spec, i = args
    return run_instance(spec, i)


def run_experiment(spec: ExperimentSpec, out: str | Path | None = None, jobs: int = 1) -> ExperimentReport:
    idx = list(range(len(spec.seeds)))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_run_one, [(spec, i) for i in idx]))
    else:
        results = [run_instance(spec, i) for i in idx]
    rows = [r for rs, _ in results for r in rs]
    by_status: dict[str, int] = {}
    for r in rows:
        by_status[r["status"]] = by_status.get(r["status"], 0) + 1
    summary = {"schema": io.SCHEMA, "spec": asdict(spec), "instances": len(idx),
               "rows": len(rows), "status_counts": by_status,
               "bounds_version": BOUNDS_VERSION,
               "passed": not any(r["status"] in ("fail", "error") for r in rows)}
    for alg in ALGORITHMS:
        vals = [r["ratio"] for r in rows if r["algorithm"] == alg and isinstance(r["ratio"], float)]
        if vals:
            summary[f"{alg}_mean_ratio"] = float(np.mean(vals))
            summary[f"{alg}_max_ratio"] = float(np.max(vals))
    rep = ExperimentReport(rows, summary)
    if out is not None:
        out = Path(out)
        (out / "instances").mkdir(parents=True, exist_ok=True)
        (out / "solutions").mkdir(parents=True, exist_ok=True)
        for i, (_, art) in zip(idx, results):
            if "instance" in art:
                io.write_json(out / "instances" / f"instance_{i:03d}.json", art["instance"])
            if "lp" in art:
                io.write_json(out / "solutions" / f"lp_{i:03d}.json", art["lp"])
            if "local" in art:
                io.write_json(out / "solutions" / f"local_{i:03d}.json", art["local"])
        (out / "report.csv").write_text(report_csv(rows))
        io.write_json(out / "summary.json", summary)
    return rep
