"""Multi-swap local search for k-median with m open centers."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .core import ClusteringSolution, ConfigError, KMedianInstance, assign


@dataclass(frozen=True)
class SearchConfig:
    m: int
    p: int = 1
    delta: float = 1e-3
    max_iters: int = 10_000
    init: str = "greedy"  # or "random"
    seed: int = 0

    def validate(self, inst: KMedianInstance):
        if not 1 <= self.m <= inst.n_centers:
            raise ConfigError(f"m={self.m} must lie in [1, {inst.n_centers}]")
        if not 1 <= self.p <= self.m:
            raise ConfigError(f"swap size p={self.p} must lie in [1, m={self.m}]")
        if not 0 < self.delta < 1:
            raise ConfigError("delta must lie in (0, 1)")
        if self.init not in ("greedy", "random"):
            raise ConfigError(f"unknown init {self.init!r}")


@dataclass(frozen=True)
class Step:
    closed: tuple[int, ...]
    opened: tuple[int, ...]
    old_cost: float
    new_cost: float


@dataclass
class SearchTrace:
    steps: list[Step] = field(default_factory=list)
    initial: tuple[int, ...] = ()
    initial_cost: float = 0.0
    final: ClusteringSolution | None = None
    converged: bool = False
    threshold: float = 1.0  # accepted swaps satisfy new <= threshold * old


def initial_solution(inst: KMedianInstance, m: int, init: str = "greedy", seed: int = 0) -> tuple[int, ...]:
    nc = inst.n_centers
    if m > nc:
        raise ConfigError(f"m={m} exceeds the {nc} candidate centers")
    if init == "random":
        rng = np.random.default_rng(seed)
        return tuple(sorted(int(c) for c in rng.choice(nc, size=m, replace=False)))
    d = inst.dist
    chosen: list[int] = []
    best = np.full(inst.n_demands, np.inf)
    for _ in range(m):
        cand = np.minimum(best[None, :], d).sum(axis=1)
        cand[chosen] = np.inf
        c = int(np.argmin(cand))
        chosen.append(c)
        best = np.minimum(best, d[c])
    return tuple(sorted(chosen))


def _two_nearest(d: np.ndarray, A: list[int]):
    sub = d[A]
    if len(A) == 1:
        return sub[0], np.zeros(d.shape[1], dtype=int), np.full(d.shape[1], np.inf)
    idx = np.argsort(sub, axis=0, kind="stable")
    cols = np.arange(d.shape[1])
    return sub[idx[0], cols], idx[0], sub[idx[1], cols]


def best_swap(inst: KMedianInstance, A, p: int, factor: float = 1.0):
    """Cheapest swap closing q <= p centers of A and opening q others.

    Returns ``(closed, opened, new_cost)`` for the cheapest swap whose cost is
    strictly below the current cost and at most ``factor`` times it, else None.
    Candidates are scanned in lexicographic order (q, closed, opened); the
    first strict minimum wins.
    """
    d = inst.dist
    A = sorted(int(a) for a in A)
    cur = float(d[A].min(axis=0).sum())
    outside = [c for c in range(inst.n_centers) if c not in set(A)]
    best = None
    best_cost = math.inf
    # single swaps through nearest / second nearest open center
    if p >= 1 and outside:
        d1, arg1, d2 = _two_nearest(d, A)
        for ai, a in enumerate(A):
            keep = np.where(arg1 == ai, d2, d1)
            costs = np.minimum(keep[None, :], d[outside]).sum(axis=1)
            o = int(np.argmin(costs))
            if costs[o] < best_cost:
                best_cost = float(costs[o])
                best = ((a,), (outside[o],))
    for q in range(2, min(p, len(A), len(outside)) + 1):
        for closed in itertools.combinations(A, q):
            rest = [a for a in A if a not in closed]
            base = d[rest].min(axis=0) if rest else np.full(inst.n_demands, np.inf)
            for opened in itertools.combinations(outside, q):
                c = float(np.minimum(base, d[list(opened)].min(axis=0)).sum())
                if c < best_cost:
                    best_cost = c
                    best = (closed, opened)
    if best is None or not (best_cost < cur and best_cost <= factor * cur):
        return None
    return best[0], best[1], best_cost


def run_local_search(inst: KMedianInstance, cfg: SearchConfig) -> SearchTrace:
    """Apply best swaps while one improves the cost by a factor 1 - delta/N, N = |D| + |C|."""
    cfg.validate(inst)
    factor = 1.0 - cfg.delta / (inst.n_demands + inst.n_centers)
    A = initial_solution(inst, cfg.m, cfg.init, cfg.seed)
    trace = SearchTrace(initial=A, initial_cost=assign(inst.dist, A).total_cost, threshold=factor)
    cost = trace.initial_cost
    for _ in range(cfg.max_iters):
        mv = best_swap(inst, A, cfg.p, factor)
        if mv is None:
            trace.converged = True
            break
        closed, opened, new = mv
        trace.steps.append(Step(tuple(closed), tuple(opened), cost, new))
        A = tuple(sorted((set(A) - set(closed)) | set(opened)))
        cost = new
    else:
        trace.converged = best_swap(inst, A, cfg.p, factor) is None
    trace.final = assign(inst.dist, A)
    return trace
