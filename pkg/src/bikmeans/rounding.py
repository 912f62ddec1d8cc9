"""Randomized rounding of the normalized LP that opens beta*k centers.

Each demand x gets a ball B_x: its nearest copies of total LP weight 1/beta.
Demands are scanned by increasing LP radius; a ball disjoint from every
ball chosen so far is chosen, otherwise the demand's witness is the earliest
chosen ball it meets. The chosen balls plus a greedy split of the leftover
weight form m = beta*k groups of weight 1/beta, and one copy is drawn from
each group with probability beta * weight.

A ball claims a prefix of a boundary copy's weight. So two balls intersect
exactly when they both claim positive weight from a common copy.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import (ClusteringSolution, ConfigError, InvariantError, KMedianInstance,
                   NumericError, assign)
from .lp import FractionalSolution, lp_radii

_ZERO_MASS = 1e-14


def resolve_m(k: int, beta=None, m: int | None = None) -> tuple[int, Fraction]:
    """Number of groups m and beta = m / k; beta * k must be an integer."""
    if (beta is None) == (m is None):
        raise ConfigError("give exactly one of beta and m")
    if m is None:
        mk = float(beta) * k
        m = int(round(mk))
        if abs(mk - m) > 1e-9:
            raise ConfigError(f"beta*k = {mk} is not an integer; pass m directly")
    m = int(m)
    if m <= k:
        raise ConfigError(f"need m > k for beta > 1 (got m={m}, k={k})")
    return m, Fraction(m, k)


@dataclass(frozen=True)
class Ball:
    owner: int
    pieces: tuple[tuple[int, float], ...]  # (copy id, claimed weight), nearest first
    radius: float

    @property
    def mass(self) -> float:
        return sum(w for _, w in self.pieces)


@dataclass(frozen=True)
class WitnessMap:
    witness: tuple[int, ...]
    selected: tuple[int, ...]  # in processing order
    order: tuple[int, ...]


@dataclass(frozen=True)
class GroupPartition:
    groups: tuple[tuple[tuple[int, float], ...], ...]
    kinds: tuple[str, ...]  # "ball" | "residual"
    copy_center: np.ndarray
    beta: Fraction

    @property
    def m(self) -> int:
        return len(self.groups)

    def masses(self) -> np.ndarray:
        return np.array([sum(w for _, w in g) for g in self.groups])


def build_balls(sol: FractionalSolution, beta) -> list[Ball]:
    target = 1.0 / float(beta)
    balls = []
    ids = np.arange(sol.n_copies)
    for x in range(sol.dist.shape[0]):
        order = np.lexsort((ids, sol.dist[x]))
        pieces = []
        acc = 0.0
        for j in order:
            need = target - acc
            if need <= _ZERO_MASS:
                break
            take = min(float(sol.weight[j]), need)
            pieces.append((int(j), take))
            acc += take
        radius = float(sol.dist[x, pieces[-1][0]])
        balls.append(Ball(owner=x, pieces=tuple(pieces), radius=radius))
    return balls


def build_balls_and_witnesses(sol: FractionalSolution, beta) -> tuple[list[Ball], WitnessMap]:
    if Fraction(beta).limit_denominator(10**9) * sol.k % 1 != 0:
        raise ConfigError(f"beta*k must be an integer (beta={beta}, k={sol.k})")
    if float(beta) <= 1.0:
        raise ConfigError("beta must exceed 1")
    balls = build_balls(sol, beta)
    R, _ = lp_radii(sol)
    nd = len(balls)
    order = [int(i) for i in np.lexsort((np.arange(nd), R))]
    rank = {x: r for r, x in enumerate(order)}
    owner_of: dict[int, int] = {}
    witness = [-1] * nd
    selected = []
    for x in order:
        hits = {owner_of[j] for j, w in balls[x].pieces if w > _ZERO_MASS and j in owner_of}
        if hits:
            witness[x] = min(hits, key=rank.__getitem__)
        else:
            witness[x] = x
            selected.append(x)
            for j, w in balls[x].pieces:
                if w > _ZERO_MASS:
                    owner_of[j] = x
    return balls, WitnessMap(tuple(witness), tuple(selected), tuple(order))


@dataclass(frozen=True)
class MarkovReport:
    min_slack: float
    max_slack: float
    worst_demand: int


def markov_radius_check(sol: FractionalSolution, balls: list[Ball], beta,
                        atol: float = 1e-9) -> MarkovReport:
    """Check R_x^beta <= beta * R_x / (beta - 1) for every demand."""
    b = float(beta)
    if b <= 1:
        raise ConfigError("beta must exceed 1")
    R, _ = lp_radii(sol)
    slack = np.array([b * R[x] / (b - 1) - balls[x].radius for x in range(len(balls))])
    worst = int(np.argmin(slack))
    if slack[worst] < -atol:
        raise InvariantError(
            f"ball radius {balls[worst].radius:.6g} of demand {worst} exceeds "
            f"beta*R/(beta-1) = {b * R[worst] / (b - 1):.6g}")
    return MarkovReport(float(slack.min()), float(slack.max()), worst)


def build_partition(sol: FractionalSolution, balls: list[Ball], wmap: WitnessMap,
                    beta) -> GroupPartition:
    beta = Fraction(beta).limit_denominator(10**9)
    target = float(1 / beta)
    m = int(beta * sol.k)
    groups = [balls[x].pieces for x in wmap.selected]
    kinds = ["ball"] * len(groups)
    if len(groups) > m:
        raise NumericError(f"{len(groups)} disjoint balls exceed m={m}")
    claimed = np.zeros(sol.n_copies)
    for x in wmap.selected:
        for j, w in balls[x].pieces:
            claimed[j] += w
    left = np.maximum(sol.weight - claimed, 0.0)
    n_res = m - len(groups)
    cur: list[tuple[int, float]] = []
    acc = 0.0
    for j in range(sol.n_copies):
        rem = float(left[j])
        while rem > _ZERO_MASS:
            last = len(groups) == m - 1
            take = rem if last else min(rem, target - acc)
            cur.append((j, take))
            acc += take
            rem -= take
            if not last and target - acc <= 1e-12:
                groups.append(tuple(cur))
                kinds.append("residual")
                cur, acc = [], 0.0
    if cur:
        groups.append(tuple(cur))
        kinds.append("residual")
    if n_res == 0 and len(groups) != m:
        raise NumericError("leftover weight after all balls were chosen")
    if len(groups) != m:
        raise NumericError(f"built {len(groups)} groups, expected {m}")
    part = GroupPartition(tuple(groups), tuple(kinds), sol.copy_center, beta)
    err = float(np.abs(part.masses() - target).max())
    if err > 1e-7:
        raise NumericError(f"group mass off by {err:.3g}")
    return part


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(seed))


def draw_copies(partition: GroupPartition, seed) -> list[int]:
    """One copy per group, copy j drawn with probability beta * share_j."""
    rng = _rng(seed)
    b = float(partition.beta)
    out = []
    for g in partition.groups:
        ids = [j for j, _ in g]
        p = np.array([b * w for _, w in g])
        p /= p.sum()
        out.append(ids[int(rng.choice(len(ids), p=p))])
    return out


def sample_solution(partition: GroupPartition, inst: KMedianInstance, seed) -> ClusteringSolution:
    picks = draw_copies(partition, seed)
    return assign(inst.dist, [int(partition.copy_center[j]) for j in picks])


@dataclass(frozen=True)
class RoundingReport:
    solution: ClusteringSolution
    lp_value: float
    ratio: float
    radii: tuple[float, ...]
    ball_radii: tuple[float, ...]
    witness: tuple[int, ...]


def prepare(sol: FractionalSolution, beta) -> tuple[list[Ball], WitnessMap, GroupPartition]:
    balls, wmap = build_balls_and_witnesses(sol, beta)
    markov_radius_check(sol, balls, beta)
    return balls, wmap, build_partition(sol, balls, wmap, beta)


def round_once(sol: FractionalSolution, inst: KMedianInstance, beta, seed=0) -> RoundingReport:
    balls, wmap, part = prepare(sol, beta)
    s = sample_solution(part, inst, seed)
    R, lpv = lp_radii(sol)
    return RoundingReport(s, lpv, _ratio(s.total_cost, lpv), tuple(map(float, R)),
                          tuple(b.radius for b in balls), wmap.witness)


def _ratio(cost: float, lpv: float) -> float:
    return 0.0 if lpv <= 0 else cost / lpv


@dataclass(frozen=True)
class RoundingStats:
    lp_value: float
    costs: np.ndarray
    ratios: np.ndarray
    n_opened: np.ndarray
    m: int

    @property
    def mean_ratio(self) -> float:
        return float(self.ratios.mean())

    @property
    def std(self) -> float:
        return float(self.ratios.std(ddof=1)) if self.ratios.size > 1 else 0.0

    @property
    def min(self) -> float:
        return float(self.ratios.min())

    @property
    def max(self) -> float:
        return float(self.ratios.max())

    def summary(self) -> dict:
        return {"lp_value": self.lp_value, "trials": int(self.costs.size), "m": self.m,
                "mean_cost": float(self.costs.mean()), "mean_ratio": self.mean_ratio,
                "std": self.std, "min": self.min, "max": self.max,
                "max_opened": int(self.n_opened.max())}


def round_many(sol: FractionalSolution, inst: KMedianInstance, beta, trials: int,
               seed: int = 0, partition: GroupPartition | None = None) -> RoundingStats:
    """Repeat the sampling step; trial i uses the i-th spawned Philox substream."""
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    if partition is None:
        partition = prepare(sol, beta)[2]
    _, lpv = lp_radii(sol)
    streams = np.random.SeedSequence(seed).spawn(trials)
    costs, opened = [], []
    for ss in streams:
        s = sample_solution(partition, inst, np.random.Generator(np.random.Philox(ss)))
        costs.append(s.total_cost)
        opened.append(len(s.opened))
    costs = np.array(costs)
    ratios = np.zeros_like(costs) if lpv <= 0 else costs / lpv
    return RoundingStats(lpv, costs, ratios, np.array(opened), partition.m)
