"""Brute-force ground truth for tiny instances.

Nothing here calls into the LP, rounding, local-search or reduction code;
these routines are the independent side of every cross-check.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import KMedianInstance, Partition, PointSet, SizeGuardError

MAX_KMEANS_POINTS = 12
MAX_KMEDIAN_SUBSETS = 10**6
MAX_CENTROID_POINTS = 10


def restricted_growth_strings(n: int, k: int):
    """All labelings a[0..n-1] with a[0]=0 and a[i] <= 1 + max(a[:i]) < k."""
    a = [0] * n

    def rec(i, mx):
        if i == n:
            yield tuple(a)
            return
        for v in range(min(mx + 2, k)):
            a[i] = v
            yield from rec(i + 1, max(mx, v))

    if n:
        yield from rec(1, 0)


@dataclass(frozen=True)
class KMeansOpt:
    opt_cost: float
    partition: Partition


def brute_kmeans(X: PointSet, k: int) -> KMeansOpt:
    """Optimal k-means cost over all partitions into at most k clusters."""
    n = X.n
    if n > MAX_KMEANS_POINTS:
        raise SizeGuardError(f"brute_kmeans is limited to {MAX_KMEANS_POINTS} points, got {n}")
    pts = X.points
    G = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
    # cost of every subset, by bitmask, via the pairwise formula
    sub_cost = np.zeros(1 << n)
    for mask in range(1, 1 << n):
        idx = [i for i in range(n) if mask >> i & 1]
        sub_cost[mask] = G[np.ix_(idx, idx)].sum() / (2 * len(idx))
    best, best_lab = math.inf, None
    for lab in restricted_growth_strings(n, k):
        masks = [0] * (max(lab) + 1)
        for i, c in enumerate(lab):
            masks[c] |= 1 << i
        cost = float(sum(sub_cost[mk] for mk in masks))
        if cost < best:
            best, best_lab = cost, lab
    parts = {}
    for i, c in enumerate(best_lab):
        parts.setdefault(c, []).append(i)
    return KMeansOpt(best, tuple(tuple(v) for v in parts.values()))


@dataclass(frozen=True)
class KMedianOpt:
    opt_cost: float
    centers: tuple[int, ...]


def brute_kmedian(inst: KMedianInstance, k: int) -> KMedianOpt:
    """Optimal cost over all k-subsets of candidate centers."""
    nc = inst.n_centers
    k = min(k, nc)
    if math.comb(nc, k) > MAX_KMEDIAN_SUBSETS:
        raise SizeGuardError(f"C({nc},{k}) subsets exceed the {MAX_KMEDIAN_SUBSETS} guard")
    d = inst.dist
    best, best_set = math.inf, None
    combos = itertools.combinations(range(nc), k)
    while True:
        chunk = list(itertools.islice(combos, 4096))
        if not chunk:
            break
        idx = np.array(chunk)
        costs = d[idx].min(axis=1).sum(axis=1)
        j = int(np.argmin(costs))
        if costs[j] < best:
            best, best_set = float(costs[j]), tuple(int(c) for c in chunk[j])
    return KMedianOpt(best, best_set)


@dataclass(frozen=True)
class CentroidSetCheck:
    ok: bool
    worst_subset: tuple[int, ...]
    worst_ratio: float


def verify_centroid_set(Xp: PointSet, cset: PointSet, eps: float) -> CentroidSetCheck:
    """Check min_c sum_S |x-c|^2 <= (1+eps) * optimum for every nonempty subset S."""
    n = Xp.n
    if n > MAX_CENTROID_POINTS:
        raise SizeGuardError(f"verify_centroid_set is limited to {MAX_CENTROID_POINTS} points")
    pts, cand = Xp.points, cset.points
    G = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
    masks = np.array([[m >> i & 1 for i in range(n)] for m in range(1, 1 << n)], dtype=float)
    best = np.full(len(masks), np.inf)
    for lo in range(0, len(cand), 8192):
        P = ((pts[:, None, :] - cand[None, lo:lo + 8192, :]) ** 2).sum(axis=2)  # (n, chunk)
        best = np.minimum(best, (masks @ P).min(axis=1))
    sizes = masks.sum(axis=1)
    exact = np.einsum("si,ij,sj->s", masks, G, masks) / (2 * sizes)
    scale = 1e-12 * (1 + (masks @ (pts ** 2).sum(axis=1)))
    ratio = np.where(exact > scale, best / np.maximum(exact, scale),
                     np.where(best <= scale, 1.0, np.inf))
    w = int(np.argmax(ratio))
    worst_subset = tuple(int(i) for i in np.flatnonzero(masks[w]))
    return CentroidSetCheck(bool(ratio.max() <= 1 + eps + 1e-12), worst_subset, float(ratio[w]))
