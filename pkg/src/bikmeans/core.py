"""Point sets, k-median instances, clustering costs and the relaxed 3-hop check."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class ClusteringError(ValueError):
    """Base class for domain errors raised by this package."""


class InvalidPartitionError(ClusteringError):
    pass


class DimensionMismatchError(ClusteringError):
    pass


class ConfigError(ClusteringError):
    pass


class SizeGuardError(ClusteringError):
    pass


class InvariantError(ClusteringError):
    pass


class NumericError(ClusteringError):
    pass


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PointSet:
    """n points in R^p stored as a read-only (n, p) float array; ids are row indices."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[1] < 1:
            raise DimensionMismatchError(f"points must be an (n, p) array, got shape {pts.shape}")
        if pts.shape[0] < 1:
            raise ClusteringError("a point set needs at least one point")
        if not np.all(np.isfinite(pts)):
            raise ClusteringError("points must be finite")
        object.__setattr__(self, "points", _frozen(pts))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def ids(self) -> range:
        return range(self.n)

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i):
        return self.points[i]


def sq_dists(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances between rows of a and rows of b, shape (len(a), len(b))."""
    diff = a[:, None, :] - b[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


@dataclass(frozen=True, eq=False)
class KMedianInstance:
    """Discrete k-median instance <D, C, d>.

    ``dist[c, x]`` is the cost of serving demand ``x`` from center ``c``. When
    ``dist`` is omitted it is the squared Euclidean distance table.
    ``back_map[x]`` is the index of the original k-means point behind demand ``x``.
    """

    demands: PointSet
    centers: PointSet
    dist: np.ndarray | None = None
    back_map: tuple[int, ...] | None = None
    metric: str = field(default="sqeuclidean")

    def __post_init__(self):
        if self.dist is None:
            if self.demands.dim != self.centers.dim:
                raise DimensionMismatchError(
                    f"demands in R^{self.demands.dim} but centers in R^{self.centers.dim}")
            d = sq_dists(self.centers.points, self.demands.points)
            object.__setattr__(self, "metric", "sqeuclidean")
        else:
            d = np.asarray(self.dist, dtype=float)
            if d.shape != (self.centers.n, self.demands.n):
                raise DimensionMismatchError(
                    f"dist table has shape {d.shape}, expected {(self.centers.n, self.demands.n)}")
            if np.any(d < 0) or not np.all(np.isfinite(d)):
                raise ClusteringError("distances must be finite and nonnegative")
        object.__setattr__(self, "dist", _frozen(d))
        if self.back_map is not None:
            bm = tuple(int(i) for i in self.back_map)
            if len(bm) != self.demands.n or len(set(bm)) != len(bm):
                raise ClusteringError("back_map must be a bijection over demand indices")
            object.__setattr__(self, "back_map", bm)

    @property
    def n_demands(self) -> int:
        return self.demands.n

    @property
    def n_centers(self) -> int:
        return self.centers.n


Partition = tuple[tuple[int, ...], ...]


def make_partition(clusters: Sequence[Sequence[int]], n: int) -> Partition:
    """Validate and canonicalize a partition of range(n)."""
    out = []
    seen: set[int] = set()
    for cl in clusters:
        cl = tuple(int(i) for i in cl)
        if not cl:
            raise InvalidPartitionError("empty cluster")
        for i in cl:
            if i < 0 or i >= n:
                raise InvalidPartitionError(f"index {i} out of range for {n} points")
            if i in seen:
                raise InvalidPartitionError(f"index {i} appears in two clusters")
            seen.add(i)
        out.append(cl)
    if len(seen) != n:
        missing = sorted(set(range(n)) - seen)
        raise InvalidPartitionError(f"partition misses indices {missing[:10]}")
    return tuple(out)


def labels_to_partition(labels: Sequence[int]) -> Partition:
    """Group indices by label, clusters ordered by first occurrence."""
    groups: dict[int, list[int]] = {}
    for i, lab in enumerate(labels):
        groups.setdefault(int(lab), []).append(i)
    return tuple(tuple(g) for g in groups.values())


@dataclass(frozen=True)
class ClusteringSolution:
    opened: tuple[int, ...]
    assignment: tuple[int, ...]
    per_point_cost: tuple[float, ...]
    total_cost: float

    def partition(self) -> Partition:
        return labels_to_partition(self.assignment)


def assign(dist: np.ndarray, opened: Sequence[int]) -> ClusteringSolution:
    """Nearest-open-center assignment; ties go to the smallest center index."""
    opened = tuple(sorted(set(int(c) for c in opened)))
    if not opened:
        raise ClusteringError("at least one center must be open")
    sub = dist[list(opened), :]
    # argmin returns the first minimum, and rows are sorted by center index
    best = np.argmin(sub, axis=0)
    costs = sub[best, np.arange(sub.shape[1])]
    return ClusteringSolution(
        opened=opened,
        assignment=tuple(opened[b] for b in best),
        per_point_cost=tuple(float(c) for c in costs),
        total_cost=float(np.sum(costs)),
    )


def solution_cost(dist: np.ndarray, opened: Sequence[int]) -> float:
    return float(np.min(dist[list(opened), :], axis=0).sum())


# ---------------------------------------------------------------- k-means costs

def cluster_cost_pairwise(pts: np.ndarray) -> float:
    """(1 / 2|S|) * sum over ordered pairs of squared distances."""
    m = len(pts)
    if m == 0:
        raise InvalidPartitionError("empty cluster")
    return float(sq_dists(pts, pts).sum() / (2.0 * m))


def cluster_cost_centroid(pts: np.ndarray) -> float:
    if len(pts) == 0:
        raise InvalidPartitionError("empty cluster")
    c = pts.mean(axis=0)
    return float(((pts - c) ** 2).sum())


def cost_partition_kmeans(X: PointSet, S: Sequence[Sequence[int]]) -> float:
    """k-means cost of a partition with each cluster served by its centroid."""
    S = make_partition(S, X.n)
    return sum(cluster_cost_pairwise(X.points[list(cl)]) for cl in S)


def cost_centers_kmeans(X: PointSet, C) -> tuple[float, Partition]:
    """Cost of serving X from the given centers and the induced partition.

    Clusters of the returned partition are listed in center order; centers
    that attract no point contribute no cluster.
    """
    C = np.asarray(C, dtype=float)
    if C.ndim == 1:
        C = C[:, None]
    if C.shape[0] == 0:
        raise ClusteringError("need at least one center")
    if C.shape[1] != X.dim:
        raise DimensionMismatchError(f"centers in R^{C.shape[1]}, points in R^{X.dim}")
    d = sq_dists(C, X.points)
    lab = np.argmin(d, axis=0)
    cost = float(d[lab, np.arange(X.n)].sum())
    part = tuple(tuple(int(i) for i in np.flatnonzero(lab == c)) for c in range(len(C)))
    return cost, tuple(cl for cl in part if cl)


def cost_partition_kmedian(inst: KMedianInstance, S: Sequence[Sequence[int]]) -> float:
    """Sum over clusters of the best single candidate center's service cost."""
    S = make_partition(S, inst.n_demands)
    return float(sum(inst.dist[:, list(cl)].sum(axis=1).min() for cl in S))


def cost_centers_kmedian(inst: KMedianInstance, opened: Sequence[int]) -> float:
    return solution_cost(inst.dist, opened)


# ---------------------------------------------------------------- relaxed 3-hop

@dataclass(frozen=True)
class ThreeHopReport:
    checked: int
    violations: int
    worst_ratio: float
    worst_quadruple: tuple[int, int, int, int] | None  # (j, i', j', i)


def check_relaxed_3hop(inst: KMedianInstance, alpha: float, samples: int | None = 1000,
                       seed: int = 0) -> ThreeHopReport:
    """Check d(i,j) <= alpha * (d(i,j') + d(i',j') + d(i',j)) on quadruples.

    The right-hand side follows the path j -> i' -> j' -> i. With
    ``samples=None`` every quadruple is checked. A quadruple with zero
    right-hand side and d(i,j) > 0 counts as a violation and is left out of
    the worst ratio.
    """
    if alpha <= 0:
        raise ConfigError("alpha must be positive")
    d = inst.dist
    nc, nd = d.shape
    if samples is None:
        quads = np.indices((nd, nc, nd, nc)).reshape(4, -1).T
    else:
        rng = np.random.default_rng(seed)
        quads = np.column_stack([rng.integers(0, nd, samples), rng.integers(0, nc, samples),
                                 rng.integers(0, nd, samples), rng.integers(0, nc, samples)])
    j, ip, jp, i = quads.T
    lhs = d[i, j]
    rhs = d[i, jp] + d[ip, jp] + d[ip, j]
    tol = 1e-12 * (1.0 + lhs)
    zero = rhs <= 0
    viol = (lhs > alpha * rhs + tol) | (zero & (lhs > 0))
    ratio = np.where(zero, 0.0, lhs / np.where(zero, 1.0, rhs))
    if np.all(zero):
        worst, wq = 0.0, None
    else:
        w = int(np.argmax(np.where(zero, -np.inf, ratio)))
        worst, wq = float(ratio[w]), tuple(int(v) for v in quads[w])
    return ThreeHopReport(checked=len(quads), violations=int(viol.sum()),
                          worst_ratio=worst, worst_quadruple=wq)
