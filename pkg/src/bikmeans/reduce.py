"""Reduction from k-means to discrete k-median.

Pipeline: random projection with one-sided distortion (1 + eps/3), then an
(eps/3)-approximate centroid set of the projected points, then the k-median
instance with squared Euclidean costs between the two.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import ClusteringError, ConfigError, KMedianInstance, PointSet, sq_dists


class ProjectionError(ClusteringError):
    def __init__(self, msg, best_distortion=None):
        super().__init__(msg)
        self.best_distortion = best_distortion


class CentroidSetSizeError(ClusteringError):
    pass


@dataclass(frozen=True)
class ReductionConfig:
    epsilon: float = 0.3
    target_dim_cap: int | None = None
    grid_scale_base: float = 2.0
    seed: int = 0
    jl_constant: float = 24.0
    max_retries: int = 64
    centroid_cap: int = 200_000
    centroid_method: str = "auto"  # auto | grid | subsets

    def __post_init__(self):
        if not 0 < self.epsilon < 0.5:
            raise ConfigError(f"epsilon must lie in (0, 1/2), got {self.epsilon}")
        if self.grid_scale_base <= 1:
            raise ConfigError("grid_scale_base must exceed 1")
        if self.target_dim_cap is not None and self.target_dim_cap < 1:
            raise ConfigError("target_dim_cap must be positive")
        if self.centroid_method not in ("auto", "grid", "subsets"):
            raise ConfigError(f"unknown centroid_method {self.centroid_method!r}")

    @property
    def eps_prime(self) -> float:
        return self.epsilon / 3


def pairwise_ratio_range(X: np.ndarray, Y: np.ndarray) -> tuple[float, float]:
    """min and max of |Yi-Yj|^2 / |Xi-Xj|^2 over pairs with Xi != Xj."""
    iu = np.triu_indices(len(X), 1)
    dx = sq_dists(X, X)[iu]
    dy = sq_dists(Y, Y)[iu]
    keep = dx > 0
    if not keep.any():
        return 1.0, 1.0
    r = dy[keep] / dx[keep]
    return float(r.min()), float(r.max())


def target_dim(n: int, p: int, eps_prime: float, c: float = 24.0, cap: int | None = None) -> int:
    if n <= 1:
        return p
    t = math.ceil(c * math.log(n) / eps_prime ** 2)
    if cap is not None:
        t = min(t, cap)
    return max(1, min(p, t))


def jl_transform(X: PointSet, eps_prime: float, seed: int = 0, *, jl_constant: float = 24.0,
                 target_dim_cap: int | None = None, max_retries: int = 64) -> tuple[PointSet, float]:
    """Gaussian projection rescaled so that no squared distance shrinks.

    Returns the projected points and the largest squared-distance ratio. If
    the target dimension is not below the input dimension the points are
    returned unchanged with distortion 1.
    """
    if not 0 < eps_prime < 1:
        raise ConfigError("eps_prime must lie in (0, 1)")
    p_t = target_dim(X.n, X.dim, eps_prime, jl_constant, target_dim_cap)
    if p_t >= X.dim:
        return X, 1.0
    rng = np.random.default_rng(seed)
    best = math.inf
    for _ in range(max_retries):
        G = rng.standard_normal((X.dim, p_t)) / math.sqrt(p_t)
        Y = X.points @ G
        lo, hi = pairwise_ratio_range(X.points, Y)
        if lo <= 0:
            continue
        Y = Y / math.sqrt(lo)
        lo, hi = pairwise_ratio_range(X.points, Y)
        if lo < 1:
            # absorb rounding so the lower bound holds exactly
            Y = Y / math.sqrt(lo)
            hi = hi / lo
        best = min(best, hi)
        if hi <= 1 + eps_prime:
            return PointSet(Y), hi
    raise ProjectionError(
        f"no projection to {p_t} dims within distortion {1 + eps_prime} after "
        f"{max_retries} tries (best {best:.4g})", best_distortion=best)


# ---------------------------------------------------------------- centroid sets

def subset_centroids(Xp: PointSet, cap: int = 200_000) -> PointSet:
    """Centroids of all nonempty subsets: an exact (0-approximate) centroid set."""
    n = Xp.n
    if (1 << n) - 1 > cap:
        raise CentroidSetSizeError(f"2^{n}-1 subset centroids exceed the cap {cap}")
    masks = np.array([[m >> i & 1 for i in range(n)] for m in range(1, 1 << n)], dtype=float)
    C = (masks @ Xp.points) / masks.sum(axis=1, keepdims=True)
    return PointSet(_dedupe(np.vstack([Xp.points, C])))


def _dedupe(C: np.ndarray) -> np.ndarray:
    # keep first occurrences so the input points stay in front
    _, idx = np.unique(np.round(C, 12), axis=0, return_index=True)
    return C[np.sort(idx)]


@dataclass(frozen=True)
class _GridPlan:
    origin: np.ndarray
    basis: np.ndarray  # (p, r) orthonormal columns spanning the affine hull
    coords: np.ndarray  # (n, r)
    levels: list  # (sigma, spacing, reach)
    estimate: int


def _grid_plan(Xp: PointSet, eps_prime: float, base: float) -> _GridPlan:
    pts = Xp.points
    origin = pts.mean(axis=0)
    _, s, Vt = np.linalg.svd(pts - origin, full_matrices=False)
    r = int((s > 1e-12 * max(1.0, s.max(initial=0.0))).sum())
    basis = Vt[:r].T
    coords = (pts - origin) @ basis
    if r == 0:
        return _GridPlan(origin, basis, coords, [], 0)
    d = np.sqrt(sq_dists(coords, coords))
    nz = d[d > 0]
    dmin, diam = float(nz.min()), float(nz.max())
    n = Xp.n
    # sigma = sqrt(cost(S)/|S|) lies in [dmin/n, diam] for clusters of distinct points
    sigma = dmin / n
    levels = []
    estimate = 0
    while True:
        half_diag = math.sqrt(eps_prime) * sigma / base
        spacing = 2 * half_diag / math.sqrt(r)
        reach = sigma + half_diag
        per_axis = 2 * reach / spacing + 1
        estimate += int(n * per_axis ** r)
        levels.append((sigma, spacing, reach))
        if sigma >= diam:
            break
        sigma *= base
    return _GridPlan(origin, basis, coords, levels, estimate)


def grid_centroid_set(Xp: PointSet, eps_prime: float, base: float = 2.0,
                      cap: int = 200_000) -> PointSet:
    """Multi-scale lattice around every point, in affine-hull coordinates.

    For a subset S with centroid mu, let sigma^2 = cost(S)/|S| and pick the
    level with sigma_j / base <= sigma <= sigma_j. The nearest point x0 of S is
    within sigma of mu, so the lattice around x0 at that level holds a point g
    with |g - mu| <= sqrt(eps') sigma_j / base, which costs at most
    |S| |g - mu|^2 <= eps' cost(S) extra.
    """
    plan = _grid_plan(Xp, eps_prime, base)
    # the cube estimate ignores ball and bounding-box pruning; only bail out early when hopeless
    if plan.estimate > 20 * cap:
        raise CentroidSetSizeError(
            f"grid would hold ~{plan.estimate} candidates (cap {cap}); "
            "use a larger epsilon or a smaller instance")
    Q = plan.coords
    lo_box, hi_box = Q.min(axis=0), Q.max(axis=0)
    out = [np.zeros((0, Q.shape[1]))]
    for sigma, s, reach in plan.levels:
        hd = s * math.sqrt(Q.shape[1]) / 2
        keys = set()
        for q in Q:
            lo = np.ceil(np.maximum(q - reach, lo_box - hd) / s).astype(int)
            hi = np.floor(np.minimum(q + reach, hi_box + hd) / s).astype(int)
            if np.any(hi < lo):
                continue
            axes = [np.arange(a, b + 1) for a, b in zip(lo, hi)]
            cells = np.array(list(itertools.product(*axes)), dtype=int)
            near = ((cells * s - q) ** 2).sum(axis=1) <= reach ** 2
            keys.update(map(tuple, cells[near]))
        if keys:
            out.append(np.array(sorted(keys), dtype=float) * s)
    G = np.vstack(out)
    C = plan.origin + G @ plan.basis.T if G.size else np.zeros((0, Xp.dim))
    C = _dedupe(np.vstack([Xp.points, C]))
    if len(C) > cap:
        raise CentroidSetSizeError(f"centroid set has {len(C)} points (cap {cap})")
    return PointSet(C)


def build_centroid_set(Xp: PointSet, eps_prime: float, cfg: ReductionConfig | None = None) -> PointSet:
    cfg = cfg or ReductionConfig()
    method = cfg.centroid_method
    if method == "auto":
        n_sub = (1 << Xp.n) - 1 if Xp.n < 40 else math.inf
        est = _grid_plan(Xp, eps_prime, cfg.grid_scale_base).estimate
        method = "subsets" if n_sub <= min(est, cfg.centroid_cap) else "grid"
    if method == "subsets":
        return subset_centroids(Xp, cfg.centroid_cap)
    return grid_centroid_set(Xp, eps_prime, cfg.grid_scale_base, cfg.centroid_cap)


# ---------------------------------------------------------------- instance

@dataclass(frozen=True)
class ReductionResult:
    instance: KMedianInstance
    projected: PointSet
    centroid_set: PointSet
    psi: tuple[int, ...]
    achieved_distortion: float
    original_dim: int

    def report(self) -> dict:
        return {"n": self.projected.n, "p": self.original_dim, "p_tilde": self.projected.dim,
                "n_centers": self.centroid_set.n,
                "achieved_distortion": self.achieved_distortion}

    def pull_back(self, S):
        """Map a partition of demands to the partition of original points."""
        return tuple(tuple(self.psi[i] for i in cl) for cl in S)


def build_instance(X: PointSet, cfg: ReductionConfig) -> ReductionResult:
    ep = cfg.eps_prime
    Xp, dist = jl_transform(X, ep, cfg.seed, jl_constant=cfg.jl_constant,
                            target_dim_cap=cfg.target_dim_cap, max_retries=cfg.max_retries)
    C = build_centroid_set(Xp, ep, cfg)
    psi = tuple(range(X.n))
    inst = KMedianInstance(demands=Xp, centers=C, back_map=psi)
    return ReductionResult(inst, Xp, C, psi, dist, X.dim)
