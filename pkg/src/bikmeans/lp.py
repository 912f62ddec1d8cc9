"""k-median LP relaxation, its solution, and center-splitting normalization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .core import ClusteringError, KMedianInstance, NumericError
from .simplex import InfeasibleError, SolverStallError, simplex

# dense simplex up to this many LP variables, HiGHS beyond
AUTO_SIMPLEX_MAX_VARS = 1500
DROP_WEIGHT = 1e-12


@dataclass(frozen=True)
class LPModel:
    """min c.v  s.t.  A_eq v = b_eq,  A_ub v <= b_ub,  v >= 0.

    Variable order is y_0..y_{C-1} followed by z[x, c] in row-major order.
    """

    c: np.ndarray
    A_eq: sp.csr_matrix
    b_eq: np.ndarray
    A_ub: sp.csr_matrix
    b_ub: np.ndarray
    n_demands: int
    n_centers: int

    @property
    def n_vars(self) -> int:
        return self.c.size

    @property
    def n_constraints(self) -> int:
        return self.A_eq.shape[0] + self.A_ub.shape[0]


def build_lp(inst: KMedianInstance, k: int) -> LPModel:
    nd, nc = inst.n_demands, inst.n_centers
    nz = nd * nc
    c = np.concatenate([np.zeros(nc), inst.dist.T.ravel()])
    # sum_c y_c = k ; sum_c z_xc = 1
    eq_rows = [np.zeros(nc, dtype=int)] + [np.full(nc, 1 + x) for x in range(nd)]
    eq_cols = [np.arange(nc)] + [nc + x * nc + np.arange(nc) for x in range(nd)]
    A_eq = sp.csr_matrix((np.ones(nc * (nd + 1)),
                          (np.concatenate(eq_rows), np.concatenate(eq_cols))),
                         shape=(nd + 1, nc + nz))
    b_eq = np.concatenate([[float(k)], np.ones(nd)])
    # z_xc - y_c <= 0
    r = np.arange(nz)
    A_ub = sp.csr_matrix((np.concatenate([np.ones(nz), -np.ones(nz)]),
                          (np.concatenate([r, r]), np.concatenate([nc + r, r % nc]))),
                         shape=(nz, nc + nz))
    return LPModel(c, A_eq, b_eq, A_ub, np.zeros(nz), nd, nc)


@dataclass(frozen=True)
class RawSolution:
    y: np.ndarray  # (C,)
    z: np.ndarray  # (D, C)
    value: float
    k: int
    solver: str


def solve_lp(inst: KMedianInstance, k: int, tol: float = 1e-7, method: str = "auto") -> RawSolution:
    """Solve the LP relaxation with the dense simplex or scipy's HiGHS."""
    if not 1 <= k <= inst.n_centers:
        raise ClusteringError(f"k={k} must lie in [1, {inst.n_centers}]")
    model = build_lp(inst, k)
    if method == "auto":
        method = "simplex" if model.n_vars <= AUTO_SIMPLEX_MAX_VARS else "highs"
    if method == "simplex":
        res = simplex(model.c, model.A_eq.toarray(), model.b_eq, model.A_ub.toarray(),
                      model.b_ub, tol=min(tol, 1e-9))
        v = res.x
    elif method == "highs":
        from scipy.optimize import linprog
        res = linprog(model.c, A_ub=model.A_ub, b_ub=model.b_ub, A_eq=model.A_eq,
                      b_eq=model.b_eq, bounds=(0, None), method="highs",
                      options={"primal_feasibility_tolerance": min(tol, 1e-7),
                               "dual_feasibility_tolerance": min(tol, 1e-7)})
        if res.status == 2:
            raise InfeasibleError(res.message)
        if res.status != 0:
            raise SolverStallError(res.message, best_value=getattr(res, "fun", None))
        v = np.maximum(res.x, 0.0)
    else:
        raise ClusteringError(f"unknown LP method {method!r}")
    nc = inst.n_centers
    y = v[:nc].copy()
    z = v[nc:].reshape(inst.n_demands, nc).copy()
    z = np.minimum(z, y[None, :])
    viol = max(abs(y.sum() - k), float(np.abs(z.sum(axis=1) - 1.0).max()))
    if viol > tol:
        raise NumericError(f"LP solution violates constraints by {viol:.3g}")
    return RawSolution(y=y, z=z, value=float((z * inst.dist.T).sum()), k=k, solver=method)


@dataclass(frozen=True, eq=False)
class FractionalSolution:
    """Normalized LP solution over co-located center copies.

    ``served[x, j]`` marks z[x, copy j] = weight[j]; every other z entry is 0.
    ``dist[x, j]`` is d(x, copy j).
    """

    k: int
    copy_center: np.ndarray  # (J,) original center index per copy
    weight: np.ndarray  # (J,) y per copy
    served: np.ndarray  # (D, J) bool
    dist: np.ndarray  # (D, J)

    @property
    def n_copies(self) -> int:
        return self.weight.size

    @property
    def z(self) -> np.ndarray:
        return self.served * self.weight[None, :]

    @property
    def radii(self) -> np.ndarray:
        return lp_radii(self)[0]

    @property
    def lp_value(self) -> float:
        return lp_radii(self)[1]


def normalize(raw: RawSolution, inst: KMedianInstance) -> FractionalSolution:
    """Split centers into co-located copies so that z[x, copy] is 0 or the copy weight.

    For a center c the distinct positive values v_1 < ... < v_r of z[., c]
    cut y_c into copies of weight v_1, v_2 - v_1, ..., y_c - v_r. A demand
    with z[x, c] = v_j is served by the first j copies, so its assignment mass
    and cost are unchanged. This is the fixed point of repeatedly splitting c
    into (z[x,c], y_c - z[x,c]) with z[x',c1] = min(z[x',c], y_c1) and
    z[x',c2] = z[x',c] - z[x',c1].
    """
    centers, weights, cols = [], [], []
    nd = raw.z.shape[0]
    for c in range(raw.y.size):
        yc = raw.y[c]
        if yc <= DROP_WEIGHT:
            continue
        zc = raw.z[:, c]
        levels: list[float] = []
        for v in np.sort(zc[zc > DROP_WEIGHT]):
            if not levels or v - levels[-1] > DROP_WEIGHT:
                levels.append(float(v))
            else:
                levels[-1] = float(v)
        if levels and yc - levels[-1] <= DROP_WEIGHT:
            levels[-1] = float(yc)
        bounds = [0.0] + levels + ([float(yc)] if not levels or levels[-1] < yc else [])
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            centers.append(c)
            weights.append(hi - lo)
            # copy (lo, hi] serves every demand whose z reaches hi
            cols.append(zc >= hi - DROP_WEIGHT)
    weight = np.array(weights)
    weight *= raw.k / weight.sum()
    served = np.column_stack(cols) if cols else np.zeros((nd, 0), dtype=bool)
    copy_center = np.array(centers, dtype=int)
    return FractionalSolution(k=raw.k, copy_center=copy_center, weight=weight,
                              served=served, dist=inst.dist[copy_center].T.copy())


def lp_radii(sol: FractionalSolution) -> tuple[np.ndarray, float]:
    """Per-demand fractional service cost R_x and their sum, the LP value."""
    R = (sol.served * sol.weight[None, :] * sol.dist).sum(axis=1)
    return R, float(R.sum())


def solve_normalized(inst: KMedianInstance, k: int, tol: float = 1e-7,
                     method: str = "auto") -> FractionalSolution:
    return normalize(solve_lp(inst, k, tol=tol, method=method), inst)
