"""Dense two-phase revised simplex.

Solves   min c.x  s.t.  A_eq x = b_eq,  A_ub x <= b_ub,  x >= 0.

Pricing is Dantzig (most negative reduced cost). After a run of
``10 * n_vars`` consecutive degenerate pivots the solver switches to Bland's
rule until the next nondegenerate pivot, which rules out cycling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ClusteringError


class InfeasibleError(ClusteringError):
    pass


class UnboundedError(ClusteringError):
    pass


class SolverStallError(ClusteringError):
    def __init__(self, msg, best_value=None):
        super().__init__(msg)
        self.best_value = best_value


@dataclass
class SimplexResult:
    x: np.ndarray
    value: float
    iterations: int
    bland_pivots: int


_PIVOT_TOL = 1e-9
_REFACTOR_EVERY = 64


class _Revised:
    def __init__(self, A, b, basis, tol, max_iter, degenerate_limit):
        self.A = A
        self.b = b
        self.m, self.ntot = A.shape
        self.basis = list(basis)
        self.tol = tol
        self.max_iter = max_iter
        self.degenerate_limit = degenerate_limit
        self.iterations = 0
        self.bland_pivots = 0
        self._refactor()

    def _refactor(self):
        self.Binv = np.linalg.inv(self.A[:, self.basis])
        self.xB = self.Binv @ self.b
        self.xB[np.abs(self.xB) < 1e-13] = 0.0

    def run(self, cost, allowed):
        """Optimize ``cost`` over the current basis; ``allowed`` masks entering columns."""
        degenerate_run = 0
        since_refactor = 0
        while True:
            if self.iterations >= self.max_iter:
                raise SolverStallError(
                    f"simplex hit the iteration cap ({self.max_iter})",
                    best_value=float(cost[self.basis] @ self.xB))
            pi = cost[self.basis] @ self.Binv
            red = cost - pi @ self.A
            red[~allowed] = np.inf
            red[self.basis] = np.inf
            bland = degenerate_run >= self.degenerate_limit
            cand = np.flatnonzero(red < -self.tol)
            if cand.size == 0:
                return
            q = int(cand[0]) if bland else int(cand[np.argmin(red[cand])])
            u = self.Binv @ self.A[:, q]
            pos = np.flatnonzero(u > _PIVOT_TOL)
            if pos.size == 0:
                raise UnboundedError("objective is unbounded below")
            ratios = self.xB[pos] / u[pos]
            theta = ratios.min()
            ties = pos[ratios <= theta + 1e-12 * (1.0 + abs(theta))]
            if bland:
                r = int(min(ties, key=lambda i: self.basis[i]))
                self.bland_pivots += 1
            else:
                r = int(ties[np.argmax(u[ties])])
            theta = self.xB[r] / u[r]
            self.xB -= theta * u
            self.xB[r] = theta
            np.maximum(self.xB, 0.0, out=self.xB)
            piv = self.Binv[r] / u[r]
            self.Binv -= np.outer(u, piv)
            self.Binv[r] = piv
            self.basis[r] = q
            self.iterations += 1
            degenerate_run = degenerate_run + 1 if theta <= 1e-12 else 0
            since_refactor += 1
            if since_refactor >= _REFACTOR_EVERY:
                self._refactor()
                since_refactor = 0


def simplex(c, A_eq=None, b_eq=None, A_ub=None, b_ub=None, tol: float = 1e-9,
            max_iter: int | None = None) -> SimplexResult:
    c = np.asarray(c, dtype=float)
    n = c.size
    A_eq = np.zeros((0, n)) if A_eq is None else np.asarray(A_eq, dtype=float).reshape(-1, n)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).ravel()
    A_ub = np.zeros((0, n)) if A_ub is None else np.asarray(A_ub, dtype=float).reshape(-1, n)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).ravel()
    m_eq, m_ub = len(b_eq), len(b_ub)
    m = m_eq + m_ub

    # columns: [x | slacks | artificials]
    rows = np.vstack([A_eq, A_ub])
    b = np.concatenate([b_eq, b_ub])
    slack = np.vstack([np.zeros((m_eq, m_ub)), np.eye(m_ub)])
    sign = np.where(b < 0, -1.0, 1.0)
    rows = rows * sign[:, None]
    slack = slack * sign[:, None]
    b = b * sign
    # a slack can start basic only where it kept its +1 coefficient
    need_art = [i for i in range(m) if i < m_eq or sign[i] < 0]
    art = np.zeros((m, len(need_art)))
    for j, i in enumerate(need_art):
        art[i, j] = 1.0
    A = np.hstack([rows, slack, art])
    ntot = A.shape[1]
    n_art0 = n + m_ub
    basis = [0] * m
    for i in range(m_eq, m):
        basis[i] = n + (i - m_eq)
    for j, i in enumerate(need_art):
        basis[i] = n_art0 + j

    if max_iter is None:
        max_iter = 50 * (m + ntot) + 1000
    solver = _Revised(A, b, basis, tol, max_iter, degenerate_limit=10 * n)

    is_art = np.zeros(ntot, dtype=bool)
    is_art[n_art0:] = True
    if need_art:
        c1 = is_art.astype(float)
        solver.run(c1, np.ones(ntot, dtype=bool))
        infeas = float(c1[solver.basis] @ solver.xB)
        if infeas > tol * (1.0 + np.abs(b).sum()):
            raise InfeasibleError(f"no feasible point (phase-1 residual {infeas:.3g})")
        # pivot zero-level artificials out where a structural column allows it
        for r in range(m):
            if not is_art[solver.basis[r]]:
                continue
            row = solver.Binv[r] @ A
            row[is_art] = 0.0
            row[solver.basis] = 0.0
            j = int(np.argmax(np.abs(row)))
            if abs(row[j]) > 1e-7:
                u = solver.Binv @ A[:, j]
                piv = solver.Binv[r] / u[r]
                solver.Binv -= np.outer(u, piv)
                solver.Binv[r] = piv
                solver.basis[r] = j
        solver._refactor()

    c2 = np.zeros(ntot)
    c2[:n] = c
    solver.run(c2, ~is_art)
    x = np.zeros(ntot)
    x[solver.basis] = solver.xB
    x = x[:n]
    x[np.abs(x) < 1e-12] = 0.0
    return SimplexResult(x=x, value=float(c @ x), iterations=solver.iterations,
                         bland_pivots=solver.bland_pivots)
