"""Approximation-ratio formulas alpha(beta) for opening beta*k centers."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import ClusteringError

BOUNDS_VERSION = "1"


class DomainError(ClusteringError):
    pass


def _check_beta(beta: float):
    if not beta > 1:
        raise DomainError(f"beta must exceed 1, got {beta}")


def alpha_lp_closed(beta: float, as_printed: bool = False) -> float:
    """1 + e^-b (6b/(b-1) + (b-1)^2/b).

    ``as_printed=True`` uses 6b/(1-b) instead, which is negative for b > 1.
    """
    _check_beta(beta)
    first = 6 * beta / (1 - beta) if as_printed else 6 * beta / (beta - 1)
    return 1 + math.exp(-beta) * (first + (beta - 1) ** 2 / beta)


def _tail_over_gamma(g: float) -> float:
    """(1 - e^g (1 - g)) / g, continuous at g = 0."""
    if g < 1e-4:
        # 1 - e^g(1-g) = sum_{n>=2} (n-1) g^n / n!
        return g / 2 + g * g / 3 + g ** 3 / 8
    return (1 - math.exp(g) * (1 - g)) / g


def lp_tight_objective(beta: float, gamma: float) -> float:
    b, g = beta, gamma
    r = b / (b - 1)
    return ((1 - math.exp(-b))
            + 3 * math.exp(-(b - g)) * (1 - g) * (r + max(r, 2 * b / (b - g)))
            + b * math.exp(-b) * _tail_over_gamma(g))


@dataclass(frozen=True)
class TightBound:
    value: float
    argmax_gamma: float


def _golden_max(f, lo: float, hi: float, tol: float):
    invphi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = (a + b) / 2
    return x, f(x)


def alpha_lp_tight(beta: float, step: float = 1e-4, gamma_tol: float = 1e-7) -> TightBound:
    """Maximum over gamma in [0, 1] of the per-point rounding ratio bound.

    Dense grid with spacing ``step``, then golden-section search on the
    bracket around the best grid point.
    """
    _check_beta(beta)
    n = max(2, int(math.ceil(1.0 / step)))
    grid = [i / n for i in range(n + 1)]
    vals = [lp_tight_objective(beta, g) for g in grid]
    i = max(range(len(vals)), key=vals.__getitem__)
    best_g, best_v = grid[i], vals[i]
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, n)]
    g, v = _golden_max(lambda t: lp_tight_objective(beta, t), lo, hi, gamma_tol)
    if v > best_v:
        best_g, best_v = g, v
    return TightBound(best_v, best_g)


def alpha_local(beta: float, p: float, eps_term: float = 0.0) -> float:
    """(1 + 2/b + 2/(b p))^2 / (1 - eps_term); ``p=math.inf`` gives (1 + 2/b)^2."""
    _check_beta(beta)
    if p < 1:
        raise DomainError("swap size p must be >= 1")
    if not 0 <= eps_term < 1:
        raise DomainError("eps_term must lie in [0, 1)")
    return (1 + 2 / beta + 2 / (beta * p)) ** 2 / (1 - eps_term)


def alpha_pipage(beta: float) -> float:
    _check_beta(beta)
    return max(1 + 8 * math.exp(-beta),
               beta * (math.exp(-1) + 8 * math.exp(-beta)) / (beta - 1))


def alpha_envelope(beta: float) -> tuple[float, str]:
    """Best of the three guarantees and which algorithm attains it."""
    opts = {
        "lp-round": alpha_lp_tight(beta).value,
        "local-search": alpha_local(beta, math.inf),
        "pipage": alpha_pipage(beta),
    }
    name = min(opts, key=opts.__getitem__)
    return opts[name], name


def bounds_table(beta_min: float, beta_max: float, step: float, ps=(1, 2, 3),
                 as_printed: bool = False) -> list[dict]:
    rows = []
    n = int(round((beta_max - beta_min) / step))
    for i in range(n + 1):
        b = round(beta_min + i * step, 12)
        if b <= 1:
            continue
        row = {"beta": b,
               "alpha_lp_closed": alpha_lp_closed(b, as_printed=as_printed),
               "alpha_lp_tight": alpha_lp_tight(b).value}
        for p in ps:
            row[f"alpha_local_p{p}"] = alpha_local(b, p)
        row["alpha_local_pinf"] = alpha_local(b, math.inf)
        row["alpha_pipage"] = alpha_pipage(b)
        row["alpha_best"] = alpha_envelope(b)[0]
        rows.append(row)
    return rows
