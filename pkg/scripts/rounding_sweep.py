#!/usr/bin/env python3
"""Empirical rounding ratio against alpha_lp_tight over a range of m = beta*k.

Instances are drawn in a few dimensions so that the LP optimum is often
fractional; integral optima are skipped. Output CSV: beta, bound, mean ratio.
"""

import argparse
import csv
import sys

import numpy as np

from bikmeans.bounds import alpha_lp_tight
from bikmeans.core import KMedianInstance, PointSet
from bikmeans.lp import solve_normalized
from bikmeans.rounding import round_many


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--m", type=int, nargs="+", default=[3, 4, 5, 6])
    ap.add_argument("--instances", type=int, default=10)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args(argv)
    sols, s = [], 0
    while len(sols) < a.instances:
        rng = np.random.default_rng([a.seed, s])
        s += 1
        inst = KMedianInstance(PointSet(rng.normal(size=(10, 5))), PointSet(rng.normal(size=(10, 5)) * 0.7))
        sol = solve_normalized(inst, a.k)
        if np.any(sol.weight < 1 - 1e-7):
            sols.append((inst, sol))
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["beta", "alpha_lp_tight", "mean_ratio", "max_ratio"])
    for m in a.m:
        beta = m / a.k
        ratios = [round_many(sol, inst, beta, a.trials, seed=i).mean_ratio
                  for i, (inst, sol) in enumerate(sols)]
        w.writerow([beta, alpha_lp_tight(beta).value, float(np.mean(ratios)), float(np.max(ratios))])


if __name__ == "__main__":
    main()
