#!/usr/bin/env python3
"""Tabulate alpha(beta) for every algorithm; the CSV feeds docs/bounds.gp."""

import argparse
import csv
import sys

from bikmeans.bounds import bounds_table


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--beta-min", type=float, default=1.05)
    ap.add_argument("--beta-max", type=float, default=4.0)
    ap.add_argument("--step", type=float, default=0.01)
    ap.add_argument("--as-printed", action="store_true")
    ap.add_argument("--out", default="-")
    a = ap.parse_args(argv)
    rows = bounds_table(a.beta_min, a.beta_max, a.step, as_printed=a.as_printed)
    fh = sys.stdout if a.out == "-" else open(a.out, "w", newline="")
    w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    if fh is not sys.stdout:
        fh.close()
    for b in (1.3, 1.5, 2.0, 3.0):
        r = min(rows, key=lambda r: abs(r["beta"] - b))
        print(f"beta={r['beta']:.2f}  lp_tight={r['alpha_lp_tight']:.4f}  best={r['alpha_best']:.4f}",
              file=sys.stderr)


if __name__ == "__main__":
    main()
