#!/usr/bin/env python3
"""Trace the uniqueness-threshold product 16·a·b(t)·t² for free Gaussian
evolution against its closed form 16a²t²/(1+16a²t²), and optionally sweep
a focusing chirp toward the critical case.
"""

import argparse
import csv

import numpy as np

from lsg.grids import GridMode, RadialGrid
from lsg.hardy import uniqueness_experiment
from lsg.propagator import gaussian_profile


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rate", type=float, default=1.0)
    ap.add_argument("--chirp", type=float, default=0.0)
    ap.add_argument("--t-max", type=float, default=2.5)
    ap.add_argument("--n-times", type=int, default=12)
    ap.add_argument("--out", default="hardy_curve.csv")
    args = ap.parse_args()

    grid = RadialGrid(1, 12.0, 2048)
    f = gaussian_profile(grid, args.rate, args.chirp)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "product", "expected_free", "classification"])
        for t in np.linspace(0.2, args.t_max, args.n_times):
            rep = uniqueness_experiment(1, f, float(t), mode=GridMode.SCALED)
            a = args.rate
            free = 16 * a * a * t * t / (1 + 16 * a * a * t * t)
            writer.writerow([f"{t:.17g}", f"{rep.verdict.product:.17g}",
                             f"{free:.17g}", rep.classification_name])
            print(f"t={t:6.3f}  product={rep.verdict.product:.8f}  "
                  f"({rep.classification_name})")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
