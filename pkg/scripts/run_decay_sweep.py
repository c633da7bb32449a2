#!/usr/bin/env python3
"""Dispersive-decay sweep: weighted sup-norms of the evolved conjugated
profile against time, with the fitted log-log slope printed per system.

Writes one CSV per root system (t, weighted_norm) for external plotting.
"""

import argparse
import csv
import json

import numpy as np

from lsg.estimates import decay_exponent_fit
from lsg.grids import RadialGrid
from lsg.propagator import gaussian_profile
from lsg.rootsystem import build_root_system

CASES = {
    "A1": (2048, 12.0),
    "A2": (256, 10.0),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=float, default=1.0)
    ap.add_argument("--rate", type=float, default=1.0)
    ap.add_argument("--n-times", type=int, default=10)
    ap.add_argument("--prefix", default="decay")
    args = ap.parse_args()

    times = list(np.geomspace(1.0, 10.0, args.n_times))
    for name, (n, box) in CASES.items():
        rs = build_root_system(name)
        f = gaussian_profile(RadialGrid(rs.rank, box, n), args.rate)
        slope, target, reports = decay_exponent_fit(rs, f, args.p, times)
        path = f"{args.prefix}_{name.lower()}.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "weighted_norm"])
            for r in reports:
                writer.writerow([f"{r.t:.17g}", f"{r.weighted_norm:.17g}"])
        print(json.dumps({"system": name, "p": args.p, "slope": slope,
                          "target": target, "csv": path}, sort_keys=True))


if __name__ == "__main__":
    main()
