#!/usr/bin/env python3
"""Round-trip accuracy of the spherical transform across rates and grids:
a quick way to size boxes and spectral windows for new experiments.
"""

import argparse
import json

from lsg.grids import RadialGrid
from lsg.propagator import gaussian_profile
from lsg.rootsystem import build_root_system
from lsg.spherical import roundtrip_error


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--group", default="A1")
    ap.add_argument("--rates", default="0.5,1,2")
    ap.add_argument("--grid", default=None, help="N,L (default per rank)")
    ap.add_argument("--spectral", default=None, help="Ns,Ls")
    args = ap.parse_args()

    rs = build_root_system(args.group)
    defaults = {1: ((512, 12.0), (768, 16.0)), 2: ((128, 10.0), (160, 12.0))}
    (n, box), (ns, sbox) = defaults[rs.rank]
    if args.grid:
        n, box = int(args.grid.split(",")[0]), float(args.grid.split(",")[1])
    if args.spectral:
        ns, sbox = (int(args.spectral.split(",")[0]),
                    float(args.spectral.split(",")[1]))
    grid = RadialGrid(rs.rank, box, n)
    sgrid = RadialGrid(rs.rank, sbox, ns)
    for rate in (float(r) for r in args.rates.split(",")):
        err = roundtrip_error(rs, gaussian_profile(grid, rate), sgrid)
        print(json.dumps({"group": rs.name, "rate": rate,
                          "grid": [n, box], "spectral": [ns, sbox],
                          "relative_l2": err}, sort_keys=True))


if __name__ == "__main__":
    main()
