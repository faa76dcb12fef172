#!/usr/bin/env python3
"""Coarse parameter-plane scan: tongues, certified expansion, Lyapunov data.

Writes raster.csv next to this script's working directory (or --out).
A 65x49 grid takes a couple of minutes serially; pass --workers to spread
grid points over processes.
"""

import argparse
import sys

from dsmlab.cli import main as cli_main


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--na", type=int, default=65)
    ap.add_argument("--nb", type=int, default=49)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="raster.csv")
    args = ap.parse_args()
    return cli_main([
        "scan-plane",
        "--na", str(args.na), "--nb", str(args.nb),
        "--b-lo", "0.02", "--b-hi", "0.98",
        "--max-iter", "1500",
        "--workers", str(args.workers),
        "--out", args.out,
    ])


if __name__ == "__main__":
    sys.exit(main())
