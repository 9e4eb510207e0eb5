#!/usr/bin/env python3
"""Partial-sum radius profiles for a sample of corpus modules.

For each module the CLI fprofile command samples the radius multiset on
a grid, writes CSV and SVG artifacts, and the convexity flags land in
the JSON report next to them.
"""

import argparse
import sys
from pathlib import Path

from padiff.cli import main as cli_main

DEFAULT_MODULES = ("ex44_p5", "sum_exp_cancel_p5", "rank3_n2_p5")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("modules", nargs="*", default=list(DEFAULT_MODULES),
                    help="corpus names or description files")
    ap.add_argument("--out", default="fprofiles", metavar="DIR",
                    help="directory for the CSV/SVG/JSON artifacts")
    ap.add_argument("--iterates", type=int, metavar="N",
                    help="derivation power iterates for radius reads")
    ap.add_argument("--rho-grid", dest="rho_grid", metavar="LIST",
                    help="comma list of k; sample radii p^(-1/k)")
    args = ap.parse_args(argv)

    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    worst = 0
    for ref in args.modules:
        stem = Path(ref).stem
        call = ["fprofile", ref,
                "--csv", str(outdir / (stem + ".csv")),
                "--svg", str(outdir / (stem + ".svg")),
                "--out", str(outdir / (stem + ".json"))]
        if args.iterates is not None:
            call += ["--iterates", str(args.iterates)]
        if args.rho_grid:
            call += ["--rho-grid", args.rho_grid]
        worst = max(worst, cli_main(call))
    print("artifacts in %s/" % outdir)
    return worst


if __name__ == "__main__":
    sys.exit(main())
