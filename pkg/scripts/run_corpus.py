#!/usr/bin/env python3
"""Full verification sweep over the bundled corpus.

Runs verify-conjecture on every module through the CLI entry point,
writing one JSON report per module, and prints a summary table with
wall times. Exit code: 0 all pass, 1 any fail, 2 any inconclusive.
"""

import argparse
import sys
import time
from pathlib import Path

from padiff import corpus
from padiff.cli import main as cli_main


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="corpus_reports", metavar="DIR",
                    help="directory for the per-module JSON reports")
    ap.add_argument("--order", type=int, metavar="N",
                    help="truncation order for section solving")
    ap.add_argument("--iterates", type=int, metavar="N",
                    help="derivation power iterates for radius reads")
    ap.add_argument("--only", metavar="LIST",
                    help="comma list of corpus names to run")
    args = ap.parse_args(argv)

    names = corpus.names()
    if args.only:
        wanted = [t.strip() for t in args.only.split(",") if t.strip()]
        unknown = [t for t in wanted if t not in names]
        if unknown:
            ap.error("unknown corpus modules: %s" % ", ".join(unknown))
        names = [n for n in names if n in wanted]

    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    rows = []
    for name in names:
        call = ["verify-conjecture", name,
                "--out", str(outdir / (name + ".json"))]
        if args.order is not None:
            call += ["--order", str(args.order)]
        if args.iterates is not None:
            call += ["--iterates", str(args.iterates)]
        t0 = time.perf_counter()
        code = cli_main(call)
        rows.append((name, code, time.perf_counter() - t0))

    verdict = {0: "PASS", 1: "FAIL", 2: "INCONCLUSIVE"}
    width = max(len(n) for n in names)
    print()
    for name, code, dt in rows:
        print("%-*s  %-12s  %6.2f s" % (width, name,
                                        verdict.get(code, "ERROR"), dt))
    print("reports in %s/" % outdir)
    codes = [c for _, c, _ in rows]
    return 1 if 1 in codes else 2 if 2 in codes else 0


if __name__ == "__main__":
    sys.exit(main())
