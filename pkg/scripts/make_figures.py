#!/usr/bin/env python3
"""Regenerate the four figure datasets as CSV files.

Usage:
    python scripts/make_figures.py [--outdir results] [--n-trials N] [--seed S]

Figures 1 and 2 run Monte Carlo campaigns (figure 1 at the default 1e5
trials per point takes a few minutes); figures 3 and 4 are analytic and
instant.  Plot the CSVs with any tool you like; nothing here renders.
"""

import argparse
import pathlib
import sys

from ocfield.cli import main as cli_main


def run(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="results", help="output directory (default results/)")
    parser.add_argument("--n-trials", type=int, default=None, help="override Monte Carlo trials per point")
    parser.add_argument("--seed", type=int, default=None, help="override the master seed")
    args = parser.parse_args(argv)

    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for number in (1, 2, 3, 4):
        target = outdir / f"figure{number}.csv"
        cli_args = ["figure", str(number), "--out", str(target)]
        if args.n_trials is not None:
            cli_args += ["--n-trials", str(args.n_trials)]
        if args.seed is not None:
            cli_args += ["--seed", str(args.seed)]
        code = cli_main(cli_args)
        if code != 0:
            return code
        print(f"wrote {target}")
    return 0


if __name__ == "__main__":
    sys.exit(run())
