#!/usr/bin/env python3
"""Flagship rate experiment: triangle target, both models, practical rho.

Reproduces the minimax-rate check at desk scale and writes per-replication
rows plus a summary (slope, stderr, expected exponent) per model. Expect a
few minutes at the default 100 replications.
"""

import argparse
import sys
from pathlib import Path

from multithresh.cli import main as cli_main


def run(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="results", help="output directory")
    parser.add_argument("--reps", type=int, default=100)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--rho", default="1.0", help="'theory' or a number")
    args = parser.parse_args(argv)

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for model in ("density", "regression"):
        out = outdir / f"rates_{model}_triangle.csv"
        code = cli_main([
            "rates", "--model", model, "--target", "triangle",
            "--n", "512,1024,2048,4096,8192", "--reps", str(args.reps),
            "--seed", str(args.seed), "--rho", str(args.rho),
            "--universal", "--out", str(out),
        ])
        if code != 0:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(run())
