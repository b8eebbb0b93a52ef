#!/usr/bin/env python3
"""Run the verification checks end to end: constants, stability condition,
moment and deviation hypotheses, and an oracle report on a fresh rates run.

Exits nonzero if any check fails.
"""

import sys
import tempfile
from pathlib import Path

from multithresh.cli import main as cli_main


def run() -> int:
    steps = [
        ["check", "constants", "--c", "16", "--K", "1"],
        ["check", "ongle", "--rule", "hard"],
        ["check", "ongle", "--rule", "soft"],
        ["check", "ongle", "--rule", "garrote"],
        ["check", "moment", "--reps", "10000", "--seed", "41"],
        ["check", "deviation", "--reps", "100000", "--seed", "43"],
    ]
    for step in steps:
        print(f"\n$ multithresh {' '.join(step)}")
        code = cli_main(step)
        if code != 0:
            return code
    with tempfile.TemporaryDirectory() as tmp:
        rows = Path(tmp) / "oracle_rows.csv"
        print("\n$ multithresh rates (oracle input, 200 reps at n = 1024)")
        code = cli_main([
            "rates", "--model", "density", "--target", "triangle",
            "--n", "256,512,1024", "--reps", "200", "--seed", "61",
            "--rho", "2.0", "--out", str(rows),
        ])
        if code != 0:
            return code
        print("\n$ multithresh check oracle")
        code = cli_main(["check", "oracle", "--input", str(rows)])
        if code != 0:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(run())
