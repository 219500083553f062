"""Depth and leading coefficient of (T - 1)^j on eigenspace samples."""

import argparse

from localunits import suites

if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--i-max", type=int, default=200)
    ap.add_argument("--j-max", type=int, default=25)
    args = ap.parse_args()
    log = suites.run_repeat(i_max=args.i_max, j_max=args.j_max)
    print(log.summary_line())
    for fail in log.failures[:10]:
        print("  failure:", fail)
