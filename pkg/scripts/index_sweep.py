"""Sweep the index-function invariants and report how often the literal inequality
condition disagrees with the equality test."""

import argparse

from localunits import suites

if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--i-max", type=int, default=10**5)
    ap.add_argument("--primes", type=int, nargs="+", default=[3, 5, 7])
    args = ap.parse_args()
    log = suites.run_index(primes=tuple(args.primes), i_max=args.i_max)
    print(log.summary_line())
    for k, v in log.notes.items():
        print(f"  {k}: {v}")
