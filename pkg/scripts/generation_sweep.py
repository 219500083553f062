"""Generation, relation kernel and minimality checks at both levels."""

import argparse

from localunits import suites

if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--primes", type=int, nargs="+", default=[3, 5])
    ap.add_argument("--budget", type=int, default=None, help="largest index to visit")
    args = ap.parse_args()
    log = suites.run_minimality(budget=args.budget, primes=tuple(args.primes))
    print(log.summary_line())
    for k, v in log.notes.items():
        print(f"  {k}: {v}")
    for fail in log.failures[:10]:
        print("  failure:", fail)
