"""Finite-level lemmas, elements and the n = 2 minimality check."""

from localunits import suites

if __name__ == "__main__":
    for log in (suites.run_finite(), suites.run_finite_minimality()):
        print(log.summary_line())
        for k, v in log.notes.items():
            print(f"  {k}: {v}")
        for fail in log.failures[:10]:
            print("  failure:", fail)
