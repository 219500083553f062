"""The nine acceptance criteria, each timed against its limit.

Every test appends one PASS/FAIL line to RESULTS; conftest prints them after the
run.  ``python tests/test_acceptance.py`` runs the same checks without pytest.
"""

import io
import json
import time
from contextlib import redirect_stdout

from localunits import suites
from localunits.cli import main as cli_main

RESULTS: list[str] = []


def _report(number: int, title: str, ok: bool, seconds: float, limit: float, detail: str) -> bool:
    passed = ok and seconds < limit
    RESULTS.append(f"{'PASS' if passed else 'FAIL'} [{number}] {title}: {detail}; "
                   f"{seconds:.1f}s (limit {limit:.0f}s)")
    print(RESULTS[-1])
    return passed


def _check_log(number: int, title: str, log: suites.CheckLog, limit: float) -> None:
    detail = f"{log.cases} cases, {log.failed} failed"
    if log.notes:
        detail += f", notes {log.notes}"
    passed = _report(number, title, log.ok, log.seconds, limit, detail)
    assert passed, (log.summary_line(), log.failures[:5])


def test_1_example_tables():
    t0 = time.perf_counter()
    mismatches = []
    for (p, r, i), rows in suites.EXAMPLE_TABLES.items():
        buf = io.StringIO()
        with redirect_stdout(buf):
            code = cli_main(["kappa", "--p", str(p), "--r", str(r), "--i", str(i), "--emit", "json"])
        got = [row["latex"] for row in json.loads(buf.getvalue())["rows"]]
        if code != 0 or len(got) != len(rows):
            mismatches.append((p, r, i, "shape", code, len(got)))
        for m, (g, want) in enumerate(zip(got, rows)):
            if suites.normalize_tex(g) != suites.normalize_tex(want):
                mismatches.append((p, r, i, m, g, want))
    seconds = time.perf_counter() - t0
    n = sum(len(v) for v in suites.EXAMPLE_TABLES.values())
    passed = _report(1, "example kappa tables", not mismatches, seconds, 10,
                     f"{n} rows, {len(mismatches)} mismatches")
    assert passed, mismatches


def test_2_depth_certification():
    _check_log(2, "depths of kappa, alpha, beta up to 300", suites.run_depths(), 600)


def test_3_index_suite():
    _check_log(3, "index functions to 1e5", suites.run_index(), 60)


def test_4_combinatorial_identity():
    _check_log(4, "c = d and d_(p-1,k) = -1", suites.run_identity(), 60)


def test_5_recurexp():
    _check_log(5, "gamma-1 series expansion", suites.run_recurexp(), 60)


def test_6_generator_relations():
    _check_log(6, "generator relations at N >= 3p^2", suites.run_generators(), 120)


def test_7_finite_level():
    _check_log(7, "finite level lemmas and elements", suites.run_finite(), 900)


def test_8_generation_minimality():
    _check_log(8, "generation and minimality", suites.run_minimality(), 1800)


def test_9_nonmembership():
    log = suites.run_nonmembership(trials=200)
    assert log.cases > 0
    _check_log(9, "non-membership, 200 samples per cell", log, 600)


if __name__ == "__main__":
    import sys

    failures = 0
    for name, fn in sorted((k, v) for k, v in dict(globals()).items() if k.startswith("test_")):
        try:
            fn()
        except AssertionError:
            failures += 1
    sys.exit(1 if failures else 0)
