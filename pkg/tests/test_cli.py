"""Command line contract: output, JSON and exit codes."""

import json
import subprocess
import sys

import pytest

from localunits.cli import EXIT_EMPTY, EXIT_INVALID, EXIT_MATH, EXIT_OK, main


def run_json(capsys, *argv):
    code = main([*argv, "--emit", "json"])
    return code, json.loads(capsys.readouterr().out)


def test_index_first_example(capsys):
    code, out = run_json(capsys, "index", "--p", "5", "--r", "3", "--i", "11899")
    assert code == EXIT_OK
    assert [row["theta"] for row in out["rows"]] == [2380, 476, 96, 20, 4, 1]  # [PAPER]
    assert out["s"] == 5


def test_index_second_example(capsys):
    code, out = run_json(capsys, "index", "--p", "5", "--r", "5", "--i", "92729")
    assert code == EXIT_OK
    # [PAPER] the printed exponents; the last one is psi'_6 = 0 while theta_6 = 1
    assert [row["psi_prime"] for row in out["rows"]][-1] == 0
    assert [row["theta"] for row in out["rows"]] == [18545, 3709, 741, 148, 29, 5, 1]


@pytest.mark.parametrize("argv", [
    ["index", "--p", "5", "--r", "3", "--i", "4"],  # [TRIVIAL] 4 is not 3 mod 4
    ["index", "--p", "4", "--r", "3", "--i", "7"],
    ["kappa", "--p", "5", "--r", "6", "--i", "6"],
    ["kappa", "--p", "5", "--r", "3"],
    ["gens", "--p", "5", "--r", "3", "--i", "7", "--n", "1"],
    ["kappa", "--p", "5", "--r", "3", "--i", "7", "--m", "9"],
    ["verify", "--suite", "nonsense"],
    ["frobnicate"],
])
def test_invalid_input_exits_2(argv, capsys):
    assert main(argv) == EXIT_INVALID


def test_kappa_single_generator(capsys):
    code, out = run_json(capsys, "kappa", "--p", "5", "--r", "3", "--i", "3")
    assert code == EXIT_OK
    assert [row["text"] for row in out["rows"]] == ["u₃"]  # [TRIVIAL]
    assert out["rows"][0]["depth_ok"]


def test_kappa_finite_level(capsys):
    code, out = run_json(capsys, "kappa", "--p", "3", "--r", "2", "--i", "8", "--n", "2")
    assert code == EXIT_OK and all(row["depth_ok"] for row in out["rows"])  # [DERIVED]


def test_gens(capsys):
    code, out = run_json(capsys, "gens", "--p", "3", "--r", "3", "--i", "29")
    assert code == EXIT_OK and out["check"]["ok"]
    assert out["elements"][-1]["p_power"] == 4  # [DERIVED] ceil(log_3 29)
    code, out = run_json(capsys, "gens", "--p", "5", "--r", "4", "--i", "8", "--n", "2")
    assert code == EXIT_OK and out["size"] <= 3  # [PAPER]
    code, out = run_json(capsys, "gens", "--p", "5", "--r", "3", "--i", "3")
    assert out["size"] == 1  # [TRIVIAL]


def test_verify_budget_zero_is_empty(capsys):
    assert main(["verify", "--suite", "index", "--budget", "0"]) == EXIT_EMPTY  # [TRIVIAL]
    assert "no tests executed" in capsys.readouterr().out


def test_verify_small_budget(capsys):
    code, out = run_json(capsys, "verify", "--suite", "index", "--budget", "2000")
    assert code == EXIT_OK and out["status"] == "PASS" and out["cases"] > 0
    code, out = run_json(capsys, "verify", "--suite", "finite", "--budget", "12", "--p", "3")
    assert code == EXIT_OK and out["cases"] > 0


def test_verify_failure_exit_code(monkeypatch, capsys):
    from localunits import suites

    def broken(name, budget=None, primes=None):
        log = suites.CheckLog(name)
        log.record(False, reason="forced")
        return [log]

    monkeypatch.setattr(suites, "run_suite", broken)
    assert main(["verify", "--suite", "index"]) == EXIT_MATH


def test_output_is_deterministic(capsys):
    argv = ["kappa", "--p", "3", "--r", "3", "--i", "41", "--f", "2", "--emit", "json"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first
    data = json.loads(first)
    assert {"params", "evaluated", "rows"} <= set(data)
    assert all({"m", "text", "latex", "class", "depth_ok"} <= set(row) for row in data["rows"])


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "localunits.cli", "index", "--p", "5", "--r", "3", "--i", "4"],
                          capture_output=True, text=True)
    assert proc.returncode == EXIT_INVALID and "error" in proc.stderr
