"""Command line interface: index tables, kappa elements, generating sets, verification suites.

Exit codes: 0 pass, 2 invalid input, 3 a mathematical check failed, 4 nothing was run.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass

from .finlevel import FiniteLevel, gen_set_fin_symbolic, generation_check_n, kappa_n_symbolic, mu_shift
from .indexfn import IndexDomainError, IndexParams, is_prime
from .inflevel import GenerationChecker, InfiniteLevel, gen_set_symbolic, generation_check
from . import suites

EXIT_OK, EXIT_INVALID, EXIT_MATH, EXIT_EMPTY = 0, 2, 3, 4

# above these indices the default run prints symbols only; --prec-lambda forces evaluation
VERIFY_CAP_INFINITE = 400
GENS_CAP_INFINITE = 250
VERIFY_CAP_FINITE = 200


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    p: int | None = None
    f: int = 1
    r: int | None = None
    i: int | None = None
    n: int | None = None
    m: int | None = None
    prec_lambda: int | None = None
    prec_p: int | None = None
    seed: int = 0
    emit: str = "text"
    suite: str = "all"
    budget: int | None = None

    def need(self, *names: str) -> None:
        missing = [f"--{x.replace('_', '-')}" for x in names if getattr(self, x) is None]
        if missing:
            raise ConfigError(f"{self.command} needs {', '.join(missing)}")

    def validate(self) -> None:
        if self.p is not None and (self.p < 3 or not is_prime(self.p)):
            raise ConfigError(f"--p must be an odd prime, got {self.p}")
        if self.f < 1:
            raise ConfigError(f"--f must be positive, got {self.f}")
        if self.command in ("index", "kappa", "gens"):
            self.need("p", "r", "i")
            ix = IndexParams(self.p, self.r)
            ix.check_i(self.i)
        if self.n is not None and self.n < 2:
            raise ConfigError(f"--n must be at least 2, got {self.n}")
        if self.m is not None and self.m < 0:
            raise ConfigError(f"--m must be nonnegative, got {self.m}")
        for name in ("prec_lambda", "prec_p"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ConfigError(f"--{name.replace('_', '-')} must be positive")
        if self.budget is not None and self.budget < 0:
            raise ConfigError("--budget must be nonnegative")
        if self.command == "verify" and self.suite not in suites.SUITE_NAMES + ("all",):
            raise ConfigError(f"unknown suite {self.suite!r}")

    @property
    def ix(self) -> IndexParams:
        return IndexParams(self.p, self.r)


# ---------------------------------------------------------------------------
# output helpers


def _emit(cfg: RunConfig, payload: dict, text: str) -> None:
    if cfg.emit == "json":
        print(json.dumps(payload, indent=2, default=str))
    else:
        print(text)


def _header(cfg: RunConfig) -> dict:
    return {k: v for k, v in asdict(cfg).items() if v is not None and k not in ("emit", "suite", "budget")}


# ---------------------------------------------------------------------------
# index


def index_rows(ix: IndexParams, i: int, max_m: int) -> list[dict]:
    rows = []
    for m in range(max_m + 1):
        try:
            sigma = ix.sigma(m, i)
        except IndexDomainError:
            sigma = None
        rows.append({"m": m, "theta": ix.theta_m(m, i), "psi_prime": ix.psi_prime_m(m, i), "sigma": sigma,
                     "epsilon": ix.epsilon_m(m, i), "a": ix.a_coeff(m, i), "case": ix.kappa_case(m, i)})
    return rows


def cmd_index(cfg: RunConfig) -> int:
    ix, i = cfg.ix, cfg.i
    s = ix.s_of(i)
    max_m = s if cfg.m is None else cfg.m
    rows = index_rows(ix, i, max_m)
    lines = [f"p={ix.p} r={ix.r} i={i} s={s}",
             f"{'m':>3} {'theta':>10} {'psi_prime':>10} {'sigma':>6} {'eps':>4} {'a':>3}  case"]
    for row in rows:
        sig = "-" if row["sigma"] is None else row["sigma"]
        lines.append(f"{row['m']:>3} {row['theta']:>10} {row['psi_prime']:>10} {sig:>6} "
                     f"{row['epsilon']:>4} {row['a']:>3}  {row['case']}")
    _emit(cfg, {"params": _header(cfg), "s": s, "rows": rows}, "\n".join(lines))
    return EXIT_OK


# ---------------------------------------------------------------------------
# kappa


def _finite_level(cfg: RunConfig, top: int) -> FiniteLevel:
    p, n = cfg.p, cfg.n
    e = p ** (n - 1) * (p - 1)
    M = cfg.prec_lambda or (top + e + 3 * p)
    if cfg.prec_p:
        M = max(M, cfg.prec_p * e)
    return FiniteLevel(p, cfg.f, cfg.r, n, M=M)


def _infinite_level(cfg: RunConfig, top: int) -> InfiniteLevel:
    return InfiniteLevel(cfg.p, cfg.f, cfg.r, N=cfg.prec_lambda or (top + 2 * cfg.p + 4), K=cfg.prec_p)


def _should_evaluate(cfg: RunConfig, cap: int) -> bool:
    return cfg.prec_lambda is not None or cfg.i <= cap


def cmd_kappa(cfg: RunConfig) -> int:
    ix, i = cfg.ix, cfg.i
    if cfg.n is None:
        syms = suites.kappa_table(ix.p, ix.r, i)
        cap = VERIFY_CAP_INFINITE
    else:
        mu, i0 = mu_shift(ix, cfg.n, i)
        syms = [kappa_n_symbolic(ix, cfg.n, m, i0).scaled(mu) for m in range(ix.s_of(i0) + 1)]
        cap = VERIFY_CAP_FINITE
    if cfg.m is not None:
        if cfg.m >= len(syms):
            raise ConfigError(f"--m {cfg.m} exceeds s = {len(syms) - 1}")
        selected = [(cfg.m, syms[cfg.m])]
    else:
        selected = list(enumerate(syms))
    evaluate = _should_evaluate(cfg, cap)
    level = None
    if evaluate:
        level = _finite_level(cfg, i) if cfg.n is not None else _infinite_level(cfg, i)
    rows, failed = [], False
    for m, sym in selected:
        row = {"m": m, "text": sym.unicode(), "latex": sym.latex()}
        if evaluate:
            cls = level.classify(level.evaluate(sym))
            row["class"] = str(cls)
            row["depth_ok"] = cls.depth_at_least(i)
            failed |= not row["depth_ok"]
        rows.append(row)
    name = "κ" if cfg.n is None else f"κ_{cfg.n},"
    lines = [f"p={ix.p} f={cfg.f} r={ix.r} i={i}" + (f" n={cfg.n}" if cfg.n else "")]
    for row in rows:
        tail = ""
        if "class" in row:
            tail = f"    [{row['class']}, depth >= {i}: {'ok' if row['depth_ok'] else 'FAIL'}]"
        lines.append(f"{name}{row['m']} = {row['text']}{tail}")
    if not evaluate:
        lines.append(f"(depths not evaluated for i > {cap}; pass --prec-lambda to force)")
    _emit(cfg, {"params": _header(cfg), "evaluated": evaluate, "rows": rows}, "\n".join(lines))
    return EXIT_MATH if failed else EXIT_OK


# ---------------------------------------------------------------------------
# gens


def cmd_gens(cfg: RunConfig) -> int:
    ix, i = cfg.ix, cfg.i
    finite = cfg.n is not None
    syms = gen_set_fin_symbolic(ix, cfg.n, i) if finite else gen_set_symbolic(ix, i)
    payload = {"params": _header(cfg), "size": len(syms), "elements": [s.to_json() for s in syms]}
    lines = [f"p={ix.p} f={cfg.f} r={ix.r} i={i}" + (f" n={cfg.n}" if finite else "") + f"  |S| = {len(syms)}"]
    lines += [f"  {s.unicode()}" for s in syms]
    cap = VERIFY_CAP_FINITE if finite else GENS_CAP_INFINITE
    code = EXIT_OK
    if _should_evaluate(cfg, cap):
        if finite:
            level = _finite_level(cfg, i)
            rep = generation_check_n(level, GenerationChecker(level, i), i)
            ok = (rep["generates"] and rep["inside_V_i"] and rep["cocardinality_ok"] and rep["size_ok"]
                  and rep.get("kappas_all_needed", True) and rep.get("w_rule_ok", True))
        else:
            level = _infinite_level(cfg, i)
            rep = generation_check(level, GenerationChecker(level, i + 1), i)
            ok = rep["ok"]
        payload["check"] = rep
        lines.append("check: " + ", ".join(f"{k}={v}" for k, v in rep.items() if k not in ("i", "n")))
        lines.append("verdict: " + ("PASS" if ok else "FAIL"))
        code = EXIT_OK if ok else EXIT_MATH
    else:
        lines.append(f"(generation not checked for i > {cap}; pass --prec-lambda to force)")
    _emit(cfg, payload, "\n".join(lines))
    return code


# ---------------------------------------------------------------------------
# verify


def cmd_verify(cfg: RunConfig) -> int:
    names = suites.SUITE_NAMES if cfg.suite == "all" else (cfg.suite,)
    primes = None if cfg.p is None else (cfg.p,)
    logs = []
    for name in names:
        logs.extend(suites.run_suite(name, budget=cfg.budget, primes=primes))
    total = sum(log.cases for log in logs)
    failed = sum(log.failed for log in logs)
    if total == 0:
        status, code = "no tests executed", EXIT_EMPTY
    elif failed:
        status, code = "FAIL", EXIT_MATH
    else:
        status, code = "PASS", EXIT_OK
    lines = [log.summary_line() for log in logs]
    for log in logs:
        for fail in log.failures[:3]:
            lines.append(f"  {log.name}: {fail}")
        for k, v in log.notes.items():
            lines.append(f"  note {log.name}.{k} = {v}")
    lines.append(f"{status}: {total} cases, {failed} failed")
    payload = {"params": _header(cfg), "suite": cfg.suite, "budget": cfg.budget, "status": status,
               "cases": total, "failed": failed, "logs": [log.to_json() for log in logs]}
    _emit(cfg, payload, "\n".join(lines))
    return code


# ---------------------------------------------------------------------------


COMMANDS = {"index": cmd_index, "kappa": cmd_kappa, "gens": cmd_gens, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, help="odd prime")
    common.add_argument("--f", type=int, default=1, help="residue degree of the unramified part")
    common.add_argument("--r", type=int, help="eigenspace index, 2 <= r <= p")
    common.add_argument("--i", type=int, help="filtration index, i = r mod p-1")
    common.add_argument("--n", type=int, help="finite level n >= 2 (omit for the infinite level)")
    common.add_argument("--m", type=int, help="single m (kappa) or largest m (index)")
    common.add_argument("--prec-lambda", type=int, help="lambda-adic precision; forces evaluation")
    common.add_argument("--prec-p", type=int, help="p-adic precision of coefficients")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--emit", choices=("text", "json"), default="text")
    parser = argparse.ArgumentParser(prog="localunits", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("index", parents=[common], help="index function table for (p, r, i)")
    sub.add_parser("kappa", parents=[common], help="the elements kappa_{m,i} with depth checks")
    sub.add_parser("gens", parents=[common], help="generating set of V_i with a generation check")
    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("--suite", default="all", choices=suites.SUITE_NAMES + ("all",))
    v.add_argument("--budget", type=int, help="largest index swept (0 runs nothing)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    cfg = RunConfig(**vars(args))
    try:
        cfg.validate()
        return COMMANDS[cfg.command](cfg)
    except (ConfigError, IndexDomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
