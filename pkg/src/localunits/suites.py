"""Verification sweeps shared by the CLI ``verify`` command and the acceptance tests.

Each ``run_*`` function returns a :class:`CheckLog`.  A log passes when at
least one case ran and none failed; an empty log is reported separately so
that a zero budget is never mistaken for a pass.  ``budget`` caps the index
(i, t or depth) of every sweep it applies to.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

import numpy as np

from . import indexfn as ixf
from .finlevel import (FiniteLevel, FnRing, FnUnit, LevelStep, generation_check_n,
                       make_generators_n, relation_kernel_n)
from .groupring import vartheta
from .indexfn import IndexParams
from .inflevel import (GenerationChecker, InfiniteLevel, c_coeff, d_coeff, generation_check,
                       kappa_symbolic, recurexp_check, relation_kernel)
from .normfield import NormField

MAX_STORED_FAILURES = 20


@dataclass
class CheckLog:
    name: str
    cases: int = 0
    failed: int = 0
    failures: list = field(default_factory=list)
    seconds: float = 0.0
    notes: dict = field(default_factory=dict)

    def record(self, ok: bool, **info) -> bool:
        self.cases += 1
        if not ok:
            self.failed += 1
            if len(self.failures) < MAX_STORED_FAILURES:
                self.failures.append(info)
        return ok

    def bulk(self, ok_mask, **info) -> None:
        """Record a vector of outcomes; stores the first few failing positions."""
        ok_mask = np.asarray(ok_mask, dtype=bool)
        self.cases += int(ok_mask.size)
        bad = np.flatnonzero(~ok_mask)
        self.failed += int(bad.size)
        for k in bad[: max(0, MAX_STORED_FAILURES - len(self.failures))]:
            self.failures.append({**info, "position": int(k)})

    def merge(self, other: "CheckLog") -> None:
        self.cases += other.cases
        self.failed += other.failed
        room = MAX_STORED_FAILURES - len(self.failures)
        self.failures.extend(other.failures[: max(0, room)])
        self.notes.update({f"{other.name}.{k}": v for k, v in other.notes.items()})

    @property
    def empty(self) -> bool:
        return self.cases == 0

    @property
    def ok(self) -> bool:
        return self.cases > 0 and self.failed == 0

    def summary_line(self) -> str:
        if self.empty:
            state = "EMPTY"
        else:
            state = "PASS" if self.ok else "FAIL"
        return f"{state} {self.name}: {self.cases} cases, {self.failed} failed, {self.seconds:.1f}s"

    def to_json(self) -> dict:
        return {"name": self.name, "ok": self.ok, "empty": self.empty, "cases": self.cases,
                "failed": self.failed, "failures": self.failures, "seconds": round(self.seconds, 3),
                "notes": self.notes}


class _timed:
    def __init__(self, log: CheckLog):
        self.log = log

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self.log

    def __exit__(self, *exc):
        self.log.seconds += time.perf_counter() - self.t0
        return False


def _cap(default: int, budget: int | None) -> int:
    return default if budget is None else min(default, budget)


# ---------------------------------------------------------------------------
# 1. worked examples


EXAMPLE_TABLES = {
    (5, 3, 11899): [
        r"T^{2380} u_3",
        r"\rho T^{476} u_3",
        r"(\rho^2 T^{95} - \rho T^{475} - T^{2379})u_3",
        r"(\rho^3 T^{19} - \rho^2 T^{95}) u_3",
        r"\rho^4 T^4 u_3",
        r"(\rho^5 - \rho^4 T^3 - \rho^3T^{19})u_3",
    ],
    (5, 5, 92729): [
        r"T^{18545} u_5",
        r"(\rho T^{3708} - T^{18544})u_5",
        r"\rho^2 T^{741} u_5",
        r"(\rho^3 T^{147} - \rho^2 T^{740} - \rho T^{3708})u_5",
        r"\rho^4 T^{29} u_5",
        r"(\rho^5 T^4 + \rho^4 T^{28})u_5 + \rho^7 w",
        r"\rho^6 u_5 + \rho^7 w",
    ],
}


def normalize_tex(s: str) -> str:
    for tok in (r"\left", r"\right", "{", "}", " "):
        s = s.replace(tok, "")
    return s


def kappa_table(p: int, r: int, i: int) -> list:
    ix = IndexParams(p, r)
    ix.check_i(i)
    return [kappa_symbolic(ix, m, i) for m in range(ix.s_of(i) + 1)]


def run_examples() -> CheckLog:
    log = CheckLog("examples")
    with _timed(log):
        for (p, r, i), rows in EXAMPLE_TABLES.items():
            got = kappa_table(p, r, i)
            log.record(len(got) == len(rows), p=p, r=r, i=i, reason="row count", got=len(got))
            for m, (sym, want) in enumerate(zip(got, rows)):
                log.record(normalize_tex(sym.latex()) == normalize_tex(want),
                           p=p, r=r, i=i, m=m, got=sym.latex(), want=want)
    return log


# ---------------------------------------------------------------------------
# 2. depths of alpha, beta, kappa at the infinite level


def run_depths(primes=(3, 5), fields=(1, 2), i_max: int = 300, budget: int | None = None) -> CheckLog:
    log = CheckLog("depths")
    i_max = _cap(i_max, budget)
    if i_max < 2:
        return log
    with _timed(log):
        for p in primes:
            for f in fields:
                for r in range(2, p + 1):
                    lev = InfiniteLevel(p, f, r, N=i_max + 2 * p + 4)
                    ix, xi = lev.ix, tuple(lev.xi)
                    neg = tuple(lev.field.fq.neg(lev.xi))
                    for i in range(r, i_max + 1, p - 1):
                        for m in range(ix.s_of(i) + 1):
                            _, z = lev.kappa(m, i)
                            cls = lev.classify(z)
                            log.record(cls.depth_at_least(i), kind="kappa", p=p, f=f, r=r, m=m, i=i,
                                       got=str(cls))
                    for m in range(ixf.ilog_ceil(p, i_max + 1) + 1):
                        for j in range(i_max + 1):
                            d = ix.phi_m(m, j)
                            if d > i_max:
                                break
                            _, z = lev.alpha(m, j)
                            cls = lev.classify(z)
                            log.record((cls.depth, cls.leading) == (d, xi), kind="alpha", p=p, f=f, r=r,
                                       m=m, j=j, want=d, got=str(cls))
                    if r == p:
                        for m in range(ixf.ilog_ceil(p, i_max + 1) + 1):
                            for l in range(ixf.ilog_ceil(p, i_max + 1) + 1):
                                d = ix.phi_prime_m(m, p**l - 1)
                                if d > i_max:
                                    break
                                _, z = lev.beta(m, l)
                                cls = lev.classify(z)
                                log.record((cls.depth, cls.leading) == (d, neg), kind="beta", p=p, f=f,
                                           m=m, l=l, want=d, got=str(cls))
    return log


# ---------------------------------------------------------------------------
# 3. index functions


def _index_one(ix: IndexParams, i_max: int, m_max: int, log: CheckLog) -> None:
    p, r = ix.p, ix.r
    tag = {"p": p, "r": r}
    a = np.arange(1, i_max + 1, dtype=np.int64)
    i = np.arange(r, i_max + 1, p - 1, dtype=np.int64)
    for m in range(m_max + 1):
        # Galois connection: psi_m(a) is the least j with phi_m(j) >= a
        jmax = i_max // p**m + 3
        j = np.arange(0, jmax + 1, dtype=np.int64)
        for name, phi_f, psi_f in (("phipsilem", ixf.phi_m_vec, ixf.psi_m_vec),
                                   ("phipsiprime", ixf.phi_prime_m_vec, ixf.psi_prime_m_vec)):
            ph = phi_f(ix, m, j)
            log.bulk(np.diff(ph) > 0, check=name + ".monotone", m=m, **tag)
            log.bulk(psi_f(ix, m, ph) == j, check=name + ".inverse", m=m, **tag)
            least = np.searchsorted(ph, a, side="left")
            log.bulk(psi_f(ix, m, a) == least, check=name + ".connection", m=m, **tag)
        if m >= 1:
            th, th_prev = ixf.theta_m_vec(ix, m, i), ixf.theta_m_vec(ix, m - 1, i)
            log.bulk((th < 1) | (th_prev >= th + 2), check="thetaineq", m=m, **tag)
        ps, ps_next = ixf.psi_prime_m_vec(ix, m, i), ixf.psi_prime_m_vec(ix, m + 1, i)
        log.bulk((ps >= ps_next) & ((ps == ps_next) == (ps == 0)), check="psiineq", m=m, **tag)
        if m >= 1:
            for k in range(1, m + 1):
                phk = ixf.phi_prime_m_vec(ix, k - 1, ps)
                lhs, rhs = phk - ix.delta, ixf.theta_m_vec(ix, m - k, i) - 1
                eq = lhs == rhs
                log.bulk(lhs >= rhs, check="ineqcond.inequality", m=m, k=k, **tag)
                log.bulk(eq == (p ** (m - k + 1) * phk < i), check="inequality.equivcond", m=m, k=k, **tag)
                log.bulk(eq == ixf.ineqcond_predicts_equality_vec(ix, m, k, i),
                         check="ineqcond.equality", m=m, k=k, **tag)
                literal = int((eq != ixf.ineqcond_conditions_vec(ix, m, k, i)).sum())
                log.notes["ineqcond_literal_disagreements"] = \
                    log.notes.get("ineqcond_literal_disagreements", 0) + literal
        # psi_m(i) >= theta_m(i) - 1, equality iff p^m phi(psi_m(i)) < i; primed away from p^l - 1
        th = ixf.theta_m_vec(ix, m, i)
        psu = ixf.psi_m_vec(ix, m, i)
        log.bulk((psu >= th - 1) & ((psu < th) == (p**m * ixf.phi_vec(ix, psu) < i)),
                 check="inequality.unprimed", m=m, **tag)
        log.bulk(ps >= th - 1, check="inequality.primed", m=m, **tag)
        if m >= 1:
            generic = ixf._power_level_vec(p, ps + 1) < 0 if r == p else np.ones(i.shape, dtype=bool)
            pred = ixf.ineqcond_predicts_equality_vec(ix, m, 1, i)
            log.bulk(~generic | ((ps == th - 1) == pred), check="ineqcond.psi_theta", m=m, **tag)
            special = int(((ps == th - 1) != pred)[~generic].sum())
            log.notes["psi_theta_special_disagreements"] = \
                log.notes.get("psi_theta_special_disagreements", 0) + special
        # sigma(m, i) >= k iff p^(m-k) does not divide i_k, for k < m
        if m >= 1:
            im = ixf.i_ceil_vec(ix, m, i)
            defined = i % p**m != 0
            gap = p**m * im - i
            for k in range(m):
                ik = ixf.i_ceil_vec(ix, k, i)
                lhs = gap >= p**k
                rhs = ik % p ** (m - k) != 0
                log.bulk(~defined | (lhs == rhs), check="sigma_remark", m=m, k=k, **tag)
    # phi(psi(a)) trichotomy
    ps = ixf.psi_vec(ix, a)
    ang = ixf.angle_vec(ix, a, r)
    plain = (ang % p != p - 1) | ((r == p - 1) & (a <= r))
    want = np.where(plain, ang, ang + p - 1)
    log.bulk(ixf.phi_vec(ix, ps) == want, check="phipsi", **tag)
    # theta_k(i) <= p^(n-k-1) for i <= p^n
    n = 1
    while p**n <= i_max:
        sub = i[i <= p**n]
        for k in range(n):
            log.bulk(ixf.theta_m_vec(ix, k, sub) <= p ** (n - k - 1), check="thetamax", n=n, k=k, **tag)
        n += 1


def _index_crosscheck(ix: IndexParams, i_max: int, m_max: int, log: CheckLog, samples: int = 300) -> None:
    """The numpy sweeps agree with the scalar reference implementations."""
    rng = random.Random(ix.p * 100 + ix.r)
    for _ in range(samples):
        m = rng.randrange(m_max + 1)
        i = ix.r + (ix.p - 1) * rng.randrange((i_max - ix.r) // (ix.p - 1) + 1)
        arr = np.array([i], dtype=np.int64)
        ok = (int(ixf.theta_m_vec(ix, m, arr)[0]) == ix.theta_m(m, i)
              and int(ixf.psi_prime_m_vec(ix, m, arr)[0]) == ix.psi_prime_m(m, i)
              and int(ixf.phi_prime_m_vec(ix, m, arr)[0]) == ix.phi_prime_m(m, i)
              and int(ixf.psi_m_vec(ix, m, arr)[0]) == ix.psi_m(m, i))
        if m >= 1:
            k = rng.randrange(1, m + 1)
            ok = ok and bool(ixf.ineqcond_conditions_vec(ix, m, k, arr)[0]) == ix.ineqcond_conditions(m, k, i)
        log.record(ok, check="vec_vs_scalar", p=ix.p, r=ix.r, m=m, i=i)


def run_index(primes=(3, 5, 7), i_max: int = 10**5, m_max: int = 8, budget: int | None = None) -> CheckLog:
    log = CheckLog("index")
    i_max = _cap(i_max, budget)
    if i_max < 2:
        return log
    with _timed(log):
        for p in primes:
            for r in range(2, p + 1):
                ix = IndexParams(p, r)
                if r > i_max:
                    continue
                _index_one(ix, i_max, m_max, log)
                _index_crosscheck(ix, i_max, m_max, log)
    return log


# ---------------------------------------------------------------------------
# 4, 5. combinatorial identity and the series expansion


def run_identity(primes=(3, 5, 7, 11, 13)) -> CheckLog:
    log = CheckLog("identity")
    with _timed(log):
        for p in primes:
            for j in range(1, p):
                for k in range(1, j + 1):
                    c, d = c_coeff(j, k, p), d_coeff(j, k, p)
                    log.record(c == d, p=p, j=j, k=k, c=c, d=d)
            for k in range(1, p):
                log.record(d_coeff(p - 1, k, p) == p - 1, p=p, k=k, reason="d_{p-1,k} != -1")
    return log


def run_recurexp(primes=(3, 5), fields=(1, 2)) -> CheckLog:
    log = CheckLog("recurexp")
    with _timed(log):
        for p in primes:
            for f in fields:
                F = NormField(p, f, p * p + p + 2)
                for j in range(1, p):
                    rep = recurexp_check(F, j)
                    log.record(bool(rep["ok"]), p=p, f=f, j=j, report=str(rep))
    return log


def run_repeat(primes=(3, 5), fields=(1, 2), i_max: int = 200, j_max: int = 25,
               budget: int | None = None) -> CheckLog:
    """T^j z for an eigenspace sample z in V_i(xi): depth phi^(i)(j) and the predicted leading term."""
    log = CheckLog("repeat")
    i_max = _cap(i_max, budget)
    with _timed(log):
        for p in primes:
            ix = IndexParams(p, 2)
            fact = [1]
            for k in range(1, p):
                fact.append(fact[-1] * k % p)
            for f in fields:
                F = NormField(p, f, p * j_max + i_max + 2 * p + 2)
                for i in range(2, i_max + 1):
                    if i % p == 0:
                        continue
                    z = F.sample_element(i, F.xi, 2 + (i - 2) % (p - 1), seed=i)
                    b = ix.bracket(i)
                    for j in range(1, j_max + 1):
                        z = z.act_T()
                        cls = F.classify(z)
                        lead = F.fq.scale(fact[b] * pow(fact[ix.braces(b - j)], -1, p), F.xi)
                        log.record((cls.depth, cls.leading) == (ix.phi_i(i, j), lead),
                                   p=p, f=f, i=i, j=j, got=str(cls))
    return log


# ---------------------------------------------------------------------------
# 6. generators of the infinite-level module


def run_generators(primes=(3, 5), fields=(1, 2)) -> CheckLog:
    log = CheckLog("generators")
    with _timed(log):
        for p in primes:
            for f in fields:
                N = max(3 * p * p, 4 * p)
                for r in range(2, p + 1):
                    lev = InfiniteLevel(p, f, r, N=N)
                    g, F = lev.gens, lev.field
                    for name, res in g.certificates.items():
                        log.record(res is None, p=p, f=f, r=r, relation=name, residual=res)
                    cls = F.classify(g.u, r)
                    log.record((cls.depth, tuple(cls.leading)) == (r, tuple(F.xi)), p=p, f=f, r=r,
                               relation="u leading", got=str(cls))
                    if r == p:
                        neg = tuple(F.fq.neg(F.xi))
                        cls = F.classify(g.w, 1)
                        log.record((cls.depth, tuple(cls.leading)) == (1, neg), p=p, f=f,
                                   relation="w in V_1(-xi)", got=str(cls))
                        cls = F.classify(g.y, p)
                        log.record((cls.depth, tuple(cls.leading)) == (2 * p - 1, neg), p=p, f=f,
                                   relation="y in V_{2p-1}(-xi)", got=str(cls))
    return log


# ---------------------------------------------------------------------------
# 7. finite level


def _rand_eta(rng: random.Random, p: int, f: int) -> tuple:
    while True:
        eta = tuple(rng.randrange(p) for _ in range(f))
        if any(eta):
            return eta


def _finite_lemmas(p: int, f: int, budget: int | None, log: CheckLog, seed: int) -> None:
    """Trace, norm, power and p-th root facts between levels 2 and 3."""
    n, K = 2, 4
    L, U = FnRing(p, f, n, K), FnRing(p, f, n + 1, K)
    S = LevelStep(L, U)
    fq, pn, e = L.fq, p**n, L.e
    rng = random.Random(seed)
    tag = {"p": p, "f": f}
    # trace mod p^3
    for k in range(1, _cap(p * p, budget) + 1):
        for eps in (0, 1):
            tr = S.trace_arr(U.lam_power(p * k - eps))
            want = p * L.lam_power(k - eps) % L.mod
            log.record(not ((tr - want) % p**3).any(), lemma="trace", k=k, eps=eps, **tag)
    # norms of 1 + eta lambda^t, all three cases
    for t in range(1, _cap(pn + 2 * p, budget) + 1):
        eta = _rand_eta(rng, p, f)
        lift = np.array(eta) + p * np.array([rng.randrange(p) for _ in range(f)])
        N = S.norm(U.binomial(lift, t))
        if t < pn - 1:
            cls = L.classify(N)
            ok = cls.depth == t and L.coeff_at(N, t) == fq.frobenius(eta, 1)
            case = "small"
        elif t in (pn - 1, pn):
            ok = L.coeff_at(N, t) == fq.sub(fq.frobenius(eta, 1), eta)
            case = "middle"
        elif t % p in (0, p - 1):
            eps = 0 if t % p == 0 else 1
            k = (t + eps) // p
            ok = L.coeff_at(N, e + k - eps) == fq.neg(eta)
            d = N.depth()
            ok = ok and (d is None or d >= e + k - eps)
            case = "large"
        else:
            d = N.depth()
            ok = d is None or d >= e + t // p
            case = "large, other residue"
        log.record(ok, lemma="normelt", case=case, t=t, **tag)
    # p-th power sign law for i > p^(n-1)
    for r in range(2, p + 1):
        for i in range(p ** (n - 1) + 1, _cap(L.M - e - p, budget)):
            if (i - r) % (p - 1):
                continue
            eta = _rand_eta(rng, p, f)
            cls = L.classify(L.sample_element(i, eta, r, seed=i) ** p)
            log.record((cls.depth, cls.leading) == (i + e, fq.neg(eta)), lemma="power", r=r, i=i, **tag)
    # norm images per eigenspace: inclusion, and equality for t >= 0
    for t in range(-1, 2 * p + 1):
        if budget is not None and pn + t > budget:
            break
        for r in range(2, p + 1):
            if (pn + t - r) % (p - 1):
                continue
            bound = pn + t - (p - 1) * ((t + 1) // p)
            while (bound - r) % (p - 1):
                bound += 1
            depths = [S.norm(U.sample_element(pn + t, _rand_eta(rng, p, f), r, seed=100 * t + s)).depth()
                      for s in range(6)]
            ok = min(depths) >= bound and (t < 0 or min(depths) == bound)
            log.record(ok, lemma="normlem", t=t, r=r, bound=bound, depths=depths, **tag)
    # leading coefficients of norms of eigenspace elements
    for r in range(2, p + 1):
        for i in range(r, _cap(pn + 3 * p * p, budget) + 1, p - 1):
            if i >= pn and i != pn - 1 and (i - pn) % p != p - 1:
                continue
            eta = _rand_eta(rng, p, f)
            N = S.norm(U.sample_element(i, eta, r, seed=i))
            if i < pn - 1:
                want = (i, fq.frobenius(eta, 1))
            elif i == pn - 1:
                want = (i, fq.sub(fq.frobenius(eta, 1), eta))
            else:
                want = (pn + (i + 1 - pn) // p - 1, fq.neg(eta))
            if want[1] == fq.zero:
                d = N.depth()
                ok = d is None or d > want[0]
            else:
                cls = L.classify(N)
                ok = (cls.depth, cls.leading) == want
            log.record(ok, lemma="normcor", r=r, i=i, **tag)
    # the unit v twisted by 1 + b phi^(n-2) (1 - phi) is never a p-th power
    if budget is None or budget >= e:
        v = make_generators_n(L, p - 1).v
        for s in range(10):
            b = [rng.randrange(p**3) for _ in range(f)]
            z = v
            for k, bk in enumerate(b):
                z = z * v.act_phi(k + n - 2).zp_pow(bk) * v.act_phi(k + n - 1).zp_pow(-bk)
            log.record(L.pth_root(z) is None, lemma="v not a p-th power", b=b, **tag)
        x = L.sample_element(p + 1, _rand_eta(rng, p, f), None, seed=seed)
        root = L.pth_root(x**p)
        log.record(root is not None and L.classify(root**p / x**p).beyond, lemma="pth_root of a p-th power", **tag)
        log.record(L.pth_root(L.zeta()) is None, lemma="zeta has no p-th root", **tag)


def _norm_tower(f: int, log: CheckLog) -> None:
    p, K = 3, 3
    R2, R3, R4 = (FnRing(p, f, n, K) for n in (2, 3, 4))
    S32, S43 = LevelStep(R2, R3), LevelStep(R3, R4)
    for seed in range(3):
        z = R4.sample_element(5, (1,) + (0,) * (f - 1), None, seed=seed)
        composite = S32.norm(S43.norm(z))
        prod = R4.one()
        for g in [pow(1 + p**2, k, p**4) for k in range(p * p)]:
            prod = prod * (z if g == 1 else z._subst(g))
        direct = FnUnit(R2, 0, S32.descend(S43.descend(prod.arr)))
        log.record((composite / direct).depth() is None, lemma="norm tower", f=f, seed=seed)


def _finite_elements(p: int, f: int, n: int, budget: int | None, log: CheckLog) -> None:
    """Level-n generators, alpha, beta, omega and kappa depths."""
    pn, e = p**n, p ** (n - 1) * (p - 1)
    top = _cap(pn, budget)
    for r in range(2, p + 1):
        lev = FiniteLevel(p, f, r, n, M=pn + e + 3 * p)
        R, ix, g = lev.field, lev.ix, lev.gens
        fq, xi = R.fq, tuple(R.xi)
        tag = {"p": p, "f": f, "n": n, "r": r}
        for name, res in g.certificates.items():
            ok = res is True if name == "v_is_1_plus_p_xi_mod_p2" else res is None
            log.record(ok, check="presfin", relation=name, residual=res, **tag)
        cls = R.classify(g.u, r)
        log.record((cls.depth, cls.leading) == (min(r, p), xi), check="u leading", got=str(cls), **tag)
        if r == p:
            cls = R.classify(g.w, 1)
            log.record((cls.depth, cls.leading) == (1, fq.neg(xi)), check="w leading", got=str(cls), **tag)
        for m in range(n + 1):
            for j in range(pn):
                d = ix.phi_m(m, j)
                if d >= pn - 1 or d > top:
                    break
                _, z = lev.alpha(m, j)
                cls = lev.classify(z)
                log.record((cls.depth, cls.leading) == (d, xi), check="alpha", m=m, j=j, got=str(cls), **tag)
        if r == p:
            for m in range(n + 1):
                for l in range(n + 1):
                    if ix.phi_m(m, p**l - 1) > pn:
                        break
                    if (m, l) == (0, n - 1):
                        want = (pn, fq.frobenius(xi, f - 1))
                    else:
                        want = (ix.phi_prime_m(m, p**l - 1), fq.neg(xi))
                    if want[0] > top:
                        continue
                    _, z = lev.beta(m, l)
                    cls = lev.classify(z)
                    log.record((cls.depth, cls.leading) == want, check="beta", m=m, l=l, got=str(cls), **tag)
        if r == p - 1:
            for m in range(n - 1):
                for l in range(m + 1):
                    if l == m:
                        want = (e + p ** (m + 1) - 1, xi)
                    else:
                        vt = vartheta(n - m, l + 1, f, p, R.K)
                        if vt.divisible_by_p():
                            want = (e + p ** (m + 1) - p ** (m - l - 1), xi)
                        else:
                            lead = fq.zero
                            for k, c in enumerate(vt.coeffs):
                                lead = fq.add(lead, fq.scale(c % p, fq.frobenius(xi, k)))
                            want = (e + p ** (m + 1) - p ** (m - l), lead)
                    if budget is not None and want[0] > budget:
                        continue
                    _, z = lev.omega(m, l)
                    cls = lev.classify(z)
                    log.record((cls.depth, cls.leading) == want, check="omega", m=m, l=l, got=str(cls), **tag)
        for i in range(r, top + 1, p - 1):
            for m in range(ix.s_of(i) + 1):
                _, z = lev.kappa(m, i)
                log.record(lev.classify(z).depth_at_least(i), check="kappa_n", m=m, i=i, **tag)


def run_finite(primes=(3, 5), fields=(1, 2), levels=(2, 3), budget: int | None = None,
               seed: int = 0) -> CheckLog:
    log = CheckLog("finite")
    if budget is not None and budget < 2:
        return log
    with _timed(log):
        for p in primes:
            for f in fields:
                _finite_lemmas(p, f, budget, log, seed)
                for n in levels:
                    _finite_elements(p, f, n, budget, log)
        if 3 in primes and (budget is None or budget >= 9):
            for f in fields:
                _norm_tower(f, log)
    return log


# ---------------------------------------------------------------------------
# 8. generation and minimality


def run_generation(cases=((3, 1, (2, 3)), (3, 2, (2, 3)), (5, 1, (2, 3))), i_max: int = 200,
                   budget: int | None = None) -> CheckLog:
    """Infinite level: S_i generates V_i, no proper subset does, and the w criterion."""
    log = CheckLog("generation")
    i_max = _cap(i_max, budget)
    with _timed(log):
        for p, f, rs in cases:
            for r in rs:
                if r > i_max:
                    continue
                lev = InfiniteLevel(p, f, r, N=i_max + 2 * p)
                checker = GenerationChecker(lev, i_max + 1)
                for i in range(r, i_max + 1, p - 1):
                    rep = generation_check(lev, checker, i)
                    log.record(bool(rep["ok"]), p=p, f=f, r=r, i=i, report=rep)
    return log


def run_relation_kernel(cases=((3, (2, 3)), (5, (2, 3))), i_max: int = 200,
                        budget: int | None = None) -> CheckLog:
    log = CheckLog("relation_kernel")
    i_max = _cap(i_max, budget)
    max_keyset = 0
    with _timed(log):
        for p, rs in cases:
            for r in rs:
                ix = IndexParams(p, r)
                for i in range(r, i_max + 1, p - 1):
                    rep = relation_kernel(ix, i)
                    max_keyset = max(max_keyset, rep["max_keyset_size"])
                    log.record(not rep["violations"], p=p, r=r, i=i, violations=rep["violations"][:3])
    log.notes["max_keyset_size"] = max_keyset
    return log


def run_finite_minimality(primes=(3, 5), fields=(1, 2), levels=(2,), budget: int | None = None) -> CheckLog:
    """Finite level: generation, cocardinality <= 1, kappas needed for r = p, and the w rule."""
    log = CheckLog("finite_minimality")
    with _timed(log):
        for p in primes:
            for f in fields:
                for n in levels:
                    e = p ** (n - 1) * (p - 1)
                    i_max = _cap(p**n + e, budget)
                    for r in range(2, p + 1):
                        if r > i_max:
                            continue
                        lev = FiniteLevel(p, f, r, n, M=p**n + e + 3 * p)
                        checker = GenerationChecker(lev, i_max)
                        for i in range(r, i_max + 1, p - 1):
                            rep = generation_check_n(lev, checker, i)
                            ok = (rep["generates"] and rep["inside_V_i"] and rep["cocardinality_ok"]
                                  and rep["size_ok"] and rep.get("kappas_all_needed", True)
                                  and rep.get("w_rule_ok", True))
                            log.record(bool(ok), p=p, f=f, n=n, r=r, i=i, report=rep)
                            if r <= p - 2:
                                kr = relation_kernel_n(lev.ix, n, i, f)
                                log.record(not kr["violations"], check="relation_kernel_n", p=p, f=f,
                                           n=n, r=r, i=i, violations=kr["violations"][:3])
    return log


def run_minimality(budget: int | None = None, primes=(3, 5)) -> CheckLog:
    log = CheckLog("minimality")
    with _timed(log):
        gen_cases = tuple(c for c in ((3, 1, (2, 3)), (3, 2, (2, 3)), (5, 1, (2, 3))) if c[0] in primes)
        rk_cases = tuple(c for c in ((3, (2, 3)), (5, (2, 3))) if c[0] in primes)
        for sub in (run_generation(gen_cases, budget=budget),
                    run_relation_kernel(rk_cases, budget=budget),
                    run_finite_minimality(primes=primes, budget=budget)):
            log.merge(sub)
    return log


# ---------------------------------------------------------------------------
# 9. non-membership sampling


def run_nonmembership(trials: int = 200, seed: int = 0, depth_cap: int = 40,
                      budget: int | None = None, primes=(3, 5)) -> CheckLog:
    """Random (p^m b T^j + c) u [+ d w | d v] never reaches the next depth."""
    log = CheckLog("nonmembership")
    depth_cap = _cap(depth_cap, budget)
    with _timed(log):
        cells = [(p, f) for p, f in ((3, 1), (3, 2), (5, 1)) if p in primes]
        for p, f in cells:
            for r in range(2, p + 1):
                ix = IndexParams(p, r)
                lev = None
                for m in range(3):
                    for j in range(depth_cap):
                        bound = (ix.phi_prime_m(m, j) if r == p else ix.phi_m(m, j)) + p - 1
                        if bound > depth_cap:
                            break
                        if lev is None:
                            lev = InfiniteLevel(p, f, r, N=depth_cap + 2 * p)
                        rep = lev.nonmembership_sample(m, j, trials=trials, seed=seed)
                        log.record(not rep["counterexamples"], level="infinite", p=p, f=f, r=r, m=m, j=j,
                                   counterexamples=rep["counterexamples"][:2])
        for p, f in cells:
            n = 2
            pn, e = p**n, p ** (n - 1) * (p - 1)
            for r in range(2, p + 1):
                lev = FiniteLevel(p, f, r, n, M=pn + e + 3 * p)
                ix = lev.ix
                for m in range(n):
                    for j in range(pn):
                        try:
                            rep = lev.nonmembership_sample(m, j, trials=trials, seed=seed)
                        except ValueError:
                            break
                        if rep["bound"] > depth_cap:
                            break
                        log.record(not rep["counterexamples"], level="finite", p=p, f=f, n=n, r=r, m=m,
                                   j=j, counterexamples=rep["counterexamples"][:2])
    return log


SUITE_NAMES = ("index", "series", "generators", "finite", "minimality")


def run_suite(name: str, budget: int | None = None, primes=None) -> list:
    """Run one named suite; primes restricts every sweep to the given primes."""
    def keep(default):
        return tuple(p for p in default if primes is None or p in primes)

    if budget is not None and budget <= 0:
        return [CheckLog(name)]
    if name == "index":
        return [run_index(primes=keep((3, 5, 7)), budget=budget)]
    if name == "series":
        return [run_identity(primes=keep((3, 5, 7, 11, 13))), run_recurexp(primes=keep((3, 5))),
                run_depths(primes=keep((3, 5)), budget=budget), run_repeat(primes=keep((3, 5)), budget=budget)]
    if name == "generators":
        return [run_examples(), run_generators(primes=keep((3, 5)))]
    if name == "finite":
        return [run_finite(primes=keep((3, 5)), budget=budget)]
    if name == "minimality":
        return [run_minimality(budget=budget, primes=keep((3, 5))),
                run_nonmembership(budget=budget, primes=keep((3, 5)))]
    raise ValueError(f"unknown suite {name!r}; choose from {SUITE_NAMES + ('all',)}")
