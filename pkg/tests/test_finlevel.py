"""Finite level n: the ring O_{F_n}, norms and traces, generators, generating sets."""

from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from localunits.finlevel import (FiniteLevel, FnRing, LevelStep, gen_set_fin_symbolic, generation_check_n,
                                 kappa_n_symbolic, make_generators_n, mu_shift, relation_kernel_n)
from localunits.groupring import fn_poly
from localunits.indexfn import IndexParams
from localunits.inflevel import GenerationChecker


@lru_cache(maxsize=None)
def ring(p, f, n, K=3):
    return FnRing(p, f, n, K)


@lru_cache(maxsize=None)
def level(p, f, r, n):
    e = p ** (n - 1) * (p - 1)
    return FiniteLevel(p, f, r, n, M=p**n + e + 3 * p)


def _eta(p, f, seed):
    rng = np.random.default_rng(seed)
    eta = tuple(int(x) for x in rng.integers(0, p, size=f))
    return eta if any(eta) else (1,) + (0,) * (f - 1)


# --- ring arithmetic -------------------------------------------------------


def test_ring_oracles():
    for p, f, n in ((3, 1, 2), (3, 2, 2), (5, 1, 2), (3, 1, 3)):
        R = ring(p, f, n)
        assert (R.zeta() ** (p**n)).is_one()  # [TRIVIAL]
        assert not (R.zeta() ** (p ** (n - 1))).is_one()
        z = R.binomial(R.fq.one, 1)
        assert (z.inv() * z).is_one()  # [TRIVIAL]
        assert R.classify(R.one()).beyond  # [TRIVIAL]
    # [PAPER] p + lambda_2^(e_2) is divisible by lambda_2^(p^2)
    R = ring(5, 1, 2)
    x = (R.lam_power(R.e) + p_const(R)) % R.mod
    d, _ = R.valuation(x)
    assert d is None or d >= 25


def p_const(R):
    out = R.zero()
    out[0, 0] = R.p
    return out


def test_galois_oracles():
    for p, f, n in ((3, 1, 2), (5, 1, 2), (3, 2, 3)):
        R = ring(p, f, n)
        assert R.zeta().act_gamma_power(p ** (n - 1)) == R.zeta()  # [TRIVIAL]
        z = R.sample_element(2, R.xi, None, seed=1)
        assert z.act_phi(f) == z
    R = ring(5, 1, 2)
    z = R.sample_element(3, (2,), None, seed=3)
    assert z.act_phi(1) == z  # [TRIVIAL]


@pytest.mark.parametrize("p,f,n", [(3, 1, 2), (3, 2, 2), (5, 1, 2), (3, 1, 3)])
def test_fn_annihilates(p, f, n):
    """f_n(T) kills every unit of level n since Gamma_n has order p^(n-1)."""
    R = ring(p, f, n)
    a = fn_poly(n, p ** (n - 1) + 1, f, p, R.n + R.K)
    for seed in range(3):
        z = R.sample_element(1 + seed, _eta(p, f, seed), None, seed=seed)
        assert R.apply_A(a, z).is_one()


def test_trace_lemma():
    # [PAPER] Tr(lambda_3^(pk - eps)) = p lambda_2^(k - eps) mod p^3
    for p in (3, 5):
        L, U = ring(p, 1, 2, 4), ring(p, 1, 3, 4)
        S = LevelStep(L, U)
        for k in range(1, p * p + 1):
            for eps in (0, 1):
                tr = S.trace_arr(U.lam_power(p * k - eps))
                assert not ((tr - p * L.lam_power(k - eps)) % p**3).any()


@given(st.sampled_from([(3, 1), (3, 2), (5, 1)]), st.integers(0, 10**6), st.data())
def test_power_law(pf, seed, data):
    """For i > p^(n-1), z in V_(n,i)(eta) gives z^p in V_(n,i+e_n)(-eta)."""
    p, f = pf
    R = ring(p, f, 2)
    r = data.draw(st.integers(2, p))
    i = data.draw(st.integers(p + 1, R.M - R.e - p - 1))
    i += (r - i) % (p - 1)
    if i + R.e >= R.M - p:
        return
    eta = _eta(p, f, seed)
    cls = R.classify(R.sample_element(i, eta, r, seed=seed) ** p)
    assert (cls.depth, cls.leading) == (i + R.e, R.fq.neg(eta))


def test_pth_roots():
    R = ring(3, 1, 2, 4)
    assert R.pth_root(R.zeta()) is None
    x = R.sample_element(4, (1,), None, seed=2)
    root = R.pth_root(x**3)
    assert root is not None and R.classify(root**3 / x**3).beyond


def test_norm_tower():
    from localunits.finlevel import FnUnit
    p = 3
    R2, R3, R4 = ring(p, 1, 2), ring(p, 1, 3), ring(p, 1, 4)
    S32, S43 = LevelStep(R2, R3), LevelStep(R3, R4)
    z = R4.sample_element(5, (1,), None, seed=0)
    composite = S32.norm(S43.norm(z))
    prod = R4.one()
    for k in range(p * p):
        g = pow(1 + p**2, k, p**4)
        prod = prod * (z if g == 1 else z._subst(g))
    direct = FnUnit(R2, 0, S32.descend(S43.descend(prod.arr)))
    assert (composite / direct).depth() is None


# --- generators and special elements --------------------------------------


@pytest.mark.parametrize("p,f", [(3, 1), (3, 2), (5, 1)])
def test_generators_n(p, f):
    for n in (2, 3):
        R = ring(p, f, n, 3)
        for r in range(2, p + 1):
            g = make_generators_n(R, r)
            assert g.residuals_vanish(), g.certificates
            cls = R.classify(g.u, r)
            assert (cls.depth, cls.leading) == (r, R.xi)
            if r <= p - 2:
                assert g.u == R.project(R.binomial(R.xi, r), r)  # [TRIVIAL]
            if r == p:
                cls = R.classify(g.w, 1)
                assert (cls.depth, cls.leading) == (1, R.fq.neg(R.xi))  # [PAPER]
                cls = R.classify(g.y, p)
                assert (cls.depth, cls.leading) == (2 * p - 1, R.fq.neg(R.xi))


def test_alpha_n_oracles():
    lev = level(3, 1, 2, 2)
    assert lev.classify(lev.alpha(0, 0)[1]).depth == 2  # [TRIVIAL]
    assert lev.classify(lev.alpha(0, 1)[1]).depth == lev.ix.phi(1)  # [DERIVED]
    lev = level(3, 1, 2, 3)
    cls = lev.classify(lev.alpha(1, 1)[1])
    assert (cls.depth, cls.leading) == (lev.ix.phi_m(1, 1), lev.xi)  # [DERIVED]


def test_omega_oracles():
    p, n = 3, 3
    lev = level(p, 1, p - 1, n)
    e = lev.field.e
    for m in range(n - 1):
        cls = lev.classify(lev.omega(m, m)[1])
        assert (cls.depth, cls.leading) == (e + p ** (m + 1) - 1, lev.xi)  # [PAPER]


def test_beta_n_oracles():
    lev = level(3, 2, 3, 2)
    R = lev.field
    assert R.classify(lev.beta(0, 0)[1]).depth == 5  # [TRIVIAL]
    cls = R.classify(lev.beta(0, 1)[1])
    assert (cls.depth, cls.leading) == (9, R.fq.frobenius(R.xi, R.f - 1))  # [PAPER]
    lev = level(3, 1, 3, 3)
    assert lev.classify(lev.beta(1, 0)[1]).depth == lev.ix.phi_prime_m(1, 0)  # [DERIVED]


def test_kappa_n_forms():
    lev = level(5, 1, 4, 2)
    sym, z = lev.kappa(0, 24)
    assert sym.gens() == ["u", "v"] and any(t.vartheta for t in sym.terms)  # [DERIVED]
    assert lev.classify(z).depth_at_least(24)
    lev = level(3, 1, 3, 3)
    ix = lev.ix
    hits = 0
    for i in range(3, 28, 2):
        for m in range(ix.s_of(i) + 1):
            if ix.kappa_three_level(m, i) is not None:
                sym, z = lev.kappa(m, i)
                assert "w" in sym.gens() and lev.classify(z).depth_at_least(i)  # [DERIVED]
                hits += 1
    assert hits


def test_gen_set_fin_cases():
    ix = IndexParams(5, 4)
    for i in range(4, 21, 4):
        assert gen_set_fin_symbolic(ix, 2, i)[-1].gens() == ["v"]  # [PAPER]
    assert gen_set_fin_symbolic(ix, 2, 24)[-1].gens() != ["v"]  # [PAPER]
    for p, r in ((3, 2), (5, 3), (5, 5)):
        ix = IndexParams(p, r)
        e = ix.e_of(2)
        for i in range(r, 4 * p * p, p - 1):
            mu, i0 = mu_shift(ix, 2, i)
            if mu == 0:
                continue
            kappas = [s for s in gen_set_fin_symbolic(ix, 2, i) if s.gens() not in (["v"], ["w"])]
            base = [s for s in gen_set_fin_symbolic(ix, 2, i0) if s.gens() not in (["v"], ["w"])]
            assert kappas == [s.scaled(mu) for s in base]  # [TRIVIAL]
            assert i0 == i - mu * e
    for p in (3, 5):
        for r in range(2, p + 1):
            ix = IndexParams(p, r)
            for n in (2, 3):
                for i in range(r, p**n + ix.e_of(n), p - 1):
                    assert len(gen_set_fin_symbolic(ix, n, i)) <= n + 1  # [PAPER]


def test_kappa_n_domain():
    with pytest.raises(ValueError):
        kappa_n_symbolic(IndexParams(3, 2), 2, 0, 11)


@pytest.mark.parametrize("p,f,r", [(3, 1, 2), (3, 1, 3), (3, 2, 3), (5, 1, 4), (5, 1, 5)])
def test_generation_n(p, f, r):
    n = 2
    lev = level(p, f, r, n)
    top = p**n + lev.field.e
    checker = GenerationChecker(lev, top)
    for i in range(r, top + 1, p - 1):
        rep = generation_check_n(lev, checker, i)
        assert rep["generates"] and rep["inside_V_i"] and rep["cocardinality_ok"] and rep["size_ok"], rep
        if r == p:
            assert rep["kappas_all_needed"], rep  # [PAPER]
            assert rep["w_rule_ok"], rep


def test_relation_kernel_n():
    ix = IndexParams(5, 3)
    for i in range(3, 46, 4):
        assert not relation_kernel_n(ix, 2, i)["violations"]
    with pytest.raises(ValueError):
        relation_kernel_n(IndexParams(5, 4), 2, 4)


def test_nonmembership_n():
    lev = level(3, 1, 2, 2)
    rep = lev.nonmembership_sample(0, 0, trials=50)
    assert not rep["counterexamples"] and rep["bound"] >= 2
