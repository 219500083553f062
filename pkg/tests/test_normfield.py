"""Field-of-norms arithmetic, Galois actions and filtration classes."""

from math import factorial

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from localunits import suites
from localunits.indexfn import IndexParams
from localunits.normfield import NormField, NotInEigenspace
from localunits.padic import omega_power

FIELDS = {(p, f): NormField(p, f, 80) for p in (3, 5) for f in (1, 2)}


def _field(p, f):
    return FIELDS[(p, f)]


def _nonzero_fq(draw, F):
    eta = tuple(draw(st.integers(0, F.p - 1)) for _ in range(F.f))
    return eta if any(eta) else F.fq.one


@st.composite
def field_and_unit(draw, max_depth=30):
    F = _field(draw(st.sampled_from([3, 5])), draw(st.sampled_from([1, 2])))
    i = draw(st.integers(1, max_depth))
    eta = _nonzero_fq(draw, F)
    seed = draw(st.integers(0, 10**6))
    rng = np.random.default_rng(seed)
    arr = F.one_series()
    arr[i] = eta
    arr[i + 1:] = rng.integers(0, F.p, size=(F.N - i - 1, F.f))
    return F, i, eta, F.from_array(arr)


def test_multiplication_oracles():
    F = _field(5, 2)
    xi = F.xi
    z = F.unit({1: xi, 4: (2, 3)})
    assert (z * z.inv()).is_one()  # [TRIVIAL]
    neg = F.fq.neg(xi)
    prod = F.unit({1: xi}) * F.unit({1: neg})
    assert prod == F.unit({2: F.fq.neg(F.fq.mul(xi, xi))})  # [TRIVIAL] (1 + x)(1 - x) = 1 - x^2
    sq = F.lam() * F.lam()
    assert sq.val == 2 and sq.is_one() is False and sq.first_nonzero() is None  # [TRIVIAL]


def test_power_oracles():
    for (p, f), F in FIELDS.items():
        z = F.unit({1: F.xi, 3: F.fq.one})
        assert z.zp_pow(1) == z  # [TRIVIAL]
        lin = F.unit({1: F.xi})
        assert lin ** p == F.unit({p: F.fq.frobenius(F.xi, 1)})  # [TRIVIAL] Frobenius in characteristic p
        one_plus = F.unit({1: 1})
        assert one_plus.zp_pow(-1) == one_plus.inv()  # [DERIVED] series inversion


def test_gamma_on_lambda():
    # [PAPER] lambda^gamma = lambda + lambda^p - lambda^(p+1)
    for (p, f), F in FIELDS.items():
        g = F.lam().act_gamma()
        assert g.val == 1
        assert g == F.unit({p - 1: 1, p: -1}, val=1)


def test_delta_oracles():
    for (p, f), F in FIELDS.items():
        z = F.unit({1: F.xi, 2: F.fq.one})
        assert z.act_delta(0) == z  # [TRIVIAL]
        for k in range(p - 1):
            # [TRIVIAL] the linear coefficient of (1 + lambda)^delta is omega(delta) mod p
            w = F.unit({1: 1}).act_delta(k)
            assert w.coeff(1) == F.fq.from_int(int(omega_power(k, 1, p, 1)))
        # [PAPER] pi = lambda^(e_(p-1)) keeps valuation one
        assert F.project(F.lam(), p - 1).val == 1


def test_phi_oracles():
    F1 = _field(5, 1)
    z = F1.unit({1: 2, 3: 4})
    assert z.act_phi(1) == z  # [TRIVIAL]
    for (p, f), F in FIELDS.items():
        z = F.unit({2: F.xi, 5: F.fq.one})
        assert z.act_phi(f) == z  # [TRIVIAL]
        i = 4
        assert F.unit({i: F.xi}).act_phi(1) == F.unit({i: F.fq.frobenius(F.xi, 1)})  # [TRIVIAL]


def test_apply_oracles():
    from localunits.groupring import IwasawaElem, one
    for (p, f), F in FIELDS.items():
        z = F.unit({2: F.xi, 7: F.fq.one})
        assert F.apply_A(one(4, f, p, F.K), z) == z  # [TRIVIAL]
        for i in (1, 2, p + 1, 2 * p + 2):
            if i % p == 0:
                continue
            zi = F.unit({i: F.xi, i + 3: F.fq.one})
            t = F.apply_A(IwasawaElem.monomial(4, f, p, F.K, 1), zi)
            cls = F.classify(t)
            assert (cls.depth, cls.leading) == (i + p - 1, F.fq.scale(i, F.xi))  # [PAPER]
            ix = IndexParams(p, 2)
            b = ix.bracket(i)
            for j in range(b + 1):
                zj = zi
                for _ in range(j):
                    zj = zj.act_T()
                cls = F.classify(zj)
                lead = F.fq.scale(factorial(b) // factorial(b - j), F.xi)
                assert (cls.depth, cls.leading) == (i + j * (p - 1), lead)  # [PAPER]


def test_projection_and_classification():
    for (p, f), F in FIELDS.items():
        assert F.classify(F.one()).beyond  # [TRIVIAL]
        for r in range(2, p + 1):
            u = F.project(F.binomial(F.xi, r), r)
            assert F.project(u, r) == u  # [TRIVIAL]
            cls = F.classify(u, r)
            assert (cls.depth, cls.leading) == (r, F.xi)  # [TRIVIAL]
            assert F.in_eigenspace(u, r)
        u = F.project(F.binomial(F.xi, 2), 2)
        if p > 3:
            with pytest.raises(NotInEigenspace):
                F.classify(u, 3)


def test_sample_element():
    F = _field(5, 2)
    a = F.sample_element(11, F.xi, 3, seed=4)
    b = F.sample_element(11, F.xi, 3, seed=4)
    c = F.sample_element(11, F.xi, 3, seed=5)
    assert a == b  # [TRIVIAL]
    cls = F.classify(a, 3)
    assert (cls.depth, cls.leading) == (11, F.xi)  # [TRIVIAL]
    assert a != c and F.classify(a / c).depth > 11  # [DERIVED]
    with pytest.raises(ValueError):
        F.sample_element(10, F.xi, 3)


@st.composite
def eigen_sample(draw, max_depth=40):
    """An element of V_i(eta) inside the omega^r-eigenspace with r = i mod p-1."""
    F = _field(draw(st.sampled_from([3, 5])), draw(st.sampled_from([1, 2])))
    i = draw(st.integers(2, max_depth))
    r = 2 + (i - 2) % (F.p - 1)
    eta = _nonzero_fq(draw, F)
    return F, i, eta, F.sample_element(i, eta, r, seed=draw(st.integers(0, 10**6)))


@given(eigen_sample(), st.integers(1, 12))
def test_repeated_T(data, j):
    """For p not dividing i, T^j z has depth phi^(i)(j) and a leading coefficient fixed by i mod p."""
    F, i, eta, z = data
    p = F.p
    assume(i % p)
    ix = IndexParams(p, 2)
    depth = ix.phi_i(i, j)
    assume(depth < F.N - p)
    for _ in range(j):
        z = z.act_T()
    cls = F.classify(z)
    b = ix.bracket(i)
    lo = ix.braces(b - j)
    coeff = factorial(b) * pow(factorial(lo), -1, p) % p
    assert cls.depth == depth
    assert cls.leading == F.fq.scale(coeff, eta)


@given(eigen_sample(max_depth=5), st.integers(0, 3))
def test_repeat_from_multiple_of_p(data, k):
    """z in V_(pi-p+1)(eta) and j divisible by p-1: T^(j+1) z lands in V_(p(i+j))(eta)."""
    F, i, eta, _ = data
    p = F.p
    j = (p - 1) * k
    start = p * i - p + 1
    assume(p * (i + j) < F.N - p)
    z = F.sample_element(start, eta, 2 + (start - 2) % (p - 1), seed=k)
    for _ in range(j + 1):
        z = z.act_T()
    cls = F.classify(z)
    assert (cls.depth, cls.leading) == (p * (i + j), eta)


@given(field_and_unit(), st.integers(0, 3))
def test_actions_commute(data, k):
    F, _, _, z = data
    assert z.act_gamma().act_phi(1) == z.act_phi(1).act_gamma()
    assert z.act_delta(k).act_gamma() == z.act_gamma().act_delta(k)
    assert z.act_delta(k).act_phi(1) == z.act_phi(1).act_delta(k)


@given(field_and_unit(), st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
def test_zp_pow_additive(data, e1, e2):
    F, _, _, z = data
    assert z.zp_pow(e1 + e2) == z.zp_pow(e1) * z.zp_pow(e2)


@given(field_and_unit())
def test_gamma_raises_depth(data):
    F, i, _, z = data
    d = z.act_T().first_nonzero()
    assert d is None or d >= i + F.p - 1


def test_repeat_sweep():
    log = suites.run_repeat()
    assert log.ok, log.failures[:5]
