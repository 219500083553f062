"""The coefficient ring Z_p[Phi][[T]] and symbolic forms."""

from fractions import Fraction

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from localunits.groupring import (IwasawaElem, PhiGroupElem, Symbolic, Term, epsilon_r_exponents,
                                  fn_poly, fn_poly_coeffs, norm_gamma_coeffs, norm_phi, rho_power,
                                  rho_power_phi, vartheta)
from localunits.padic import omega_power


@st.composite
def phi_elems(draw, n=2):
    p = draw(st.sampled_from([3, 5]))
    f = draw(st.integers(1, 3))
    K = draw(st.integers(1, 4))
    return [PhiGroupElem(tuple(draw(st.integers(0, p**K - 1)) for _ in range(f)), p, K) for _ in range(n)]


@st.composite
def iwasawa_elems(draw, n=3):
    p = draw(st.sampled_from([3, 5]))
    f = draw(st.integers(1, 2))
    K = draw(st.integers(1, 3))
    B = draw(st.integers(1, 6))
    seeds = [draw(st.integers(0, 10**6)) for _ in range(n)]
    return [IwasawaElem(np.random.default_rng(s).integers(0, p**K, size=(B, f)), p, K) for s in seeds]


def test_phi_group_oracles():
    for f in (1, 2, 3):
        one = PhiGroupElem.scalar(1, f, 5, 3)
        a = PhiGroupElem(tuple(range(1, f + 1)), 5, 3)
        assert one * a == a  # [TRIVIAL]
        assert PhiGroupElem.phi_power(1, f, 5, 3) * PhiGroupElem.phi_power(f - 1, f, 5, 3) == one  # [TRIVIAL]


def test_rho_power_oracles():
    for f in (1, 2, 3):
        assert rho_power_phi(0, f, 5, 4) == PhiGroupElem.scalar(1, f, 5, 4)  # [TRIVIAL]
    for m in range(4):
        assert rho_power_phi(m, 1, 5, 6) == PhiGroupElem.scalar(5**m, 1, 5, 6)  # [TRIVIAL]
    assert rho_power_phi(3, 2, 5, 6) == PhiGroupElem.phi_power(1, 2, 5, 6, 125)  # [DERIVED] phi^-3 = phi


def test_norm_and_fn_oracles():
    assert norm_phi(1, 5, 3) == PhiGroupElem.scalar(1, 1, 5, 3)  # [TRIVIAL]
    assert fn_poly_coeffs(1, 5) == [0, 1]  # [TRIVIAL] f_1 = T
    assert fn_poly_coeffs(2, 5) == [0, 5, 10, 10, 5, 1]  # [DERIVED] binomial expansion of (1+T)^5 - 1
    assert norm_gamma_coeffs(2, 5) == [5, 10, 10, 5, 1]


def test_vartheta_oracles():
    for k in range(5):
        assert vartheta(3, k, 2, 5, 3) == PhiGroupElem.scalar(1, 2, 5, 3)  # [TRIVIAL]
    assert vartheta(2, 0, 3, 5, 3) == PhiGroupElem.scalar(1, 3, 5, 3)  # [TRIVIAL]
    for p in (3, 5, 7):
        vt = vartheta(2, p - 1, 1, p, 3)
        assert vt == PhiGroupElem.scalar(p, 1, p, 3) and vt.divisible_by_p()  # [DERIVED] p ones
        assert not vt.is_unit()


def test_epsilon_oracles():
    # [DERIVED] p = 3: the two idempotents are (1 +- delta)/2
    inv2 = pow(2, -1, 27)
    assert [int(e) for e in epsilon_r_exponents(0, 3, 3)] == [inv2, inv2]
    assert [int(e) for e in epsilon_r_exponents(1, 3, 3)] == [inv2, (-inv2) % 27]
    for p in (3, 5, 7):
        K = 3
        # [TRIVIAL] sum over r of e_r is the identity element of Z_p[Delta]
        for j in range(p - 1):
            total = sum(int(epsilon_r_exponents(r, p, K)[j]) for r in range(p - 1)) % p**K
            assert total == (1 if j == 0 else 0)


def test_epsilon_orthogonality():
    # sum_delta e_r(delta) omega(delta)^s = [r = s]: the idempotents project onto characters
    for p in (3, 5, 7):
        K = 4
        for r in range(p - 1):
            eps = epsilon_r_exponents(r, p, K)
            for s in range(p - 1):
                val = sum(int(eps[j]) * int(omega_power(j, s, p, K)) for j in range(p - 1)) % p**K
                assert val == (1 if r == s else 0)


def test_rho_never_a_unit():
    for p in (3, 5):
        for f in (1, 2, 3):
            for m in range(1, 4):
                r = rho_power_phi(m, f, p, 6)
                assert not r.is_unit()
                assert all(c % p**m == 0 for c in r.coeffs)


def test_fn_poly_truncation():
    import pytest
    with pytest.raises(ValueError):
        fn_poly(3, 5, 1, 3, 3)
    assert fn_poly(2, 10, 1, 3, 3).support() == [(1, 0), (2, 0), (3, 0)]


def test_symbolic_rendering():
    labels = {"u": ("u₃", "u_3")}
    sym = Symbolic((Term(2, 95), Term(1, 475, Fraction(-1)), Term(0, 2379, Fraction(-1))), labels)
    assert sym.unicode() == "(ρ²T⁹⁵ − ρT⁴⁷⁵ − T²³⁷⁹)u₃"
    assert sym.latex().replace(" ", "") == r"\left(\rho^{2}T^{95}-\rho^{1}T^{475}-T^{2379}\right)u_3".replace(
        r"\rho^{1}", r"\rho")
    assert sym.scaled(2).unicode().startswith("p²·")
    js = sym.to_json()
    assert js["text"] == sym.unicode() and len(js["terms"]) == 3


def test_symbolic_coefficient():
    sym = Symbolic((Term(1, 2), Term(0, 0, Fraction(-1))))
    c = sym.coefficient("u", 4, 2, 5, 3)
    want = IwasawaElem.monomial(4, 2, 5, 3, 2, rho_power_phi(1, 2, 5, 3)) - IwasawaElem.monomial(4, 2, 5, 3, 0)
    assert c == want


@given(phi_elems(3))
def test_phi_ring_laws(elems):
    a, b, c = elems
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert (a * b).augmentation() == a.augmentation() * b.augmentation() % a.modulus


@given(iwasawa_elems(3))
def test_iwasawa_ring_laws(elems):
    a, b, c = elems
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == IwasawaElem.zero(a.B, a.f, a.p, a.K)


@given(iwasawa_elems(1), st.integers(0, 5))
def test_rho_power_scales_by_p(elems, m):
    (a,) = elems
    out = rho_power(m, a.B, a.f, a.p, a.K) * a
    assert not (out.coeffs % min(a.p**m, a.modulus)).any()


@given(iwasawa_elems(1))
def test_reduce_mod_fn(elems):
    (a,) = elems
    g = fn_poly_coeffs(2, a.p)
    red = a.reduce_mod_poly(g)
    assert all(d < len(g) - 1 for d, _ in red.support())
