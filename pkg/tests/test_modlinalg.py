"""Linear algebra over Z/p^K."""

import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from localunits.fq import FqContext
from localunits.modlinalg import (Infeasible, fp_solve, fq_solve, howell_form, left_kernel,
                                  linear_solve_fp, solve)


def _span(rows, p, K):
    mod = p**K
    rows = np.asarray(rows, dtype=np.int64).reshape(-1, rows.shape[-1] if len(rows) else 0)
    out = set()
    for coeffs in itertools.product(range(mod), repeat=len(rows)):
        out.add(tuple((np.array(coeffs) @ rows) % mod) if len(rows) else ())
    return out


def test_howell_trivial():
    I = np.eye(3, dtype=np.int64)
    assert (howell_form(I, 5, 2).rows == I).all()  # [TRIVIAL]
    assert howell_form(np.zeros((2, 3)), 5, 2).rows.shape[0] == 0  # [TRIVIAL]


def test_howell_small_example():
    # [DERIVED] same row module as [[0, 1], [5, 0]] by exhaustive membership over (Z/25)^2
    H = howell_form([[5, 0], [0, 1]], 5, 2)
    want = _span(np.array([[0, 1], [5, 0]]), 5, 2)
    for v in itertools.product(range(25), repeat=2):
        assert H.contains(v) == (v in want)


def test_solve_trivial():
    b = np.array([3, 7, 1])
    x, ker = solve(np.eye(3), b, 3, 2)
    assert (x == b).all() and len(ker) == 0  # [TRIVIAL]
    x, ker = solve(np.zeros((2, 2)), [0, 0], 3, 2)
    assert not x.any() and len(ker) == 2  # [TRIVIAL]


def test_solve_brute_force():
    # [DERIVED] exhaustive search over all 9^3 candidates
    rng = np.random.default_rng(7)
    p, K = 3, 2
    for _ in range(6):
        M = rng.integers(0, 9, size=(3, 3))
        M[2] = (M[0] * 3) % 9
        sols = [c for c in itertools.product(range(9), repeat=3) if not ((M @ c) % 9 - (M @ c) % 9).any()]
        for b in [(M @ np.array(c)) % 9 for c in list(itertools.product(range(9), repeat=3))[::97]]:
            x, ker = solve(M, b, p, K)
            assert not ((M @ x - b) % 9).any()
            brute = {c for c in itertools.product(range(9), repeat=3) if not ((M @ np.array(c) - b) % 9).any()}
            reached = _span(ker, p, K) if len(ker) else {(0, 0, 0)}
            assert {tuple((x + np.array(k)) % 9) for k in reached} == brute
        assert sols


def test_solve_infeasible():
    with pytest.raises(Infeasible):
        solve([[3, 0], [0, 3]], [1, 0], 3, 2)


def test_fp_solve_trivial():
    b = np.array([1, 2, 0])
    x, _ = fp_solve(np.eye(3), b, 3)
    assert (x == b).all()  # [TRIVIAL]
    _, ker = fp_solve([[1, 2], [2, 4]], [0, 0], 5)
    assert len(ker) == 1  # [TRIVIAL]


def test_artin_schreier_kernel():
    # [DERIVED] exhaustive kernel scan: a^p = a exactly on F_p
    for p, f in ((3, 2), (5, 2), (3, 3)):
        ctx = FqContext(p, f)
        L = ctx.artin_schreier_matrix()
        kernel = [a for a in ctx.elements() if not (np.array(a) @ L % p).any()]
        assert sorted(kernel) == sorted(ctx.from_int(c) for c in range(p))
        _, ker = linear_solve_fp(L, np.zeros(f, dtype=np.int64), p)
        assert len(ker) == 1


def test_fq_solve():
    ctx = FqContext(5, 2)
    a, b = ctx.gen, ctx.from_int(2)
    M = [[a, b], [b, a]]
    x0 = [ctx.from_int(3), ctx.add(ctx.gen, ctx.one)]
    rhs = [ctx.add(ctx.mul(M[i][0], x0[0]), ctx.mul(M[i][1], x0[1])) for i in range(2)]
    x, ker = fq_solve(ctx, M, rhs)
    assert [ctx.add(ctx.mul(M[i][0], x[0]), ctx.mul(M[i][1], x[1])) for i in range(2)] == rhs


matrices = st.builds(lambda p, K, rows, cols, seed: (p, K, np.random.default_rng(seed).integers(0, p**K, size=(rows, cols))),
                     st.sampled_from([3, 5]), st.integers(1, 3), st.integers(1, 5), st.integers(1, 5),
                     st.integers(0, 10**6))


@given(matrices)
def test_howell_idempotent(data):
    p, K, M = data
    H = howell_form(M, p, K)
    assert howell_form(H.rows, p, K) == H
    assert H.contains_all(M)


@given(matrices, st.integers(0, 10**6))
def test_solve_roundtrip(data, seed):
    p, K, M = data
    mod = p**K
    x0 = np.random.default_rng(seed).integers(0, mod, size=M.shape[1])
    b = (M @ x0) % mod
    x, ker = solve(M, b, p, K)
    assert not ((M @ x - b) % mod).any()
    # x0 - x lies in the kernel span
    diff = (x0 - x) % mod
    assert not ((M @ diff) % mod).any()
    assert howell_form(ker, p, K).contains(diff) if len(ker) else not diff.any()


@given(matrices)
def test_left_kernel(data):
    p, K, M = data
    ker = left_kernel(M, p, K)
    assert not ((ker @ M) % p**K).any()
