"""Linear algebra over Z/p^K and over F_p.

Matrices are numpy int64 arrays; rows are generators of a submodule of
(Z/p^K)^n.  The Howell form is the canonical echelon form for such row
modules: pivots are powers of p, entries above a pivot are reduced modulo
it, and for every k the rows with k leading zeros span all vectors of the
module with k leading zeros.  That last property makes membership and
kernels straightforward.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class Infeasible(ArithmeticError):
    """The linear system has no solution."""


def _val_array(x: np.ndarray, p: int, K: int) -> np.ndarray:
    v = np.full(x.shape, K, dtype=np.int64)
    y = x.copy()
    nz = y != 0
    v[nz] = 0
    for k in range(1, K):
        nz &= (y % p) == 0
        y = np.where(nz, y // p, y)
        v[nz] = k
    return v


@dataclass
class HowellForm:
    rows: np.ndarray
    pivots: list[tuple[int, int]]  # (column, valuation)
    p: int
    K: int

    @property
    def modulus(self) -> int:
        return self.p**self.K

    def reduce(self, x) -> np.ndarray:
        """Remainder of x after subtracting the Howell rows greedily."""
        mod = self.modulus
        x = np.asarray(x, dtype=np.int64) % mod
        for h, (c, v) in zip(self.rows, self.pivots):
            pv = self.p**v
            if x[c] % pv == 0 and x[c]:
                x = (x - (x[c] // pv) * h) % mod
        return x

    def contains(self, x) -> bool:
        return not self.reduce(x).any()

    def contains_all(self, X) -> bool:
        X = np.asarray(X, dtype=np.int64)
        return all(self.contains(x) for x in X.reshape(-1, X.shape[-1]))

    def __eq__(self, other):
        return (isinstance(other, HowellForm) and self.rows.shape == other.rows.shape
                and bool((self.rows == other.rows).all()))


def howell_form(M, p: int, K: int) -> HowellForm:
    mod = p**K
    M = np.asarray(M, dtype=np.int64)
    ncols = M.shape[1] if M.ndim == 2 else 0
    work = M.reshape(-1, ncols) % mod
    work = work[work.any(axis=1)] if len(work) else work
    out, pivots = [], []
    for c in range(ncols):
        if len(work) == 0:
            break
        col = work[:, c]
        if not col.any():
            continue
        vals = _val_array(col, p, K)
        piv = int(np.argmin(vals))
        v = int(vals[piv])
        pv = p**v
        row = work[piv].copy()
        unit = (row[c] // pv) % mod
        row = (row * pow(int(unit), -1, mod)) % mod
        rest = np.delete(work, piv, axis=0)
        if len(rest):
            t = rest[:, c] // pv
            rest = (rest - t[:, None] * row[None, :]) % mod
        extra = (row * p ** (K - v)) % mod if v > 0 else None
        if extra is not None and extra.any():
            rest = np.vstack([rest, extra[None, :]]) if len(rest) else extra[None, :]
        work = rest[rest.any(axis=1)] if len(rest) else rest
        out.append(row)
        pivots.append((c, v))
    rows = np.array(out, dtype=np.int64).reshape(-1, ncols)
    # reduce entries above each pivot; top-down so later pivots clean up what earlier ones touch
    for a in range(len(rows)):
        c, v = pivots[a]
        pv = p**v
        for b in range(a):
            t = rows[b, c] // pv
            if t:
                rows[b] = (rows[b] - t * rows[a]) % mod
    return HowellForm(rows, pivots, p, K)


def left_kernel(M, p: int, K: int) -> np.ndarray:
    """Generators of {x : x M = 0 mod p^K} as rows."""
    M = np.asarray(M, dtype=np.int64) % p**K
    m, n = M.shape
    aug = np.hstack([M, np.eye(m, dtype=np.int64)])
    H = howell_form(aug, p, K)
    ker = [h[n:] for h, (c, _) in zip(H.rows, H.pivots) if c >= n]
    return np.array(ker, dtype=np.int64).reshape(-1, m)


def solve(M, b, p: int, K: int):
    """Solve M x = b over Z/p^K.  Returns (x, kernel rows)."""
    mod = p**K
    M = np.asarray(M, dtype=np.int64) % mod
    b = np.asarray(b, dtype=np.int64) % mod
    if M.ndim != 2 or M.shape[0] != b.shape[0]:
        raise ValueError(f"dimension mismatch: M {M.shape}, b {b.shape}")
    A = M.T  # x A = b^T in row convention
    n = A.shape[0]
    aug = np.hstack([A, np.eye(n, dtype=np.int64)])
    H = howell_form(aug, p, K)
    r = H.reduce(np.concatenate([b, np.zeros(n, dtype=np.int64)]))
    if r[: A.shape[1]].any():
        raise Infeasible("no solution mod p^K")
    x = (-r[A.shape[1]:]) % mod
    ker = [h[A.shape[1]:] for h, (c, _) in zip(H.rows, H.pivots) if c >= A.shape[1]]
    return x, np.array(ker, dtype=np.int64).reshape(-1, n)


def fp_solve(M, b, p: int):
    """Gaussian elimination over F_p; returns (x, kernel basis rows)."""
    return solve(M, b, p, 1)


def fq_solve(ctx, M, b):
    """Solve an F_q-linear system sum_j M[i][j] x_j = b_i by expanding over F_p.

    M is a nested list of F_q elements, b a list of F_q elements.  Returns
    (x, kernel) with x a list of F_q elements and kernel a list of such lists
    spanning the solutions of the homogeneous system over F_p.
    """
    f = ctx.f
    rows, cols = len(M), len(M[0]) if M else 0
    big = np.zeros((rows * f, cols * f), dtype=np.int64)
    for i in range(rows):
        for j in range(cols):
            # coords(M_ij * x_j) = coords(x_j) @ mul_matrix(M_ij)
            big[i * f:(i + 1) * f, j * f:(j + 1) * f] = ctx.mul_matrix(M[i][j]).T
    rhs = np.concatenate([np.array(v, dtype=np.int64) for v in b]) if rows else np.zeros(0, dtype=np.int64)
    x, ker = solve(big, rhs, ctx.p, 1)
    unpack = lambda v: [tuple(int(t) for t in v[j * f:(j + 1) * f]) for j in range(cols)]
    return unpack(x), [unpack(k) for k in ker]


def linear_solve_fp(L, c, p: int):
    """Solve coords(b) @ L = coords(c) over F_p.  Returns (b, kernel rows)."""
    L = np.asarray(L, dtype=np.int64)
    return solve(L.T, np.asarray(c, dtype=np.int64), p, 1)
