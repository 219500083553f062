"""The residue field F_q = F_p[x]/(h) in a fixed polynomial basis.

Elements are tuples of f integers in [0, p), constant term first.  Besides
scalar arithmetic the context exposes F_p-linear matrices (Frobenius,
multiplication by a constant) and the reduction table used by the
vectorised power-series code.
"""

from __future__ import annotations

from functools import cached_property
from itertools import product

import numpy as np

FqElem = tuple


def _polymulmod(a, b, mod, p):
    f = len(mod) - 1
    out = [0] * (2 * f - 1 if f else 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    for k in range(len(out) - 1, f - 1, -1):
        c = out[k]
        if c:
            for j in range(f + 1):
                out[k - f + j] = (out[k - f + j] - c * mod[j]) % p
    return tuple(out[:f])


def _has_root_or_factor(mod, p):
    """Irreducibility by trial division over all monic polys of degree <= f/2."""
    f = len(mod) - 1
    for d in range(1, f // 2 + 1):
        for lower in product(range(p), repeat=d):
            g = list(lower) + [1]
            rem = list(mod)
            for k in range(len(rem) - 1, d - 1, -1):
                c = rem[k]
                if c:
                    for j in range(d + 1):
                        rem[k - d + j] = (rem[k - d + j] - c * g[j]) % p
            if not any(rem[:d]):
                return True
    return False


def least_irreducible(p: int, f: int) -> tuple:
    """Lexicographically least monic irreducible of degree f, constant term first."""
    if f == 1:
        return (0, 1)
    for lower in product(range(p), repeat=f):
        mod = tuple(lower) + (1,)
        if mod[0] == 0:
            continue
        if not _has_root_or_factor(mod, p):
            return mod
    raise ValueError("no irreducible polynomial found")


class FqContext:
    """F_q with q = p^f and the deterministic modulus unless one is given."""

    def __init__(self, p: int, f: int = 1, modulus: tuple | None = None):
        if f < 1:
            raise ValueError("f must be >= 1")
        self.p, self.f, self.q = p, f, p**f
        mod = tuple(int(c) % p for c in modulus) if modulus is not None else least_irreducible(p, f)
        if len(mod) != f + 1 or mod[-1] != 1:
            raise ValueError("modulus must be monic of degree f")
        if f > 1 and _has_root_or_factor(mod, p):
            raise ValueError(f"modulus {mod} is reducible over F_{p}")
        self.modulus = mod

    def __repr__(self):
        return f"FqContext(p={self.p}, f={self.f}, modulus={self.modulus})"

    def __eq__(self, other):
        return isinstance(other, FqContext) and (self.p, self.modulus) == (other.p, other.modulus)

    def __hash__(self):
        return hash((self.p, self.modulus))

    # construction

    def elem(self, coeffs) -> FqElem:
        c = [int(x) % self.p for x in coeffs]
        if len(c) != self.f:
            raise ValueError(f"need {self.f} coefficients, got {len(c)}")
        return tuple(c)

    def from_int(self, a: int) -> FqElem:
        return (a % self.p,) + (0,) * (self.f - 1)

    @property
    def zero(self) -> FqElem:
        return (0,) * self.f

    @property
    def one(self) -> FqElem:
        return self.from_int(1)

    @property
    def gen(self) -> FqElem:
        return (0, 1) + (0,) * (self.f - 2) if self.f > 1 else self.from_int(-self.modulus[0])

    def elements(self):
        for c in product(range(self.p), repeat=self.f):
            yield tuple(reversed(c))

    def is_zero(self, a: FqElem) -> bool:
        return not any(a)

    # arithmetic

    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple((x - y) % self.p for x, y in zip(a, b))

    def neg(self, a):
        return tuple((-x) % self.p for x in a)

    def scale(self, c: int, a):
        return tuple((c * x) % self.p for x in a)

    def mul(self, a, b):
        return _polymulmod(a, b, self.modulus, self.p)

    def pow(self, a, k: int):
        if k < 0:
            return self.pow(self.inv(a), -k)
        out, base = self.one, a
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def inv(self, a):
        if self.is_zero(a):
            raise ZeroDivisionError("inverse of zero in F_q")
        return self.pow(a, self.q - 2)

    def frobenius(self, a, k: int = 1):
        k %= self.f
        for _ in range(k):
            a = self.pow(a, self.p)
        return a

    def trace(self, a) -> int:
        s = self.zero
        for k in range(self.f):
            s = self.add(s, self.frobenius(a, k))
        if any(s[1:]):
            raise ArithmeticError("trace left F_p")
        return s[0]

    # linear-algebra views

    @cached_property
    def xred(self) -> np.ndarray:
        """Row k: coordinates of x^k for k < 2f-1."""
        rows = []
        for k in range(2 * self.f - 1):
            mono = [0] * (2 * self.f - 1)
            mono[k] = 1
            red = list(mono)
            f = self.f
            for t in range(len(red) - 1, f - 1, -1):
                c = red[t]
                if c:
                    for j in range(f + 1):
                        red[t - f + j] = (red[t - f + j] - c * self.modulus[j]) % self.p
            rows.append(red[:f])
        return np.array(rows, dtype=np.int64)

    def mul_matrix(self, a) -> np.ndarray:
        """Matrix M with coords(a*b) = coords(b) @ M."""
        basis = [tuple(1 if j == k else 0 for j in range(self.f)) for k in range(self.f)]
        return np.array([self.mul(a, e) for e in basis], dtype=np.int64)

    def frob_matrix(self, k: int = 1) -> np.ndarray:
        """Matrix F with coords(b^(p^k)) = coords(b) @ F."""
        basis = [tuple(1 if j == t else 0 for j in range(self.f)) for t in range(self.f)]
        return np.array([self.frobenius(e, k) for e in basis], dtype=np.int64)

    def artin_schreier_matrix(self) -> np.ndarray:
        """Matrix of b -> b^p - b acting on row coordinates."""
        return (self.frob_matrix(1) - np.eye(self.f, dtype=np.int64)) % self.p

    @cached_property
    def xi(self) -> FqElem:
        return find_normal_xi(self)


def _rank_mod_p(rows, p) -> int:
    m = [list(r) for r in rows]
    rank, ncols = 0, len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][c] % p), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][c], -1, p)
        m[rank] = [(x * inv) % p for x in m[rank]]
        for i in range(len(m)):
            if i != rank and m[i][c] % p:
                t = m[i][c]
                m[i] = [(x - t * y) % p for x, y in zip(m[i], m[rank])]
        rank += 1
    return rank


def is_normal(ctx: FqContext, a) -> bool:
    conj = [ctx.frobenius(a, k) for k in range(ctx.f)]
    return _rank_mod_p(conj, ctx.p) == ctx.f


def find_normal_xi(ctx: FqContext) -> FqElem:
    """Least element (constant-first lexicographic) of trace 1 generating a normal basis."""
    for lower in product(range(ctx.p), repeat=ctx.f):
        a = tuple(lower)
        if ctx.trace(a) == 1 and is_normal(ctx, a):
            return a
    raise ArithmeticError("no normal element of trace 1")
