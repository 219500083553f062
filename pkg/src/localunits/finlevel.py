"""Units of F_n = E(zeta_{p^n}) at desk scale.

Elements of the valuation ring are stored modulo p^K as arrays of shape
(e_n, f): row k holds the O_E coordinates of the coefficient of lambda_n^k,
where O_E = Z_p[x]/(h) and h is the integer lift of the residue field
modulus.  Since p = lambda_n^e_n * unit, this is exactly O_{F_n} modulo
lambda_n^(K e_n), so every ring operation is exact at that precision.

As in the field of norms, an element of the pro-p completion D_n is
``lambda_n^val * u`` with u a principal unit; Teichmüller factors are
dropped.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from math import comb

import numpy as np

from . import modlinalg
from .fq import FqContext
from .groupring import IwasawaElem, PhiGroupElem, Symbolic, Term, norm_gamma_coeffs, vartheta, fn_poly_coeffs
from .indexfn import IndexParams, ilog_ceil, is_power_of
from .inflevel import (Cover, FiltrationDescent, GenerationChecker, GradedSolveError, _labels,
                       alpha_symbolic, beta_symbolic, kappa_symbolic)
from .normfield import FiltrationClass, NotInEigenspace
from .padic import omega_power


def _vp(x: int, p: int, cap: int) -> int:
    if x == 0:
        return cap
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


class UnramifiedRing:
    """O_E / p^K with O_E = Z_p[x]/(h); elements are integer arrays of length f."""

    def __init__(self, p: int, f: int, K: int, modulus=None):
        self.fq = FqContext(p, f, modulus)
        self.p, self.f, self.K = p, f, K
        self.mod = p**K
        self.h = np.array(self.fq.modulus, dtype=np.int64)

    @cached_property
    def xred(self) -> np.ndarray:
        """Row k: coordinates of x^k mod (h, p^K) for k < 2f-1."""
        f, mod = self.f, self.mod
        rows = []
        for k in range(2 * f - 1):
            red = [0] * (2 * f - 1)
            red[k] = 1
            for t in range(len(red) - 1, f - 1, -1):
                c = red[t]
                if c:
                    for j in range(f + 1):
                        red[t - f + j] = (red[t - f + j] - c * int(self.h[j])) % mod
            rows.append(red[:f])
        return np.array(rows, dtype=np.int64)

    def one(self) -> np.ndarray:
        out = np.zeros(self.f, dtype=np.int64)
        out[0] = 1
        return out

    def lift(self, a) -> np.ndarray:
        """The coordinate lift of an F_q element (digits in [0, p))."""
        return np.array(a, dtype=np.int64) % self.p

    def residue(self, a) -> tuple:
        return tuple(int(c) % self.p for c in a)

    def mul(self, a, b) -> np.ndarray:
        full = np.convolve(a, b) % self.mod
        return full @ self.xred % self.mod

    def pow(self, a, k: int) -> np.ndarray:
        out, base = self.one(), np.asarray(a, dtype=np.int64) % self.mod
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def inv(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64) % self.mod
        res = self.residue(a)
        if self.fq.is_zero(res):
            raise ZeroDivisionError("not a unit of O_E")
        x = self.lift(self.fq.inv(res))
        two = 2 * self.one()
        for _ in range(ilog_ceil(2, self.K) + 1):
            x = self.mul(x, (two - self.mul(a, x)) % self.mod)
        return x

    def _eval_h(self, y) -> tuple[np.ndarray, np.ndarray]:
        val, der = np.zeros(self.f, dtype=np.int64), np.zeros(self.f, dtype=np.int64)
        for c in self.h[::-1]:
            der = (self.mul(der, y) + val) % self.mod
            val = self.mul(val, y)
            val[0] = (val[0] + c) % self.mod
        return val, der

    @cached_property
    def frob_root(self) -> np.ndarray:
        """The root of h lifting x^p (Hensel/Newton)."""
        if self.f == 1:
            return self.one()
        x = np.zeros(self.f, dtype=np.int64)
        x[1] = 1
        y = self.pow(x, self.p)
        for _ in range(ilog_ceil(2, self.K) + 2):
            val, der = self._eval_h(y)
            y = (y - self.mul(val, self.inv(der))) % self.mod
        return y

    def frob_matrix(self, k: int = 1) -> np.ndarray:
        """Rows: coordinates of phi^k(x^j); a @ M applies phi^k to coordinate rows."""
        k %= self.f
        return self._frob_matrices[k]

    @cached_property
    def _frob_matrices(self) -> list[np.ndarray]:
        f = self.f
        base = np.array([self.pow(self.frob_root, j) for j in range(f)], dtype=np.int64)
        mats = [np.eye(f, dtype=np.int64)]
        for _ in range(1, f):
            mats.append(mats[-1] @ base % self.mod)
        return mats

    def frob(self, a, k: int = 1) -> np.ndarray:
        return np.asarray(a, dtype=np.int64) @ self.frob_matrix(k) % self.mod


def eisenstein_coeffs(p: int, n: int) -> list[int]:
    """((1-x)^(p^n) - 1) / ((1-x)^(p^(n-1)) - 1) = sum_k (1-x)^(k p^(n-1)), constant first."""
    q = p ** (n - 1)
    out = [0] * ((p - 1) * q + 1)
    for k in range(p):
        for d in range(k * q + 1):
            out[d] += comb(k * q, d) * (-1) ** d
    return out


class FnRing:
    """O_{F_n} modulo p^K, with Galois actions and the filtration."""

    def __init__(self, p: int, f: int, n: int, K: int, modulus=None):
        if n < 1:
            raise ValueError("need n >= 1")
        self.p, self.f, self.n, self.K = p, f, n, K
        self.e = p ** (n - 1) * (p - 1)
        self.O = UnramifiedRing(p, f, K, modulus)
        self.fq = self.O.fq
        self.mod = p**K
        # exponents of Z_p act through Z/p^(n+K): U_1^(p^(n+K)) = 1 here
        self.exp_mod = p ** (n + K)
        if self.mod**2 * self.e * f >= 2**62:
            raise ValueError("precision too large for int64 arithmetic")
        self.eis = [c % self.mod for c in eisenstein_coeffs(p, n)]

    def __repr__(self):
        return f"FnRing(p={self.p}, f={self.f}, n={self.n}, K={self.K})"

    @property
    def M(self) -> int:
        """lambda_n-adic precision."""
        return self.K * self.e

    @property
    def xi(self):
        return self.fq.xi

    # ------------------------------------------------------------------
    # ring arithmetic

    def zero(self) -> np.ndarray:
        return np.zeros((self.e, self.f), dtype=np.int64)

    def one_arr(self) -> np.ndarray:
        out = self.zero()
        out[0, 0] = 1
        return out

    def reduce_poly(self, coeffs) -> np.ndarray:
        """Reduce an integer polynomial in lambda (list or (L, f) array) modulo E_n and p^K."""
        arr = np.asarray(coeffs, dtype=object)
        if arr.ndim == 1:
            arr = np.stack([arr] + [np.zeros_like(arr)] * (self.f - 1), axis=1) if self.f > 1 else arr[:, None]
        arr = arr % self.mod
        e = self.e
        for t in range(len(arr) - 1, e - 1, -1):
            c = arr[t]
            if any(c):
                for j in range(e):
                    if self.eis[j]:
                        arr[t - e + j] = (arr[t - e + j] - c * self.eis[j]) % self.mod
                arr[t] = 0
        out = self.zero()
        L = min(len(arr), e)
        out[:L] = np.array(arr[:L].tolist(), dtype=np.int64) % self.mod
        return out

    @cached_property
    def _lam_red(self) -> np.ndarray:
        """Row t: coordinates of lambda^(e+t) for t < e-1, used to fold products."""
        rows = []
        for t in range(self.e - 1):
            poly = [0] * (self.e + t + 1)
            poly[-1] = 1
            rows.append(self.reduce_poly(poly)[:, 0])
        return np.array(rows, dtype=np.int64).reshape(-1, self.e)

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        e, f, mod = self.e, self.f, self.mod
        if f == 1:
            full = np.convolve(a[:, 0], b[:, 0])[:, None] % mod
        else:
            wide = np.zeros((2 * e - 1, 2 * f - 1), dtype=np.int64)
            for i in range(f):
                for j in range(f):
                    wide[:, i + j] += np.convolve(a[:, i], b[:, j]) % mod
            full = wide % mod @ self.O.xred % mod
        out = full[:e].copy()
        if e > 1:
            out += self._lam_red.T @ full[e:] % mod
        return out % mod

    def mul_scalar(self, c, a: np.ndarray) -> np.ndarray:
        """Multiply by an O_E element given as a coordinate vector."""
        out = self.zero()
        for k in range(self.e):
            if a[k].any():
                out[k] = self.O.mul(c, a[k])
        return out

    def pow_arr(self, a: np.ndarray, k: int) -> np.ndarray:
        out, base = self.one_arr(), a
        while k:
            if k & 1:
                out = self.mul(out, base)
            k >>= 1
            if k:
                base = self.mul(base, base)
        return out

    def inv_arr(self, a: np.ndarray) -> np.ndarray:
        c0 = self.O.inv(a[0])
        x = self.zero()
        x[0] = c0
        two = 2 * self.one_arr()
        for _ in range(ilog_ceil(2, self.M) + 1):
            x = self.mul(x, (two - self.mul(a, x)) % self.mod)
        return x

    @cached_property
    def lam_powers(self) -> list[np.ndarray]:
        out = [self.one_arr()]
        lam = self.zero()
        if self.e > 1:
            lam[1, 0] = 1
        else:
            lam = self.reduce_poly([0, 1])
        for _ in range(1, self.M + self.p):
            out.append(self.mul(out[-1], lam))
        return out

    def lam_power(self, k: int) -> np.ndarray:
        if k < len(self.lam_powers):
            return self.lam_powers[k]
        return self.zero()

    # ------------------------------------------------------------------
    # substitutions lambda -> 1 - (1 - lambda)^g

    def _binom_quotient(self, g: int) -> np.ndarray:
        """(1 - (1-lambda)^g) / lambda, reduced."""
        poly = [(-1) ** (k + 1) * comb(g, k) for k in range(1, g + 1)]
        return self.reduce_poly(poly)

    @cached_property
    def _subst_cache(self) -> dict:
        return {}

    def subst_data(self, g: int):
        """(matrix, principal unit part of s/lambda) for s = 1 - (1-lambda)^g."""
        g %= self.p**self.n
        if g in self._subst_cache:
            return self._subst_cache[g]
        h = self._binom_quotient(g)
        s = self.mul(h, self.lam_power(1))
        rows = [self.one_arr()[:, 0]]
        cur = self.one_arr()
        for _ in range(1, self.e):
            cur = self.mul(cur, s)
            rows.append(cur[:, 0])
        G = np.array(rows, dtype=np.int64)
        # s/lambda has residue g; divide by its Teichmüller lift to make it principal
        t = pow(int(h[0, 0]) % self.mod, 1, self.mod)
        tm = t
        for _ in range(self.K + 1):
            tm = pow(tm, self.p, self.mod)
        hp = self.mul_scalar(self.O.inv(np.array([tm] + [0] * (self.f - 1), dtype=np.int64)), h)
        self._subst_cache[g] = (G, hp)
        return G, hp

    def substitute(self, a: np.ndarray, G: np.ndarray) -> np.ndarray:
        return G.T @ a % self.mod

    @cached_property
    def gamma_exponent(self) -> int:
        return 1 + self.p

    def delta_exponent(self, index: int) -> int:
        return omega_power(index, 1, self.p, self.n).residue

    # ------------------------------------------------------------------
    # units

    def unit(self, arr, val: int = 0) -> "FnUnit":
        return FnUnit(self, val, np.asarray(arr, dtype=np.int64) % self.mod)

    def one(self) -> "FnUnit":
        return FnUnit(self, 0, self.one_arr())

    def lam(self) -> "FnUnit":
        return FnUnit(self, 1, self.one_arr())

    def zeta(self) -> "FnUnit":
        return self.unit((self.one_arr() - self.lam_power(1)) % self.mod)

    def binomial(self, b, k: int) -> "FnUnit":
        """1 + b~ lambda^k with b~ the coordinate lift of b in F_q (or an O_E vector)."""
        c = np.asarray(b, dtype=np.int64)
        return self.unit((self.one_arr() + self.mul_scalar(c, self.lam_power(k))) % self.mod)

    def constant(self, c) -> "FnUnit":
        arr = self.zero()
        arr[0] = np.asarray(c, dtype=np.int64) % self.mod
        return self.unit(arr)

    # ------------------------------------------------------------------
    # filtration

    def valuation(self, x: np.ndarray):
        """(lambda-adic valuation, residue of x / lambda^val) or (None, None) if x = 0 here."""
        p, e, K = self.p, self.e, self.K
        best, lead = None, None
        for k in range(e):
            row = x[k]
            if not row.any():
                continue
            v = min(_vp(int(c), p, K) for c in row)
            d = e * v + k
            if best is None or d < best:
                best = d
        if best is None:
            return None, None
        k = best % e
        v = best // e
        row = x[k]
        lead = tuple(((int(c) // p**v) * (-1) ** v) % p for c in row)
        return best, lead

    def classify(self, z: "FnUnit", r: int | None = None, check_eigen: bool = False) -> FiltrationClass:
        if z.val % self.exp_mod:
            raise ValueError("classify needs a unit (valuation component 0)")
        edge = self.M - self.p + 1
        x = z.arr.copy()
        x[0, 0] = (x[0, 0] - 1) % self.mod
        d, lead = self.valuation(x)
        if d is None or d >= edge:
            cls = FiltrationClass(None, None, edge)
        else:
            cls = FiltrationClass(d, lead, edge)
            if r is not None and (d - r) % (self.p - 1):
                raise NotInEigenspace(f"leading depth {d} is not congruent to r={r} mod p-1")
        if check_eigen and r is not None and not self.in_eigenspace(z, r):
            raise NotInEigenspace("delta action does not match omega^r")
        return cls

    def coeff_at(self, z: "FnUnit", t: int):
        """Residue of (z - 1)/lambda^t, given z - 1 in lambda^t O."""
        x = z.arr.copy()
        x[0, 0] = (x[0, 0] - 1) % self.mod
        d, lead = self.valuation(x)
        if d is None or d > t:
            return self.fq.zero
        if d < t:
            raise ValueError(f"z - 1 has valuation {d} < {t}")
        return lead

    def project(self, z: "FnUnit", r: int) -> "FnUnit":
        out = self.one()
        m = self.exp_mod
        inv = pow(self.p - 1, -1, m)
        for k in range(self.p - 1):
            e = omega_power(k, -r, self.p, self.n + self.K).residue * inv % m
            out = out * z.act_delta(k).zp_pow(e)
        return out

    def in_eigenspace(self, z: "FnUnit", r: int) -> bool:
        for k in range(1, self.p - 1):
            if z.act_delta(k) != z.zp_pow(omega_power(k, r, self.p, self.n + self.K).residue):
                return False
        return True

    def sample_element(self, i: int, leading, r: int, seed: int = 0) -> "FnUnit":
        rng = random.Random(seed)
        arr = self.one_arr() + self.mul_scalar(self.O.lift(leading), self.lam_power(i))
        for k in range(i + 1, self.M):
            c = np.array([rng.randrange(self.p) for _ in range(self.f)], dtype=np.int64)
            arr = arr + self.mul_scalar(c, self.lam_power(k))
        z = self.unit(arr % self.mod)
        return z if r is None else self.project(z, r)

    # ------------------------------------------------------------------
    # module action

    def t_powers(self, z: "FnUnit", dmax: int, cache: list | None = None) -> list:
        out = cache if cache is not None else [z]
        if not out:
            out.append(z)
        while len(out) <= dmax:
            out.append(out[-1].act_T())
        return out

    def apply_A(self, a: IwasawaElem, z: "FnUnit", cache: list | None = None) -> "FnUnit":
        support = a.support()
        if not support:
            return self.one()
        tp = self.t_powers(z, max(d for d, _ in support), cache)
        out = self.one()
        for d, k in support:
            out = out * tp[d].act_phi(k).zp_pow(int(a.coeffs[d, k]))
        return out

    def apply_symbolic(self, sym: Symbolic, gens: dict, caches: dict | None = None) -> "FnUnit":
        caches = caches if caches is not None else {}
        out = self.one()
        m = self.exp_mod
        for t in sym.terms:
            if t.gen not in gens:
                raise KeyError(f"generator {t.gen!r} not supplied")
            cache = caches.setdefault(t.gen, [gens[t.gen]])
            base = self.t_powers(gens[t.gen], t.tpow, cache)[t.tpow]
            c = t.coeff.numerator * pow(t.coeff.denominator, -1, m) % m
            e = c * self.p ** (t.rho + sym.pexp) % m
            if e == 0:
                continue
            if t.vartheta is None:
                out = out * base.act_phi(-t.rho).zp_pow(e)
            else:
                vt = vartheta(t.vartheta[0], t.vartheta[1], self.f, self.p, self.n + self.K)
                for k, a in enumerate(vt.coeffs):
                    if a:
                        out = out * base.act_phi(k - t.rho).zp_pow(e * a)
        return out

    # ------------------------------------------------------------------
    # p-th roots

    def pth_root(self, z: "FnUnit") -> "FnUnit | None":
        """A p-th root of the principal unit z by graded approximation, or None."""
        p, e, n = self.p, self.e, self.n
        x = self.one()
        resid = z
        pn = p**n
        while True:
            cls = self.classify(resid)
            if cls.beyond:
                return x
            d, c = cls.depth, cls.leading
            if d < pn:
                if d % p:
                    return None
                k, b = d // p, self.fq.frobenius(c, self.f - 1)
            elif d == pn:
                try:
                    b = _artin_schreier(self, c)
                except modlinalg.Infeasible:
                    return None
                k = p ** (n - 1)
            else:
                k, b = d - e, self.fq.neg(c)
                if k <= p ** (n - 1):
                    return None
            fac = self.binomial(b, k)
            x = x * fac
            resid = resid / fac.zp_pow(p)


def _artin_schreier(R: FnRing, c) -> tuple:
    """b with b^p - b = c in F_q, constant coordinate cleared."""
    b, _ = modlinalg.linear_solve_fp(R.fq.artin_schreier_matrix(), np.array(c, dtype=np.int64), R.p)
    b = [int(v) % R.p for v in b]
    b[0] = 0
    return tuple(b)


class FnUnit:
    """lambda_n^val * u with u a principal unit of O_{F_n} mod p^K."""

    __slots__ = ("ring", "val", "arr")

    def __init__(self, ring: FnRing, val: int, arr: np.ndarray):
        self.ring = ring
        self.val = val % ring.exp_mod
        self.arr = arr

    def _check(self, other):
        if other.ring is not self.ring:
            raise ValueError("units from different rings")

    def __mul__(self, other: "FnUnit") -> "FnUnit":
        self._check(other)
        return FnUnit(self.ring, self.val + other.val, self.ring.mul(self.arr, other.arr))

    def inv(self) -> "FnUnit":
        return FnUnit(self.ring, -self.val, self.ring.inv_arr(self.arr))

    def __truediv__(self, other: "FnUnit") -> "FnUnit":
        return self * other.inv()

    def __pow__(self, k: int) -> "FnUnit":
        return self.zp_pow(k)

    def zp_pow(self, e: int) -> "FnUnit":
        R = self.ring
        e %= R.exp_mod
        return FnUnit(R, self.val * e, R.pow_arr(self.arr, e))

    def __eq__(self, other):
        return (isinstance(other, FnUnit) and other.ring is self.ring and self.val == other.val
                and bool((self.arr == other.arr).all()))

    def __hash__(self):
        return hash((self.val, self.arr.tobytes()))

    def is_one(self) -> bool:
        return self.val == 0 and bool((self.arr == self.ring.one_arr()).all())

    def depth(self):
        """Valuation of u - 1 (None when u = 1 at this precision)."""
        x = self.arr.copy()
        x[0, 0] = (x[0, 0] - 1) % self.ring.mod
        return self.ring.valuation(x)[0]

    # Galois actions

    def _subst(self, g: int) -> "FnUnit":
        R = self.ring
        G, hp = R.subst_data(g)
        out = R.substitute(self.arr, G)
        if self.val:
            out = R.mul(out, R.pow_arr(hp, self.val))
        return FnUnit(R, self.val, out)

    def act_gamma(self) -> "FnUnit":
        return self._subst(self.ring.gamma_exponent)

    def act_gamma_power(self, k: int) -> "FnUnit":
        return self._subst(pow(self.ring.gamma_exponent, k, self.ring.p**self.ring.n))

    def act_delta(self, index: int) -> "FnUnit":
        if index % (self.ring.p - 1) == 0:
            return self
        return self._subst(self.ring.delta_exponent(index))

    def act_phi(self, k: int = 1) -> "FnUnit":
        R = self.ring
        k %= R.f
        if k == 0:
            return self
        return FnUnit(R, self.val, self.arr @ R.O.frob_matrix(k) % R.mod)

    def act_T(self) -> "FnUnit":
        return self.act_gamma() / self

    def norm_phi(self) -> "FnUnit":
        out = self
        for k in range(1, self.ring.f):
            out = out * self.act_phi(k)
        return out

    def norm_gamma(self) -> "FnUnit":
        """Product over Gamma_n = Gal(F_n/F_1)."""
        out = self
        cur = self
        for _ in range(1, self.ring.p ** (self.ring.n - 1)):
            cur = cur.act_gamma()
            out = out * cur
        return out

    def render(self, max_terms: int = 4) -> str:
        R = self.ring
        parts = []
        for k in range(R.e):
            if k == 0:
                row = self.arr[0].copy()
                row[0] -= 1
            else:
                row = self.arr[k]
            if row.any():
                parts.append(f"[{','.join(str(int(c)) for c in row)}]λ^{k}")
            if len(parts) >= max_terms:
                parts.append("…")
                break
        body = "1" + ("".join(" + " + s for s in parts) if parts else "")
        return (f"λ^{self.val}·" if self.val else "") + f"({body})"

    def __repr__(self):
        return f"FnUnit({self.render()})"

    def to_json(self) -> dict:
        R = self.ring
        return {"p": R.p, "f": R.f, "n": R.n, "K": R.K, "M": R.M, "val": int(self.val),
                "coeffs": self.arr.tolist()}


# ---------------------------------------------------------------------------
# norm and trace between consecutive levels


class LevelStep:
    """F_{n+1} over F_n: conjugates and the change of basis back to the lambda_n basis."""

    def __init__(self, lower: FnRing, upper: FnRing):
        if upper.n != lower.n + 1 or upper.K != lower.K or upper.p != lower.p or upper.f != lower.f:
            raise ValueError("need consecutive levels with equal p-adic precision")
        self.lower, self.upper = lower, upper
        p, n = lower.p, lower.n
        # generator of Gal(F_{n+1}/F_n) acts by zeta -> zeta^(1+p^n)
        self.exponents = [pow(1 + p**n, k, p ** (n + 1)) for k in range(p)]

    @cached_property
    def embed_lambda(self) -> np.ndarray:
        """lambda_n = 1 - (1 - lambda_{n+1})^p inside the upper ring."""
        U = self.upper
        return U.mul(U._binom_quotient(U.p), U.lam_power(1))

    @cached_property
    def basis_inverse(self) -> np.ndarray:
        """Inverse of the matrix whose row j*e_n + k is lambda_n^k lambda_{n+1}^j (upper coordinates)."""
        U, L = self.upper, self.lower
        lam_n = self.embed_lambda
        rows = []
        pw = [U.one_arr()]
        for _ in range(1, L.e):
            pw.append(U.mul(pw[-1], lam_n))
        for j in range(U.p):
            for k in range(L.e):
                rows.append(U.mul(pw[k], U.lam_power(j))[:, 0])
        B = np.array(rows, dtype=np.int64)
        size = len(B)
        H = modlinalg.howell_form(np.hstack([B, np.eye(size, dtype=np.int64)]), U.p, U.K)
        if len(H.rows) < size or any(c != t or v != 0 for t, (c, v) in enumerate(H.pivots[:size])):
            raise ArithmeticError("change of basis is not invertible")
        return H.rows[:size, size:] % U.mod

    def descend(self, x: np.ndarray) -> np.ndarray:
        """Lower-level coordinates of an upper-level array lying in O_{F_n}."""
        c = self.basis_inverse.T @ x % self.upper.mod
        e = self.lower.e
        if c[e:].any():
            raise ArithmeticError("element does not lie in the lower field")
        return c[:e].copy()

    def conjugates(self, z: FnUnit) -> list[FnUnit]:
        return [z if g == 1 else z._subst(g) for g in self.exponents]

    def norm(self, z: FnUnit) -> FnUnit:
        out = self.upper.one()
        for c in self.conjugates(FnUnit(self.upper, 0, z.arr)):
            out = out * c
        return FnUnit(self.lower, z.val, self.descend(out.arr))

    def trace_arr(self, x: np.ndarray) -> np.ndarray:
        U = self.upper
        total = U.zero()
        for g in self.exponents:
            G, _ = U.subst_data(g)
            total = (total + U.substitute(x, G)) % U.mod
        return self.descend(total)


# ---------------------------------------------------------------------------
# graded solvers at level n


def _leading(R: FnRing, z: FnUnit):
    """Exact depth and leading residue of a principal unit, ignoring the refusal margin."""
    x = z.arr.copy()
    x[0, 0] = (x[0, 0] - 1) % R.mod
    return R.valuation(x)


def solve_norm_phi_n(R: FnRing, target: FnUnit, r: int | None = None) -> FnUnit:
    if target.val:
        raise ValueError("solve_norm_phi_n needs a principal unit")
    xi = np.array(R.xi, dtype=np.int64)
    x, resid = R.one(), target
    while True:
        k, c = _leading(R, resid)
        if k is None:
            break
        if any(c[1:]):
            raise GradedSolveError(k, "norm residual has a coefficient outside F_p")
        fac = R.binomial(xi * c[0] % R.p, k)
        x = x * fac
        resid = resid / fac.norm_phi()
    return R.project(x, r) if r is not None else x


def solve_phi_minus_1_n(R: FnRing, target: FnUnit, r: int | None = None) -> FnUnit:
    if target.val:
        raise ValueError("solve_phi_minus_1_n needs a principal unit")
    if not target.norm_phi().is_one():
        raise ValueError("target does not have trivial norm")
    x, resid = R.one(), target
    while True:
        k, c = _leading(R, resid)
        if k is None:
            break
        try:
            b = _artin_schreier(R, c)
        except modlinalg.Infeasible:
            raise GradedSolveError(k, "Artin-Schreier step has nonzero trace") from None
        fac = R.binomial(b, k)
        x = x * fac
        resid = resid * fac / fac.act_phi(1)
    return R.project(x, r) if r is not None else x


def _fix_leading_n(R: FnRing, x: FnUnit, depth: int, want, r: int) -> FnUnit:
    have = R.coeff_at(x, depth)
    if tuple(have) == tuple(want):
        return x
    eta = _artin_schreier(R, R.fq.sub(want, have))
    z = R.project(R.binomial(eta, depth), r)
    return x * z.act_phi(1) / z


def solve_unramified_h90(R: FnRing, x, first=None):
    """v in O_E with phi(v)/v = x, x = 1 mod p, built p-adic digit by digit.

    ``first`` prescribes the digit at p^1 (it must differ from the natural
    solution by an element of F_p).
    """
    O, p = R.O, R.p
    x = np.asarray(x, dtype=np.int64) % R.mod
    v = O.one()
    resid = x
    for j in range(1, R.K):
        d = (resid - O.one()) % R.mod
        if (d % p**j).any():
            raise ArithmeticError("residual lost its p-adic order")
        c = tuple(int(t) // p**j % p for t in d)
        try:
            b = _artin_schreier(R, c)
        except modlinalg.Infeasible:
            raise GradedSolveError(j * R.e, "unramified Hilbert 90 step has nonzero trace") from None
        if j == 1 and first is not None:
            shift = R.fq.sub(tuple(first), b)
            if any(shift[1:]):
                raise GradedSolveError(R.e, "prescribed digit is not a solution")
            b = tuple(int(t) % p for t in first)
        fac = (O.one() + p**j * np.array(b, dtype=np.int64)) % R.mod
        v = O.mul(v, fac)
        resid = O.mul(O.mul(resid, fac), O.inv(O.frob(fac)))
    if (resid - O.one()).any() % R.mod:
        raise ArithmeticError("unramified Hilbert 90 did not converge")
    return v


@dataclass
class GeneratorSetN:
    r: int
    n: int
    u: FnUnit
    pi: FnUnit | None = None
    v: FnUnit | None = None
    v_n: FnUnit | None = None
    w: FnUnit | None = None
    y: FnUnit | None = None
    certificates: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {"u": self.u}
        for name in ("w", "v", "pi"):
            if getattr(self, name) is not None:
                out[name] = getattr(self, name)
        return out

    def residuals_vanish(self) -> bool:
        return all(v is None or v is True for v in self.certificates.values())


def _residual(z: FnUnit):
    if z.val:
        return "val"
    return z.depth()


def make_generators_n(R: FnRing, r: int) -> GeneratorSetN:
    p, xi, fq, n = R.p, R.xi, R.fq, R.n
    if n < 2:
        raise ValueError("level-n generators need n >= 2")
    if not 2 <= r <= p:
        raise ValueError(f"need 2 <= r <= p, got {r}")
    if r <= p - 2:
        return GeneratorSetN(r, n, R.project(R.binomial(xi, r), r))
    if r == p - 1:
        pi = R.project(R.lam(), r)
        target = pi.act_gamma() / pi
        u = solve_norm_phi_n(R, target, r)
        u = _fix_leading_n(R, u, p - 1, xi, r)
        x = u.norm_gamma()
        if x.val or x.arr[1:].any():
            raise ArithmeticError("N_Gamma u does not lie in E")
        xinv = R.O.inv(x.arr[0])
        first = fq.frobenius(xi, n - 2)
        vn_c = solve_unramified_h90(R, xinv, first)
        v_n = R.constant(vn_c)
        v = R.constant(R.O.frob(vn_c, -(n - 2)))
        vd = (v.arr[0] - R.O.one()) % R.mod
        mod2 = (vd % p**2 if R.K >= 2 else vd)
        certs = {
            "pi_phi_fixed": _residual(pi.act_phi(1) / pi),
            "norm_u_equals_pi_gamma_minus_1": _residual(u.norm_phi() / target),
            "norm_gamma_u_equals_v_n_1_minus_phi": _residual(x / (v_n / v_n.act_phi(1))),
            "v_is_1_plus_p_xi_mod_p2": bool(((mod2 - p * np.array(xi)) % p**min(2, R.K) == 0).all()),
        }
        return GeneratorSetN(r, n, u, pi=pi, v=v, v_n=v_n, certificates=certs)
    zeta = R.zeta()
    w = solve_norm_phi_n(R, zeta, r)
    w = _fix_leading_n(R, w, 1, fq.neg(xi), r)
    target = w.act_gamma() / (w * w.zp_pow(p))
    up = solve_phi_minus_1_n(R, target, r)
    a = fq.sub(R.coeff_at(up, p), xi)
    if any(a[1:]):
        raise GradedSolveError(p, "u_p leading coefficient differs from xi outside F_p")
    if a[0]:
        up = up / R.project(R.binomial(a, p), r)
    wp = w.act_phi(-1).zp_pow(p)
    y = up * wp
    shift = fq.add(R.coeff_at(y, 2 * p - 1), xi)
    if any(shift[1:]):
        raise GradedSolveError(2 * p - 1, "y correction is not in F_p")
    if shift[0]:
        up = up / R.project(R.binomial(shift, 2 * p - 1), r)
        y = up * wp
    certs = {
        "norm_w_equals_zeta": _residual(w.norm_phi() / zeta),
        "u_phi_minus_1_equals_w_gamma_minus_1_minus_p": _residual((up.act_phi(1) / up) / target),
    }
    return GeneratorSetN(r, n, up, w=w, y=y, certificates=certs)


# ---------------------------------------------------------------------------
# symbolic special elements at level n


def omega_symbolic(ix: IndexParams, n: int, m: int, l: int) -> Symbolic:
    if ix.r != ix.p - 1:
        raise ValueError("omega is defined only for r = p-1")
    if not 0 <= l <= m <= n - 2:
        raise ValueError(f"need 0 <= l <= m <= n-2, got n={n}, m={m}, l={l}")
    p = ix.p
    terms = [Term(m - k, p ** (n - m + k - 2) * (p - 1) + p**k - 1, vartheta=(n - m, k)) for k in range(l + 1)]
    terms.append(Term(0, 0, coeff=-1, gen="v"))
    return Symbolic(tuple(terms), _labels(ix.r, n))


def in_omega_band(ix: IndexParams, n: int, m: int, i: int) -> bool:
    e = ix.e_of(n)
    return ix.r == ix.p - 1 and ix.p**m < i - e < ix.p ** (m + 1)


def kappa_n_symbolic(ix: IndexParams, n: int, m: int, i: int) -> Symbolic:
    if i > ix.p**n:
        raise ValueError(f"kappa_n needs i <= p^n, got {i}")
    if in_omega_band(ix, n, m, i):
        sig = ix.sigma(m + 1, i)
        terms = [Term(k, ix.theta_m(k, i) - 1, vartheta=(n - m, m - k)) for k in range(sig, m + 1)]
        terms.append(Term(0, 0, coeff=-1, gen="v"))
        return Symbolic(tuple(terms), _labels(ix.r, n))
    return kappa_symbolic(ix, m, i, n)


def mu_shift(ix: IndexParams, n: int, i: int) -> tuple[int, int]:
    """(mu, i - mu e_n) with mu least such that i <= mu e_n + p^n."""
    e = ix.e_of(n)
    mu = max(0, -(-(i - ix.p**n) // e))
    return mu, i - mu * e


def gen_set_fin_symbolic(ix: IndexParams, n: int, i: int) -> list[Symbolic]:
    ix.check_i(i)
    mu, i0 = mu_shift(ix, n, i)
    s = ix.s_of(i0)
    out = [kappa_n_symbolic(ix, n, m, i0).scaled(mu) for m in range(s + 1)]
    lab = _labels(ix.r, n)
    if ix.r == ix.p - 1 and i <= (mu + 1) * ix.e_of(n):
        out.append(Symbolic((Term(0, 0, gen="v"),), lab, pexp=mu))
    if ix.r == ix.p:
        out.append(Symbolic((Term(0, 0, gen="w"),), lab, pexp=mu + ilog_ceil(ix.p, i0)))
    return out


# ---------------------------------------------------------------------------
# evaluation context


class FiniteLevel:
    """Level-n context: ring, generators and the protocol used by GenerationChecker."""

    def __init__(self, p: int, f: int, r: int, n: int, M: int, modulus=None):
        self.ix = IndexParams(p, r)
        self.n = n
        e = p ** (n - 1) * (p - 1)
        K = max(2, -(-M // e))
        self.field = FnRing(p, f, n, K, modulus)
        self.gens = make_generators_n(self.field, r)
        self._caches: dict = {}

    @property
    def p(self):
        return self.ix.p

    @property
    def r(self):
        return self.ix.r

    @property
    def xi(self):
        return self.field.xi

    def evaluate(self, sym: Symbolic) -> FnUnit:
        return self.field.apply_symbolic(sym, self.gens.as_dict(), self._caches)

    def classify(self, z: FnUnit) -> FiltrationClass:
        return self.field.classify(z, self.r)

    def t_power(self, gen: str, d: int) -> FnUnit:
        cache = self._caches.setdefault(gen, [self.gens.as_dict()[gen]])
        return self.field.t_powers(cache[0], d, cache)[d]

    def apply(self, a: IwasawaElem, gen: str = "u") -> FnUnit:
        cache = self._caches.setdefault(gen, [self.gens.as_dict()[gen]])
        return self.field.apply_A(a, cache[0], cache)

    def alpha(self, m: int, j: int):
        if self.ix.phi_m(m, j) >= self.p**self.n - 1:
            raise ValueError("alpha_n needs phi_m(j) < p^n - 1")
        sym = alpha_symbolic(self.ix, m, j, self.n)
        return sym, self.evaluate(sym)

    def beta(self, m: int, l: int):
        if self.ix.phi_m(m, self.p**l - 1) > self.p**self.n:
            raise ValueError("beta_n needs phi_m(p^l - 1) <= p^n")
        sym = beta_symbolic(self.ix, m, l, self.n)
        return sym, self.evaluate(sym)

    def omega(self, m: int, l: int):
        sym = omega_symbolic(self.ix, self.n, m, l)
        return sym, self.evaluate(sym)

    def kappa(self, m: int, i: int):
        sym = kappa_n_symbolic(self.ix, self.n, m, i)
        return sym, self.evaluate(sym)

    def gen_set(self, i: int):
        return [(sym, self.evaluate(sym)) for sym in gen_set_fin_symbolic(self.ix, self.n, i)]

    # protocol for the generation checker

    @property
    def cover_gens(self) -> tuple:
        r, p = self.r, self.p
        if r == p:
            return ("u", "w")
        if r == p - 1:
            return ("u", "v")
        return ("u",)

    @property
    def base_depth(self) -> dict:
        p, r = self.p, self.r
        return {"u": min(r, p), "w": 1, "v": self.ix.e_of(self.n)}

    def pow_depth(self, j: int) -> int:
        return min(self.p * j, j + self.ix.e_of(self.n))

    def start_depth(self) -> int:
        return 1 if self.r == self.p else self.r

    def descent_ops(self):
        return _FinOps()

    def depth_of(self, z: FnUnit) -> FiltrationClass:
        return self.field.classify(z)

    def relations(self, B: int, f: int, p: int, K: int) -> list[dict]:
        fnc = fn_poly_coeffs(self.n, p)
        fn = IwasawaElem.from_poly(fnc, B, f, p, K)
        out = [{g: fn} for g in self.cover_gens]
        if self.r == p:
            phi_minus_1 = IwasawaElem.monomial(B, f, p, K, 0, PhiGroupElem.phi_power(1, f, p, K)) - \
                IwasawaElem.monomial(B, f, p, K, 0, 1)
            t_minus_p = IwasawaElem.monomial(B, f, p, K, 1, 1) - IwasawaElem.monomial(B, f, p, K, 0, p)
            out.append({"u": phi_minus_1, "w": -t_minus_p})
        elif self.r == p - 1:
            ng = IwasawaElem.from_poly(norm_gamma_coeffs(self.n, p), B, f, p, K)
            # u^{N_Gamma} = v_n^{1-phi} and v_n = v^{phi^(n-2)}
            twist = self.n - 2
            one_minus_phi = IwasawaElem.monomial(B, f, p, K, 0, PhiGroupElem.phi_power(twist, f, p, K)) - \
                IwasawaElem.monomial(B, f, p, K, 0, PhiGroupElem.phi_power(twist + 1, f, p, K))
            out.append({"v": IwasawaElem.monomial(B, f, p, K, 1, 1)})
            out.append({"u": ng, "v": -one_minus_phi})
        return out

    def nonmembership_sample(self, m: int, j: int, trials: int = 200, seed: int = 0, c_terms: int = 2) -> dict:
        """Random (p^m b T^j + c) u + (d w or d v) must stay outside the level-n bound."""
        ix, R = self.ix, self.field
        p, f, n = ix.p, R.f, self.n
        pn = p**n
        if ix.r == p:
            if ix.phi_m(m, j) > pn:
                raise ValueError("need phi_m(j) <= p^n")
            bound = min(ix.phi_prime_m(m, j) + p - 1, pn + p - 1)
        elif ix.r == p - 1 and m <= n - 2 and ix.phi_m(m, j) < pn:
            bound = ix.phi_prime_nm(n, m, j) + p - 1
        else:
            if ix.phi_m(m, j) >= pn - 1:
                raise ValueError("need phi_m(j) < p^n - 1")
            bound = ix.phi_m(m, j) + p - 1
        if R.M - p + 1 <= bound:
            raise ValueError(f"lambda precision {R.M} too small to certify depth < {bound}")
        rng = random.Random(seed)
        B = j + c_terms + 1
        K = R.n + R.K
        mod = p**K
        counterexamples = []
        for trial in range(trials):
            coeffs = np.zeros((B, f), dtype=np.int64)
            while True:
                b = [rng.randrange(mod) for _ in range(f)]
                if any(x % p for x in b):
                    break
            coeffs[j] = np.array(b) * p**m % mod
            for d in range(j + 1, B):
                coeffs[d] = [rng.randrange(mod) for _ in range(f)]
            z = self.apply(IwasawaElem(coeffs, p, K), "u")
            dvec = None
            if ix.r == p:
                dvec = [rng.randrange(mod) for _ in range(f)]
                z = z * self.apply(IwasawaElem.monomial(1, f, p, K, 0, PhiGroupElem(tuple(dvec), p, K)), "w")
            elif ix.r == p - 1:
                dvec = [rng.randrange(mod)]
                z = z * self.gens.v.zp_pow(dvec[0])
            cls = R.classify(z, ix.r)
            if cls.depth_at_least(bound):
                counterexamples.append({"trial": trial, "b": b, "coeffs": coeffs.tolist(), "d": dvec,
                                        "class": cls.to_json()})
        return {"m": m, "j": j, "bound": bound, "trials": trials, "counterexamples": counterexamples}


class _FinOps:
    def leading(self, z: FnUnit, j: int):
        R = z.ring
        x = z.arr.copy()
        x[0, 0] = (x[0, 0] - 1) % R.mod
        d, lead = R.valuation(x)
        if d is None or d > j:
            return (0,) * R.f
        if d < j:
            raise ArithmeticError(f"descent invariant broken: depth {d} < {j}")
        return lead

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        return a.inv()

    def power(self, a, k: int):
        return a.zp_pow(k)

    def ppow(self, a):
        return a.zp_pow(a.ring.p)


# ---------------------------------------------------------------------------
# generation and minimality at level n


def generation_check_n(level: FiniteLevel, checker: GenerationChecker, i: int) -> dict:
    ix, n = level.ix, level.n
    full = gen_set_fin_symbolic(ix, n, i)
    R = level.field
    report = {"i": i, "n": n, "size": len(full), "generates": checker.generates(full, i),
              "inside_V_i": all(R.classify(level.evaluate(s)).depth_at_least(i) for s in full)}
    generating = []
    for size in range(len(full) + 1):
        for sub in combinations(range(len(full)), size):
            if checker.generates([full[k] for k in sub], i):
                generating.append(sub)
    min_size = min((len(s) for s in generating), default=None)
    report["min_generating_size"] = min_size
    report["cocardinality_ok"] = min_size is not None and len(full) - min_size <= 1
    report["size_ok"] = len(full) <= n + 1
    if ix.r == ix.p:
        kappa_idx = set(range(len(full) - 1))
        report["kappas_all_needed"] = all(kappa_idx <= set(s) for s in generating)
        # p^n w_n lies in A_n u_n, so the w_n-power can only matter below p^(n-1)
        mu, i0 = mu_shift(ix, n, i)
        report["w_needed"] = all(len(full) - 1 in s_ for s_ in generating)
        report["w_needed_predicted"] = i0 <= ix.p ** (n - 1)
        report["w_rule_ok"] = report["w_needed"] == report["w_needed_predicted"]
    return report


def relation_kernel_n(ix: IndexParams, n: int, i: int, f: int = 1) -> dict:
    """Solutions of sum c_m kappa_m = b f_n u modulo (p^a, T^b), r <= p-2.

    For each k the reduction of c_k modulo (p, T^(eps_k + 1), phi - 1) must be
    q_k b(0) T^eps_k with q_k independent of the solution.
    """
    if ix.r > ix.p - 2:
        raise ValueError("relation_kernel_n covers r <= p-2")
    ix.check_i(i)
    # the p^mu map identifies V_{n,i0} with V_{n,i}, so work at i0 <= p^n
    i_in = i
    _, i = mu_shift(ix, n, i)
    p = ix.p
    s = ix.s_of(i)
    a = s + 2
    B = max(ix.theta_m(0, i) + 2, p ** (n - 1) + 1)
    cov = Cover(("u",), f, p, a, B)
    vecs = [cov.vector(kappa_symbolic(ix, m, i)) for m in range(s + 1)]
    fn = IwasawaElem.from_poly(fn_poly_coeffs(n, p), B, f, p, a).coeffs.reshape(-1)
    vecs.append((-fn) % p**a)
    M = np.vstack([cov.span_rows(v) for v in vecs])
    ker = modlinalg.left_kernel(M, p, a)
    block = cov.block
    qs: dict[int, set] = {m: set() for m in range(s + 1)}
    violations = []
    for row in ker:
        bvec = row[(s + 1) * block:(s + 2) * block].reshape(B, f)
        b0 = int(bvec[0].sum()) % p
        for m in range(s + 1):
            cm = row[m * block:(m + 1) * block].reshape(B, f)
            eps = ix.epsilon_m(m, i)
            red = cm[: eps + 1].sum(axis=1) % p
            if red[:eps].any():
                violations.append({"m": m, "reason": "low T-degree", "coeff": red.tolist()})
                continue
            top = int(red[eps])
            if b0 == 0:
                if top:
                    violations.append({"m": m, "reason": "nonzero with b in I", "coeff": red.tolist()})
            else:
                qs[m].add(top * pow(b0, -1, p) % p)
    for m, vals in qs.items():
        if len(vals) > 1:
            violations.append({"m": m, "reason": "q_k not unique", "values": sorted(vals)})
    return {"i": i_in, "i0": i, "n": n, "s": s, "kernel_rank": int(len(ker)),
            "q": {m: (min(v) if v else None) for m, v in qs.items()}, "violations": violations}
