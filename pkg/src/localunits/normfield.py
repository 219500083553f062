"""The field of norms F_q((lambda)) truncated at lambda^N, and its pro-p completion.

An element of D is stored as ``lambda^val * u`` where ``val`` is a p-adic
integer (residue mod p^K) and ``u`` is a principal unit given by its
coefficient array of shape (N, f) over F_p: row k holds the F_q coefficient
of lambda^k in the polynomial basis of the residue field, and row 0 is the
constant 1.  Teichmüller factors are dropped since they die in D.

All Galois actions are exact modulo lambda^N.  The substitutions
lambda -> gamma(lambda) and lambda -> delta(lambda) have F_p coefficients, so
they act on coefficient arrays through cached F_p matrices whose row k is
the truncated series of (substituted lambda)^k.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .fq import FqContext
from .groupring import IwasawaElem, Symbolic, vartheta
from .indexfn import ilog_ceil
from .padic import delta_lift, omega_power


class NotInEigenspace(ValueError):
    """The element fails the eigenspace test required by the classifier."""


class PrecisionError(ArithmeticError):
    """The requested computation exceeds the configured precision."""


@dataclass(frozen=True)
class FiltrationClass:
    """Depth i and leading coefficient, or ``depth=None`` when beyond precision."""

    depth: int | None
    leading: tuple | None
    bound: int

    @property
    def beyond(self) -> bool:
        return self.depth is None

    def depth_at_least(self, i: int) -> bool:
        if self.beyond:
            return self.bound >= i
        return self.depth >= i

    def to_json(self) -> dict:
        return {"depth": self.depth, "leading": list(self.leading) if self.leading else None,
                "beyond_precision": self.beyond, "bound": self.bound}

    def __str__(self):
        if self.beyond:
            return f"beyond precision (>= {self.bound})"
        return f"V_{self.depth}({_fq_str(self.leading)})"


def _fq_str(a) -> str:
    if len(a) == 1:
        return str(a[0])
    terms = [f"{c}" if k == 0 else (f"{c}x" if k == 1 else f"{c}x^{k}") for k, c in enumerate(a) if c]
    return "+".join(terms) or "0"


class NormField:
    """Context for F_q((lambda)) modulo lambda^N with p-adic exponent precision K."""

    def __init__(self, p: int, f: int = 1, N: int = 64, K: int | None = None, modulus=None):
        if N < 2:
            raise ValueError("lambda precision N must be >= 2")
        self.p, self.f, self.N = p, f, N
        self.fq = FqContext(p, f, modulus)
        kmin = ilog_ceil(p, N) + 1
        self.K = max(K or 0, kmin)
        self.mod = p**self.K

    def __repr__(self):
        return f"NormField(p={self.p}, f={self.f}, N={self.N}, K={self.K})"

    @property
    def xi(self):
        return self.fq.xi

    # ------------------------------------------------------------------
    # raw series arithmetic on (N, f) arrays

    def _reduce(self, wide: np.ndarray) -> np.ndarray:
        if self.f == 1:
            return wide[:, :1] % self.p
        return (wide % self.p) @ self.fq.xred % self.p

    def smul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        N, f = self.N, self.f
        if f == 1:
            return (np.convolve(a[:, 0], b[:, 0])[:N] % self.p).reshape(N, 1)
        wide = np.zeros((N, 2 * f - 1), dtype=np.int64)
        for s in range(f):
            if not a[:, s].any():
                continue
            for t in range(f):
                wide[:, s + t] += np.convolve(a[:, s], b[:, t])[:N]
        return self._reduce(wide)

    def smul_many(self, X: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Multiply a stack of series X (R, N, f) by one series b."""
        N, f = self.N, self.f
        toep = [self._toeplitz(b[:, t]) for t in range(f)]
        wide = np.zeros((X.shape[0], N, 2 * f - 1), dtype=np.int64)
        for s in range(f):
            for t in range(f):
                wide[:, :, s + t] += X[:, :, s] @ toep[t]
        wide %= self.p
        if f == 1:
            return wide
        return wide @ self.fq.xred % self.p

    def _toeplitz(self, col: np.ndarray) -> np.ndarray:
        N = self.N
        M = np.zeros((N, N), dtype=np.int64)
        for k in np.nonzero(col)[0]:
            idx = np.arange(N - k)
            M[idx, idx + k] = col[k]
        return M

    def twist(self, a: np.ndarray, k: int) -> np.ndarray:
        """The p^k-th power of a series with coefficients in F_q (exact in characteristic p)."""
        if k == 0:
            return a
        step = self.p**k
        out = np.zeros_like(a)
        src = a[: (self.N - 1) // step + 1]
        coeffs = src if self.f == 1 else src @ self.fq.frob_matrix(k % self.f) % self.p
        out[::step][: len(src)] = coeffs
        return out

    def frob_coeffs(self, a: np.ndarray, k: int) -> np.ndarray:
        k %= self.f
        if k == 0:
            return a
        return a @ self.fq.frob_matrix(k) % self.p

    def one_series(self) -> np.ndarray:
        out = np.zeros((self.N, self.f), dtype=np.int64)
        out[0, 0] = 1
        return out

    def spow(self, a: np.ndarray, e: int) -> np.ndarray:
        """a^e for a principal unit series a and an integer e (any sign)."""
        e %= self.mod
        digits = []
        while e:
            digits.append(e % self.p)
            e //= self.p
        table = {0: self.one_series(), 1: a}
        out = self.one_series()
        for k, d in enumerate(digits):
            if d == 0 or self.p**k >= self.N:
                continue
            if d not in table:
                x = table[1]
                for _ in range(d - 1):
                    x = self.smul(x, a)
                table[d] = x
            out = self.smul(out, self.twist(table[d], k))
        return out

    def sinv(self, a: np.ndarray) -> np.ndarray:
        return self.spow(a, -1)

    def binomial_series(self, b, i: int, sign: int = 1) -> np.ndarray:
        """(1 + b lambda^i)^sign for sign = +-1, b in F_q, i >= 1."""
        out = self.one_series()
        b = np.array(b, dtype=np.int64) % self.p
        if sign == 1:
            if i < self.N:
                out[i] = b
            return out
        nb = tuple((-b) % self.p)
        k = 1
        pw = self.fq.one
        while i * k < self.N:
            pw = self.fq.mul(pw, nb)
            out[i * k] = pw
            k += 1
        return out

    # ------------------------------------------------------------------
    # substitution matrices

    def _power_rows(self, s: np.ndarray) -> np.ndarray:
        """Row k = s^k mod lambda^N for an F_p series s with s(0) = 0."""
        N, p = self.N, self.p
        M = np.zeros((N, N), dtype=np.int64)
        M[0, 0] = 1
        for k in range(1, N):
            if k % p == 0:
                src = M[k // p]
                M[k, ::p] = src[: (N - 1) // p + 1]
            else:
                M[k] = np.convolve(M[k - 1], s)[:N] % p
        return M

    @cached_property
    def gamma_matrix(self) -> np.ndarray:
        N, p = self.N, self.p
        M = np.zeros((N, N), dtype=np.int64)
        M[0, 0] = 1
        for k in range(1, N):
            prev = M[k - 1]
            row = np.zeros(N, dtype=np.int64)
            row[1:] += prev[:-1]
            if p < N:
                row[p:] += prev[:-p]
            if p + 1 < N:
                row[p + 1:] -= prev[: -(p + 1)]
            M[k] = row % p
        return M

    @cached_property
    def gamma_unit(self) -> np.ndarray:
        """gamma(lambda)/lambda = 1 + lambda^(p-1) - lambda^p."""
        out = self.one_series()
        if self.p - 1 < self.N:
            out[self.p - 1, 0] = 1
        if self.p < self.N:
            out[self.p, 0] = self.p - 1
        return out

    def _delta_series(self, index: int) -> np.ndarray:
        """1 - (1-lambda)^omega(delta) as an F_p series, via the base-p digit product."""
        a = delta_lift(index, self.p, self.K).residue
        N, p = self.N, self.p
        prod = np.zeros(N, dtype=np.int64)
        prod[0] = 1
        k = 0
        while a and p**k < N:
            d = a % p
            a //= p
            if d:
                fac = np.zeros(N, dtype=np.int64)
                fac[0] = 1
                fac[p**k] = p - 1
                for _ in range(d):
                    prod = np.convolve(prod, fac)[:N] % p
            k += 1
        s = (-prod) % p
        s[0] = 0
        return s

    def delta_data(self, index: int):
        index %= self.p - 1
        cache = self.__dict__.setdefault("_delta_cache", {})
        if index not in cache:
            s = self._delta_series(index)
            M = self._power_rows(s)
            c = int(s[1])
            h = np.zeros((self.N, self.f), dtype=np.int64)
            h[: self.N - 1, 0] = s[1:] * pow(c, -1, self.p) % self.p
            cache[index] = (M, h)
        return cache[index]

    def substitute(self, a: np.ndarray, M: np.ndarray) -> np.ndarray:
        return (M.T @ a) % self.p

    # ------------------------------------------------------------------
    # element constructors

    def unit(self, coeffs=None, val: int = 0) -> "NormFieldUnit":
        arr = self.one_series()
        if coeffs is not None:
            for k, c in coeffs.items() if isinstance(coeffs, dict) else enumerate(coeffs):
                if k == 0:
                    continue
                if k < self.N:
                    arr[k] = self._as_fq(c)
        return NormFieldUnit(self, val, arr)

    def _as_fq(self, c) -> np.ndarray:
        if isinstance(c, (int, np.integer)):
            return np.array(self.fq.from_int(int(c)), dtype=np.int64)
        return np.array(self.fq.elem(c), dtype=np.int64)

    def one(self) -> "NormFieldUnit":
        return NormFieldUnit(self, 0, self.one_series())

    def lam(self) -> "NormFieldUnit":
        return NormFieldUnit(self, 1, self.one_series())

    def zeta(self) -> "NormFieldUnit":
        """The norm-compatible root of unity 1 - lambda."""
        return self.unit({1: -1})

    def binomial(self, b, i: int) -> "NormFieldUnit":
        return NormFieldUnit(self, 0, self.binomial_series(b, i))

    def from_array(self, arr, val: int = 0) -> "NormFieldUnit":
        arr = np.asarray(arr, dtype=np.int64) % self.p
        if arr.shape != (self.N, self.f) or arr[0, 0] != 1 or arr[0, 1:].any():
            raise ValueError("expected a principal unit array of shape (N, f)")
        return NormFieldUnit(self, val, arr)

    # ------------------------------------------------------------------
    # projection, sampling, classification

    def project(self, z: "NormFieldUnit", r: int) -> "NormFieldUnit":
        out = self.one()
        inv = pow(self.p - 1, -1, self.mod)
        for k in range(self.p - 1):
            e = omega_power(k, -r, self.p, self.K).residue * inv % self.mod
            out = out * z.act_delta(k).zp_pow(e)
        return out

    def sample_element(self, i: int, leading, r: int, seed: int = 0, density: float = 1.0) -> "NormFieldUnit":
        """A pseudorandom element of V_i(leading) in the omega^r-eigenspace."""
        if (i - r) % (self.p - 1):
            raise ValueError(f"depth {i} not congruent to r={r} mod p-1")
        rng = random.Random(seed)
        arr = self.one_series()
        if i < self.N:
            arr[i] = self._as_fq(leading)
        for k in range(i + 1, self.N):
            if rng.random() < density:
                arr[k] = [rng.randrange(self.p) for _ in range(self.f)]
        return self.project(NormFieldUnit(self, 0, arr), r)

    def classify(self, z: "NormFieldUnit", r: int | None = None, check_eigen: bool = False) -> FiltrationClass:
        if z.val % self.mod:
            raise ValueError("classify needs a unit (valuation component 0)")
        edge = self.N - self.p + 1
        nz = np.nonzero(z.coeffs[1:].any(axis=1))[0]
        if len(nz) == 0 or nz[0] + 1 >= edge:
            cls = FiltrationClass(None, None, edge)
        else:
            i = int(nz[0]) + 1
            cls = FiltrationClass(i, tuple(int(c) for c in z.coeffs[i]), edge)
            if r is not None and (i - r) % (self.p - 1):
                raise NotInEigenspace(f"leading depth {i} is not congruent to r={r} mod p-1")
        if check_eigen and r is not None and not self.in_eigenspace(z, r):
            raise NotInEigenspace("delta action does not match omega^r")
        return cls

    def in_eigenspace(self, z: "NormFieldUnit", r: int) -> bool:
        for k in range(1, self.p - 1):
            lhs = z.act_delta(k)
            rhs = z.zp_pow(omega_power(k, r, self.p, self.K).residue)
            if lhs != rhs:
                return False
        return True

    # ------------------------------------------------------------------
    # module action of A

    def t_powers(self, z: "NormFieldUnit", dmax: int, cache: list | None = None) -> list:
        out = cache if cache is not None else [z]
        if not out:
            out.append(z)
        while len(out) <= dmax:
            out.append(out[-1].act_T())
        return out

    def apply_A(self, a: IwasawaElem, z: "NormFieldUnit", cache: list | None = None) -> "NormFieldUnit":
        if a.f != self.f:
            raise ValueError("coefficient ring mismatch")
        support = a.support()
        if not support:
            return self.one()
        dmax = max(d for d, _ in support)
        tp = self.t_powers(z, dmax, cache)
        out = self.one()
        for d, k in support:
            e = int(a.coeffs[d, k])
            out = out * tp[d].act_phi(k).zp_pow(e)
        return out

    def apply_symbolic(self, sym: Symbolic, gens: dict, caches: dict | None = None) -> "NormFieldUnit":
        """Evaluate a symbolic combination on named generators."""
        caches = caches if caches is not None else {}
        out = self.one()
        for t in sym.terms:
            if t.gen not in gens:
                raise KeyError(f"generator {t.gen!r} not supplied")
            cache = caches.setdefault(t.gen, [gens[t.gen]])
            base = self.t_powers(gens[t.gen], t.tpow, cache)[t.tpow]
            c = t.coeff.numerator * pow(t.coeff.denominator, -1, self.mod) % self.mod
            e = c * self.p ** (t.rho + sym.pexp) % self.mod
            if e == 0:
                continue
            if t.vartheta is None:
                out = out * base.act_phi(-t.rho).zp_pow(e)
            else:
                vt = vartheta(t.vartheta[0], t.vartheta[1], self.f, self.p, self.K)
                for k, a in enumerate(vt.coeffs):
                    if a:
                        out = out * base.act_phi(k - t.rho).zp_pow(e * a)
        return out


class NormFieldUnit:
    """lambda^val times a principal unit, modulo lambda^N."""

    __slots__ = ("field", "val", "coeffs")

    def __init__(self, field: NormField, val: int, coeffs: np.ndarray):
        self.field = field
        self.val = int(val) % field.mod
        self.coeffs = coeffs

    @property
    def lambda_precision(self) -> int:
        return self.field.N

    def _check(self, other):
        if other.field is not self.field:
            raise ValueError("elements from different contexts")

    def __mul__(self, other: "NormFieldUnit") -> "NormFieldUnit":
        self._check(other)
        F = self.field
        return NormFieldUnit(F, self.val + other.val, F.smul(self.coeffs, other.coeffs))

    def inv(self) -> "NormFieldUnit":
        F = self.field
        return NormFieldUnit(F, -self.val, F.sinv(self.coeffs))

    def __truediv__(self, other: "NormFieldUnit") -> "NormFieldUnit":
        return self * other.inv()

    def __pow__(self, k: int) -> "NormFieldUnit":
        return self.zp_pow(k)

    def zp_pow(self, e) -> "NormFieldUnit":
        F = self.field
        e = int(e) % F.mod
        return NormFieldUnit(F, self.val * e, F.spow(self.coeffs, e))

    def __eq__(self, other):
        return (isinstance(other, NormFieldUnit) and other.field is self.field
                and self.val == other.val and bool((self.coeffs == other.coeffs).all()))

    def __hash__(self):
        return hash((self.val, self.coeffs.tobytes()))

    def is_one(self) -> bool:
        return self.val == 0 and not self.coeffs[1:].any()

    def first_nonzero(self) -> int | None:
        nz = np.nonzero(self.coeffs[1:].any(axis=1))[0]
        return int(nz[0]) + 1 if len(nz) else None

    def coeff(self, k: int) -> tuple:
        return tuple(int(c) for c in self.coeffs[k])

    # Galois actions

    def act_gamma(self) -> "NormFieldUnit":
        F = self.field
        out = F.substitute(self.coeffs, F.gamma_matrix)
        if self.val:
            out = F.smul(out, F.spow(F.gamma_unit, self.val))
        return NormFieldUnit(F, self.val, out)

    def act_delta(self, index: int) -> "NormFieldUnit":
        F = self.field
        if index % (F.p - 1) == 0:
            return self
        M, h = F.delta_data(index)
        out = F.substitute(self.coeffs, M)
        if self.val:
            out = F.smul(out, F.spow(h, self.val))
        return NormFieldUnit(F, self.val, out)

    def act_phi(self, k: int = 1) -> "NormFieldUnit":
        F = self.field
        return NormFieldUnit(F, self.val, F.frob_coeffs(self.coeffs, k))

    def act_T(self) -> "NormFieldUnit":
        return self.act_gamma() / self

    def norm_phi(self) -> "NormFieldUnit":
        out = self
        for k in range(1, self.field.f):
            out = out * self.act_phi(k)
        return out

    def frob_twist(self, k: int) -> "NormFieldUnit":
        """self^(p^k), computed by index scaling."""
        F = self.field
        return NormFieldUnit(F, self.val * F.p**k, F.twist(self.coeffs, k))

    # output

    def render(self, max_terms: int = 4) -> str:
        F = self.field
        parts = []
        if self.val:
            parts.append(f"λ^{self.val}·")
        terms = ["1"]
        for k in range(1, F.N):
            c = self.coeff(k)
            if any(c):
                terms.append(f"({_fq_str(c)})λ^{k}")
                if len(terms) > max_terms:
                    terms.append("…")
                    break
        return "".join(parts) + "(" + " + ".join(terms) + f" + O(λ^{F.N}))"

    def __repr__(self):
        return f"NormFieldUnit({self.render()})"

    def to_json(self) -> dict:
        return {"val": {"residue": self.val, "precision": self.field.K},
                "coeffs": self.coeffs[1:].tolist(), "N": self.field.N}
