"""The coefficient rings Z_p[Phi] and A = Z_p[Phi][[T]], plus symbolic forms.

``PhiGroupElem`` is an element of Z_p[Phi] with Phi cyclic of order f,
stored as residues mod p^K (coefficient of phi^k at position k).
``IwasawaElem`` is a T-polynomial of degree < B with PhiGroupElem
coefficients, stored as an int64 array of shape (B, f).

The symbolic layer (``Term``, ``Symbolic``) keeps elements such as
``(rho^2 T^95 - rho T^475 - T^2379) u_3`` as exact data so that they can be
printed in the usual notation and evaluated on concrete generators.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import comb

import numpy as np

from .padic import PadicInt, omega_power


# ---------------------------------------------------------------------------
# Z_p[Phi]


@dataclass(frozen=True)
class PhiGroupElem:
    coeffs: tuple
    p: int
    K: int

    def __post_init__(self):
        mod = self.p**self.K
        object.__setattr__(self, "coeffs", tuple(int(c) % mod for c in self.coeffs))

    @classmethod
    def scalar(cls, c: int, f: int, p: int, K: int) -> "PhiGroupElem":
        return cls((c,) + (0,) * (f - 1), p, K)

    @classmethod
    def phi_power(cls, k: int, f: int, p: int, K: int, c: int = 1) -> "PhiGroupElem":
        out = [0] * f
        out[k % f] = c
        return cls(tuple(out), p, K)

    @property
    def f(self) -> int:
        return len(self.coeffs)

    @property
    def modulus(self) -> int:
        return self.p**self.K

    def _check(self, other: "PhiGroupElem"):
        if (self.p, self.f) != (other.p, other.f):
            raise ValueError("mismatched contexts")

    def __add__(self, other):
        self._check(other)
        return PhiGroupElem(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)), self.p, min(self.K, other.K))

    def __sub__(self, other):
        self._check(other)
        return PhiGroupElem(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)), self.p, min(self.K, other.K))

    def __neg__(self):
        return PhiGroupElem(tuple(-a for a in self.coeffs), self.p, self.K)

    def __mul__(self, other):
        if isinstance(other, int):
            return PhiGroupElem(tuple(a * other for a in self.coeffs), self.p, self.K)
        self._check(other)
        f = self.f
        out = [0] * f
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[(i + j) % f] += a * b
        return PhiGroupElem(tuple(out), self.p, min(self.K, other.K))

    __rmul__ = __mul__

    def augmentation(self) -> int:
        return sum(self.coeffs) % self.modulus

    def is_unit(self) -> bool:
        # Z_p[Phi] is local-by-factors; a unit mod p in every factor.  With
        # p odd and f small we test invertibility of the multiplication matrix mod p.
        M = np.array([[self.coeffs[(j - i) % self.f] % self.p for j in range(self.f)]
                      for i in range(self.f)], dtype=np.int64)
        return _det_mod_p(M, self.p) != 0

    def divisible_by_p(self) -> bool:
        return all(c % self.p == 0 for c in self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)


def _det_mod_p(M: np.ndarray, p: int) -> int:
    M = M.copy() % p
    n, det = len(M), 1
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r, c]), None)
        if piv is None:
            return 0
        if piv != c:
            M[[c, piv]] = M[[piv, c]]
            det = -det
        det = det * int(M[c, c]) % p
        inv = pow(int(M[c, c]), -1, p)
        for r in range(c + 1, n):
            if M[r, c]:
                M[r] = (M[r] - M[r, c] * inv * M[c]) % p
    return det % p


def norm_phi(f: int, p: int, K: int) -> PhiGroupElem:
    return PhiGroupElem((1,) * f, p, K)


def rho_power_phi(m: int, f: int, p: int, K: int) -> PhiGroupElem:
    """(p phi^-1)^m in Z_p[Phi]."""
    return PhiGroupElem.phi_power(-m, f, p, K, p**m)


def vartheta(j: int, k: int, f: int, p: int, K: int) -> PhiGroupElem:
    """1 + phi^-1 + ... + phi^-k when j = 2, and 1 for j > 2."""
    if j < 2 or k < 0:
        raise ValueError(f"vartheta needs j >= 2, k >= 0 (got j={j}, k={k})")
    if j > 2:
        return PhiGroupElem.scalar(1, f, p, K)
    out = [0] * f
    for t in range(k + 1):
        out[(-t) % f] += 1
    return PhiGroupElem(tuple(out), p, K)


def epsilon_r_exponents(r: int, p: int, K: int) -> list[PadicInt]:
    """omega(delta)^-r / (p-1) for delta = g^0, ..., g^(p-2), g the least primitive root."""
    inv = pow(p - 1, -1, p**K)
    return [omega_power(k, -r, p, K) * inv for k in range(p - 1)]


# ---------------------------------------------------------------------------
# A = Z_p[Phi][[T]] truncated at T-degree B


class IwasawaElem:
    __slots__ = ("coeffs", "p", "K")

    def __init__(self, coeffs, p: int, K: int):
        arr = np.asarray(coeffs, dtype=np.int64)
        if arr.ndim != 2:
            raise ValueError("coefficient array must have shape (B, f)")
        self.coeffs = arr % p**K
        self.p, self.K = p, K

    @classmethod
    def zero(cls, B: int, f: int, p: int, K: int) -> "IwasawaElem":
        return cls(np.zeros((B, f), dtype=np.int64), p, K)

    @classmethod
    def monomial(cls, B: int, f: int, p: int, K: int, tpow: int = 0,
                 coeff: PhiGroupElem | int = 1) -> "IwasawaElem":
        out = cls.zero(B, f, p, K)
        if tpow < B:
            c = coeff.coeffs if isinstance(coeff, PhiGroupElem) else (coeff,) + (0,) * (f - 1)
            out.coeffs[tpow] = np.array(c, dtype=np.int64) % p**K
        return out

    @classmethod
    def from_poly(cls, poly, B: int, f: int, p: int, K: int) -> "IwasawaElem":
        """Integer T-polynomial (constant first) with scalar coefficients."""
        out = cls.zero(B, f, p, K)
        for d, c in enumerate(poly[:B]):
            out.coeffs[d, 0] = c % p**K
        return out

    @property
    def B(self) -> int:
        return self.coeffs.shape[0]

    @property
    def f(self) -> int:
        return self.coeffs.shape[1]

    @property
    def modulus(self) -> int:
        return self.p**self.K

    def _check(self, other):
        if self.coeffs.shape != other.coeffs.shape or self.p != other.p:
            raise ValueError("mismatched contexts")

    def __add__(self, other):
        self._check(other)
        return IwasawaElem(self.coeffs + other.coeffs, self.p, min(self.K, other.K))

    def __sub__(self, other):
        self._check(other)
        return IwasawaElem(self.coeffs - other.coeffs, self.p, min(self.K, other.K))

    def __neg__(self):
        return IwasawaElem(-self.coeffs, self.p, self.K)

    def scale(self, c) -> "IwasawaElem":
        if isinstance(c, PhiGroupElem):
            return self * IwasawaElem.monomial(self.B, self.f, self.p, self.K, 0, c)
        return IwasawaElem(self.coeffs * (int(c) % self.modulus), self.p, self.K)

    def __mul__(self, other):
        if not isinstance(other, IwasawaElem):
            return self.scale(other)
        self._check(other)
        B, f, mod = self.B, self.f, self.modulus
        out = np.zeros((B, f), dtype=object)
        a, b = self.coeffs.astype(object), other.coeffs.astype(object)
        for i in range(f):
            for j in range(f):
                conv = np.convolve(a[:, i], b[:, j])[:B]
                out[:, (i + j) % f] += conv
        return IwasawaElem((out % mod).astype(np.int64), self.p, min(self.K, other.K))

    __rmul__ = __mul__

    def __eq__(self, other):
        return (isinstance(other, IwasawaElem) and self.coeffs.shape == other.coeffs.shape
                and bool((self.coeffs % self.modulus == other.coeffs % self.modulus).all()))

    def __repr__(self):
        return f"IwasawaElem(B={self.B}, f={self.f}, p={self.p}, K={self.K}, nonzero={self.support()})"

    def support(self) -> list[tuple[int, int]]:
        """(T-degree, phi-power) pairs with nonzero coefficient."""
        return [(int(d), int(k)) for d, k in zip(*np.nonzero(self.coeffs))]

    def coefficient(self, d: int) -> PhiGroupElem:
        return PhiGroupElem(tuple(int(c) for c in self.coeffs[d]), self.p, self.K)

    def reduce_mod_poly(self, g) -> "IwasawaElem":
        """Reduce modulo a monic integer polynomial g in T (constant first)."""
        g = [int(c) for c in g]
        deg = len(g) - 1
        c = self.coeffs.astype(object).copy()
        for d in range(self.B - 1, deg - 1, -1):
            lead = c[d].copy()
            if any(lead):
                for t in range(deg + 1):
                    c[d - deg + t] = c[d - deg + t] - lead * g[t]
        return IwasawaElem((c % self.modulus).astype(np.int64), self.p, self.K)


def one(B: int, f: int, p: int, K: int) -> IwasawaElem:
    return IwasawaElem.monomial(B, f, p, K, 0, 1)


def rho_power(m: int, B: int, f: int, p: int, K: int) -> IwasawaElem:
    return IwasawaElem.monomial(B, f, p, K, 0, rho_power_phi(m, f, p, K))


def fn_poly_coeffs(n: int, p: int) -> list[int]:
    """(T+1)^(p^(n-1)) - 1 as an integer coefficient list, constant first."""
    if n < 1:
        raise ValueError("n must be >= 1")
    N = p ** (n - 1)
    return [0] + [comb(N, d) for d in range(1, N + 1)]


def norm_gamma_coeffs(n: int, p: int) -> list[int]:
    """T^-1 f_n, the lift of the norm element of Gamma_n, constant first."""
    return fn_poly_coeffs(n, p)[1:]


def fn_poly(n: int, B: int, f: int, p: int, K: int) -> IwasawaElem:
    c = fn_poly_coeffs(n, p)
    if len(c) > B:
        raise ValueError(f"truncation B={B} too small for f_{n} of degree {len(c) - 1}")
    return IwasawaElem.from_poly(c, B, f, p, K)


def norm_gamma_n(n: int, B: int, f: int, p: int, K: int) -> IwasawaElem:
    c = norm_gamma_coeffs(n, p)
    if len(c) > B:
        raise ValueError(f"truncation B={B} too small for N_Gamma_{n}")
    return IwasawaElem.from_poly(c, B, f, p, K)


# ---------------------------------------------------------------------------
# symbolic forms

_SUP = str.maketrans("0123456789-", "⁰¹²³⁴⁵⁶⁷⁸⁹⁻")
_SUB = str.maketrans("0123456789,", "₀₁₂₃₄₅₆₇₈₉,")


def _sup(k: int) -> str:
    return str(k).translate(_SUP)


def _sub(s) -> str:
    return str(s).translate(_SUB)


@dataclass(frozen=True, order=True)
class Term:
    """coeff * rho^rho * vartheta_{j,k} * T^tpow applied to a named generator."""

    rho: int
    tpow: int
    coeff: Fraction = Fraction(1)
    gen: str = "u"
    vartheta: tuple | None = None

    def unicode_body(self) -> str:
        parts = []
        c = abs(self.coeff)
        if c != 1:
            parts.append(str(c) if c.denominator == 1 else f"({c})")
        if self.rho:
            parts.append("ρ" + (_sup(self.rho) if self.rho != 1 else ""))
        if self.vartheta is not None:
            parts.append("ϑ" + _sub(f"{self.vartheta[0]},{self.vartheta[1]}"))
        if self.tpow:
            parts.append("T" + (_sup(self.tpow) if self.tpow != 1 else ""))
        return "".join(parts)

    def latex_body(self) -> str:
        parts = []
        c = abs(self.coeff)
        if c != 1:
            parts.append(str(c) if c.denominator == 1 else rf"\frac{{{c.numerator}}}{{{c.denominator}}}")
        if self.rho:
            parts.append(r"\rho" + (f"^{{{self.rho}}}" if self.rho != 1 else ""))
        if self.vartheta is not None:
            parts.append(rf"\vartheta_{{{self.vartheta[0]},{self.vartheta[1]}}}")
        if self.tpow:
            parts.append("T" + (f"^{{{self.tpow}}}" if self.tpow != 1 else ""))
        return " ".join(parts)


def _join(bodies_signs) -> str:
    out = ""
    for k, (neg, body) in enumerate(bodies_signs):
        if k == 0:
            out = ("−" if neg else "") + body
        else:
            out += (" − " if neg else " + ") + body
    return out


@dataclass(frozen=True)
class Symbolic:
    """A finite sum of Terms, optionally scaled by p^pexp."""

    terms: tuple
    gen_labels: dict = field(default_factory=dict, compare=False, hash=False)
    pexp: int = 0

    def blocks(self):
        order = []
        for t in self.terms:
            if t.gen not in order:
                order.append(t.gen)
        for g in order:
            ts = sorted((t for t in self.terms if t.gen == g), key=lambda t: (-t.rho, -t.tpow))
            yield g, ts

    def _label(self, g: str, latex: bool) -> str:
        lab = self.gen_labels.get(g)
        if lab is None:
            return g
        return lab[1] if latex else lab[0]

    def unicode(self) -> str:
        pieces = []
        for g, ts in self.blocks():
            lab = self._label(g, False)
            if len(ts) == 1:
                t = ts[0]
                body = t.unicode_body()
                pieces.append((t.coeff < 0, body + lab))
            else:
                inner = _join([(t.coeff < 0, t.unicode_body() or "1") for t in ts])
                pieces.append((False, f"({inner}){lab}"))
        s = _join(pieces) if pieces else "0"
        if self.pexp:
            s = f"p{_sup(self.pexp) if self.pexp != 1 else ''}·" + (f"({s})" if len(pieces) > 1 else s)
        return s

    def latex(self) -> str:
        pieces = []
        for g, ts in self.blocks():
            lab = self._label(g, True)
            if len(ts) == 1:
                t = ts[0]
                pieces.append((t.coeff < 0, (t.latex_body() + " " + lab).strip()))
            else:
                inner = _join([(t.coeff < 0, t.latex_body() or "1") for t in ts]).replace("−", "-")
                pieces.append((False, rf"\left({inner}\right){lab}"))
        s = _join(pieces).replace("−", "-") if pieces else "0"
        if self.pexp:
            s = f"p^{{{self.pexp}}}" + (rf"\left({s}\right)" if len(pieces) > 1 else s)
        return s

    def __str__(self):
        return self.unicode()

    def scaled(self, pexp: int) -> "Symbolic":
        return replace(self, pexp=self.pexp + pexp)

    def to_json(self) -> dict:
        return {
            "text": self.unicode(),
            "latex": self.latex(),
            "p_power": self.pexp,
            "terms": [{"gen": t.gen, "coeff": str(t.coeff), "rho": t.rho, "T": t.tpow,
                       "vartheta": list(t.vartheta) if t.vartheta else None} for t in self.terms],
        }

    def max_tpow(self) -> int:
        return max((t.tpow for t in self.terms), default=0)

    def coefficient(self, gen: str, B: int, f: int, p: int, K: int) -> IwasawaElem:
        """The A-coefficient of a generator, as a truncated IwasawaElem."""
        mod = p**K
        out = np.zeros((B, f), dtype=object)
        for t in self.terms:
            if t.gen != gen or t.tpow >= B:
                continue
            c = t.coeff.numerator * pow(t.coeff.denominator, -1, mod) * p ** (t.rho + self.pexp)
            phi_part = [0] * f
            if t.vartheta is None:
                phi_part[(-t.rho) % f] = 1
            else:
                vt = vartheta(t.vartheta[0], t.vartheta[1], f, p, K)
                for k, a in enumerate(vt.coeffs):
                    phi_part[(k - t.rho) % f] += a
            out[t.tpow] += np.array(phi_part, dtype=object) * c
        return IwasawaElem((out % mod).astype(np.int64), p, K)

    def gens(self) -> list[str]:
        return [g for g, _ in self.blocks()]
