"""Integer index functions governing depths of special units.

Everything here is pure integer arithmetic.  ``IndexParams`` carries the
prime ``p`` and the eigenspace index ``r``; the scalar methods are the
reference implementations and the ``*_vec`` helpers at the bottom are
numpy versions used by the exhaustive sweeps.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

I_CAP = 10**7


def ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def ilog_floor(p: int, x: int) -> int:
    """Largest c with p**c <= x (x >= 1)."""
    if x < 1:
        raise ValueError(f"ilog_floor needs x >= 1, got {x}")
    c, q = 0, p
    while q <= x:
        q *= p
        c += 1
    return c


def ilog_ceil(p: int, x: int) -> int:
    """Smallest c >= 0 with p**c >= x."""
    c, q = 0, 1
    while q < x:
        q *= p
        c += 1
    return c


def is_power_of(p: int, x: int) -> int | None:
    """Return l with x == p**l, or None."""
    if x < 1:
        return None
    l = 0
    while x % p == 0:
        x //= p
        l += 1
    return l if x == 1 else None


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class IndexDomainError(ValueError):
    """Raised when an index function is evaluated outside its domain."""


@dataclass(frozen=True)
class IndexParams:
    p: int
    r: int

    def __post_init__(self):
        if self.p < 3 or not is_prime(self.p):
            raise IndexDomainError(f"p must be an odd prime, got {self.p}")
        if not 2 <= self.r <= self.p:
            raise IndexDomainError(f"need 2 <= r <= p, got r={self.r}")

    @property
    def delta(self) -> int:
        return 1 if self.r == self.p else 0

    def check_i(self, i: int) -> None:
        if i < 1 or i > I_CAP:
            raise IndexDomainError(f"i={i} outside [1, {I_CAP}]")
        if (i - self.r) % (self.p - 1):
            raise IndexDomainError(f"i={i} is not congruent to r={self.r} mod {self.p - 1}")

    # residues

    def bracket(self, k: int) -> int:
        return k % self.p

    def braces(self, k: int) -> int:
        return k % (self.p - 1)

    def angle(self, a: int, t: int) -> int:
        return max(a + self.braces(t - a), t)

    # phi family

    def phi_i(self, i0: int, a: int) -> int:
        """Depth of T^a z for z of depth i0 prime to p."""
        if i0 % self.p == 0:
            raise IndexDomainError(f"phi_i needs p not dividing i0={i0}")
        if a == 0:
            return i0
        b = self.bracket(i0)
        return self.p * a + (i0 - b) + self.braces(b - a)

    def phi(self, a: int) -> int:
        if a == 0:
            return self.r
        d = self.delta
        return self.p * (a + d) + self.braces(self.r - d - a)

    def phi_m(self, m: int, a: int) -> int:
        return self.p**m * (self.phi(a) + 1) - 1

    def phi_prime_m(self, m: int, a: int) -> int:
        if self.r == self.p:
            l = is_power_of(self.p, a + 1)
            if l is not None:
                return self.p ** (m + l + 1) + self.p ** (m + 1) - 1
        return self.phi_m(m, a)

    def phi_prime_nm(self, n: int, m: int, j: int) -> int:
        if not 0 <= m <= n - 2:
            raise IndexDomainError(f"phi_prime_nm needs 0 <= m <= n-2, got n={n}, m={m}")
        if self.r == self.p - 1 and j == self.e_of(n - m - 1):
            return self.e_of(n) + self.p ** (m + 1) - 1
        return self.phi_prime_m(m, j)

    # psi family

    def psi(self, a: int) -> int:
        if self.r == self.p - 1 and a <= self.p - 1:
            return 0
        return (self.angle(a, self.r) + 1) // self.p - self.delta

    def psi_m(self, m: int, a: int) -> int:
        return self.psi(ceil_div(a + 1, self.p**m) - 1)

    def in_prime_band(self, m: int, a: int) -> bool:
        """True when a lies in [p^(m+l+1)+p^m, p^(m+l+1)+p^(m+1)-1] for some l >= 0."""
        if self.r != self.p:
            return False
        p = self.p
        top = a - p**m
        if top < p ** (m + 1):
            return False
        big = p ** ilog_floor(p, top)
        return big >= a - p ** (m + 1) + 1

    def psi_prime_m(self, m: int, a: int) -> int:
        v = self.psi_m(m, a)
        return v - 1 if self.in_prime_band(m, a) else v

    def theta_m(self, m: int, i: int) -> int:
        return self.psi(ceil_div(self.angle(i, self.r), self.p**m))

    # kappa data

    def i_ceil(self, m: int, i: int) -> int:
        return ceil_div(i, self.p**m)

    def sigma(self, m: int, i: int) -> int:
        pm = self.p**m
        if i % pm == 0:
            raise IndexDomainError(f"sigma({m}, {i}) undefined: p^m divides i")
        return ilog_floor(self.p, pm * self.i_ceil(m, i) - i)

    def epsilon_m(self, m: int, i: int) -> int:
        return self.theta_m(m, i) - self.psi_prime_m(m, i)

    def kappa_three_level(self, m: int, i: int) -> int | None:
        """l when r = p and i_{m+1} - 1 = p^l, else None."""
        if self.r != self.p:
            return None
        return is_power_of(self.p, self.i_ceil(m + 1, i) - 1)

    def kappa_case(self, m: int, i: int) -> str:
        """Which of the three defining formulas applies to kappa_{m,i}."""
        if self.kappa_three_level(m, i) is not None:
            return "three"
        p, r = self.p, self.r
        im = self.i_ceil(m, i)
        if r == p - 1 and im == p:
            return "two"
        if ((im - (r + 1)) % (p - 1) or im % p == 0 or i < p**m
                or i % p**m == 0):
            return "one"
        return "two"

    def a_coeff(self, m: int, i: int) -> int:
        if self.kappa_three_level(m, i) is not None:
            return -1
        th = self.theta_m(m, i)
        if self.r == self.p - 1 and th == 1:
            return -1
        fac = factorial(self.braces(self.r + 1 - self.delta - th))
        return pow(fac, -1, self.p)

    def s_of(self, i: int) -> int:
        """Smallest s >= 0 with p^s (r+1+delta(p-1)) >= i+1."""
        base = self.r + 1 + self.delta * (self.p - 1)
        s, q = 0, 1
        while q * base < i + 1:
            q *= self.p
            s += 1
        return s

    def e_of(self, n: int) -> int:
        if n < 1:
            raise IndexDomainError(f"e_n needs n >= 1, got {n}")
        return self.p ** (n - 1) * (self.p - 1)

    def mu_of(self, n: int, i: int) -> int:
        e, pn = self.e_of(n), self.p**n
        return max(0, ceil_div(i - pn, e))

    # ineqcond

    def ineqcond_epsilon(self, m: int, i: int) -> int:
        if self.r == self.p and is_power_of(self.p, self.i_ceil(m + 1, i) - 1) is not None:
            return 1
        return 0

    def ineqcond_conditions(self, m: int, k: int, i: int) -> bool:
        p, r = self.p, self.r
        eps = self.ineqcond_epsilon(m, i)
        ime = self.i_ceil(m + eps, i)
        im = self.i_ceil(m, i)
        c1 = ime % p != 0 or (r == p - 1 and im == p)
        c2 = (ime - (r + 1)) % (p - 1) == 0 and not (r == p - 1 and im == 1)
        jr = (-i) % p ** (m + eps)
        c3 = 0 < jr < p ** (m + 1 - k)
        return c1 and c2 and c3

    def ineqcond_exceptional(self, m: int, i: int) -> bool:
        """r = p, psi'_m(i) = p^l - 1 and i_{m+1} = p^l: the inequality is strict there."""
        if self.r != self.p:
            return False
        l = is_power_of(self.p, self.psi_prime_m(m, i) + 1)
        return l is not None and self.i_ceil(m + 1, i) == self.p**l

    def ineqcond_predicts_equality(self, m: int, k: int, i: int) -> bool:
        return self.ineqcond_conditions(m, k, i) and not self.ineqcond_exceptional(m, i)

    def equivcond(self, m: int, k: int, i: int) -> bool:
        """p^(m-k+1) phi'_{k-1}(psi'_m(i)) < i."""
        return self.p ** (m - k + 1) * self.phi_prime_m(k - 1, self.psi_prime_m(m, i)) < i

    def ineqcond_equality(self, m: int, k: int, i: int) -> bool:
        lhs = self.phi_prime_m(k - 1, self.psi_prime_m(m, i)) - self.delta
        return lhs == self.theta_m(m - k, i) - 1


# ---------------------------------------------------------------------------
# numpy versions for sweeps (int64; callers keep values well below 2**62)


def _braces_v(ix: IndexParams, k):
    return np.mod(k, ix.p - 1)


def angle_vec(ix: IndexParams, a, t):
    a = np.asarray(a, dtype=np.int64)
    return np.maximum(a + _braces_v(ix, t - a), t)


def phi_vec(ix: IndexParams, a):
    a = np.asarray(a, dtype=np.int64)
    d = ix.delta
    out = ix.p * (a + d) + _braces_v(ix, ix.r - d - a)
    return np.where(a == 0, ix.r, out)


def phi_m_vec(ix: IndexParams, m: int, a):
    return ix.p**m * (phi_vec(ix, a) + 1) - 1


def _power_level_vec(p: int, x, maxl: int = 40):
    """l with x == p**l, else -1."""
    x = np.asarray(x, dtype=np.int64)
    out = np.full(x.shape, -1, dtype=np.int64)
    q = 1
    for l in range(maxl):
        out = np.where(x == q, l, out)
        q *= p
        if q > 2**62 // p:
            break
    return out


def phi_prime_m_vec(ix: IndexParams, m: int, a):
    a = np.asarray(a, dtype=np.int64)
    base = phi_m_vec(ix, m, a)
    if ix.r != ix.p:
        return base
    l = _power_level_vec(ix.p, a + 1)
    special = ix.p ** (m + 1 + np.maximum(l, 0)) + ix.p ** (m + 1) - 1
    return np.where(l >= 0, special, base)


def psi_vec(ix: IndexParams, a):
    a = np.asarray(a, dtype=np.int64)
    out = (angle_vec(ix, a, ix.r) + 1) // ix.p - ix.delta
    if ix.r == ix.p - 1:
        out = np.where(a <= ix.p - 1, 0, out)
    return out


def _ceil_div_v(a, b):
    return -((-a) // b)


def psi_m_vec(ix: IndexParams, m: int, a):
    a = np.asarray(a, dtype=np.int64)
    return psi_vec(ix, _ceil_div_v(a + 1, ix.p**m) - 1)


def _floor_pow_vec(p: int, x):
    """Largest power of p that is <= x, for x >= 1 (0 where x < 1)."""
    x = np.asarray(x, dtype=np.int64)
    out = np.zeros(x.shape, dtype=np.int64)
    q = 1
    while True:
        out = np.where(x >= q, q, out)
        if q > int(x.max(initial=1)):
            break
        q *= p
    return out


def psi_prime_m_vec(ix: IndexParams, m: int, a):
    a = np.asarray(a, dtype=np.int64)
    v = psi_m_vec(ix, m, a)
    if ix.r != ix.p:
        return v
    p = ix.p
    top = a - p**m
    big = _floor_pow_vec(p, top)
    band = (top >= p ** (m + 1)) & (big >= a - p ** (m + 1) + 1)
    return np.where(band, v - 1, v)


def theta_m_vec(ix: IndexParams, m: int, i):
    i = np.asarray(i, dtype=np.int64)
    return psi_vec(ix, _ceil_div_v(angle_vec(ix, i, ix.r), ix.p**m))


def i_ceil_vec(ix: IndexParams, m: int, i):
    return _ceil_div_v(np.asarray(i, dtype=np.int64), ix.p**m)


def ineqcond_conditions_vec(ix: IndexParams, m: int, k: int, i):
    p, r = ix.p, ix.r
    i = np.asarray(i, dtype=np.int64)
    if r == p:
        eps = (_power_level_vec(p, i_ceil_vec(ix, m + 1, i) - 1) >= 0).astype(np.int64)
    else:
        eps = np.zeros(i.shape, dtype=np.int64)
    pme = np.where(eps == 1, p ** (m + 1), p**m)
    ime = _ceil_div_v(i, pme)
    im = i_ceil_vec(ix, m, i)
    c1 = (ime % p != 0) | ((r == p - 1) & (im == p))
    c2 = ((ime - (r + 1)) % (p - 1) == 0) & ~((r == p - 1) & (im == 1))
    jr = np.mod(-i, pme)
    c3 = (jr > 0) & (jr < p ** (m + 1 - k))
    return c1 & c2 & c3


def ineqcond_exceptional_vec(ix: IndexParams, m: int, i):
    i = np.asarray(i, dtype=np.int64)
    if ix.r != ix.p:
        return np.zeros(i.shape, dtype=bool)
    l = _power_level_vec(ix.p, psi_prime_m_vec(ix, m, i) + 1)
    return (l >= 0) & (i_ceil_vec(ix, m + 1, i) == ix.p ** np.maximum(l, 0))


def ineqcond_predicts_equality_vec(ix: IndexParams, m: int, k: int, i):
    return ineqcond_conditions_vec(ix, m, k, i) & ~ineqcond_exceptional_vec(ix, m, i)
