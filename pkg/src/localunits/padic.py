"""Z_p at fixed precision, Teichmüller lifts and the character omega."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PadicInt:
    """Residue modulo p**K."""

    residue: int
    p: int
    K: int

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("precision underflow: K must be >= 1")
        object.__setattr__(self, "residue", self.residue % self.p**self.K)

    @classmethod
    def of(cls, x: int, p: int, K: int) -> "PadicInt":
        return cls(x, p, K)

    @property
    def modulus(self) -> int:
        return self.p**self.K

    def _coerce(self, other):
        if isinstance(other, PadicInt):
            if other.p != self.p:
                raise ValueError("mismatched primes")
            return other.residue, min(self.K, other.K)
        return int(other), self.K

    def __add__(self, other):
        v, K = self._coerce(other)
        return PadicInt(self.residue + v, self.p, K)

    __radd__ = __add__

    def __sub__(self, other):
        v, K = self._coerce(other)
        return PadicInt(self.residue - v, self.p, K)

    def __rsub__(self, other):
        v, K = self._coerce(other)
        return PadicInt(v - self.residue, self.p, K)

    def __neg__(self):
        return PadicInt(-self.residue, self.p, self.K)

    def __mul__(self, other):
        v, K = self._coerce(other)
        return PadicInt(self.residue * v, self.p, K)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inv() ** (-k)
        return PadicInt(pow(self.residue, k, self.modulus), self.p, self.K)

    def __eq__(self, other):
        if isinstance(other, PadicInt):
            K = min(self.K, other.K)
            return self.p == other.p and (self.residue - other.residue) % self.p**K == 0
        if isinstance(other, int):
            return (self.residue - other) % self.modulus == 0
        return NotImplemented

    def __hash__(self):
        return hash((self.residue, self.p, self.K))

    def __int__(self):
        return self.residue

    def is_unit(self) -> bool:
        return self.residue % self.p != 0

    def inv(self) -> "PadicInt":
        if not self.is_unit():
            raise ZeroDivisionError(f"{self.residue} is not a unit mod {self.p}")
        return PadicInt(pow(self.residue, -1, self.modulus), self.p, self.K)

    def __truediv__(self, other):
        if isinstance(other, PadicInt):
            return self * other.inv()
        return self * PadicInt(other, self.p, self.K).inv()

    def valuation(self) -> int:
        if self.residue == 0:
            return self.K
        v, x = 0, self.residue
        while x % self.p == 0:
            x //= self.p
            v += 1
        return v

    def div_exact(self, d: int) -> "PadicInt":
        """Divide by p**k * unit where the residue is divisible by p**k; loses k digits."""
        k, u = 0, d
        while u % self.p == 0:
            u //= self.p
            k += 1
        if self.valuation() < k:
            raise ArithmeticError(f"{self.residue} not divisible by {d} mod p^{self.K}")
        q = PadicInt(self.residue // self.p**k, self.p, self.K - k)
        return q * pow(u, -1, q.modulus) if u != 1 else q

    def digits(self) -> list[int]:
        out, x = [], self.residue
        for _ in range(self.K):
            out.append(x % self.p)
            x //= self.p
        return out

    def to_json(self) -> dict:
        return {"residue": self.residue, "precision": self.K}


def teichmuller(a: int, p: int, K: int) -> PadicInt:
    if a % p == 0:
        raise ValueError(f"teichmuller undefined for p | {a}")
    mod = p**K
    x = a % mod
    while True:
        y = pow(x, p, mod)
        if y == x:
            return PadicInt(x, p, K)
        x = y


def least_primitive_root(p: int) -> int:
    order = p - 1
    primes = [q for q in range(2, order + 1) if order % q == 0 and all(q % d for d in range(2, q))]
    for g in range(2, p):
        if all(pow(g, order // q, p) != 1 for q in primes):
            return g
    if p == 3:
        return 2
    raise ArithmeticError("no primitive root")


def omega_power(delta_index: int, j: int, p: int, K: int) -> PadicInt:
    """omega(delta_g^delta_index)^j for the least primitive root g."""
    t = teichmuller(least_primitive_root(p), p, K)
    return t ** ((delta_index * j) % (p - 1))


def delta_lift(delta_index: int, p: int, K: int) -> PadicInt:
    """omega(delta) itself: the cyclotomic character value of delta_g^delta_index."""
    return omega_power(delta_index, 1, p, K)
