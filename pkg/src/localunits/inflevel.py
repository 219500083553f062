"""Generators, special elements and generating sets at the infinite level.

The generators are built by graded successive approximation in the
truncated field of norms.  Special elements are first produced as exact
symbolic combinations and then evaluated on the generators.

Generation is decided exactly by a filtration descent followed by a Howell
membership test over a finite quotient of A (see ``FiltrationDescent``).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from math import comb, factorial

import numpy as np

from . import modlinalg
from .groupring import IwasawaElem, PhiGroupElem, Symbolic, Term
from .indexfn import IndexParams, ilog_ceil, is_power_of
from .normfield import FiltrationClass, NormField, NormFieldUnit


class GradedSolveError(ArithmeticError):
    """A graded step had no solution; this signals an inconsistent input."""

    def __init__(self, depth: int, msg: str):
        super().__init__(f"depth {depth}: {msg}")
        self.depth = depth


# ---------------------------------------------------------------------------
# graded solvers


def solve_norm_phi(F: NormField, target: NormFieldUnit, r: int | None = None) -> NormFieldUnit:
    """x with N_Phi x = target, built one depth at a time from factors 1 + c xi lambda^k."""
    if target.val:
        raise ValueError("solve_norm_phi needs a principal unit")
    x = F.one_series()
    resid = target.coeffs.copy()
    xi = np.array(F.xi, dtype=np.int64)
    while True:
        nz = np.nonzero(resid[1:].any(axis=1))[0]
        if not len(nz):
            break
        k = int(nz[0]) + 1
        c = resid[k]
        if c[1:].any():
            raise GradedSolveError(k, "norm residual has a coefficient outside F_p")
        b = xi * int(c[0]) % F.p
        x = F.smul(x, F.binomial_series(b, k))
        inv = F.binomial_series(b, k, -1)
        for t in range(F.f):
            resid = F.smul(resid, F.frob_coeffs(inv, t))
    out = NormFieldUnit(F, 0, x)
    return F.project(out, r) if r is not None else out


def artin_schreier_root(F: NormField, c) -> tuple:
    """The solution b of b^p - b = c with zero constant coordinate."""
    L = F.fq.artin_schreier_matrix()
    b, _ = modlinalg.linear_solve_fp(L, np.array(c, dtype=np.int64), F.p)
    b = [int(v) % F.p for v in b]
    # F_p lies in the kernel, so the constant coordinate can be cleared
    b[0] = 0
    return tuple(b)


def solve_phi_minus_1(F: NormField, target: NormFieldUnit, r: int | None = None) -> NormFieldUnit:
    """x with x^(phi-1) = target, given N_Phi target = 1 (Hilbert 90, graded)."""
    if target.val:
        raise ValueError("solve_phi_minus_1 needs a principal unit")
    if not target.norm_phi().is_one():
        raise ValueError("target does not have trivial norm")
    x = F.one_series()
    resid = target.coeffs.copy()
    while True:
        nz = np.nonzero(resid[1:].any(axis=1))[0]
        if not len(nz):
            break
        k = int(nz[0]) + 1
        c = resid[k]
        try:
            b = artin_schreier_root(F, c)
        except modlinalg.Infeasible:
            raise GradedSolveError(k, "Artin-Schreier step has nonzero trace") from None
        fac = F.binomial_series(b, k)
        x = F.smul(x, fac)
        resid = F.smul(resid, fac)
        resid = F.smul(resid, F.binomial_series(F.fq.frobenius(b, 1), k, -1))
    out = NormFieldUnit(F, 0, x)
    return F.project(out, r) if r is not None else out


def _fix_leading(F: NormField, x: NormFieldUnit, depth: int, want, r: int) -> NormFieldUnit:
    """Multiply x by z^(phi-1) with z in V_depth so that its depth coefficient becomes want."""
    have = x.coeff(depth)
    if tuple(have) == tuple(want):
        return x
    diff = F.fq.sub(want, have)
    eta = artin_schreier_root(F, diff)
    z = F.project(F.binomial(eta, depth), r)
    return x * z.act_phi(1) / z


@dataclass
class GeneratorSet:
    r: int
    u: NormFieldUnit
    pi: NormFieldUnit | None = None
    w: NormFieldUnit | None = None
    y: NormFieldUnit | None = None
    certificates: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {"u": self.u}
        if self.w is not None:
            out["w"] = self.w
        if self.pi is not None:
            out["pi"] = self.pi
        return out

    def residuals_vanish(self) -> bool:
        return all(v is None for v in self.certificates.values())


def _residual(z: NormFieldUnit):
    """None when z is 1 to precision, else the first offending depth (or 'val')."""
    if z.val:
        return "val"
    return z.first_nonzero()


def make_generators(F: NormField, r: int) -> GeneratorSet:
    p, xi = F.p, F.xi
    if not 2 <= r <= p:
        raise ValueError(f"need 2 <= r <= p, got {r}")
    if r <= p - 2:
        u = F.project(F.binomial(xi, r), r)
        return GeneratorSet(r, u)
    if r == p - 1:
        pi = F.project(F.lam(), r)
        target = pi.act_gamma() / pi
        u = solve_norm_phi(F, target, r)
        u = _fix_leading(F, u, p - 1, xi, r)
        certs = {
            "pi_phi_fixed": _residual(pi.act_phi(1) / pi),
            "norm_u_equals_pi_gamma_minus_1": _residual(u.norm_phi() / target),
        }
        return GeneratorSet(r, u, pi=pi, certificates=certs)
    zeta = F.zeta()
    w = solve_norm_phi(F, zeta, r)
    w = _fix_leading(F, w, 1, F.fq.neg(xi), r)
    target = w.act_gamma() / (w * w.frob_twist(1))
    up = solve_phi_minus_1(F, target, r)
    a = F.fq.sub(up.coeff(p), xi)
    if any(a[1:]):
        raise GradedSolveError(p, "u_p leading coefficient differs from xi outside F_p")
    if a[0]:
        up = up / F.project(F.binomial(a, p), r)
    y = up * w.act_phi(-1).frob_twist(1)
    if y.first_nonzero() is not None and y.first_nonzero() < 2 * p - 1:
        raise GradedSolveError(y.first_nonzero(), "y is not in V_{2p-1}")
    shift = F.fq.add(y.coeff(2 * p - 1), xi)
    if any(shift[1:]):
        raise GradedSolveError(2 * p - 1, "y correction is not in F_p")
    if shift[0]:
        up = up / F.project(F.binomial(shift, 2 * p - 1), r)
        y = up * w.act_phi(-1).frob_twist(1)
    certs = {
        "norm_w_equals_zeta": _residual(w.norm_phi() / zeta),
        "u_phi_minus_1_equals_w_gamma_minus_1_minus_p": _residual((up.act_phi(1) / up) / target),
    }
    return GeneratorSet(r, up, w=w, y=y, certificates=certs)


# ---------------------------------------------------------------------------
# symbolic special elements


def _labels(r: int, n: int | None = None) -> dict:
    sub = str.maketrans("0123456789,", "₀₁₂₃₄₅₆₇₈₉,")
    if n is None:
        return {"u": ("u" + str(r).translate(sub), f"u_{{{r}}}"), "w": ("w", "w"), "v": ("v", "v")}
    return {"u": ("u" + f"{n},{r}".translate(sub), f"u_{{{n},{r}}}"),
            "w": ("w" + str(n).translate(sub), f"w_{{{n}}}"), "v": ("v", "v")}


def alpha_symbolic(ix: IndexParams, m: int, j: int, n: int | None = None) -> Symbolic:
    p, r, d = ix.p, ix.r, ix.delta
    rf = factorial(ix.bracket(r))
    lead = -1 if (j == 0 and r == p - 1) else factorial(ix.braces(r - d - j))
    terms = [Term(m, j, Fraction(lead, rf))]
    for k in range(1, m + 1):
        terms.append(Term(m - k, ix.phi_m(k - 1, j) - d, Fraction(-1, rf)))
    return Symbolic(tuple(terms), _labels(r, n))


def beta_symbolic(ix: IndexParams, m: int, l: int, n: int | None = None) -> Symbolic:
    if ix.r != ix.p:
        raise ValueError("beta is defined only for r = p")
    p = ix.p
    terms = [Term(m, p**l - 1)]
    for k in range(1, m + 1):
        terms.append(Term(m - k, ix.phi_prime_m(k - 1, p**l - 1) - 1))
    terms.append(Term(m + l + 1, 0, gen="w"))
    return Symbolic(tuple(terms), _labels(ix.r, n))


def kappa_symbolic(ix: IndexParams, m: int, i: int, n: int | None = None) -> Symbolic:
    ix.check_i(i)
    case = ix.kappa_case(m, i)
    th = ix.theta_m
    if case == "one":
        terms = [Term(m, th(m, i))]
    elif case == "two":
        a = ix.a_coeff(m, i)
        terms = [Term(m, th(m, i) - 1)]
        terms += [Term(k, th(k, i) - 1, Fraction(-a)) for k in range(ix.sigma(m, i), m)]
    else:
        l = ix.kappa_three_level(m, i)
        terms = [Term(m, th(m, i) - 1)]
        terms += [Term(k, th(k, i) - 1) for k in range(ix.sigma(m + 1, i), m)]
        terms.append(Term(m + l + 1, 0, gen="w"))
    return Symbolic(tuple(terms), _labels(ix.r, n))


def w_power_symbolic(ix: IndexParams, i: int, n: int | None = None, extra_p: int = 0) -> Symbolic:
    return Symbolic((Term(0, 0, gen="w"),), _labels(ix.r, n), pexp=ilog_ceil(ix.p, i) + extra_p)


def gen_set_symbolic(ix: IndexParams, i: int, with_w: bool = True) -> list[Symbolic]:
    ix.check_i(i)
    out = [kappa_symbolic(ix, m, i) for m in range(ix.s_of(i) + 1)]
    if ix.r == ix.p and with_w:
        out.append(w_power_symbolic(ix, i))
    return out


def keyset(ix: IndexParams, m: int, i: int) -> list[int]:
    """X_m (or its primed variant for r = p) from the minimality argument."""
    s = ix.s_of(i)
    out = []
    for k in range(m + 1, s + 1):
        if ix.epsilon_m(k, i) != 1:
            continue
        try:
            if ix.r == ix.p and is_power_of(ix.p, ix.i_ceil(k + 1, i) - 1) is not None:
                sig = ix.sigma(k + 1, i)
            else:
                sig = ix.sigma(k, i)
        except ValueError:
            continue
        if sig <= m:
            out.append(k)
    return out


# ---------------------------------------------------------------------------
# combinatorial identity


def d_coeff(j: int, k: int, p: int) -> int:
    if not 1 <= k <= j <= p - 1:
        raise ValueError(f"need 1 <= k <= j <= p-1, got j={j}, k={k}")
    return sum((-1) ** (j + h) * comb(k, h) * h**j for h in range(1, k + 1)) % p


def c_coeff(j: int, k: int, p: int) -> int:
    """Literal enumeration over nondecreasing tuples 0 <= a_1 <= ... <= a_(j-k) <= k."""
    if not 1 <= k <= j <= p - 1:
        raise ValueError(f"need 1 <= k <= j <= p-1, got j={j}, k={k}")
    total = 0
    for tup in combinations_with_replacement(range(k + 1), j - k):
        prod = 1
        for a in tup:
            prod *= a
        total += prod
    return (-1) ** (j - k) * factorial(k) * total % p


def recurexp_check(F: NormField, j: int) -> dict:
    """Compare theta^((gamma-1)^j) with the predicted coefficient at lambda^((j+1)p)."""
    p, fq, xi = F.p, F.fq, F.xi
    if not 1 <= j <= p - 1:
        raise ValueError("need 1 <= j <= p-1")
    target = (j + 1) * p
    if F.N <= target + 1:
        raise ValueError(f"lambda precision {F.N} too small for j={j}")
    base = fq.mul(xi, fq.sub(fq.one, xi))
    coeffs = {}
    pw = fq.one
    for t in range(0, F.N - p - 1):
        coeffs[p + 1 + t] = fq.mul(base, pw)
        pw = fq.mul(pw, xi)
    z = F.unit(coeffs)
    for _ in range(j):
        z = z.act_T()
    predicted = fq.zero
    for k in range(1, j + 1):
        term = fq.mul(fq.pow(xi, k), fq.sub(fq.one, xi))
        predicted = fq.add(predicted, fq.scale(d_coeff(j, k, p), term))
    first = z.first_nonzero()
    lower_clean = first is None or first >= target
    got = z.coeff(target)
    return {"j": j, "predicted": predicted, "computed": got,
            "residual": fq.sub(got, predicted), "lower_terms_vanish": lower_clean,
            "ok": lower_clean and got == predicted}


# ---------------------------------------------------------------------------
# evaluation context


class InfiniteLevel:
    """Field of norms context plus generators for a fixed eigenspace index r."""

    def __init__(self, p: int, f: int, r: int, N: int, K: int | None = None, modulus=None):
        self.ix = IndexParams(p, r)
        self.field = NormField(p, f, N, K, modulus)
        self.gens = make_generators(self.field, r)
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

    def evaluate(self, sym: Symbolic) -> NormFieldUnit:
        return self.field.apply_symbolic(sym, self.gens.as_dict(), self._caches)

    def classify(self, z: NormFieldUnit) -> FiltrationClass:
        return self.field.classify(z, self.r)

    def t_power(self, gen: str, d: int) -> NormFieldUnit:
        cache = self._caches.setdefault(gen, [self.gens.as_dict()[gen]])
        return self.field.t_powers(cache[0], d, cache)[d]

    def alpha(self, m: int, j: int):
        sym = alpha_symbolic(self.ix, m, j)
        return sym, self.evaluate(sym)

    def beta(self, m: int, l: int):
        sym = beta_symbolic(self.ix, m, l)
        return sym, self.evaluate(sym)

    def kappa(self, m: int, i: int):
        sym = kappa_symbolic(self.ix, m, i)
        return sym, self.evaluate(sym)

    def gen_set(self, i: int):
        return [(sym, self.evaluate(sym)) for sym in gen_set_symbolic(self.ix, i)]

    def apply(self, a: IwasawaElem, gen: str = "u") -> NormFieldUnit:
        cache = self._caches.setdefault(gen, [self.gens.as_dict()[gen]])
        return self.field.apply_A(a, cache[0], cache)

    # protocol for the generation checker

    @property
    def cover_gens(self) -> tuple:
        return ("u", "w") if self.r == self.p else ("u",)

    @property
    def base_depth(self) -> dict:
        return {"u": self.r, "w": 1}

    def pow_depth(self, j: int) -> int:
        return self.p * j

    def start_depth(self) -> int:
        return 1 if self.r == self.p else self.r

    def descent_ops(self):
        return _InfOps()

    def depth_of(self, z: NormFieldUnit) -> FiltrationClass:
        return self.field.classify(z)

    def relations(self, B: int, f: int, p: int, K: int) -> list[dict]:
        if self.r != self.p:
            return []
        phi_minus_1 = (IwasawaElem.monomial(B, f, p, K, 0, PhiGroupElem.phi_power(1, f, p, K))
                       - IwasawaElem.monomial(B, f, p, K, 0, 1))
        t_minus_p = IwasawaElem.monomial(B, f, p, K, 1, 1) - IwasawaElem.monomial(B, f, p, K, 0, p)
        return [{"u": phi_minus_1, "w": -t_minus_p}]

    def nonmembership_sample(self, m: int, j: int, trials: int = 200, seed: int = 0,
                             c_terms: int = 2) -> dict:
        """Random (p^m b T^j + c) u [+ d w] must stay outside V_{bound}."""
        ix, F = self.ix, self.field
        p, f, K = ix.p, F.f, F.K
        bound = (ix.phi_prime_m(m, j) if ix.r == p else ix.phi_m(m, j)) + p - 1
        if F.N - p + 1 <= bound:
            raise ValueError(f"lambda precision {F.N} too small to certify depth < {bound}")
        rng = random.Random(seed)
        B = j + c_terms + 1
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
                dw = self.apply(IwasawaElem.monomial(1, f, p, K, 0, PhiGroupElem(tuple(dvec), p, K)), "w")
                z = z * dw
            cls = F.classify(z, ix.r)
            if cls.depth_at_least(bound):
                counterexamples.append({"trial": trial, "b": b, "coeffs": coeffs.tolist(), "d": dvec,
                                        "class": cls.to_json()})
        return {"m": m, "j": j, "bound": bound, "trials": trials, "counterexamples": counterexamples}


# ---------------------------------------------------------------------------
# free covers and the filtration descent


@dataclass
class Cover:
    """Free A-module on named generators, truncated to A/(p^a, T^b)."""

    gens: tuple
    f: int
    p: int
    a: int
    b: int

    @property
    def block(self) -> int:
        return self.b * self.f

    @property
    def dim(self) -> int:
        return len(self.gens) * self.block

    def index(self, g: int, d: int, k: int) -> int:
        return g * self.block + d * self.f + k

    def vector(self, sym: Symbolic) -> np.ndarray:
        mod = self.p**self.a
        out = np.zeros(self.dim, dtype=np.int64)
        for g, name in enumerate(self.gens):
            c = sym.coefficient(name, self.b, self.f, self.p, self.a)
            out[g * self.block:(g + 1) * self.block] = c.coeffs.reshape(-1)
        return out % mod

    def shift(self, v: np.ndarray, d: int, k: int) -> np.ndarray:
        """phi^k T^d v."""
        mod = self.p**self.a
        blocks = v.reshape(len(self.gens), self.b, self.f)
        out = np.zeros_like(blocks)
        if d < self.b:
            out[:, d:, :] = np.roll(blocks[:, : self.b - d, :], k, axis=2)
        return out.reshape(-1) % mod

    def span_rows(self, v: np.ndarray) -> np.ndarray:
        rows = [self.shift(v, d, k) for d in range(self.b) for k in range(self.f)]
        return np.array(rows, dtype=np.int64).reshape(-1, self.dim)

    def project(self, rows: np.ndarray, a: int, b: int) -> np.ndarray:
        """Image of rows under (Z/p^self.a, T^self.b) -> (Z/p^a, T^b)."""
        R = rows.reshape(rows.shape[0], len(self.gens), self.b, self.f)[:, :, :b, :]
        return R.reshape(rows.shape[0], -1) % self.p**a

    def relation_vectors(self, relations: list[dict]) -> list[np.ndarray]:
        """Vectors of relations given as {generator: IwasawaElem truncated at self.b}."""
        mod = self.p**self.a
        out = []
        for rel in relations:
            v = np.zeros(self.dim, dtype=np.int64)
            for g, name in enumerate(self.gens):
                if name in rel:
                    v[g * self.block:(g + 1) * self.block] = rel[name].coeffs.reshape(-1)
            out.append(v % mod)
        return out


class FiltrationDescent:
    """Z_p-generators of the preimage of V_i in a free cover, for all i up to i_max.

    Rows are vectors in the cover modulo (p^a, T^b), each paired with its
    image unit.  At each depth the leading coefficients give an F_p-linear
    map to F_q; its kernel is generated by p times the pivot rows and the
    non-pivot rows reduced against the pivots.
    """

    def __init__(self, cover: Cover, images: list, depths: list[int], ops):
        self.cover, self.ops = cover, ops
        self.rows = np.eye(cover.dim, dtype=np.int64)
        self.images = list(images)
        self.depths = depths
        self.snapshots: dict[int, np.ndarray] = {}

    def run(self, keep: set[int] | None = None):
        p, mod = self.cover.p, self.cover.p**self.cover.a
        ops = self.ops
        for j in self.depths:
            if keep is None or j in keep:
                self.snapshots[j] = self.rows.copy()
            lead = [ops.leading(img, j) for img in self.images]
            pivots: list[tuple[int, np.ndarray]] = []
            basis = np.zeros((0, len(lead[0]) if lead else 1), dtype=np.int64)
            updates = []
            for idx, vec in enumerate(lead):
                v = np.array(vec, dtype=np.int64) % p
                if not v.any():
                    continue
                if len(pivots):
                    try:
                        t, _ = modlinalg.linear_solve_fp(basis, v, p)
                        updates.append((idx, [int(x) % p for x in t]))
                        continue
                    except modlinalg.Infeasible:
                        pass
                pivots.append((idx, v))
                basis = np.vstack([basis, v[None, :]])
            if not pivots:
                continue
            inv_cache: dict = {}
            for idx, t in updates:
                img = self.images[idx]
                row = self.rows[idx]
                for (pidx, _), tp in zip(pivots, t):
                    if not tp:
                        continue
                    key = (pidx, tp)
                    if key not in inv_cache:
                        inv_cache[key] = ops.power(ops.inv(self.images[pidx]), tp)
                    img = ops.mul(img, inv_cache[key])
                    row = row - tp * self.rows[pidx]
                self.images[idx] = img
                self.rows[idx] = row % mod
            for pidx, _ in pivots:
                self.images[pidx] = ops.ppow(self.images[pidx])
                self.rows[pidx] = self.rows[pidx] * p % mod
        return self


class _InfOps:
    def leading(self, z: NormFieldUnit, j: int):
        return z.coeffs[j]

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        return a.inv()

    def power(self, a, k: int):
        return a.zp_pow(k)

    def ppow(self, a):
        return a.frob_twist(1)


def _first_depth_at_least(step: int, r: int, i: int) -> int:
    return i if (i - r) % step == 0 else i + (r - i) % step


class GenerationChecker:
    """Exact A-module generation tests for subsets of V_i, i <= i_max.

    ``level`` supplies the cover generators, their base depths, the p-power
    depth law, T-powers of the generators, an unrestricted classifier and the
    relations of the presentation.  The test is Nakayama's lemma applied to
    the preimage of V_i in the free cover, computed modulo (p^a_i, T^b_i)
    where p^(a_i - 1) and T^(b_i - 1) already map the whole cover into V_i.
    """

    def __init__(self, level, i_max: int):
        self.level = level
        p, f = level.p, level.field.f
        self.i_max = i_max
        self.step = p - 1
        names = level.cover_gens
        self._bounds: dict = {}
        a, b = self.bounds(i_max)
        self.cover = Cover(names, f, p, a, b)
        images = []
        for g in names:
            tp = [level.t_power(g, d) for d in range(b)]
            for d in range(b):
                for k in range(f):
                    images.append(tp[d].act_phi(k))
        depths = list(range(level.start_depth(), i_max, self.step))
        self.descent = FiltrationDescent(self.cover, images, depths, level.descent_ops()).run()

    def _p_bound(self, g: str, i: int) -> int:
        """1 + least c with the c-fold p-power depth law reaching i from the base depth."""
        d, c = self.level.base_depth[g], 0
        while d < i:
            d = self.level.pow_depth(d)
            c += 1
        return c + 1

    def _t_bound(self, g: str, i: int) -> int:
        d = 0
        while not self.level.depth_of(self.level.t_power(g, d)).depth_at_least(i):
            d += 1
        return d + 1

    def bounds(self, i: int) -> tuple[int, int]:
        if i not in self._bounds:
            names = self.level.cover_gens
            self._bounds[i] = (max(self._p_bound(g, i) for g in names),
                               max(self._t_bound(g, i) for g in names))
        return self._bounds[i]

    def preimage_rows(self, i: int) -> tuple[np.ndarray, int, int]:
        """Rows generating the preimage of V_i modulo (p^a_i, T^b_i), with (a_i, b_i)."""
        j = _first_depth_at_least(self.step, self.level.start_depth(), i)
        if j > self.i_max:
            raise ValueError(f"i={i} beyond descent range {self.i_max}")
        rows = self.descent.snapshots.get(j)
        if rows is None:
            rows = self.descent.rows
        a_i, b_i = self.bounds(i)
        a_i, b_i = min(a_i, self.cover.a), min(b_i, self.cover.b)
        return self.cover.project(rows, a_i, b_i), a_i, b_i

    def generates(self, syms: list[Symbolic], i: int) -> bool:
        rows, a_i, b_i = self.preimage_rows(i)
        small = Cover(self.cover.gens, self.cover.f, self.cover.p, a_i, b_i)
        span = [small.span_rows(small.vector(s)) for s in syms]
        rels = self.level.relations(b_i, small.f, small.p, a_i)
        span += [small.span_rows(v) for v in small.relation_vectors(rels)]
        if not span:
            return not rows.any()
        H = modlinalg.howell_form(np.vstack(span), small.p, a_i)
        return H.contains_all(rows)


def generation_check(level: "InfiniteLevel", checker: GenerationChecker, i: int) -> dict:
    """Generation by S_i, minimality, and the w criterion for r = p."""
    ix = level.ix
    full = gen_set_symbolic(ix, i)
    kappas = [s for s in full if s.gens() != ["w"]]
    report = {"i": i, "s": ix.s_of(i), "generates": checker.generates(full, i)}
    report["inside_V_i"] = all(level.field.classify(level.evaluate(sym)).depth_at_least(i) for sym in full)
    drops = [checker.generates(full[:k] + full[k + 1:], i) for k in range(len(full))]
    report["proper_subsets_generating"] = [k for k, ok in enumerate(drops) if ok]
    if ix.r == ix.p:
        s = ix.s_of(i)
        report["kappas_alone_generate"] = checker.generates(kappas, i)
        report["w_predicted_unneeded"] = ix.i_ceil(s, i) == ix.p + 1
        report["minimal_ok"] = all(k == len(full) - 1 for k in report["proper_subsets_generating"])
        report["w_criterion_ok"] = report["kappas_alone_generate"] == report["w_predicted_unneeded"]
    else:
        report["minimal_ok"] = not report["proper_subsets_generating"]
    report["ok"] = (report["generates"] and report["inside_V_i"] and report["minimal_ok"]
                    and report.get("w_criterion_ok", True))
    return report


def relation_kernel(ix: IndexParams, i: int, f: int = 1, a: int | None = None, b: int | None = None) -> dict:
    """Syzygies of the kappa's modulo (p^a, T^b), and the ideal test c_m in (p, T^(eps_m + 1)).

    For r <= p-1 the kappa's live in the free module A u.  For r = p the
    computation is done in A/(phi - 1) = Z_p[[T]] after discarding w, where rho
    becomes p.
    """
    ix.check_i(i)
    p = ix.p
    s = ix.s_of(i)
    if ix.r == p:
        f = 1
    a = a or s + 2
    b = b or ix.theta_m(0, i) + 2
    cov = Cover(("u",), f, p, a, b)
    vecs = [cov.vector(kappa_symbolic(ix, m, i)) for m in range(s + 1)]
    M = np.vstack([cov.span_rows(v) for v in vecs])
    ker = modlinalg.left_kernel(M, p, a)
    block = cov.block
    violations = []
    for row in ker:
        for m in range(s + 1):
            cm = row[m * block:(m + 1) * block].reshape(b, f)
            eps = ix.epsilon_m(m, i)
            low = cm[: eps + 1]
            if (low % p).any():
                violations.append({"m": m, "eps": eps, "coeff": cm[: eps + 2].tolist()})
    keysizes = [len(keyset(ix, m, i)) for m in range(s + 1)]
    return {"i": i, "s": s, "a": a, "b": b, "kernel_rank": int(len(ker)),
            "violations": violations, "max_keyset_size": max(keysizes) if keysizes else 0}
