"""Finite-field Gauss sums, Davenport-Hasse lifting, Morita's p-adic gamma
function and the Gross-Koblitz formula.

Complex values are exact cyclotomic numbers with zeta_m -> exp(2 pi i / m).
p-adic values live in Z_p[pi] with pi^(p-1) = -p, stored as coefficient
vectors on 1, pi, ..., pi^(p-2) reduced mod p^N.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Tuple

from .padic_chars import is_prime, residue, unit_generator
from .values import Cyclotomic, ScaledAlgebraic

# ---------------------------------------------------------------------------
# finite fields F_{p^r} = F_p[x] / (f), x a generator of the multiplicative group

FFElt = Tuple[int, ...]


def _prime_factors(n: int) -> List[int]:
    return [q for q in range(2, n + 1) if n % q == 0 and is_prime(q)]


class FiniteField:
    """F_{p^r} with a fixed generator of the multiplicative group."""

    def __init__(self, p: int, r: int):
        if not is_prime(p) or r < 1:
            raise ValueError("need a prime p and r >= 1")
        self.p, self.r = p, r
        self.size = p ** r
        self.modulus = self._find_modulus()
        self.powers: List[FFElt] = []
        x = self.one
        for _ in range(self.size - 1):
            self.powers.append(x)
            x = self.mul(x, self.generator)
        self.log = {v: k for k, v in enumerate(self.powers)}
        if len(self.log) != self.size - 1:
            raise AssertionError("generator is not primitive")

    @property
    def one(self) -> FFElt:
        return (1,) + (0,) * (self.r - 1)

    @property
    def generator(self) -> FFElt:
        if self.r == 1:
            return ((unit_generator(self.p) if self.p != 2 else 1) % self.p,)
        return (0, 1) + (0,) * (self.r - 2)

    def _find_modulus(self) -> Tuple[int, ...]:
        """Lexicographically first monic f of degree r with x primitive mod f."""
        p, r = self.p, self.r
        if r == 1:
            return (0, 1)
        order = p ** r - 1
        factors = _prime_factors(order)
        for low in itertools.product(range(p), repeat=r):
            if low[0] == 0:
                continue
            self.modulus = tuple(low) + (1,)
            x = (0, 1) + (0,) * (r - 2)
            if self._pow(x, order) != self.one:
                continue
            if all(self._pow(x, order // q) != self.one for q in factors):
                return self.modulus
        raise AssertionError("no primitive polynomial")

    def mul(self, u: FFElt, v: FFElt) -> FFElt:
        p, r = self.p, self.r
        if r == 1:
            return ((u[0] * v[0]) % p,)
        c = [0] * (2 * r - 1)
        for i, a in enumerate(u):
            if a:
                for j, b in enumerate(v):
                    c[i + j] += a * b
        f = self.modulus
        for top in range(2 * r - 2, r - 1, -1):
            t = c[top] % p
            if t:
                for i in range(r):
                    c[top - r + i] -= t * f[i]
            c[top] = 0
        return tuple(x % p for x in c[:r])

    def _pow(self, u: FFElt, k: int) -> FFElt:
        out, base = self.one, u
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def trace(self, u: FFElt) -> int:
        s = [0] * self.r
        x = u
        for _ in range(self.r):
            s = [(a + b) % self.p for a, b in zip(s, x)]
            x = self._pow(x, self.p)
        if any(s[1:]):
            raise AssertionError("trace left F_p")
        return s[0]

    @property
    def traces(self) -> List[int]:
        """Trace of g^k for k = 0 .. size - 2."""
        return _traces(self.p, self.r)

    def norm_exponent(self) -> int:
        """m with N(g) = g_1^m, g_1 the fixed generator of F_p^x."""
        g1 = finite_field(self.p, 1).generator[0]
        n = self._pow(self.generator, (self.size - 1) // (self.p - 1))
        if any(n[1:]):
            raise AssertionError("norm left F_p")
        target = n[0]
        for m in range(self.p - 1):
            if pow(g1, m, self.p) == target:
                return m
        raise AssertionError("norm not a power of the generator")


@lru_cache(maxsize=None)
def finite_field(p: int, r: int) -> FiniteField:
    return FiniteField(p, r)


@lru_cache(maxsize=None)
def _traces(p: int, r: int) -> List[int]:
    F = finite_field(p, r)
    return [F.trace(x) for x in F.powers]


# ---------------------------------------------------------------------------
# characters and Gauss sums

@dataclass(frozen=True)
class FFChar:
    """chi(g^k) = exp(2 pi i * exponent * k / (p^r - 1)) for the fixed generator g."""

    p: int
    r: int
    exponent: int

    def __post_init__(self):
        object.__setattr__(self, "exponent", self.exponent % (self.p ** self.r - 1))

    @property
    def order(self) -> int:
        n = self.p ** self.r - 1
        return n // math.gcd(n, self.exponent)

    def is_trivial(self) -> bool:
        return self.exponent == 0

    def __mul__(self, other: "FFChar") -> "FFChar":
        if (self.p, self.r) != (other.p, other.r):
            raise ValueError("characters of different fields")
        return FFChar(self.p, self.r, self.exponent + other.exponent)

    def __pow__(self, n: int) -> "FFChar":
        return FFChar(self.p, self.r, self.exponent * n)

    def inverse(self) -> "FFChar":
        return FFChar(self.p, self.r, -self.exponent)

    def lift(self, r: int) -> "FFChar":
        """chi o N from F_p to F_{p^r} (self must live on F_p)."""
        if self.r != 1:
            raise ValueError("lift starts from a character of F_p")
        m = finite_field(self.p, r).norm_exponent()
        return FFChar(self.p, r, self.exponent * m * (self.p ** r - 1) // (self.p - 1))


def char_of_order(p: int, r: int, order: int, power: int = 1) -> FFChar:
    n = p ** r - 1
    if n % order:
        raise ValueError(f"{order} does not divide {n}")
    return FFChar(p, r, power * (n // order))


@dataclass(frozen=True)
class FFAddChar:
    """psi(x) = exp(2 pi i * b * Tr(x) / p)."""

    p: int
    r: int
    b: int = 1

    def is_trivial(self) -> bool:
        return self.b % self.p == 0


def gauss_sum(chi: FFChar, psi: Optional[FFAddChar] = None) -> Cyclotomic:
    """G(chi, psi) = sum over x in F_{p^r}^x of chi(x) psi(x)."""
    p, r = chi.p, chi.r
    if psi is None:
        psi = FFAddChar(p, r)
    if (psi.p, psi.r) != (p, r):
        raise ValueError("characters of different fields")
    if psi.is_trivial():
        raise ValueError("the additive character must be nontrivial")
    n = p ** r - 1
    # chi takes values in mu_order, so the sum lives in Q(zeta_L), L = lcm(order, p)
    order = chi.order
    step = n // order
    L = math.lcm(order, p)
    cm, am = L // order, L // p
    counts = {}
    for k, t in enumerate(_traces(p, r)):
        j = ((chi.exponent // step) * k * cm + psi.b * t * am) % L
        counts[j] = counts.get(j, 0) + 1
    g = Cyclotomic.from_histogram(L, counts)
    return g.minimal() if L <= 240 else g


@dataclass(frozen=True)
class DavenportHasseReport:
    p: int
    r: int
    base: Cyclotomic
    lifted: Cyclotomic
    corrected_holds: bool
    printed_holds: bool


def davenport_hasse_check(chi: FFChar, r: int) -> DavenportHasseReport:
    """Compare G(chi o N, psi o Tr) with G(chi, psi) by exact summation.

    Corrected form: -G' = (-G)^r. Printed variant without the power:
    G' = (-1)^(r-1) G.
    """
    if chi.r != 1 or r < 2:
        raise ValueError("need a character of F_p and r >= 2")
    G = gauss_sum(chi)
    G2 = gauss_sum(chi.lift(r))
    corrected = -G2 == (-G) ** r
    printed = G2 == G * ((-1) ** (r - 1))
    return DavenportHasseReport(chi.p, r, G, G2, corrected, printed)


# ---------------------------------------------------------------------------
# Morita's p-adic gamma function

@dataclass(frozen=True)
class PadicGammaValue:
    p: int
    argument: Fraction
    value: int
    precision: int

    def __eq__(self, other):
        if not isinstance(other, PadicGammaValue):
            return NotImplemented
        M = min(self.precision, other.precision)
        return self.p == other.p and (self.value - other.value) % self.p ** M == 0


def _poly_mul_trunc(a: List[int], b: List[int], D: int, mod: int) -> List[int]:
    c = [0] * (D + 1)
    for i, x in enumerate(a):
        if x:
            for j in range(min(len(b), D + 1 - i)):
                c[i + j] = (c[i + j] + x * b[j]) % mod
    return c


def _poly_shift(a: List[int], s: int, D: int, mod: int) -> List[int]:
    """a(z + s) truncated at degree D."""
    c = [0] * (D + 1)
    for i, x in enumerate(a):
        if x:
            for j in range(min(i, D) + 1):
                c[j] = (c[j] + x * math.comb(i, j) * pow(s, i - j, mod)) % mod
    return c


@lru_cache(maxsize=None)
def _block_polys(p: int, M: int) -> Tuple[Tuple[int, ...], ...]:
    """F_k(z) = prod over 0 < y < p^k, p not dividing y, of (z + y), for k = 1..M.

    Truncated at degree M: F_k is only ever evaluated at z divisible by p^k,
    so higher terms vanish mod p^M.
    """
    mod, D = p ** M, M
    F1 = [1]
    for y in range(1, p):
        F1 = _poly_mul_trunc(F1, [y, 1], D, mod)
    out = [tuple(F1)]
    for k in range(1, M):
        Fk = list(out[-1])
        nxt = [1]
        for t in range(p):
            nxt = _poly_mul_trunc(nxt, _poly_shift(Fk, t * p ** k, D, mod), D, mod)
        out.append(tuple(nxt))
    return tuple(out)


def _gamma_int(p: int, n: int, M: int) -> int:
    """(-1)^n prod_{0<j<n, p not dividing j} j mod p^M, by base-p blocks."""
    mod = p ** M
    polys = _block_polys(p, M)
    prod = 1
    digits = []
    m = n
    while m:
        digits.append(m % p)
        m //= p
    base = 0
    for k in range(len(digits) - 1, 0, -1):
        for _ in range(digits[k]):
            if k - 1 < len(polys):
                F = polys[k - 1]
                z = base % mod
                val, zp = 0, 1
                for c in F:
                    val = (val + c * zp) % mod
                    zp = zp * z % mod
                prod = prod * val % mod
            base += p ** k
    for j in range(base, base + (digits[0] if digits else 0)):
        if j % p and j > 0:
            prod = prod * j % mod
    return (-1) ** (n % 2) * prod % mod


def padic_gamma(p: int, x, M: int = 20) -> PadicGammaValue:
    """Gamma_p(x) mod p^M, via an integer n = x mod p^M."""
    if M < 1:
        raise ValueError("precision must be at least 1")
    if p == 2 or not is_prime(p):
        raise ValueError("p must be an odd prime")
    x = Fraction(x)
    if x.denominator % p == 0:
        raise ValueError("x must lie in Z_p")
    n = residue(x, p ** M)
    if n == 0:
        return PadicGammaValue(p, x, 1, M)
    return PadicGammaValue(p, x, _gamma_int(p, n, M), M)


def gamma_functional_equation_holds(p: int, x, M: int = 20) -> bool:
    """Gamma_p(x + 1) = -x Gamma_p(x) for x a unit, -Gamma_p(x) otherwise."""
    x = Fraction(x)
    mod = p ** M
    g0 = padic_gamma(p, x, M).value
    g1 = padic_gamma(p, x + 1, M).value
    h = -residue(x, mod) if residue(x, p) else -1
    return (g1 - h * g0) % mod == 0


def gamma_reflection_holds(p: int, x, M: int = 20) -> bool:
    """Gamma_p(x) Gamma_p(1 - x) = (-1)^x0 with x0 in {1..p}, x0 = x mod p."""
    x = Fraction(x)
    mod = p ** M
    x0 = residue(x, p) or p
    lhs = padic_gamma(p, x, M).value * padic_gamma(p, 1 - x, M).value
    return (lhs - (-1) ** x0) % mod == 0


# ---------------------------------------------------------------------------
# Z_p[pi] with pi^(p-1) = -p, and the Gross-Koblitz formula

class DworkRing:
    """Z_p[pi] / p^N with pi^(p-1) = -p."""

    def __init__(self, p: int, N: int):
        self.p, self.N, self.d = p, N, p - 1
        self.mod = p ** N

    def reduce(self, c) -> List[int]:
        return [residue(Fraction(x), self.mod) for x in c]

    def mul(self, a, b) -> List:
        d = self.d
        c = [0] * (2 * d - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    c[i + j] += x * y
        out = c[:d]
        for i in range(d, 2 * d - 1):
            out[i - d] -= self.p * c[i]
        return out

    def mul_mod(self, a, b) -> List[int]:
        return [x % self.mod for x in self.mul(a, b)]

    def scalar(self, s) -> List[int]:
        return [s % self.mod] + [0] * (self.d - 1)

    def pi_power(self, j: int) -> List[int]:
        q, r = divmod(j, self.d)
        out = [0] * self.d
        out[r] = (-self.p) ** q % self.mod
        return out

    def power(self, a, k: int) -> List[int]:
        out, base = self.scalar(1), list(a)
        while k:
            if k & 1:
                out = self.mul_mod(out, base)
            base = self.mul_mod(base, base)
            k >>= 1
        return out

    def valuation(self, a) -> Optional[int]:
        """pi-adic valuation, None for zero at this precision."""
        best = None
        for i, x in enumerate(a):
            x %= self.mod
            if x:
                v = 0
                while x % self.p == 0:
                    x //= self.p
                    v += 1
                val = v * self.d + i
                best = val if best is None else min(best, val)
        return best

    def equal(self, a, b, M: int) -> bool:
        m = self.p ** M
        return all((x - y) % m == 0 for x, y in zip(a, b))


@lru_cache(maxsize=None)
def dwork_zeta(p: int, N: int) -> Tuple[int, ...]:
    """The p-th root of unity zeta = 1 + pi mod pi^2, from Dwork's series.

    theta(t) = exp(pi (t - t^p)) = sum lambda_n t^n with
    (n + 1) lambda_(n+1) = pi lambda_n - p pi lambda_(n - p + 1); zeta = theta(1).
    """
    R = DworkRing(p, N + 2)
    d = p - 1

    def times_pi(v):
        out = [Fraction(0)] * d
        for i, x in enumerate(v):
            if i + 1 < d:
                out[i + 1] += x
            else:
                out[0] -= p * x
        return out

    # v_p(lambda_n) >= n (p - 1) / p^2
    terms = (N + 3) * p * p // (p - 1) + p
    lam: List[List[Fraction]] = [[Fraction(1)] + [Fraction(0)] * (d - 1)]
    total = list(lam[0])
    for n in range(terms):
        nxt = times_pi(lam[n])
        if n - p + 1 >= 0:
            back = times_pi(lam[n - p + 1])
            nxt = [a - p * b for a, b in zip(nxt, back)]
        nxt = [x / (n + 1) for x in nxt]
        lam.append(nxt)
        total = [a + b for a, b in zip(total, nxt)]
    return tuple(R.reduce(total))


def teichmuller(x: int, p: int, N: int) -> int:
    mod = p ** N
    t = x % mod
    for _ in range(N):
        t = pow(t, p, mod)
    return t


@dataclass(frozen=True)
class GrossKoblitzReport:
    p: int
    k: int
    a: int
    precision: int
    valuation_gauss: Optional[int]
    valuation_formula: int
    sign: Optional[int]
    abs2_is_p: bool

    @property
    def consistent(self) -> bool:
        return self.valuation_gauss == self.valuation_formula and self.sign is not None \
            and self.abs2_is_p


def gross_koblitz_eval(p: int, k: int, a: int, M: int = 20) -> GrossKoblitzReport:
    """Check G_1(chi^a) = (-p)^(a/k) Gamma_p(a/k) in Z_p[pi].

    chi is the order-k character omega^-((p-1)/k) built from the Teichmuller
    character, (-p)^(a/k) is read as pi^(a (p-1)/k), and the report records
    the sign s with G_1 = s * (-p)^(a/k) Gamma_p(a/k). The complex side checks
    |G_1|^2 = p for the matching character of F_p^x.
    """
    if (p - 1) % k:
        raise ValueError(f"{k} does not divide p - 1")
    if not 1 <= a < k:
        raise ValueError("need 1 <= a < k")
    N = M + 2
    R = DworkRing(p, N)
    zeta = list(dwork_zeta(p, N))
    j = a * (p - 1) // k
    G = [0] * (p - 1)
    zx = R.scalar(1)
    for x in range(1, p):
        zx = R.mul_mod(zx, zeta)
        w = teichmuller(pow(x, -1, p), p, N)
        c = pow(w, j, R.mod)
        G = [(g + c * z) % R.mod for g, z in zip(G, zx)]
    gam = padic_gamma(p, Fraction(a, k), N).value
    rhs = [x * gam % R.mod for x in R.pi_power(j)]
    sign = None
    for s in (1, -1):
        if R.equal(G, [s * y for y in rhs], M):
            sign = s
            break
    chi = char_of_order(p, 1, k, -a)
    g = gauss_sum(chi)
    return GrossKoblitzReport(p, k, a, M, R.valuation(G), j, sign, g.abs2() == p)


# ---------------------------------------------------------------------------
# complex images of Gamma_p values

def gamma_ratio_image(p: int, x, y) -> ScaledAlgebraic:
    """Complex image of Gamma_p(x) / Gamma_p(y) for x, y in (1/(p-1)) Z.

    Gross-Koblitz reads Gamma_p(j/(p-1)) as G_1(chi_1^j) / (-p)^(j/(p-1)) with
    chi_1(g) = exp(2 pi i / (p-1)) on the fixed generator g; (-p)^e is the
    principal value. The image is fixed only up to Galois conjugation.
    """
    x, y = Fraction(x), Fraction(y)
    jx, jy = x * (p - 1), y * (p - 1)
    if jx.denominator != 1 or jy.denominator != 1:
        raise ValueError("arguments must lie in (1/(p-1)) Z")

    def g1(j):
        chi = FFChar(p, 1, int(j))
        return ScaledAlgebraic(gauss_sum(chi))

    e = y - x
    minus_p = ScaledAlgebraic.root(e / 2) * ScaledAlgebraic.prime_power(p, e)
    return g1(jx) / g1(jy) * minus_p


def conjugate_match(x: ScaledAlgebraic, y: ScaledAlgebraic) -> bool:
    """True when y = sigma(x) for some sigma in Gal(Q(zeta_m)/Q), absolute values equal."""
    x, y = ScaledAlgebraic.coerce(x), ScaledAlgebraic.coerce(y)
    if x.radicals != y.radicals or x.symbols != y.symbols:
        return False
    if x.root_part.abs2() != y.root_part.abs2():
        return False
    m = math.lcm(x.root_part.m, y.root_part.m)
    a, b = x.root_part.lift(m), y.root_part.lift(m)
    return any(a.galois(s) == b for s in range(1, m + 1) if math.gcd(s, m) == 1)
