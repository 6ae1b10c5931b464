"""Exact value types: cyclotomic numbers and scaled algebraic values.

``Cyclotomic`` is an element of Q(zeta_m) stored in the power basis
1, z, ..., z^(phi(m)-1) reduced modulo the m-th cyclotomic polynomial, so
equality is decidable coefficientwise after lifting to a common modulus.

``ScaledAlgebraic`` multiplies a cyclotomic number by rational prime powers
that are not themselves cyclotomic (p^(1/4) and friends) and by a monomial in
named symbols such as ``a_5`` or ``chi_-1(2)``.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Mapping, Sequence, Tuple, Union

import sympy

Rational = Union[int, Fraction]


# ---------------------------------------------------------------------------
# integer polynomial helpers (coefficient lists, lowest degree first)

def _trim(c: list) -> list:
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_divmod(a: Sequence, b: Sequence) -> Tuple[list, list]:
    a = list(a)
    b = _trim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = b[-1]
    while len(_trim(a)) >= len(b):
        shift = len(a) - len(b)
        coef = Fraction(a[-1]) / lead if lead != 1 else a[-1]
        q[shift] = coef
        for i, bi in enumerate(b):
            a[shift + i] -= coef * bi
        a.pop()
    return q, a


def _clear(a: Sequence) -> Tuple[list, int]:
    """Integer numerators over a common denominator."""
    fr = [Fraction(x) for x in a]
    den = math.lcm(*(x.denominator for x in fr))
    return [int(x * den) for x in fr], den


def _poly_mul(a: Sequence, b: Sequence) -> list:
    if not a or not b:
        return []
    ia, da = _clear(a)
    ib, db = _clear(b)
    nz = [(j, bj) for j, bj in enumerate(ib) if bj]
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(ia):
        if ai == 0:
            continue
        for j, bj in nz:
            out[i + j] += ai * bj
    d = da * db
    return [Fraction(x, d) for x in out] if d != 1 else out


@lru_cache(maxsize=None)
def cyclotomic_poly(m: int) -> Tuple[int, ...]:
    """Integer coefficients of the m-th cyclotomic polynomial, lowest degree first."""
    x = sympy.Symbol("x")
    return tuple(int(c) for c in reversed(sympy.Poly(sympy.cyclotomic_poly(m, x), x).all_coeffs()))


def euler_phi(m: int) -> int:
    return len(cyclotomic_poly(m)) - 1


def _reduce(coeffs: Sequence, m: int) -> Tuple[Fraction, ...]:
    """Reduce a polynomial in z modulo Phi_m (monic, so no denominators appear).

    The work is done on integers after clearing denominators.
    """
    phi = cyclotomic_poly(m)
    deg = len(phi) - 1
    fr = [Fraction(x) for x in coeffs]
    den = math.lcm(*(x.denominator for x in fr)) if fr else 1
    c = [int(x * den) for x in fr]
    terms = [(i, phi[i]) for i in range(deg) if phi[i]]
    for top in range(len(c) - 1, deg - 1, -1):
        t = c[top]
        if t:
            base = top - deg
            for i, f in terms:
                c[base + i] -= t * f
        c[top] = 0
    c = c[:deg] + [0] * max(0, deg - len(c))
    return tuple(Fraction(x, den) for x in c)


class Cyclotomic:
    """Exact element of the cyclotomic field Q(zeta_m)."""

    __slots__ = ("m", "coeffs")

    def __init__(self, m: int, coeffs: Sequence[Rational] = ()):
        if m < 1:
            raise ValueError("modulus must be positive")
        self.m = m
        self.coeffs = _reduce(coeffs, m) if len(coeffs) != euler_phi(m) else tuple(
            Fraction(c) for c in coeffs)

    # -- constructors -----------------------------------------------------
    @classmethod
    def rational(cls, r: Rational) -> "Cyclotomic":
        return cls(1, [r])

    @classmethod
    def root(cls, angle: Rational) -> "Cyclotomic":
        """exp(2 pi i * angle) for a rational angle."""
        angle = Fraction(angle) % 1
        m = angle.denominator
        c = [0] * (angle.numerator + 1)
        c[angle.numerator] = 1
        return cls(m, c)

    @classmethod
    def from_histogram(cls, L: int, counts: Mapping[int, Rational]) -> "Cyclotomic":
        """Sum of counts[j] * zeta_L^j."""
        c = [0] * L
        for j, n in counts.items():
            c[j % L] += n
        return cls(L, c)

    # -- structure --------------------------------------------------------
    def lift(self, L: int) -> "Cyclotomic":
        if L == self.m:
            return self
        if L % self.m:
            raise ValueError(f"cannot lift Q(zeta_{self.m}) into Q(zeta_{L})")
        step = L // self.m
        c = [0] * ((len(self.coeffs) - 1) * step + 1) if self.coeffs else []
        for i, x in enumerate(self.coeffs):
            c[i * step] = x
        return Cyclotomic(L, c)

    def _common(self, other: "Cyclotomic") -> Tuple["Cyclotomic", "Cyclotomic"]:
        L = self.m * other.m // math.gcd(self.m, other.m)
        return self.lift(L), other.lift(L)

    def minimal(self) -> "Cyclotomic":
        """Same number expressed over the smallest Q(zeta_d) containing it (d | m)."""
        if self.is_rational():
            return Cyclotomic(1, [self.coeffs[0] if self.coeffs else 0])
        for d in sorted(d for d in range(1, self.m) if self.m % d == 0):
            # an element lies in Q(zeta_d) iff it is fixed by Gal(Q(zeta_m)/Q(zeta_d))
            fixed = all(self.galois(a) == self for a in range(1, self.m, d)
                        if math.gcd(a, self.m) == 1)
            if fixed and self._descend(d) is not None:
                return self._descend(d)
        return self

    def _descend(self, d: int) -> "Cyclotomic | None":
        # solve lift(x) == self by linear algebra on the power basis
        n = euler_phi(d)
        cols = [Cyclotomic(d, [0] * i + [1]).lift(self.m).coeffs for i in range(n)]
        A = sympy.Matrix(len(self.coeffs), n, lambda i, j: cols[j][i])
        b = sympy.Matrix(list(self.coeffs))
        try:
            sol, params = A.gauss_jordan_solve(b)
        except ValueError:
            return None
        if params.shape[0]:
            return None
        return Cyclotomic(d, [Fraction(int(sympy.fraction(x)[0]), int(sympy.fraction(x)[1]))
                              for x in sol])

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0] if self.coeffs else Fraction(0)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Cyclotomic):
            other = Cyclotomic.rational(other)
        a, b = self._common(other)
        return Cyclotomic(a.m, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.m, [-x for x in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Cyclotomic):
            r = Fraction(other)
            return Cyclotomic(self.m, [x * r for x in self.coeffs])
        a, b = self._common(other)
        return Cyclotomic(a.m, _poly_mul(a.coeffs, b.coeffs))

    __rmul__ = __mul__

    def inverse(self) -> "Cyclotomic":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if self.is_rational():
            return Cyclotomic(self.m, [1 / self.coeffs[0]])
        # extended Euclid in Q[z]: s*self + t*Phi_m = 1
        r0, r1 = list(cyclotomic_poly(self.m)), _trim(list(self.coeffs))
        s0, s1 = [], [Fraction(1)]
        while len(_trim(r1)) > 1 or (len(r1) == 1 and False):
            q, r = _poly_divmod(r0, r1)
            r0, r1 = r1, _trim(r)
            s_next = [0] * max(len(s0), len(q) + len(s1))
            prod = _poly_mul(q, s1)
            for i, x in enumerate(s0):
                s_next[i] += x
            for i, x in enumerate(prod):
                s_next[i] -= x
            s0, s1 = s1, _trim(s_next)
        const = r1[0]
        return Cyclotomic(self.m, [x / const for x in s1])

    def __truediv__(self, other):
        if not isinstance(other, Cyclotomic):
            return self * (1 / Fraction(other))
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = Cyclotomic.rational(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def galois(self, a: int) -> "Cyclotomic":
        """Image under zeta_m -> zeta_m^a (a coprime to m)."""
        if math.gcd(a, self.m) != 1:
            raise ValueError("Galois exponent must be coprime to the modulus")
        c = [0] * self.m
        for i, x in enumerate(self.coeffs):
            c[(i * a) % self.m] += x
        return Cyclotomic(self.m, c)

    def conjugate(self) -> "Cyclotomic":
        return self.galois(-1 % self.m) if self.m > 1 else self

    def abs2(self) -> "Cyclotomic":
        return self * self.conjugate()

    # -- comparison / display --------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, Cyclotomic):
            try:
                other = Cyclotomic.rational(Fraction(other))
            except TypeError:
                return NotImplemented
        a, b = self._common(other)
        return a.coeffs == b.coeffs

    def __hash__(self):
        return hash(complex(self).real.__round__(8)) if not self.is_rational() else hash(
            self.to_rational())

    def __complex__(self):
        z = cmath.exp(2j * math.pi / self.m)
        return complex(sum(float(c) * z ** i for i, c in enumerate(self.coeffs)))

    def root_angle(self) -> "Fraction | None":
        """Angle t with self == exp(2 pi i t) if self is a root of unity, else None."""
        z = complex(self)
        if abs(abs(z) - 1) > 1e-9:
            return None
        L = 2 * self.m if self.m % 2 else self.m
        t = Fraction(round(cmath.phase(z) / (2 * math.pi) * L), L) % 1
        return t if Cyclotomic.root(t) == self else None

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if i == 0 else f"{c}*z{self.m}^{i}")
        return " + ".join(terms) if terms else "0"


@lru_cache(maxsize=None)
def sqrt_prime(q: int) -> Cyclotomic:
    """Positive square root of a prime q as a cyclotomic number."""
    if q == 2:
        return Cyclotomic.root(Fraction(1, 8)) + Cyclotomic.root(Fraction(7, 8))
    counts = {x: (1 if pow(x, (q - 1) // 2, q) == 1 else -1) for x in range(1, q)}
    g = Cyclotomic.from_histogram(q, counts)
    if q % 4 == 1:
        return g
    return g * Cyclotomic.root(Fraction(3, 4))  # g = i*sqrt(q)


# ---------------------------------------------------------------------------

def _frac_dict(d: Mapping) -> Dict:
    return {k: v for k, v in d.items() if v != 0}


_INVOLUTIONS: set = set()


def declare_involution(name: str) -> None:
    """Declare that the symbol ``name`` squares to 1 (e.g. a value of a quadratic character)."""
    _INVOLUTIONS.add(name)


def _normalize_symbols(symbols: Mapping[str, int]) -> Dict[str, int]:
    out = {}
    for k, v in symbols.items():
        if k in _INVOLUTIONS:
            v %= 2
        if v:
            out[k] = v
    return out


class ScaledAlgebraic:
    """(prod of non-cyclotomic prime powers) * cyclotomic * symbol monomial.

    Canonical form: every prime exponent in ``radicals`` lies strictly
    between 0 and 1/2; integer and half-integer parts are absorbed into the
    cyclotomic factor. Symbol exponents are nonzero integers.
    """

    __slots__ = ("radicals", "root_part", "symbols")

    def __init__(self, root_part: "Cyclotomic | Rational" = 1,
                 radicals: Mapping[int, Rational] | None = None,
                 symbols: Mapping[str, int] | None = None):
        if not isinstance(root_part, Cyclotomic):
            root_part = Cyclotomic.rational(root_part)
        rad: Dict[int, Fraction] = {}
        for q, e in (radicals or {}).items():
            e = Fraction(e)
            whole = math.floor(e)
            r = e - whole
            if r >= Fraction(1, 2):
                root_part = root_part * sqrt_prime(q)
                r -= Fraction(1, 2)
            if whole:
                root_part = root_part * (Fraction(q) ** whole)
            if r:
                rad[q] = r
        if root_part.is_zero():
            rad, symbols = {}, {}
        self.root_part = root_part
        self.radicals = dict(sorted(rad.items()))
        self.symbols = dict(sorted(_normalize_symbols(symbols or {}).items()))

    # -- constructors -----------------------------------------------------
    @classmethod
    def one(cls) -> "ScaledAlgebraic":
        return cls(1)

    @classmethod
    def root(cls, angle: Rational) -> "ScaledAlgebraic":
        return cls(Cyclotomic.root(angle))

    @classmethod
    def prime_power(cls, q: int, e: Rational) -> "ScaledAlgebraic":
        return cls(1, {q: e})

    @classmethod
    def symbol(cls, name: str, exponent: int = 1) -> "ScaledAlgebraic":
        return cls(1, None, {name: exponent})

    @classmethod
    def coerce(cls, x) -> "ScaledAlgebraic":
        if isinstance(x, ScaledAlgebraic):
            return x
        return cls(x)

    # -- arithmetic -------------------------------------------------------
    def __mul__(self, other):
        other = ScaledAlgebraic.coerce(other)
        rad = dict(self.radicals)
        for q, e in other.radicals.items():
            rad[q] = rad.get(q, 0) + e
        sym = dict(self.symbols)
        for s, e in other.symbols.items():
            sym[s] = sym.get(s, 0) + e
        return ScaledAlgebraic(self.root_part * other.root_part, rad, sym)

    __rmul__ = __mul__

    def inverse(self) -> "ScaledAlgebraic":
        return ScaledAlgebraic(self.root_part.inverse(),
                               {q: -e for q, e in self.radicals.items()},
                               {s: -e for s, e in self.symbols.items()})

    def __truediv__(self, other):
        return self * ScaledAlgebraic.coerce(other).inverse()

    def __rtruediv__(self, other):
        return ScaledAlgebraic.coerce(other) * self.inverse()

    def __neg__(self):
        return ScaledAlgebraic(-self.root_part, self.radicals, self.symbols)

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return ScaledAlgebraic(self.root_part ** n,
                               {q: e * n for q, e in self.radicals.items()},
                               {s: e * n for s, e in self.symbols.items()})

    def __add__(self, other):
        other = ScaledAlgebraic.coerce(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.radicals != other.radicals or self.symbols != other.symbols:
            raise ValueError("cannot add values with different radical/symbol parts")
        return ScaledAlgebraic(self.root_part + other.root_part, self.radicals, self.symbols)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-ScaledAlgebraic.coerce(other))

    # -- queries ----------------------------------------------------------
    def is_zero(self) -> bool:
        return self.root_part.is_zero()

    def is_concrete(self) -> bool:
        return not self.symbols

    @property
    def p_power(self) -> Dict[int, Fraction]:
        return dict(self.radicals)

    def subs(self, values: Mapping[str, "ScaledAlgebraic | Rational | Cyclotomic"]) -> "ScaledAlgebraic":
        out = ScaledAlgebraic(self.root_part, self.radicals)
        rest = {}
        for s, e in self.symbols.items():
            if s in values:
                out = out * ScaledAlgebraic.coerce(values[s]) ** e
            else:
                rest[s] = e
        return out * ScaledAlgebraic(1, None, rest)

    def __eq__(self, other):
        try:
            other = ScaledAlgebraic.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return self.is_zero() and other.is_zero()
        return (self.radicals == other.radicals and self.symbols == other.symbols
                and self.root_part == other.root_part)

    def __hash__(self):
        return hash((tuple(self.radicals.items()), tuple(self.symbols.items())))

    def __complex__(self):
        if self.symbols:
            raise ValueError(f"value has unspecialized symbols {sorted(self.symbols)}")
        z = complex(self.root_part)
        for q, e in self.radicals.items():
            z *= q ** float(e)
        return z

    def abs2(self) -> "ScaledAlgebraic":
        """|x|^2 assuming every symbol is real-valued and positive is NOT implied;
        only defined for concrete values."""
        if self.symbols:
            raise ValueError("abs2 needs a concrete value")
        return ScaledAlgebraic(self.root_part.abs2(), {q: 2 * e for q, e in self.radicals.items()})

    def __repr__(self):
        return f"ScaledAlgebraic({self})"

    def __str__(self):
        parts = []
        rp = self.root_part.minimal() if self.root_part.m <= 240 else self.root_part
        if not (rp.is_rational() and rp.to_rational() == 1) or not (self.radicals or self.symbols):
            parts.append(_render_cyclotomic(rp))
        for q, e in self.radicals.items():
            parts.append(f"{q}^({e})")
        for s, e in self.symbols.items():
            parts.append(s if e == 1 else f"{s}^{e}")
        return " * ".join(parts)


def _root_name(t: Fraction) -> str:
    named = {Fraction(0): "", Fraction(1, 4): "i", Fraction(1, 2): "-", Fraction(3, 4): "-i"}
    return named.get(t, f"e({t})")


def _split_radial(c: Cyclotomic):
    """Write c = r * sqrt(t) * root with r rational, t squarefree; None if impossible."""
    a2 = c.abs2()
    if not a2.is_rational():
        return None
    n2 = a2.to_rational()
    from sympy import factorint
    r, t = Fraction(1), 1
    for part, sign in ((n2.numerator, 1), (n2.denominator, -1)):
        for q, e in factorint(part).items():
            r *= Fraction(q) ** (sign * (e // 2))
            if e % 2:
                t *= q
                if sign < 0:
                    r /= q
    s = Cyclotomic.rational(r)
    for q in _prime_list(t):
        s = s * sqrt_prime(q)
    angle = (c / s).root_angle()
    return None if angle is None else (r, t, angle)


def _prime_list(n: int):
    from sympy import factorint
    return sorted(factorint(n)) if n > 1 else []


def _render_cyclotomic(c: Cyclotomic) -> str:
    if c.is_rational():
        return str(c.to_rational())
    split = _split_radial(c)
    if split is None:
        return f"[{c!r}]"
    r, t, angle = split
    name = _root_name(angle)
    body = [] if r == 1 and t != 1 else [str(r)]
    if t != 1:
        body.append(f"sqrt({t})")
    text = "*".join(body)
    if name == "-":
        return "-" + text
    if not name:
        return text
    if name.startswith("-") and name != "-":
        return "-" + (f"{name[1:]}*{text}" if text != "1" else name[1:])
    return f"{name}*{text}" if text != "1" else name


def as_value(x) -> ScaledAlgebraic:
    return ScaledAlgebraic.coerce(x)


def product(values: Iterable) -> ScaledAlgebraic:
    out = ScaledAlgebraic.one()
    for v in values:
        out = out * v
    return out
