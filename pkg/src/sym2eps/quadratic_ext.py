"""Quadratic extensions K/Q_p and characters of K^x.

Elements of K are pairs (x, y) of rationals standing for x + y*w, where
O_K = Z_p[w] and w^2 = b*w + c. Characters of K^x are stored as angles on a
basis of the finite group (O_K/p^M)^x plus a value at the chosen uniformizer
(full value tables are generated on demand from the coordinate table).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Tuple

from .groups import decompose
from .padic_chars import (AddChar, MultChar, all_unit_chars, is_prime, legendre,
                          residue, unit_generator, unit_part, valuation)
from .values import ScaledAlgebraic

Elt = Tuple[Fraction, Fraction]


class PrecisionError(ValueError):
    pass


def _F(x) -> Fraction:
    return Fraction(x)


@dataclass(frozen=True)
class QuadExt:
    """K = Q_p(sqrt t) with ring of integers Z_p[w], w^2 = b w + c."""

    p: int
    t: int
    kind: str
    b: int
    c: int
    delta: int
    uniformizer: Tuple[int, int]

    @property
    def f(self) -> int:
        return 2 if self.kind == "unramified" else 1

    @property
    def e(self) -> int:
        return 3 - self.f

    @property
    def q(self) -> int:
        return self.p ** self.f

    @property
    def square_class(self) -> int:
        return self.t

    # -- field arithmetic -------------------------------------------------
    def elt(self, x, y=0) -> Elt:
        return (_F(x), _F(y))

    def mul(self, u: Elt, v: Elt) -> Elt:
        x1, y1 = u
        x2, y2 = v
        yy = y1 * y2
        return (x1 * x2 + yy * self.c, x1 * y2 + x2 * y1 + yy * self.b)

    def norm(self, u: Elt) -> Fraction:
        x, y = u
        return x * x + self.b * x * y - self.c * y * y

    def trace(self, u: Elt) -> Fraction:
        x, y = u
        return 2 * x + self.b * y

    def sigma(self, u: Elt) -> Elt:
        x, y = u
        return (x + self.b * y, -y)

    def inv(self, u: Elt) -> Elt:
        n = self.norm(u)
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        x, y = self.sigma(u)
        return (x / n, y / n)

    def power(self, u: Elt, k: int) -> Elt:
        if k < 0:
            return self.power(self.inv(u), -k)
        out, base = (Fraction(1), Fraction(0)), u
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def val(self, u: Elt) -> int:
        """Normalized valuation v_K (v_K(pi) = 1)."""
        return valuation(self.norm(u), self.p) // self.f

    @property
    def pi(self) -> Elt:
        return self.elt(*self.uniformizer)

    def split(self, u: Elt) -> Tuple[int, Elt]:
        """u = pi^v * unit."""
        v = self.val(u)
        return v, self.mul(u, self.power(self.pi, -v))

    def reduce(self, u: Elt, M: int) -> Tuple[int, int]:
        mod = self.p ** M
        return (residue(u[0], mod), residue(u[1], mod))

    # -- finite models ----------------------------------------------------
    def ring_mul_mod(self, M: int):
        mod = self.p ** M
        b, c = self.b, self.c

        def mul(u, v):
            x1, y1 = u
            x2, y2 = v
            yy = y1 * y2
            return ((x1 * x2 + yy * c) % mod, (x1 * y2 + x2 * y1 + yy * b) % mod)
        return mul

    def units_mod(self, M: int) -> List[Tuple[int, int]]:
        mod = self.p ** M
        p = self.p
        out = []
        for x in range(mod):
            for y in range(mod):
                if (x * x + self.b * x * y - self.c * y * y) % p:
                    out.append((x, y))
        return out

    def unit_group(self, M: int) -> "UnitGroup":
        return _unit_group(self, M)

    def model_precision(self, a: int) -> int:
        """Smallest M with 1 + p^M O_K inside U_K^a."""
        return -(-a // self.e)

    def __repr__(self):
        return f"QuadExt(Q_{self.p}(sqrt {self.t}), {self.kind}, delta={self.delta})"


@dataclass(frozen=True)
class UnitGroup:
    K: QuadExt
    M: int
    basis: Tuple[Tuple[int, int], ...]
    orders: Tuple[int, ...]
    coords: Dict[Tuple[int, int], Tuple[int, ...]] = field(compare=False, hash=False, repr=False)

    @property
    def size(self) -> int:
        return math.prod(self.orders)


@lru_cache(maxsize=None)
def _unit_group(K: QuadExt, M: int) -> UnitGroup:
    if M == 0:
        return UnitGroup(K, 0, (), (), {(0, 0): ()})
    units = K.units_mod(M)
    basis, orders, table = decompose(units, (1, 0), K.ring_mul_mod(M))
    return UnitGroup(K, M, tuple(basis), tuple(orders), table)


_P2_RAMIFIED = {-1: (2, (1, 1)), 3: (2, (1, 1)), 2: (3, (0, 1)), -2: (3, (0, 1)),
                6: (3, (0, 1)), -6: (3, (0, 1))}


def make_quad_ext(p: int, square_class) -> QuadExt:
    """Quadratic extension Q_p(sqrt t).

    ``square_class`` is an integer t, or the label ``"unramified"`` for the
    unique unramified extension. At p = 2 the ramified classes are
    -1, 3, 2, -2, 6, -6 and the unramified one is 5 (equivalently -3).
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if square_class == "unramified":
        t = 5 if p == 2 else next(d for d in range(2, p) if legendre(d, p) == -1)
    else:
        t = int(square_class)
    if t == 0:
        raise ValueError("zero is not a square class")
    if p != 2:
        v = valuation(t, p)
        u = int(unit_part(t, p))
        if v % 2 == 0:
            if legendre(u, p) == 1:
                raise ValueError(f"{t} is a square in Q_{p}: trivial square class")
            if v:
                raise ValueError("give the class by a representative of valuation 0 or 1")
            return QuadExt(p, t, "unramified", 0, t, 0, (p, 0))
        if v != 1:
            raise ValueError("give the class by a representative of valuation 0 or 1")
        return QuadExt(p, t, "ramified", 0, t, 1, (0, 1))
    u = int(unit_part(t, 2)) % 8
    if valuation(t, 2) % 2:
        t = {1: 2, 3: 6, 5: -6, 7: -2}[u]
    else:
        t = {1: 1, 3: 3, 5: 5, 7: -1}[u]
    if t == 1:
        raise ValueError(f"{t} is a square in Q_2: trivial square class")
    if t % 8 == 5:
        # w = (1 + sqrt t)/2, w^2 = w + (t-1)/4
        return QuadExt(2, t, "unramified", 1, (t - 1) // 4, 0, (2, 0))
    if t not in _P2_RAMIFIED:
        raise ValueError("use one of -1, 3, 2, -2, 6, -6 or 5 at p = 2")
    delta, unif = _P2_RAMIFIED[t]
    return QuadExt(2, t, "ramified", 0, t, delta, unif)


def quad_exts(p: int) -> List[QuadExt]:
    """All quadratic extensions of Q_p up to isomorphism."""
    if p == 2:
        return [make_quad_ext(2, t) for t in (5, -1, 3, 2, -2, 6, -6)]
    n = next(d for d in range(2, p) if legendre(d, p) == -1)
    return [make_quad_ext(p, n), make_quad_ext(p, -p), make_quad_ext(p, -p * n)]


# ---------------------------------------------------------------------------
# characters of K^x

def _val(v) -> ScaledAlgebraic:
    return ScaledAlgebraic.coerce(v)


@dataclass(frozen=True)
class KChar:
    """Character of K^x given on (O_K/p^M)^x by angles on the basis."""

    K: QuadExt
    M: int
    angles: Tuple[Fraction, ...]
    value_at_pi: ScaledAlgebraic = field(default_factory=ScaledAlgebraic.one)
    value_at_sigma2: Optional[ScaledAlgebraic] = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        G = self.K.unit_group(self.M)
        object.__setattr__(self, "angles", tuple(Fraction(t) % 1 for t in self.angles))
        object.__setattr__(self, "value_at_pi", _val(self.value_at_pi))
        if len(self.angles) != len(G.orders):
            raise ValueError(f"need {len(G.orders)} angles for (O_K/p^{self.M})^x")
        for t, n in zip(self.angles, G.orders):
            if (t * n).denominator != 1:
                raise ValueError("angle incompatible with generator order")

    @property
    def group(self) -> UnitGroup:
        return self.K.unit_group(self.M)

    def unit_angle_mod(self, r: Tuple[int, int]) -> Fraction:
        coords = self.group.coords[r]
        return sum((t * k for t, k in zip(self.angles, coords)), Fraction(0)) % 1

    def unit_angle(self, u: Elt) -> Fraction:
        if self.M == 0:
            return Fraction(0)
        return self.unit_angle_mod(self.K.reduce(u, self.M))

    def __call__(self, u: Elt) -> ScaledAlgebraic:
        v, w = self.K.split(u)
        return self.value_at_pi ** v * ScaledAlgebraic.root(self.unit_angle(w))

    def value_table(self) -> Dict[Tuple[int, int], Fraction]:
        return {r: self.unit_angle_mod(r) for r in self.group.coords}

    @property
    def conductor(self) -> int:
        return kchar_conductor(self)

    @property
    def a(self) -> int:
        return self.conductor

    def rebase(self, M: int) -> "KChar":
        """Same character expressed on (O_K/p^M)^x, M >= conductor depth."""
        if M == self.M:
            return self
        if M < self.M and self.K.model_precision(self.conductor) > M:
            raise PrecisionError("model too coarse for this conductor")
        G = self.K.unit_group(M)
        angles = tuple(self.unit_angle(self.K.elt(*b)) for b in G.basis)
        return KChar(self.K, M, angles, self.value_at_pi, self.value_at_sigma2, self.name)

    def _aligned(self, other: "KChar"):
        if other.K != self.K:
            raise ValueError("characters of different fields")
        M = max(self.M, other.M)
        return self.rebase(M), other.rebase(M)

    def __mul__(self, other):
        if isinstance(other, MultChar):
            other = compose_norm(other, self.K)
        a, b = self._aligned(other)
        return KChar(a.K, a.M, tuple(s + t for s, t in zip(a.angles, b.angles)),
                     a.value_at_pi * b.value_at_pi)

    def inverse(self) -> "KChar":
        return KChar(self.K, self.M, tuple(-t for t in self.angles), self.value_at_pi.inverse())

    def __pow__(self, n: int) -> "KChar":
        return KChar(self.K, self.M, tuple(t * n for t in self.angles), self.value_at_pi ** n)

    def __truediv__(self, other):
        return self * other.inverse()

    def same_as(self, other: "KChar") -> bool:
        a, b = self._aligned(other)
        return a.angles == b.angles and a.value_at_pi == b.value_at_pi

    def is_trivial_on_units(self) -> bool:
        return all(t == 0 for t in self.angles)

    def restrict_to_base(self) -> MultChar:
        """kappa restricted to Q_p^x."""
        p = self.K.p
        vp = self(self.K.elt(p))
        if p != 2:
            g = unit_generator(p)
            ang = self.unit_angle(self.K.elt(g))
            return MultChar(p, (ang,), vp)
        return MultChar(2, (self.unit_angle(self.K.elt(-1)), self.unit_angle(self.K.elt(5))), vp)

    def __repr__(self):
        label = f"{self.name} " if self.name else ""
        return (f"KChar({label}{self.K!r}, a={self.conductor}, M={self.M}, "
                f"angles={tuple(str(t) for t in self.angles)}, kappa(pi)={self.value_at_pi})")


def make_kchar(K: QuadExt, M: int, exponents, value_at_pi=1, value_at_sigma2=None) -> KChar:
    """kappa(b_i) = e(exponents[i] / n_i) on the deterministic basis b_i of (O_K/p^M)^x."""
    G = K.unit_group(M)
    if len(exponents) != len(G.orders):
        raise ValueError(f"expected {len(G.orders)} exponents for orders {G.orders}")
    angles = tuple(Fraction(int(e), n) for e, n in zip(exponents, G.orders))
    s2 = None if value_at_sigma2 is None else _val(value_at_sigma2)
    return KChar(K, M, angles, _val(value_at_pi), s2)


def all_kchars(K: QuadExt, M: int, value_at_pi=1) -> Iterator[KChar]:
    G = K.unit_group(M)
    for exps in itertools.product(*(range(n) for n in G.orders)):
        yield make_kchar(K, M, exps, value_at_pi)


@lru_cache(maxsize=None)
def _higher_unit_coords(K: QuadExt, j: int, M: int) -> Tuple[Tuple[int, ...], ...]:
    """Coordinates of generators of U^j in (O_K/p^M)^x.

    U^i / U^(i+1) is the additive group of the residue field, so the
    elements 1 + pi^i r, with r over an F_p-basis of the residue field and
    j <= i < e M, generate U^j modulo 1 + p^M O_K.
    """
    G = K.unit_group(M)
    mod = K.p ** M
    basis = ((1, 0), (0, 1)) if K.f == 2 else ((1, 0),)
    out = []
    for i in range(j, K.e * M):
        pii = K.power(K.pi, i)
        for r in basis:
            z = K.mul(pii, K.elt(*r))
            out.append(G.coords[((1 + residue(z[0], mod)) % mod, residue(z[1], mod))])
    return tuple(out)


def _trivial_on_higher_units(chi: KChar, j: int) -> bool:
    """Is chi trivial on U^j = 1 + pi^j O_K (j >= 1)?"""
    for coords in _higher_unit_coords(chi.K, j, chi.M):
        if sum((t * k for t, k in zip(chi.angles, coords)), Fraction(0)) % 1:
            return False
    return True


@lru_cache(maxsize=4096)
def kchar_conductor(chi: KChar) -> int:
    if chi.is_trivial_on_units():
        return 0
    top = chi.K.e * chi.M
    a = top
    while a > 1 and _trivial_on_higher_units(chi, a - 1):
        a -= 1
    return a


def conjugate(chi: KChar) -> KChar:
    """chi o sigma."""
    K = chi.K
    G = chi.group
    angles = tuple(chi.unit_angle(K.sigma(K.elt(*b))) for b in G.basis)
    return KChar(K, chi.M, angles, chi(K.sigma(K.pi)), chi.value_at_sigma2, chi.name)


def is_sigma_stable(chi: KChar) -> bool:
    return conjugate(chi).same_as(chi)


# ---------------------------------------------------------------------------
# norm and trace

@lru_cache(maxsize=None)
def omega_K(K: QuadExt) -> MultChar:
    """The quadratic character of Q_p^x whose kernel is N(K^x)."""
    p = K.p
    if K.kind == "unramified":
        return MultChar(p, (Fraction(0),) * (2 if p == 2 else 1), ScaledAlgebraic(-1), "omega_K")
    depth = 1 if p != 2 else 3
    mod = p ** depth
    norms = {residue(K.norm((Fraction(x), Fraction(y))), mod)
             for x, y in K.units_mod(depth)}
    candidates = [c for c in all_unit_chars(p, depth)
                  if c.unit_order() == 2
                  and all((c.unit_angle(u) == 0) == (u in norms)
                          for u in range(mod) if u % p)]
    if len(candidates) != 1:
        raise AssertionError("norm group computation failed")
    chi = candidates[0]
    u0 = unit_part(K.norm(K.pi), p)
    value = ScaledAlgebraic.root(-chi.unit_angle(u0))
    return chi.with_value_at_p(value)


def compose_norm(chi: MultChar, K: QuadExt) -> KChar:
    """chi o N_{K/Q_p} as a character of K^x."""
    M = max(chi.conductor, 1) if chi.conductor else 0
    G = K.unit_group(M)
    angles = tuple(chi.unit_angle(K.norm(K.elt(*b))) for b in G.basis)
    return KChar(K, M, angles, chi(K.norm(K.pi)), None, f"{chi.name}'" if chi.name else "")


def norm_conductor(chi: MultChar, K: QuadExt) -> int:
    """Conductor of chi o N by the closed formula (f a(chi N) = a(chi) + a(chi w) - a(w))."""
    w = omega_K(K)
    total = chi.conductor + (chi * w).conductor - w.conductor
    if total % K.f:
        raise AssertionError("norm conductor formula gave a non-integer")
    return total // K.f


@dataclass(frozen=True)
class KAddChar:
    """x -> phi(Tr(s x)) on K."""

    K: QuadExt
    phi: AddChar
    s: Elt = (Fraction(1), Fraction(0))

    def angle(self, x: Elt) -> Fraction:
        return self.phi.angle(self.K.trace(self.K.mul(self.s, x)))

    def __call__(self, x: Elt) -> ScaledAlgebraic:
        return ScaledAlgebraic.root(self.angle(x))

    @property
    def conductor(self) -> int:
        return kadd_conductor(self)


@lru_cache(maxsize=None)
def kadd_conductor(psi: KAddChar) -> int:
    """n with psi trivial on pi^-n O_K but not on pi^(-n-1) O_K (brute force)."""
    K = psi.K

    def trivial_on(m: int) -> bool:
        # pi^m O_K is the Z_p-span of pi^m and pi^m w
        base = K.power(K.pi, m)
        return all(psi.angle(K.mul(base, K.elt(*z))) == 0 for z in ((1, 0), (0, 1)))

    m = 0
    if trivial_on(m):
        while trivial_on(m - 1):
            m -= 1
    else:
        while not trivial_on(m + 1):
            m += 1
        m += 1
    return -m


def trace_add_char(phi: AddChar, K: QuadExt) -> KAddChar:
    return KAddChar(K, phi)


def trace_conductor_formula(phi: AddChar, K: QuadExt) -> int:
    """n(phi o Tr) = (2/f) n(phi) + delta."""
    return (2 // K.f) * phi.n + K.delta


def induced_conductor(kappa: KChar) -> int:
    """a(Ind kappa) = v(d_K) + f * a(kappa)."""
    return kappa.K.delta + kappa.K.f * kappa.conductor


def norm_residue_symbol(K: QuadExt) -> int:
    """(p, K|Q_p): +1 iff p is a norm from K (odd p, K ramified)."""
    if K.p == 2 or K.kind != "ramified":
        raise ValueError("norm residue symbol is only used for ramified K at odd p")
    v = omega_K(K)(K.p)
    return 1 if v == 1 else -1
