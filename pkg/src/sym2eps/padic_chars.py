"""Multiplicative and additive characters of Q_p.

A multiplicative character is stored by its angles on a fixed set of unit
generators (one generator for odd p; -1 and 5 for p = 2) together with its
value at the uniformizer p, which may be symbolic. Unit values are roots of
unity exp(2 pi i * angle) with rational angles, so all arithmetic is exact.

Additive characters are ``x -> e({u p^n x}_p)`` where ``{.}_p`` is the p-adic
fractional part and ``e(t) = exp(2 pi i t)``; such a character is trivial on
``p^-n Z_p`` and not on ``p^(-n-1) Z_p``, i.e. has conductor n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, Tuple, Union

from .values import ScaledAlgebraic, declare_involution

Number = Union[int, Fraction]


class InvalidConductorError(ValueError):
    pass


# ---------------------------------------------------------------------------
# elementary number theory

def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) for an odd prime p, by Euler's criterion."""
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def valuation(x: Number, p: int) -> int:
    x = Fraction(x)
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def unit_part(x: Number, p: int) -> Fraction:
    x = Fraction(x)
    return x / Fraction(p) ** valuation(x, p)


def residue(x: Number, modulus: int) -> int:
    """Image of a p-integral rational in Z/modulus."""
    x = Fraction(x)
    return x.numerator * pow(x.denominator, -1, modulus) % modulus if modulus > 1 else 0


def frac_part(x: Number, p: int) -> Fraction:
    """p-adic fractional part {x}_p in [0, 1) with denominator a power of p."""
    x = Fraction(x)
    k = 0
    d = x.denominator
    while d % p == 0:
        d //= p
        k += 1
    if k == 0:
        return Fraction(0)
    pk = p ** k
    return Fraction(x.numerator * pow(d, -1, pk) % pk, pk)


@lru_cache(maxsize=None)
def unit_generator(p: int) -> int:
    """Smallest primitive root mod p that also generates (Z/p^2)^x (odd p)."""
    if p == 2:
        raise ValueError("use the pair (-1, 5) for p = 2")
    order = p - 1
    factors = [q for q in range(2, order + 1) if order % q == 0 and is_prime(q)]
    for g in range(2, p):
        if all(pow(g, order // q, p) != 1 for q in factors):
            if pow(g, p - 1, p * p) == 1:
                g += p
            return g
    raise AssertionError("no primitive root")


@lru_cache(maxsize=None)
def unit_log_table(p: int, a: int) -> Dict[int, Tuple[int, ...]]:
    """Discrete logs of all units mod p^a in the fixed generators."""
    M = p ** a
    table: Dict[int, Tuple[int, ...]] = {}
    if a == 0:
        return {0: (0,) if p != 2 else (0, 0)}
    if p != 2:
        g = unit_generator(p)
        x = 1
        for l in range((p - 1) * p ** (a - 1)):
            table[x] = (l,)
            x = x * g % M
        return table
    n5 = 2 ** (a - 2) if a >= 2 else 1
    for s in range(2 if a >= 2 else 1):
        x = (-1) ** s % M
        for l in range(n5):
            table[x] = (s, l)
            x = x * 5 % M
    return table


def unit_group_orders(p: int, a: int) -> Tuple[int, ...]:
    if p != 2:
        return ((p - 1) * p ** (a - 1) if a >= 1 else 1,)
    return (2 if a >= 2 else 1, 2 ** (a - 2) if a >= 2 else 1)


# ---------------------------------------------------------------------------
# multiplicative characters

def _as_value(v) -> ScaledAlgebraic:
    return ScaledAlgebraic.coerce(v)


@dataclass(frozen=True)
class MultChar:
    """Character of Q_p^x: angles on unit generators plus the value at p."""

    p: int
    angles: Tuple[Fraction, ...]
    value_at_p: ScaledAlgebraic = field(default_factory=ScaledAlgebraic.one)
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "angles", tuple(Fraction(t) % 1 for t in self.angles))
        object.__setattr__(self, "value_at_p", _as_value(self.value_at_p))
        expected = 2 if self.p == 2 else 1
        if len(self.angles) != expected:
            raise ValueError(f"p={self.p} needs {expected} unit angle(s)")
        if self.p == 2:
            if self.angles[0] not in (0, Fraction(1, 2)):
                raise ValueError("the value at -1 must be +-1")
            if self.angles[1].denominator & (self.angles[1].denominator - 1):
                raise ValueError("the value at 5 must be a 2-power root of unity")
        else:
            d = self.angles[0].denominator
            while d % self.p == 0:
                d //= self.p
            if (self.p - 1) % d:
                raise ValueError("unit angle incompatible with the unit group of Z_p")

    @property
    def conductor(self) -> int:
        if self.p != 2:
            d = self.angles[0].denominator
            if d == 1:
                return 0
            j = 0
            while d % self.p == 0:
                d //= self.p
                j += 1
            return j + 1
        alpha, beta = self.angles
        if beta:
            return (beta.denominator.bit_length() - 1) + 2
        return 2 if alpha else 0

    @property
    def a(self) -> int:
        return self.conductor

    def is_unramified(self) -> bool:
        return self.conductor == 0

    def unit_angle(self, u: Number) -> Fraction:
        a = self.conductor
        if a == 0:
            return Fraction(0)
        logs = unit_log_table(self.p, a)[residue(u, self.p ** a)]
        if self.p != 2:
            return (self.angles[0] * logs[0]) % 1
        s, l = logs
        return (self.angles[0] * s + self.angles[1] * l) % 1

    def unit_order(self) -> int:
        """Order of the restriction to Z_p^x."""
        return math.lcm(*(t.denominator for t in self.angles))

    def __call__(self, x: Number) -> ScaledAlgebraic:
        x = Fraction(x)
        v = valuation(x, self.p)
        return self.value_at_p ** v * ScaledAlgebraic.root(self.unit_angle(unit_part(x, self.p)))

    def __mul__(self, other: "MultChar") -> "MultChar":
        if not isinstance(other, MultChar):
            return NotImplemented
        if other.p != self.p:
            raise ValueError("characters of different primes")
        return MultChar(self.p, tuple(s + t for s, t in zip(self.angles, other.angles)),
                        self.value_at_p * other.value_at_p)

    def inverse(self) -> "MultChar":
        return MultChar(self.p, tuple(-t for t in self.angles), self.value_at_p.inverse())

    def __truediv__(self, other: "MultChar") -> "MultChar":
        return self * other.inverse()

    def __pow__(self, n: int) -> "MultChar":
        return MultChar(self.p, tuple(t * n for t in self.angles), self.value_at_p ** n)

    def with_value_at_p(self, value) -> "MultChar":
        return MultChar(self.p, self.angles, _as_value(value), self.name)

    def unit_part_char(self) -> "MultChar":
        """Same restriction to units, value 1 at p."""
        return self.with_value_at_p(1)

    def same_on_units(self, other: "MultChar") -> bool:
        return self.angles == other.angles

    def __repr__(self):
        label = f"{self.name} " if self.name else ""
        return (f"MultChar({label}p={self.p}, a={self.conductor}, "
                f"angles={tuple(str(t) for t in self.angles)}, chi(p)={self.value_at_p})")


def unramified_char(p: int, value_at_p=1, name: str = "") -> MultChar:
    return MultChar(p, (Fraction(0),) * (2 if p == 2 else 1), _as_value(value_at_p), name)


def make_mult_char(p: int, a: int, exponent, value_at_p=1) -> MultChar:
    """Character with ``chi(g) = e(exponent / |(Z/p^a)^x|)`` on the generator(s).

    ``exponent`` is an integer for odd p and a pair (e_-1, e_5) for p = 2, with
    ``chi(-1) = (-1)^e_-1`` and ``chi(5) = e(e_5 / 2^(a-2))``. The conductor of
    the result is the true one, possibly smaller than ``a``.
    """
    if a < 0:
        raise InvalidConductorError("conductor must be non-negative")
    if p == 2 and a == 1:
        raise InvalidConductorError("Q_2 has no characters of conductor 1")
    orders = unit_group_orders(p, a)
    if p != 2:
        angles = (Fraction(int(exponent), orders[0]),)
    else:
        e1, e5 = exponent
        angles = (Fraction(int(e1), 2) if a >= 2 else Fraction(0),
                  Fraction(int(e5), orders[1]) if a >= 3 else Fraction(0))
    return MultChar(p, angles, _as_value(value_at_p))


def all_unit_chars(p: int, a: int, value_at_p=1) -> Iterator[MultChar]:
    """Every character of (Z/p^a)^x (value ``value_at_p`` at p)."""
    if p != 2:
        n = unit_group_orders(p, a)[0]
        for e in range(n):
            yield MultChar(p, (Fraction(e, n),), _as_value(value_at_p))
        return
    n1, n5 = unit_group_orders(p, a)
    for e1 in range(n1):
        for e5 in range(n5):
            yield MultChar(p, (Fraction(e1, 2), Fraction(e5, n5)), _as_value(value_at_p))


def conductor_of_square(chi: MultChar) -> int:
    """Conductor of chi^2 by the closed rule (odd p and p = 2)."""
    a = chi.conductor
    if chi.p != 2:
        if a == 1 and chi.unit_order() == 2:
            return 0
        return a
    if a in (0, 2, 3):
        return 0
    return a - 1


TWIST_CONVENTION_VALUE = {"minus1": 1, "two": 1, "minus2": 1}
"""Values chi(2) of the 2-adic twist characters forced by the product formula.

The global quadratic character is trivial on the idele 2 embedded diagonally;
at every odd place 2 is a unit and the local character is unramified, and at
infinity 2 > 0, so the local component at 2 takes the value 1 at 2.
"""

TWIST_SYMBOL = {"minus1": "chi_-1(2)", "two": "chi_2(2)", "minus2": "chi_-2(2)"}
for _name in TWIST_SYMBOL.values():
    declare_involution(_name)


def twist_char(p: int, variant: str = "odd-p", symbolic: bool = True) -> MultChar:
    """The quadratic twisting character at p.

    ``odd-p``: conductor 1, Legendre symbol on units, value 1 at p.
    ``minus1``/``two``/``minus2`` (p = 2): local components of the characters
    of Q(sqrt-1), Q(sqrt2), Q(sqrt-2); their value at 2 is the symbol
    ``chi_*(2)`` unless ``symbolic`` is false.
    """
    if variant == "odd-p":
        if p == 2:
            raise ValueError("variant 'odd-p' needs an odd prime")
        return MultChar(p, (Fraction(1, 2),), ScaledAlgebraic.one(), f"chi_{p}")
    if p != 2:
        raise ValueError(f"variant {variant!r} is only defined at p = 2")
    angles = {"minus1": (Fraction(1, 2), Fraction(0)),
              "two": (Fraction(0), Fraction(1, 2)),
              "minus2": (Fraction(1, 2), Fraction(1, 2))}
    if variant not in angles:
        raise ValueError(f"unknown twist variant {variant!r}")
    value = (ScaledAlgebraic.symbol(TWIST_SYMBOL[variant]) if symbolic
             else ScaledAlgebraic(TWIST_CONVENTION_VALUE[variant]))
    return MultChar(2, angles[variant], value, f"chi_{variant}")


def default_twist(p: int, symbolic: bool = True) -> MultChar:
    return twist_char(p, "minus1", symbolic) if p == 2 else twist_char(p)


# ---------------------------------------------------------------------------
# additive characters

@dataclass(frozen=True)
class AddChar:
    """x -> e({unit * p^n * x}_p): conductor n, trivial exactly on p^-n Z_p."""

    p: int
    n: int = 0
    unit: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "unit", Fraction(self.unit))
        if self.unit == 0 or valuation(self.unit, self.p) != 0:
            raise ValueError("unit must be a p-adic unit")

    @property
    def conductor(self) -> int:
        return self.n

    @property
    def scale(self) -> Fraction:
        """Element s with phi(x) = e({x / s}_p); valuation -n."""
        return 1 / (Fraction(self.unit) * Fraction(self.p) ** self.n)

    def angle(self, x: Number) -> Fraction:
        return frac_part(Fraction(x) * self.unit * Fraction(self.p) ** self.n, self.p)

    def __call__(self, x: Number) -> ScaledAlgebraic:
        return ScaledAlgebraic.root(self.angle(x))

    def shifted(self, a: Number) -> "AddChar":
        """phi_a(x) = phi(a x)."""
        a = Fraction(a)
        v = valuation(a, self.p)
        return AddChar(self.p, self.n + v, unit_part(a, self.p) * self.unit)


def eval_add(phi: AddChar, x: Number) -> ScaledAlgebraic:
    return phi(x)
