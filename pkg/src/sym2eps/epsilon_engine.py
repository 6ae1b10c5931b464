"""Local epsilon factors from the Gauss-sum definition, and their laws.

    eps(chi, phi, c) = q^(-a/2) chi(c) sum_{x in O^x / U^a} chi^-1(x) phi(x / c)

with v(c) = a(chi) + n(phi). Characters may live on Q_p^x (MultChar with an
AddChar) or on K^x for a quadratic K (KChar with a KAddChar). Sums are
accumulated as histograms of exponents of a fixed root of unity, so every
value is an exact cyclotomic number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple, Union

from .padic_chars import AddChar, MultChar, unit_log_table, unramified_char, valuation
from .quadratic_ext import KAddChar, KChar, QuadExt, compose_norm, omega_K, trace_add_char
from .values import Cyclotomic, ScaledAlgebraic

SUM_CAP = 10 ** 6

S_SYMBOL = "p^-s"
"""Formal symbol standing for p^-s in Weil-Deligne epsilon factors."""

AnyChar = Union[MultChar, KChar]
AnyAdd = Union[AddChar, KAddChar]


class OracleError(ValueError):
    pass


def _lcm_den(values) -> int:
    L = 1
    for v in values:
        L = math.lcm(L, Fraction(v).denominator)
    return L


# ---------------------------------------------------------------------------
# the oracle

def default_c(chi: AnyChar, phi: AnyAdd):
    """c = uniformizer^(a + n)."""
    k = chi.conductor + phi.conductor
    if isinstance(chi, KChar):
        return chi.K.power(chi.K.pi, k)
    return Fraction(chi.p) ** k


def _tau_Qp(chi: MultChar, phi: AddChar, c: Fraction) -> Cyclotomic:
    p, a = chi.p, chi.conductor
    A = phi.angle(1 / c)
    if a == 0:
        return Cyclotomic.rational(1)
    mod = p ** a
    if mod > SUM_CAP:
        raise OracleError("unit quotient too large for exhaustive summation")
    table = unit_log_table(p, a)
    L = _lcm_den(list(chi.angles) + [A])
    w = [int(t * L) for t in chi.angles]
    b = int(A * L)
    counts: dict = {}
    for x, logs in table.items():
        j = (b * x - sum(u * l for u, l in zip(w, logs))) % L
        counts[j] = counts.get(j, 0) + 1
    return Cyclotomic.from_histogram(L, counts)


def _tau_K(chi: KChar, psi: KAddChar, c) -> Cyclotomic:
    K, a = chi.K, chi.conductor
    if a == 0:
        return Cyclotomic.rational(1)
    M = K.model_precision(a)
    if M < chi.M:
        chi = chi.rebase(M)
    M = chi.M
    G = chi.group
    if G.size > SUM_CAP:
        raise OracleError("unit quotient too large for exhaustive summation")
    cinv = K.inv(c)
    A0 = psi.angle(cinv)
    A1 = psi.angle(K.mul((Fraction(0), Fraction(1)), cinv))
    L = _lcm_den(list(chi.angles) + [A0, A1])
    w = [int(t * L) for t in chi.angles]
    b0, b1 = int(A0 * L), int(A1 * L)
    counts: dict = {}
    for r, coords in G.coords.items():
        j = (b0 * r[0] + b1 * r[1] - sum(x * y for x, y in zip(w, coords))) % L
        counts[j] = counts.get(j, 0) + 1
    tau = Cyclotomic.from_histogram(L, counts)
    index = Fraction(G.size, (K.q - 1) * K.q ** (a - 1))
    if index.denominator != 1:
        raise AssertionError("model precision below the conductor")
    return tau / int(index)


def epsilon_oracle(chi: AnyChar, phi: AnyAdd, c=None) -> ScaledAlgebraic:
    """eps(chi, phi, c) by literal summation over O^x / U^a."""
    if c is None:
        c = default_c(chi, phi)
    a, n = chi.conductor, phi.conductor
    if isinstance(chi, KChar):
        if not isinstance(phi, KAddChar) or phi.K != chi.K:
            raise OracleError("a character of K^x needs an additive character of K")
        K = chi.K
        if K.val(c) != a + n:
            raise OracleError(f"v(c) must be a + n = {a + n}")
        tau = _tau_K(chi, phi, c)
        scale = ScaledAlgebraic.prime_power(K.p, Fraction(-K.f * a, 2))
    else:
        c = Fraction(c)
        if valuation(c, chi.p) != a + n:
            raise OracleError(f"v(c) must be a + n = {a + n}")
        tau = _tau_Qp(chi, phi, c)
        scale = ScaledAlgebraic.prime_power(chi.p, Fraction(-a, 2))
    return scale * chi(c) * ScaledAlgebraic(tau)


def epsilon_at(chi: AnyChar, phi: AnyAdd, s: Union[Fraction, int, str] = Fraction(1, 2)):
    """eps(s, chi, phi) = eps(chi |.|^(s - 1/2), phi).

    ``s`` is a rational number or the string ``"s"``, in which case p^-s is
    kept as the formal symbol ``p^-s``.
    """
    base = epsilon_oracle(chi, phi)
    k = chi.conductor + phi.conductor
    if isinstance(chi, KChar):
        p, f = chi.K.p, chi.K.f
    else:
        p, f = chi.p, 1
    if s == "s":
        return base * ScaledAlgebraic.prime_power(p, Fraction(f * k, 2)) * \
            ScaledAlgebraic.symbol(S_SYMBOL, f * k)
    shift = Fraction(s) - Fraction(1, 2)
    return base * ScaledAlgebraic.prime_power(p, -shift * f * k)


# ---------------------------------------------------------------------------
# transformation laws

def shift_additive(chi: MultChar, phi: AddChar, a, s=Fraction(1, 2)) -> ScaledAlgebraic:
    """eps(s, chi, phi_a) / eps(s, chi, phi) = chi(a) |a|^(s - 1/2).

    The unitary normalization of the oracle makes the ratio chi(a) at s = 1/2.
    The familiar chi(a) |a|^-1 belongs to a fixed Haar measure at s = 0 and is
    not what the oracle computes.
    """
    a = Fraction(a)
    return chi(a) * ScaledAlgebraic.prime_power(chi.p, -Fraction(s - Fraction(1, 2)) * valuation(a, chi.p))


def unramified_twist(chi: AnyChar, theta: AnyChar, phi: AnyAdd) -> ScaledAlgebraic:
    """eps(chi theta, phi) / eps(chi, phi) = theta(uniformizer)^(a(chi) + n(phi))."""
    if theta.conductor:
        raise ValueError("theta must be unramified")
    pi_value = theta.value_at_pi if isinstance(theta, KChar) else theta.value_at_p
    return pi_value ** (chi.conductor + phi.conductor)


def lambda_constant(K: QuadExt, phi: AddChar) -> ScaledAlgebraic:
    """lambda(K/Q_p, phi) = eps(1) eps(w_K) / eps(1_K, phi o Tr)."""
    one = unramified_char(K.p)
    oneK = compose_norm(one, K)
    return (epsilon_oracle(one, phi) * epsilon_oracle(omega_K(K), phi)
            / epsilon_oracle(oneK, trace_add_char(phi, K)))


@dataclass(frozen=True)
class InductionCheck:
    k_side: ScaledAlgebraic
    base_side: Optional[ScaledAlgebraic]
    match: Optional[bool]


def inductive_degree_zero(kappa: KChar, phi: AddChar,
                          base: Optional[MultChar] = None) -> InductionCheck:
    """Degree-zero induction: eps(Ind kappa) / eps(Ind 1_K) = eps(kappa, psi) / eps(1_K, psi).

    If ``base`` is given and kappa = base o N, Ind kappa = base + base w_K and
    the left side is computed independently from characters of Q_p.
    """
    K = kappa.K
    psi = trace_add_char(phi, K)
    oneK = compose_norm(unramified_char(K.p), K)
    k_side = epsilon_oracle(kappa, psi) / epsilon_oracle(oneK, psi)
    if base is None:
        return InductionCheck(k_side, None, None)
    if not compose_norm(base, K).same_as(kappa):
        raise ValueError("kappa is not base o N")
    w = omega_K(K)
    one = unramified_char(K.p)
    base_side = (epsilon_oracle(base, phi) * epsilon_oracle(base * w, phi)
                 / (epsilon_oracle(one, phi) * epsilon_oracle(w, phi)))
    return InductionCheck(k_side, base_side, k_side == base_side)


# ---------------------------------------------------------------------------
# gamma elements and the twisting law

def _unit_reps_Qp(p: int, depth: int) -> List[int]:
    if depth <= 0:
        return [1]
    return [u for u in range(1, p ** depth) if u % p]


def find_gamma_element(chi: AnyChar, phi: AnyAdd):
    """c with v(c) = -(a + n) and chi(1 + x) = phi(c x) whenever 2 v(x) >= a."""
    a, n = chi.conductor, phi.conductor
    r = -(-a // 2)
    depth = a - r
    if isinstance(chi, KChar):
        return _gamma_K(chi, phi, a, n, r, depth)
    p = chi.p
    if a == 0:
        return Fraction(p) ** (-n)
    base = Fraction(p) ** (-(a + n))
    tests = [Fraction(p) ** r * t for t in range(p ** depth)]
    for u in _unit_reps_Qp(p, depth):
        c = base * u
        if all(chi.unit_angle(1 + x) == phi.angle(c * x) for x in tests):
            return c
    raise AssertionError("no gamma element found")


def _gamma_K(chi: KChar, psi: KAddChar, a, n, r, depth):
    K = chi.K
    if a == 0:
        return K.power(K.pi, -n)
    base = K.power(K.pi, -(a + n))
    if depth == 0:
        return base
    Md = K.model_precision(depth)
    mod = K.p ** Md
    pir = K.power(K.pi, r)
    tests = [K.mul(pir, (Fraction(x), Fraction(y))) for x in range(mod) for y in range(mod)]
    one_plus = [(1 + t[0], t[1]) for t in tests]
    targets = [chi.unit_angle(v) for v in one_plus]
    for u in K.units_mod(Md):
        c = K.mul(base, K.elt(*u))
        if all(psi.angle(K.mul(c, t)) == g for t, g in zip(tests, targets)):
            return c
    raise AssertionError("no gamma element found")


def deligne_twist_ratio(alpha: AnyChar, beta: AnyChar, phi: AnyAdd) -> ScaledAlgebraic:
    """eps(alpha beta, phi) / eps(alpha, phi) = beta^-1(c) when a(alpha) >= 2 a(beta)."""
    if alpha.conductor < 2 * beta.conductor:
        raise ValueError("need a(alpha) >= 2 a(beta)")
    c = find_gamma_element(alpha, phi)
    return beta(c).inverse()


# ---------------------------------------------------------------------------
# Weil-Deligne representations

@dataclass(frozen=True)
class Induced:
    """Two-dimensional summand Ind_K^Q_p kappa."""

    kappa: KChar


Summand = Union[MultChar, Induced]


@dataclass(frozen=True)
class WDRep:
    """Direct sum of characters and induced blocks with a nilpotent operator.

    ``nilpotent`` is a square 0/1 matrix on the basis in which each character
    occupies one coordinate and each induced block two; it may only connect
    character coordinates.
    """

    summands: Tuple[Summand, ...]
    nilpotent: Tuple[Tuple[int, ...], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "summands", tuple(self.summands))
        d = self.dimension
        if not self.nilpotent:
            object.__setattr__(self, "nilpotent", tuple((0,) * d for _ in range(d)))
        else:
            object.__setattr__(self, "nilpotent", tuple(tuple(r) for r in self.nilpotent))
        if len(self.nilpotent) != d or any(len(r) != d for r in self.nilpotent):
            raise ValueError("nilpotent matrix has the wrong shape")
        if not _is_nilpotent(self.nilpotent):
            raise ValueError("matrix is not nilpotent")

    @property
    def dimension(self) -> int:
        return sum(2 if isinstance(s, Induced) else 1 for s in self.summands)

    def coordinates(self) -> List[Optional[MultChar]]:
        out: List[Optional[MultChar]] = []
        for s in self.summands:
            out.extend([None, None] if isinstance(s, Induced) else [s])
        return out


def _matmul(A, B):
    n = len(A)
    return [[sum(A[i][k] * B[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def _is_nilpotent(N) -> bool:
    P = [list(r) for r in N]
    for _ in range(len(N) - 1):
        P = _matmul(P, N)
    return all(v == 0 for r in P for v in r)


def _s_factor(p: int, s) -> ScaledAlgebraic:
    """p^-s."""
    if s == "s":
        return ScaledAlgebraic.symbol(S_SYMBOL)
    return ScaledAlgebraic.prime_power(p, -Fraction(s))


def _p_of(rho: WDRep) -> int:
    s = rho.summands[0]
    return s.kappa.K.p if isinstance(s, Induced) else s.p


def wd_correction(rho: WDRep, s=Fraction(1, 2)) -> ScaledAlgebraic:
    """det(-Phi p^-s | V^I / V^I_N), Phi acting on a character chi by chi(p)."""
    p = _p_of(rho)
    coords = rho.coordinates()
    N = rho.nilpotent
    unram = [i for i, ch in enumerate(coords) if ch is not None and ch.conductor == 0]
    out = ScaledAlgebraic.one()
    for i in unram:
        # basis vector i survives in the quotient iff N moves it
        if any(N[j][i] for j in range(len(N))):
            out = out * (-(coords[i].value_at_p * _s_factor(p, s)))
    return out


def epsilon_semisimple(rho: WDRep, phi: AddChar, s=Fraction(1, 2)) -> ScaledAlgebraic:
    out = ScaledAlgebraic.one()
    for summand in rho.summands:
        if isinstance(summand, Induced):
            K = summand.kappa.K
            out = out * lambda_constant(K, phi) * epsilon_at(summand.kappa, trace_add_char(phi, K), s)
        else:
            out = out * epsilon_at(summand, phi, s)
    return out


def epsilon_wd(rho: WDRep, phi: AddChar, s=Fraction(1, 2)) -> ScaledAlgebraic:
    """eps(s, rho', phi) = eps(s, rho, phi) * det(-Phi p^-s | V^I / V^I_N)."""
    return epsilon_semisimple(rho, phi, s) * wd_correction(rho, s)


def twist_wd(rho: WDRep, chi: MultChar) -> WDRep:
    """rho' (x) chi."""
    out: List[Summand] = []
    for summand in rho.summands:
        if isinstance(summand, Induced):
            out.append(Induced(summand.kappa * compose_norm(chi, summand.kappa.K)))
        else:
            out.append(summand * chi)
    return WDRep(tuple(out), rho.nilpotent)


def adapted_additive_char(theta: MultChar, n: int = 0) -> AddChar:
    """phi_u of conductor n whose gamma element for theta is exactly p^-(a + n).

    Starting from the standard character of conductor n, theta(1 + x) =
    phi(c x) with c = p^-(a + n) u; replacing phi by phi_u moves the unit u
    into the additive character.
    """
    p = theta.p
    phi = AddChar(p, n)
    if theta.conductor == 0:
        return phi
    c = find_gamma_element(theta, phi)
    u = c * Fraction(p) ** (theta.conductor + n)
    return AddChar(p, n, u)
