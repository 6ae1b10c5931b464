"""Symmetric-square transfer of local newform data.

Builds the local Langlands parameter of pi_p, its symmetric square, the
variation number

    eps_p = eps(sym^2(pi_p) (x) chi_p) / eps(sym^2(pi_p)),

both as the closed forms stated in the literature ("printed") and as closed
forms re-derived from the transformation laws ("epsilon"), each checked
against the brute-force oracle, and the conductor of sym^2(pi_p).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .epsilon_engine import (S_SYMBOL, Induced, WDRep, adapted_additive_char, epsilon_oracle,
                             epsilon_wd, find_gamma_element, twist_wd)
from .gauss_engine import FFChar, conjugate_match, finite_field, gamma_ratio_image, gauss_sum
from .padic_chars import (AddChar, MultChar, all_unit_chars, default_twist, legendre, unit_part,
                          unramified_char)
from .quadratic_ext import (KChar, QuadExt, all_kchars, compose_norm, induced_conductor,
                            is_sigma_stable, norm_conductor, norm_residue_symbol, omega_K,
                            trace_add_char)
from .values import ScaledAlgebraic as SA

TYPES = ("principal", "special", "supercuspidal")


class DataError(ValueError):
    """Local data violating a structural constraint."""


class RegimeError(ValueError):
    """Input outside the regime a closed form covers."""


# ---------------------------------------------------------------------------
# local data

@dataclass(frozen=True)
class SupercuspidalData:
    K: QuadExt
    kappa: KChar
    kappa_sigma2: Optional[SA] = None


@dataclass(frozen=True)
class NewformLocalData:
    p: int
    N_p: int
    C_p: int
    k: int = 2
    a_p: Optional[SA] = None
    nebentypus: Optional[MultChar] = None
    declared_type: str = "principal"
    supercuspidal: Optional[SupercuspidalData] = None
    minimal: bool = True
    H1: bool = True
    H2: bool = True

    def __post_init__(self):
        a = SA.symbol(f"a_{self.p}") if self.a_p is None else SA.coerce(self.a_p)
        object.__setattr__(self, "a_p", a)
        _validate(self)

    @property
    def omega(self) -> MultChar:
        """The central character omega_p of pi_p."""
        if self.declared_type == "supercuspidal":
            sc = self.supercuspidal
            return sc.kappa.restrict_to_base() * omega_K(sc.K)
        if self.nebentypus is not None:
            return self.nebentypus
        if self.declared_type == "special":
            return unramified_char(self.p)
        raise DataError("principal series data needs the nebentypus character")


def _validate(d: NewformLocalData) -> None:
    if d.declared_type not in TYPES:
        raise DataError(f"unknown type {d.declared_type!r}")
    if d.k < 2:
        raise DataError("weight must be at least 2")
    if not 0 <= d.C_p <= d.N_p:
        raise DataError("need 0 <= C_p <= N_p")
    if d.nebentypus is not None:
        if d.nebentypus.p != d.p:
            raise DataError("nebentypus lives at another prime")
        if d.nebentypus.conductor != d.C_p:
            raise DataError("nebentypus conductor must equal C_p")
    if d.declared_type == "special":
        if (d.N_p, d.C_p) != (1, 0):
            raise DataError("special type requires N_p = 1 and C_p = 0")
    elif d.declared_type == "principal":
        if d.N_p != d.C_p or d.N_p < 1:
            raise DataError("minimal ramified principal series requires N_p = C_p >= 1")
        if d.p == 2 and d.N_p == 1:
            raise DataError("N_2 = 1 cannot occur for principal series at 2")
        if d.nebentypus is None:
            raise DataError("principal series data needs the nebentypus character")
    else:
        sc = d.supercuspidal
        if sc is None:
            raise DataError("supercuspidal type needs K and kappa")
        if sc.K.p != d.p:
            raise DataError("K is an extension of another Q_p")
        if induced_conductor(sc.kappa) != d.N_p:
            raise DataError(f"induced conductor {induced_conductor(sc.kappa)} differs from N_p")
        if is_sigma_stable(sc.kappa):
            raise DataError("kappa is sigma-stable, so Ind kappa is reducible")
        w = d.omega
        if w.conductor != d.C_p:
            raise DataError(f"central character has conductor {w.conductor}, not C_p")
        if d.nebentypus is not None and not d.nebentypus.same_on_units(w):
            raise DataError("nebentypus disagrees with the central character of Ind kappa")
        if sc.kappa_sigma2 is not None and not any(
                v == sc.kappa_sigma2 for v in sigma2_values(sc.kappa)):
            raise DataError("kappa(sigma^2) is not theta at a non-norm")
        if d.p == 2:
            _check_parity(d)


def parity_law_holds(kappa: KChar) -> bool:
    """The 2-adic parity statement as printed: K unramified gives N_2 even;
    K ramified with a(kappa) >= delta gives N_2 odd exactly when kappa is minimal."""
    K = kappa.K
    N = induced_conductor(kappa)
    if K.kind == "unramified":
        return N % 2 == 0
    if kappa.conductor < K.delta:
        return True
    return (N % 2 == 1) == is_minimal_kchar(kappa)


def _check_parity(d: NewformLocalData) -> None:
    """Reject 2-adic data breaking the parity law where it holds.

    The law fails at a(kappa) = delta (minimal kappa with N_2 even exist), so
    only a(kappa) > delta is enforced.
    """
    kappa = d.supercuspidal.kappa
    if kappa.K.kind == "ramified" and kappa.conductor <= kappa.K.delta:
        return
    if not parity_law_holds(kappa):
        raise DataError("N_2 parity contradicts the minimality of kappa")


def sigma2_values(kappa: KChar) -> List[SA]:
    """Possible kappa(sigma^2): theta(x) for x in Q_p^x outside the norm group."""
    K, p = kappa.K, kappa.K.p
    theta = kappa.restrict_to_base()
    w = omega_K(K)
    depth = max(theta.conductor, w.conductor, 1)
    out: List[SA] = []
    for v in (0, 1):
        for u in range(1, p ** depth):
            if u % p == 0:
                continue
            x = Fraction(p) ** v * u
            if w(x) == -1:
                val = theta(x)
                if not any(val == o for o in out):
                    out.append(val)
    return out


def is_minimal_kchar(kappa: KChar) -> bool:
    """No twist kappa (psi o N) has smaller conductor.

    Only psi with a(psi o N) = a(kappa) can lower the conductor, and these
    have a(psi) <= ceil(a / e) at odd p, max(delta, ceil((a + delta) / 2)) at 2.
    """
    K = kappa.K
    a = kappa.conductor
    if a == 0:
        return True
    if K.p != 2 or K.kind == "unramified":
        top = -(-a // K.e)
    else:
        top = max(K.delta, -(-(a + K.delta) // 2))
    for psi in all_unit_chars(K.p, max(top, 2 if K.p == 2 else 1)):
        if norm_conductor(psi, K) != a:
            continue
        if (kappa * compose_norm(psi, K)).conductor < a:
            return False
    return True


# ---------------------------------------------------------------------------
# local parameters

def _abs_power(p: int, s) -> MultChar:
    """|.|^s as an unramified character: value p^-s at p."""
    return unramified_char(p, SA.prime_power(p, -Fraction(s)))


def mu_principal(d: NewformLocalData) -> MultChar:
    """mu_1 unramified with mu_1(p) = a_p / p^((k-1)/2)."""
    return unramified_char(d.p, d.a_p * SA.prime_power(d.p, -Fraction(d.k - 1, 2)), "mu1")


def mu_special(d: NewformLocalData) -> MultChar:
    """mu unramified with mu(p) = a_p / p^((k-2)/2)."""
    return unramified_char(d.p, d.a_p * SA.prime_power(d.p, -Fraction(d.k - 2, 2)), "mu")


def build_local_parameter(d: NewformLocalData) -> WDRep:
    if d.declared_type == "principal":
        mu1 = mu_principal(d)
        return WDRep((mu1, d.omega / mu1))
    if d.declared_type == "special":
        mu = mu_special(d)
        return WDRep((mu * _abs_power(d.p, Fraction(1, 2)), mu * _abs_power(d.p, Fraction(-1, 2))),
                     ((0, 1), (0, 0)))
    return WDRep((Induced(d.supercuspidal.kappa),))


def sym2_nilpotent(N: Sequence[Sequence[int]], conjugate: bool = True) -> Tuple[Tuple[int, ...], ...]:
    """The nilpotent operator of sym^2 on the basis e0^2, e0 e1, e1^2.

    N acts on sym^2 as a derivation. Conjugating by diag(1, 1, 2) turns the
    image of the standard block into the standard 3x3 Jordan block.
    """
    N = [list(r) for r in N]
    if len(N) != 2 or any(len(r) != 2 for r in N):
        raise ValueError("need a 2x2 matrix")
    if N[0][0] * N[0][0] + N[0][1] * N[1][0] or N[0][0] + N[1][1]:
        raise ValueError("matrix is not nilpotent")
    mons = [(0, 0), (0, 1), (1, 1)]
    A = [[0] * 3 for _ in range(3)]
    for col, (i, j) in enumerate(mons):
        # N(e_i e_j) = (N e_i) e_j + e_i (N e_j)
        for (x, y) in ((i, j), (j, i)):
            for r in range(2):
                c = N[r][x]
                if c:
                    row = mons.index(tuple(sorted((r, y))))
                    A[row][col] += c
    if conjugate:
        B = [1, 1, 2]
        A = [[Fraction(A[r][c] * B[r], B[c]) for c in range(3)] for r in range(3)]
    return tuple(tuple(int(v) if Fraction(v).denominator == 1 else Fraction(v) for v in r)
                 for r in A)


# ---------------------------------------------------------------------------
# symmetric square parameter

KINDS = ("principal-3", "special-3", "induced-plus-theta", "split-3")


@dataclass(frozen=True)
class Sym2Parameter:
    """sym^2 of a local parameter.

    ``rep`` is always a WDRep usable by epsilon_wd; for supercuspidal input it
    is Ind(kappa^2) + theta, and for Type II ``split_char`` is the character
    with kappa^2 = split_char o N, so Ind(kappa^2) = split_char + split_char w_K.
    """

    kind: str
    rep: WDRep
    type_tag: str = "not-applicable"
    theta: Optional[MultChar] = None
    kappa2: Optional[KChar] = None
    split_char: Optional[MultChar] = None

    @property
    def summands(self):
        return self.rep.summands

    @property
    def nilpotent(self):
        return self.rep.nilpotent

    def split_summands(self) -> Optional[Tuple[MultChar, MultChar, MultChar]]:
        if self.split_char is None:
            return None
        w = omega_K(self.kappa2.K)
        return (self.split_char, self.split_char * w, self.theta)


def theta_candidates(d: NewformLocalData) -> Tuple[MultChar, MultChar]:
    """(omega_p, omega_p w_K); the one-dimensional summand is always the second."""
    w = d.omega
    return w, w * omega_K(d.supercuspidal.K)


def split_character(kappa2: KChar, kappa: Optional[KChar] = None) -> Optional[MultChar]:
    """A character phi of Q_p^x with kappa2 = phi o N, or None when kappa2 is not sigma-stable.

    For unramified K, N(p) = p^2 forces phi(p) = +-kappa(p); the two roots give
    phi and phi w_K, so either choice describes the same pair. Without kappa
    the root is taken by halving the angle of kappa2(p).
    """
    if not is_sigma_stable(kappa2):
        return None
    K, p = kappa2.K, kappa2.K.p
    top = kappa2.conductor + K.delta + 1
    n0 = K.norm(K.pi)
    if K.kind == "unramified":
        if kappa is not None:
            at_p = kappa.value_at_pi
        else:
            v = kappa2.value_at_pi
            angle = v.root_part.root_angle()
            if angle is None or v.radicals or v.symbols:
                raise RegimeError("kappa^2(p) has no canonical square root")
            at_p = SA.root(angle / 2)
    for psi in all_unit_chars(p, max(top, 2 if p == 2 else 1)):
        if not (kappa2 / compose_norm(psi, K)).is_trivial_on_units():
            continue
        if K.kind == "unramified":
            cand = psi.with_value_at_p(at_p)
        else:
            cand = psi.with_value_at_p(kappa2.value_at_pi / psi(unit_part(n0, p)))
        if compose_norm(cand, K).same_as(kappa2):
            return cand
    raise AssertionError("sigma-stable character without a norm preimage")


def sym2_parameter(rho: WDRep, d: NewformLocalData) -> Sym2Parameter:
    if d.declared_type == "principal":
        m1, m2 = rho.summands
        return Sym2Parameter("principal-3", WDRep((m1 ** 2, m1 * m2, m2 ** 2)))
    if d.declared_type == "special":
        m1, m2 = rho.summands
        N3 = sym2_nilpotent(rho.nilpotent)
        return Sym2Parameter("special-3", WDRep((m1 ** 2, m1 * m2, m2 ** 2), N3))
    kappa = rho.summands[0].kappa
    k2 = kappa ** 2
    theta = kappa.restrict_to_base()
    rep = WDRep((Induced(k2), theta))
    if is_sigma_stable(k2):
        return Sym2Parameter("split-3", rep, "TypeII", theta, k2,
                              split_character(k2, kappa))
    return Sym2Parameter("induced-plus-theta", rep, "TypeI", theta, k2)


def type_ii_impossible_regime(d: NewformLocalData) -> Optional[str]:
    """Name of the regime in which Type II cannot occur, if d lies in one."""
    sc = d.supercuspidal
    K, N, C = sc.K, d.N_p, d.C_p
    if d.p != 2:
        if K.kind == "unramified" and C <= 1 and N >= 4:
            return "odd p, K unramified, C_p <= 1, N_p >= 4"
        if K.kind == "ramified" and C <= 1 and N >= 3:
            return "odd p, K ramified, C_p <= 1, N_p >= 3"
        if K.kind == "ramified" and C == 2 and N == 3:
            return "odd p, K ramified, C_p = 2, N_p = 3"
        return None
    if K.kind == "ramified":
        a, a2 = sc.kappa.conductor, (sc.kappa ** 2).conductor
        if a2 >= K.delta + 1 and (a - a2) % 2 == 0:
            return "p = 2, K ramified, a(kappa^2) >= delta + 1, a(kappa) = a(kappa^2) mod 2"
    return None


def classify_type(s: Sym2Parameter, d: NewformLocalData) -> Tuple[str, Tuple[str, ...]]:
    """Type tag plus notes; Type II inside an impossibility regime is an error."""
    if d.declared_type != "supercuspidal":
        raise ValueError("type I/II only applies to supercuspidal data")
    notes: List[str] = []
    regime = type_ii_impossible_regime(d)
    if regime:
        notes.append(f"Type II impossible: {regime}")
        if s.type_tag == "TypeII":
            raise DataError(f"kappa^2 is sigma-stable inside the regime {regime}")
    if d.p == 2 and d.supercuspidal.K.kind == "unramified" and d.N_p % 2:
        notes.append("K unramified at 2 with N_2 odd")
    return s.type_tag, tuple(notes)


# ---------------------------------------------------------------------------
# variation numbers

@dataclass(frozen=True)
class VariationReport:
    """eps_p from a closed form, with the literal printed value for comparison.

    ``epsilon`` is the closed form re-derived from the transformation laws;
    ``match`` compares it with the brute-force ``oracle_value`` exactly.
    ``printed_match`` compares the printed value with the oracle, exactly or
    up to Galois conjugation as ``match_mode`` says.
    """

    p: int
    epsilon: SA
    branch: str
    printed: Optional[SA] = None
    oracle_value: Optional[SA] = None
    match: Optional[bool] = None
    printed_match: Optional[bool] = None
    match_mode: str = "exact"
    A_theta: Optional[SA] = None
    phi_unit: Fraction = Fraction(1)
    phi_conductor: int = -1
    notes: Tuple[str, ...] = ()


def _finish(p, eps, branch, printed, phi, oracle, mode="exact", A=None, notes=()):
    match = printed_match = None
    if oracle is not None:
        match = eps == oracle
        if printed is not None:
            printed_match = (printed == oracle if mode == "exact"
                             else conjugate_match(oracle, printed))
    return VariationReport(p, eps, branch, printed, oracle, match, printed_match, mode, A,
                           phi.unit, phi.n, tuple(notes))


def twist_character(p: int) -> MultChar:
    """chi_p: the Legendre character at odd p, chi_-1 (value at 2 symbolic) at 2."""
    return default_twist(p)


def standard_phi(p: int) -> AddChar:
    """x -> e({x/p}_p), conductor -1."""
    return AddChar(p, -1)


def sym2_rep(d: NewformLocalData) -> Sym2Parameter:
    return sym2_parameter(build_local_parameter(d), d)


def oracle_variation(d: NewformLocalData, phi: AddChar) -> SA:
    """eps(sym^2 (x) chi_p, phi) / eps(sym^2, phi) by direct summation."""
    rep = sym2_rep(d).rep
    chi = twist_character(d.p)
    return epsilon_wd(twist_wd(rep, chi), phi) / epsilon_wd(rep, phi)


def variation_q(p: int, q: int, val_q: int) -> SA:
    """eps_q = (q/p)^val_q for q != p, p odd."""
    if p == 2 or q == p:
        raise ValueError("need p odd and q != p")
    return SA(legendre(q, p) ** (val_q % 2))


def _quadratic_eps(p: int) -> SA:
    """eps(chi_p, phi) for the standard phi: 1 or i at odd p, i chi_-1(2) at 2."""
    if p == 2:
        return SA.root(Fraction(1, 4)) * twist_character(2).value_at_p
    return SA.one() if p % 4 == 1 else SA.root(Fraction(1, 4))


def _i_if_3mod4(p: int) -> SA:
    return SA.one() if p % 4 == 1 else SA.root(Fraction(1, 4))


def tame_epsilon(alpha: MultChar) -> SA:
    """eps(alpha, phi) for a(alpha) <= 1 and the standard phi, via a Gauss sum over F_p.

    With n(phi) = -1 and a(alpha) = 1 the constant c is 1, so
    eps = p^(-1/2) G(alpha~^-1) for psi(x) = e(x/p); unramified alpha gives 1/alpha(p).
    """
    p = alpha.p
    if alpha.conductor == 0:
        return alpha.value_at_p.inverse()
    if alpha.conductor != 1 or p == 2:
        raise RegimeError("tame epsilon needs a(alpha) <= 1 at odd p")
    j = -alpha.angles[0] * (p - 1)
    return SA.prime_power(p, Fraction(-1, 2)) * SA(gauss_sum(FFChar(p, 1, int(j))))


def variation_principal(d: NewformLocalData, oracle: bool = True) -> VariationReport:
    if d.declared_type != "principal":
        raise ValueError("principal series data expected")
    p, k, N = d.p, d.k, d.N_p
    phi = standard_phi(p)
    w, mu1 = d.omega, mu_principal(d)
    chi = twist_character(p)
    a = d.a_p
    notes: List[str] = []
    mode = "exact"
    if p == 2:
        eps, branch, printed = _principal_p2(d, w, mu1, chi)
    elif N >= 2:
        branch = "principal, odd p, N_p >= 2"
        eps = SA(legendre(2, p)) * mu1(p) ** 2 * _quadratic_eps(p)
        printed = SA.prime_power(p, 1 - k) * a ** 2 * _i_if_3mod4(p)
    else:
        m = w.unit_order()
        t = 2 - 2 * (w ** 2 * chi).conductor + 2 * (w ** 2).conductor
        eps = (mu1(p) ** t * tame_epsilon(chi) * tame_epsilon(w * chi) * tame_epsilon(w ** 2 * chi)
               / (tame_epsilon(w) * tame_epsilon(w ** 2)))
        notes.append(f"t = {t}, a(omega^2 chi_p) = {(w ** 2 * chi).conductor}")
        if m == 2:
            branch = "principal, N_p = 1, omega quadratic on units"
            printed = SA(Fraction(p, 2)) * _i_if_3mod4(p)
        elif m == 4:
            branch = "principal, N_p = 1, omega of order 4 on units"
            printed = (SA.root(Fraction(1, 4)) * SA.prime_power(p, Fraction(5, 4) - 2 * k) * a ** 4
                       * gamma_ratio_image(p, Fraction(3, 4), Fraction(1, 2)))
            mode = "galois-conjugate"
        else:
            branch = "principal, N_p = 1, omega of order > 2, not 4, on units"
            if m == 3:
                notes.append("order 3 uses the order > 4 row (same conductors)")
            b = SA.one()
            for j in (1, 2):
                b = b * gamma_ratio_image(p, Fraction(j, m) + Fraction(1, 2), Fraction(j, m))
            printed = -SA.prime_power(p, 2 - k) * a ** 2 * b * _i_if_3mod4(p)
            mode = "galois-conjugate"
    value = oracle_variation(d, phi) if oracle else None
    return _finish(p, eps, branch, printed, phi, value, mode, notes=notes)


def _principal_p2(d, w, mu1, chi):
    N, k, a = d.N_p, d.k, d.a_p
    i = SA.root(Fraction(1, 4))
    c2 = chi.value_at_p
    w2 = w.value_at_p
    if N == 2:
        eps, branch = i * c2 * w2 ** 2, "principal, p = 2, N_2 = 2"
    elif N == 3:
        sign = -1 if w.angles[0] == 0 else 1
        eps, branch = i * sign * w2 ** 4, "principal, p = 2, N_2 = 3"
    elif N == 4:
        eps, branch = i * w(5) * mu1(2) ** 4, "principal, p = 2, N_2 = 4"
    elif N == 5:
        eps, branch = -i * mu1(2) ** 4, "principal, p = 2, N_2 = 5"
    else:
        eps, branch = i * mu1(2) ** 4, "principal, p = 2, N_2 >= 6"
    if N >= 4:
        printed = i * SA.prime_power(2, 1 - 2 * k) * a ** 4 * c2
    elif N == 2 or w.same_on_units(chi):
        printed = i * w2 ** 2 * c2 / 2
    else:
        printed = -(w2 ** 4) * c2 / 4
    return eps, branch, printed


def variation_special(d: NewformLocalData, oracle: bool = True) -> VariationReport:
    if d.declared_type != "special":
        raise ValueError("special data expected")
    p, k, a = d.p, d.k, d.a_p
    phi = standard_phi(p)
    chi = twist_character(p)
    mu = mu_special(d)
    eps = mu(p) ** (6 * chi.conductor - 4) * _quadratic_eps(p) ** 3
    if p == 2:
        branch = "special, p = 2"
        printed = -SA.root(Fraction(1, 4)) * SA.prime_power(2, 5 - 4 * k) * a ** 8 * chi.value_at_p ** 3
    else:
        branch = "special, odd p"
        printed = a ** 2 * SA.prime_power(p, 2 - k) * _i_if_3mod4(p)
    value = oracle_variation(d, phi) if oracle else None
    return _finish(p, eps, branch, printed, phi, value)


# ---------------------------------------------------------------------------
# the one-dimensional summand theta for C_p <= 1

A_THETA_BRANCHES = (
    "theta unramified, C_p = 0",
    "theta tamely ramified, C_p = 0",
    "C_p = 1, theta quadratic on units",
    "C_p = 1, gamma ratio",
    "C_p = 1, ramified K, theta unramified",
    "C_p = 1, ramified K, inverse gamma ratio",
)


@dataclass(frozen=True)
class AThetaResult:
    theta: MultChar
    value: SA
    printed: SA
    branch: str
    match_mode: str
    oracle_value: Optional[SA] = None

    @property
    def match(self) -> Optional[bool]:
        return None if self.oracle_value is None else self.value == self.oracle_value

    @property
    def printed_match(self) -> Optional[bool]:
        if self.oracle_value is None:
            return None
        if self.match_mode == "exact":
            return self.printed == self.oracle_value
        return conjugate_match(self.oracle_value, self.printed)


def A_theta(d, theta_choice: str = "omega_omegaK", K: Optional[QuadExt] = None,
            oracle: bool = True) -> AThetaResult:
    """A_theta = eps(theta chi_p, phi) / eps(theta, phi), n(phi) = -1.

    ``d`` is NewformLocalData or the central character omega_p itself.
    ``theta_choice`` is "omega" or "omega_omegaK".
    """
    if isinstance(d, NewformLocalData):
        w = d.omega
        if K is None and d.supercuspidal is not None:
            K = d.supercuspidal.K
    else:
        w = d
    p = w.p
    if p == 2:
        raise RegimeError("A_theta is defined for odd p")
    C = w.conductor
    if C >= 2:
        raise RegimeError("C_p >= 2: use the theta-adapted additive character instead")
    if theta_choice not in ("omega", "omega_omegaK"):
        raise ValueError("theta_choice is 'omega' or 'omega_omegaK'")
    if theta_choice == "omega_omegaK" and K is None:
        raise ValueError("need K")
    theta = w if theta_choice == "omega" else w * omega_K(K)
    chi = twist_character(p)
    value = tame_epsilon(theta * chi) / tame_epsilon(theta)
    ramified_branch = theta_choice == "omega_omegaK" and K.kind == "ramified"
    t_p = theta.value_at_p
    mode = "exact"
    if C == 0:
        if not ramified_branch:
            branch, printed = A_THETA_BRANCHES[0], t_p * _i_if_3mod4(p)
        else:
            branch, printed = A_THETA_BRANCHES[1], t_p.inverse() * _i_if_3mod4(p).inverse()
    else:
        n = w.unit_order()
        minus_p_half = SA.root(Fraction(1, 4)) * SA.prime_power(p, Fraction(1, 2))
        x, y = Fraction(1, n) + Fraction(1, 2), Fraction(1, n)
        if not ramified_branch:
            if n <= 2:
                branch, printed = A_THETA_BRANCHES[2], t_p.inverse() * _i_if_3mod4(p).inverse()
            else:
                branch, mode = A_THETA_BRANCHES[3], "galois-conjugate"
                printed = minus_p_half * gamma_ratio_image(p, x, y)
        else:
            if n <= 2:
                branch, printed = A_THETA_BRANCHES[4], t_p * _i_if_3mod4(p)
            else:
                branch, mode = A_THETA_BRANCHES[5], "galois-conjugate"
                printed = minus_p_half * gamma_ratio_image(p, y, x)
    ov = None
    if oracle:
        phi = standard_phi(p)
        ov = epsilon_oracle(theta * chi, phi) / epsilon_oracle(theta, phi)
    return AThetaResult(theta, value, printed, branch, mode, ov)


# ---------------------------------------------------------------------------
# supercuspidal variation numbers

def _residue_root(K: QuadExt) -> Tuple[Fraction, Fraction]:
    """An element rho of O_K reducing to a root of the modulus of F_{p^2}."""
    F = finite_field(K.p, 2)
    f = F.modulus
    p = K.p
    for y0 in range(p):
        for y1 in range(p):
            rho = K.elt(y0, y1)
            acc = K.elt(0)
            power = K.elt(1)
            for c in f:
                acc = (acc[0] + c * power[0], acc[1] + c * power[1])
                power = K.mul(power, rho)
            if acc[0] % p == 0 and acc[1] % p == 0 and (y0, y1) != (0, 0):
                return rho
    raise AssertionError("modulus has no root in the residue field")


def _ff_epsilon(alpha: KChar) -> SA:
    """eps(alpha, phi o Tr) for K unramified, n(phi) = -1, a(alpha) <= 1, via F_{p^2}."""
    K, p = alpha.K, alpha.K.p
    if alpha.conductor == 0:
        return alpha.value_at_pi.inverse()
    if alpha.conductor != 1:
        raise RegimeError("finite field route needs a(alpha) <= 1")
    rho = _residue_root(K)
    exponent = -alpha.unit_angle(rho) * (p * p - 1)
    return SA.prime_power(p, -1) * SA(gauss_sum(FFChar(p, 2, int(exponent))))


def ff_quotient(kappa2: KChar, chiN: KChar) -> SA:
    """eps(kappa^2 chi', psi_K) / eps(kappa^2, psi_K) by Gauss sums over F_{p^2}."""
    return _ff_epsilon(kappa2 * chiN) / _ff_epsilon(kappa2)


def split_quotient(split: MultChar, K: QuadExt) -> SA:
    """eps(phi chi) eps(phi w_K chi) / (eps(phi) eps(phi w_K)) for tame phi (n(phi) = -1)."""
    chi = twist_character(K.p)
    w = omega_K(K)
    return (tame_epsilon(split * chi) * tame_epsilon(split * w * chi)
            / (tame_epsilon(split) * tame_epsilon(split * w)))


def _k_ratio(kappa2: KChar, chiN: KChar, psi) -> Tuple[SA, str]:
    """eps(kappa^2 chi', psi) / eps(kappa^2, psi) by the twisting laws."""
    if kappa2.conductor >= 2 * chiN.conductor and kappa2.conductor > 0 and chiN.conductor:
        e = find_gamma_element(kappa2, psi)
        return chiN(e), "gamma element"
    if chiN.conductor == 0:
        return chiN(kappa2.K.pi) ** (kappa2.conductor + psi.conductor), "unramified twist"
    K = kappa2.K
    if K.p != 2 and K.kind == "unramified" and kappa2.conductor <= 1 and psi.conductor == -1:
        return ff_quotient(kappa2, chiN), "finite field Gauss sums"
    raise RegimeError("no closed form for the K-side quotient in this regime")


def variation_supercuspidal(d: NewformLocalData, oracle: bool = True) -> VariationReport:
    if d.declared_type != "supercuspidal":
        raise ValueError("supercuspidal data expected")
    if d.p == 2:
        return variation_p2_supercuspidal(d, oracle)
    p, N, C = d.p, d.N_p, d.C_p
    sc = d.supercuspidal
    K = sc.K
    s = sym2_rep(d)
    tag, notes = classify_type(s, d)
    notes = list(notes)
    theta, k2 = s.theta, s.kappa2
    chiN = compose_norm(twist_character(p), K)
    A = None
    mode = "exact"
    if C >= 2:
        phi = adapted_additive_char(theta, 0)
    else:
        phi = standard_phi(p)
    psi = trace_add_char(phi, K)
    ratio, how = _k_ratio(k2, chiN, psi)
    notes.append(f"K-side quotient by {how}")
    if C >= 2:
        eps = ratio
        if K.kind == "unramified":
            branch = f"unramified K, C_p >= 2, {tag}"
            printed = ratio if tag == "TypeI" else SA.one()
        else:
            branch = f"ramified K, C_p >= 2, {tag}"
            nrs = norm_residue_symbol(K)
            printed = (SA(1 if nrs == 1 else legendre(-1, p)) if tag == "TypeI" else SA.one())
            notes.append("e has valuation -a(kappa) only for unramified K")
    else:
        At = A_theta(d, "omega_omegaK", K, oracle=False)
        A = At.value
        eps = ratio * A
        mode = At.match_mode
        if N == 2:
            branch = f"N_p = 2, Gauss sums over F_(p^2), {tag}, A_theta: {At.branch}"
            printed = None
            if s.split_char is not None:
                notes.append("split route agrees" if split_quotient(s.split_char, K) == ratio
                             else "split route disagrees")
        elif K.kind == "unramified":
            branch = f"unramified K, C_p <= 1, A_theta: {At.branch}"
            printed = ratio * At.printed
        else:
            branch = f"ramified K, C_p <= 1, A_theta: {At.branch}"
            nrs = norm_residue_symbol(K)
            printed = SA(1 if nrs == 1 else legendre(-1, p)) * At.printed
    value = oracle_variation_with(s, p, phi) if oracle else None
    return _finish(p, eps, branch, printed, phi, value, mode, A, notes)


def oracle_variation_with(s: Sym2Parameter, p: int, phi: AddChar) -> SA:
    chi = twist_character(p)
    return epsilon_wd(twist_wd(s.rep, chi), phi) / epsilon_wd(s.rep, phi)


def variation_p2_supercuspidal(d: NewformLocalData, oracle: bool = True) -> VariationReport:
    if d.p != 2 or d.declared_type != "supercuspidal":
        raise ValueError("dihedral supercuspidal data at 2 expected")
    if not d.H1:
        raise RegimeError("non-dihedral supercuspidal at 2 is not covered")
    if d.C_p <= 3:
        raise RegimeError("the closed forms at 2 need C_2 > 3")
    sc = d.supercuspidal
    K = sc.K
    s = sym2_rep(d)
    tag, notes = classify_type(s, d)
    notes = list(notes)
    theta, k2 = s.theta, s.kappa2
    chi = twist_character(2)
    chiN = compose_norm(chi, K)
    phi = adapted_additive_char(theta, 0)
    psi = trace_add_char(phi, K)
    tw = chi.value_at_p ** d.C_p
    a, a2 = sc.kappa.conductor, k2.conductor
    if K.kind == "unramified" and a2 <= 3:
        raise RegimeError("K unramified at 2 needs a(kappa^2) > 3")
    if K.kind == "ramified" and a2 < K.delta + 1:
        raise RegimeError("K ramified at 2 needs a(kappa^2) >= delta + 1")
    ratio, how = _k_ratio(k2, chiN, psi)
    notes.append(f"K-side quotient by {how}")
    eps = ratio * tw
    if K.kind == "unramified":
        branch = f"p = 2, unramified K, {tag}"
        printed = (chiN(find_gamma_element(k2, psi)) * tw) if tag == "TypeI" else tw
    else:
        if (a - a2) % 2 == 0:
            notes.append("parity hypothesis a(kappa) != a(kappa^2) mod 2 unmet")
        if K.delta == 2:
            branch = "p = 2, ramified K, delta = 2"
            printed = chiN(K.pi) * tw
        else:
            branch = "p = 2, ramified K, delta = 3"
            printed = chiN(find_gamma_element(k2, psi)) * tw
    value = oracle_variation_with(s, 2, phi) if oracle else None
    return _finish(2, eps, branch, printed, phi, value, notes=notes)


def variation(d: NewformLocalData, oracle: bool = True) -> VariationReport:
    if d.declared_type == "principal":
        return variation_principal(d, oracle)
    if d.declared_type == "special":
        return variation_special(d, oracle)
    return variation_supercuspidal(d, oracle)


# ---------------------------------------------------------------------------
# dihedral data helpers

def dihedral_data(kappa: KChar, k: int = 2, a_p=None, **flags) -> NewformLocalData:
    """NewformLocalData of Ind kappa, with N_p and C_p read off kappa."""
    K = kappa.K
    w = kappa.restrict_to_base() * omega_K(K)
    return NewformLocalData(K.p, induced_conductor(kappa), w.conductor, k, a_p, None,
                            "supercuspidal", SupercuspidalData(K, kappa), **flags)


def dihedral_kappas(K: QuadExt, M: int, conductor: Optional[int] = None,
                    minimal_only: bool = False, value_at_pi=1):
    """Characters kappa of K^x on (O_K/p^M)^x with Ind kappa irreducible."""
    for kappa in all_kchars(K, M, value_at_pi):
        if conductor is not None and kappa.conductor != conductor:
            continue
        if is_sigma_stable(kappa):
            continue
        if minimal_only and not is_minimal_kchar(kappa):
            continue
        yield kappa


@dataclass(frozen=True)
class ImpossibilitySweep:
    """Exhaustive search for sigma-stable kappa^2 inside the Type II impossibility regimes."""

    K: QuadExt
    conductor: int
    checked: int
    in_regime: int
    witnesses: Tuple[KChar, ...]


def type_ii_sweep(K: QuadExt, a: int, minimal_only: bool = True) -> ImpossibilitySweep:
    """Every kappa of conductor a on K; counts those in a regime and the Type II ones there."""
    M = max(K.model_precision(a), 1)
    checked = in_regime = 0
    witnesses: List[KChar] = []
    for kappa in dihedral_kappas(K, M, a, minimal_only):
        try:
            d = dihedral_data(kappa)
        except DataError:
            continue
        checked += 1
        if type_ii_impossible_regime(d) is None:
            continue
        in_regime += 1
        if is_sigma_stable(kappa ** 2):
            witnesses.append(kappa)
    return ImpossibilitySweep(K, a, checked, in_regime, tuple(witnesses))


# ---------------------------------------------------------------------------
# classification from the global twist behaviour

PROPERTIES = ("PropertyA", "PropertyB")


@dataclass(frozen=True)
class Classification:
    """Type of sym^2(pi_p) read off (N_p, C_p) and Property A/B.

    ``family`` is principal, special, supercuspidal or undetermined;
    ``type_tag`` is TypeI, TypeII, TypeI-or-TypeII or undetermined;
    ``K_class`` names the quadratic extension when the data pins it.
    """

    p: int
    family: str
    type_tag: str = "not-applicable"
    K_kind: Optional[str] = None
    K_class: Optional[str] = None
    notes: Tuple[str, ...] = ()


def property_target(p: int, C_p: int) -> SA:
    """The value of eps_p meaning Property A: 1 at odd p, chi_-1(2)^C_2 at 2."""
    if p == 2:
        return twist_character(2).value_at_p ** C_p
    return SA.one()


def observed_property(eps: SA, p: int, C_p: int) -> Optional[str]:
    """PropertyA when eps_p equals the target, PropertyB when it is minus it, else None."""
    t = property_target(p, C_p)
    if eps == t:
        return "PropertyA"
    if eps == -t:
        return "PropertyB"
    return None


def twist_sign(p: int, M_prime: int) -> int:
    """chi_p(M') for the quadratic character ramified only at p, M' prime to p."""
    if M_prime % p == 0:
        raise ValueError("M' must be prime to p")
    if p == 2:
        return 1 if M_prime % 4 == 1 else -1
    return legendre(M_prime, p)


def property_from_global(ratio: SA, p: int, C_p: int, M_prime: int) -> Optional[str]:
    """Property A/B from eps(sym^2 pi (x) chi_p) / eps(sym^2 pi) = chi_p(M') eps_p."""
    return observed_property(ratio * SA(twist_sign(p, M_prime)), p, C_p)


def classify_from_global(d: NewformLocalData, observed: Optional[str]) -> Classification:
    """Decision table for the type of sym^2(pi_p) given Property A or B.

    Only p, N_p, C_p and, at 2, the conductors of kappa and kappa^2 are read.
    Regimes the tables do not cover, or an unknown property (None) where the
    table needs one, give family or type "undetermined".
    """
    if observed is not None and observed not in PROPERTIES:
        raise ValueError(f"observed must be one of {PROPERTIES}")
    p, N, C = d.p, d.N_p, d.C_p
    if N == 0:
        return Classification(p, "undetermined", "undetermined",
                              notes=("pi_p unramified: outside the decision tables",))
    if N == C:
        return Classification(p, "principal")
    if N == 1 and C == 0:
        return Classification(p, "special")
    if p == 2:
        return _classify_p2(d, observed)
    notes: List[str] = []
    if N % 2 == 0:
        kind = "unramified"
        if C >= 2:
            if observed is None:
                return _unknown_property(p, kind)
            if observed == "PropertyB":
                return Classification(p, "supercuspidal", "TypeI", kind)
            notes.append("Property A holds for both types in this regime")
            return Classification(p, "supercuspidal", "TypeI-or-TypeII", kind, notes=tuple(notes))
        if N >= 4:
            notes.append("Type II not possible when C_p <= 1, N_p >= 4")
            return Classification(p, "supercuspidal", "TypeI", kind, notes=tuple(notes))
        notes.append("N_p = 2, C_p <= 1: the tables do not decide the type")
        return Classification(p, "supercuspidal", "undetermined", kind, notes=tuple(notes))
    kind = "ramified"
    impossible = C <= 1 or (C == 2 and N == 3)
    if impossible:
        notes.append("Type II not possible when C_p <= 1, N_p >= 3 or C_p = 2, N_p = 3")
    if C <= 1:
        return Classification(p, "supercuspidal", "TypeI", kind, notes=tuple(notes))
    if observed is None:
        return _unknown_property(p, kind)
    if observed == "PropertyB":
        return Classification(p, "supercuspidal", "TypeI", kind, f"Q_{p}(sqrt(-p zeta_(p-1)))",
                              tuple(notes))
    if impossible:
        return Classification(p, "supercuspidal", "TypeI", kind, f"Q_{p}(sqrt(-p))", tuple(notes))
    notes.append(f"if Type I then K = Q_{p}(sqrt(-p))")
    return Classification(p, "supercuspidal", "TypeI-or-TypeII", kind, None, tuple(notes))


def _unknown_property(p: int, kind: str) -> Classification:
    return Classification(p, "supercuspidal", "undetermined", kind,
                          notes=("neither Property A nor Property B observed",))


def _classify_p2(d: NewformLocalData, observed: Optional[str]) -> Classification:
    N = d.N_p
    sc = d.supercuspidal
    if sc is None:
        return Classification(2, "supercuspidal", "undetermined",
                              notes=("no dihedral data at 2",))
    a, a2 = sc.kappa.conductor, (sc.kappa ** 2).conductor
    if N % 2 == 0:
        if a2 <= 3:
            return Classification(2, "supercuspidal", "undetermined", "unramified",
                                  notes=("a(kappa^2) <= 3: the tables do not decide the type",))
        if observed is None:
            return _unknown_property(2, "unramified")
        if observed == "PropertyB":
            return Classification(2, "supercuspidal", "TypeI", "unramified")
        return Classification(2, "supercuspidal", "TypeI-or-TypeII", "unramified",
                              notes=("Property A holds for both types in this regime",))
    if N >= 5 and a2 >= sc.K.delta + 1 and (a - a2) % 2:
        return Classification(2, "supercuspidal", "TypeI", "ramified")
    return Classification(2, "supercuspidal", "undetermined", "ramified",
                          notes=("needs N_2 >= 5, a(kappa^2) >= delta + 1 and "
                                 "a(kappa) != a(kappa^2) mod 2",))


# ---------------------------------------------------------------------------
# conductors

def theta_conductor(d: NewformLocalData) -> int:
    """a(theta) for the one-dimensional summand theta = omega_p w_K."""
    return (d.omega * omega_K(d.supercuspidal.K)).conductor


def local_set(d: NewformLocalData) -> str:
    """Which of S, P1, P2, SC1, SC2 (or P when in none) the prime belongs to."""
    p, N = d.p, d.N_p
    if d.declared_type == "special":
        return "S"
    if d.declared_type == "principal":
        if p != 2 and (N > 1 or d.omega.unit_order() > 2):
            return "P1"
        if p == 2 and N > 3:
            return "P2"
        return "P"
    K = d.supercuspidal.K
    if p != 2 and K.kind == "ramified" and N % 2 == 0:
        raise DataError("K ramified at odd p with N_p even: pi_p is not p-minimal")
    if N == 2 and (d.supercuspidal.kappa ** 2).is_trivial_on_units():
        return "SC1"
    return "SC2"


def e_pi2(d: NewformLocalData, printed: bool = False) -> int:
    """2 a(kappa^2) for K unramified; delta + a(kappa^2) for K ramified (printed: 1 + a)."""
    K = d.supercuspidal.K
    a2 = (d.supercuspidal.kappa ** 2).conductor
    if K.kind == "unramified":
        return 2 * a2
    return (1 if printed else K.delta) + a2


def c_tilde(d: NewformLocalData) -> int:
    """a(theta) for ramified K at odd p with C_p <= 1."""
    if d.C_p == 0:
        return 1
    return 1 if d.omega.unit_order() > 2 else 0


def conductor_sym2_local(d: NewformLocalData, printed: bool = False) -> int:
    """a(sym^2(pi_p)) by the closed rules.

    Odd supercuspidal p uses 2 a(kappa^2) + C_p (K unramified) and
    1 + a(kappa^2) + a(theta) (K ramified), a(theta) = C_p or C~_p; these
    reduce to C_p, N_p + C_p and N_p + C~_p for p-minimal data.

    ``printed`` only changes the ramified 2-adic case, where the stated
    e = 1 + a(kappa^2) replaces the correct delta + a(kappa^2).
    """
    p, N, C = d.p, d.N_p, d.C_p
    if d.declared_type == "special":
        return 2
    if d.declared_type == "principal":
        if p == 2:
            return 2 * N - 1 if N > 3 else N
        if N > 1:
            return 2 * N
        return 2 if d.omega.unit_order() > 2 else 1
    sc = d.supercuspidal
    K = sc.K
    if p == 2:
        if not d.H1:
            raise RegimeError("non-dihedral supercuspidal at 2 is not covered")
        if K.kind == "ramified" and C <= K.delta:
            raise RegimeError("K ramified at 2 needs C_2 > delta")
        return e_pi2(d, printed) + C
    a2 = (sc.kappa ** 2).conductor
    if K.kind == "unramified":
        return 2 * a2 + C
    return 1 + a2 + (C if C >= 2 else c_tilde(d))


def conductor_sym2_structural(d: NewformLocalData) -> int:
    """a(sym^2(pi_p)) summed from the conductors of its pieces."""
    s = sym2_rep(d)
    if d.declared_type == "special":
        return 2
    if d.declared_type == "principal":
        return sum(c.conductor for c in s.summands)
    return induced_conductor(s.kappa2) + s.theta.conductor


def conductor_sym2_direct(d: NewformLocalData) -> int:
    """a(sym^2(pi_p)) as the exponent of p^-s in eps(s, sym^2, phi) with n(phi) = 0."""
    rep = sym2_rep(d).rep
    e = epsilon_wd(rep, AddChar(d.p, 0), "s")
    return e.symbols.get(S_SYMBOL, 0)


@dataclass(frozen=True)
class ConductorReport:
    """Local and global conductors of sym^2(pi) with the prime-set partition."""

    N: int
    local: Dict[int, int]
    sets: Dict[str, Tuple[int, ...]]
    C_tilde: Dict[int, int]
    e_pi2: Optional[int]
    conductor: int
    product_of_locals: int
    M_prime: Dict[int, int]

    @property
    def consistent(self) -> bool:
        return self.conductor == self.product_of_locals


SET_NAMES = ("S", "P", "SC", "P1", "P2", "SC1", "SC2", "SCU", "SCR")


def conductor_sym2_global(data: Sequence[NewformLocalData], printed: bool = False) -> ConductorReport:
    """a(sym^2(pi)) from the product formula over the prime sets.

    N prod_S p prod_(P1, SC2) p^C prod_P2 p^(C - 1) prod_SC1 p^(C - 2), with SC2
    split into SCU (p^C) and SCR (p^C~) when C_p <= 1 at ramified K, and the
    factor 2^(e + C - N) when 2 is supercuspidal. Checked against the product
    of the local conductors.
    """
    primes = [d.p for d in data]
    if len(set(primes)) != len(primes):
        raise DataError("a prime appears twice")
    data = sorted(data, key=lambda d: d.p)
    sets: Dict[str, List[int]] = {name: [] for name in SET_NAMES}
    local: Dict[int, int] = {}
    ct: Dict[int, int] = {}
    e2 = None
    N = 1
    total = 1
    for d in data:
        p, Np, C = d.p, d.N_p, d.C_p
        N *= p ** Np
        local[p] = conductor_sym2_local(d, printed)
        tag = local_set(d)
        family = {"S": "S", "P": "P", "P1": "P", "P2": "P"}.get(tag, "SC")
        sets[family].append(p)
        if tag != family:
            sets[tag].append(p)
        if tag == "P":
            continue
        if tag == "S":
            total *= p
        elif tag == "P1":
            total *= p ** C
        elif tag == "P2":
            total *= p ** (C - 1)
        elif tag == "SC1":
            total *= Fraction(p) ** (C - 2)
        elif p == 2:
            e2 = e_pi2(d, printed)
            total *= Fraction(2) ** (e2 + C - Np)
        elif d.supercuspidal.K.kind == "ramified" and C <= 1:
            sets["SCR"].append(p)
            ct[p] = c_tilde(d)
            total *= p ** ct[p]
        else:
            if C <= 1:
                sets["SCU"].append(p)
            total *= p ** C
    conductor = N * total
    if Fraction(conductor).denominator != 1:
        raise DataError("product formula gave a non-integer conductor")
    conductor = int(conductor)
    product = math.prod(p ** e for p, e in local.items())
    M = {p: product // p ** e for p, e in local.items()}
    return ConductorReport(N, local, {k: tuple(v) for k, v in sets.items()}, ct, e2,
                           conductor, product, M)
