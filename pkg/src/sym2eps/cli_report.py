"""Record parsing, report generation, verification sweeps and the command line.

Exit codes: 0 ok, 1 verification failure, 2 input error, 3 unsupported regime.
"""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import sym2_transfer as st
from .gauss_engine import (FFChar, davenport_hasse_check, gamma_functional_equation_holds,
                           gamma_reflection_holds, gauss_sum, gross_koblitz_eval)
from .padic_chars import MultChar, all_unit_chars, is_prime, make_mult_char, unramified_char
from .quadratic_ext import KChar, QuadExt, make_quad_ext, quad_exts
from .values import ScaledAlgebraic as SA

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_REGIME = 0, 1, 2, 3
P_CAP, COND_CAP = 13, 3


class InputError(ValueError):
    """Malformed or inconsistent record; the message starts with the field path."""


# ---------------------------------------------------------------------------
# records

@dataclass(frozen=True)
class NewformRecord:
    weight: int
    primes: Tuple[st.NewformLocalData, ...]
    level: int
    flags: Dict[str, bool] = field(default_factory=dict)


def _require(obj, key, path, kind=None):
    if not isinstance(obj, dict) or key not in obj:
        raise InputError(f"{path}: missing field {key!r}")
    v = obj[key]
    if kind is not None and not isinstance(v, kind):
        raise InputError(f"{path}.{key}: expected {getattr(kind, '__name__', kind)}")
    return v


def _int(obj, key, path, default=None) -> int:
    if default is not None and key not in obj:
        return default
    v = _require(obj, key, path)
    if isinstance(v, bool) or not isinstance(v, int):
        raise InputError(f"{path}.{key}: expected an integer")
    return v


def parse_value(v, path: str) -> Optional[SA]:
    """"symbolic" (None), a number, or {num, den, cyclotomic: {m, k}} = num/den * zeta_m^k."""
    if v == "symbolic":
        return None
    if isinstance(v, (int, str)) and not isinstance(v, bool):
        try:
            return SA(Fraction(v))
        except (ValueError, ZeroDivisionError):
            raise InputError(f"{path}: not a rational number: {v!r}") from None
    if not isinstance(v, dict):
        raise InputError(f"{path}: expected \"symbolic\" or {{num, den, cyclotomic?}}")
    num = _int(v, "num", path)
    den = _int(v, "den", path, 1)
    if den == 0:
        raise InputError(f"{path}.den: zero denominator")
    out = SA(Fraction(num, den))
    if "cyclotomic" in v:
        c = v["cyclotomic"]
        m = _int(c, "m", f"{path}.cyclotomic")
        if m < 1:
            raise InputError(f"{path}.cyclotomic.m: must be positive")
        out = out * SA.root(Fraction(_int(c, "k", f"{path}.cyclotomic", 0), m))
    return out


def _parse_nebentypus(obj, p: int, C: int, path: str) -> MultChar:
    """Default: the character sending the generator(s) to e(1 / |(Z/p^C)^x|)."""
    value = parse_value(obj.get("value_at_p", 1), f"{path}.value_at_p") if obj else SA(1)
    if value is None:
        value = SA.symbol(f"omega_{p}(p)")
    if obj and "exponent" in obj:
        e = obj["exponent"]
        if p == 2 and not (isinstance(e, list) and len(e) == 2):
            raise InputError(f"{path}.exponent: p = 2 needs a pair [e_-1, e_5]")
    elif p == 2:
        e = (0, 1) if C >= 3 else (1, 0)
    else:
        e = 1
    try:
        w = make_mult_char(p, C, e, value)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None
    if w.conductor != C:
        raise InputError(f"{path}: conductor {w.conductor} differs from Cp = {C}")
    return w


def _parse_K(obj, p: int, path: str) -> QuadExt:
    kind = _require(obj, "kind", path, str)
    if kind not in ("unramified", "ramified"):
        raise InputError(f"{path}.kind: expected unramified or ramified")
    t = obj.get("square_class", "unramified" if kind == "unramified" else None)
    if t is None:
        raise InputError(f"{path}: a ramified K needs square_class")
    try:
        K = make_quad_ext(p, t)
    except ValueError as exc:
        raise InputError(f"{path}.square_class: {exc}") from None
    if K.kind != kind:
        raise InputError(f"{path}: square class {t} gives a {K.kind} extension")
    return K


def _parse_kappa(obj, K: QuadExt, path: str, sigma2) -> KChar:
    a = _int(obj, "conductor", path)
    if a < 0:
        raise InputError(f"{path}.conductor: must be non-negative")
    M = max(K.model_precision(a), 1)
    G = K.unit_group(M)
    at_pi = parse_value(obj.get("value_at_pi", 1), f"{path}.value_at_pi")
    if at_pi is None:
        at_pi = SA.symbol(f"kappa_{K.p}(pi)")
    if "exponents" in obj:
        e = obj["exponents"]
        if not isinstance(e, list) or len(e) != len(G.orders):
            raise InputError(f"{path}.exponents: expected {len(G.orders)} integers "
                             f"for generator orders {list(G.orders)}")
        angles = [Fraction(int(x), n) for x, n in zip(e, G.orders)]
        kappa = KChar(K, M, tuple(angles), at_pi, sigma2)
    elif "table" in obj:
        kappa = _kappa_from_table(obj["table"], K, M, at_pi, sigma2, f"{path}.table")
    else:
        raise InputError(f"{path}: give exponents or table")
    if kappa.conductor != a:
        raise InputError(f"{path}.conductor: declared {a}, the character has {kappa.conductor}")
    return kappa


def _kappa_from_table(rows, K: QuadExt, M: int, at_pi, sigma2, path: str) -> KChar:
    """Rows [x, y, angle]: kappa(x + y w) = e(angle) on (O_K/p^M)^x."""
    G = K.unit_group(M)
    if not isinstance(rows, list) or len(rows) != G.size:
        n = len(rows) if isinstance(rows, list) else "no"
        raise InputError(f"{path}: expected {G.size} entries for (O_K/p^{M})^x, got {n}")
    mod = K.p ** M
    table = {}
    for i, row in enumerate(rows):
        if not (isinstance(row, list) and len(row) == 3):
            raise InputError(f"{path}[{i}]: expected [x, y, angle]")
        key = (int(row[0]) % mod, int(row[1]) % mod)
        if key not in G.coords:
            raise InputError(f"{path}[{i}]: {key} is not a unit mod p^{M}")
        table[key] = Fraction(row[2]) % 1
    if len(table) != G.size:
        raise InputError(f"{path}: repeated residues")
    try:
        kappa = KChar(K, M, tuple(table[b] for b in G.basis), at_pi, sigma2)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None
    if any(kappa.unit_angle_mod(r) != t for r, t in table.items()):
        raise InputError(f"{path}: the table is not a character")
    return kappa


def _parse_prime(obj, weight: int, flags: Dict[str, bool], path: str) -> st.NewformLocalData:
    p = _int(obj, "p", path)
    if not is_prime(p):
        raise InputError(f"{path}.p: {p} is not prime")
    N, C = _int(obj, "Np", path), _int(obj, "Cp", path)
    if not 0 <= C <= N:
        raise InputError(f"{path}: need 0 <= Cp <= Np (got Cp = {C}, Np = {N})")
    a_p = parse_value(obj.get("ap", "symbolic"), f"{path}.ap")
    kind = obj.get("type", "principal")
    if kind not in st.TYPES:
        raise InputError(f"{path}.type: expected one of {st.TYPES}")
    neb = None
    sc = None
    if kind == "principal":
        neb = _parse_nebentypus(obj.get("nebentypus"), p, C, f"{path}.nebentypus")
    elif kind == "supercuspidal":
        scobj = _require(obj, "supercuspidal", path, dict)
        K = _parse_K(_require(scobj, "K", f"{path}.supercuspidal", dict), p,
                     f"{path}.supercuspidal.K")
        s2 = None
        if "kappa_sigma2" in scobj:
            s2 = parse_value(scobj["kappa_sigma2"], f"{path}.supercuspidal.kappa_sigma2")
        kappa = _parse_kappa(_require(scobj, "kappa", f"{path}.supercuspidal", dict), K,
                             f"{path}.supercuspidal.kappa", s2)
        sc = st.SupercuspidalData(K, kappa, s2)
        if "nebentypus" in obj:
            neb = _parse_nebentypus(obj["nebentypus"], p, C, f"{path}.nebentypus")
    elif "nebentypus" in obj:
        raise InputError(f"{path}.nebentypus: special type has trivial nebentypus at p")
    try:
        return st.NewformLocalData(p, N, C, weight, a_p, neb, kind, sc, **flags)
    except (st.DataError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from None


def parse_record(source) -> NewformRecord:
    """Parse a record from a path, an open stream, a JSON string or a dict."""
    if isinstance(source, dict):
        obj = source
    else:
        try:
            if hasattr(source, "read"):
                obj = json.load(source)
            else:
                with open(source) as fh:
                    obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"$: invalid JSON: {exc}") from None
        except OSError as exc:
            raise InputError(f"$: cannot read {source}: {exc}") from None
    if not isinstance(obj, dict):
        raise InputError("$: expected an object")
    weight = _int(obj, "weight", "$")
    if weight < 2:
        raise InputError("$.weight: must be at least 2")
    fl = obj.get("flags", {})
    if not isinstance(fl, dict):
        raise InputError("$.flags: expected an object")
    flags = {}
    for name in ("minimal", "H1", "H2"):
        v = fl.get(name, True)
        if not isinstance(v, bool):
            raise InputError(f"$.flags.{name}: expected a boolean")
        flags[name] = v
    rows = _require(obj, "primes", "$", list)
    primes = [_parse_prime(r, weight, flags, f"$.primes[{i}]") for i, r in enumerate(rows)]
    ps = [d.p for d in primes]
    if len(set(ps)) != len(ps):
        raise InputError("$.primes: a prime is listed twice")
    level = math.prod(d.p ** d.N_p for d in primes)
    if "level" in obj and obj["level"] != level:
        raise InputError(f"$.level: {obj['level']} differs from the product of p^Np = {level}")
    primes.sort(key=lambda d: d.p)
    return NewformRecord(weight, tuple(primes), level, flags)


# ---------------------------------------------------------------------------
# reports

@dataclass(frozen=True)
class PrimeReport:
    data: st.NewformLocalData
    variation: st.VariationReport
    conductor: int
    prime_set: str
    classification: st.Classification
    observed: Optional[str]


@dataclass(frozen=True)
class Report:
    record: NewformRecord
    primes: Tuple[PrimeReport, ...]
    conductor: st.ConductorReport


def run_report(r: NewformRecord, oracle: bool = False) -> Report:
    """Variation number, local conductor and classification per prime, plus the global conductor."""
    if not r.flags.get("minimal", True):
        raise st.RegimeError("the closed forms need a p-minimal newform")
    out = []
    for d in r.primes:
        v = st.variation(d, oracle)
        obs = st.observed_property(v.epsilon, d.p, d.C_p)
        cls = st.classify_from_global(d, obs)
        out.append(PrimeReport(d, v, st.conductor_sym2_local(d), st.local_set(d), cls, obs))
    cond = st.conductor_sym2_global(r.primes)
    if not cond.consistent:
        raise st.DataError("product formula and local conductors disagree")
    return Report(r, tuple(out), cond)


def value_json(v: Optional[SA]):
    if v is None:
        return None
    rp = v.root_part.minimal()
    return {
        "text": str(v),
        "radicals": {str(q): str(e) for q, e in v.radicals.items()},
        "symbols": dict(v.symbols),
        "cyclotomic": {"m": rp.m, "coeffs": [str(c) for c in rp.coeffs]},
    }


def report_json(rep: Report) -> dict:
    primes = []
    for pr in rep.primes:
        d, v, c = pr.data, pr.variation, pr.classification
        primes.append({
            "p": d.p, "Np": d.N_p, "Cp": d.C_p, "type": d.declared_type,
            "epsilon": {
                "value": value_json(v.epsilon), "branch": v.branch,
                "printed": value_json(v.printed), "A_theta": value_json(v.A_theta),
                "oracle": value_json(v.oracle_value), "match": v.match,
                "printed_match": v.printed_match, "match_mode": v.match_mode,
                "phi": {"conductor": v.phi_conductor, "unit": str(v.phi_unit)},
                "notes": list(v.notes),
            },
            "conductor": {"a_sym2": pr.conductor, "set": pr.prime_set,
                          "M_prime": rep.conductor.M_prime[d.p]},
            "classification": {"observed": pr.observed, "family": c.family,
                               "type": c.type_tag, "K_kind": c.K_kind, "K": c.K_class,
                               "notes": list(c.notes)},
        })
    g = rep.conductor
    return {
        "weight": rep.record.weight, "level": rep.record.level, "primes": primes,
        "global": {"a_sym2": g.conductor, "product_of_locals": g.product_of_locals,
                   "consistent": g.consistent, "sets": {k: list(v) for k, v in g.sets.items()},
                   "C_tilde": {str(p): c for p, c in g.C_tilde.items()}, "e_pi2": g.e_pi2},
    }


def _factor_text(local: Dict[int, int]) -> str:
    return " * ".join(f"{p}^{e}" for p, e in local.items() if e) or "1"


def report_text(rep: Report) -> str:
    lines = [f"weight {rep.record.weight}, level {rep.record.level}"]
    for pr in rep.primes:
        d, v, c = pr.data, pr.variation, pr.classification
        lines.append(f"p = {d.p}: {d.declared_type}, N_p = {d.N_p}, C_p = {d.C_p}")
        lines.append(f"  eps_{d.p} = {v.epsilon}   [{v.branch}]")
        if v.A_theta is not None:
            lines.append(f"  A_theta = {v.A_theta}")
        if v.printed is not None:
            verdict = {True: "agrees with the oracle", False: "disagrees with the oracle",
                       None: "oracle not run"}[v.printed_match]
            lines.append(f"  printed closed form: {v.printed} ({verdict})")
        if v.match is not None:
            lines.append(f"  oracle: {v.oracle_value} ({'match' if v.match else 'MISMATCH'})")
        for n in v.notes:
            lines.append(f"  note: {n}")
        lines.append(f"  a(sym^2) = {pr.conductor}   [{pr.prime_set}]")
        cls = c.family if c.type_tag == "not-applicable" else f"{c.family}, {c.type_tag}"
        if c.K_kind:
            cls += f", K {c.K_kind}"
        if c.K_class:
            cls += f", K = {c.K_class}"
        lines.append(f"  classification ({pr.observed or 'no property'}): {cls}")
        for n in c.notes:
            lines.append(f"  note: {n}")
    g = rep.conductor
    lines.append(f"global a(sym^2) = {g.conductor} = {_factor_text(g.local)} "
                 f"({'consistent' if g.consistent else 'INCONSISTENT'} with the local conductors)")
    sets = ", ".join(f"{k} = {{{', '.join(map(str, v))}}}" for k, v in g.sets.items() if v)
    lines.append(f"prime sets: {sets}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# verification sweeps

@dataclass
class Check:
    name: str
    cases: int = 0
    failures: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def record(self, ok: bool, detail: str) -> None:
        self.cases += 1
        if not ok and len(self.failures) < 5:
            self.failures.append(detail)
        elif not ok:
            self.failures.append("...")
            self.failures = self.failures[:6]


@dataclass
class PrintedForm:
    """How a printed closed form fares against the oracle, per branch (informational)."""

    name: str
    holds: int = 0
    fails: int = 0
    where: List[str] = field(default_factory=list)

    def record(self, ok: Optional[bool], where: str) -> None:
        if ok is None:
            return
        if ok:
            self.holds += 1
        else:
            self.fails += 1
            if where not in self.where:
                self.where.append(where)


@dataclass
class VerifySummary:
    checks: List[Check]
    variants: Dict[str, PrintedForm]
    seconds: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _odd_primes(p_max: int) -> List[int]:
    return [p for p in range(3, p_max + 1) if is_prime(p)]


def _variant(variants, name) -> PrintedForm:
    if name not in variants:
        variants[name] = PrintedForm(name)
    return variants[name]


def _sweep_local(d: st.NewformLocalData, checks: Dict[str, Check], variants, label: str):
    v = st.variation(d)
    checks["variation"].record(bool(v.match), f"{label}: {v.epsilon} vs oracle {v.oracle_value}")
    _variant(variants, v.branch).record(v.printed_match, f"p={d.p}")
    loc, direct = st.conductor_sym2_local(d), st.conductor_sym2_direct(d)
    checks["conductor"].record(loc == direct, f"{label}: closed rule {loc}, direct {direct}")
    return v


def _principal_sweep(p, cond_max, checks, variants):
    for N in range(1, cond_max + 1):
        if p == 2 and N == 1:
            continue
        for w in all_unit_chars(p, N, SA.root(Fraction(1, 3))):
            if w.conductor != N:
                continue
            d = st.NewformLocalData(p, N, N, 2, SA.root(Fraction(1, 5)), w, "principal")
            _sweep_local(d, checks, variants, f"principal p={p} N={N} omega={w.angles}")


def _special_sweep(p, checks, variants):
    for k in (2, 4):
        d = st.NewformLocalData(p, 1, 0, k, SA(3), None, "special")
        _sweep_local(d, checks, variants, f"special p={p} k={k}")


def _supercuspidal_sweep(p, cond_max, checks, variants, per_case=8):
    for K in quad_exts(p):
        for a in range(1, cond_max + 1):
            if K.kind == "ramified" and a % 2:
                continue
            n = 0
            for kappa in st.dihedral_kappas(K, max(K.model_precision(a), 1), a, True):
                d = st.dihedral_data(kappa, a_p=SA(1))
                v = _sweep_local(d, checks, variants, f"supercuspidal p={p} K={K.t} kappa={kappa}")
                _classification_check(d, v, checks)
                n += 1
                if n >= per_case:
                    break


def _classification_check(d, v, checks):
    """The decision table applied to the observed property must agree with the actual data."""
    obs = st.observed_property(v.epsilon, d.p, d.C_p)
    c = st.classify_from_global(d, obs)
    tag = st.sym2_rep(d).type_tag
    K = d.supercuspidal.K
    ok = c.family == "supercuspidal" and c.K_kind == K.kind
    if c.type_tag in ("TypeI", "TypeII"):
        ok = ok and c.type_tag == tag
    if c.K_class is not None and tag == "TypeI":
        ok = ok and c.K_class == (f"Q_{d.p}(sqrt(-p))" if K.t == -d.p
                                  else f"Q_{d.p}(sqrt(-p zeta_(p-1)))")
    checks["classification"].record(ok, f"p={d.p} K={K.t} N={d.N_p} C={d.C_p}: {c} for {tag}")


def _a_theta_sweep(p, checks, variants):
    ws = [unramified_char(p, SA.root(Fraction(1, 3)))]
    ws += [w for w in all_unit_chars(p, 1, SA.root(Fraction(1, 3))) if w.conductor == 1]
    for w in ws:
        for K in quad_exts(p):
            for choice in ("omega", "omega_omegaK"):
                r = st.A_theta(w, choice, K)
                checks["A_theta"].record(bool(r.match), f"p={p} K={K.t} {choice} omega={w.angles}")
                _variant(variants, f"A_theta: {r.branch}").record(r.printed_match, f"p={p}")


def _gauss_checks(primes, precision, checks, variants):
    c = checks["gauss"]
    for p in primes:
        for r in (1, 2):
            n = p ** r - 1
            for e in range(1, n):
                g = gauss_sum(FFChar(p, r, e))
                c.record(g.abs2() == p ** r, f"|G|^2 for p={p} r={r} e={e}")
        if p > 7:
            continue
        for r in (2, 3):
            for e in range(1, p - 1):
                rep = davenport_hasse_check(FFChar(p, 1, e), r)
                c.record(rep.corrected_holds, f"lifting relation p={p} r={r} e={e}")
                _variant(variants, "Davenport-Hasse without the power r").record(
                    rep.printed_holds, f"p={p} r={r}")
    for p in primes:
        if p == 2:
            continue
        for k in range(2, p):
            if (p - 1) % k:
                continue
            for a in range(1, k):
                rep = gross_koblitz_eval(p, k, a, precision)
                c.record(rep.consistent, f"Gross-Koblitz p={p} a/k={a}/{k}")
                _variant(variants, "Gross-Koblitz with sign +1").record(rep.sign == 1, f"p={p}")
        for x in (Fraction(1, 2), Fraction(1, 3), Fraction(2, 5), Fraction(7)):
            if x.denominator % p == 0:
                continue
            c.record(gamma_functional_equation_holds(p, x, precision), f"Gamma_{p}({x + 1})")
            c.record(gamma_reflection_holds(p, x, precision), f"reflection at {x}, p={p}")


def _impossibility_sweep(primes, checks):
    c = checks["type II impossibility"]
    for p in primes:
        if p not in (3, 5):
            continue
        for K in quad_exts(p):
            for a in ((1, 2) if K.kind == "unramified" else (2, 4)):
                s = st.type_ii_sweep(K, a)
                c.record(not s.witnesses, f"p={p} K={K.t} a={a}: {len(s.witnesses)} witnesses")


def _p2_checks(checks, variants):
    for N in range(2, 7):
        for w in all_unit_chars(2, N, SA.symbol("w_2")):
            if w.conductor == N:
                d = st.NewformLocalData(2, N, N, 2, None, w, "principal")
                _sweep_local(d, checks, variants, f"principal p=2 N={N}")
    _special_sweep(2, checks, variants)
    for t, M, a in ((5, 5, 5), (-1, 4, 7), (3, 4, 7), (2, 4, 8), (-6, 4, 8)):
        K = make_quad_ext(2, t)
        n = 0
        for kappa in st.dihedral_kappas(K, M, a):
            try:
                d = st.dihedral_data(kappa, a_p=SA(1))
            except st.DataError:
                continue
            if d.C_p != 4:
                continue
            try:
                _sweep_local(d, checks, variants, f"dihedral p=2 K={t} a={a}")
            except st.RegimeError:
                continue
            n += 1
            if n >= 3:
                break
    c = checks["parity"]
    for K in quad_exts(2):
        for a in range(1, 6):
            for kappa in st.dihedral_kappas(K, max(K.model_precision(a), 1), a):
                if K.kind == "ramified" and a <= K.delta:
                    _variant(variants, "N_2 parity law at a(kappa) <= delta").record(
                        st.parity_law_holds(kappa), f"K={K.t} a={a}")
                    continue
                c.record(st.parity_law_holds(kappa), f"K={K.t} a={a} kappa={kappa}")


def random_records(count: int, rng: random.Random) -> List[List[st.NewformLocalData]]:
    """Synthetic multi-prime data within the global formula's hypotheses."""
    pool: Dict[int, List[st.NewformLocalData]] = {}
    for p in (3, 5, 7):
        opts = [st.NewformLocalData(p, 1, 0, 2, None, None, "special")]
        for N in (1, 2):
            opts += [st.NewformLocalData(p, N, N, 2, None, w, "principal")
                     for w in all_unit_chars(p, N) if w.conductor == N]
        for K in quad_exts(p)[:1] + ([quad_exts(p)[1]] if p != 7 else []):
            a = 1 if K.kind == "unramified" else 2
            opts += [st.dihedral_data(k) for k in st.dihedral_kappas(K, 1, a, True)]
        pool[p] = opts
    out = []
    for _ in range(count):
        ps = rng.sample(sorted(pool), rng.randint(1, 3))
        out.append([rng.choice(pool[p]) for p in ps])
    return out


def _global_checks(checks):
    c = checks["global conductor"]
    for recs in random_records(20, random.Random(0)):
        g = st.conductor_sym2_global(recs)
        direct = math.prod(d.p ** st.conductor_sym2_direct(d) for d in recs)
        c.record(g.consistent and g.conductor == direct,
                 f"{[(d.p, d.declared_type, d.N_p, d.C_p) for d in recs]}: "
                 f"{g.conductor} vs {g.product_of_locals} vs {direct}")


CHECK_NAMES = ("gauss", "variation", "A_theta", "conductor", "classification",
               "type II impossibility", "parity", "global conductor")


def verify(p_max: int = 7, cond_max: int = 2, precision: int = 20, with_2: bool = False,
           progress: Optional[Callable[[str], None]] = None) -> VerifySummary:
    """Closed forms against the oracle for odd p <= p_max and conductors <= cond_max."""
    if p_max > P_CAP or cond_max > COND_CAP:
        raise InputError(f"cap exceeded: need p-max <= {P_CAP} and cond-max <= {COND_CAP}")
    if p_max < 3 or cond_max < 1:
        raise InputError("need p-max >= 3 and cond-max >= 1")
    t0 = time.time()
    checks = {n: Check(n) for n in CHECK_NAMES}
    variants: Dict[str, PrintedForm] = {}
    primes = _odd_primes(p_max)
    say = progress or (lambda s: None)
    _gauss_checks(([2] if with_2 else []) + primes, precision, checks, variants)
    say("gauss engine done")
    for p in primes:
        _principal_sweep(p, cond_max, checks, variants)
        _special_sweep(p, checks, variants)
        _a_theta_sweep(p, checks, variants)
        _supercuspidal_sweep(p, cond_max, checks, variants)
        say(f"p = {p} done")
    _impossibility_sweep(primes, checks)
    if with_2:
        _p2_checks(checks, variants)
        say("p = 2 done")
    _global_checks(checks)
    used = [c for c in checks.values() if c.cases]
    return VerifySummary(used, variants, time.time() - t0)


def verify_text(s: VerifySummary) -> str:
    lines = []
    for c in s.checks:
        lines.append(f"{'PASS' if c.passed else 'FAIL'}  {c.name} ({c.cases} cases)")
        for f in c.failures:
            lines.append(f"      counterexample: {f}")
    lines.append("printed closed forms against the oracle (informational):")
    for name, v in sorted(s.variants.items()):
        if not v.holds + v.fails:
            continue
        state = "holds" if not v.fails else ("fails" if not v.holds else "fails in part")
        where = f" at {', '.join(v.where)}" if v.where else ""
        lines.append(f"  {name}: {state} ({v.holds} hold, {v.fails} fail){where}")
    lines.append(f"{'all checks passed' if s.passed else 'verification FAILED'} "
                 f"in {s.seconds:.1f} s")
    return "\n".join(lines) + "\n"


def verify_json(s: VerifySummary) -> dict:
    return {
        "passed": s.passed,
        "checks": [{"name": c.name, "passed": c.passed, "cases": c.cases,
                    "counterexamples": c.failures} for c in s.checks],
        "printed_forms": [{"branch": n, "holds": v.holds, "fails": v.fails, "where": v.where}
                          for n, v in sorted(s.variants.items()) if v.holds + v.fails],
    }


# ---------------------------------------------------------------------------
# gauss subcommand

def gauss_report(p: int, r: int, char_order: Optional[int] = None, precision: int = 20) -> dict:
    if not is_prime(p) or r < 1 or r > 3:
        raise InputError("need a prime p and 1 <= r <= 3")
    n = p ** r - 1
    if char_order is not None and (char_order < 2 or n % char_order):
        raise InputError(f"--char-order must be > 1 and divide {n}")
    orders = [char_order] if char_order else [k for k in range(2, n + 1) if n % k == 0]
    rows = []
    for k in orders:
        chi = FFChar(p, r, n // k)
        g = gauss_sum(chi)
        row = {"order": k, "exponent": n // k, "G": value_json(SA(g)),
               "abs2": str(g.abs2().to_rational())}
        if r >= 2 and (p - 1) % k == 0:
            dh = davenport_hasse_check(FFChar(p, 1, (p - 1) // k), r)
            row["lifting"] = {"corrected_holds": dh.corrected_holds,
                              "without_power_holds": dh.printed_holds}
        if r == 1 and p > 2:
            gk = gross_koblitz_eval(p, k, 1, precision)
            row["gross_koblitz"] = {"valuation": gk.valuation_gauss, "expected": gk.valuation_formula,
                                    "sign": gk.sign, "consistent": gk.consistent}
        rows.append(row)
    return {"p": p, "r": r, "characters": rows}


def gauss_text(rep: dict) -> str:
    lines = [f"Gauss sums over F_{rep['p']}^{rep['r']}"]
    for row in rep["characters"]:
        line = f"  order {row['order']}: G = {row['G']['text']}, |G|^2 = {row['abs2']}"
        if "lifting" in row:
            li = row["lifting"]
            line += (f"; lift: -G' = (-G)^r {'holds' if li['corrected_holds'] else 'fails'}, "
                     f"without the power {'holds' if li['without_power_holds'] else 'fails'}")
        if "gross_koblitz" in row:
            gk = row["gross_koblitz"]
            line += f"; Gross-Koblitz sign {gk['sign']}, valuation {gk['valuation']}"
        lines.append(line)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# command line

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sym2eps",
                                 description="Symmetric-square epsilon factors of newforms.")
    ap.add_argument("--precision", type=int, default=20, metavar="M",
                    help="p-adic precision for the Gamma_p checks (default 20)")
    ap.add_argument("--format", choices=("json", "text"), default="text")
    sub = ap.add_subparsers(dest="command", required=True)
    rp = sub.add_parser("report", help="report on a newform record (JSON file)")
    rp.add_argument("file")
    rp.add_argument("--oracle", action="store_true", help="also run the brute-force oracle")
    vp = sub.add_parser("verify", help="closed forms against the oracle")
    vp.add_argument("--p-max", type=int, default=7)
    vp.add_argument("--cond-max", type=int, default=2)
    vp.add_argument("--with-2", action="store_true", help="include the p = 2 sweeps")
    gp = sub.add_parser("gauss", help="Gauss sums over F_(p^r)")
    gp.add_argument("--p", type=int, required=True)
    gp.add_argument("--r", type=int, required=True)
    gp.add_argument("--char-order", type=int)
    return ap


def _emit(obj, text: str, fmt: str, out) -> None:
    out.write(json.dumps(obj, indent=2) + "\n" if fmt == "json" else text)


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    if args.precision < 1:
        print("error: --precision must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        if args.command == "report":
            rep = run_report(parse_record(args.file), oracle=args.oracle)
            _emit(report_json(rep), report_text(rep), args.format, out)
            if args.oracle and any(pr.variation.match is False for pr in rep.primes):
                return EXIT_VERIFY
            return EXIT_OK
        if args.command == "verify":
            s = verify(args.p_max, args.cond_max, args.precision, args.with_2)
            _emit(verify_json(s), verify_text(s), args.format, out)
            return EXIT_OK if s.passed else EXIT_VERIFY
        rep = gauss_report(args.p, args.r, args.char_order, args.precision)
        _emit(rep, gauss_text(rep), args.format, out)
        return EXIT_OK
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except st.DataError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except st.RegimeError as exc:
        print(f"unsupported regime: {exc}", file=sys.stderr)
        return EXIT_REGIME


if __name__ == "__main__":
    sys.exit(main())
