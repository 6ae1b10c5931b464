import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from sym2eps import sym2_transfer as s2
from sym2eps.padic_chars import all_unit_chars, default_twist, legendre, unramified_char
from sym2eps.quadratic_ext import is_sigma_stable, make_quad_ext, quad_exts
from sym2eps.values import ScaledAlgebraic as SA

I = SA.root(Fraction(1, 4))


def primitive(p, N, value=1):
    return next(w for w in all_unit_chars(p, N, value) if w.conductor == N)


def principal(p, N, k=2, a_p=None, w=None):
    return s2.NewformLocalData(p, N, N, k, a_p, w or primitive(p, N), "principal")


def special(p, k=2, a_p=None):
    return s2.NewformLocalData(p, 1, 0, k, a_p, None, "special")


# -- local data ----------------------------------------------------------

def test_local_data_constraints():
    with pytest.raises(s2.DataError):
        s2.NewformLocalData(7, 2, 0, 2, None, None, "special")
    with pytest.raises(s2.DataError):
        s2.NewformLocalData(5, 2, 1, 2, None, primitive(5, 1), "principal")
    with pytest.raises(s2.DataError):
        s2.NewformLocalData(5, 1, 2, 2, None, primitive(5, 2), "principal")
    with pytest.raises(s2.DataError):
        s2.NewformLocalData(2, 1, 1, 2, None, None, "principal")
    K = make_quad_ext(5, "unramified")
    kappa = next(k for k in s2.dihedral_kappas(K, 2, 2))
    with pytest.raises(s2.DataError):
        s2.NewformLocalData(5, 3, 2, 2, None, None, "supercuspidal", s2.SupercuspidalData(K, kappa))


def test_build_local_parameter_special():
    d = special(7)
    rho = s2.build_local_parameter(d)
    m1, m2 = rho.summands
    a = SA.symbol("a_7")
    assert m1.value_at_p == a * SA.prime_power(7, Fraction(-1, 2))
    assert m2.value_at_p == a * SA.prime_power(7, Fraction(1, 2))
    assert rho.nilpotent == ((0, 1), (0, 0))


def test_build_local_parameter_principal():
    d = principal(5, 2)
    m1, m2 = s2.build_local_parameter(d).summands
    assert m1.conductor == 0 and m2.conductor == 2
    assert (m1 * m2).same_on_units(d.omega)
    assert (m1 * m2).value_at_p == d.omega.value_at_p


def test_sym2_nilpotent_examples():
    assert s2.sym2_nilpotent(((0, 0), (0, 0))) == ((0, 0, 0),) * 3
    assert s2.sym2_nilpotent(((0, 1), (0, 0))) == ((0, 1, 0), (0, 0, 1), (0, 0, 0))
    assert s2.sym2_nilpotent(((0, 1), (0, 0)), conjugate=False) == ((0, 1, 0), (0, 0, 2), (0, 0, 0))
    with pytest.raises(ValueError):
        s2.sym2_nilpotent(((1, 0), (0, 0)))


def test_sym2_parameter_kinds():
    d = principal(5, 2)
    s = s2.sym2_rep(d)
    m1, m2 = s2.build_local_parameter(d).summands
    assert s.kind == "principal-3"
    assert [c.conductor for c in s.summands] == [0, 2, 2]
    assert s.summands[0].value_at_p == m1.value_at_p ** 2
    assert s2.sym2_rep(special(7)).kind == "special-3"
    assert s2.sym2_rep(special(7)).nilpotent == ((0, 1, 0), (0, 0, 1), (0, 0, 0))


def test_sym2_parameter_supercuspidal_types():
    K = make_quad_ext(3, "unramified")
    seen = set()
    for kappa in s2.dihedral_kappas(K, 2, 2):
        d = s2.dihedral_data(kappa, minimal=s2.is_minimal_kchar(kappa))
        s = s2.sym2_rep(d)
        second = s2.theta_candidates(d)[1]
        assert s.theta.same_on_units(second) and s.theta.value_at_p == second.value_at_p
        assert (s.type_tag == "TypeII") == is_sigma_stable(kappa ** 2)
        if s.type_tag == "TypeII":
            assert s.kind == "split-3"
            phi = s.split_char
            assert s2.compose_norm(phi, K).same_as(kappa ** 2)
        seen.add(s.type_tag)
    assert seen == {"TypeI", "TypeII"}


def test_classify_type_rejects_type_ii_in_impossible_regime():
    K = make_quad_ext(5, "unramified")
    kappa = next(k for k in s2.dihedral_kappas(K, 2, 2)
                 if s2.dihedral_data(k).C_p <= 1)
    d = s2.dihedral_data(kappa)
    assert s2.type_ii_impossible_regime(d) is not None
    s = s2.sym2_rep(d)
    assert s2.classify_type(s, d)[0] == "TypeI"
    fake = s2.Sym2Parameter("split-3", s.rep, "TypeII", s.theta, s.kappa2)
    with pytest.raises(s2.DataError):
        s2.classify_type(fake, d)


def test_ramified_conductor_two_forces_tame_central_character():
    # a(kappa) = 2 at ramified K means kappa is trivial on 1 + pZ_p, so C_p <= 1
    for p in (5, 7):
        for K in quad_exts(p)[1:]:
            for kappa in s2.dihedral_kappas(K, 1, 2):
                d = s2.dihedral_data(kappa)
                assert d.N_p == 3 and d.C_p <= 1
                assert s2.type_ii_impossible_regime(d) == "odd p, K ramified, C_p <= 1, N_p >= 3"


# -- variation numbers --------------------------------------------------

def test_variation_q_examples():
    assert s2.variation_q(5, 3, 2) == SA.one()
    assert s2.variation_q(5, 3, 1) == SA(-1)
    assert s2.variation_q(7, 2, 3) == SA.one()
    with pytest.raises(ValueError):
        s2.variation_q(5, 5, 1)


@given(st.sampled_from((3, 5, 7, 11, 13)), st.sampled_from((2, 3, 5, 7, 11, 13)),
       st.integers(0, 6))
def test_variation_q_depends_on_parity_only(p, q, v):
    if q == p:
        return
    assert s2.variation_q(p, q, v) == s2.variation_q(p, q, v % 2) == SA(legendre(q, p) ** (v % 2))


def test_principal_odd_p_closed_form():
    for p in (3, 5, 7, 13):
        r = s2.variation_principal(principal(p, 2, a_p=SA.root(Fraction(1, 5))))
        assert r.match
        mu1sq = SA.root(Fraction(2, 5)) * SA.prime_power(p, -1)
        assert r.epsilon == SA(legendre(2, p)) * mu1sq * (SA.one() if p % 4 == 1 else I)
        # the literal closed form omits the factor (2/p)
        assert r.printed_match == (legendre(2, p) == 1)


def test_principal_p5_symbolic_printed_value():
    r = s2.variation_principal(principal(5, 2), oracle=False)
    a = SA.symbol("a_5")
    assert r.printed == a ** 2 / 5
    assert r.epsilon == -(a ** 2) / 5


def test_principal_n1_matches_oracle_for_every_omega():
    for p in (3, 5, 7):
        for w in all_unit_chars(p, 1, SA.symbol("w")):
            if w.conductor != 1:
                continue
            r = s2.variation_principal(principal(p, 1, w=w))
            assert r.match


def test_principal_p2_branches():
    for N in (2, 3, 4, 5):
        for w in all_unit_chars(2, N, SA.symbol("w_2")):
            if w.conductor == N:
                r = s2.variation_principal(principal(2, N, w=w))
                assert r.match, (N, w)
    r = s2.variation_principal(principal(2, 2, w=primitive(2, 2, SA.symbol("w_2"))), oracle=False)
    chi2 = default_twist(2).value_at_p
    assert r.printed == I * SA.symbol("w_2") ** 2 * chi2 / 2


def test_special_examples():
    r13 = s2.variation_special(special(13))
    assert r13.printed == SA.symbol("a_13") ** 2
    assert r13.match and r13.printed_match
    r7 = s2.variation_special(special(7, 4))
    a = SA.symbol("a_7")
    assert r7.printed == I * a ** 2 / 49
    assert r7.match and r7.epsilon == -I * a ** 2 / 49
    r2 = s2.variation_special(special(2))
    chi2 = default_twist(2).value_at_p
    assert r2.printed == -I * SA.prime_power(2, -3) * SA.symbol("a_2") ** 8 * chi2 ** 3
    assert r2.match and not r2.printed_match


def test_a_theta_examples():
    p = 5
    w = unramified_char(p, SA.symbol("t"))
    r = s2.A_theta(w, "omega")
    assert r.branch == "theta unramified, C_p = 0"
    assert r.value == SA.symbol("t") == r.printed
    K = make_quad_ext(7, -7)
    r = s2.A_theta(unramified_char(7, SA.root(Fraction(1, 3))), "omega_omegaK", K)
    assert r.branch == "theta tamely ramified, C_p = 0"
    assert r.printed == -I * r.theta.value_at_p.inverse()
    assert r.match
    with pytest.raises(s2.RegimeError):
        s2.A_theta(primitive(5, 2), "omega")


def test_a_theta_gamma_branch_up_to_conjugacy():
    for p in (7, 13):
        for w in all_unit_chars(p, 1, SA.root(Fraction(1, 3))):
            if w.unit_order() > 2:
                r = s2.A_theta(w, "omega")
                assert r.branch == "C_p = 1, gamma ratio"
                assert r.match and r.printed_match


def test_supercuspidal_unramified_n2_by_finite_field_sums():
    K = make_quad_ext(3, "unramified")
    count = 0
    for kappa in s2.dihedral_kappas(K, 1, 1):
        d = s2.dihedral_data(kappa, a_p=SA(1))
        assert d.N_p == 2
        r = s2.variation_supercuspidal(d)
        assert r.match
        assert "finite field Gauss sums" in " ".join(r.notes)
        count += math.lcm(*(t.denominator for t in kappa.angles)) == 8
    assert count


def test_supercuspidal_type_ii_is_one():
    K = make_quad_ext(3, "unramified")
    for kappa in s2.dihedral_kappas(K, 2, 2):
        if is_sigma_stable(kappa ** 2):
            d = s2.dihedral_data(kappa, minimal=False)
            r = s2.variation_supercuspidal(d)
            assert r.match and r.epsilon == SA.one() == r.printed
            return
    raise AssertionError("no Type II example")


def test_supercuspidal_ramified_type_i_sign():
    for p, t, want in ((5, -10, -1), (5, -5, 1), (7, -7, 1), (7, -21, -1)):
        K = make_quad_ext(p, t)
        kappa = next(k for k in s2.dihedral_kappas(K, 2, 4, True) if s2.dihedral_data(k).C_p == 2)
        r = s2.variation_supercuspidal(s2.dihedral_data(kappa))
        assert r.match and r.epsilon == SA(want)
        assert s2.norm_residue_symbol(K) == want


def test_p2_supercuspidal_regime_errors():
    K = make_quad_ext(2, 5)
    kappa = next(k for k in s2.dihedral_kappas(K, 2, 2))
    d = s2.dihedral_data(kappa)
    with pytest.raises(s2.RegimeError):
        s2.variation(d)


def test_p2_unramified_type_ii_value():
    K = make_quad_ext(2, 5)
    for kappa in s2.dihedral_kappas(K, 5, 5):
        if not is_sigma_stable(kappa ** 2) or (kappa ** 2).conductor != 4:
            continue
        d = s2.dihedral_data(kappa, minimal=s2.is_minimal_kchar(kappa))
        if d.C_p != 4:
            continue
        r = s2.variation(d)
        chi2 = default_twist(2).value_at_p
        assert r.match and r.epsilon == chi2 ** 4 == SA.one()
        return
    raise AssertionError("no example")


def test_parity_law():
    for K in quad_exts(2):
        top = 3 if K.kind == "unramified" else 6
        for a in range(1, top + 1):
            for kappa in s2.dihedral_kappas(K, K.model_precision(a), a):
                # the law fails exactly at a(kappa) = delta
                assert s2.parity_law_holds(kappa) == (a != K.delta), (K, a)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from((3, 5, 7)), st.integers(1, 2), st.integers(0, 48), st.integers(2, 6))
def test_principal_closed_form_matches_oracle(p, N, e, k):
    chars = [w for w in all_unit_chars(p, N, SA.root(Fraction(1, 4))) if w.conductor == N]
    w = chars[e % len(chars)]
    assert s2.variation_principal(principal(p, N, k, SA.root(Fraction(1, 3)), w)).match


# -- classification ------------------------------------------------------

def test_classification_examples():
    c = s2.classify_from_global(principal(5, 2), None)
    assert c.family == "principal"
    assert s2.classify_from_global(special(7), None).family == "special"
    K = make_quad_ext(5, -10)
    kappa = next(k for k in s2.dihedral_kappas(K, 2, 4, True) if s2.dihedral_data(k).C_p == 2)
    d = s2.dihedral_data(kappa)
    c = s2.classify_from_global(d, "PropertyB")
    assert (c.family, c.type_tag, c.K_class) == ("supercuspidal", "TypeI", "Q_5(sqrt(-p zeta_(p-1)))")
    c = s2.classify_from_global(d, "PropertyA")
    assert c.type_tag == "TypeI-or-TypeII"


def test_property_b_identifies_the_nonnorm_field():
    for p in (5, 7):
        for K in quad_exts(p)[1:]:
            for kappa in s2.dihedral_kappas(K, 2, 4, True):
                d = s2.dihedral_data(kappa)
                if d.C_p != 2:
                    continue
                eps = s2.variation(d, oracle=False).epsilon
                prop = s2.observed_property(eps, p, d.C_p)
                assert (prop == "PropertyB") == (s2.norm_residue_symbol(K) == -1)
                break
