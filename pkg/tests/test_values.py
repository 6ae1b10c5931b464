import cmath
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from sym2eps.values import Cyclotomic, ScaledAlgebraic as SA, cyclotomic_poly, sqrt_prime

angles = st.fractions(min_value=0, max_value=1, max_denominator=12)
small = st.integers(min_value=-5, max_value=5)


def test_cyclotomic_polynomials():
    assert cyclotomic_poly(1) == (-1, 1)
    assert cyclotomic_poly(4) == (1, 0, 1)
    assert cyclotomic_poly(6) == (1, -1, 1)


def test_roots_of_unity():
    i = Cyclotomic.root(Fraction(1, 4))
    assert i * i == Cyclotomic.rational(-1)
    assert Cyclotomic.root(Fraction(1, 3)) ** 3 == Cyclotomic.rational(1)
    assert Cyclotomic.root(Fraction(1, 2)) == Cyclotomic.rational(-1)


def test_sqrt_prime_is_positive_root():
    for q in (2, 3, 5, 7, 13):
        r = sqrt_prime(q)
        assert r * r == Cyclotomic.rational(q)
        assert abs(complex(r) - q ** 0.5) < 1e-12


def test_scaled_prime_powers_fold_into_cyclotomic_part():
    x = SA.prime_power(5, Fraction(1, 4))
    assert x.radicals == {5: Fraction(1, 4)}
    assert x ** 4 == SA(5)
    assert SA.prime_power(3, Fraction(3, 2)) == SA(3) * SA(sqrt_prime(3))


def test_symbols_and_substitution():
    a = SA.symbol("a_5")
    v = a ** 2 * SA.prime_power(5, -1)
    assert v.symbols == {"a_5": 2}
    assert v.subs({"a_5": 5}) == SA(5)
    assert (v / v) == SA.one()


def test_involution_symbols_reduce_mod_two():
    from sym2eps.padic_chars import default_twist
    c = default_twist(2).value_at_p
    assert c * c == SA.one()


def test_str_rendering():
    assert str(SA.root(Fraction(1, 4))) == "i"
    assert "a_7" in str(SA.symbol("a_7") * SA.prime_power(7, -1))


@given(angles, angles)
def test_root_multiplication_adds_angles(s, t):
    assert Cyclotomic.root(s) * Cyclotomic.root(t) == Cyclotomic.root(s + t)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(small, angles), min_size=1, max_size=4),
       st.lists(st.tuples(small, angles), min_size=1, max_size=4))
def test_embedding_is_a_ring_map(xs, ys):
    def build(terms):
        z = Cyclotomic.rational(0)
        for c, t in terms:
            z = z + Cyclotomic.root(t) * c
        return z

    def shadow(terms):
        return sum(c * cmath.exp(2j * cmath.pi * float(t)) for c, t in terms)

    x, y = build(xs), build(ys)
    assert abs(complex(x * y) - shadow(xs) * shadow(ys)) < 1e-9
    assert abs(complex(x + y) - (shadow(xs) + shadow(ys))) < 1e-9
    if not x.is_zero():
        assert x * x.inverse() == Cyclotomic.rational(1)


@given(angles, st.integers(min_value=1, max_value=6))
def test_galois_conjugation_preserves_abs2(t, a):
    import math
    z = Cyclotomic.root(t) + 2
    m = z.m
    if math.gcd(a, m) == 1:
        assert z.galois(a).abs2() == z.abs2().galois(a)
