import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_irreducible_p, gf_mul, gf_pow_mod, gf_rem

from movoid.errors import (
    BadParameters,
    BudgetExceeded,
    DivisionByZero,
    FieldMismatch,
    LogOfZero,
    NotADivisor,
    NotPrime,
)
from movoid.gf import (
    ZERO,
    Field,
    build_field,
    digits,
    discrete_log,
    divisors,
    encode,
    find_modulus,
    is_irreducible,
    is_prime,
    prime_factors,
)


def _hi_first(coeffs):
    """constant-first tuple -> sympy dense list (highest degree first)."""
    out = list(reversed(coeffs))
    while len(out) > 1 and out[0] == 0:
        out.pop(0)
    return [ZZ(c) for c in out]


def _lo_first(poly, s):
    c = [int(x) for x in reversed(poly)]
    return tuple(c + [0] * (s - len(c)))


def oracle_mul(F, a, b):
    """Product of two coefficient tuples by schoolbook arithmetic in sympy."""
    f = _hi_first(F.modulus)
    prod = gf_rem(gf_mul(_hi_first(a), _hi_first(b), F.p, ZZ), f, F.p, ZZ)
    return _lo_first(prod, F.s)


# -- number theory helpers -----------------------------------------------------

def test_primes_and_factors():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert prime_factors(3**12 - 1) == [2, 5, 7, 13, 73]
    assert divisors(12) == [1, 2, 3, 4, 6, 12]


@pytest.mark.parametrize("p,s", [(3, 1), (3, 2), (3, 4), (3, 6), (5, 2), (5, 3), (7, 2)])
def test_modulus_is_lexicographically_first_irreducible(p, s):
    expected = None
    for tail in itertools.product(range(p), repeat=s):
        if tail[0] == 0 and s > 1:
            continue
        if gf_irreducible_p(_hi_first(tail + (1,)), p, ZZ):
            expected = tail + (1,)
            break
    assert find_modulus(p, s) == expected
    assert is_irreducible(list(expected), p)


def test_reducible_polynomials_rejected():
    # x^2 + 1 splits over GF(5); x^4 + 1 = (x^2+x+2)(x^2+2x+2) over GF(3)
    assert not is_irreducible([1, 0, 1], 5)
    assert not is_irreducible([1, 0, 0, 0, 1], 3)
    assert is_irreducible([1, 0, 1], 3)


@pytest.mark.parametrize("p,s,gen", [(3, 1, (2,)), (5, 2, (1, 3))])
def test_generator_examples(p, s, gen):
    assert build_field(p, s).generator == gen


def test_gf3_12_rules():
    F = build_field(3, 12)
    assert F.modulus == (1, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 1)
    assert F.generator == (0,) * 9 + (1, 0, 2)


@pytest.mark.parametrize("p,s", [(3, 4), (3, 6), (5, 2)])
def test_generator_is_first_primitive(p, s):
    F = build_field(p, s)
    q = p**s
    f = _hi_first(F.modulus)
    order_factors = prime_factors(q - 1)

    def primitive(g):
        h = _hi_first(g)
        if gf_pow_mod(h, q - 1, f, p, ZZ) != [1]:
            return False
        return all(gf_pow_mod(h, (q - 1) // r, f, p, ZZ) != [1] for r in order_factors)

    for tail in itertools.product(range(p), repeat=s):
        g = tail
        if any(g) and primitive(g):
            assert F.generator == g
            break


# -- tables against the polynomial oracle -------------------------------------

@pytest.mark.parametrize("fixture", ["gf81", "gf729"])
def test_exp_table_matches_repeated_multiplication(fixture, request):
    F = request.getfixturevalue(fixture)
    x = (1,) + (0,) * (F.s - 1)
    for k in range(F.order):
        assert F.coeffs(k) == x
        x = oracle_mul(F, x, F.generator)
    assert x == (1,) + (0,) * (F.s - 1)
    assert sorted(F.exp.tolist()) == list(range(1, F.q))
    assert F.log[0] == ZERO


def test_digits_encode_roundtrip():
    enc = np.arange(3**6)
    d = digits(enc, 3, 6)
    assert d.shape == (729, 6)
    assert np.array_equal(encode(d, 3), enc)
    assert d[5].tolist() == [2, 1, 0, 0, 0, 0]


# -- exhaustive field axioms --------------------------------------------------

@pytest.mark.parametrize("fixture", ["gf81", "gf729"])
def test_addition_matches_coefficientwise_sum(fixture, request):
    F = request.getfixturevalue(fixture)
    enc = np.arange(F.q)
    d = digits(enc, F.p, F.s)
    for a in range(0, F.q, 7 if F.q > 100 else 1):
        expect = encode((d[a] + d) % F.p, F.p)
        assert np.array_equal(F.add_encodings(np.full(F.q, a), enc), expect)


def test_field_axioms_exhaustive_gf81(gf81):
    F = gf81
    els = list(F.elements())
    assert len(els) == 81
    zero, one = F.zero, F.one
    for a in els:
        assert a + zero == a and a * one == a and a + (-a) == zero
        if a != zero:
            assert a * a.inverse() == one
        for b in els:
            assert a + b == b + a
            assert a * b == b * a
            assert F.coeffs((a * b).index) == oracle_mul(F, a.coeffs, b.coeffs)


def test_distributivity_exhaustive_gf81(gf81):
    els = list(gf81.elements())
    for a in els[::3]:
        for b in els:
            for c in els[::5]:
                assert a * (b + c) == a * b + a * c
                assert (a + b) + c == a + (b + c)


def test_frobenius_and_trace_laws_exhaustive_gf729(gf729):
    F = gf729
    for x in F.elements():
        xp = x.frobenius(1)
        assert xp == x**3
        assert x.frobenius(F.s) == x
        t = x.trace(1)
        assert t.in_subfield(1)
        assert t == sum((x.frobenius(i) for i in range(F.s)), F.zero)
        assert xp.trace(1) == t
        t2 = x.trace(2)
        assert t2.in_subfield(2)
        assert t2.trace(1, top=2) == t
        t3 = x.trace(3)
        assert t3.trace(1, top=3) == t


def test_trace_is_linear_and_onto(gf729):
    F = gf729
    tab = F.trace_table(1)
    counts = np.bincount(F.abs_trace_by_log, minlength=3)
    assert counts.tolist() == [242, 243, 243]  # zero excluded from by-log table
    for a in range(0, F.order, 11):
        for b in range(0, F.order, 13):
            x, y = F(a), F(b)
            assert tab[x + y] == tab[x] + tab[y]


def test_subfield_membership(gf729):
    F = gf729
    for e, size in [(1, 3), (2, 9), (3, 27), (6, 729)]:
        assert sum(1 for x in F.elements() if x.in_subfield(e)) == size
    with pytest.raises(NotADivisor):
        F.trace_table(4)


# -- element API and errors -----------------------------------------------------

def test_element_errors(gf81, gf729):
    with pytest.raises(DivisionByZero):
        gf81.zero.inverse()
    with pytest.raises(DivisionByZero):
        gf81.one / gf81.zero
    with pytest.raises(LogOfZero):
        gf81.zero.log()
    with pytest.raises(FieldMismatch):
        gf81.one + gf729.one
    assert discrete_log(gf81(17)) == 17
    assert gf81.gen.multiplicative_order() == 80
    assert gf81(20).multiplicative_order() == 4


def test_constructor_errors():
    with pytest.raises(NotPrime):
        Field(9, 2)
    with pytest.raises(BadParameters):
        Field(2, 3)
    with pytest.raises(BudgetExceeded):
        Field(3, 30)
    with pytest.raises(BudgetExceeded):
        build_field(3, 12, max_order=1000)


# -- hypothesis properties on GF(3^6) --------------------------------------------

idx = st.integers(min_value=-1, max_value=727)


def _el(F, i):
    return F.zero if i < 0 else F(i)


@settings(max_examples=300, deadline=None)
@given(a=idx, b=idx, c=idx)
def test_ring_laws(gf729, a, b, c):
    x, y, z = (_el(gf729, i) for i in (a, b, c))
    assert x * (y + z) == x * y + x * z
    assert (x * y) * z == x * (y * z)
    assert (x - y) + y == x


@settings(max_examples=300, deadline=None)
@given(a=idx, b=idx, k=st.integers(0, 5))
def test_frobenius_is_a_field_automorphism(gf729, a, b, k):
    x, y = _el(gf729, a), _el(gf729, b)
    assert (x + y).frobenius(k) == x.frobenius(k) + y.frobenius(k)
    assert (x * y).frobenius(k) == x.frobenius(k) * y.frobenius(k)


@settings(max_examples=200, deadline=None)
@given(a=st.integers(0, 727), n=st.integers(-2000, 2000))
def test_power_matches_log_arithmetic(gf729, a, n):
    x = gf729(a)
    assert (x**n).index == (a * n) % 728


def test_transitivity_exhaustive_gf3_12():
    F = build_field(3, 12)
    t1, t2 = F.trace_table(1).values, F.trace_table(2).values
    down = np.zeros(F.q, dtype=np.int64)
    for v in np.unique(t2).tolist():
        if v:
            down[v] = F.encoding(F.trace_idx(int(F.log[v]), 1, top=2))
    assert len(np.unique(t2)) == 9
    assert np.array_equal(down[t2], t1)
    # the linear-algebra tables against the definition on a sample
    rng = np.random.default_rng(0)
    for k in rng.integers(0, F.order, 200).tolist():
        x = F(k)
        direct = sum((x.frobenius(i) for i in range(12)), F.zero)
        assert F.trace_table(1)[x] == direct


def test_small_examples():
    F = build_field(3, 2)
    g = F.gen
    assert g**3 * g**5 == g**8
    assert (g**3).inverse() == F(F.order - 3)
    assert g.trace(1) == g + g**3
    assert F.zero.trace(1) == F.zero
    assert discrete_log(g) == 1 and discrete_log(F.one) == 0
    assert discrete_log(g ** F.order) == 0
    assert g.frobenius(0) == g and g.frobenius(F.s) == g
    G = build_field(5, 2)
    assert G.q == 25 and G.gen.multiplicative_order() == 24
    assert build_field(3, 1).gen.coeffs == (2,)


def test_rabin_gcd_condition_is_needed():
    # x (x^2+1)(x^3+2x+1) over GF(3): x^(3^6) = x holds and x^(3^3), x^(3^2)
    # differ from x, yet the polynomial is reducible
    p = 3
    parts = [[1, 0], [1, 0, 1], [1, 0, 2, 1]]  # highest degree first
    for f in parts:
        assert gf_irreducible_p([ZZ(c) for c in f], p, ZZ)
    prod = [ZZ(1)]
    for f in parts:
        prod = gf_mul(prod, [ZZ(c) for c in f], p, ZZ)
    x = [ZZ(1), ZZ(0)]
    assert gf_pow_mod(x, p**6, prod, p, ZZ) == x
    assert gf_pow_mod(x, p**3, prod, p, ZZ) != x
    assert gf_pow_mod(x, p**2, prod, p, ZZ) != x
    assert not is_irreducible([int(c) for c in reversed(prod)], p)
