from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from padic_mahler.padic_core import (
    INF,
    ContextMismatch,
    DomainError,
    PadicScalar,
    PrecisionError,
    PrimeContext,
    binom,
    default_terms,
    digit_loss,
    exp_padic,
    factorial_valuation,
    parse_rational,
    pow_one_unit,
    valuation,
)

C5 = PrimeContext(5, 4)
primes = st.sampled_from([2, 3, 5, 7])
rationals = st.fractions(max_denominator=10**6).filter(lambda x: x != 0)


def test_context_validates():
    with pytest.raises(DomainError):
        PrimeContext(4, 10)
    with pytest.raises(DomainError):
        PrimeContext(3, 0)
    assert PrimeContext(2, 5).p_tilde == 4
    assert PrimeContext(7, 5).p_tilde == 7


def test_integer_sum_embeds():
    s = C5(7) + C5(18)
    assert s == 25
    assert s.valuation == 2


def test_half_mod_243():
    h = PrimeContext(3, 5)(Fraction(1, 2))
    assert h.valuation == 0
    assert h.unit == 122
    assert (122 * 2) % 3**5 == 1


def test_self_difference_is_exact_zero():
    x = C5(Fraction(3, 7))
    d = x - x
    assert d.is_exact_zero()
    assert d.valuation == INF


def test_inexact_zero_is_not_exact():
    z = C5(1) * 5**4 - (C5(5**4) * 1)
    assert z.is_zero() and not z.is_exact_zero()
    assert C5(5**4).valuation == 4 and not C5(5**4).is_zero()
    z = C5.inexact_zero(4)
    assert z.valuation == z.precision == 4


def test_string_and_fraction_inputs():
    ctx = PrimeContext(3, 6)
    assert ctx("1/2") == ctx(Fraction(1, 2))
    assert parse_rational("-3/4") == Fraction(-3, 4)
    with pytest.raises(DomainError):
        parse_rational("1/x")


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        C5(3) / C5(0)
    with pytest.raises(ZeroDivisionError):
        C5(3) / C5.inexact_zero(4)


def test_context_mismatch():
    with pytest.raises(ContextMismatch):
        C5(1) + PrimeContext(3, 4)(1)


def test_negative_valuation():
    x = C5(Fraction(1, 25))
    assert x.valuation == -2
    assert (x * 25) == 1


def test_binom_examples():
    ctx = PrimeContext(3, 6)
    assert binom(ctx(Fraction(1, 2)), 2) == Fraction(-1, 8)
    assert binom(ctx(7), 0) == 1
    assert binom(5, 3, ctx) == 10
    assert binom(ctx(5), 3) == 10


def test_binom_precision_exhausted():
    ctx = PrimeContext(2, 3)
    x = ctx(5)
    with pytest.raises(PrecisionError):
        binom(x, 8)


def test_binom_negative_valuation_argument():
    ctx = PrimeContext(3, 10)
    x = ctx(Fraction(1, 3))
    assert binom(x, 2) == Fraction(1, 3) * Fraction(-2, 3) / 2


def test_exp_examples():
    assert exp_padic(0, C5) == 1
    assert exp_padic(5, PrimeContext(5, 3)).residue() == 81
    with pytest.raises(DomainError):
        exp_padic(2, PrimeContext(2, 10))
    with pytest.raises(DomainError):
        exp_padic(1, PrimeContext(3, 10))
    e4 = exp_padic(4, PrimeContext(2, 10))
    assert e4.precision == 10


def test_exp_against_rational_partial_sum():
    ctx = PrimeContext(3, 12)
    x = Fraction(6)
    partial = sum(x**k / Fraction(__import__("math").factorial(k)) for k in range(60))
    assert exp_padic(6, ctx) == partial


def test_pow_one_unit_examples():
    assert pow_one_unit(6, 0, C5) == 1
    assert pow_one_unit(6, 3, C5) == 216
    assert pow_one_unit(6, -1, C5) * 6 == 1
    assert pow_one_unit(C5(6), C5(-1)) * 6 == 1
    ctx = PrimeContext(3, 8)
    assert pow_one_unit(4, 3, ctx) == 64
    with pytest.raises(DomainError):
        pow_one_unit(2, 3, ctx)


def test_default_terms_values():
    assert [default_terms(p, 30) for p in (2, 3, 5, 7)] == [38, 75, 145, 217]
    for p in (2, 3, 5, 7):
        N = default_terms(p, 30)
        assert factorial_valuation(N, p) >= 35 > factorial_valuation(N - 1, p)


def test_digit_loss():
    assert [digit_loss(n, 3) for n in (0, 1, 2, 3, 8, 9, 26, 27)] == [0, 0, 0, 1, 1, 2, 2, 3]


@given(primes, rationals, rationals)
def test_ring_ops_match_rationals(p, a, b):
    ctx = PrimeContext(p, 12)
    x, y = ctx(a), ctx(b)
    assert x + y == a + b
    assert x - y == a - b
    assert x * y == a * b
    assert x / y == a / b


@given(primes, rationals, rationals, st.sampled_from(["add", "sub", "mul", "div"]))
def test_precision_never_increases(p, a, b, op):
    ctx = PrimeContext(p, 10)
    x, y = ctx(a), ctx(b)
    r = {"add": x + y, "sub": x - y, "mul": x * y, "div": x / y}[op]
    if r.is_exact_zero():
        return
    assert r.precision <= min(x.precision, y.precision)


@given(primes, st.integers(-10**9, 10**9), st.integers(0, 40))
def test_binom_integral_on_zp(p, x, n):
    ctx = PrimeContext(p, 25)
    s = ctx(x)
    try:
        c = binom(s, n)
    except PrecisionError:
        return
    assert c.valuation >= 0 or c.is_zero()
    assert c == Fraction(__import__("math").comb(x, n) if x >= 0 else (-1) ** n * __import__("math").comb(n - x - 1, n))


@given(primes, st.integers(1, 10**6), st.integers(1, 10**6))
def test_exp_is_additive(p, u, w):
    ctx = PrimeContext(p, 15)
    pt = ctx.p_tilde
    a, b = pt * u, pt * w
    assert exp_padic(a, ctx) * exp_padic(b, ctx) == exp_padic(a + b, ctx)


@given(primes, st.integers(1, 10**6), st.integers(-5, 5))
def test_pow_one_unit_matches_repeated_product(p, k, m):
    ctx = PrimeContext(p, 15)
    u = 1 + p * k
    expected = ctx(1)
    for _ in range(abs(m)):
        expected = expected * u
    if m < 0:
        expected = expected.inverse()
    assert pow_one_unit(u, m, ctx) == expected


@given(primes, rationals)
def test_valuation_of_embedding(p, a):
    ctx = PrimeContext(p, 10)
    assume(valuation(a, p) < 10)
    assert ctx(a).valuation == valuation(a, p)


def test_eq_is_congruence_and_unhashable():
    assert C5(1) == C5(1 + 5**4)
    assert C5(1) != C5(2)
    with pytest.raises(TypeError):
        hash(C5(1))


def test_repr_and_lift():
    x = C5(Fraction(2, 5))
    assert "5^-1" in repr(x)
    assert x.lift() * 5 % 5**4 == x.unit % 5**4
    assert isinstance(x, PadicScalar)
