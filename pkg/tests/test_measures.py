import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padic_mahler.gammap import f_r_series, g_series, q_series
from padic_mahler.mahler import MahlerSeries, random_series, random_zp
from padic_mahler.measures import (
    BoundedPowerSeries,
    diamond,
    egf_ogf_export,
    h_series,
    integrate,
    mahler_from_basis,
    pair,
    star,
    star_inverse,
    star_pow,
    transform_T,
)
from padic_mahler.padic_core import INF, DomainError, PrecisionError, PrimeContext
from padic_mahler.sigma import apply_S, inv_S, iterate_S

from conftest import coeff_residual, residual

KINDS = ["bfact", "poly", "geometric"]


def _pair(p, seed, P=15):
    ctx = PrimeContext(p, P)
    r = random.Random(seed)
    N = ctx.default_terms()
    return ctx, r, random_series(ctx, N, r, r.choice(KINDS)), random_series(ctx, N, r, r.choice(KINDS))


def test_h_series_of_g_r(ctx):
    r = 1 + ctx.p
    H = h_series(g_series(ctx, r), 8)
    for n, c in enumerate(H.coeffs):
        assert c == Fraction((-1) ** n, r ** (n + 1))


def test_evaluate_at_requires_positive_valuation():
    ctx = PrimeContext(3, 20)
    G = BoundedPowerSeries.from_coefficients(ctx, [1] * 30, 0)
    assert residual(G.evaluate_at(3), ctx(1) / (1 - 3)) >= 20
    with pytest.raises(DomainError):
        G.evaluate_at(1)
    with pytest.raises(PrecisionError):
        BoundedPowerSeries.from_coefficients(ctx, [1] * 5).evaluate_at(3)


def test_delta_at_zero():
    ctx = PrimeContext(5, 20)
    N = ctx.default_terms()
    one = MahlerSeries.constant(ctx, 1, N)
    f = random_series(ctx, N, random.Random(3), "bfact")
    # integral of f against H_1 = 1/(1 + t) is f(-1)
    assert residual(integrate(f, h_series(one)), f.eval(-1)) >= 18


def test_star_unit_and_beta():
    ctx = PrimeContext(3, 20)
    N = ctx.default_terms()
    one = MahlerSeries.constant(ctx, 1, N)
    f = random_series(ctx, N, random.Random(1), "poly")
    assert coeff_residual(star(one, f).coeffs, f.coeffs) >= 20
    b1 = MahlerSeries.beta(ctx, 1, N)
    # c_n = sum_k C(n, k) a_k b_{n-k} is nonzero only at n = 2
    sq = star(b1, b1)
    assert [c.residue() for c in sq.coeffs[:4]] == [0, 0, 2, 0]


def test_star_length_limits():
    ctx = PrimeContext(3, 10)
    f = MahlerSeries.constant(ctx, 1, 5)
    with pytest.raises(DomainError):
        star(f, f, length=10)
    assert star(f, f, length=9).N == 9


def test_star_inverse_of_unit(ctx):
    N = ctx.default_terms()
    u = MahlerSeries.constant(ctx, 1, N) - MahlerSeries.beta(ctx, 1, N)
    inv = star_inverse(u)
    assert not inv.tail_verified
    prod = star(u, inv)
    assert prod.coeffs[0] == 1
    assert all(c.is_zero() for c in prod.coeffs[1:])
    with pytest.raises(DomainError):
        star_inverse(MahlerSeries.beta(ctx, 1, N))


def test_star_inverse_flags_nondecay():
    ctx = PrimeContext(3, 20)
    # the inverse of 1 + C(x, 3) has c_{3k} = (3k)! (-1/6)^k, which falls
    # k digits behind (3k)!
    f = MahlerSeries.from_coefficients(ctx, [1, 0, 0, 1] + [0] * 26, INF)
    assert star_inverse(f).tail_valuation == -INF


def test_star_pow_matches_repeated_star(ctx, rng):
    N = ctx.default_terms()
    f = random_series(ctx, N, rng, "bfact")
    assert coeff_residual(star_pow(f, 2).coeffs, star(f, f).coeffs) >= ctx.precision
    assert coeff_residual(star_pow(f, 0).coeffs, MahlerSeries.constant(ctx, 1, N).coeffs) >= ctx.precision


def test_pair_rejects_unknown_route(ctx):
    f = MahlerSeries.constant(ctx, 1, 5)
    with pytest.raises(DomainError):
        pair(f, f, "bogus")


def test_worked_example():
    for p in (2, 3, 5):
        ctx = PrimeContext(p, 20)
        N = ctx.default_terms()
        weights = h_series(apply_S(MahlerSeries.constant(ctx, 1, N)), N)
        for r in (1, 1 + p):
            assert residual(integrate(f_r_series(ctx, r, N), weights), ctx(1) / r) >= 18


def test_transform_of_q_basis():
    ctx = PrimeContext(5, 20)
    N = ctx.default_terms()
    one = MahlerSeries.constant(ctx, 1, N)
    T = transform_T(one)
    # T(1) = sum n! C(x, n) = q
    assert coeff_residual(T.series.coeffs, q_series(ctx).coeffs) >= 20
    rebuilt = mahler_from_basis(T.basis, T.basis_tail, ctx, N)
    assert coeff_residual(rebuilt.coeffs, T.series.coeffs) >= 20


def test_egf_export_of_g_r():
    ctx = PrimeContext(3, 20)
    r = 4
    E, H = egf_ogf_export(g_series(ctx, r), 8)
    for n, c in enumerate(E.coeffs):
        assert c == Fraction(r**n, math.factorial(n))


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.integers(0, 2**32))
def test_pairing_properties(p, seed):
    ctx, r, f, g = _pair(p, seed)
    req = ctx.precision - 4
    d = pair(f, g)
    assert residual(d, pair(g, f)) >= req
    assert residual(d, pair(f, g, "integral")) >= req
    assert residual(d, pair(f, g, "star_eval")) >= req
    assert residual(pair(apply_S(f), g), pair(f, apply_S(g))) >= req


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.integers(0, 2**32))
def test_derivative_measure(p, seed):
    ctx, r, f, _ = _pair(p, seed)
    G = BoundedPowerSeries.from_coefficients(ctx, [random_zp(ctx, r) for _ in range(f.N)], 0)
    assert residual(integrate(f, G.derivative()), integrate(f.times_x_shift_back(), G)) >= ctx.precision - 4


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.integers(0, 2**32))
def test_star_identities(p, seed):
    ctx, r, f, g = _pair(p, seed)
    req = ctx.precision - 4
    assert coeff_residual(star(apply_S(f), g).coeffs, star(f, apply_S(g)).coeffs) >= req
    assert coeff_residual(inv_S(g).coeffs, star(q_series(ctx), g).coeffs) >= req
    assert coeff_residual(star(f, g).coeffs, star(g, f).coeffs) >= req


@settings(max_examples=10, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.integers(0, 2**32))
def test_transform_identities(p, seed):
    ctx, r, f, g = _pair(p, seed)
    req = ctx.precision - 4
    N = f.N
    lhs = transform_T(star(f, g, 2 * N - 1), N)
    rhs = diamond(transform_T(f), transform_T(g))
    assert coeff_residual(lhs.series.coeffs, rhs.series.coeffs) >= req
    T = transform_T(g)
    s = random_zp(ctx, r)
    for m in (-2, 1, 3):
        assert residual(transform_T(iterate_S(g, m)).eval(s), T.eval(s + m)) >= req
    minus_sum = transform_T(-g.indefinite_sum()).series
    assert coeff_residual(inv_S(T.series).coeffs, minus_sum.coeffs) >= req
