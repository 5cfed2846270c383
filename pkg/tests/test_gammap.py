import math
from fractions import Fraction

import pytest

from padic_mahler.gammap import (
    GammaParameter,
    exp_r_ptilde,
    f_r_coefficients_exact,
    f_r_series,
    g_series,
    gamma_bar_closed_form,
    gamma_bar_eval,
    gamma_bar_mahler_coeffs,
    gamma_oracle,
    lipschitz_check_g_r,
    q_series,
    tau_p_apply,
)
from padic_mahler.mahler import random_zp
from padic_mahler.measures import star
from padic_mahler.padic_core import DomainError, PrimeContext, exp_padic
from padic_mahler.sigma import apply_S

from conftest import coeff_residual, residual


def test_parameter_validation():
    assert GammaParameter(Fraction(4), 3).v_r_minus_1 == 1
    with pytest.raises(DomainError):
        GammaParameter(Fraction(2), 3)
    assert GammaParameter.of("1/4", PrimeContext(3, 10)).r == Fraction(1, 4)


def test_oracle_small_cases():
    g = gamma_oracle(1, 1)
    assert (g.A, g.B) == (0, 1)
    g = gamma_oracle(Fraction(2), 3)
    # Gamma(3, r) = 2 e^{-r} (1 + r + r^2/2)
    assert (g.A, g.B) == (0, 2 + 2 * 2 + 4)
    with pytest.raises(DomainError):
        gamma_oracle(1, 0)


def test_g_series_values(ctx):
    r = 1 + ctx.p
    g = g_series(ctx, r)
    for x in range(6):
        assert g.eval(x) == r**x
    assert g_series(ctx, 1).tail_valuation == math.inf


def test_f_r_exact_coefficients(ctx):
    r = 1 - ctx.p
    exact = f_r_coefficients_exact(r, 10)
    f = f_r_series(ctx, r, 10)
    for a, b in zip(f.coeffs, exact):
        assert a == b


def test_S_of_f_r_is_g_r(ctx):
    r = 1 + 2 * ctx.p
    assert coeff_residual(apply_S(f_r_series(ctx, r)).coeffs, g_series(ctx, r).coeffs) >= ctx.precision


def test_f_r_is_q_star_g_r(ctx):
    r = 1 + ctx.p
    conv = star(q_series(ctx), g_series(ctx, r))
    assert coeff_residual(conv.coeffs, f_r_series(ctx, r).coeffs) >= ctx.precision - 2


def test_gamma_bar_at_one_is_exp(ctx):
    for r in (1, 1 + ctx.p):
        assert residual(gamma_bar_eval(ctx, r, 1), exp_padic(ctx(r * ctx.p_tilde))) >= ctx.precision


@pytest.mark.parametrize("n", range(1, 7))
def test_interpolation(ctx, n):
    for r in (1, 1 + ctx.p, 1 - ctx.p):
        lhs = gamma_bar_eval(ctx, r, n)
        rhs = tau_p_apply(ctx, gamma_oracle(r, n))
        assert residual(lhs, rhs) >= ctx.precision - 2


def test_closed_form_agrees(ctx, rng):
    for r in (1, 1 + ctx.p):
        f = f_r_series(ctx, r)
        for _ in range(4):
            x = random_zp(ctx, rng)
            assert residual(gamma_bar_eval(ctx, r, x, f_r=f), gamma_bar_closed_form(ctx, r, x)) >= ctx.precision - 2


def test_mahler_coefficients_of_shifted_gamma(ctx, rng):
    r = 1 + ctx.p
    M = gamma_bar_mahler_coeffs(ctx, r)
    for _ in range(4):
        x = random_zp(ctx, rng)
        assert residual(M.eval(x), gamma_bar_eval(ctx, r, x + 1)) >= ctx.precision - 2


def test_rational_r():
    ctx = PrimeContext(3, 20)
    r = Fraction(1, 4)  # 1/4 = 1 - 3/4 lies in 1 + 3Z_3
    for n in (1, 2, 5):
        assert residual(gamma_bar_eval(ctx, r, n), tau_p_apply(ctx, gamma_oracle(r, n))) >= 18
    assert exp_r_ptilde(ctx, r) == exp_padic(ctx(Fraction(3, 4)))


def test_f_r_lipschitz(ctx):
    for r in (1, 1 + ctx.p):
        rep = lipschitz_check_g_r(ctx, r, samples=20, seed=1)
        assert rep.passed and rep.samples + rep.skipped == 20
