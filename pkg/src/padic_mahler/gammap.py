"""The factorial-interpolating function q and the incomplete Gamma family.

g_r(x) = r**x, f_r = S^{-1}(g_r) and gamma_bar_r(x) = exp(r p~) f_r(x - 1)
for rational r with v_p(r - 1) >= 1.  ``gamma_oracle`` computes
Gamma(n, r) = A + B e^{-r} in exact rationals, independent of any series.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .mahler import MahlerSeries
from .padic_core import (
    INF,
    DomainError,
    PadicScalar,
    PrimeContext,
    exp_padic,
    factorial_valuation,
    parse_rational,
    pow_one_unit,
    valuation,
)
from .sigma import LipschitzReport, inv_S, lipschitz_pairs, lipschitz_sweep

__all__ = [
    "GammaParameter",
    "SymbolicGamma",
    "q_series",
    "g_series",
    "f_r_series",
    "f_r_coefficients_exact",
    "exp_r_ptilde",
    "gamma_bar_eval",
    "gamma_bar_closed_form",
    "gamma_bar_mahler_coeffs",
    "gamma_oracle",
    "tau_p_apply",
    "lipschitz_check_g_r",
]


@dataclass(frozen=True)
class GammaParameter:
    """An exact rational r in 1 + pZ_p."""

    r: Fraction
    p: int

    def __post_init__(self):
        r = parse_rational(self.r)
        object.__setattr__(self, "r", r)
        if valuation(r - 1, self.p) < 1:
            raise DomainError(f"r = {r} is not congruent to 1 mod {self.p}")

    @classmethod
    def of(cls, r, ctx: PrimeContext) -> "GammaParameter":
        if isinstance(r, GammaParameter):
            if r.p != ctx.p:
                raise DomainError("parameter built for a different prime")
            return r
        return cls(parse_rational(r), ctx.p)

    @property
    def v_r_minus_1(self):
        return valuation(self.r - 1, self.p)


def _N(ctx: PrimeContext, N):
    return ctx.default_terms() if N is None else N


def q_series(ctx: PrimeContext, N: int | None = None) -> MahlerSeries:
    """q = sum n! C(x, n)."""
    N = _N(ctx, N)
    coeffs = [math.factorial(n) for n in range(N)]
    return MahlerSeries.from_coefficients(ctx, coeffs, factorial_valuation(N, ctx.p))


def g_series(ctx: PrimeContext, r, N: int | None = None) -> MahlerSeries:
    """x -> r**x, with coefficients (r - 1)**n."""
    gp = GammaParameter.of(r, ctx)
    N = _N(ctx, N)
    z = gp.r - 1
    coeffs = [z**n for n in range(N)]
    tail = INF if z == 0 else N * gp.v_r_minus_1
    return MahlerSeries.from_coefficients(ctx, coeffs, tail)


def f_r_series(ctx: PrimeContext, r, N: int | None = None) -> MahlerSeries:
    return inv_S(g_series(ctx, r, N))


def f_r_coefficients_exact(r, N: int) -> list:
    """sum_{k<=n} (n!/k!) (r - 1)**k as exact rationals."""
    z = Fraction(r) - 1
    out = []
    acc = Fraction(0)
    for n in range(N):
        acc = acc * n + z**n
        out.append(acc)
    return out


def exp_r_ptilde(ctx: PrimeContext, r) -> PadicScalar:
    gp = GammaParameter.of(r, ctx)
    return exp_padic(ctx(gp.r * ctx.p_tilde))


def _shift_point(ctx: PrimeContext, x, d: int):
    if isinstance(x, PadicScalar):
        return x + d
    if isinstance(x, int) and not isinstance(x, bool):
        return x + d
    x = Fraction(x)
    if x.denominator == 1:
        return int(x) + d
    return ctx(x) + d


def gamma_bar_eval(ctx: PrimeContext, r, x, N: int | None = None, f_r: MahlerSeries | None = None) -> PadicScalar:
    """exp(r p~) * f_r(x - 1)."""
    if f_r is None:
        f_r = f_r_series(ctx, r, N)
    return exp_r_ptilde(ctx, r) * f_r.eval(_shift_point(ctx, x, -1))


def gamma_bar_closed_form(ctx: PrimeContext, r, x, N: int | None = None) -> PadicScalar:
    """exp(r p~) * sum_n n! C(x - 1, n) r**(x - 1 - n), the direct-sum formula."""
    gp = GammaParameter.of(r, ctx)
    N = _N(ctx, N)
    y = _shift_point(ctx, x, -1)
    if isinstance(y, PadicScalar):
        if y.valuation < 0:
            raise DomainError("evaluation point outside Z_p")
        Y, exact = y.residue(), y.precision == INF
    else:
        Y, exact = y, True
    finite = exact and 0 <= Y < N
    count = Y + 1 if finite else N
    rinv = 1 / gp.r
    power = pow_one_unit(ctx(gp.r), y) if isinstance(y, PadicScalar) else pow_one_unit(gp.r, Y, ctx)
    acc = ctx.zero()
    c = 1
    for n in range(count):
        if n:
            c = c * (Y - n + 1) // n
            power = power * rinv
        acc = acc + power * (math.factorial(n) * c)
    if not finite:
        acc = acc + ctx.inexact_zero(factorial_valuation(N, ctx.p))
    if isinstance(y, PadicScalar) and y.precision != INF:
        # each term's binomial is only known to the precision of x
        acc = acc + ctx.inexact_zero(y.precision)
    return exp_r_ptilde(ctx, gp) * acc


def gamma_bar_mahler_coeffs(ctx: PrimeContext, r, N: int | None = None) -> MahlerSeries:
    """Mahler series of x -> gamma_bar_r(x + 1)."""
    gp = GammaParameter.of(r, ctx)
    N = _N(ctx, N)
    e = exp_r_ptilde(ctx, gp)
    coeffs = tuple(e * a for a in f_r_coefficients_exact(gp.r, N))
    return MahlerSeries(ctx, coeffs, f_r_series(ctx, gp, N).tail_valuation)


# ----------------------------------------------------------------------
# the rational oracle


@dataclass(frozen=True)
class SymbolicGamma:
    """Gamma(n, r) = A + B e^{-r}."""

    A: Fraction
    B: Fraction
    n: int
    r: Fraction


def gamma_oracle(r, n: int) -> SymbolicGamma:
    """Exact A_n, B_n from Gamma(n + 1, r) = n Gamma(n, r) + r**n e^{-r}."""
    if n < 1:
        raise DomainError("n must be >= 1")
    r = parse_rational(r)
    A, B = Fraction(0), Fraction(1)
    for k in range(1, n):
        A, B = k * A, k * B + r**k
    return SymbolicGamma(A, B, n, r)


def tau_p_apply(ctx: PrimeContext, g: SymbolicGamma) -> PadicScalar:
    """A + B exp(r p~): the image of e^{-r} is taken to be exp(r p~)."""
    if g.B == 0:
        return ctx(g.A)
    return exp_padic(ctx(g.r * ctx.p_tilde)) * g.B + g.A


def lipschitz_check_g_r(
    ctx: PrimeContext,
    r,
    samples: int = 50,
    seed: int = 0,
    N: int | None = None,
    pairs=None,
) -> LipschitzReport:
    """Sampled check that f_r = S^{-1}(g_r) is 1-Lipschitz."""
    f = f_r_series(ctx, r, N)
    if pairs is None:
        pairs = lipschitz_pairs(ctx, samples, random.Random(seed))
    return lipschitz_sweep(f.eval, pairs, ctx.p, identity=f"f_r lipschitz (r={GammaParameter.of(r, ctx).r})", seed=seed)

