"""Bounded solutions of F' + F = G through Mahler series.

A function f = sum n! a_n C(x, n) with bounded a_n is sent to the power
series J_f = sum (a_n - a_{n-1}) t^n.  With Q(F) = (1 - t)(F' + F) one has
Q(J_f) = J_{U(S(f))}, where U is the shift x -> x + 1, so the bounded solution of
F' + F = G is J_f for f = S^{-1}(U^{-1}(sum n! g_n C(x, n))).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .mahler import MahlerSeries, factorial_view, vlb
from .measures import BoundedPowerSeries
from .padic_core import INF, DomainError, PadicError, PrimeContext, factorial_valuation, valuation
from .sigma import inv_S

__all__ = ["DESolution", "RESIDUAL_SLACK", "j_map", "apply_Q", "solve_linear_de", "de_residuals", "exp_minus_t_witness"]

RESIDUAL_SLACK = 2


def j_map(f: MahlerSeries, N: int | None = None) -> BoundedPowerSeries:
    """J_f from the factorial view; raises DomainError if f is not of that form."""
    if N is not None:
        f = f.truncate(N)
    view = factorial_view(f)
    a = view.coeffs
    out = tuple(a[n] - a[n - 1] if n else a[0] for n in range(len(a)))
    return BoundedPowerSeries(f.ctx, out, view.bound_valuation)


def apply_Q(F: BoundedPowerSeries) -> BoundedPowerSeries:
    """(1 - t)(F' + F) on the window of length N - 1."""
    cs = F.coeffs
    s = [cs[n + 1] * (n + 1) + cs[n] for n in range(len(cs) - 1)]
    out = tuple(s[n] - s[n - 1] if n else s[0] for n in range(len(s)))
    return BoundedPowerSeries(F.ctx, out, F.bound_valuation)


def de_residuals(F: BoundedPowerSeries, G: BoundedPowerSeries) -> list:
    """(n + 1) f_{n+1} + f_n - g_n for n < min(len F, len G) - 1."""
    n_max = min(F.N, G.N) - 1
    return [F.coeffs[n + 1] * (n + 1) + F.coeffs[n] - G.coeffs[n] for n in range(n_max)]


@dataclass(frozen=True)
class DESolution:
    F: BoundedPowerSeries
    residual_window: int
    bound_certificate: float | int
    min_residual_valuation: float | int
    # v_p of the gap between f_n and the solution for the untruncated G
    truncation_valuations: tuple
    # agreement with f_{n+1} = (g_n - f_n)/(n + 1) seeded by f_0
    recurrence_agreement: float | int
    recurrence_precision_loss: int
    recurrence_agrees: bool


def solve_linear_de(G: BoundedPowerSeries, slack: int = RESIDUAL_SLACK) -> DESolution:
    """The bounded solution of F' + F = G on G's window.

    The known coefficients g_0..g_{N-1} are solved exactly; the unknown
    g_n (n >= N) can move f_n by at most v_p(N!/n!) + bound(G).
    """
    if G.bound_valuation is None:
        raise DomainError("G needs a declared coefficient bound")
    ctx = G.ctx
    p = ctx.p
    N = G.N
    r = MahlerSeries(ctx, tuple(g * math.factorial(n) for n, g in enumerate(G.coeffs)), INF)
    f = inv_S(r.shift(-1))
    J = j_map(f)
    F = BoundedPowerSeries(ctx, J.coeffs, G.bound_valuation)
    residuals = de_residuals(F, G)
    min_res = min((e.valuation for e in residuals), default=INF)
    required = ctx.precision - slack
    if min_res < required:
        raise PadicError(f"residual check failed: valuation {min_res} < {required}")
    if not F.is_bounded_by(G.bound_valuation):
        raise PadicError("solution exceeds the coefficient bound of G")
    vN = factorial_valuation(N, p)
    trunc = tuple(vN - factorial_valuation(n, p) + G.bound_valuation for n in range(N))
    # the direct recurrence divides by n + 1 at every step
    rec = [F.coeffs[0]]
    for n in range(N - 1):
        rec.append((G.coeffs[n] - rec[n]) / (n + 1))
    agreement = min((vlb(a - b) for a, b in zip(rec, F.coeffs)), default=INF)
    agrees = all((a - b).is_zero() for a, b in zip(rec, F.coeffs))
    loss = sum(valuation(n + 1, p) for n in range(N - 1))
    return DESolution(F, len(residuals), G.bound_valuation, min_res, trunc, agreement, loss, agrees)


def exp_minus_t_witness(ctx: PrimeContext, N: int, bound_valuation=0):
    """First n < N with v_p(1/n!) < bound_valuation, or None.

    exp(-t) solves F' + F = 0 but is unbounded, so it is not a second
    bounded solution.
    """
    for n in range(N):
        if -factorial_valuation(n, ctx.p) < bound_valuation:
            return n
    return None
