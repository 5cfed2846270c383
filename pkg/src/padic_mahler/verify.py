"""Deterministic identity sweeps, reported as VerificationReport rows.

Each row compares two independent computations on a sample and records
the smallest valuation of their difference.
"""

from __future__ import annotations

import math
import random
from dataclasses import asdict, dataclass

from .gammap import (
    f_r_series,
    g_series,
    gamma_bar_closed_form,
    gamma_bar_eval,
    gamma_bar_mahler_coeffs,
    gamma_oracle,
    q_series,
    tau_p_apply,
)
from .mahler import MahlerSeries, random_series, random_zp
from .measures import (
    BoundedPowerSeries,
    diamond,
    h_series,
    integrate,
    pair,
    star,
    star_pow,
    transform_T,
)
from .ode import apply_Q, exp_minus_t_witness, j_map, solve_linear_de
from .padic_core import INF, PrimeContext
from .sigma import (
    apply_S,
    eval_inv_S_direct,
    eval_iterate_S_direct,
    inv_S,
    iterate_S,
    lipschitz_pairs,
    lipschitz_sweep,
)

__all__ = ["VerificationReport", "SUITES", "run_suite", "residual", "coefficient_residual"]

KINDS = ("bfact", "poly", "geometric")


@dataclass(frozen=True)
class VerificationReport:
    identity: str
    samples: int
    min_residual_valuation: float | int
    required_valuation: float | int
    passed: bool
    seed: int
    p: int

    def to_json(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        for key in ("min_residual_valuation", "required_valuation"):
            v = d[key]
            d[key] = "inf" if v == INF else ("-inf" if v == -INF else int(v))
        return d


def residual(a, b):
    """v_p(a - b) as certified by the known digits."""
    return (a - b).valuation


def coefficient_residual(xs, ys, count: int | None = None):
    pairs = list(zip(xs, ys))
    if count is not None:
        pairs = pairs[:count]
    return min((residual(x, y) for x, y in pairs), default=INF)


def _report(identity, residuals, required, seed, p) -> VerificationReport:
    residuals = list(residuals)
    m = min(residuals, default=INF)
    return VerificationReport(identity, len(residuals), m, required, bool(residuals) and m >= required, seed, p)


def _series(ctx, rng, i, N=None):
    return random_series(ctx, ctx.default_terms() if N is None else N, rng, KINDS[i % len(KINDS)])


def _flag(identity, ok: bool, samples, seed, p) -> VerificationReport:
    """A row for a yes/no falsification check (1 = holds, 0 = refuted)."""
    v = 1 if ok else 0
    return VerificationReport(identity, samples, v, 1, ok, seed, p)


# ----------------------------------------------------------------------
# suites


def suite_sigma(ctx: PrimeContext, seed: int = 0, samples: int = 5) -> list:
    rng = random.Random(seed)
    p, P = ctx.p, ctx.precision
    req = P - 2
    out = []
    fs = [_series(ctx, rng, i) for i in range(samples)]
    out.append(_report("sigma.round_trip_inv_S_S", (coefficient_residual(inv_S(apply_S(f)).coeffs, f.coeffs) for f in fs), req, seed, p))
    out.append(_report("sigma.round_trip_S_inv_S", (coefficient_residual(apply_S(inv_S(f)).coeffs, f.coeffs) for f in fs), req, seed, p))
    res = []
    for f in fs:
        Sf = apply_S(f)
        for _ in range(3):
            x = random_zp(ctx, rng)
            res.append(residual(Sf.eval(x), f.eval(x) - f.eval(x - 1) * x))
    out.append(_report("sigma.pointwise_law", res, req, seed, p))
    res = []
    for f in fs:
        x = random_zp(ctx, rng)
        res.append(residual(eval_inv_S_direct(f, x), inv_S(f).eval(x)))
    out.append(_report("sigma.inv_S_direct_sum", res, req, seed, p))
    res = []
    for f in fs:
        x = random_zp(ctx, rng)
        res.append(residual(eval_iterate_S_direct(f, 2, x), iterate_S(f, 2).eval(x)))
    out.append(_report("sigma.iterate_closed_form", res, req, seed, p))
    res = []
    f = fs[0]
    for m in range(9):
        rhs = sum((f.eval(-1 - k) * math.perm(m, k) for k in range(m + 1)), ctx.zero())
        res.append(residual(iterate_S(f, m).eval(-1), rhs))
    out.append(_report("sigma.iterate_at_minus_one", res, req, seed, p))
    q = q_series(ctx)
    out.append(_report("sigma.q_recurrence_values", (residual(q.eval(n), v) for n, v in enumerate([1, 2, 5, 16, 65])), req, seed, p))
    pairs = lipschitz_pairs(ctx, 10, rng)
    lip = [random_series(ctx, ctx.default_terms(), rng, k) for k in ("lipschitz", "bfact", "geometric")]
    ok = all(lipschitz_sweep(op(g).eval, pairs, p).passed for g in lip for op in (lambda s: s, apply_S, inv_S))
    out.append(_flag("sigma.lipschitz_preserved", ok, len(pairs) * len(lip), seed, p))
    return out


def _r_values(p):
    return [1, 1 + p, 1 - p, 1 + 2 * p]


def suite_gamma(ctx: PrimeContext, seed: int = 0, samples: int = 5, n_max: int = 10) -> list:
    rng = random.Random(seed)
    p, P = ctx.p, ctx.precision
    req = P - 2
    out = []
    for r in _r_values(p):
        f = f_r_series(ctx, r)
        for n in range(1, n_max + 1):
            res = residual(gamma_bar_eval(ctx, r, n, f_r=f), tau_p_apply(ctx, gamma_oracle(r, n)))
            out.append(_report(f"gamma.interpolation[r={r},n={n}]", [res], req, seed, p))
        res = []
        for _ in range(samples):
            x = random_zp(ctx, rng)
            res.append(residual(gamma_bar_eval(ctx, r, x, f_r=f), gamma_bar_closed_form(ctx, r, x)))
        out.append(_report(f"gamma.closed_form[r={r}]", res, req, seed, p))
        M = gamma_bar_mahler_coeffs(ctx, r)
        res = []
        for _ in range(samples):
            x = random_zp(ctx, rng)
            res.append(residual(M.eval(x), gamma_bar_eval(ctx, r, x + 1, f_r=f)))
        out.append(_report(f"gamma.mahler_coefficients[r={r}]", res, req, seed, p))
        conv = star(q_series(ctx), g_series(ctx, r))
        out.append(_report(f"gamma.f_r_is_q_star_g_r[r={r}]", [coefficient_residual(conv.coeffs, f.coeffs)], req, seed, p))
    return out


def suite_measures(ctx: PrimeContext, seed: int = 0, samples: int = 4) -> list:
    rng = random.Random(seed)
    p, P = ctx.p, ctx.precision
    req = P - 4
    N = ctx.default_terms()
    out = []
    pairs = [(_series(ctx, rng, i), _series(ctx, rng, i + 1)) for i in range(samples)]
    out.append(_report("measures.pair_symmetry", (residual(pair(f, g), pair(g, f)) for f, g in pairs), req, seed, p))
    out.append(_report("measures.pair_self_adjoint", (residual(pair(apply_S(f), g), pair(f, apply_S(g))) for f, g in pairs), req, seed, p))
    res = []
    for f, g in pairs:
        d = pair(f, g, "diagonal")
        res += [residual(d, pair(f, g, "integral")), residual(d, pair(f, g, "star_eval"))]
    out.append(_report("measures.pair_routes_agree", res, req, seed, p))
    res = []
    for f, _ in pairs:
        G = BoundedPowerSeries.from_coefficients(ctx, [random_zp(ctx, rng) for _ in range(N)], 0)
        res.append(residual(integrate(f, G.derivative()), integrate(f.times_x_shift_back(), G)))
    out.append(_report("measures.derivative_measure", res, req, seed, p))
    one = MahlerSeries.constant(ctx, 1, N)
    out.append(_report("measures.pair_is_integral_of_star", (residual(pair(f, g), integrate(star(f, g, 2 * N - 1), h_series(one, 2 * N - 1))) for f, g in pairs), req, seed, p))
    out.append(_report("measures.star_adjoint", (coefficient_residual(star(apply_S(f), g).coeffs, star(f, apply_S(g)).coeffs) for f, g in pairs), req, seed, p))
    q = q_series(ctx)
    out.append(_report("measures.inv_S_is_q_star", (coefficient_residual(inv_S(g).coeffs, star(q, g).coeffs) for _, g in pairs), req, seed, p))
    res = []
    for f, g in pairs:
        lhs = transform_T(star(f, g, 2 * N - 1), N)
        rhs = diamond(transform_T(f), transform_T(g))
        res.append(coefficient_residual(lhs.series.coeffs, rhs.series.coeffs))
    out.append(_report("measures.transform_of_star", res, req, seed, p))
    res = []
    for _, g in pairs:
        T = transform_T(g)
        s = random_zp(ctx, rng)
        for m in range(-5, 6):
            res.append(residual(transform_T(iterate_S(g, m)).eval(s), T.eval(s + m)))
    out.append(_report("measures.transform_shift", res, req, seed, p))
    out.append(_report("measures.inv_S_of_transform", (coefficient_residual(inv_S(transform_T(g).series).coeffs, transform_T(-g.indefinite_sum()).series.coeffs) for _, g in pairs), req, seed, p))
    res = []
    g = pairs[0][1]
    T = transform_T(g)
    unit = one - MahlerSeries.beta(ctx, 1, N)
    for m in range(-3, 4):
        res.append(residual(T.eval(m), pair(star_pow(unit, m), g)))
    out.append(_report("measures.transform_as_integral", res, req, seed, p))
    out.append(_report("measures.worked_example", worked_example_residuals(ctx), P - 2, seed, p))
    refuted = all(
        not (coefficient_residual(iterate_S(g, m).coeffs, g.coeffs) >= g.coefficient_precision())
        for _, g in pairs
        for m in (1, 2, p)
    )
    out.append(_flag("measures.no_periodic_points", refuted, 3 * len(pairs), seed, p))
    moves = True
    for _, g in pairs:
        T = transform_T(g)
        for j in (0, 1):
            pts = [random_zp(ctx, rng) for _ in range(5)]
            if not any(not (T.eval(s + p**j) - T.eval(s)).is_zero() for s in pts):
                moves = False
    out.append(_flag("measures.not_locally_constant", moves, 10 * len(pairs), seed, p))
    return out


def worked_example_residuals(ctx: PrimeContext) -> list:
    """sum (-1)^n (n + 2) coeff_n(f_r) against 1/r for r in {1, 1 + p}."""
    N = ctx.default_terms()
    weights = h_series(apply_S(MahlerSeries.constant(ctx, 1, N)), N)
    out = []
    for r in (1, 1 + ctx.p):
        out.append(residual(integrate(f_r_series(ctx, r, N), weights), ctx(1) / r))
    return out


def suite_ode(ctx: PrimeContext, seed: int = 0, samples: int = 5) -> list:
    rng = random.Random(seed)
    p, P = ctx.p, ctx.precision
    N = ctx.default_terms()
    out = []
    res, bounded = [], True
    for _ in range(samples):
        G = BoundedPowerSeries.from_coefficients(ctx, [random_zp(ctx, rng) for _ in range(N)], 0)
        sol = solve_linear_de(G)
        res.append(sol.min_residual_valuation)
        bounded = bounded and sol.F.is_bounded_by(0)
    out.append(_report("ode.residual", res, P - 2, seed, p))
    out.append(_flag("ode.integral_solution", bounded, samples, seed, p))
    res = []
    for _ in range(samples):
        f = random_series(ctx, N, rng, "bfact")
        lhs = apply_Q(j_map(f))
        rhs = j_map(apply_S(f).shift(1))
        res.append(coefficient_residual(lhs.coeffs, rhs.coeffs, N - 1))
    out.append(_report("ode.Q_of_J", res, P - 2, seed, p))
    out.append(_flag("ode.exp_minus_t_unbounded", exp_minus_t_witness(ctx, N, 0) is not None, 1, seed, p))
    return out


SUITES = {
    "sigma": suite_sigma,
    "gamma": suite_gamma,
    "measures": suite_measures,
    "ode": suite_ode,
}


def run_suite(name: str, ctx: PrimeContext, seed: int = 0) -> list:
    if name == "all":
        out = []
        for key in ("sigma", "gamma", "measures", "ode"):
            out.extend(SUITES[key](ctx, seed))
        return out
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}")
    return SUITES[name](ctx, seed)

