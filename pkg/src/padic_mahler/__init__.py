"""Mahler-series calculus over Q_p at fixed absolute precision."""

from .padic_core import (
    INF,
    ContextMismatch,
    DomainError,
    PadicError,
    PadicScalar,
    PrecisionError,
    PrimeContext,
    binom,
    exp_padic,
    pow_one_unit,
)
from .mahler import MahlerSeries, analyticity_diagnostic, factorial_view, random_series
from .sigma import apply_S, eval_inv_S_direct, inv_S, iterate_S, solve_factorial_recurrence
from .gammap import (
    GammaParameter,
    SymbolicGamma,
    f_r_series,
    g_series,
    gamma_bar_closed_form,
    gamma_bar_eval,
    gamma_oracle,
    q_series,
    tau_p_apply,
)
from .measures import (
    BoundedPowerSeries,
    TransformImage,
    diamond,
    egf_ogf_export,
    h_series,
    integrate,
    pair,
    star,
    star_pow,
    transform_T,
)
from .ode import DESolution, apply_Q, j_map, solve_linear_de

__version__ = "0.1.0"

__all__ = [
    "INF",
    "ContextMismatch",
    "DomainError",
    "PadicError",
    "PadicScalar",
    "PrecisionError",
    "PrimeContext",
    "binom",
    "exp_padic",
    "pow_one_unit",
    "MahlerSeries",
    "analyticity_diagnostic",
    "factorial_view",
    "random_series",
    "apply_S",
    "eval_inv_S_direct",
    "inv_S",
    "iterate_S",
    "solve_factorial_recurrence",
    "GammaParameter",
    "SymbolicGamma",
    "f_r_series",
    "g_series",
    "gamma_bar_closed_form",
    "gamma_bar_eval",
    "gamma_oracle",
    "q_series",
    "tau_p_apply",
    "BoundedPowerSeries",
    "TransformImage",
    "diamond",
    "egf_ogf_export",
    "h_series",
    "integrate",
    "pair",
    "star",
    "star_pow",
    "transform_T",
    "DESolution",
    "apply_Q",
    "j_map",
    "solve_linear_de",
]
