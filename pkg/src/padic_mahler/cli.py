"""Command-line interface.

Exit codes: 0 success, 1 a verification row failed, 2 usage or domain error.
Every global flag can also be set through an environment variable named
``PADIC_MAHLER_<FLAG>`` (for example ``PADIC_MAHLER_PRECISION=30``).
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from dataclasses import dataclass
from pathlib import Path

from .gammap import (
    GammaParameter,
    f_r_series,
    g_series,
    gamma_bar_eval,
    gamma_bar_mahler_coeffs,
    q_series,
)
from .mahler import MahlerSeries
from .measures import BoundedPowerSeries, egf_ogf_export, h_series, pair, star, transform_T
from .ode import solve_linear_de
from .padic_core import INF, PadicError, PadicScalar, PrimeContext, parse_rational
from .serialize import (
    SCHEMA_VERSION,
    dumps,
    object_from_json,
    power_series_to_csv,
    power_series_to_json,
    scalar_to_json,
    series_to_csv,
    series_to_json,
)
from .sigma import apply_S, inv_S, iterate_S, solve_factorial_recurrence
from .verify import run_suite

ENV_PREFIX = "PADIC_MAHLER_"
MIN_PRECISION = 8


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    p: int
    precision: int
    terms: int
    seed: int
    format: str

    @property
    def ctx(self) -> PrimeContext:
        return PrimeContext(self.p, self.precision)


def _env(name, default, cast=str):
    raw = os.environ.get(ENV_PREFIX + name.upper())
    if raw is None:
        return default
    try:
        return cast(raw)
    except ValueError as exc:
        raise UsageError(f"bad value for {ENV_PREFIX}{name.upper()}: {raw!r}") from exc


def make_config(args) -> RunConfig:
    ctx = PrimeContext(args.p, args.precision)
    if args.precision < MIN_PRECISION:
        raise UsageError(f"--precision must be at least {MIN_PRECISION}")
    terms = args.terms if args.terms else ctx.default_terms()
    if terms < 1:
        raise UsageError("--terms must be positive")
    return RunConfig(ctx.p, ctx.precision, terms, args.seed, args.format)


# ----------------------------------------------------------------------
# function expressions

_CALL = re.compile(r"^(?P<op>[A-Za-z_]+)(?:\^(?P<m>-?\d+))?\((?P<inner>.*)\)$")


def parse_function(expr: str, cfg: RunConfig, r=None) -> MahlerSeries:
    """Build a series from an expression such as ``q``, ``beta:3``, ``S^-2(g_r)``, ``T(f_r)``."""
    ctx, N = cfg.ctx, cfg.terms
    expr = expr.strip()
    r = "1" if r is None else r
    m = _CALL.match(expr)
    if m:
        op, power, inner = m.group("op"), m.group("m"), parse_function(m.group("inner"), cfg, r)
        if op == "S":
            return iterate_S(inner, int(power) if power is not None else 1)
        if power is not None:
            raise UsageError(f"only S takes a power: {expr!r}")
        if op == "T":
            return transform_T(inner, N).series
        if op == "nabla":
            return inner.nabla()
        if op in ("Sigma", "sum"):
            return inner.indefinite_sum()
        if op == "U":
            return inner.shift(1)
        if op == "Uinv":
            return inner.shift(-1)
        raise UsageError(f"unknown operator {op!r}")
    if expr.startswith("@"):
        obj = object_from_json(json.loads(Path(expr[1:]).read_text()))
        if not isinstance(obj, MahlerSeries):
            raise UsageError(f"{expr[1:]} does not hold a Mahler series")
        return obj
    name, _, arg = expr.partition(":")
    if name in ("beta", "beta_n"):
        if not arg:
            raise UsageError("beta needs an index, as in beta:3")
        return MahlerSeries.beta(ctx, int(arg), N)
    if arg and name in ("g", "g_r", "f_r", "gamma_bar", "gamma_bar_r"):
        r = arg
    if name == "q":
        return q_series(ctx, N)
    if name in ("one", "1"):
        return MahlerSeries.constant(ctx, 1, N)
    if name in ("zero", "0"):
        return MahlerSeries.zero(ctx, N)
    if name in ("g", "g_r"):
        return g_series(ctx, parse_rational(r), N)
    if name == "f_r":
        return f_r_series(ctx, parse_rational(r), N)
    if name in ("gamma_bar", "gamma_bar_r"):
        # series of x -> gamma_bar(x + 1), shifted back by one
        return gamma_bar_mahler_coeffs(ctx, parse_rational(r), N).shift(-1)
    raise UsageError(f"unknown function expression {expr!r}")


def parse_point(text: str, ctx: PrimeContext):
    x = parse_rational(text)
    if x.denominator == 1:
        return int(x)
    return ctx(x)


# ----------------------------------------------------------------------
# output


def _scalar_text(s: PadicScalar) -> str:
    p = s.ctx.p
    if s.valuation == INF:
        return "0 (exact)"
    if s.unit == 0:
        return f"O({p}^{s.precision})"
    if s.valuation >= 0:
        return f"{s.residue()} mod {p}^{s.precision} (valuation {s.valuation})"
    return f"{s.unit} / {p}^{-s.valuation} mod {p}^{s.precision}"


def _scalar_payload(s: PadicScalar, **extra) -> dict:
    d = {"schema_version": SCHEMA_VERSION, **scalar_to_json(s)}
    d.update(extra)
    return d


class Output:
    """Collects the payload of a command and renders it in the chosen format."""

    def __init__(self, fmt: str, out: str | None):
        self.fmt = fmt
        self.out = out

    def write(self, text: str):
        if not text.endswith("\n"):
            text += "\n"
        if self.out:
            Path(self.out).write_text(text)
        else:
            sys.stdout.write(text)

    def scalar(self, s: PadicScalar, **extra):
        if self.fmt == "json":
            self.write(dumps(_scalar_payload(s, **extra)))
        elif self.fmt == "csv":
            self.write(f"valuation,unit,precision,p\n{scalar_to_json(s)['valuation']},{s.unit},{scalar_to_json(s)['precision']},{s.ctx.p}")
        else:
            self.write(_scalar_text(s))

    def scalars(self, values, label="n"):
        if self.fmt == "json":
            self.write(dumps({"schema_version": SCHEMA_VERSION, "values": [scalar_to_json(v) for v in values]}))
        elif self.fmt == "csv":
            rows = [f"{label},valuation,unit,precision"]
            for i, v in enumerate(values):
                j = scalar_to_json(v)
                rows.append(f"{i},{j['valuation']},{j['unit']},{j['precision']}")
            self.write("\n".join(rows))
        else:
            self.write("\n".join(f"{label}={i}: {_scalar_text(v)}" for i, v in enumerate(values)))

    def series(self, f):
        if isinstance(f, BoundedPowerSeries):
            payload, csv_text = power_series_to_json(f), power_series_to_csv(f)
        else:
            payload, csv_text = series_to_json(f), series_to_csv(f)
        if self.fmt == "json":
            self.write(dumps(payload))
        elif self.fmt == "csv":
            self.write(csv_text)
        else:
            tail = payload.get("tail_valuation", payload.get("bound_valuation"))
            lines = [f"p={f.ctx.p} P={f.ctx.precision} N={len(f.coeffs)} bound={tail}"]
            lines += [f"a_{n} = {_scalar_text(c)}" for n, c in enumerate(f.coeffs)]
            self.write("\n".join(lines))

    def reports(self, reports):
        if self.fmt == "json":
            self.write(dumps([r.to_json() for r in reports]))
        elif self.fmt == "csv":
            rows = ["identity,p,samples,min_residual_valuation,required_valuation,pass,seed"]
            for r in reports:
                j = r.to_json()
                rows.append(
                    f"\"{j['identity']}\",{j['p']},{j['samples']},{j['min_residual_valuation']},"
                    f"{j['required_valuation']},{j['pass']},{j['seed']}"
                )
            self.write("\n".join(rows))
        else:
            width = max((len(r.identity) for r in reports), default=8)
            lines = []
            for r in reports:
                j = r.to_json()
                status = "PASS" if r.passed else "FAIL"
                lines.append(
                    f"{status}  {r.identity:<{width}}  p={r.p}  samples={r.samples}  "
                    f"min_v={j['min_residual_valuation']}  required={j['required_valuation']}"
                )
            self.write("\n".join(lines))


# ----------------------------------------------------------------------
# commands


def cmd_eval(args, cfg, out):
    f = parse_function(args.f, cfg, args.r)
    x = parse_point(args.x, cfg.ctx)
    out.scalar(f.eval(x), function=args.f, x=args.x)
    return 0


def cmd_sigma(args, cfg, out):
    f = parse_function(args.f, cfg, args.r)
    if args.action == "apply":
        out.series(apply_S(f))
    elif args.action == "inv":
        out.series(inv_S(f))
    elif args.action == "iterate":
        out.series(iterate_S(f, args.m))
    else:
        out.scalars(solve_factorial_recurrence(f, args.n_max))
    return 0


def cmd_gamma(args, cfg, out):
    ctx = cfg.ctx
    if args.action == "verify":
        reports = run_suite("gamma", ctx, cfg.seed)
        out.reports(reports)
        return 0 if all(r.passed for r in reports) else 1
    r = GammaParameter.of(args.r or "1", ctx)
    if args.x is None:
        raise UsageError("gamma needs --x")
    value = gamma_bar_eval(ctx, r, parse_point(args.x, ctx), cfg.terms)
    out.scalar(value, function="gamma_bar", r=str(r.r), x=args.x)
    return 0


def cmd_pair(args, cfg, out):
    f = parse_function(args.f, cfg, args.r)
    g = parse_function(args.g, cfg, args.r)
    out.scalar(pair(f, g, args.route), route=args.route)
    return 0


def cmd_star(args, cfg, out):
    out.series(star(parse_function(args.f, cfg, args.r), parse_function(args.g, cfg, args.r)))
    return 0


def cmd_transform(args, cfg, out):
    T = transform_T(parse_function(args.f, cfg, args.r), cfg.terms)
    if args.x is not None:
        out.scalar(T.eval(parse_point(args.x, cfg.ctx)), function=f"T({args.f})", x=args.x)
    else:
        out.series(T.series)
    return 0


def cmd_verify(args, cfg, out):
    reports = run_suite(args.suite, cfg.ctx, cfg.seed)
    out.reports(reports)
    return 0 if all(r.passed for r in reports) else 1


def cmd_verify_measures(args, cfg, out):
    args.suite = "measures"
    return cmd_verify(args, cfg, out)


def cmd_export(args, cfg, out):
    obj = args.object.strip()
    if obj.startswith("report:"):
        reports = run_suite(obj.split(":", 1)[1], cfg.ctx, cfg.seed)
        out.reports(reports)
        return 0
    if obj in ("h1", "H1"):
        out.series(h_series(MahlerSeries.constant(cfg.ctx, 1, cfg.terms), cfg.terms))
        return 0
    m = re.match(r"^(H|E)\((.*)\)$", obj)
    if m:
        f = parse_function(m.group(2), cfg, args.r)
        if m.group(1) == "H":
            out.series(h_series(f, cfg.terms))
        else:
            out.series(egf_ogf_export(f, cfg.terms)[0])
        return 0
    out.series(parse_function(obj, cfg, args.r))
    return 0


def _read_coeffs(text: str, ctx: PrimeContext):
    path = Path(text)
    if path.exists():
        raw = path.read_text()
        stripped = raw.lstrip()
        if stripped.startswith("{"):
            obj = object_from_json(json.loads(raw))
            if not isinstance(obj, BoundedPowerSeries):
                raise UsageError("coefficient file must hold a power series")
            return list(obj.coeffs), obj.bound_valuation
        text = raw
    parts = [t for t in re.split(r"[,\s]+", text.strip()) if t]
    if not parts:
        raise UsageError("no coefficients given")
    return [ctx(parse_rational(t)) for t in parts], None


def cmd_de(args, cfg, out):
    ctx = cfg.ctx
    coeffs, bound = _read_coeffs(args.coeffs, ctx)
    if args.bound is not None:
        bound = args.bound
    if bound is None:
        bound = min(c.valuation for c in coeffs)
    if bound == INF:
        bound = 0
    G = BoundedPowerSeries(ctx, tuple(coeffs), bound)
    sol = solve_linear_de(G)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "F": power_series_to_json(sol.F),
        "residual_window": sol.residual_window,
        "min_residual_valuation": "inf" if sol.min_residual_valuation == INF else int(sol.min_residual_valuation),
        "bound_certificate": sol.bound_certificate,
    }
    if out.fmt == "json":
        out.write(dumps(payload))
    else:
        out.series(sol.F)
    return 0


# ----------------------------------------------------------------------
# parser


def _common(parser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--p", type=int, default=d(_env("p", 5, int)), help="the prime (default 5)")
    parser.add_argument("--precision", type=int, default=d(_env("precision", 20, int)), help="absolute precision P (default 20)")
    parser.add_argument("--terms", type=int, default=d(_env("terms", 0, int)), help="truncation N (default: smallest N with v_p(N!) >= P + 5)")
    parser.add_argument("--seed", type=int, default=d(_env("seed", 0, int)), help="seed for sampling sweeps")
    parser.add_argument("--format", choices=("json", "csv", "table"), default=d(_env("format", "json")))
    parser.add_argument("--out", default=d(_env("out", None)), help="write output to this file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="padic-mahler", description=__doc__.splitlines()[0])
    _common(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _common(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.set_defaults(func=func)
        sp.add_argument("--r", default=_env("r", None), help="gamma parameter a/b with v_p(r - 1) >= 1")
        return sp

    sp = add("eval", cmd_eval, "evaluate a function at a point")
    sp.add_argument("--f", required=True, help="function expression, e.g. q, beta:3, S^2(g_r), T(one)")
    sp.add_argument("--x", required=True, help="point in Z_p (integer or a/b)")

    sp = add("sigma", cmd_sigma, "apply S, its inverse or its iterates")
    sp.add_argument("action", choices=("apply", "inv", "iterate", "recurrence"))
    sp.add_argument("--f", required=True)
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--n-max", type=int, default=10)

    sp = add("gamma", cmd_gamma, "incomplete Gamma values or the interpolation check")
    sp.add_argument("action", nargs="?", choices=("eval", "verify"), default="eval")
    sp.add_argument("--x")

    sp = add("pair", cmd_pair, "the pairing of two functions")
    sp.add_argument("--f", required=True)
    sp.add_argument("--g", required=True)
    sp.add_argument("--route", choices=("diagonal", "integral", "star_eval"), default="diagonal")

    sp = add("star", cmd_star, "binomial convolution of Mahler coefficients")
    sp.add_argument("--f", required=True)
    sp.add_argument("--g", required=True)

    sp = add("transform", cmd_transform, "the transform sum n! f(-1-n) C(x, n)")
    sp.add_argument("--f", required=True)
    sp.add_argument("--x")

    sp = add("verify", cmd_verify, "run identity sweeps")
    sp.add_argument("--suite", choices=("sigma", "gamma", "measures", "ode", "all"), default=_env("suite", "all"))

    add("verify-measures", cmd_verify_measures, "run the measure and convolution sweeps")

    sp = add("export", cmd_export, "write a series or report")
    sp.add_argument("--object", required=True, help="function expression, h1, H(expr), E(expr) or report:<suite>")

    sp = add("de", cmd_de, "solve F' + F = G")
    sp.add_argument("action", choices=("solve",))
    sp.add_argument("--coeffs", required=True, help="inline list '1,2,3' or a file path")
    sp.add_argument("--bound", type=int, help="declared lower bound on v_p(g_n)")
    return parser


def main(argv=None) -> int:
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        cfg = make_config(args)
        out = Output(cfg.format, args.out)
        return args.func(args, cfg, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (PadicError, ValueError, ZeroDivisionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
