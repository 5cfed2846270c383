"""JSON and CSV forms of scalars, series and reports.

Scalar: ``{"valuation": int | "inf", "unit": "<decimal>", "precision": int | "inf", "p": int}``.
Mahler series: ``{"schema_version", "kind": "mahler", "p", "P", "N", "coeffs", "tail_valuation", "tail_verified"}``.
Power series: ``{"schema_version", "kind": "power", "p", "P", "N", "coeffs", "bound_valuation"}``.
"""

from __future__ import annotations

import csv
import io
import json

from .mahler import MahlerSeries
from .measures import BoundedPowerSeries
from .padic_core import INF, PadicError, PadicScalar, PrimeContext

__all__ = [
    "SCHEMA_VERSION",
    "scalar_to_json",
    "scalar_from_json",
    "series_to_json",
    "series_from_json",
    "power_series_to_json",
    "power_series_from_json",
    "object_from_json",
    "same_scalar",
    "same_series",
    "series_to_csv",
    "power_series_to_csv",
    "dumps",
]

SCHEMA_VERSION = 1


def _enc(v):
    if v == INF:
        return "inf"
    if v == -INF:
        return "-inf"
    return int(v)


def _dec(v):
    if v == "inf":
        return INF
    if v == "-inf":
        return -INF
    if v is None:
        return None
    return int(v)


def scalar_to_json(s: PadicScalar) -> dict:
    return {
        "valuation": _enc(s.valuation),
        "unit": str(s.unit),
        "precision": _enc(s.precision),
        "p": s.ctx.p,
    }


def scalar_from_json(d: dict, ctx: PrimeContext) -> PadicScalar:
    if int(d["p"]) != ctx.p:
        raise PadicError(f"scalar for p = {d['p']} read into p = {ctx.p}")
    val, prec, unit = _dec(d["valuation"]), _dec(d["precision"]), int(d["unit"])
    if val == INF:
        return ctx.zero()
    return PadicScalar._normalized(ctx, val, unit, prec)


def series_to_json(f: MahlerSeries) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "mahler",
        "p": f.ctx.p,
        "P": f.ctx.precision,
        "N": f.N,
        "coeffs": [scalar_to_json(c) for c in f.coeffs],
        "tail_valuation": _enc(f.tail_valuation),
        "tail_verified": f.tail_verified,
    }


def series_from_json(d: dict) -> MahlerSeries:
    ctx = PrimeContext(int(d["p"]), int(d["P"]))
    coeffs = tuple(scalar_from_json(c, ctx) for c in d["coeffs"])
    if "N" in d and int(d["N"]) != len(coeffs):
        raise PadicError("N does not match the number of coefficients")
    return MahlerSeries(ctx, coeffs, _dec(d["tail_valuation"]), bool(d.get("tail_verified", True)))


def power_series_to_json(G: BoundedPowerSeries) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "power",
        "p": G.ctx.p,
        "P": G.ctx.precision,
        "N": G.N,
        "coeffs": [scalar_to_json(c) for c in G.coeffs],
        "bound_valuation": None if G.bound_valuation is None else _enc(G.bound_valuation),
    }


def power_series_from_json(d: dict) -> BoundedPowerSeries:
    ctx = PrimeContext(int(d["p"]), int(d["P"]))
    coeffs = tuple(scalar_from_json(c, ctx) for c in d["coeffs"])
    return BoundedPowerSeries(ctx, coeffs, _dec(d.get("bound_valuation")))


def object_from_json(d: dict):
    if d.get("kind") == "power":
        return power_series_from_json(d)
    return series_from_json(d)


def same_scalar(a: PadicScalar, b: PadicScalar) -> bool:
    """Identical representation (not just congruence)."""
    return (a.ctx, a.valuation, a.unit, a.precision) == (b.ctx, b.valuation, b.unit, b.precision)


def same_series(a, b) -> bool:
    if type(a) is not type(b) or a.ctx != b.ctx or len(a.coeffs) != len(b.coeffs):
        return False
    if isinstance(a, MahlerSeries):
        if (a.tail_valuation, a.tail_verified) != (b.tail_valuation, b.tail_verified):
            return False
    elif a.bound_valuation != b.bound_valuation:
        return False
    return all(same_scalar(x, y) for x, y in zip(a.coeffs, b.coeffs))


def _rows(coeffs, modulus):
    for n, c in enumerate(coeffs):
        residue = "" if c.valuation < 0 else c.residue() % modulus
        yield [n, _enc(c.valuation), residue, _enc(c.precision)]


def _csv(coeffs, ctx: PrimeContext) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "valuation", "residue", "precision"])
    w.writerows(_rows(coeffs, ctx.modulus))
    return buf.getvalue()


def series_to_csv(f: MahlerSeries) -> str:
    """One row per coefficient: n, v_p(a_n), a_n mod p^P, known precision."""
    return _csv(f.coeffs, f.ctx)


def power_series_to_csv(G: BoundedPowerSeries) -> str:
    return _csv(G.coeffs, G.ctx)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)
