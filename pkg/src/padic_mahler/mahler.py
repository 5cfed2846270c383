"""Truncated Mahler series f = sum a_n C(x, n) with a certified tail bound.

A :class:`MahlerSeries` stores a_0..a_{N-1} and ``tail_valuation``, a lower
bound on v_p(a_n) for every n >= N.  ``INF`` marks a polynomial, and
``-INF`` marks a series whose tail is unknown (anything that needs the tail
then raises :class:`PrecisionError`).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .padic_core import (
    INF,
    DomainError,
    PadicScalar,
    PrecisionError,
    PrimeContext,
    ContextMismatch,
    _ppow,
    digit_loss,
    factorial_valuation,
)

__all__ = [
    "MahlerSeries",
    "FactorialCoeffView",
    "AnalyticityReport",
    "vlb",
    "analyticity_diagnostic",
    "factorial_view",
    "random_series",
    "random_zp",
]


def vlb(s: PadicScalar):
    """Certified lower bound for the valuation of a scalar."""
    return s.valuation


@dataclass(frozen=True, eq=False)
class MahlerSeries:
    ctx: PrimeContext
    coeffs: tuple
    tail_valuation: float | int = INF
    # False when the tail bound is a heuristic rather than a proof
    tail_verified: bool = True

    def _derive(self, coeffs, tail_valuation, *others) -> "MahlerSeries":
        ok = self.tail_verified and all(o.tail_verified for o in others)
        return MahlerSeries(self.ctx, tuple(coeffs), tail_valuation, ok)

    # ------------------------------------------------------------------
    # construction

    @classmethod
    def from_coefficients(cls, ctx: PrimeContext, values, tail_valuation=INF) -> "MahlerSeries":
        return cls(ctx, tuple(ctx(v) for v in values), tail_valuation)

    @classmethod
    def zero(cls, ctx: PrimeContext, N: int) -> "MahlerSeries":
        z = ctx.zero()
        return cls(ctx, (z,) * N, INF)

    @classmethod
    def beta(cls, ctx: PrimeContext, n: int, N: int) -> "MahlerSeries":
        """The binomial function x -> C(x, n) on a window of length N > n."""
        if n >= N:
            raise DomainError(f"beta_{n} does not fit in a window of length {N}")
        z = ctx.zero()
        coeffs = [z] * N
        coeffs[n] = ctx.one()
        return cls(ctx, tuple(coeffs), INF)

    @classmethod
    def constant(cls, ctx: PrimeContext, c, N: int) -> "MahlerSeries":
        z = ctx.zero()
        return cls(ctx, (ctx(c),) + (z,) * (N - 1), INF)

    @classmethod
    def from_values(cls, ctx: PrimeContext, values, tail_valuation=INF) -> "MahlerSeries":
        """Coefficients from f(0), ..., f(N-1) by iterated forward differences."""
        row = [ctx(v) for v in values]
        out = []
        while row:
            out.append(row[0])
            row = [row[i + 1] - row[i] for i in range(len(row) - 1)]
        return cls(ctx, tuple(out), tail_valuation)

    # ------------------------------------------------------------------
    # inspection

    @property
    def N(self) -> int:
        return len(self.coeffs)

    @property
    def p(self) -> int:
        return self.ctx.p

    def coefficient_precision(self):
        return min((c.precision for c in self.coeffs), default=INF)

    def sup_valuation(self):
        """Lower bound for min_n v_p(a_n) over all n, tail included."""
        return min([vlb(c) for c in self.coeffs] + [self.tail_valuation])

    def has_certified_tail(self) -> bool:
        return self.tail_valuation != -INF

    def __repr__(self):
        return f"MahlerSeries(p={self.p}, N={self.N}, tail={self.tail_valuation})"

    def _check(self, other: "MahlerSeries"):
        if other.ctx != self.ctx:
            raise ContextMismatch(f"{other.ctx} != {self.ctx}")

    def truncate(self, N: int) -> "MahlerSeries":
        """Keep a_0..a_{N-1}; dropped coefficients lower the tail bound."""
        if N >= self.N:
            return self
        dropped = min(vlb(c) for c in self.coeffs[N:])
        return self._derive(self.coeffs[:N], min(self.tail_valuation, dropped))

    def with_tail(self, tail_valuation) -> "MahlerSeries":
        return self._derive(self.coeffs, tail_valuation)

    # ------------------------------------------------------------------
    # linear structure (binary operations use the common window)

    def _aligned(self, other: "MahlerSeries"):
        self._check(other)
        n = min(self.N, other.N)
        return self.truncate(n), other.truncate(n)

    def __add__(self, other: "MahlerSeries") -> "MahlerSeries":
        a, b = self._aligned(other)
        coeffs = tuple(x + y for x, y in zip(a.coeffs, b.coeffs))
        return a._derive(coeffs, min(a.tail_valuation, b.tail_valuation), b)

    def __neg__(self) -> "MahlerSeries":
        return self._derive((-c for c in self.coeffs), self.tail_valuation)

    def __sub__(self, other: "MahlerSeries") -> "MahlerSeries":
        return self + (-other)

    def scale(self, c) -> "MahlerSeries":
        """Multiply by a scalar (exact rational or PadicScalar)."""
        coeffs = tuple(a * c for a in self.coeffs)
        tail = self.tail_valuation
        if isinstance(c, PadicScalar):
            vc = c.valuation
        else:
            vc = self.ctx(c).valuation if c != 0 else INF
        if tail not in (INF, -INF):
            tail = INF if vc == INF else tail + vc
        elif vc == INF:
            tail = INF
        return self._derive(coeffs, tail)

    # ------------------------------------------------------------------
    # evaluation

    def _uses_tail(self, x) -> bool:
        return not (isinstance(x, int) and 0 <= x < self.N)

    def eval(self, x) -> PadicScalar:
        """f(x) for x in Z_p, with precision certified by coefficients and tail."""
        ctx = self.ctx
        p = ctx.p
        if isinstance(x, PadicScalar):
            if x.ctx != ctx:
                raise ContextMismatch(f"{x.ctx} != {ctx}")
            if x.valuation < 0:
                raise DomainError("evaluation point outside Z_p")
            x_prec = x.precision
            X = x.residue()
            if x_prec == INF:
                x_prec = None
        elif isinstance(x, bool):
            raise TypeError("bool is not an evaluation point")
        elif isinstance(x, int):
            X, x_prec = x, None
        else:
            fx = Fraction(x)
            if fx.denominator == 1:
                X, x_prec = int(fx), None
            else:
                return self.eval(ctx(fx))
        prec = INF
        if x_prec is not None or self._uses_tail(X):
            if self.tail_valuation == -INF:
                raise PrecisionError("series tail is not certified")
            prec = self.tail_valuation
        count = self.N
        if x_prec is None and 0 <= X < count:
            count = X + 1
        terms = []
        lo = INF
        c = 1
        for n in range(count):
            if n:
                c = c * (X - n + 1) // n
            a = self.coeffs[n]
            va = a.valuation
            if va == INF:
                continue
            # coefficient uncertainty
            if a.precision != INF:
                pa = a.precision + (_vint(c, p) if c else INF)
                if pa < prec:
                    prec = pa
            # evaluation-point uncertainty
            if x_prec is not None and n:
                px = va + x_prec - digit_loss(n, p)
                if px < prec:
                    prec = px
            if a.unit and c:
                terms.append((va, a.unit * c))
                if va < lo:
                    lo = va
        if prec == INF:
            if terms:
                raise PrecisionError("cannot certify an exact nonzero value")
            return ctx.zero()
        if not terms or lo >= prec:
            return ctx.inexact_zero(prec)
        mod = _ppow(p, prec - lo)
        acc = 0
        for va, t in terms:
            if va < prec:
                acc += t * _ppow(p, va - lo)
        return PadicScalar._normalized(ctx, lo, acc % mod, prec)

    __call__ = eval

    def values_at_negatives(self, count: int) -> list:
        """[f(-1), f(-2), ..., f(-count)]."""
        out = []
        for j in range(count):
            if j == 0:
                out.append(self._eval_minus_one())
            else:
                out.append(self.eval(-1 - j))
        return out

    def _eval_minus_one(self) -> PadicScalar:
        # C(-1, n) = (-1)**n
        if self.tail_valuation == -INF:
            raise PrecisionError("series tail is not certified")
        acc = self.ctx.inexact_zero(self.tail_valuation) if self.tail_valuation != INF else self.ctx.zero()
        for n, a in enumerate(self.coeffs):
            acc = acc - a if n % 2 else acc + a
        return acc

    # ------------------------------------------------------------------
    # difference calculus

    def nabla(self) -> "MahlerSeries":
        """Forward difference f(x+1) - f(x)."""
        return self._derive(self.coeffs[1:], self.tail_valuation)

    def shift(self, direction: int) -> "MahlerSeries":
        """x -> f(x + direction) for direction in {+1, -1}."""
        if direction == 1:
            return self._shift_up()
        if direction == -1:
            return self._shift_down()
        raise DomainError("direction must be +1 or -1")

    def _shift_up(self) -> "MahlerSeries":
        cs = self.coeffs
        if not cs:
            return self
        out = [cs[n] + cs[n + 1] for n in range(len(cs) - 1)]
        last = cs[-1]
        if self.tail_valuation != INF:
            last = last + self._tail_scalar()
        out.append(last)
        return self._derive(out, self.tail_valuation)

    def _tail_scalar(self) -> PadicScalar:
        if self.tail_valuation == -INF:
            raise PrecisionError("series tail is not certified")
        return self.ctx.inexact_zero(self.tail_valuation)

    def _shift_down(self) -> "MahlerSeries":
        if self.tail_valuation == -INF:
            raise PrecisionError("shift by -1 needs a certified tail")
        cs = self.coeffs
        out = [None] * len(cs)
        run = self.ctx.zero() if self.tail_valuation == INF else self._tail_scalar()
        for n in range(len(cs) - 1, -1, -1):
            run = cs[n] - run
            out[n] = run
        return self._derive(out, self.tail_valuation)

    def indefinite_sum(self) -> "MahlerSeries":
        """(Sigma f)(n) = f(0) + ... + f(n-1)."""
        cs = self.coeffs
        if not cs:
            return self
        tail = min(self.tail_valuation, vlb(cs[-1]))
        return self._derive((self.ctx.zero(),) + cs[:-1], tail)

    def times_x_shift_back(self) -> "MahlerSeries":
        """x -> x * f(x - 1); coefficients n * a_{n-1}."""
        cs = self.coeffs
        if not cs:
            return self
        out = [self.ctx.zero()] + [cs[n - 1] * n for n in range(1, len(cs))]
        N = len(cs)
        edge = vlb(cs[-1]) + _vint(N, self.p)
        return self._derive(out, min(self.tail_valuation, edge))

    # ------------------------------------------------------------------
    # export helpers

    def valuation_table(self) -> list:
        return [(n, c.valuation) for n, c in enumerate(self.coeffs)]

    def residues(self) -> list:
        """Coefficients reduced to integers mod p**P (requires integral coefficients)."""
        mod = self.ctx.modulus
        return [c.residue() % mod for c in self.coeffs]


def _vint(n: int, p: int):
    if n == 0:
        return INF
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


# ----------------------------------------------------------------------
# finite-window diagnostics


@dataclass(frozen=True)
class AnalyticityReport:
    beta: Fraction
    window: tuple
    passed: bool
    first_failure: int | None
    note: str = "finite-window diagnostic; not a proof of local analyticity"


def analyticity_diagnostic(f: MahlerSeries, beta, N0: int) -> AnalyticityReport:
    """Check v_p(a_n) >= n * beta for every n in [N0, N)."""
    beta = Fraction(beta)
    if N0 >= f.N:
        raise DomainError("N0 must be smaller than the window length")
    for n in range(N0, f.N):
        if vlb(f.coeffs[n]) < n * beta:
            return AnalyticityReport(beta, (N0, f.N), False, n)
    return AnalyticityReport(beta, (N0, f.N), True, None)


@dataclass(frozen=True)
class FactorialCoeffView:
    """The sequence a_n with f = sum n! a_n C(x, n) on the stored window."""

    ctx: PrimeContext
    coeffs: tuple
    bound_valuation: float | int

    def within(self, bound_valuation) -> bool:
        return all(vlb(c) >= bound_valuation for c in self.coeffs)


def factorial_view(f: MahlerSeries) -> FactorialCoeffView:
    """Divide a_n by n!; raises DomainError if some a_n is not divisible."""
    p = f.p
    out = []
    for n, c in enumerate(f.coeffs):
        vf = factorial_valuation(n, p)
        if vlb(c) < vf:
            raise DomainError(f"coefficient {n} is not divisible by {n}! to known precision")
        out.append(c / math.factorial(n))
    bound = min((vlb(c) for c in out), default=INF)
    return FactorialCoeffView(f.ctx, tuple(out), bound)


# ----------------------------------------------------------------------
# sample generation


def random_zp(ctx: PrimeContext, rng: random.Random, digits: int | None = None) -> int:
    """A random integer standing for an element of Z_p (P digits by default)."""
    return rng.randrange(_ppow(ctx.p, ctx.precision if digits is None else digits))


def random_series(ctx: PrimeContext, N: int, rng: random.Random, kind: str = "bfact", degree: int = 8) -> MahlerSeries:
    """Random test series with a certified tail.

    kinds: ``bfact`` (a_n = n! u_n), ``poly`` (integer polynomial),
    ``geometric`` (a_n = p**n u_n), ``lipschitz`` (polynomial with
    v_p(a_n) >= floor(log_p n), hence 1-Lipschitz).
    """
    p = ctx.p
    if kind == "bfact":
        coeffs = [math.factorial(n) * random_zp(ctx, rng) for n in range(N)]
        return MahlerSeries.from_coefficients(ctx, coeffs, factorial_valuation(N, p))
    if kind == "poly":
        d = min(degree, N - 1)
        coeffs = [random_zp(ctx, rng) if n <= d else 0 for n in range(N)]
        return MahlerSeries.from_coefficients(ctx, coeffs, INF)
    if kind == "geometric":
        coeffs = [p**n * random_zp(ctx, rng) for n in range(N)]
        return MahlerSeries.from_coefficients(ctx, coeffs, N)
    if kind == "lipschitz":
        d = min(degree, N - 1)
        coeffs = [p ** digit_loss(n, p) * random_zp(ctx, rng) if n <= d else 0 for n in range(N)]
        return MahlerSeries.from_coefficients(ctx, coeffs, INF)
    raise DomainError(f"unknown series kind {kind!r}")
