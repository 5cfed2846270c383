"""The operator S(f)(x) = f(x) - x f(x - 1) on Mahler series.

On coefficients S sends b_n to b_n - n b_{n-1}; its inverse is the
recurrence a_n = n a_{n-1} + b_n.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .mahler import MahlerSeries, vlb, random_zp
from .padic_core import (
    INF,
    DomainError,
    PadicScalar,
    PrimeContext,
    factorial_valuation,
    valuation,
)

__all__ = [
    "SigmaOperatorConfig",
    "apply_S",
    "inv_S",
    "iterate_S",
    "eval_inv_S_direct",
    "eval_iterate_S_direct",
    "solve_factorial_recurrence",
    "LipschitzReport",
    "lipschitz_sweep",
    "lipschitz_pairs",
]


@dataclass(frozen=True)
class SigmaOperatorConfig:
    ctx: PrimeContext
    N: int

    @classmethod
    def default(cls, ctx: PrimeContext) -> "SigmaOperatorConfig":
        return cls(ctx, ctx.default_terms())


def _vint(n: int, p: int):
    return valuation(n, p)


def apply_S(f: MahlerSeries) -> MahlerSeries:
    """Coefficients b_n - n b_{n-1}."""
    cs = f.coeffs
    if not cs:
        return f
    out = [cs[0]] + [cs[n] - cs[n - 1] * n for n in range(1, len(cs))]
    N = len(cs)
    # n >= N: a_n - n a_{n-1}; only n = N reaches back into the window
    edge = vlb(cs[-1]) + _vint(N, f.p)
    return f._derive(out, min(f.tail_valuation, edge))


def inv_S(g: MahlerSeries) -> MahlerSeries:
    """S^{-1} via a_n = n a_{n-1} + b_n; a_n = sum_{k<=n} (n!/k!) b_k."""
    cs = g.coeffs
    if not cs:
        return g
    p = g.p
    out = []
    prev = None
    for n, b in enumerate(cs):
        prev = b if n == 0 else prev * n + b
        out.append(prev)
    N = len(cs)
    vN = factorial_valuation(N, p)
    # bound 1: every n!/k! with n >= N, k < N is divisible by N!/k!
    b1 = min(vN - factorial_valuation(k, p) + vlb(b) for k, b in enumerate(cs))
    # bound 2: a_n for n >= N is (n!/(N-1)!) a_{N-1} plus tail terms
    b2 = vlb(out[-1]) + _vint(N, p)
    tail = min(g.tail_valuation, max(b1, b2))
    return g._derive(out, tail)


def iterate_S(f: MahlerSeries, m: int) -> MahlerSeries:
    """S^m for any integer m."""
    step = apply_S if m >= 0 else inv_S
    for _ in range(abs(m)):
        f = step(f)
    return f


def _falling(x: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= x - i
    return out


def _point(ctx: PrimeContext, x):
    """Split an evaluation point into an integer representative and its precision."""
    if isinstance(x, PadicScalar):
        if x.valuation < 0:
            raise DomainError("evaluation point outside Z_p")
        return x.residue(), x.precision
    if isinstance(x, int) and not isinstance(x, bool):
        return x, INF
    raise TypeError("evaluation point must be an int or a PadicScalar")


def eval_inv_S_direct(g: MahlerSeries, x, terms: int | None = None) -> PadicScalar:
    """S^{-1}(g)(x) as the pointwise sum of (x)_n g(x - n) for n < terms.

    The omitted terms are divisible by terms! times the sup bound of g.
    """
    ctx = g.ctx
    X, xp = _point(ctx, x)
    N = g.N if terms is None else terms
    acc = ctx.zero()
    if 0 <= X < N and xp == INF:
        count, tail = X + 1, INF
    else:
        count = N
        tail = factorial_valuation(N, ctx.p) + g.sup_valuation()
    for n in range(count):
        pt = X - n if xp == INF else ctx(X - n).with_precision(xp)
        acc = acc + g.eval(pt) * _falling(X, n)
    if xp != INF:
        # (x)_n is an integer polynomial, so it moves by at most |dx|
        tail = min(tail, xp + g.sup_valuation())
    if tail != INF:
        acc = acc + ctx.inexact_zero(tail)
    return acc


def eval_iterate_S_direct(psi: MahlerSeries, m: int, x) -> PadicScalar:
    """S^m(psi)(x) = sum_k (-1)^k C(m, k) (x)_k psi(x - k) for m >= 0."""
    if m < 0:
        raise DomainError("closed form needs m >= 0")
    X, xp = _point(psi.ctx, x)
    acc = psi.ctx.zero()
    for k in range(m + 1):
        pt = X - k if xp == INF else psi.ctx(X - k).with_precision(xp)
        acc = acc + psi.eval(pt) * ((-1) ** k * math.comb(m, k) * _falling(X, k))
    return acc


def solve_factorial_recurrence(g: MahlerSeries, n_max: int) -> list:
    """a_0..a_{n_max} with a_n = n a_{n-1} + g(n), seeded by a_0 = g(0)."""
    out = []
    prev = None
    for n in range(n_max + 1):
        gn = g.eval(n)
        prev = gn if n == 0 else prev * n + gn
        out.append(prev)
    return out


# ----------------------------------------------------------------------
# sampled Lipschitz checks


@dataclass
class LipschitzReport:
    identity: str
    samples: int
    skipped: int
    max_ratio_exponent: float
    passed: bool
    seed: int | None = None
    failures: list = field(default_factory=list)

    def max_ratio(self, p: int) -> float:
        """Upper bound for max |f(x) - f(y)| / |x - y| over the sample."""
        return 0.0 if self.max_ratio_exponent == -INF else float(p) ** self.max_ratio_exponent


def lipschitz_pairs(ctx: PrimeContext, count: int, rng: random.Random, max_gap: int | None = None) -> list:
    """Pairs (x, y) of exact integers with y = x + p^k u, u a unit."""
    p = ctx.p
    hi = ctx.precision - 5 if max_gap is None else max_gap
    pairs = []
    for _ in range(count):
        x = random_zp(ctx, rng)
        k = rng.randrange(0, max(hi, 1))
        u = rng.randrange(1, p**3)
        while u % p == 0:
            u = rng.randrange(1, p**3)
        pairs.append((x, x + p**k * u))
    return pairs


def lipschitz_sweep(func, pairs, p: int, identity: str = "lipschitz", seed=None) -> LipschitzReport:
    """Certify v_p(f(x) - f(y)) >= v_p(x - y) on every pair.

    ``func`` maps an integer point to a PadicScalar.  The ratio exponent of
    a pair is v_p(x - y) - (certified lower bound of v_p(f(x) - f(y))); the
    function is 1-Lipschitz on the sample when every exponent is <= 0.
    """
    worst = -INF
    skipped = 0
    samples = 0
    failures = []
    for x, y in pairs:
        if x == y:
            skipped += 1
            continue
        d = func(x) - func(y)
        e = valuation(x - y, p) - d.valuation
        samples += 1
        if e > worst:
            worst = e
        if e > 0:
            failures.append((x, y, e))
    return LipschitzReport(identity, samples, skipped, worst, worst <= 0, seed, failures)

