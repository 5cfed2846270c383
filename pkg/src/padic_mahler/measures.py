"""Bounded power series as measures, the pairing, and the two convolutions.

A power series G = sum b_n t^n with bounded coefficients integrates a
continuous function f = sum a_n C(x, n) as sum a_n b_n.  The pairing of
two functions integrates the first against
H_psi(t) = sum (-1)^n psi(-1 - n) t^n.

The binomial convolution ``star`` of Mahler coefficients has the constant 1
as identity, and S(psi) = (1 - C(x, 1)) star psi.  The transform
T(psi) = sum n! psi(-1 - n) C(x, n) lands in the span of the functions
e_n = S^{-n}(q) = (1/n!) nabla^n q, and ``diamond`` is the binomial
convolution written in that basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .mahler import MahlerSeries, vlb
from .padic_core import (
    INF,
    ContextMismatch,
    DomainError,
    PadicError,
    PadicScalar,
    PrecisionError,
    PrimeContext,
    factorial_valuation,
)

__all__ = [
    "BoundedPowerSeries",
    "TransformImage",
    "h_series",
    "integrate",
    "pair",
    "star",
    "star_tail",
    "star_inverse",
    "star_pow",
    "transform_T",
    "mahler_from_basis",
    "diamond",
    "egf_ogf_export",
    "STAR_INVERSE_SLACK",
]

STAR_INVERSE_SLACK = 2


@dataclass(frozen=True, eq=False)
class BoundedPowerSeries:
    """b_0..b_{N-1} with v_p(b_n) >= bound_valuation for every n.

    ``bound_valuation`` is None when no bound is known (for example an
    exponential generating function).
    """

    ctx: PrimeContext
    coeffs: tuple
    bound_valuation: float | int | None

    @classmethod
    def from_coefficients(cls, ctx: PrimeContext, values, bound_valuation=None) -> "BoundedPowerSeries":
        return cls(ctx, tuple(ctx(v) for v in values), bound_valuation)

    @property
    def N(self) -> int:
        return len(self.coeffs)

    def stored_bound(self):
        return min((vlb(c) for c in self.coeffs), default=INF)

    def is_bounded_by(self, bound_valuation) -> bool:
        return all(vlb(c) >= bound_valuation for c in self.coeffs)

    def derivative(self) -> "BoundedPowerSeries":
        out = tuple(self.coeffs[n] * n for n in range(1, self.N))
        return BoundedPowerSeries(self.ctx, out, self.bound_valuation)

    def times_one_minus_t(self) -> "BoundedPowerSeries":
        cs = self.coeffs
        out = tuple(cs[n] - cs[n - 1] if n else cs[0] for n in range(self.N))
        return BoundedPowerSeries(self.ctx, out, self.bound_valuation)

    def __add__(self, other: "BoundedPowerSeries") -> "BoundedPowerSeries":
        if other.ctx != self.ctx:
            raise ContextMismatch(f"{other.ctx} != {self.ctx}")
        n = min(self.N, other.N)
        out = tuple(a + b for a, b in zip(self.coeffs[:n], other.coeffs[:n]))
        if self.bound_valuation is None or other.bound_valuation is None:
            bound = None
        else:
            bound = min(self.bound_valuation, other.bound_valuation)
        return BoundedPowerSeries(self.ctx, out, bound)

    def __neg__(self) -> "BoundedPowerSeries":
        return BoundedPowerSeries(self.ctx, tuple(-c for c in self.coeffs), self.bound_valuation)

    def __sub__(self, other: "BoundedPowerSeries") -> "BoundedPowerSeries":
        return self + (-other)

    def evaluate_at(self, z) -> PadicScalar:
        """G(z) for v_p(z) >= 1; the tail is bounded by N v_p(z) + bound."""
        z = self.ctx(z)
        if z.valuation < 1:
            raise DomainError("power series evaluation needs v_p(z) >= 1")
        acc = self.ctx.zero()
        zn = self.ctx.one()
        for n, b in enumerate(self.coeffs):
            if n:
                zn = zn * z
            acc = acc + b * zn
        if z.valuation != INF:
            if self.bound_valuation is None:
                raise PrecisionError("evaluation needs a coefficient bound")
            acc = acc + self.ctx.inexact_zero(self.N * z.valuation + self.bound_valuation)
        return acc


def _sup(f: MahlerSeries):
    if not f.has_certified_tail():
        raise PrecisionError("series tail is not certified")
    return f.sup_valuation()


def h_series(psi: MahlerSeries, N: int | None = None) -> BoundedPowerSeries:
    """H_psi with coefficients (-1)^n psi(-1 - n)."""
    N = psi.N if N is None else N
    vals = psi.values_at_negatives(N)
    coeffs = tuple(v if n % 2 == 0 else -v for n, v in enumerate(vals))
    return BoundedPowerSeries(psi.ctx, coeffs, _sup(psi))


def integrate(phi: MahlerSeries, G: BoundedPowerSeries) -> PadicScalar:
    """sum a_n b_n, with the omitted terms bounded by tail(phi) + bound(G)."""
    if phi.ctx != G.ctx:
        raise ContextMismatch(f"{G.ctx} != {phi.ctx}")
    M = min(phi.N, G.N)
    f = phi.truncate(M)
    acc = phi.ctx.zero()
    for a, b in zip(f.coeffs, G.coeffs):
        acc = acc + a * b
    if f.tail_valuation != INF:
        if f.tail_valuation == -INF or G.bound_valuation is None:
            raise PrecisionError("cannot bound the omitted terms of the integral")
        acc = acc + phi.ctx.inexact_zero(f.tail_valuation + G.bound_valuation)
    return acc


# ----------------------------------------------------------------------
# binomial convolution


def _suffix_min(vals: list) -> list:
    out = [INF] * (len(vals) + 1)
    for i in range(len(vals) - 1, -1, -1):
        out[i] = min(vals[i], out[i + 1])
    return out


def star_tail(a: MahlerSeries, b: MahlerSeries, length: int | None = None):
    """Lower bound on v_p(c_n), n >= length, for c = a star b.

    ``a`` and ``b`` share the window N; ``length`` defaults to N and may go
    up to 2N - 1, past which only the tails contribute.
    """
    if not (a.has_certified_tail() and b.has_certified_tail()):
        return -INF
    N = a.N
    L = N if length is None else length
    va = [vlb(c) for c in a.coeffs]
    vb = [vlb(c) for c in b.coeffs]
    sup_a = min(va + [a.tail_valuation])
    sup_b = min(vb + [b.tail_valuation])
    bound = min(a.tail_valuation + sup_b, b.tail_valuation + sup_a)
    sb = _suffix_min(vb)
    for k in range(max(L - N + 1, 0), N):
        # terms a_k b_j with k, j < N and k + j >= L
        cross = va[k] + sb[max(L - k, 0)]
        if cross < bound:
            bound = cross
    return bound


def _binomial_convolution(xs, ys, ctx: PrimeContext, length: int) -> list:
    N = len(xs)
    out = []
    for n in range(length):
        acc = ctx.zero()
        lo = max(0, n - N + 1)
        c = math.comb(n, lo)
        for k in range(lo, min(n, N - 1) + 1):
            if k > lo:
                c = c * (n - k + 1) // k
            x = xs[k]
            y = ys[n - k]
            if x.valuation == INF or y.valuation == INF:
                continue
            acc = acc + (x * y) * c
        out.append(acc)
    return out


def star(phi: MahlerSeries, psi: MahlerSeries, length: int | None = None) -> MahlerSeries:
    """c_n = sum_k C(n, k) a_k b_{n-k}.

    The result has the common window N unless ``length`` (at most 2N - 1)
    asks for more; coefficients past N then carry the tail uncertainty.
    """
    if phi.ctx != psi.ctx:
        raise ContextMismatch(f"{psi.ctx} != {phi.ctx}")
    N = min(phi.N, psi.N)
    L = N if length is None else length
    if not 0 < L <= max(2 * N - 1, 1):
        raise DomainError(f"length must lie in [1, {2 * N - 1}]")
    a, b = phi.truncate(N), psi.truncate(N)
    coeffs = _binomial_convolution(a.coeffs, b.coeffs, phi.ctx, L)
    if L > N:
        edge = star_tail(a, b, 2 * N - 1)
        if edge == -INF:
            raise PrecisionError("extended product needs certified tails")
        if edge != INF:
            z = phi.ctx.inexact_zero(edge)
            coeffs = coeffs[:N] + [c + z for c in coeffs[N:]]
    return a._derive(coeffs, star_tail(a, b, L), b)


def star_inverse(phi: MahlerSeries, slack: int = STAR_INVERSE_SLACK) -> MahlerSeries:
    """Inverse under star by a triangular solve.

    No effective test for membership in the unit group is known, so the
    computed inverse must satisfy v_p(c_n) >= v_p(n!) - slack on the window.
    When it does, the tail is taken as v_p(N!) - slack and marked
    unverified; when it does not, the tail is unknown.
    """
    ctx = phi.ctx
    a = phi.coeffs
    if not a or a[0].is_zero():
        raise DomainError("star inverse needs an invertible constant term")
    inv0 = a[0].inverse()
    c = [inv0]
    for n in range(1, len(a)):
        acc = ctx.zero()
        binom = 1
        for k in range(1, n + 1):
            binom = binom * (n - k + 1) // k
            if a[k].valuation == INF:
                continue
            acc = acc + (a[k] * c[n - k]) * binom
        c.append(-(acc * inv0))
    p = ctx.p
    # a coefficient that is zero to its known precision cannot witness failure
    decays = all(
        x.is_zero() or x.valuation >= factorial_valuation(n, p) - slack
        for n, x in enumerate(c)
    )
    if decays:
        tail = factorial_valuation(len(a), p) - slack
    else:
        tail = -INF
    return MahlerSeries(ctx, tuple(c), tail, tail_verified=False)


def star_pow(phi: MahlerSeries, m: int) -> MahlerSeries:
    base = phi if m >= 0 else star_inverse(phi)
    out = MahlerSeries.constant(phi.ctx, 1, phi.N)
    for _ in range(abs(m)):
        out = star(out, base)
    return out


def pair(phi: MahlerSeries, psi: MahlerSeries, route: str = "diagonal") -> PadicScalar:
    """The symmetric pairing, computed by one of three routes."""
    if route == "integral":
        return integrate(phi, h_series(psi, phi.N))
    if phi.ctx != psi.ctx:
        raise ContextMismatch(f"{psi.ctx} != {phi.ctx}")
    N = min(phi.N, psi.N)
    if route == "star_eval":
        return star(phi, psi, length=max(2 * N - 1, 1)).eval(-1)
    if route != "diagonal":
        raise DomainError(f"unknown pairing route {route!r}")
    # sum (-1)^(k+j) C(k+j, k) a_k b_j over the whole known rectangle
    a, b = phi.truncate(N), psi.truncate(N)
    ctx = phi.ctx
    total = ctx.zero()
    for k in range(N):
        x = a.coeffs[k]
        if x.valuation == INF:
            continue
        row = ctx.zero()
        c = 1
        for j in range(N):
            if j:
                c = c * (k + j) // j
            y = b.coeffs[j]
            if y.valuation == INF:
                continue
            term = y * c
            row = row - term if (k + j) % 2 else row + term
        total = total + x * row
    tail = star_tail(a, b, max(2 * N - 1, 1))
    if tail == -INF:
        raise PrecisionError("pairing needs certified tails")
    if tail != INF:
        total = total + ctx.inexact_zero(tail)
    return total


# ----------------------------------------------------------------------
# the transform T and the basis S^{-n}(q)


def mahler_from_basis(basis, tail_valuation, ctx: PrimeContext, N: int | None = None) -> MahlerSeries:
    """Mahler series of sum_n d_n e_n with e_n = S^{-n}(q).

    e_n has Mahler coefficients (k + n)!/n!, so coefficient k of the sum is
    sum_n d_n (k + n)!/n!; the omitted d_n (n >= len) contribute at least
    tail_valuation + v_p(k!).
    """
    p = ctx.p
    M = len(basis)
    N = M if N is None else N
    sup_d = min([vlb(d) for d in basis] + [tail_valuation])
    out = []
    for k in range(N):
        acc = ctx.zero()
        w = math.factorial(k)  # (k + n)!/n! at n = 0
        for n, d in enumerate(basis):
            if n:
                w = w * (k + n) // n
            if d.valuation == INF:
                continue
            acc = acc + d * w
        if tail_valuation != INF:
            acc = acc + ctx.inexact_zero(tail_valuation + factorial_valuation(k, p))
        out.append(acc)
    return MahlerSeries(ctx, tuple(out), factorial_valuation(N, p) + sup_d)


@dataclass(frozen=True, eq=False)
class TransformImage:
    """A function in the image of T, kept in both coefficient systems."""

    series: MahlerSeries
    basis: tuple
    basis_tail: float | int
    check_indices: int = 12

    def __post_init__(self):
        k = min(self.check_indices, self.series.N)
        if k <= 0:
            return
        rebuilt = mahler_from_basis(self.basis, self.basis_tail, self.series.ctx, k)
        for j in range(k):
            if not (rebuilt.coeffs[j] - self.series.coeffs[j]).is_zero():
                raise PadicError(f"basis and Mahler views disagree at coefficient {j}")

    @property
    def ctx(self) -> PrimeContext:
        return self.series.ctx

    def eval(self, x) -> PadicScalar:
        return self.series.eval(x)

    __call__ = eval


def transform_T(psi: MahlerSeries, N: int | None = None) -> TransformImage:
    """T(psi) = sum n! psi(-1 - n) C(x, n); basis coefficients (-1)^n a_n."""
    N = psi.N if N is None else N
    vals = psi.values_at_negatives(N)
    coeffs = tuple(v * math.factorial(n) for n, v in enumerate(vals))
    sup = _sup(psi)
    tail = factorial_valuation(N, psi.p) + sup
    series = psi._derive(coeffs, tail)
    f = psi.truncate(N) if N < psi.N else psi
    basis = tuple(a if n % 2 == 0 else -a for n, a in enumerate(f.coeffs))
    return TransformImage(series, basis, f.tail_valuation)


def diamond(Phi: TransformImage, Psi: TransformImage) -> TransformImage:
    """Binomial convolution of the basis coefficients."""
    ctx = Phi.ctx
    if Psi.ctx != ctx:
        raise ContextMismatch(f"{Psi.ctx} != {ctx}")
    N = min(len(Phi.basis), len(Psi.basis))
    # reuse the star machinery on the basis sequences
    a = MahlerSeries(ctx, Phi.basis, Phi.basis_tail).truncate(N)
    b = MahlerSeries(ctx, Psi.basis, Psi.basis_tail).truncate(N)
    # the basis product is known past N; keep it so the Mahler side stays sharp
    d = star(a, b, length=max(2 * N - 1, 1))
    series = mahler_from_basis(d.coeffs, d.tail_valuation, ctx, N)
    return TransformImage(series, d.coeffs, d.tail_valuation)


# ----------------------------------------------------------------------
# generating functions


def egf_ogf_export(f: MahlerSeries, N: int | None = None):
    """(E_f, H_f): E_f has coefficients f(n)/n!, each losing v_p(n!) digits."""
    N = f.N if N is None else N
    E = tuple(f.eval(n) / math.factorial(n) for n in range(N))
    return BoundedPowerSeries(f.ctx, E, None), h_series(f, N)
