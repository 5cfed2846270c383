"""Fixed absolute-precision arithmetic in Q_p.

A :class:`PadicScalar` is ``p**valuation * unit`` known modulo
``p**precision``.  Three states exist:

* nonzero: ``valuation < precision`` and ``unit`` is coprime to p,
* inexact zero: ``valuation == precision`` and ``unit == 0`` (the value is
  only known to be divisible by ``p**precision``),
* exact zero: ``valuation == precision == INF``.

Python ``int`` and ``Fraction`` operands are treated as exact, so
``n * x`` or ``x / n`` only move the absolute precision by ``v_p(n)``.
Between two scalars, every ring operation returns a precision no larger
than the precision of either input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

INF = math.inf

__all__ = [
    "INF",
    "PadicError",
    "PrecisionError",
    "DomainError",
    "ContextMismatch",
    "PrimeContext",
    "PadicScalar",
    "is_prime",
    "valuation",
    "factorial_valuation",
    "digit_loss",
    "default_terms",
    "parse_rational",
    "binomial_exact",
    "binomial_row",
    "binom",
    "exp_padic",
    "pow_one_unit",
]


class PadicError(ArithmeticError):
    """Base class for errors raised by this package."""


class PrecisionError(PadicError):
    """Not enough known digits to produce a certified answer."""


class DomainError(PadicError, ValueError):
    """Argument outside the domain of the operation."""


class ContextMismatch(PadicError, ValueError):
    """Operands live in different prime contexts."""


_POW_CACHE: dict[tuple[int, int], int] = {}


def _ppow(p: int, k: int) -> int:
    key = (p, k)
    r = _POW_CACHE.get(key)
    if r is None:
        r = p**k
        if k < 4096:
            _POW_CACHE[key] = r
    return r


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _int_valuation(n: int, p: int) -> int:
    if n == 0:
        return INF
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def valuation(x, p: int):
    """p-adic valuation of an exact int or Fraction (INF for zero)."""
    if isinstance(x, PadicScalar):
        return x.valuation
    x = Fraction(x)
    if x == 0:
        return INF
    return _int_valuation(x.numerator, p) - _int_valuation(x.denominator, p)


def factorial_valuation(n: int, p: int) -> int:
    """Legendre's formula for v_p(n!)."""
    s, q = 0, p
    while q <= n:
        s += n // q
        q *= p
    return s


def digit_loss(n: int, p: int) -> int:
    """floor(log_p n) for n >= 1, else 0.

    C(x, n) mod p**(k - digit_loss(n)) is determined by x mod p**k.
    """
    loss, q = 0, p
    while q <= n:
        loss += 1
        q *= p
    return loss


def default_terms(p: int, precision: int, guard: int = 5) -> int:
    """Smallest N with v_p(N!) >= precision + guard."""
    target = precision + guard
    n = max(1, (target - 1) * (p - 1))
    while factorial_valuation(n, p) >= target and n > 1:
        n -= 1
    while factorial_valuation(n, p) < target:
        n += 1
    return n


def parse_rational(text) -> Fraction:
    """Parse ``"a/b"``, ``"-3"`` or a number into an exact Fraction."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    text = str(text).strip()
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"not a rational number: {text!r}") from exc


@dataclass(frozen=True)
class PrimeContext:
    """A prime p together with the working absolute precision P."""

    p: int
    precision: int

    def __post_init__(self):
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise DomainError(f"p must be prime, got {self.p!r}")
        if not isinstance(self.precision, int) or self.precision < 1:
            raise DomainError(f"precision must be >= 1, got {self.precision!r}")

    @property
    def p_tilde(self) -> int:
        return 4 if self.p == 2 else self.p

    @property
    def modulus(self) -> int:
        return _ppow(self.p, self.precision)

    def __call__(self, value, precision=None) -> "PadicScalar":
        """Coerce an int, Fraction, ``"a/b"`` string or scalar into this context."""
        if isinstance(value, PadicScalar):
            if value.ctx != self:
                raise ContextMismatch(f"{value.ctx} != {self}")
            return value
        if isinstance(value, str):
            value = parse_rational(value)
        return PadicScalar.from_rational(self, value, precision)

    def zero(self) -> "PadicScalar":
        return PadicScalar(self, INF, 0, INF)

    def one(self) -> "PadicScalar":
        return PadicScalar.from_rational(self, 1)

    def inexact_zero(self, precision: int) -> "PadicScalar":
        return PadicScalar(self, precision, 0, precision)

    def default_terms(self, guard: int = 5) -> int:
        return default_terms(self.p, self.precision, guard)


def _exact(x):
    """Return x as a Fraction if it is an exact Python rational, else None."""
    if isinstance(x, bool):
        return None
    if isinstance(x, int):
        return x
    if isinstance(x, Rational):
        return Fraction(x)
    return None


class PadicScalar:
    __slots__ = ("ctx", "valuation", "unit", "precision")

    def __init__(self, ctx: PrimeContext, valuation, unit: int, precision):
        # trusted constructor; use _normalized or from_rational otherwise
        self.ctx = ctx
        self.valuation = valuation
        self.unit = unit
        self.precision = precision

    # ------------------------------------------------------------------
    # construction

    @classmethod
    def _normalized(cls, ctx: PrimeContext, val: int, residue: int, prec) -> "PadicScalar":
        """Build ``p**val * residue`` known modulo ``p**prec``."""
        if prec == INF:
            if residue != 0:
                raise PadicError("only zero can be exact")
            return cls(ctx, INF, 0, INF)
        if val >= prec:
            return cls(ctx, prec, 0, prec)
        p = ctx.p
        residue %= _ppow(p, prec - val)
        if residue == 0:
            return cls(ctx, prec, 0, prec)
        while residue % p == 0:
            residue //= p
            val += 1
        return cls(ctx, val, residue, prec)

    @classmethod
    def from_rational(cls, ctx: PrimeContext, x, precision=None) -> "PadicScalar":
        """Embed an exact rational.

        By default the result carries ``P`` significant digits but never
        less than absolute precision ``P``.
        """
        x = Fraction(x)
        if x == 0:
            if precision is None:
                return cls(ctx, INF, 0, INF)
            return cls(ctx, precision, 0, precision)
        p = ctx.p
        num, den = x.numerator, x.denominator
        vn = _int_valuation(num, p)
        vd = _int_valuation(den, p)
        v = vn - vd
        if precision is None:
            precision = ctx.precision + max(v, 0)
        if v >= precision:
            return cls(ctx, precision, 0, precision)
        mod = _ppow(p, precision - v)
        un = num // _ppow(p, vn)
        ud = den // _ppow(p, vd)
        unit = un * pow(ud, -1, mod) % mod
        return cls(ctx, v, unit, precision)

    # ------------------------------------------------------------------
    # inspection

    @property
    def known_precision(self):
        return self.precision

    @property
    def relative_precision(self):
        if self.valuation == INF:
            return INF
        return self.precision - self.valuation

    def is_exact_zero(self) -> bool:
        return self.valuation == INF

    def is_zero(self) -> bool:
        """True if the value is zero to its known precision."""
        return self.unit == 0

    def residue(self) -> int:
        """Integer representative in [0, p**precision) (requires valuation >= 0)."""
        if self.valuation == INF:
            return 0
        if self.valuation < 0:
            raise DomainError("value is not a p-adic integer")
        return _ppow(self.ctx.p, self.valuation) * self.unit

    def lift(self) -> Fraction:
        """The rational p**valuation * unit representing this value."""
        if self.unit == 0:
            return Fraction(0)
        v = self.valuation
        p = self.ctx.p
        return Fraction(self.unit * _ppow(p, v)) if v >= 0 else Fraction(self.unit, _ppow(p, -v))

    def in_zp(self) -> bool:
        return self.valuation >= 0

    def with_precision(self, precision) -> "PadicScalar":
        """Forget digits beyond ``precision`` (never adds digits)."""
        if precision >= self.precision:
            return self
        if self.valuation >= precision:
            return PadicScalar(self.ctx, precision, 0, precision)
        mod = _ppow(self.ctx.p, precision - self.valuation)
        return PadicScalar(self.ctx, self.valuation, self.unit % mod, precision)

    def __repr__(self):
        if self.valuation == INF:
            return f"PadicScalar(0, p={self.ctx.p}, exact)"
        if self.unit == 0:
            return f"PadicScalar(O({self.ctx.p}^{self.precision}))"
        return (
            f"PadicScalar({self.ctx.p}^{self.valuation} * {self.unit}"
            f" + O({self.ctx.p}^{self.precision}))"
        )

    # ------------------------------------------------------------------
    # arithmetic

    def _coerce(self, other):
        if isinstance(other, PadicScalar):
            if other.ctx != self.ctx:
                raise ContextMismatch(f"{other.ctx} != {self.ctx}")
            return other
        x = _exact(other)
        if x is None:
            return NotImplemented
        return x

    def _add_scalar(self, other: "PadicScalar") -> "PadicScalar":
        if self.valuation == INF:
            return other
        if other.valuation == INF:
            return self
        prec = min(self.precision, other.precision)
        m = min(self.valuation, other.valuation)
        if m >= prec:
            return PadicScalar(self.ctx, prec, 0, prec)
        p = self.ctx.p
        acc = 0
        if self.unit and self.valuation < prec:
            acc += self.unit * _ppow(p, self.valuation - m)
        if other.unit and other.valuation < prec:
            acc += other.unit * _ppow(p, other.valuation - m)
        return PadicScalar._normalized(self.ctx, m, acc, prec)

    def _exact_at(self, x) -> "PadicScalar":
        # embed an exact rational with enough digits to not limit self
        prec = self.precision
        if prec == INF:
            return PadicScalar.from_rational(self.ctx, x)
        return PadicScalar.from_rational(self.ctx, x, prec)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not isinstance(other, PadicScalar):
            if other == 0:
                return self
            other = self._exact_at(other)
        return self._add_scalar(other)

    __radd__ = __add__

    def __neg__(self):
        if self.unit == 0:
            return self
        mod = _ppow(self.ctx.p, self.precision - self.valuation)
        return PadicScalar(self.ctx, self.valuation, mod - self.unit, self.precision)

    def __sub__(self, other):
        if other is self:
            # x - x is zero whatever the unknown digits of x are
            return self.ctx.zero()
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not isinstance(other, PadicScalar):
            return self + (-other)
        return self._add_scalar(-other)

    def __rsub__(self, other):
        return (-self) + other

    def _mul_exact(self, x) -> "PadicScalar":
        if x == 0:
            return self.ctx.zero()
        if self.valuation == INF:
            return self
        p = self.ctx.p
        if isinstance(x, int):
            num, den = x, 1
        else:
            num, den = x.numerator, x.denominator
        vn = _int_valuation(num, p)
        vd = _int_valuation(den, p) if den != 1 else 0
        shift = vn - vd
        val = self.valuation + shift
        prec = self.precision + shift
        if self.unit == 0:
            return PadicScalar(self.ctx, prec, 0, prec)
        rel = self.precision - self.valuation
        mod = _ppow(p, rel)
        un = num // _ppow(p, vn) if vn else num
        u = self.unit * un
        if den != 1:
            ud = den // _ppow(p, vd) if vd else den
            u *= pow(ud, -1, mod)
        return PadicScalar(self.ctx, val, u % mod, prec)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not isinstance(other, PadicScalar):
            return self._mul_exact(other)
        if self.valuation == INF or other.valuation == INF:
            return self.ctx.zero()
        val = self.valuation + other.valuation
        prec = min(
            self.valuation + other.precision,
            other.valuation + self.precision,
            self.precision,
            other.precision,
        )
        if val >= prec:
            return PadicScalar(self.ctx, prec, 0, prec)
        mod = _ppow(self.ctx.p, prec - val)
        return PadicScalar(self.ctx, val, self.unit * other.unit % mod, prec)

    __rmul__ = __mul__

    def inverse(self) -> "PadicScalar":
        if self.unit == 0:
            raise ZeroDivisionError("division by a p-adic value indistinguishable from zero")
        rel = self.precision - self.valuation
        val = -self.valuation
        prec = min(val + rel, self.precision)
        if val >= prec:
            return PadicScalar(self.ctx, prec, 0, prec)
        mod = _ppow(self.ctx.p, prec - val)
        return PadicScalar(self.ctx, val, pow(self.unit, -1, mod), prec)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not isinstance(other, PadicScalar):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self._mul_exact(1 / Fraction(other))
        if other.unit == 0:
            raise ZeroDivisionError("division by a p-adic value indistinguishable from zero")
        if self.valuation == INF:
            return self
        val = self.valuation - other.valuation
        rel = min(self.precision - self.valuation, other.precision - other.valuation)
        prec = min(val + rel, self.precision, other.precision)
        if val >= prec:
            return PadicScalar(self.ctx, prec, 0, prec)
        mod = _ppow(self.ctx.p, prec - val)
        return PadicScalar(self.ctx, val, self.unit * pow(other.unit, -1, mod) % mod, prec)

    def __rtruediv__(self, other):
        x = _exact(other)
        if x is None:
            return NotImplemented
        return self.inverse() * x

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e == 0:
            return self.ctx.one()
        if e < 0:
            return self.inverse() ** (-e)
        if self.valuation == INF:
            return self
        val = self.valuation * e
        prec = min(val + self.precision - self.valuation, self.precision)
        if val >= prec:
            return PadicScalar(self.ctx, prec, 0, prec)
        mod = _ppow(self.ctx.p, prec - val)
        return PadicScalar(self.ctx, val, pow(self.unit, e, mod), prec)

    def __eq__(self, other):
        """Congruence at the joint known precision."""
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return (self - other).is_zero()

    __hash__ = None


# ----------------------------------------------------------------------
# binomial coefficients


def binomial_exact(x, n: int):
    """C(x, n) for an exact int or Fraction x."""
    if n < 0:
        return 0
    if isinstance(x, int):
        if x >= 0:
            return math.comb(x, n)
        return (-1) ** n * math.comb(n - x - 1, n)
    x = Fraction(x)
    num = Fraction(1)
    for i in range(n):
        num *= x - i
    return num / math.factorial(n)


def binomial_row(x, count: int) -> list:
    """[C(x, 0), ..., C(x, count-1)] for exact int or Fraction x."""
    out = []
    c = 1 if isinstance(x, int) else Fraction(1)
    for n in range(count):
        if n:
            if isinstance(x, int):
                c = c * (x - n + 1) // n
            else:
                c = c * (x - n + 1) / n
        out.append(c)
    return out


def binom(x, n: int, ctx: PrimeContext | None = None) -> PadicScalar:
    """The binomial coefficient C(x, n) = (x)_n / n! as a scalar.

    For x in Z_p known to absolute precision k the result is known to
    precision ``k - digit_loss(n)``.
    """
    if n < 0:
        raise DomainError("n must be non-negative")
    if not isinstance(x, PadicScalar):
        if ctx is None:
            raise TypeError("ctx is required for exact arguments")
        return PadicScalar.from_rational(ctx, binomial_exact(_exact(x), n))
    ctx = x.ctx
    if n == 0:
        return ctx.one()
    if x.valuation >= 0:
        c = binomial_exact(x.residue(), n)
        if x.precision == INF:
            return PadicScalar.from_rational(ctx, c)
        prec = x.precision - digit_loss(n, ctx.p)
        if prec <= 0:
            raise PrecisionError(f"C(x, {n}) carries no digits at this precision")
        return PadicScalar.from_rational(ctx, c, prec)
    num = ctx.one()
    for i in range(n):
        num = num * (x - i)
    if num.is_zero() and factorial_valuation(n, ctx.p) >= num.precision:
        raise PrecisionError(f"precision exhausted dividing by {n}!")
    return num / math.factorial(n)


# ----------------------------------------------------------------------
# special functions


def exp_padic(x, ctx: PrimeContext | None = None) -> PadicScalar:
    """The p-adic exponential, defined for v_p(x) > 1/(p-1).

    The partial sum stops at the first k for which every remaining term is
    provably below the working precision (term valuations are bounded
    below by k*(v - 1/(p-1))).
    """
    if not isinstance(x, PadicScalar):
        if ctx is None:
            raise TypeError("ctx is required for exact arguments")
        x = PadicScalar.from_rational(ctx, _exact(x))
    ctx = x.ctx
    p = ctx.p
    if x.valuation == INF:
        return ctx.one()
    v = x.valuation
    # v > 1/(p-1)  <=>  v*(p-1) > 1
    if v * (p - 1) <= 1:
        raise DomainError(f"exp diverges: v_p(x) = {v} <= 1/(p-1) for p = {p}")
    target = min(ctx.precision, x.precision)
    if x.unit == 0:
        return PadicScalar.from_rational(ctx, 1, target)
    mod = _ppow(p, target)
    # every term with index >= K has valuation >= K*(v*(p-1) - 1)/(p-1) >= target
    slope = v * (p - 1) - 1
    K = -(-target * (p - 1) // slope)
    acc = 0
    upow = 1
    fact_unit = 1
    fact_val = 0
    for k in range(K):
        if k:
            upow = upow * x.unit % mod
            vk = _int_valuation(k, p)
            fact_val += vk
            fact_unit = fact_unit * (k // _ppow(p, vk)) % mod
        e = k * v - fact_val
        if e >= target:
            continue
        term = upow * pow(fact_unit, -1, mod) % mod
        acc += _ppow(p, e) * term
    return PadicScalar._normalized(ctx, 0, acc % mod, target)


def pow_one_unit(u, x, ctx: PrimeContext | None = None) -> PadicScalar:
    """u**x for a one-unit u (v_p(u - 1) >= 1) and x in Z_p.

    Computed as the Mahler series sum (u-1)**n * C(x, n), truncated once
    n * v_p(u - 1) reaches the working precision.
    """
    if ctx is None:
        for cand in (u, x):
            if isinstance(cand, PadicScalar):
                ctx = cand.ctx
                break
        else:
            raise TypeError("ctx is required for exact arguments")
    u = ctx(u)
    z = u - 1
    w = z.valuation
    if w < 1:
        raise DomainError("pow_one_unit needs v_p(u - 1) >= 1")
    target = ctx.precision
    if w == INF:
        return ctx.one()
    if isinstance(x, PadicScalar):
        if x.valuation < 0:
            raise DomainError("exponent must lie in Z_p")
        count = int(-(-target // w))
        acc = ctx.zero()
        zn = ctx.one()
        for n in range(count):
            if n:
                zn = zn * z
            acc = acc + zn * binom(x, n)
        return acc.with_precision(min(acc.precision, count * w))
    xe = _exact(x)
    if xe is None:
        raise TypeError(f"unsupported exponent {x!r}")
    if valuation(xe, ctx.p) < 0:
        raise DomainError("exponent must lie in Z_p")
    if isinstance(xe, int) and xe >= 0:
        count = min(xe + 1, int(-(-target // w)))
    else:
        count = int(-(-target // w))
    row = binomial_row(xe, count)
    acc = ctx.zero()
    zn = ctx.one()
    for n, c in enumerate(row):
        if n:
            zn = zn * z
        acc = acc + zn * c
    if isinstance(xe, int) and 0 <= xe < count:
        return acc
    return acc.with_precision(min(acc.precision, count * w))
