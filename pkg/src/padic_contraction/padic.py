"""Finite-precision p-adic scalars over Q_p and valuation combinatorics.

A nonzero scalar is stored as ``p**valuation * unit`` where ``unit`` is known
modulo ``p**certified_digits``.  The true value ``x`` therefore satisfies

    x == p**valuation * unit   (mod p**(valuation + certified_digits))

and its valuation is exact (``certified_digits >= 1`` for every nonzero value).
The quantity ``valuation + certified_digits`` is the *absolute precision*.

Zero is stored with ``valuation = inf`` and no unit.  A zero produced by
cancellation still carries a finite absolute precision: it is only known to be
divisible by ``p**absprec``.  Zeros built directly from the rational 0 are exact
(``absprec = inf``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .errors import InputError

INF = math.inf


def is_prime(n: int) -> bool:
    """Deterministic trial-division primality test (primes here are small)."""
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


def vp_int(n: int, p: int) -> int | float:
    """Exponent of ``p`` in the integer ``n``; ``inf`` for zero."""
    if n == 0:
        return INF
    n = abs(n)
    if n % p:
        return 0
    # square up then descend so large powers of p cost O(log v) divisions
    v = 0
    blocks = [(p, 1)]
    while n % blocks[-1][0] == 0:
        block, size = blocks[-1]
        n //= block
        v += size
        blocks.append((block * block, size * 2))
    for block, size in reversed(blocks):
        if n % block == 0:
            n //= block
            v += size
    return v


@dataclass(frozen=True)
class PadicContext:
    """The prime and the number of significant base-p digits carried by units."""

    prime: int
    working_precision: int
    modulus: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not isinstance(self.prime, int) or not is_prime(self.prime):
            raise InputError(f"prime must be a prime integer, got {self.prime!r}")
        if not isinstance(self.working_precision, int) or self.working_precision < 1:
            raise InputError(
                f"working_precision must be a positive integer, got {self.working_precision!r}"
            )
        object.__setattr__(self, "modulus", self.prime**self.working_precision)

    def ppow(self, e: int) -> int:
        return _ppow(self.prime, e)

    def scalar(self, value) -> PadicScalar:
        """Coerce an int, Fraction, ``"num/den"`` string or scalar into this context."""
        if isinstance(value, PadicScalar):
            if value.ctx != self:
                raise InputError("scalar belongs to a different context")
            return value
        if isinstance(value, str):
            value = parse_rational(value)
        q = Fraction(value)
        return from_rational(q.numerator, q.denominator, self)

    def zero(self) -> PadicScalar:
        return PadicScalar._zero(self, INF)

    def one(self) -> PadicScalar:
        return PadicScalar._make(self, 0, 1, self.working_precision)

    def p_power(self, v: int) -> PadicScalar:
        """The scalar ``p**v`` (used as the representative of valuation ``v``)."""
        return PadicScalar._make(self, v, 1, self.working_precision)


@lru_cache(maxsize=4096)
def _ppow(p: int, e: int) -> int:
    return p**e


def parse_rational(text: str) -> Fraction:
    """Parse ``"num/den"`` (or a bare integer) into an exact fraction."""
    s = text.strip()
    if "/" in s:
        num_s, den_s = s.split("/", 1)
        try:
            num, den = int(num_s), int(den_s)
        except ValueError:
            raise InputError(f"malformed rational {text!r}") from None
        if den == 0:
            raise InputError(f"zero denominator in {text!r}")
        return Fraction(num, den)
    try:
        return Fraction(int(s))
    except ValueError:
        raise InputError(f"malformed rational {text!r}") from None


def format_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


class PadicScalar:
    """Immutable p-adic number with relative-precision bookkeeping."""

    __slots__ = ("ctx", "valuation", "unit", "certified_digits", "absprec")

    ctx: PadicContext
    valuation: int | float
    unit: int | None
    certified_digits: int
    absprec: int | float

    @classmethod
    def _make(cls, ctx: PadicContext, v: int, unit: int, c: int) -> PadicScalar:
        obj = object.__new__(cls)
        obj.ctx = ctx
        obj.valuation = v
        obj.unit = unit
        obj.certified_digits = c
        obj.absprec = v + c
        return obj

    @classmethod
    def _zero(cls, ctx: PadicContext, absprec: int | float) -> PadicScalar:
        obj = object.__new__(cls)
        obj.ctx = ctx
        obj.valuation = INF
        obj.unit = None
        obj.certified_digits = 0
        obj.absprec = absprec
        return obj

    # -- predicates -------------------------------------------------------

    def is_zero(self) -> bool:
        return self.unit is None

    def is_exact_zero(self) -> bool:
        return self.unit is None and self.absprec == INF

    def norm_exponent(self) -> int | float:
        """``e`` with ``|x| = p**e``; ``-inf`` for zero."""
        return -self.valuation

    def norm(self) -> Fraction:
        if self.unit is None:
            return Fraction(0)
        return Fraction(self.ctx.prime) ** (-self.valuation)

    # -- conversions ------------------------------------------------------

    def to_fraction(self) -> Fraction:
        """The exact rational value of the stored representative."""
        if self.unit is None:
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.ctx.prime) ** self.valuation

    def cap(self, absprec: int | float) -> PadicScalar:
        """Forget every digit at or beyond ``p**absprec``."""
        if absprec >= self.absprec:
            return self
        if self.unit is None or self.valuation >= absprec:
            return PadicScalar._zero(self.ctx, absprec)
        c = absprec - self.valuation
        return PadicScalar._make(self.ctx, self.valuation, self.unit % _ppow(self.ctx.prime, c), c)

    def agrees_with(self, other: PadicScalar) -> bool:
        """Equality to certified precision (the only equality this library offers)."""
        return sub(self, other).is_zero()

    # -- operators --------------------------------------------------------

    def __add__(self, other):
        return add(self, _coerce(self, other))

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, _coerce(self, other))

    def __rsub__(self, other):
        return sub(_coerce(self, other), self)

    def __mul__(self, other):
        if not isinstance(other, (PadicScalar, int, Fraction)):
            return NotImplemented  # lets PadicMatrix.__rmul__ take over
        return mul(self, _coerce(self, other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div(self, _coerce(self, other))

    def __rtruediv__(self, other):
        return div(_coerce(self, other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return div(self.ctx.one(), self**(-e))
        result = self.ctx.one()
        base = self
        while e:
            if e & 1:
                result = mul(result, base)
            base = mul(base, base)
            e >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, PadicScalar):
            try:
                other = _coerce(self, other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.agrees_with(other)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        if self.unit is None:
            return f"PadicScalar(0, p={self.ctx.prime}, absprec={self.absprec})"
        return (
            f"PadicScalar(p={self.ctx.prime}, valuation={self.valuation}, "
            f"unit={self.unit}, certified_digits={self.certified_digits})"
        )

    def __str__(self) -> str:
        p = self.ctx.prime
        if self.unit is None:
            return "0" if self.absprec == INF else f"O({p}^{self.absprec})"
        return f"{p}^{self.valuation} * {self.unit} ({self.certified_digits} digits)"


def _coerce(x: PadicScalar, other) -> PadicScalar:
    if isinstance(other, PadicScalar):
        return other
    if isinstance(other, (int, Fraction)):
        return x.ctx.scalar(other)
    raise TypeError(f"cannot combine PadicScalar with {type(other).__name__}")


def _check_ctx(x: PadicScalar, y: PadicScalar) -> None:
    if x.ctx is not y.ctx and x.ctx != y.ctx:
        raise InputError("operands belong to different p-adic contexts")


def from_rational(num: int, den: int, ctx: PadicContext) -> PadicScalar:
    """Canonical p-adic expansion of ``num/den`` with all N digits certified."""
    if den == 0:
        raise InputError("zero denominator")
    if num == 0:
        return PadicScalar._zero(ctx, INF)
    p = ctx.prime
    q = Fraction(num, den)
    num, den = q.numerator, q.denominator
    vn = vp_int(num, p)
    vd = vp_int(den, p)
    num //= _ppow(p, vn)
    den //= _ppow(p, vd)
    mod = ctx.modulus
    unit = num * pow(den, -1, mod) % mod
    return PadicScalar._make(ctx, vn - vd, unit, ctx.working_precision)


def add(x: PadicScalar, y: PadicScalar) -> PadicScalar:
    _check_ctx(x, y)
    if x.unit is None:
        return y.cap(x.absprec)
    if y.unit is None:
        return x.cap(y.absprec)
    ctx = x.ctx
    p = ctx.prime
    vx, vy = x.valuation, y.valuation
    a = x.absprec if x.absprec < y.absprec else y.absprec
    if vx <= vy:
        v = vx
        s = x.unit + y.unit * _ppow(p, vy - vx) if vy - vx < a - v else x.unit
    else:
        v = vy
        s = y.unit + x.unit * _ppow(p, vx - vy) if vx - vy < a - v else y.unit
    m = a - v
    s %= _ppow(p, m)
    if s == 0:
        return PadicScalar._zero(ctx, a)
    if s % p:
        return PadicScalar._make(ctx, v, s, m)
    w = vp_int(s, p)
    return PadicScalar._make(ctx, v + w, s // _ppow(p, w), m - w)


def neg(x: PadicScalar) -> PadicScalar:
    if x.unit is None:
        return x
    c = x.certified_digits
    return PadicScalar._make(x.ctx, x.valuation, (-x.unit) % _ppow(x.ctx.prime, c), c)


def sub(x: PadicScalar, y: PadicScalar) -> PadicScalar:
    return add(x, neg(y))


def mul(x: PadicScalar, y: PadicScalar) -> PadicScalar:
    _check_ctx(x, y)
    if x.unit is None:
        if y.unit is None:
            return PadicScalar._zero(x.ctx, x.absprec + y.absprec)
        return PadicScalar._zero(x.ctx, x.absprec + y.valuation)
    if y.unit is None:
        return PadicScalar._zero(x.ctx, y.absprec + x.valuation)
    c = x.certified_digits if x.certified_digits < y.certified_digits else y.certified_digits
    return PadicScalar._make(
        x.ctx, x.valuation + y.valuation, x.unit * y.unit % _ppow(x.ctx.prime, c), c
    )


def div(x: PadicScalar, y: PadicScalar) -> PadicScalar:
    _check_ctx(x, y)
    if y.unit is None:
        raise ZeroDivisionError("p-adic division by zero")
    if x.unit is None:
        return PadicScalar._zero(x.ctx, x.absprec - y.valuation)
    c = x.certified_digits if x.certified_digits < y.certified_digits else y.certified_digits
    mod = _ppow(x.ctx.prime, c)
    return PadicScalar._make(
        x.ctx, x.valuation - y.valuation, x.unit * pow(y.unit, -1, mod) % mod, c
    )


# -- valuation combinatorics ----------------------------------------------


def digit_sum(n: int, p: int) -> int:
    s = 0
    while n:
        n, r = divmod(n, p)
        s += r
    return s


def legendre_factorial_valuation(m: int, p: int) -> int:
    """``v_p(m!)`` by Legendre's formula, cross-checked against the digit-sum form."""
    if m < 0:
        raise InputError("m must be nonnegative")
    total, q = 0, p
    while q <= m:
        total += m // q
        q *= p
    via_digits, rem = divmod(m - digit_sum(m, p), p - 1)
    assert rem == 0 and via_digits == total, (m, p, total, via_digits)
    return total


def kummer_binomial_valuation(j: int, m: int, p: int) -> int:
    """``v_p(C(j, m))`` as the number of carries when adding ``m`` and ``j - m`` in base p."""
    if m < 0 or m > j:
        raise InputError(f"need 0 <= m <= j, got j={j}, m={m}")
    a, b = m, j - m
    carries = carry = 0
    while a or b or carry:
        carry = 1 if (a % p) + (b % p) + carry >= p else 0
        carries += carry
        a //= p
        b //= p
    expected = (
        legendre_factorial_valuation(j, p)
        - legendre_factorial_valuation(m, p)
        - legendre_factorial_valuation(j - m, p)
    )
    assert carries == expected, (j, m, p, carries, expected)
    return carries
