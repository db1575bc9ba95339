"""Certified truncated power series for the resolvent ``R(mu, A) = (I - mu*A)^-1``.

Every series here is a sum of terms whose norms are bounded by valuation data
available in closed form.  In an ultrametric space the norm of a tail is at most
the largest norm among its terms, so the truncation error is certified by the
first omitted index.  That truncation bound is folded into the absolute
precision of the returned entries, which lets later arithmetic (powers,
products) propagate it automatically through scalar precision tracking.

Truncation orders use the conservative estimate ``||A^j|| <= ||A||^j``.
"""
from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass, field

from .errors import InputError, PadicDomainError, PrecisionError, EngineFault
from .linalg import PadicMatrix, mat_add, mat_mul, mat_pow, mat_sub, scalar_mul
from .padic import INF, PadicScalar, legendre_factorial_valuation

_FAULT_INJECTION = {"truncation": False}


@contextmanager
def injected_truncation_fault():
    """Test hook: make the Neumann series silently drop its last term."""
    previous = _FAULT_INJECTION["truncation"]
    _FAULT_INJECTION["truncation"] = True
    try:
        yield
    finally:
        _FAULT_INJECTION["truncation"] = previous


def set_truncation_fault(enabled: bool) -> None:
    _FAULT_INJECTION["truncation"] = enabled


@dataclass
class SeriesResult:
    """A truncated series value with a certified bound ``||true - value|| <= p**-tail_bound_exponent``."""

    value: PadicMatrix
    truncation_order: int
    tail_bound_exponent: int | float
    converged: bool
    details: dict = field(default_factory=dict)

    @property
    def e_tail(self) -> int | float:
        return self.tail_bound_exponent


def admissible_radius(a: PadicMatrix) -> int:
    """Least valuation ``v_min`` such that ``sum mu^j A^j`` converges whenever ``v(mu) >= v_min``.

    The zero matrix admits every mu; by convention it returns 1 like any
    matrix with ``||A|| < 1``.
    """
    s = a.norm_exponent()
    if s == -INF or s < 0:
        return 1
    return s + 1


def _prepare(a: PadicMatrix, mu: PadicScalar) -> tuple[int | float, int | float]:
    """Validate ``mu`` and return ``(s, v)``: the norm exponent of A and ``v(mu)``."""
    if mu.ctx != a.ctx:
        raise InputError("mu and A belong to different p-adic contexts")
    if mu.is_zero() and not mu.is_exact_zero():
        raise InputError("mu must be an exact zero or a nonzero scalar")
    s = a.norm_exponent()
    v = mu.valuation
    if mu.is_zero() or s == -INF:
        return s, v
    v_min = admissible_radius(a)
    if v < v_min:
        raise PadicDomainError(
            f"v(mu) = {v} is below the admissible radius {v_min}: the Neumann series "
            f"is not certifiably convergent (||A|| = p^{s})"
        )
    return s, v


def _finish(
    partial: PadicMatrix, order: int, trunc_tail: int | float, target: int, strict: bool, details=None
) -> SeriesResult:
    value = partial.cap(trunc_tail)
    e_tail = value.certified_exponent()
    converged = e_tail >= target
    if strict and not converged:
        raise PrecisionError(
            f"certified exponent {e_tail} falls short of target {target} at working precision "
            f"{partial.ctx.working_precision}; achievable exponent is {e_tail}",
            achievable=e_tail,
            requested=target,
        )
    return SeriesResult(value, order, e_tail, converged, dict(details or {}, truncation_tail=trunc_tail))


def _exact(value: PadicMatrix, order: int = 0) -> SeriesResult:
    return SeriesResult(value, order, INF, True, {"truncation_tail": INF})


def _geometric_sum(x: PadicMatrix, n: int) -> PadicMatrix:
    """``sum_{j<n} x^j`` with O(log n) products (binary splitting)."""
    ident = PadicMatrix.identity(x.ctx, x.dim)
    if n == 0:
        return PadicMatrix.zeros(x.ctx, x.dim)
    total, power = ident, x  # n = 1: total = I, power = x^1
    for bit in bin(n)[3:]:
        total = mat_add(total, mat_mul(power, total))
        power = mat_mul(power, power)
        if bit == "1":
            total = mat_add(ident, mat_mul(x, total))
            power = mat_mul(power, x)
    return total


def neumann_resolvent(a: PadicMatrix, mu: PadicScalar, target: int, strict: bool = True) -> SeriesResult:
    """``R(mu, A) = sum_{j=0}^{N_t} (mu A)^j`` with ``N_t`` minimal for ``(N_t+1)(v(mu) - s) >= target``."""
    s, v = _prepare(a, mu)
    if mu.is_zero() or s == -INF:
        return _exact(PadicMatrix.identity(a.ctx, a.dim))
    d = v - s
    order = max(0, math.ceil(target / d) - 1)
    trunc_tail = (order + 1) * d
    x = scalar_mul(mu, a)
    terms = order if _FAULT_INJECTION["truncation"] and order > 0 else order + 1
    partial = _geometric_sum(x, terms)
    return _finish(partial, order, trunc_tail, target, strict)


def falling_factorial(j: int, m: int) -> int:
    """``j (j-1) ... (j-m+1)`` as an exact integer."""
    return math.perm(j, m)


def resolvent_derivative(
    a: PadicMatrix, mu: PadicScalar, m: int, target: int, strict: bool = True
) -> SeriesResult:
    """m-th derivative in mu: ``sum_{j>=m} j(j-1)...(j-m+1) mu^(j-m) A^j``.

    Term ``j`` has valuation at least ``v_p(m!) + j(v - s) - m v``, which bounds the tail.
    """
    if not isinstance(m, int) or m < 1:
        raise InputError("derivative order m must be a positive integer")
    s, v = _prepare(a, mu)
    ctx = a.ctx
    if s == -INF:
        return _exact(PadicMatrix.zeros(ctx, a.dim))
    power = mat_pow(a, m)
    if mu.is_zero():
        value = scalar_mul(ctx.scalar(math.factorial(m)), power)
        return _finish(value, m, INF, target, strict)
    lf = legendre_factorial_valuation(m, ctx.prime)
    d = v - s
    order = max(m, math.ceil((target + m * v - lf) / d) - 1)
    trunc_tail = lf + (order + 1) * d - m * v
    total = scalar_mul(ctx.scalar(math.factorial(m)), power)
    mu_power = ctx.one()
    for j in range(m + 1, order + 1):
        power = mat_mul(power, a)
        mu_power = mu_power * mu
        coeff = ctx.scalar(falling_factorial(j, m)) * mu_power
        total = mat_add(total, scalar_mul(coeff, power))
    return _finish(total, order, trunc_tail, target, strict, {"legendre_valuation": lf})


def rminusi_power_series(
    a: PadicMatrix, mu: PadicScalar, m: int, target: int, strict: bool = True
) -> SeriesResult:
    """``(R(mu, A) - I)^(m+1) = sum_{j>=m} C(j, m) (mu A)^(j+1)``."""
    if not isinstance(m, int) or m < 0:
        raise InputError("m must be a nonnegative integer")
    s, v = _prepare(a, mu)
    ctx = a.ctx
    if mu.is_zero() or s == -INF:
        return _exact(PadicMatrix.zeros(ctx, a.dim))
    d = v - s
    order = max(m, math.ceil(target / d) - 2)
    trunc_tail = (order + 2) * d
    x = scalar_mul(mu, a)
    power = mat_pow(x, m + 1)
    total = power
    for j in range(m + 1, order + 1):
        power = mat_mul(power, x)
        total = mat_add(total, scalar_mul(ctx.scalar(math.comb(j, m)), power))
    return _finish(total, order, trunc_tail, target, strict)


def s_operator(a: PadicMatrix, mu: PadicScalar, k: int, target: int, strict: bool = True) -> SeriesResult:
    """``S_k(mu) = (A R(mu, A))^(k+1)``, cross-checked against ``mu^-(k+1) (R - I)^(k+1)``.

    The division-free form is returned.  For nonzero mu the second form is
    evaluated through the binomial series and both must agree to the smaller of
    their certified exponents, otherwise :class:`EngineFault` is raised.
    """
    if not isinstance(k, int) or k < 0:
        raise InputError("k must be a nonnegative integer")
    s, v = _prepare(a, mu)
    ctx = a.ctx
    if s == -INF:
        return _exact(PadicMatrix.zeros(ctx, a.dim))
    if mu.is_zero():
        return _finish(mat_pow(a, k + 1), 0, INF, target, strict)
    # error in R is amplified by at most ||A||^(k+1) on the way to (A R)^(k+1)
    resolvent = neumann_resolvent(a, mu, target + max(0, (k + 1) * s), strict=False)
    value = mat_pow(mat_mul(a, resolvent.value), k + 1)
    binomial = rminusi_power_series(a, mu, k, target + (k + 1) * v, strict=False)
    alternate = scalar_mul(mu ** (-(k + 1)), binomial.value)
    if not value.agrees_with(alternate):
        raise EngineFault(
            f"S_{k}: (A R)^(k+1) and mu^-(k+1) (R - I)^(k+1) disagree at certified precision"
        )
    details = {
        "alternate_certified_exponent": alternate.certified_exponent(),
        "resolvent_truncation_order": resolvent.truncation_order,
        "binomial_truncation_order": binomial.truncation_order,
    }
    return _finish(value, resolvent.truncation_order, INF, target, strict, details)


def resolvent_minus_identity(a: PadicMatrix, mu: PadicScalar, target: int, strict: bool = True):
    """``R(mu, A) - I`` together with the series result it came from."""
    res = neumann_resolvent(a, mu, target, strict=strict)
    return mat_sub(res.value, PadicMatrix.identity(a.ctx, a.dim)), res
