"""Residual checks for the algebraic identities satisfied by the resolvent.

Each check evaluates both sides through different engine routes and measures
the exact norm of their difference on the stored representatives.  The
tolerance is exactly the combined certificate ``p**-cert`` of the two sides.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .linalg import PadicMatrix, mat_mul, mat_pow, mat_sub, scalar_mul
from .oracle import RationalMatrix, rational_valuation
from .padic import INF, PadicScalar, legendre_factorial_valuation
from .resolvent import neumann_resolvent, resolvent_derivative, rminusi_power_series, s_operator

IDENTITY_NAMES = (
    "resolvent_residual",
    "power_recursion",
    "derivative_cleared",
    "derivative_divided",
    "binomial_series",
    "s_forms",
    "factorization",
)


@dataclass(frozen=True)
class IdentityResidual:
    name: str
    index: int
    residual_exponent: int | float
    certificate: int | float

    @property
    def ok(self) -> bool:
        return self.residual_exponent <= -self.certificate

    def to_dict(self) -> dict:
        from .io import encode_exponent

        return {
            "identity": self.name,
            "index": self.index,
            "residual_exponent": encode_exponent(self.residual_exponent),
            "certificate": encode_exponent(self.certificate),
            "ok": self.ok,
        }


def _residual(name: str, index: int, lhs: PadicMatrix, rhs: PadicMatrix, cert=None) -> IdentityResidual:
    p = lhs.ctx.prime
    worst = INF
    for x, y in zip(lhs.entries(), rhs.entries()):
        worst = min(worst, rational_valuation(x.to_fraction() - y.to_fraction(), p))
    if cert is None:
        cert = min(lhs.certified_exponent(), rhs.certified_exponent())
    return IdentityResidual(name, index, -worst, cert)


def verify_identities(
    a: PadicMatrix, mu: PadicScalar, m_max: int, k_max: int, target: int
) -> list[IdentityResidual]:
    """Run every identity check for ``m <= m_max`` and ``k <= k_max``."""
    ctx = a.ctx
    n = a.dim
    ident = PadicMatrix.identity(ctx, n)
    s = a.norm_exponent()
    v = mu.valuation
    top = max(m_max, k_max) + 1
    # headroom so that divisions by mu^(k+1) and powers still meet the target
    extra = 0 if mu.is_zero() or s == -INF else top * v + max(0, top * s)
    res = neumann_resolvent(a, mu, target + extra, strict=False)
    r = res.value
    out: list[IdentityResidual] = []

    a_exact = RationalMatrix(a.to_fractions())
    shift_exact = RationalMatrix.identity(n) - mu.to_fraction() * a_exact
    residual = shift_exact @ RationalMatrix(r.to_fractions()) - RationalMatrix.identity(n)
    out.append(
        IdentityResidual(
            "resolvent_residual",
            0,
            residual.norm_exponent(ctx.prime),
            min(res.tail_bound_exponent, a.certified_exponent()),
        )
    )

    diff = mat_sub(r, ident)
    mu_a = scalar_mul(mu, a)
    diff_powers = [ident, diff]
    for _ in range(top):
        diff_powers.append(mat_mul(diff_powers[-1], diff))

    for m in range(m_max + 1):
        lhs = diff_powers[m + 1]
        out.append(_residual("power_recursion", m, lhs, mat_mul(mat_mul(mu_a, diff_powers[m]), r)))
        deriv = r if m == 0 else resolvent_derivative(a, mu, m, target + extra, strict=False).value
        rhs = scalar_mul(mu ** (m + 1), mat_mul(a, deriv))
        fact = ctx.scalar(math.factorial(m))
        out.append(_residual("derivative_cleared", m, scalar_mul(fact, lhs), rhs))
        divided = scalar_mul(ctx.one() / fact, rhs)
        lf = legendre_factorial_valuation(m, ctx.prime)
        # dividing by m! costs exactly v_p(m!) digits of absolute precision
        assert divided.certified_exponent() >= rhs.certified_exponent() - lf
        out.append(_residual("derivative_divided", m, lhs, divided))
        series = rminusi_power_series(a, mu, m, target, strict=False)
        out.append(_residual("binomial_series", m, series.value, lhs))

    a_powers = [ident]
    for _ in range(k_max + 1):
        a_powers.append(mat_mul(a_powers[-1], a))
    for k in range(k_max + 1):
        s_k = s_operator(a, mu, k, target, strict=False).value
        if not mu.is_zero():
            alt = scalar_mul(mu ** (-(k + 1)), diff_powers[k + 1])
            out.append(_residual("s_forms", k, s_k, alt))
        shift_pow = mat_pow(mat_sub(ident, mu_a), k + 1)
        out.append(_residual("factorization", k, a_powers[k + 1], mat_mul(shift_pow, s_k)))
    return out


def summarize(residuals: list[IdentityResidual]) -> dict[str, dict]:
    """Per-identity worst residual exponent, smallest certificate, and pass flag."""
    summary: dict[str, dict] = {}
    for r in residuals:
        entry = summary.setdefault(r.name, {"max_residual_exponent": -INF, "min_certificate": INF, "ok": True, "count": 0})
        entry["max_residual_exponent"] = max(entry["max_residual_exponent"], r.residual_exponent)
        entry["min_certificate"] = min(entry["min_certificate"], r.certificate)
        entry["ok"] = entry["ok"] and r.ok
        entry["count"] += 1
    return summary

