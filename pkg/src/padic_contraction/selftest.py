"""Seeded invariant suites behind the ``selftest`` command."""
from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .corpus import contractive_corpus, noncontractive_corpus, random_unit
from .criterion import (
    biconditional_check,
    default_mu_valuations,
    recommended_precision,
    violation_witness,
)
from .errors import PrecisionError
from .identities import verify_identities
from .oracle import crosscheck, exact_resolvent, exact_resolvent_derivative
from .padic import (
    PadicContext,
    from_rational,
    kummer_binomial_valuation,
    legendre_factorial_valuation,
    vp_int,
)
from .resolvent import admissible_radius, neumann_resolvent, resolvent_derivative

log = logging.getLogger(__name__)

PRIMES = (2, 3, 5, 7)


@dataclass
class SuiteResult:
    name: str
    passed: int = 0
    failed: int = 0
    precision_errors: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failed == 0 and self.precision_errors == 0

    def line(self) -> str:
        status = "ok" if self.ok else "FAIL"
        text = f"{self.name}: {self.passed} passed, {self.failed} failed"
        if self.precision_errors:
            text += f", {self.precision_errors} precision errors"
        return f"[{status}] {text}"


def random_scalar_fraction(rng: random.Random, p: int, v_lo: int = -6, v_hi: int = 6) -> Fraction:
    """A random rational ``p^v * a / b`` with ``a, b`` prime to p."""
    a = random_unit(rng, p, 6) * rng.choice((1, -1))
    b = random_unit(rng, p, 4)
    return Fraction(p) ** rng.randint(v_lo, v_hi) * Fraction(a, b)


def ultrametric_suite(seed: int, pairs: int, precision: int = 24) -> SuiteResult:
    """Isoceles equality, ultrametric inequality and multiplicativity on random pairs."""
    result = SuiteResult("ultrametric axioms")
    rng = random.Random(seed)
    for p in PRIMES:
        ctx = PadicContext(p, precision)
        for _ in range(pairs):
            qx, qy = random_scalar_fraction(rng, p), random_scalar_fraction(rng, p)
            x = from_rational(qx.numerator, qx.denominator, ctx)
            y = from_rational(qy.numerator, qy.denominator, ctx)
            total, prod = x + y, x * y
            ok = prod.valuation == x.valuation + y.valuation
            if x.valuation != y.valuation:
                ok &= total.valuation == min(x.valuation, y.valuation)
            else:
                ok &= total.valuation >= x.valuation
            if ok:
                result.passed += 1
            else:
                result.failed += 1
    return result


def valuation_suite(limit: int = 200) -> SuiteResult:
    """Exhaustive Legendre / Kummer agreement with direct factorization, ``0 <= m <= j <= limit``."""
    result = SuiteResult("legendre/kummer")
    for p in PRIMES:
        for j in range(limit + 1):
            ok_fact = legendre_factorial_valuation(j, p) == vp_int(math.factorial(j), p)
            result.passed += ok_fact
            result.failed += not ok_fact
            for m in range(j + 1):
                try:
                    ok = kummer_binomial_valuation(j, m, p) == vp_int(math.comb(j, m), p)
                except AssertionError:
                    ok = False
                result.passed += ok
                result.failed += not ok
    return result


def oracle_suite(seed: int, count: int, target: int, precision: int, max_dim: int = 3) -> SuiteResult:
    """Engine-oracle equivalence for the resolvent and its first derivatives."""
    result = SuiteResult("engine/oracle equivalence")
    docs = contractive_corpus(seed, count // 2 + count % 2, dims=tuple(range(1, max_dim + 1)))
    docs += noncontractive_corpus(seed + 1, count // 2, dims=tuple(range(1, max_dim + 1)))
    rng = random.Random(seed)
    for doc in docs:
        ctx = PadicContext(doc.prime, precision)
        a = doc.to_padic(ctx)
        a_exact = doc.to_rational()
        v = admissible_radius(a) + rng.randint(0, 2)
        mu_q = Fraction(doc.prime) ** v * random_unit(rng, doc.prime, 4)
        mu = ctx.scalar(mu_q)
        try:
            checks = [crosscheck(neumann_resolvent(a, mu, target), exact_resolvent(a_exact, mu_q, doc.prime), doc.prime)]
            for m in (1, 2):
                checks.append(
                    crosscheck(
                        resolvent_derivative(a, mu, m, target),
                        exact_resolvent_derivative(a_exact, mu_q, m, doc.prime),
                        doc.prime,
                    )
                )
        except PrecisionError as exc:
            result.precision_errors += 1
            result.notes.append(f"{doc.matrix_id}: {exc}")
            continue
        for c in checks:
            if c.passed:
                result.passed += 1
            else:
                result.failed += 1
                result.notes.append(f"{doc.matrix_id}: discrepancy {c.discrepancy_exponent} vs {c.certified_exponent}")
    return result


def biconditional_suite(seed: int, count: int, K: int, M: int, target: int | None, precision: int | None) -> SuiteResult:
    """Power contraction verdict equals resolvent criterion verdict on both corpora."""
    result = SuiteResult("theorem biconditional")
    docs = contractive_corpus(seed, count) + noncontractive_corpus(seed + 1, count)
    for doc in docs:
        s = doc.norm_exponent()
        grid_top = (max(s, 0) + 1) + 5
        t = target if target is not None else 2 * K * grid_top + 8
        ctx = PadicContext(doc.prime, precision or recommended_precision(t, K, s))
        a = doc.to_padic(ctx)
        try:
            bi = biconditional_check(a, M, K, default_mu_valuations(a), t, matrix_id=doc.matrix_id)
            witness = violation_witness(a, default_mu_valuations(a), K, t) if s >= 1 else None
        except PrecisionError as exc:
            result.precision_errors += 1
            result.notes.append(f"{doc.matrix_id}: {exc}")
            continue
        ok = bi.agree and (s < 1 or (witness is not None and witness.k == 1))
        if ok:
            result.passed += 1
        else:
            result.failed += 1
            result.notes.append(f"{doc.matrix_id}: verdicts disagree")
    return result


def identity_suite(seed: int, count: int, order: int, target: int, precision: int | None) -> SuiteResult:
    result = SuiteResult("identity residuals")
    docs = contractive_corpus(seed, count, dims=(1, 2, 3))
    for doc in docs:
        s = doc.norm_exponent()
        ctx = PadicContext(doc.prime, precision or recommended_precision(target, order, s))
        a = doc.to_padic(ctx)
        mu = ctx.p_power(admissible_radius(a))
        try:
            residuals = verify_identities(a, mu, order, order, target)
        except PrecisionError as exc:
            result.precision_errors += 1
            result.notes.append(f"{doc.matrix_id}: {exc}")
            continue
        weak = min(r.certificate for r in residuals)
        if weak < target:
            result.precision_errors += 1
            result.notes.append(f"{doc.matrix_id}: certificate {weak} below target {target}")
            continue
        bad = [r for r in residuals if not r.ok]
        result.passed += len(residuals) - len(bad)
        result.failed += len(bad)
    return result


def run_selftest(
    seed: int = 1,
    target: int | None = None,
    precision: int | None = None,
    K: int = 12,
    M: int = 24,
    scalar_pairs: int = 2000,
    corpus_size: int = 20,
) -> list[SuiteResult]:
    oracle_target = target if target is not None else 30
    suites = [
        ultrametric_suite(seed, scalar_pairs),
        valuation_suite(),
        oracle_suite(seed, corpus_size, oracle_target, precision or oracle_target + 40),
        biconditional_suite(seed, corpus_size, K, M, target, precision),
        identity_suite(seed, max(corpus_size // 4, 1), 4, oracle_target, precision),
    ]
    for s in suites:
        log.info(s.line())
    return suites
