"""Machine verification of the power-contraction / resolvent-bound equivalence.

For a matrix A over Q_p the statements

    ||A^m|| <= 1 for every m >= 1
    ||(R(mu, A) - I)^k|| <= |mu|^k for every admissible mu and k >= 1

are checked as exact comparisons of valuations on a finite grid of
representatives ``mu = p**v``.  Records are always assembled in ``(k, v)``
order so reports are independent of scheduling.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import EngineFault, InputError, PadicDomainError, PrecisionError, PremiseError
from .linalg import (
    PadicMatrix,
    PowerContractionReport,
    mat_add,
    mat_mul,
    mat_pow,
    mat_sub,
    power_contraction_check,
    scalar_mul,
)
from .padic import INF, kummer_binomial_valuation
from .resolvent import (
    admissible_radius,
    neumann_resolvent,
    rminusi_power_series,
    s_operator,
)

DEFAULT_K = 12
DEFAULT_M = 24
GRID_WIDTH = 6


def default_mu_valuations(a: PadicMatrix) -> list[int]:
    v_min = admissible_radius(a)
    return list(range(v_min, v_min + GRID_WIDTH))


def default_target(K: int, mu_valuations: Sequence[int]) -> int:
    return 2 * K * max(mu_valuations) + 8


def recommended_precision(target: int, K: int, s: int | float) -> int:
    """Working precision leaving headroom above ``target`` for powers up to ``K`` of a matrix with norm ``p^s``."""
    s = 0 if s == -INF else max(int(s), 0)
    return target + (K + 2) * (s + 1) + 16


def exponent_bounds(m: PadicMatrix) -> tuple[int | float, int | float]:
    """Certified ``(lower, upper)`` bounds on the norm exponent of the true matrix."""
    w = m.min_valuation()
    cert = m.certified_exponent()
    if w < cert:
        return -w, -w
    return -INF, -cert


def _decide(w: int | float, cert: int | float, bound: int) -> tuple[bool, bool]:
    """Decide ``true min valuation >= bound``; returns ``(decided, holds)``."""
    if w < cert:
        return True, w >= bound
    if cert >= bound:
        return True, True
    return False, False


@dataclass(frozen=True)
class CriterionRecord:
    k: int
    mu_valuation: int
    lhs_exponent: int | float
    rhs_exponent: int
    passed: bool
    certified_exponent: int | float = INF
    decided: bool = True

    def to_dict(self) -> dict:
        from .io import encode_exponent

        return {
            "k": self.k,
            "mu_valuation": self.mu_valuation,
            "lhs_exponent": encode_exponent(self.lhs_exponent),
            "rhs_exponent": self.rhs_exponent,
            "pass": self.passed,
            "certified_exponent": encode_exponent(self.certified_exponent),
            "decided": self.decided,
        }


@dataclass
class CriterionReport:
    """Per-(k, v(mu)) records of ``||(R - I)^k||`` against ``|mu|^k``."""

    matrix_id: str
    prime: int
    dim: int
    records: list[CriterionRecord]
    verdict: bool
    witnesses: list[tuple[int, int]]
    engine_metadata: dict = field(default_factory=dict)
    undecided: list[tuple[int, int]] = field(default_factory=list)

    def record(self, k: int, v: int) -> CriterionRecord:
        for r in self.records:
            if r.k == k and r.mu_valuation == v:
                return r
        raise KeyError((k, v))

    def to_dict(self) -> dict:
        return {
            "matrix_id": self.matrix_id,
            "prime": self.prime,
            "dim": self.dim,
            "records": [r.to_dict() for r in self.records],
            "verdict": self.verdict,
            "witnesses": [list(w) for w in self.witnesses],
            "undecided": [list(u) for u in self.undecided],
            "engine_metadata": self.engine_metadata,
        }


def _records_for_valuation(a: PadicMatrix, v: int, K: int, target: int):
    from .io import encode_exponent

    mu = a.ctx.p_power(v)
    res = neumann_resolvent(a, mu, target, strict=False)
    diff = mat_sub(res.value, PadicMatrix.identity(a.ctx, a.dim))
    records = []
    power = diff
    for k in range(1, K + 1):
        if k > 1:
            power = mat_mul(power, diff)
        w = power.min_valuation()
        cert = power.certified_exponent()
        decided, holds = _decide(w, cert, k * v)
        records.append(CriterionRecord(k, v, -w, -k * v, holds, cert, decided))
    meta = {
        "truncation_order": res.truncation_order,
        "certified_exponent": encode_exponent(res.tail_bound_exponent),
        "converged": res.converged,
    }
    return v, records, meta


def resolvent_contraction_check(
    a: PadicMatrix,
    mu_valuations: Iterable[int] | None = None,
    K: int = DEFAULT_K,
    target: int | None = None,
    matrix_id: str = "",
    jobs: int = 1,
    strict: bool = True,
) -> CriterionReport:
    """Check ``||(R(mu, A) - I)^k|| <= |mu|^k`` for ``k = 1..K`` and ``mu = p**v`` on the grid.

    A record is undecided when the certified precision of ``(R - I)^k`` does
    not reach ``k v`` and the computed value shows no entry below that level.
    With ``strict`` any undecided record raises :class:`PrecisionError`
    carrying the full report.
    """
    if not isinstance(K, int) or K < 1:
        raise InputError("K must be a positive integer")
    grid = sorted(set(default_mu_valuations(a) if mu_valuations is None else mu_valuations))
    if not grid:
        raise InputError("mu valuation grid is empty")
    v_min = admissible_radius(a)
    low = [v for v in grid if v < v_min]
    if low:
        raise PadicDomainError(f"mu valuations {low} are below the admissible radius {v_min}")
    if target is None:
        target = default_target(K, grid)

    if jobs > 1 and len(grid) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_records_for_valuation, [a] * len(grid), grid, [K] * len(grid), [target] * len(grid)))
    else:
        chunks = [_records_for_valuation(a, v, K, target) for v in grid]

    records = sorted((r for _, recs, _ in chunks for r in recs), key=lambda r: (r.k, r.mu_valuation))
    witnesses = [(r.k, r.mu_valuation) for r in records if r.decided and not r.passed]
    undecided = [(r.k, r.mu_valuation) for r in records if not r.decided]
    metadata = {
        "target": target,
        "working_precision": a.ctx.working_precision,
        "admissible_radius": v_min,
        "per_mu_valuation": {str(v): meta for v, _, meta in chunks},
    }
    report = CriterionReport(
        matrix_id=matrix_id,
        prime=a.ctx.prime,
        dim=a.dim,
        records=records,
        verdict=not witnesses and not undecided,
        witnesses=witnesses,
        engine_metadata=metadata,
        undecided=undecided,
    )
    if strict and undecided:
        worst = min(r.certified_exponent for r in records if not r.decided)
        raise PrecisionError(
            f"{len(undecided)} comparisons undecidable; achievable certified exponent {worst} "
            f"at working precision {a.ctx.working_precision}",
            achievable=worst,
            requested=target,
            report=report,
        )
    return report


# -- forward direction ----------------------------------------------------


@dataclass
class ChainStep:
    """Term-by-term check of the forward bound chain for one ``(k = m + 1, v)``."""

    k: int
    mu_valuation: int
    truncation_order: int
    lhs_valuation: int | float
    bound_with_binomial: int | float
    bound_without_binomial: int | float
    target_valuation: int
    series_matches_power: bool | None
    step_sup: bool
    step_binomial: bool
    step_powers: bool
    step_final: bool

    @property
    def ok(self) -> bool:
        return (
            self.step_sup
            and self.step_binomial
            and self.step_powers
            and self.step_final
            and self.series_matches_power is not False
        )

    def to_dict(self) -> dict:
        from .io import encode_exponent

        return {
            "k": self.k,
            "mu_valuation": self.mu_valuation,
            "truncation_order": self.truncation_order,
            "lhs_exponent": encode_exponent(-self.lhs_valuation),
            "bound_with_binomial_exponent": encode_exponent(-self.bound_with_binomial),
            "bound_without_binomial_exponent": encode_exponent(-self.bound_without_binomial),
            "rhs_exponent": -self.target_valuation,
            "series_matches_power": self.series_matches_power,
            "step_sup": self.step_sup,
            "step_binomial": self.step_binomial,
            "step_powers": self.step_powers,
            "step_final": self.step_final,
            "ok": self.ok,
        }


@dataclass
class ForwardReport:
    power_check: PowerContractionReport
    criterion: CriterionReport
    chain: list[ChainStep]
    passed: bool

    def to_dict(self) -> dict:
        return {
            "power_check": self.power_check.to_dict(),
            "criterion": self.criterion.to_dict(),
            "chain": [c.to_dict() for c in self.chain],
            "passed": self.passed,
        }


def _power_valuation_bounds(a: PadicMatrix, top: int) -> list[int | float]:
    """Certified lower bounds on ``v(A^j)`` (min entry valuation) for ``j = 0..top``."""
    bounds = [0]
    power = None
    for _ in range(top):
        power = a if power is None else mat_mul(power, a)
        bounds.append(min(power.min_valuation(), power.certified_exponent()))
    return bounds


def forward_direction_suite(
    a: PadicMatrix,
    M: int = DEFAULT_M,
    K: int = DEFAULT_K,
    mu_valuations: Iterable[int] | None = None,
    target: int | None = None,
    check_series: bool = True,
    matrix_id: str = "",
) -> ForwardReport:
    """Power contraction implies the resolvent bound, re-derived step by step.

    For ``k = m + 1`` the bound passes through

        ||sum_{j>=m} C(j,m)(mu A)^(j+1)|| <= sup |C(j,m)| |mu|^(j+1) ||A^(j+1)||
                                           <= sup |mu|^(j+1) ||A^(j+1)||
                                           <= |mu|^(m+1)

    and each inequality is checked for every truncated index j; indices past
    the truncation order are covered by the series tail bound.
    """
    power_report = power_contraction_check(a, M)
    if not power_report.verdict:
        raise PremiseError("forward suite requires ||A^m|| <= 1 for m = 1..M")
    grid = sorted(set(default_mu_valuations(a) if mu_valuations is None else mu_valuations))
    if target is None:
        target = default_target(K, grid)
    crit = resolvent_contraction_check(a, grid, K, target, matrix_id=matrix_id)
    p = a.ctx.prime
    s = a.norm_exponent()

    chain: list[ChainStep] = []
    if s == -INF:
        for k in range(1, K + 1):
            for v in grid:
                chain.append(ChainStep(k, v, 0, INF, INF, INF, k * v, True, True, True, True, True))
        return ForwardReport(power_report, crit, chain, crit.verdict)

    orders = {v: max(K - 1, math.ceil(target / (v - s)) - 2) for v in grid}
    val_bounds = _power_valuation_bounds(a, max(orders.values()) + 1)

    for k in range(1, K + 1):
        m = k - 1
        for v in grid:
            d = v - s
            order = max(m, math.ceil(target / d) - 2)
            tail = (order + 2) * d
            rec = crit.record(k, v)
            lhs_val = min(-rec.lhs_exponent, rec.certified_exponent)
            with_binom, without_binom = tail, tail
            step_binomial = step_powers = True
            for j in range(m, order + 1):
                kummer = kummer_binomial_valuation(j, m, p)
                plain = (j + 1) * v + val_bounds[j + 1]
                with_binom = min(with_binom, kummer + plain)
                without_binom = min(without_binom, plain)
                step_binomial &= kummer >= 0
                step_powers &= plain >= k * v
            step_powers &= tail >= k * v
            matches = None
            if check_series:
                series = rminusi_power_series(a, a.ctx.p_power(v), m, target, strict=False)
                mu = a.ctx.p_power(v)
                powered = mat_pow(
                    mat_sub(neumann_resolvent(a, mu, target, strict=False).value, PadicMatrix.identity(a.ctx, a.dim)),
                    k,
                )
                matches = series.value.agrees_with(powered)
            chain.append(
                ChainStep(
                    k=k,
                    mu_valuation=v,
                    truncation_order=order,
                    lhs_valuation=lhs_val,
                    bound_with_binomial=with_binom,
                    bound_without_binomial=without_binom,
                    target_valuation=k * v,
                    series_matches_power=matches,
                    step_sup=lhs_val >= with_binom,
                    step_binomial=step_binomial and without_binom <= with_binom,
                    step_powers=step_powers and without_binom >= k * v,
                    step_final=rec.decided and rec.passed,
                )
            )
    passed = crit.verdict and all(c.ok for c in chain)
    return ForwardReport(power_report, crit, chain, passed)


# -- converse direction ---------------------------------------------------


@dataclass
class ConverseStep:
    """Checks (a)-(c) for one ``(k, v)``: ``||S_k|| <= 1``, the factorization, and the norm chain."""

    k: int
    mu_valuation: int
    s_exponent: int | float
    s_bounded: bool
    factorization_residual_exponent: int | float
    factorization_certificate: int | float
    factorization_ok: bool
    power_exponent: int | float
    shift_power_exponent: int | float
    binomial_expansion_exponent: int | float
    max_term_exponent: int | float
    chain_ok: bool

    def to_dict(self) -> dict:
        from .io import encode_exponent

        return {key: encode_exponent(val) if isinstance(val, float) else val for key, val in self.__dict__.items()}


@dataclass
class LimitSweep:
    """Check (d): the bound ``max{1, ||mu A||, ..., ||mu^(k+1) A^(k+1)||}`` along decreasing ``|mu|``."""

    k: int
    bounds: dict[int, int]
    monotone: bool
    collapse_valuation: int | None
    conclusion_exponent: int | float
    conclusion_ok: bool

    def to_dict(self) -> dict:
        from .io import encode_exponent

        return {
            "k": self.k,
            "bounds": {str(v): b for v, b in self.bounds.items()},
            "monotone": self.monotone,
            "collapse_valuation": self.collapse_valuation,
            "conclusion_exponent": encode_exponent(self.conclusion_exponent),
            "conclusion_ok": self.conclusion_ok,
        }


@dataclass
class ConverseReport:
    criterion: CriterionReport
    steps: list[ConverseStep]
    limits: list[LimitSweep]
    engine_faults: list[tuple[int, int]]
    theorem_violations: list[tuple[int, int]]
    matches_power_check: bool
    passed: bool

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion.to_dict(),
            "steps": [s.to_dict() for s in self.steps],
            "limits": [lim.to_dict() for lim in self.limits],
            "engine_faults": [list(x) for x in self.engine_faults],
            "theorem_violations": [list(x) for x in self.theorem_violations],
            "matches_power_check": self.matches_power_check,
            "passed": self.passed,
        }


def _exact_residual(lhs: PadicMatrix, rhs: PadicMatrix, p: int) -> tuple[int | float, int | float]:
    """Exact norm exponent of ``lhs - rhs`` on representatives, and the combined certificate."""
    from .oracle import rational_valuation

    worst = INF
    for x, y in zip(lhs.entries(), rhs.entries()):
        worst = min(worst, rational_valuation(x.to_fraction() - y.to_fraction(), p))
    return -worst, min(lhs.certified_exponent(), rhs.certified_exponent())


def _shift_power_binomial(a: PadicMatrix, mu, k: int) -> PadicMatrix:
    """``sum_{j=0}^{k+1} C(k+1, j) (-mu A)^j``."""
    ctx = a.ctx
    x = scalar_mul(-mu, a)
    total = PadicMatrix.identity(ctx, a.dim)
    power = total
    for j in range(1, k + 2):
        power = mat_mul(power, x)
        total = mat_add(total, scalar_mul(ctx.scalar(math.comb(k + 1, j)), power))
    return total


def converse_direction_suite(
    a: PadicMatrix,
    K: int = DEFAULT_K,
    mu_valuations: Iterable[int] | None = None,
    target: int | None = None,
    matrix_id: str = "",
) -> ConverseReport:
    """The resolvent bound on the grid implies ``||A^(k+1)|| <= 1`` for ``k = 0..K-1``.

    (a) ``||S_k(mu)|| <= 1``; (b) ``A^(k+1) = (I - mu A)^(k+1) S_k(mu)`` to
    certified precision; (c) ``||A^(k+1)|| <= ||(I - mu A)^(k+1)|| ||S_k||
    <= max{1, ||mu A||, ..., ||mu^(k+1) A^(k+1)||}``; (d) the max is swept along
    increasing ``v(mu)`` until it collapses to 1.  A failure of (b) is an engine
    fault; failures of (a) or (c) are theorem-side violations.
    """
    grid = sorted(set(default_mu_valuations(a) if mu_valuations is None else mu_valuations))
    if target is None:
        target = default_target(K, grid)
    crit = resolvent_contraction_check(a, grid, K, target, matrix_id=matrix_id)
    if not crit.verdict:
        raise PremiseError("converse suite requires the resolvent bound to hold on the grid")
    ctx, p = a.ctx, a.ctx.prime

    powers = [PadicMatrix.identity(ctx, a.dim)]
    for _ in range(K):
        powers.append(mat_mul(powers[-1], a))
    power_hi = [exponent_bounds(m)[1] for m in powers]

    steps: list[ConverseStep] = []
    faults, violations = [], []
    for k in range(K):
        for v in grid:
            mu = ctx.p_power(v)
            try:
                s_res = s_operator(a, mu, k, target, strict=False)
            except EngineFault:
                faults.append((k, v))
                continue
            s_mat = s_res.value
            s_lo, s_hi = exponent_bounds(s_mat)
            shift = mat_pow(mat_sub(PadicMatrix.identity(ctx, a.dim), scalar_mul(mu, a)), k + 1)
            product = mat_mul(shift, s_mat)
            resid, cert = _exact_residual(powers[k + 1], product, p)
            fact_ok = resid <= -cert
            expansion = _shift_power_binomial(a, mu, k)
            t_hi = exponent_bounds(shift)[1]
            b_lo, b_hi = exponent_bounds(expansion)
            max_term = max([0] + [power_hi[j] - j * v for j in range(1, k + 2)])
            a_hi = power_hi[k + 1]
            chain_ok = (
                a_hi <= t_hi + s_hi
                and shift.agrees_with(expansion)
                and b_hi <= max_term
            )
            s_bounded = s_hi <= 0
            if not fact_ok:
                faults.append((k, v))
            if not (s_bounded and chain_ok):
                violations.append((k, v))
            steps.append(
                ConverseStep(
                    k=k,
                    mu_valuation=v,
                    s_exponent=s_hi,
                    s_bounded=s_bounded,
                    factorization_residual_exponent=resid,
                    factorization_certificate=cert,
                    factorization_ok=fact_ok,
                    power_exponent=a_hi,
                    shift_power_exponent=t_hi,
                    binomial_expansion_exponent=b_hi,
                    max_term_exponent=max_term,
                    chain_ok=chain_ok,
                )
            )

    limits = []
    for k in range(K):
        bounds: dict[int, int] = {}
        v = grid[0]
        finite = [power_hi[j] / j for j in range(1, k + 2) if power_hi[j] != -INF]
        stop = max(grid[-1], math.ceil(max(finite)) if finite else grid[-1])
        collapse = None
        while True:
            bounds[v] = max([0] + [power_hi[j] - j * v for j in range(1, k + 2)])
            if bounds[v] == 0 and collapse is None:
                collapse = v
            if v >= grid[-1] and (collapse is not None or v >= stop):
                break
            v += 1
        values = list(bounds.values())
        monotone = all(x >= y for x, y in zip(values, values[1:]))
        conclusion = power_hi[k + 1]
        ok = collapse is not None and monotone and conclusion <= bounds[collapse] == 0
        limits.append(LimitSweep(k, bounds, monotone, collapse, conclusion, ok))

    power_report = power_contraction_check(a, K)
    matches = power_report.verdict == all(lim.conclusion_ok for lim in limits)
    passed = not faults and not violations and all(lim.conclusion_ok for lim in limits) and matches
    return ConverseReport(crit, steps, limits, faults, violations, matches, passed)


# -- violation search -----------------------------------------------------


@dataclass(frozen=True)
class Witness:
    k: int
    mu_valuation: int
    lhs_exponent: int | float
    rhs_exponent: int

    def to_dict(self) -> dict:
        from .io import encode_exponent

        return {
            "k": self.k,
            "mu_valuation": self.mu_valuation,
            "lhs_exponent": encode_exponent(self.lhs_exponent),
            "rhs_exponent": self.rhs_exponent,
        }


def dominant_term_exponent(a: PadicMatrix, v: int, target: int | None = None) -> int | float:
    """Certified norm exponent of ``R(p^v, A) - I``; equals ``s - v`` whenever ``v > s``."""
    if target is None:
        target = 2 * v + 8
    res = neumann_resolvent(a, a.ctx.p_power(v), target, strict=False)
    diff = mat_sub(res.value, PadicMatrix.identity(a.ctx, a.dim))
    lo, hi = exponent_bounds(diff)
    if lo != hi:
        raise PrecisionError(
            f"norm of R - I at v = {v} not certified (precision {diff.certified_exponent()})",
            achievable=diff.certified_exponent(),
        )
    return hi


def violation_witness(
    a: PadicMatrix,
    mu_valuations: Sequence[int] | None = None,
    K: int = DEFAULT_K,
    target: int | None = None,
) -> Witness | None:
    """Return a ``(k, v(mu))`` pair violating the resolvent bound, or None.

    If ``||A|| = p^s > 1`` the first series term dominates: ``||R - I|| =
    |mu| ||A|| > |mu|`` for any ``v(mu) >= s + 1``, so k = 1 is a witness.
    Otherwise the grid is scanned and no witness is expected.
    """
    s = a.norm_exponent()
    if s != -INF and s >= 1:
        candidates = [v for v in (mu_valuations or []) if v >= s + 1]
        v = min(candidates) if candidates else s + 1
        lhs = dominant_term_exponent(a, v, target)
        if lhs != s - v:
            raise EngineFault(f"dominant-term identity failed: exponent {lhs} != {s - v}")
        return Witness(1, v, lhs, -v)
    report = resolvent_contraction_check(a, mu_valuations, K, target)
    if report.witnesses:
        k, v = report.witnesses[0]
        rec = report.record(k, v)
        return Witness(k, v, rec.lhs_exponent, rec.rhs_exponent)
    return None


@dataclass
class BiconditionalResult:
    power_check: PowerContractionReport
    criterion: CriterionReport
    agree: bool
    witness: Witness | None


def biconditional_check(
    a: PadicMatrix,
    M: int = DEFAULT_M,
    K: int = DEFAULT_K,
    mu_valuations: Iterable[int] | None = None,
    target: int | None = None,
    matrix_id: str = "",
    jobs: int = 1,
) -> BiconditionalResult:
    power_report = power_contraction_check(a, M)
    crit = resolvent_contraction_check(a, mu_valuations, K, target, matrix_id=matrix_id, jobs=jobs)
    witness = None
    if crit.witnesses:
        k, v = crit.witnesses[0]
        rec = crit.record(k, v)
        witness = Witness(k, v, rec.lhs_exponent, rec.rhs_exponent)
    return BiconditionalResult(power_report, crit, power_report.verdict == crit.verdict, witness)
