from __future__ import annotations

import math
from fractions import Fraction

import pytest

from padic_contraction.criterion import (
    biconditional_check,
    converse_direction_suite,
    default_mu_valuations,
    dominant_term_exponent,
    exponent_bounds,
    forward_direction_suite,
    resolvent_contraction_check,
    violation_witness,
)
from padic_contraction.corpus import contractive_corpus, noncontractive_corpus
from padic_contraction.errors import PrecisionError, PremiseError
from padic_contraction.linalg import PadicMatrix
from padic_contraction.padic import PadicContext

from conftest import padic

UNIPOTENT = [[1, 1], [0, 1]]


def test_unipotent_is_tight(ctx5):
    report = resolvent_contraction_check(padic(ctx5, UNIPOTENT), [1, 2], K=3, target=30)
    assert report.verdict and not report.witnesses
    assert len(report.records) == 6
    assert all(r.passed and r.decided and r.lhs_exponent == r.rhs_exponent for r in report.records)


def test_scalar_fifth_fails(ctx5):
    report = resolvent_contraction_check(padic(ctx5, [[Fraction(1, 5)]]), [2], K=2, target=30)
    rec = report.record(1, 2)
    assert (rec.lhs_exponent, rec.rhs_exponent, rec.passed) == (-1, -2, False)
    assert not report.record(2, 2).passed
    assert report.witnesses[0] == (1, 2)


def test_zero_matrix_passes(ctx5):
    report = resolvent_contraction_check(PadicMatrix.zeros(ctx5, 2), [1, 2], K=4, target=20)
    assert report.verdict
    assert all(r.lhs_exponent == -math.inf for r in report.records)


def test_undecided_record_raises_in_strict_mode():
    # two digits cannot resolve the diagonal of R - I at v(mu) = 3
    ctx = PadicContext(5, 2)
    a = padic(ctx, UNIPOTENT)
    with pytest.raises(PrecisionError) as info:
        resolvent_contraction_check(a, [3], K=2, target=6)
    assert info.value.report is not None and info.value.report.undecided
    loose = resolvent_contraction_check(a, [3], K=2, target=6, strict=False)
    assert (1, 3) in loose.undecided and not loose.record(1, 3).decided


def test_exponent_bounds(ctx5):
    a = padic(ctx5, [[5, 25], [1, 0]])
    assert exponent_bounds(a) == (0, 0)
    cancelled = padic(ctx5, [[5]]) - padic(ctx5, [[5]])
    lo, hi = exponent_bounds(cancelled)
    assert lo == -math.inf and hi == -cancelled.certified_exponent()


def test_jobs_do_not_change_records(ctx5):
    a = padic(ctx5, [[1, 2], [Fraction(3, 5), 1]])
    one = resolvent_contraction_check(a, None, K=4)
    many = resolvent_contraction_check(a, None, K=4, jobs=3)
    assert one.to_dict() == many.to_dict()


def test_forward_suite_examples(ctx5):
    diag = padic(ctx5, [[1, 0], [0, 5]])
    report = forward_direction_suite(diag, M=10, K=6, mu_valuations=[1, 2])
    assert report.passed and all(step.ok for step in report.chain)
    assert forward_direction_suite(padic(ctx5, UNIPOTENT), M=10, K=4, mu_valuations=[1, 2]).passed
    assert forward_direction_suite(PadicMatrix.identity(ctx5, 2), M=8, K=4, mu_valuations=[1, 3]).passed
    assert forward_direction_suite(PadicMatrix.zeros(ctx5, 2), M=8, K=4, mu_valuations=[1]).passed


def test_forward_suite_rejects_failed_premise(ctx5):
    with pytest.raises(PremiseError):
        forward_direction_suite(padic(ctx5, [[Fraction(1, 5)]]), M=4, K=2)


def test_converse_suite_examples(ctx5):
    report = converse_direction_suite(padic(ctx5, UNIPOTENT), K=5)
    assert report.passed and report.matches_power_check
    assert not report.engine_faults and not report.theorem_violations
    assert all(step.factorization_ok and step.s_bounded for step in report.steps)
    assert all(lim.conclusion_ok for lim in report.limits)


def test_converse_suite_rejects_failed_premise(ctx5):
    with pytest.raises(PremiseError):
        converse_direction_suite(padic(ctx5, [[Fraction(1, 5)]]), K=2)


def test_witness_examples(ctx5):
    w = violation_witness(padic(ctx5, [[Fraction(1, 5)]]))
    assert (w.k, w.mu_valuation, w.lhs_exponent, w.rhs_exponent) == (1, 2, -1, -2)
    nil = padic(ctx5, [[0, Fraction(1, 25)], [0, 0]])
    w = violation_witness(nil)
    assert (w.k, w.mu_valuation) == (1, 3)
    assert violation_witness(padic(ctx5, UNIPOTENT), [1, 2], K=4) is None


def test_dominant_term_identity_on_corpus():
    for doc in noncontractive_corpus(7, 25):
        s = doc.norm_exponent()
        ctx = PadicContext(doc.prime, 60)
        a = doc.to_padic(ctx)
        for v in (s + 1, s + 3):
            assert dominant_term_exponent(a, v, 20) == s - v


def test_biconditional_on_small_corpora():
    docs = contractive_corpus(3, 10) + noncontractive_corpus(4, 10)
    for doc in docs:
        ctx = PadicContext(doc.prime, 200)
        a = doc.to_padic(ctx)
        result = biconditional_check(a, M=12, K=6, mu_valuations=default_mu_valuations(a)[:3])
        assert result.agree
        assert result.power_check.verdict == (doc.norm_exponent() <= 0)
