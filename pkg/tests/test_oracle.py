from __future__ import annotations

import math
from fractions import Fraction

import pytest
import sympy

from padic_contraction.errors import InputError, SingularMatrixError
from padic_contraction.oracle import (
    RationalMatrix,
    crosscheck,
    exact_inverse,
    exact_resolvent,
    exact_resolvent_derivative,
    exact_rminusi_power,
    exact_s_operator,
    rational_valuation,
)
from padic_contraction.padic import PadicContext
from padic_contraction.resolvent import injected_truncation_fault, neumann_resolvent, resolvent_derivative

from conftest import padic

UNIPOTENT = RationalMatrix([[1, 1], [0, 1]])


def test_rational_valuation():
    assert rational_valuation(Fraction(50, 3), 5) == 2
    assert rational_valuation(Fraction(3, 250), 5) == -3
    assert rational_valuation(0, 5) == math.inf


def test_exact_resolvent_examples():
    assert exact_resolvent(RationalMatrix([[1]]), 5, 5) == RationalMatrix([[Fraction(-1, 4)]])
    assert exact_resolvent(UNIPOTENT, 5, 5) == RationalMatrix([[Fraction(-1, 4), Fraction(5, 16)], [0, Fraction(-1, 4)]])


def test_exact_derivative_examples():
    assert exact_resolvent_derivative(RationalMatrix([[1]]), 5, 1, 5) == RationalMatrix([[Fraction(1, 16)]])
    assert exact_resolvent_derivative(RationalMatrix([[1]]), 5, 2, 5) == RationalMatrix([[Fraction(-1, 32)]])


def test_singular_shift_raises():
    with pytest.raises(SingularMatrixError):
        exact_resolvent(RationalMatrix([[Fraction(1, 5)]]), 5, 5)
    with pytest.raises(SingularMatrixError):
        exact_inverse(RationalMatrix([[1, 2], [2, 4]]), 3)


def test_inverse_round_trip():
    m = RationalMatrix([[2, 7, 1], [Fraction(1, 3), 0, 5], [9, 1, 1]])
    inv = exact_inverse(m, 3)
    assert m @ inv == RationalMatrix.identity(3)


def test_closed_form_matches_finite_series_for_nilpotent():
    # A nilpotent of index 3: every series terminates
    a = RationalMatrix([[0, 2, Fraction(1, 7)], [0, 0, 3], [0, 0, 0]])
    mu = Fraction(7, 2)
    for m in range(1, 4):
        series = RationalMatrix.zeros(3)
        for j in range(m, 3):
            series = series + (math.perm(j, m) * mu ** (j - m)) * (a ** j)
        assert exact_resolvent_derivative(a, mu, m, 7) == series


def test_closed_form_matches_symbolic_derivative():
    x = sympy.Symbol("x")
    a = sympy.Matrix([[1, 2], [sympy.Rational(1, 3), 5]])
    resolvent = (sympy.eye(2) - x * a).inv()
    mu = Fraction(3, 1)
    ra = RationalMatrix([[1, 2], [Fraction(1, 3), 5]])
    for m in (1, 2, 3):
        sym = sympy.diff(resolvent, x, m).subs(x, sympy.Rational(3))
        ours = exact_resolvent_derivative(ra, mu, m, 3)
        for i in range(2):
            for j in range(2):
                assert Fraction(str(sympy.nsimplify(sym[i, j]))) == ours[i, j]


def test_padic_finite_difference():
    # (R(mu + h) - R(mu)) / h -> R'(mu) with error of valuation >= v(h) - shift
    a = RationalMatrix([[1, 1], [0, 1]])
    mu = Fraction(5)
    deriv = exact_resolvent_derivative(a, mu, 1, 5)
    for e in (4, 8, 12):
        h = Fraction(5) ** e
        quotient = Fraction(1) / h * (exact_resolvent(a, mu + h, 5) - exact_resolvent(a, mu, 5))
        assert (quotient - deriv).norm_exponent(5) <= -e


def test_binomial_and_s_forms_agree():
    mu = Fraction(25)
    for k in range(3):
        s_k = exact_s_operator(UNIPOTENT, mu, k, 5)
        alt = mu ** (-(k + 1)) * exact_rminusi_power(UNIPOTENT, mu, k, 5)
        assert s_k == alt


def test_crosscheck_passes_for_engine():
    ctx = PadicContext(5, 70)
    a = padic(ctx, [[1, 1], [Fraction(2, 5), 3]])
    mu = Fraction(125)
    oracle = exact_resolvent(RationalMatrix(a.to_fractions()), mu, 5)
    result = crosscheck(neumann_resolvent(a, ctx.scalar(mu), 30), oracle, 5)
    assert result.passed and result.certified_exponent >= 30
    d = resolvent_derivative(a, ctx.scalar(mu), 2, 30)
    assert crosscheck(d, exact_resolvent_derivative(RationalMatrix(a.to_fractions()), mu, 2, 5), 5).passed


def test_crosscheck_catches_injected_fault():
    ctx = PadicContext(5, 70)
    a = padic(ctx, [[1, 1], [0, 1]])
    oracle = exact_resolvent(UNIPOTENT, 5, 5)
    with injected_truncation_fault():
        bad = neumann_resolvent(a, ctx.scalar(5), 30)
    assert not crosscheck(bad, oracle, 5).passed


def test_crosscheck_dimension_mismatch():
    ctx = PadicContext(5, 20)
    with pytest.raises(InputError):
        crosscheck(padic(ctx, [[1]]), UNIPOTENT, 5)
