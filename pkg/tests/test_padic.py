from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padic_contraction.errors import InputError
from padic_contraction.padic import (
    INF,
    PadicContext,
    add,
    div,
    from_rational,
    kummer_binomial_valuation,
    legendre_factorial_valuation,
    mul,
    neg,
    parse_rational,
    sub,
)


def count_factor(n: int, p: int) -> int:
    """Brute force: divide out p one step at a time."""
    c = 0
    while n % p == 0:
        n //= p
        c += 1
    return c


def frac_val(q: Fraction, p: int) -> float:
    if q == 0:
        return INF
    return count_factor(q.numerator, p) - count_factor(q.denominator, p)


# -- construction -----------------------------------------------------------


def test_from_rational_examples(ctx5):
    five = from_rational(5, 1, ctx5)
    assert five.valuation == 1 and five.norm() == Fraction(1, 5)
    fifth = from_rational(1, 5, ctx5)
    assert fifth.valuation == -1 and fifth.norm() == 5
    for p in (2, 3, 7):
        z = from_rational(0, 7, PadicContext(p, 10))
        assert z.is_zero() and z.valuation == INF and z.norm() == 0 and z.unit is None


def test_from_rational_certifies_all_digits(ctx5):
    x = from_rational(-1, 4, ctx5)
    assert x.valuation == 0
    assert x.certified_digits == ctx5.working_precision
    # -1/4 * 4 == -1 modulo p^N
    assert (x.unit * 4 + 1) % ctx5.modulus == 0


def test_zero_denominator_rejected(ctx5):
    with pytest.raises(InputError):
        from_rational(1, 0, ctx5)
    with pytest.raises(InputError):
        parse_rational("1/0")


def test_context_validation():
    with pytest.raises(InputError):
        PadicContext(4, 10)
    with pytest.raises(InputError):
        PadicContext(5, 0)


# -- field operations -------------------------------------------------------


def test_add_examples(ctx5):
    s = add(ctx5.scalar(5), ctx5.scalar(25))
    assert s.valuation == 1
    assert s.to_fraction() == 30
    z = add(ctx5.scalar(5), ctx5.scalar(-5))
    assert z.is_zero() and z.valuation == INF


def test_mul_examples(ctx5):
    one = mul(ctx5.scalar(5), ctx5.scalar(Fraction(1, 5)))
    assert one.valuation == 0 and one.to_fraction() == 1


def test_division_by_zero(ctx5):
    with pytest.raises(ZeroDivisionError):
        div(ctx5.one(), ctx5.zero())
    with pytest.raises(ArithmeticError):
        ctx5.one() / ctx5.zero()


def test_context_mismatch(ctx5):
    other = PadicContext(3, 60)
    with pytest.raises(InputError):
        add(ctx5.one(), other.one())
    with pytest.raises(InputError):
        mul(ctx5.one(), PadicContext(5, 30).one())


def test_cancellation_reduces_certified_digits():
    ctx = PadicContext(5, 10)
    x = ctx.scalar(1 + 5**3 * 2)
    y = ctx.scalar(-1)
    d = x + y
    assert d.valuation == 3
    assert d.certified_digits == 7
    assert d.absprec == 10


def test_cancellation_to_zero_keeps_absolute_precision():
    ctx = PadicContext(5, 10)
    z = ctx.scalar(5) - ctx.scalar(5)
    assert z.is_zero() and not z.is_exact_zero()
    assert z.absprec == 11
    assert ctx.scalar(0).is_exact_zero()


def test_negation_and_subtraction(ctx5):
    x = ctx5.scalar(Fraction(3, 7))
    assert neg(neg(x)).agrees_with(x)
    assert sub(x, x).is_zero()


def test_string_forms(ctx5):
    assert str(ctx5.scalar(30)) == f"5^1 * 6 ({ctx5.working_precision} digits)"
    assert str(ctx5.scalar(0)) == "0"
    assert parse_rational("-6/4") == Fraction(-3, 2)
    assert parse_rational("12") == 12


def test_equality_is_certified_agreement():
    ctx = PadicContext(5, 4)
    x = ctx.scalar(1)
    y = ctx.scalar(1 + 5**4)
    assert x == y  # differ only beyond 4 digits
    assert x != ctx.scalar(2)
    with pytest.raises(TypeError):
        hash(x)


# -- property tests -----------------------------------------------------------

PRIMES = st.sampled_from([2, 3, 5, 7])


@st.composite
def rationals(draw, p):
    v = draw(st.integers(-6, 6))
    a = draw(st.integers(-10**6, 10**6).filter(lambda n: n % p != 0))
    b = draw(st.integers(1, 10**4).filter(lambda n: n % p != 0))
    return Fraction(a, b) * Fraction(p) ** v


@st.composite
def rational_pairs(draw):
    p = draw(PRIMES)
    return p, draw(rationals(p)), draw(rationals(p))


@settings(max_examples=300, deadline=None)
@given(rational_pairs())
def test_ultrametric_and_isoceles(args):
    p, qx, qy = args
    ctx = PadicContext(p, 30)
    x, y = ctx.scalar(qx), ctx.scalar(qy)
    s = x + y
    if x.valuation != y.valuation:
        assert s.valuation == min(x.valuation, y.valuation)
    else:
        assert s.valuation >= x.valuation


@settings(max_examples=300, deadline=None)
@given(rational_pairs())
def test_multiplicativity(args):
    p, qx, qy = args
    ctx = PadicContext(p, 30)
    x, y = ctx.scalar(qx), ctx.scalar(qy)
    assert (x * y).valuation == x.valuation + y.valuation
    assert (x / y).valuation == x.valuation - y.valuation


@settings(max_examples=300, deadline=None)
@given(rational_pairs(), st.sampled_from(["add", "sub", "mul", "div"]))
def test_round_trip_against_exact_rationals(args, op):
    p, qx, qy = args
    ctx = PadicContext(p, 25)
    x, y = ctx.scalar(qx), ctx.scalar(qy)
    got = {"add": x + y, "sub": x - y, "mul": x * y, "div": x / y}[op]
    exact = {"add": qx + qy, "sub": qx - qy, "mul": qx * qy, "div": qx / qy}[op]
    assert got.agrees_with(ctx.scalar(exact))
    # the representative is within the certified absolute precision of the truth
    assert frac_val(got.to_fraction() - exact, p) >= got.absprec
    if exact != 0:
        assert got.valuation == frac_val(exact, p)


# -- valuation combinatorics ----------------------------------------------------


def test_legendre_examples():
    assert legendre_factorial_valuation(25, 5) == count_factor(math.factorial(25), 5) == 6
    assert legendre_factorial_valuation(0, 3) == 0
    assert legendre_factorial_valuation(4, 2) == count_factor(24, 2) == 3


def test_kummer_examples():
    assert kummer_binomial_valuation(4, 2, 2) == count_factor(6, 2) == 1
    for p in (2, 3, 5, 7):
        assert kummer_binomial_valuation(9, 9, p) == 0
    assert math.comb(6, 3) == 20
    assert kummer_binomial_valuation(6, 3, 5) == count_factor(20, 5) == 1


def test_kummer_rejects_m_above_j():
    with pytest.raises(InputError):
        kummer_binomial_valuation(3, 4, 5)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_legendre_kummer_consistency_up_to_60(p):
    for j in range(61):
        for m in range(j + 1):
            expected = (
                legendre_factorial_valuation(j, p)
                - legendre_factorial_valuation(m, p)
                - legendre_factorial_valuation(j - m, p)
            )
            assert kummer_binomial_valuation(j, m, p) == expected == count_factor(math.comb(j, m), p)
