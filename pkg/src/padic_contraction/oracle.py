"""Exact rational ground truth for resolvents, independent of the series engine.

Everything here uses :class:`fractions.Fraction` only.  The one bridge to the
p-adic side is :func:`crosscheck`, which converts the engine's stored
representatives to exact rationals and measures the discrepancy exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import InputError, SingularMatrixError

INF = math.inf


def rational_valuation(q, p: int) -> int | float:
    """``v_p(q)`` for an exact rational; ``inf`` for zero."""
    q = Fraction(q)
    if q == 0:
        return INF
    v = 0
    num, den = q.numerator, q.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


class RationalMatrix:
    """Square matrix of reduced fractions."""

    __slots__ = ("rows",)

    def __init__(self, rows: Iterable[Iterable]):
        rows = tuple(tuple(Fraction(x) for x in row) for row in rows)
        if not rows or any(len(r) != len(rows) for r in rows):
            raise InputError("RationalMatrix must be square and nonempty")
        self.rows = rows

    @classmethod
    def identity(cls, n: int) -> RationalMatrix:
        return cls([[Fraction(int(i == j)) for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, n: int) -> RationalMatrix:
        return cls([[Fraction(0)] * n for _ in range(n)])

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __add__(self, other: RationalMatrix) -> RationalMatrix:
        self._check(other)
        return RationalMatrix([[x + y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: RationalMatrix) -> RationalMatrix:
        self._check(other)
        return RationalMatrix([[x - y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __matmul__(self, other: RationalMatrix) -> RationalMatrix:
        self._check(other)
        cols = list(zip(*other.rows))
        return RationalMatrix([[sum(x * y for x, y in zip(r, c)) for c in cols] for r in self.rows])

    def __rmul__(self, c) -> RationalMatrix:
        c = Fraction(c)
        return RationalMatrix([[c * x for x in r] for r in self.rows])

    def __pow__(self, m: int) -> RationalMatrix:
        result = RationalMatrix.identity(self.dim)
        for _ in range(m):
            result = result @ self
        return result

    def _check(self, other: RationalMatrix) -> None:
        if self.dim != other.dim:
            raise InputError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def min_valuation(self, p: int) -> int | float:
        return min(rational_valuation(x, p) for r in self.rows for x in r)

    def norm_exponent(self, p: int) -> int | float:
        return -self.min_valuation(p)

    def __repr__(self) -> str:
        return f"RationalMatrix({[[str(x) for x in r] for r in self.rows]})"


def exact_inverse(m: RationalMatrix, p: int, mu=None) -> RationalMatrix:
    """Gauss-Jordan inverse with largest-p-adic-norm pivoting (ties: lowest row)."""
    n = m.dim
    work = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m.rows)]
    for col in range(n):
        best, best_val = None, INF
        for r in range(col, n):
            val = rational_valuation(work[r][col], p)
            if val < best_val:
                best, best_val = r, val
        if best is None:
            raise SingularMatrixError(mu)
        work[col], work[best] = work[best], work[col]
        pivot = work[col][col]
        work[col] = [x / pivot for x in work[col]]
        for r in range(n):
            if r != col and work[r][col] != 0:
                f = work[r][col]
                work[r] = [x - f * y for x, y in zip(work[r], work[col])]
    return RationalMatrix([row[n:] for row in work])


def exact_resolvent(a: RationalMatrix, mu, p: int) -> RationalMatrix:
    """``(I - mu A)^-1`` by exact elimination."""
    mu = Fraction(mu)
    n = a.dim
    shifted = RationalMatrix.identity(n) - mu * a
    return exact_inverse(shifted, p, mu)


def exact_resolvent_derivative(a: RationalMatrix, mu, m: int, p: int) -> RationalMatrix:
    """m-th mu-derivative of the resolvent via the closed form ``m! (R A)^m R``."""
    if m < 1:
        raise InputError("derivative order m must be positive")
    r = exact_resolvent(a, mu, p)
    return math.factorial(m) * ((r @ a) ** m @ r)


def exact_rminusi_power(a: RationalMatrix, mu, m: int, p: int) -> RationalMatrix:
    """``(R(mu, A) - I)^(m+1)``."""
    r = exact_resolvent(a, mu, p)
    return (r - RationalMatrix.identity(a.dim)) ** (m + 1)


def exact_s_operator(a: RationalMatrix, mu, k: int, p: int) -> RationalMatrix:
    """``(A R(mu, A))^(k+1)``."""
    return (a @ exact_resolvent(a, mu, p)) ** (k + 1)


@dataclass
class CrosscheckResult:
    """Exact discrepancy between an engine value and the oracle, against the engine's certificate."""

    discrepancy_exponent: int | float
    certified_exponent: int | float
    passed: bool


def crosscheck(engine, oracle: RationalMatrix, p: int) -> CrosscheckResult:
    """Compare a ``SeriesResult`` (or a bare ``PadicMatrix``) with an exact oracle value.

    The discrepancy ``||engine - oracle||`` is computed exactly on the stored
    representatives; the check passes iff it is at most ``p**-e_tail``.
    """
    value = getattr(engine, "value", engine)
    cert = getattr(engine, "tail_bound_exponent", None)
    if cert is None:
        cert = value.certified_exponent()
    if value.dim != oracle.dim:
        raise InputError(f"dimension mismatch: engine {value.dim} vs oracle {oracle.dim}")
    rep = RationalMatrix(value.to_fractions())
    discrepancy = (rep - oracle).norm_exponent(p)
    return CrosscheckResult(discrepancy, cert, discrepancy <= -cert)

