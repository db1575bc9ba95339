"""Square matrices over Q_p with the sup-induced operator norm.

Over Q_p^n with the sup norm, the operator norm of a matrix equals the largest
entry norm, so every norm inequality reduces to an integer comparison of
valuations.  Norms are reported as exponents: ``e`` means ``||A|| = p**e``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InputError
from .padic import INF, PadicContext, PadicScalar, add, mul, neg

REDUCTION_NOTE = (
    "ultrametric sup norm is submultiplicative, so ||A^m|| <= ||A||^m and the "
    "condition for every m >= 1 is equivalent to ||A|| <= 1"
)


class PadicMatrix:
    """Immutable n-by-n matrix of :class:`PadicScalar` entries sharing one context."""

    __slots__ = ("ctx", "rows")

    def __init__(self, ctx: PadicContext, rows: Sequence[Sequence[PadicScalar]]):
        n = len(rows)
        if n < 1:
            raise InputError("matrix dimension must be at least 1")
        frozen = []
        for row in rows:
            if len(row) != n:
                raise InputError("matrix must be square")
            for x in row:
                if not isinstance(x, PadicScalar):
                    raise InputError("matrix entries must be PadicScalar")
                if x.ctx != ctx:
                    raise InputError("matrix entry belongs to a different context")
            frozen.append(tuple(row))
        self.ctx = ctx
        self.rows = tuple(frozen)

    @classmethod
    def _wrap(cls, ctx: PadicContext, rows: tuple) -> PadicMatrix:
        obj = object.__new__(cls)
        obj.ctx = ctx
        obj.rows = rows
        return obj

    @classmethod
    def from_rationals(cls, ctx: PadicContext, rows: Iterable[Iterable]) -> PadicMatrix:
        return cls(ctx, [[ctx.scalar(q) for q in row] for row in rows])

    @classmethod
    def identity(cls, ctx: PadicContext, n: int) -> PadicMatrix:
        one, zero = ctx.one(), ctx.zero()
        return cls._wrap(ctx, tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, ctx: PadicContext, n: int) -> PadicMatrix:
        zero = ctx.zero()
        return cls._wrap(ctx, tuple((zero,) * n for _ in range(n)))

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij: tuple[int, int]) -> PadicScalar:
        i, j = ij
        return self.rows[i][j]

    def entries(self) -> Iterable[PadicScalar]:
        for row in self.rows:
            yield from row

    # -- norms and precision ---------------------------------------------

    def min_valuation(self) -> int | float:
        return min(x.valuation for x in self.entries())

    def norm_exponent(self) -> int | float:
        return -self.min_valuation()

    def certified_exponent(self) -> int | float:
        """Absolute precision of the matrix: the stored value is within ``p**-e`` of the truth."""
        return min(x.absprec for x in self.entries())

    def worst_certified_digits(self) -> int | None:
        digits = [x.certified_digits for x in self.entries() if not x.is_zero()]
        return min(digits) if digits else None

    def is_zero(self) -> bool:
        return all(x.is_zero() for x in self.entries())

    def cap(self, absprec: int | float) -> PadicMatrix:
        return PadicMatrix._wrap(self.ctx, tuple(tuple(x.cap(absprec) for x in row) for row in self.rows))

    def to_fractions(self) -> list[list[Fraction]]:
        return [[x.to_fraction() for x in row] for row in self.rows]

    def agrees_with(self, other: PadicMatrix) -> bool:
        return mat_sub(self, other).is_zero()

    # -- operators --------------------------------------------------------

    def __add__(self, other: PadicMatrix) -> PadicMatrix:
        return mat_add(self, other)

    def __sub__(self, other: PadicMatrix) -> PadicMatrix:
        return mat_sub(self, other)

    def __neg__(self) -> PadicMatrix:
        return PadicMatrix._wrap(self.ctx, tuple(tuple(neg(x) for x in row) for row in self.rows))

    def __matmul__(self, other: PadicMatrix) -> PadicMatrix:
        return mat_mul(self, other)

    def __rmul__(self, c) -> PadicMatrix:
        return scalar_mul(self.ctx.scalar(c), self)

    def __pow__(self, m: int) -> PadicMatrix:
        return mat_pow(self, m)

    def __eq__(self, other):
        if not isinstance(other, PadicMatrix):
            return NotImplemented
        return self.dim == other.dim and self.agrees_with(other)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        body = "; ".join(", ".join(str(x) for x in row) for row in self.rows)
        return f"PadicMatrix(p={self.ctx.prime}, [{body}])"


def _check_pair(a: PadicMatrix, b: PadicMatrix) -> None:
    if a.ctx != b.ctx:
        raise InputError("matrices belong to different p-adic contexts")
    if a.dim != b.dim:
        raise InputError(f"dimension mismatch: {a.dim} vs {b.dim}")


def mat_norm(a: PadicMatrix) -> int | float:
    """Norm exponent of ``a``: ``-min entry valuation``, ``-inf`` for the zero matrix."""
    return a.norm_exponent()


def mat_add(a: PadicMatrix, b: PadicMatrix) -> PadicMatrix:
    _check_pair(a, b)
    return PadicMatrix._wrap(
        a.ctx, tuple(tuple(add(x, y) for x, y in zip(ra, rb)) for ra, rb in zip(a.rows, b.rows))
    )


def mat_sub(a: PadicMatrix, b: PadicMatrix) -> PadicMatrix:
    _check_pair(a, b)
    return PadicMatrix._wrap(
        a.ctx,
        tuple(tuple(add(x, neg(y)) for x, y in zip(ra, rb)) for ra, rb in zip(a.rows, b.rows)),
    )


def mat_mul(a: PadicMatrix, b: PadicMatrix) -> PadicMatrix:
    _check_pair(a, b)
    cols = tuple(zip(*b.rows))
    out = []
    for row in a.rows:
        new_row = []
        for col in cols:
            acc = mul(row[0], col[0])
            for x, y in zip(row[1:], col[1:]):
                acc = add(acc, mul(x, y))
            new_row.append(acc)
        out.append(tuple(new_row))
    return PadicMatrix._wrap(a.ctx, tuple(out))


def scalar_mul(c: PadicScalar, a: PadicMatrix) -> PadicMatrix:
    if c.ctx != a.ctx:
        raise InputError("scalar and matrix belong to different p-adic contexts")
    return PadicMatrix._wrap(a.ctx, tuple(tuple(mul(c, x) for x in row) for row in a.rows))


def mat_pow(a: PadicMatrix, m: int) -> PadicMatrix:
    """``a**m`` by repeated squaring; ``a**0`` is the identity."""
    if not isinstance(m, int) or m < 0:
        raise InputError(f"exponent must be a nonnegative integer, got {m!r}")
    result = None
    base = a
    while m:
        if m & 1:
            result = base if result is None else mat_mul(result, base)
        m >>= 1
        if m:
            base = mat_mul(base, base)
    return PadicMatrix.identity(a.ctx, a.dim) if result is None else result


def basis_image_exponents(a: PadicMatrix) -> list[int | float]:
    """Norm exponent of ``a @ e_i`` (the i-th column) for each standard basis vector."""
    return [-min(row[i].valuation for row in a.rows) for i in range(a.dim)]


@dataclass
class PowerContractionReport:
    """Norm exponents of ``A^m`` for ``m = 1..M`` and the contraction verdict."""

    exponents: list[int | float]
    certified_exponents: list[int | float]
    verdict: bool
    decided: bool
    worst_certified_digits: int | None
    norm_exponent: int | float
    note: str = field(default=REDUCTION_NOTE)

    def to_dict(self) -> dict:
        from .io import encode_exponent

        return {
            "exponents": [encode_exponent(e) for e in self.exponents],
            "certified_exponents": [encode_exponent(e) for e in self.certified_exponents],
            "verdict": self.verdict,
            "decided": self.decided,
            "worst_certified_digits": self.worst_certified_digits,
            "norm_exponent": encode_exponent(self.norm_exponent),
            "note": self.note,
        }


def power_contraction_check(a: PadicMatrix, M: int) -> PowerContractionReport:
    """Compute ``||A^m||`` for ``m = 1..M`` by direct powering and decide ``||A^m|| <= 1``.

    An exponent is decided when the computed minimum valuation lies below the
    certified precision (it is then exact) or when the certified precision
    alone already shows the power is integral.
    """
    if not isinstance(M, int) or M < 1:
        raise InputError("M must be a positive integer")
    exponents, certs = [], []
    verdict, decided = True, True
    worst = None
    power = a
    for m in range(1, M + 1):
        if m > 1:
            power = mat_mul(power, a)
        w = power.min_valuation()
        cert = power.certified_exponent()
        exponents.append(-w)
        certs.append(cert)
        if w < cert:
            if w < 0:
                verdict = False
        elif cert < 0:
            decided = False
        digits = power.worst_certified_digits()
        if digits is not None and (worst is None or digits < worst):
            worst = digits
    return PowerContractionReport(
        exponents=exponents,
        certified_exponents=certs,
        verdict=verdict and decided,
        decided=decided or not verdict,
        worst_certified_digits=worst,
        norm_exponent=a.norm_exponent(),
    )
