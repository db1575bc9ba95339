"""Seeded random matrices over Q_p for the verification corpora.

Entries are ``p**v * u`` with ``v`` uniform in a valuation window and ``u`` a
uniform unit modulo ``p**unit_digits``.  The contractive corpus keeps every
valuation nonnegative; the non-contractive corpus forces at least one entry of
negative valuation.
"""
from __future__ import annotations

import random
from fractions import Fraction

from .io import MatrixDocument
from .oracle import rational_valuation


def random_unit(rng: random.Random, p: int, digits: int) -> int:
    while True:
        u = rng.randrange(1, p**digits)
        if u % p:
            return u


def random_entry(rng: random.Random, p: int, v_lo: int, v_hi: int, digits: int) -> Fraction:
    v = rng.randint(v_lo, v_hi)
    return Fraction(p) ** v * random_unit(rng, p, digits)


def random_matrix(
    rng: random.Random,
    p: int,
    dim: int,
    v_lo: int,
    v_hi: int,
    digits: int,
    zero_probability: float = 0.1,
    force_negative: bool = False,
) -> list[list[Fraction]]:
    rows = [
        [
            Fraction(0) if rng.random() < zero_probability else random_entry(rng, p, v_lo, v_hi, digits)
            for _ in range(dim)
        ]
        for _ in range(dim)
    ]
    if force_negative and not any(q != 0 and rational_valuation(q, p) < 0 for row in rows for q in row):
        i, j = rng.randrange(dim), rng.randrange(dim)
        rows[i][j] = random_entry(rng, p, v_lo, -1, digits)
    return rows


def contractive_corpus(
    seed: int,
    count: int,
    primes=(2, 3, 5, 7),
    dims=(1, 2, 3, 4),
    max_valuation: int = 3,
    digits: int = 16,
) -> list[MatrixDocument]:
    """Matrices with every entry in Z_p."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        p, n = rng.choice(primes), rng.choice(dims)
        rows = random_matrix(rng, p, n, 0, max_valuation, digits)
        out.append(MatrixDocument(p, rows, f"contractive-{seed}-{i}"))
    return out


def noncontractive_corpus(
    seed: int,
    count: int,
    primes=(2, 3, 5, 7),
    dims=(1, 2, 3, 4),
    min_valuation: int = -2,
    max_valuation: int = 2,
    digits: int = 16,
) -> list[MatrixDocument]:
    """Matrices with at least one entry of valuation <= -1."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        p, n = rng.choice(primes), rng.choice(dims)
        rows = random_matrix(rng, p, n, min_valuation, max_valuation, digits, force_negative=True)
        out.append(MatrixDocument(p, rows, f"noncontractive-{seed}-{i}"))
    return out
