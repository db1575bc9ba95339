from __future__ import annotations

from fractions import Fraction

import pytest

from padic_contraction.linalg import PadicMatrix
from padic_contraction.padic import PadicContext

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def ctx5() -> PadicContext:
    return PadicContext(5, 60)


def padic(ctx: PadicContext, rows) -> PadicMatrix:
    return PadicMatrix.from_rationals(ctx, rows)


def frac_rows(m: PadicMatrix) -> list[list[Fraction]]:
    return m.to_fractions()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
