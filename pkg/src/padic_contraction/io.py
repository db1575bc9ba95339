"""Matrix file ingestion and report serialization.

Matrix files are JSON documents::

    {"prime": 5, "dim": 2, "entries": [["1/1", "1/1"], ["0/1", "1/1"]]}

Entries are exact rationals written ``"num/den"``.  :func:`dumps_matrix`
produces a canonical form, and loading then dumping a canonical document
reproduces it byte for byte.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .errors import InputError
from .padic import PadicContext, format_rational, is_prime, parse_rational

INF_TOKEN = "inf_valuation"
EXACT_TOKEN = "exact"
TABLE_HEADER = ("k", "v_mu", "lhs_exponent", "rhs_exponent", "pass")


def encode_exponent(e):
    """JSON/CSV-safe exponent: ``-inf`` (norm of zero) -> ``"inf_valuation"``, ``+inf`` -> ``"exact"``."""
    if isinstance(e, float):
        if e == -math.inf:
            return INF_TOKEN
        if e == math.inf:
            return EXACT_TOKEN
        return int(e)
    return e


@dataclass
class MatrixDocument:
    prime: int
    entries: list[list[Fraction]]
    matrix_id: str = ""

    @property
    def dim(self) -> int:
        return len(self.entries)

    def to_padic(self, ctx: PadicContext):
        from .linalg import PadicMatrix

        if ctx.prime != self.prime:
            raise InputError(f"context prime {ctx.prime} does not match matrix prime {self.prime}")
        return PadicMatrix.from_rationals(ctx, self.entries)

    def to_rational(self):
        from .oracle import RationalMatrix

        return RationalMatrix(self.entries)

    def norm_exponent(self) -> int | float:
        from .oracle import rational_valuation

        return -min(rational_valuation(q, self.prime) for row in self.entries for q in row)


def _parse_entry(raw) -> Fraction:
    if isinstance(raw, bool) or not isinstance(raw, (str, int)):
        raise InputError(f"matrix entry must be a 'num/den' string, got {raw!r}")
    if isinstance(raw, int):
        return Fraction(raw)
    return parse_rational(raw)


def parse_matrix(obj: dict, matrix_id: str = "") -> MatrixDocument:
    if not isinstance(obj, dict):
        raise InputError("matrix document must be a JSON object")
    for key in ("prime", "dim", "entries"):
        if key not in obj:
            raise InputError(f"matrix document lacks field {key!r}")
    prime, dim, entries = obj["prime"], obj["dim"], obj["entries"]
    if not isinstance(prime, int) or not is_prime(prime):
        raise InputError(f"prime must be a prime integer, got {prime!r}")
    if not isinstance(dim, int) or dim < 1:
        raise InputError(f"dim must be a positive integer, got {dim!r}")
    if not isinstance(entries, list) or len(entries) != dim:
        raise InputError(f"entries must be a list of {dim} rows")
    rows = []
    for row in entries:
        if not isinstance(row, list) or len(row) != dim:
            raise InputError(f"every row must hold exactly {dim} entries")
        rows.append([_parse_entry(x) for x in row])
    return MatrixDocument(prime, rows, str(obj.get("id", matrix_id)))


def loads_matrix(text: str, matrix_id: str = "") -> MatrixDocument:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"matrix file is not valid JSON: {exc}") from None
    return parse_matrix(obj, matrix_id)


def load_matrix(path: str | Path) -> MatrixDocument:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read matrix file {path}: {exc}") from None
    return loads_matrix(text)


def matrix_to_obj(doc: MatrixDocument) -> dict:
    obj = {
        "prime": doc.prime,
        "dim": doc.dim,
        "entries": [[format_rational(q) for q in row] for row in doc.entries],
    }
    if doc.matrix_id:
        obj["id"] = doc.matrix_id
    return obj


def dumps_matrix(doc: MatrixDocument) -> str:
    return json.dumps(matrix_to_obj(doc), indent=2) + "\n"


def dump_matrix(doc: MatrixDocument, path: str | Path) -> None:
    Path(path).write_text(dumps_matrix(doc), encoding="utf-8")


def dumps_report(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def records_to_csv(records: Iterable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TABLE_HEADER)
    for r in records:
        writer.writerow(
            [r.k, r.mu_valuation, encode_exponent(r.lhs_exponent), r.rhs_exponent, "true" if r.passed else "false"]
        )
    return buf.getvalue()
