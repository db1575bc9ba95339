from __future__ import annotations

import json
import math
from fractions import Fraction

import pytest

from padic_contraction.corpus import contractive_corpus, noncontractive_corpus
from padic_contraction.criterion import CriterionRecord
from padic_contraction.errors import InputError
from padic_contraction.io import (
    MatrixDocument,
    dump_matrix,
    dumps_matrix,
    encode_exponent,
    load_matrix,
    loads_matrix,
    records_to_csv,
)


def test_round_trip_is_byte_identical(tmp_path):
    for doc in contractive_corpus(11, 10) + noncontractive_corpus(12, 10):
        text = dumps_matrix(doc)
        again = loads_matrix(text)
        assert again.entries == doc.entries and again.prime == doc.prime
        assert dumps_matrix(again) == text
    path = tmp_path / "m.json"
    dump_matrix(MatrixDocument(5, [[Fraction(1, 5), Fraction(-3)], [0, 1]]), path)
    loaded = load_matrix(path)
    assert loaded.matrix_id == ""
    assert path.read_text() == dumps_matrix(loaded)


def test_canonical_entries():
    text = dumps_matrix(MatrixDocument(3, [[Fraction(2, 6)]]))
    assert json.loads(text)["entries"] == [["1/3"]]


@pytest.mark.parametrize(
    "text",
    [
        '{"prime": 5, "dim": 1, "entries": [["1/0"]]}',
        '{"prime": 6, "dim": 1, "entries": [["1"]]}',
        '{"prime": 5, "dim": 2, "entries": [["1", "2"]]}',
        '{"prime": 5, "dim": 1, "entries": [["x/2"]]}',
        '{"prime": 5, "dim": 1, "entries": [[1.5]]}',
        '{"prime": 5, "entries": [["1"]]}',
        "not json",
    ],
)
def test_malformed_documents(text):
    with pytest.raises(InputError):
        loads_matrix(text)


def test_missing_file(tmp_path):
    with pytest.raises(InputError):
        load_matrix(tmp_path / "absent.json")


def test_exponent_tokens():
    assert encode_exponent(-math.inf) == "inf_valuation"
    assert encode_exponent(math.inf) == "exact"
    assert encode_exponent(3) == 3


def test_csv_rows():
    rows = [CriterionRecord(1, 2, -math.inf, -2, True), CriterionRecord(2, 2, -1, -4, False)]
    assert records_to_csv(rows) == (
        "k,v_mu,lhs_exponent,rhs_exponent,pass\n1,2,inf_valuation,-2,true\n2,2,-1,-4,false\n"
    )
