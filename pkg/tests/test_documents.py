import json

import numpy as np
import pytest
from hypothesis import given

from relcalc.documents import (
    DocumentError,
    dumps_document,
    format_machine,
    format_text,
    parse_document,
    read_document,
    relation_to_document,
)
from relcalc.relation import from_graph, relations_equal
from relcalc.subspace import Subspace, equals

from conftest import FIXTURES, relations

RELATION_FIXTURES = sorted((FIXTURES / "relations").glob("*.json"))


def test_fixture_set_has_twenty_documents():
    assert len(RELATION_FIXTURES) == 20


@pytest.mark.parametrize("path", RELATION_FIXTURES, ids=lambda p: p.stem)
def test_fixture_round_trip(path):
    T, _, _ = read_document(path)
    text = dumps_document(relation_to_document(T))
    T2 = parse_document(json.loads(text))
    assert relations_equal(T, T2)
    assert T2.field == T.field and T2.tol == T.tol
    assert relations_equal(T, T2, tol=1e-12)
    assert T2.part_dims == T.part_dims
    assert dumps_document(relation_to_document(T)) == text


@given(relations(max_dim=6))
def test_random_round_trip(T):
    T2 = parse_document(json.loads(dumps_document(relation_to_document(T))))
    assert relations_equal(T, T2, tol=1e-12)
    assert T2.part_dims == T.part_dims


def test_three_forms_agree():
    A = [[1.0, 2.0], [0.0, 3.0]]
    g = parse_document({"field": "real", "dim_H": 2, "dim_K": 2, "graph_of": A})
    gen = parse_document({"field": "real", "dim_H": 2, "dim_K": 2, "generators": [[1, 0, 1, 0], [0, 1, 2, 3]]})
    parts = parse_document(
        {"field": "real", "dim_H": 2, "dim_K": 2, "parts": {"domain_basis": [[1, 0], [0, 1]], "operator": [[1, 0], [2, 3]]}}
    )
    ref = from_graph(np.array(A))
    assert relations_equal(g, ref) and relations_equal(gen, ref) and relations_equal(parts, ref)


def test_complex_entries():
    T = parse_document({"field": "complex", "dim_H": 1, "dim_K": 1, "graph_of": [[[0, 2]]]})
    assert T.field == "complex"
    assert relations_equal(T, from_graph(np.array([[2j]])))
    # plain numbers are fine in a complex document, and the field is kept
    T = parse_document({"field": "complex", "dim_H": 1, "dim_K": 1, "graph_of": [[3]]})
    assert T.field == "complex"


def test_multivalued_parts():
    T = parse_document(
        {"field": "real", "dim_H": 1, "dim_K": 2, "parts": {"domain_basis": [], "operator": [], "mul_generators": [[0, 1]]}}
    )
    assert T.domain.rank == 0 and equals(T.mulpart, Subspace.coordinate(2, [1]))


@pytest.mark.parametrize(
    "doc, where",
    [
        ([], "$"),
        ({"dim_H": 2, "dim_K": 2, "graph_of": [[1, 0], [0, 1]], "field": "quaternion"}, "field"),
        ({"dim_K": 2, "graph_of": [[1, 0]]}, "dim_H"),
        ({"dim_H": 0, "dim_K": 2, "generators": []}, "dim_H"),
        ({"dim_H": 2.5, "dim_K": 2, "generators": []}, "dim_H"),
        ({"dim_H": 2, "dim_K": 2}, "$"),
        ({"dim_H": 1, "dim_K": 1, "generators": [], "graph_of": [[1]]}, "$"),
        ({"dim_H": 2, "dim_K": 2, "graph_of": [[1, 0]]}, "graph_of"),
        ({"dim_H": 2, "dim_K": 2, "graph_of": [[1, 0], [0]]}, "graph_of[1]"),
        ({"dim_H": 1, "dim_K": 1, "generators": [[1, "x"]]}, "generators[0][1]"),
        ({"dim_H": 1, "dim_K": 1, "generators": [[1, [0, 1]]]}, "generators[0][1]"),
        ({"dim_H": 1, "dim_K": 1, "generators": [[1, True]]}, "generators[0][1]"),
        ({"dim_H": 1, "dim_K": 1, "generators": [[1, 1]], "tol": -1}, "tol"),
        ({"dim_H": 1, "dim_K": 1, "parts": {"operator": [[1]]}}, "parts.domain_basis"),
        ({"dim_H": 1, "dim_K": 1, "parts": {"domain_basis": [[1]], "operator": []}}, "parts.operator"),
        ({"dim_H": 1, "dim_K": 1, "parts": {"domain_basis": [], "operator": [], "extra": 1}}, "parts"),
    ],
)
def test_malformed_documents_name_the_field(doc, where):
    with pytest.raises(DocumentError) as info:
        parse_document(doc)
    assert info.value.where == where


def test_json_syntax_errors_carry_line_and_column(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"field": "real",\n "dim_H": 2\n "dim_K": 2}')
    with pytest.raises(DocumentError) as info:
        read_document(p)
    assert info.value.where == f"{p}:3:2"


def test_tol_override():
    doc = {"field": "real", "dim_H": 1, "dim_K": 1, "graph_of": [[1]], "tol": 1e-6}
    assert parse_document(doc).tol == 1e-6
    assert parse_document(doc, tol=1e-9).tol == 1e-9


def test_report_formats_are_deterministic():
    rep = {"b": 1.0 / 3.0, "a": [np.float64(2.0), complex(1, -1)], "c": {"z": np.inf, "y": True, "x": None}}
    m = format_machine(rep)
    assert json.loads(m)["b"] == "3.333333333333e-01"
    assert json.loads(m)["a"] == ["2.000000000000e+00", ["1.000000000000e+00", "-1.000000000000e+00"]]
    assert m == format_machine(dict(reversed(list(rep.items()))))
    lines = format_text(rep).splitlines()
    assert lines == sorted(lines)
    assert 'c.z = "inf"' in lines
