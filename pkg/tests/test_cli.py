import csv
import json

import numpy as np
import pytest

from relcalc import __version__
from relcalc.cli import main
from relcalc.decomposition import gamma
from relcalc.documents import read_document
from relcalc.relation import compose, from_graph, image_of, inverse, relations_equal

from conftest import FIXTURES

REL = FIXTURES / "relations"
FAM = FIXTURES / "families"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def machine(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "machine")
    return code, json.loads(out), err


def test_analyze_diag_2_0(capsys):
    code, rep, _ = machine(capsys, "analyze", REL / "diag_2_0.json")
    assert code == 0
    assert rep["results"]["hus_constant"] == "5.000000000000e-01"
    assert rep["results"]["gamma"] == "2.000000000000e+00"
    assert rep["results"]["dims"] == {"D": 2, "R": 1, "N": 1, "M": 0, "dim_H": 2, "dim_K": 2, "graph": 2}
    assert rep["version"] == __version__ and len(rep["input_digest"]) == 64
    assert rep["tol"] == "4.000000000000e-10"


def test_analyze_identity(capsys):
    code, rep, _ = machine(capsys, "analyze", REL / "identity2.json")
    assert code == 0 and rep["results"]["gamma"] == "1.000000000000e+00"
    assert rep["results"]["predicates"]["selfadjoint"] is True


def test_analyze_text_format(capsys):
    code, out, _ = run(capsys, "analyze", REL / "rectangular.json")
    assert code == 0
    assert "results.hus_constant = " in out
    assert "spectrum" not in out


def test_tol_is_echoed(capsys):
    _, rep, _ = machine(capsys, "analyze", REL / "identity2.json", "--tol", "1e-6")
    assert rep["tol"] == "1.000000000000e-06"


@pytest.mark.parametrize("path", sorted(REL.glob("*.json")), ids=lambda p: p.stem)
def test_analyze_and_verify_every_fixture(capsys, path):
    assert run(capsys, "analyze", path)[0] == 0
    code, _, err = run(capsys, "verify", path)
    assert code == 0, err


def test_malformed_dims_exit_2(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"field": "real", "dim_H": 2, "dim_K": 2, "graph_of": [[1, 0, 0], [0, 1, 0]]}))
    code, out, err = run(capsys, "analyze", p)
    assert code == 2 and out == ""
    assert "graph_of[0]" in err and str(p) in err


def test_missing_file_exit_2(capsys, tmp_path):
    assert run(capsys, "analyze", tmp_path / "nope.json")[0] == 2


def test_bad_arguments_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["verify", "--suite", "nonsense"])
    assert info.value.code == 2


def test_verify_identity_all_suites(capsys):
    code, rep, _ = machine(capsys, "verify", REL / "identity2.json", "--suite", "all")
    assert code == 0
    assert set(rep["verdicts"]) == {"algebra", "decomposition", "equivalences", "spectral", "hus", "sum", "product", "block"}
    assert rep["failure_count"] == 0


def test_fault_injection_names_the_identity(capsys):
    code, rep, err = machine(capsys, "verify", REL / "identity2.json", "--suite", "algebra", "--inject-fault", "adjoint")
    assert code == 1
    assert "(T*)*=T" in err
    ids = {f["id"] for f in rep["failures"]}
    assert "(T*)*=T" in ids
    assert all(float(f["margin"]) > 0 for f in rep["failures"])


def test_verify_random_corpus(capsys):
    code, rep, _ = machine(capsys, "verify", "--random", 25, "--seed", 4, "--max-dim", 5)
    assert code == 0
    assert rep["seed"] == 4 and rep["results"]["items"] == 25


@pytest.mark.parametrize("field", ["real", "complex"])
def test_verify_random_single_field(capsys, field):
    code, _, _ = machine(capsys, "verify", "--random", 10, "--seed", 1, "--field", field, "--suite", "equivalences")
    assert code == 0


def test_verify_needs_an_input(capsys):
    assert run(capsys, "verify")[0] == 2
    assert run(capsys, "verify", REL / "identity2.json", "--random", 3)[0] == 2


def test_reports_are_byte_identical(capsys):
    a = run(capsys, "verify", "--random", 8, "--seed", 9, "--format", "machine")[1]
    b = run(capsys, "verify", "--random", 8, "--seed", 9, "--format", "machine")[1]
    assert a == b
    a = run(capsys, "analyze", REL / "complex_parts.json")[1]
    assert a == run(capsys, "analyze", REL / "complex_parts.json")[1]


def test_compose_of_graphs(capsys, tmp_path):
    A, B = np.array([[1.0, 2.0], [0.0, 1.0]]), np.array([[0.0, 1.0], [3.0, 0.0]])
    pa, pb, out = tmp_path / "a.json", tmp_path / "b.json", tmp_path / "ab.json"
    pa.write_text(json.dumps({"field": "real", "dim_H": 2, "dim_K": 2, "graph_of": A.tolist()}))
    pb.write_text(json.dumps({"field": "real", "dim_H": 2, "dim_K": 2, "graph_of": B.tolist()}))
    assert run(capsys, "compose", pa, pb, "-o", out)[0] == 0
    T, doc, _ = read_document(out)
    assert relations_equal(T, from_graph(A @ B))
    assert doc["metadata"]["operation"] == "compose"
    assert [i["file"] for i in doc["metadata"]["inputs"]] == [str(pa), str(pb)]


def test_adjoint_of_pure_multivalued(capsys, tmp_path):
    out = tmp_path / "adj.json"
    assert run(capsys, "adjoint", REL / "pure_multivalued.json", "-o", out)[0] == 0
    _, rep, _ = machine(capsys, "analyze", out)
    assert rep["results"]["dims"]["D"] == 0


def test_pipeline_records_the_chain(capsys, tmp_path):
    src = REL / "partial_with_mulpart.json"
    inv, comp = tmp_path / "inv.json", tmp_path / "comp.json"
    assert run(capsys, "inverse", src, "-o", inv)[0] == 0
    assert run(capsys, "compose", inv, src, "-o", comp)[0] == 0
    P, doc, _ = read_document(comp)
    assert doc["metadata"]["inputs"][0]["metadata"]["operation"] == "inverse"
    T, _, _ = read_document(src)
    assert relations_equal(P, compose(inverse(T), T))
    for x in T.domain.basis.T:
        assert image_of(P, x).contains(x)


@pytest.mark.parametrize("op", ["sum", "minkowski", "product"])
def test_binary_operations(capsys, tmp_path, op):
    out = tmp_path / f"{op}.json"
    assert run(capsys, op, REL / "diag_2_0.json", REL / "identity2.json", "-o", out)[0] == 0
    T, _, _ = read_document(out)
    if op == "sum":
        assert relations_equal(T, from_graph(np.diag([3.0, 1.0])))
    elif op == "product":
        assert (T.dim_H, T.dim_K) == (4, 4) and gamma(T) == pytest.approx(1.0)


def test_operation_to_stdout(capsys):
    code, out, _ = run(capsys, "inverse", REL / "diag_2_0.json")
    assert code == 0 and json.loads(out)["dim_H"] == 2


def test_dimension_mismatch_exit_2(capsys):
    code, _, err = run(capsys, "sum", REL / "identity2.json", REL / "rectangular.json")
    assert code == 2 and "mismatch" in err


def test_probe_harmonic(capsys, tmp_path):
    out = tmp_path / "h.csv"
    code, rep, _ = machine(capsys, "probe", "--family", FAM / "harmonic.json", "--n", "2..64", "--csv", out)
    assert code == 0
    res = rep["results"]
    assert res["trend"] == "degenerating"
    assert abs(float(res["slope"]) + 1) <= 0.05
    assert "heuristic" in res["rule"]
    rows = list(csv.DictReader(out.open()))
    assert [r["n"] for r in rows] == [str(n) for n in range(2, 65)]
    assert float(rows[-1]["gamma"]) == pytest.approx(1 / 64, rel=1e-12)
    assert float(rows[-1]["M"]) == pytest.approx(64, rel=1e-12)


def test_probe_constant_and_short(capsys):
    assert machine(capsys, "probe", "--family", FAM / "constant.json")[1]["results"]["trend"] == "stable"
    rep = machine(capsys, "probe", "--family", FAM / "harmonic.json", "--n", "2..3")[1]
    assert rep["results"]["trend"] == "inconclusive"


@pytest.mark.parametrize("name", ["laplacian.json", "graph_sequence.json"])
def test_probe_other_families(capsys, name):
    code, rep, _ = machine(capsys, "probe", "--family", FAM / name)
    assert code == 0 and rep["results"]["trend"] in {"stable", "degenerating", "inconclusive"}


def test_probe_malformed_family(capsys, tmp_path):
    assert run(capsys, "probe", "--family", FAM / "malformed.json", "--n", "2..5")[0] == 2
    assert run(capsys, "probe", "--family", FAM / "harmonic.json", "--n", "5-2")[0] == 2
    p = tmp_path / "f.json"
    p.write_text('{"kind": "diagonal", "entry": "import os"}')
    assert run(capsys, "probe", "--family", p, "--n", "2..4")[0] == 2


def test_numeric_inconsistency_exit_3(capsys, monkeypatch):
    import relcalc.decomposition as dec

    def broken(T):
        a, b = original(T)
        return a + 1e-3, b

    original = dec.resolvent_contraction_routes
    monkeypatch.setattr(dec, "resolvent_contraction_routes", broken)
    code, _, err = run(capsys, "analyze", REL / "identity2.json")
    assert code == 3 and "inconsistency" in err
