import json

import pytest
from hypothesis import given, settings

from conftest import circuits, col, random_circuit
from tdepth.circuit import Axis, Circuit, CliffordResidue, Phase
from tdepth.document import (
    CircuitDocument,
    parse_circuit,
    parse_document,
    read_circuit,
    serialize,
    to_dict,
    write_atomic,
    write_circuit,
)
from tdepth.errors import DocumentError, VersionError


def test_minimal_document():
    assert parse_circuit('{"n": 1, "columns": []}') == Circuit(1)
    assert parse_circuit(b'{"version": 1, "n": 2}') == Circuit(2)


def test_parse_example():
    doc = parse_document(json.dumps({
        "version": 1, "n": 3,
        "columns": [{"phase": "-", "gates": {"2": "X", "0": "Z"}}, {"gates": {}}],
        "residues": [{"qubit": 1, "axis": "Y", "phase": "-", "anchor": 0}],
        "provenance": {"seed": 4},
    }))
    assert doc.circuit.columns[0] == col(3, {0: "Z", 2: "X"}, "-")
    assert doc.circuit.columns[1].is_empty
    assert doc.circuit.residues == (CliffordResidue(1, Axis.Y, Phase.MINUS, 0),)
    assert doc.provenance == {"seed": 4}


@pytest.mark.parametrize("text, where", [
    ('{"n": 2, "columns": [{"gates": {"2": "X"}}]}', "columns[0].gates['2']"),
    ('{"n": 2, "columns": [{"gates": {"0": "W"}}]}', "columns[0].gates['0']"),
    ('{"n": 2, "columns": [{"gates": {"0": "X", "0": "Z"}}]}', ""),
    ('{"n": 2, "columns": [{"gates": {"-1": "X"}}]}', "columns[0].gates['-1']"),
    ('{"n": 2, "columns": [{"phase": "*"}]}', "columns[0].phase"),
    ('{"n": 2, "columns": [], "extra": 1}', ""),
    ('{"n": 0}', "n"),
    ('{"columns": []}', ""),
    ('{"n": 2, "residues": [{"qubit": 5, "axis": "Z"}]}', "residues[0].qubit"),
    ('{"n": 2, "columns": [{}], "residues": [{"qubit": 0, "axis": "Z", "anchor": 3}]}', "residues[0].anchor"),
    ('{"n": 2,', "line 1"),
    ('[1, 2]', ""),
])
def test_rejections_carry_locations(text, where):
    with pytest.raises(DocumentError) as exc:
        parse_circuit(text)
    assert where in str(exc.value)


def test_duplicate_key_message():
    with pytest.raises(DocumentError, match="duplicate key '0'"):
        parse_circuit('{"n": 2, "columns": [{"gates": {"0": "X", "0": "Z"}}]}')


def test_version_mismatch():
    with pytest.raises(VersionError):
        parse_circuit('{"version": 2, "n": 1}')
    with pytest.raises(VersionError):
        parse_circuit('{"version": true, "n": 1}')


def test_non_utf8_rejected():
    with pytest.raises(DocumentError):
        parse_circuit(b'{"n": 1, "provenance": {"x": "\xff"}}')


@settings(max_examples=150, deadline=None)
@given(circuits(max_n=8, max_c=8))
def test_round_trip(circ):
    text = serialize(circ)
    assert parse_circuit(text) == circ
    assert serialize(parse_circuit(text)) == text


def test_round_trip_with_residues_and_provenance():
    circ = Circuit(2, (col(2, {0: "Z"}), col(2)), (CliffordResidue(0, Axis.Z, Phase.PLUS, -1), CliffordResidue(1, Axis.X)))
    text = serialize(circ, {"seed": 3})
    doc = parse_document(text)
    assert doc == CircuitDocument(circ, {"seed": 3})
    assert serialize(doc.circuit, doc.provenance) == text


def test_canonical_form_sorts_gates():
    text = '{"n": 12, "columns": [{"phase": "+", "gates": {"10": "X", "2": "Z"}}]}'
    out = json.loads(serialize(parse_circuit(text)))
    assert list(out["columns"][0]["gates"]) == ["2", "10"]
    assert "residues" not in to_dict(Circuit(1)) and "provenance" not in to_dict(Circuit(1))


def test_file_helpers(tmp_path):
    circ = random_circuit(1, 5, 8, 0.4)
    path = tmp_path / "sub" / "c.json"
    write_circuit(path, circ, {"k": 1})
    assert read_circuit(path) == CircuitDocument(circ, {"k": 1})
    assert [p.name for p in path.parent.iterdir()] == ["c.json"]


def test_write_atomic_leaves_no_temp_on_failure(tmp_path):
    target = tmp_path / "x.txt"
    target.write_text("old")
    with pytest.raises(TypeError):
        write_atomic(target, 123)
    assert target.read_text() == "old"
    assert [p.name for p in tmp_path.iterdir()] == ["x.txt"]
