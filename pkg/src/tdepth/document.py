"""JSON circuit documents.

Layout::

    {"version": 1, "n": 3,
     "columns": [{"phase": "+", "gates": {"0": "Z", "2": "X"}}, ...],
     "residues": [{"qubit": 0, "axis": "Z", "phase": "+", "anchor": 4}],
     "provenance": {...}}

``residues`` and ``provenance`` are optional.  Serialization is canonical:
fixed key order, gates in ascending qubit order, two-space indent.
"""
from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .circuit import Axis, Circuit, CliffordResidue, Column, Phase
from .errors import CircuitError, DocumentError, VersionError

SCHEMA_VERSION = 1
_TOP_KEYS = {"version", "n", "columns", "residues", "provenance"}


@dataclass(frozen=True)
class CircuitDocument:
    circuit: Circuit
    provenance: dict = field(default_factory=dict)


def _no_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise DocumentError(f"duplicate key {k!r}")
        out[k] = v
    return out


def _int(value, where: str, lo: int = 0, hi: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise DocumentError(f"expected an integer, got {value!r}", where)
    if value < lo or (hi is not None and value >= hi):
        bound = f"{lo}..{hi - 1}" if hi is not None else f">= {lo}"
        raise DocumentError(f"{value} outside {bound}", where)
    return value


def _phase(value, where: str) -> Phase:
    try:
        return Phase(value)
    except ValueError:
        raise DocumentError(f"phase must be '+' or '-', got {value!r}", where) from None


def _axis(value, where: str) -> Axis:
    if value not in ("X", "Y", "Z"):
        raise DocumentError(f"unknown axis {value!r}", where)
    return Axis[value]


def _column(rec, n: int, where: str) -> Column:
    if not isinstance(rec, dict):
        raise DocumentError("column must be an object", where)
    extra = set(rec) - {"phase", "gates"}
    if extra:
        raise DocumentError(f"unknown keys {sorted(extra)}", where)
    phase = _phase(rec.get("phase", "+"), f"{where}.phase")
    gates = rec.get("gates", {})
    if not isinstance(gates, dict):
        raise DocumentError("gates must be an object", f"{where}.gates")
    cells: dict[int, Axis] = {}
    for key, axis in gates.items():
        loc = f"{where}.gates[{key!r}]"
        if not (isinstance(key, str) and key.isdigit()):
            raise DocumentError(f"qubit key must be a decimal index, got {key!r}", loc)
        q = int(key)
        if q >= n:
            raise DocumentError(f"qubit {q} outside 0..{n - 1}", loc)
        if q in cells:
            raise DocumentError(f"duplicate qubit {q}", loc)
        cells[q] = _axis(axis, loc)
    return Column.from_gates(n, cells, phase)


def _residue(rec, n: int, c: int, where: str) -> CliffordResidue:
    if not isinstance(rec, dict):
        raise DocumentError("residue must be an object", where)
    extra = set(rec) - {"qubit", "axis", "phase", "anchor"}
    if extra:
        raise DocumentError(f"unknown keys {sorted(extra)}", where)
    if "qubit" not in rec or "axis" not in rec:
        raise DocumentError("residue needs 'qubit' and 'axis'", where)
    q = _int(rec["qubit"], f"{where}.qubit", 0, n)
    axis = _axis(rec["axis"], f"{where}.axis")
    phase = _phase(rec.get("phase", "+"), f"{where}.phase")
    anchor = rec.get("anchor")
    if anchor is not None:
        anchor = _int(anchor, f"{where}.anchor", -1, c)
    return CliffordResidue(q, axis, phase, anchor)


def from_dict(doc) -> CircuitDocument:
    if not isinstance(doc, dict):
        raise DocumentError("document must be a JSON object")
    extra = set(doc) - _TOP_KEYS
    if extra:
        raise DocumentError(f"unknown keys {sorted(extra)}")
    version = doc.get("version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION or isinstance(version, bool):
        raise VersionError(f"unsupported schema version {version!r} (expected {SCHEMA_VERSION})", "version")
    if "n" not in doc:
        raise DocumentError("missing qubit count 'n'")
    n = _int(doc["n"], "n", 1)
    columns = doc.get("columns", [])
    if not isinstance(columns, list):
        raise DocumentError("columns must be a list", "columns")
    cols = tuple(_column(rec, n, f"columns[{k}]") for k, rec in enumerate(columns))
    residues = doc.get("residues", [])
    if not isinstance(residues, list):
        raise DocumentError("residues must be a list", "residues")
    res = tuple(_residue(rec, n, len(cols), f"residues[{k}]") for k, rec in enumerate(residues))
    provenance = doc.get("provenance", {})
    if not isinstance(provenance, dict):
        raise DocumentError("provenance must be an object", "provenance")
    try:
        circuit = Circuit(n, cols, res)
    except CircuitError as exc:
        raise DocumentError(str(exc)) from exc
    return CircuitDocument(circuit, provenance)


def parse_document(data: bytes | str) -> CircuitDocument:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DocumentError(f"not UTF-8: {exc}") from None
    try:
        doc = json.loads(data, object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as exc:
        raise DocumentError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    return from_dict(doc)


def parse_circuit(data: bytes | str) -> Circuit:
    return parse_document(data).circuit


def to_dict(circuit: Circuit, provenance: dict | None = None) -> dict:
    doc = {
        "version": SCHEMA_VERSION,
        "n": circuit.n,
        "columns": [
            {"phase": col.phase.value, "gates": {str(q): a.name for q, a in col.gates().items()}}
            for col in circuit.columns
        ],
    }
    if circuit.residues:
        doc["residues"] = [
            {"qubit": r.qubit, "axis": r.axis.name, "phase": r.phase.value, "anchor": r.anchor}
            for r in circuit.residues
        ]
    if provenance:
        doc["provenance"] = provenance
    return doc


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def serialize(circuit: Circuit, provenance: dict | None = None) -> str:
    return dumps(to_dict(circuit, provenance))


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write ``text`` to a temp file next to ``path`` and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def read_circuit(path: str | os.PathLike) -> CircuitDocument:
    return parse_document(Path(path).read_bytes())


def write_circuit(path: str | os.PathLike, circuit: Circuit, provenance: dict | None = None) -> None:
    write_atomic(path, serialize(circuit, provenance))
