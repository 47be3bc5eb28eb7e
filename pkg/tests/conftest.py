import sys

import numpy as np
import pytest
from functools import reduce
from hypothesis import strategies as st
from scipy.linalg import expm

from tdepth.benchgen import GenSpec, generate
from tdepth.circuit import Axis, Circuit, Column, Phase

I2 = np.eye(2, dtype=complex)
PAULIS = {
    Axis.X: np.array([[0, 1], [1, 0]], dtype=complex),
    Axis.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    Axis.Z: np.array([[1, 0], [0, -1]], dtype=complex),
}


def col(n, gates=None, phase="+"):
    return Column.from_gates(n, gates or {}, phase)


def embed(n, q, op):
    # qubit 0 is the most significant tensor factor
    return reduce(np.kron, [op if k == q else I2 for k in range(n)])


def generator(column):
    """Hermitian A with column unitary exp(iA)."""
    n = column.n
    a = np.zeros((2**n, 2**n), dtype=complex)
    for q, axis in column.gates().items():
        a += embed(n, q, PAULIS[axis])
    return column.phase.sign * np.pi / 8 * a


def ref_column(column):
    return expm(1j * generator(column))


def ref_residue(n, r):
    return expm(1j * r.phase.sign * np.pi / 4 * embed(n, r.qubit, PAULIS[r.axis]))


def ref_circuit(circuit, residues=True):
    """Independent dense reference: columns in order, then residues at the end."""
    n = circuit.n
    u = np.eye(2**n, dtype=complex)
    for c in circuit.columns:
        u = ref_column(c) @ u
    if residues:
        for r in circuit.residues:
            u = ref_residue(n, r) @ u
    return u


def same_up_to_phase(a, b, tol=1e-9):
    k = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    ph = a[k] / b[k]
    if not np.isclose(abs(ph), 1.0, atol=tol):
        return False
    return np.max(np.abs(a - ph * b)) <= tol


def random_circuit(seed, n, c, density):
    return generate(GenSpec(n, c, round(density * n * c), seed))


@st.composite
def columns(draw, n):
    cells = draw(st.lists(st.sampled_from([None, "X", "Y", "Z"]), min_size=n, max_size=n))
    phase = draw(st.sampled_from(["+", "-"]))
    return Column.from_gates(n, {q: a for q, a in enumerate(cells) if a}, phase)


@st.composite
def circuits(draw, max_n=4, max_c=6):
    n = draw(st.integers(1, max_n))
    cols = draw(st.lists(columns(n), min_size=0, max_size=max_c))
    return Circuit(n, tuple(cols))


@pytest.fixture
def four_layers():
    """Four layers on three qubits where only layers 0 and 1 can merge."""
    return Circuit(3, (
        col(3, {0: "Z"}, "+"),
        col(3, {1: "X"}, "+"),
        col(3, {1: "Z", 2: "Y"}, "-"),
        col(3, {0: "X", 2: "Z"}, "-"),
    ))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
