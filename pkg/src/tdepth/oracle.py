"""Dense unitary construction and equivalence checks for small circuits.

Qubit 0 is the most significant tensor factor.  Circuits are multiplied in
time order, so the unitary of ``[c0, c1]`` is ``U(c1) @ U(c0)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import reduce

import numpy as np

from .circuit import Axis, Circuit, CliffordResidue, Column, Phase, _conflict
from .errors import CapacityError, CircuitError

MAX_QUBITS = 12

PAULI = {
    None: np.eye(2, dtype=complex),
    Axis.X: np.array([[0, 1], [1, 0]], dtype=complex),
    Axis.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    Axis.Z: np.array([[1, 0], [0, -1]], dtype=complex),
}


def rotation(axis: Axis | None, theta: float) -> np.ndarray:
    """exp(i * theta * P) = cos(theta) I + i sin(theta) P."""
    if axis is None:
        return np.eye(2, dtype=complex)
    return np.cos(theta) * PAULI[None] + 1j * np.sin(theta) * PAULI[axis]


def _check_capacity(n: int):
    if n > MAX_QUBITS:
        raise CapacityError(f"{n} qubits exceeds the dense-unitary cap of {MAX_QUBITS}")


def _apply_local(u: np.ndarray, n: int, factors: dict[int, np.ndarray]) -> np.ndarray:
    """Left-multiply ``u`` by the tensor product of single-qubit ``factors``."""
    if not factors:
        return u
    dim = u.shape[1]
    t = u.reshape((2,) * n + (dim,))
    for q, m in factors.items():
        t = np.moveaxis(np.tensordot(m, t, axes=([1], [q])), 0, q)
    return t.reshape(1 << n, dim)


def _column_factors(col: Column) -> dict[int, np.ndarray]:
    theta = col.phase.sign * np.pi / 8
    return {q: rotation(a, theta) for q, a in col.gates().items()}


def _residue_factor(r: CliffordResidue) -> tuple[int, np.ndarray]:
    return r.qubit, rotation(r.axis, r.phase.sign * np.pi / 4)


def column_unitary(column: Column, n: int | None = None) -> np.ndarray:
    n = column.n if n is None else n
    if n != column.n:
        raise CircuitError(f"column has {column.n} cells, expected {n}")
    _check_capacity(n)
    factors = [rotation(a, column.phase.sign * np.pi / 8) for a in column.cells]
    if not factors:
        return np.eye(1, dtype=complex)
    return reduce(np.kron, factors)


def circuit_unitary(circuit: Circuit, include_residues: bool = True, residues_at: str = "end") -> np.ndarray:
    """Ordered product of column unitaries.

    With ``include_residues`` the pi/4 residues are applied either after the
    last column (``residues_at="end"``) or right after their anchor column
    (``residues_at="anchor"``).  Unanchored residues always go at the end.
    """
    n = circuit.n
    _check_capacity(n)
    if residues_at not in ("end", "anchor"):
        raise ValueError(f"residues_at must be 'end' or 'anchor', not {residues_at!r}")
    inline: dict[int, list[CliffordResidue]] = {}
    tail: list[CliffordResidue] = []
    if include_residues:
        for r in circuit.residues:
            if residues_at == "anchor" and r.anchor is not None:
                inline.setdefault(r.anchor, []).append(r)
            else:
                tail.append(r)

    def apply_residues(u, rs):
        for r in rs:
            u = _apply_local(u, n, dict([_residue_factor(r)]))
        return u

    u = np.eye(1 << n, dtype=complex)
    u = apply_residues(u, inline.get(-1, ()))
    for k, col in enumerate(circuit.columns):
        u = _apply_local(u, n, _column_factors(col))
        u = apply_residues(u, inline.get(k, ()))
    return apply_residues(u, tail)


def is_unitary(u: np.ndarray, tol: float = 1e-9) -> bool:
    return np.linalg.norm(u @ u.conj().T - np.eye(u.shape[0])) <= tol


@dataclass(frozen=True)
class Equivalence:
    equal: bool
    deviation: float

    def __bool__(self):
        return self.equal


def equivalent(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> Equivalence:
    """Compare up to global phase, aligning on the largest entry of ``b``."""
    if a.shape != b.shape:
        raise CircuitError(f"dimension mismatch: {a.shape} vs {b.shape}")
    k = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(b[k]) < 1e-12:
        raise CircuitError("reference matrix is numerically zero")
    lam = a[k] / b[k]
    if abs(lam) < 1e-12:
        return Equivalence(False, float(np.max(np.abs(a - b))))
    lam /= abs(lam)
    dev = float(np.max(np.abs(a - lam * b)))
    return Equivalence(dev <= tol, dev)


class Verdict(Enum):
    EQUIVALENT = "Equivalent"
    NOT_EQUIVALENT = "NotEquivalent"
    UNVERIFIABLE = "Unverifiable"


@dataclass(frozen=True)
class VerificationReport:
    verdict: Verdict
    deviation: float | None = None
    reason: str = ""

    def __str__(self):
        parts = [self.verdict.value]
        if self.deviation is not None:
            parts.append(f"max deviation {self.deviation:.3e}")
        if self.reason:
            parts.append(self.reason)
        return ", ".join(parts)


def deferral_blockers(circuit: Circuit) -> list[str]:
    """Residues that do not commute with some column applied after them.

    Such residues cannot be moved to the end of the circuit, so the
    columns-then-residues reading of the circuit is not its true unitary.
    """
    out = []
    cols = circuit.columns
    for r in circuit.residues:
        if r.anchor is None:
            continue
        bit = 1 << r.qubit
        rm = [0, 0, 0]
        rm[r.axis] = bit
        for k in range(r.anchor + 1, len(cols)):
            c = cols[k]
            if _conflict(c.x, c.y, c.z, *rm):
                out.append(f"residue {r.axis.name} on qubit {r.qubit} (after column {r.anchor}) vs column {k}")
                break
    return out


def verify_optimization(original: Circuit, optimized: Circuit, tol: float = 1e-9) -> VerificationReport:
    """Check ``optimized`` (columns, then residues) against ``original``."""
    if original.n != optimized.n:
        return VerificationReport(Verdict.NOT_EQUIVALENT, None, f"qubit counts differ ({original.n} vs {optimized.n})")
    _check_capacity(original.n)
    blockers = deferral_blockers(optimized) + deferral_blockers(original)
    if blockers:
        # columns-then-residues is not a faithful reading; report the anchored check instead
        inline = equivalent(
            circuit_unitary(optimized, residues_at="anchor"),
            circuit_unitary(original, residues_at="anchor"),
            tol,
        )
        return VerificationReport(
            Verdict.UNVERIFIABLE,
            inline.deviation,
            f"{blockers[0]}; with residues at their anchors: {'equivalent' if inline else 'not equivalent'}",
        )
    check = equivalent(circuit_unitary(optimized), circuit_unitary(original), tol)
    verdict = Verdict.EQUIVALENT if check else Verdict.NOT_EQUIVALENT
    return VerificationReport(verdict, check.deviation)
