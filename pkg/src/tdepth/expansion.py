"""Density-driven splitting of dense T layers into sparser sub-layers.

A column with ``t`` rotations on ``n`` qubits has density ``gamma = t / n``
and is split into ``E`` disjoint sub-columns, where

    E = ln(n+1) (1 - gamma^2) gamma^(1+gamma) + ceil(t / tau)
    tau = max(1, n^alpha e^(2 gamma))

rounded half-up and clamped to ``[1, t]``.  Qubits are assigned to
sub-columns in ascending order of their local-density score, so the first
sub-column collects the isolated rotations and the last one the clustered
ones.  Sub-columns share the parent's sign and have disjoint supports, so
they commute and their product is the parent layer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, CliffordResidue, Column
from .errors import CircuitError, DegenerateInputError


@dataclass(frozen=True)
class ExpansionParams:
    alpha: float = 0.3
    locality_k: int = 5
    enabled: bool = True
    every_round: bool = False

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not 1 <= self.locality_k <= 9:
            raise ValueError(f"locality_k must be in 1..9, got {self.locality_k}")


@dataclass(frozen=True)
class ColumnStats:
    t_count: int
    gamma: float
    mu: float


def column_stats(column: Column, n: int | None = None) -> ColumnStats:
    n = column.n if n is None else n
    if n < 1:
        raise CircuitError("column statistics need at least one qubit")
    if n != column.n:
        raise CircuitError(f"column has {column.n} cells, expected {n}")
    t = column.t_count
    gamma = t / n
    # population variance of a 0/1 vector with mean gamma
    return ColumnStats(t, gamma, gamma * (1.0 - gamma))


def expansion_factor(stats: ColumnStats, n: int, alpha: float = 0.3) -> int:
    """Number of sub-columns the column is split into (1 means keep it whole)."""
    if n < 1:
        raise CircuitError("expansion factor needs at least one qubit")
    g = stats.gamma
    spread = math.log(n + 1) * (1.0 - g * g) * g ** (1.0 + g)
    tau = max(1.0, n**alpha * math.exp(2.0 * g))
    raw = spread + math.ceil(stats.t_count / tau)
    e = math.floor(raw + 0.5)
    return min(max(e, 1), max(1, stats.t_count))


def _occupancy(column: Column) -> np.ndarray:
    s = column.support
    return np.array([(s >> q) & 1 for q in range(column.n)], dtype=float)


def local_density_scores(column: Column, stats: ColumnStats, locality_k: int) -> np.ndarray:
    """Per-qubit local density ``P_i`` over the window ``|j - i| <= k`` (``i`` included)."""
    if not 1 <= locality_k <= 9:
        raise ValueError(f"locality_k must be in 1..9, got {locality_k}")
    n = column.n
    g = _occupancy(column)
    csum = np.concatenate(([0.0], np.cumsum(g)))
    idx = np.arange(n)
    lo = np.maximum(idx - locality_k, 0)
    hi = np.minimum(idx + locality_k, n - 1)
    window = csum[hi + 1] - csum[lo]
    size = hi - lo + 1
    return g + stats.mu * (g - window / size) + (1.0 - stats.gamma) * window


def split_scores(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    total = p.sum()
    if not total > 0:
        raise DegenerateInputError("all local density scores are zero; nothing to split")
    return p / total


def expand_column(column: Column, params: ExpansionParams = ExpansionParams(), n: int | None = None) -> tuple[Column, ...]:
    n = column.n if n is None else n
    if column.is_empty:
        return (column,)
    stats = column_stats(column, n)
    e = expansion_factor(stats, n, params.alpha)
    if e == 1:
        return (column,)
    s = split_scores(local_density_scores(column, stats, params.locality_k))
    qubits = sorted(column.gates(), key=lambda q: (round(float(s[q]), 12), q))
    base, extra = divmod(len(qubits), e)
    parts = []
    start = 0
    for k in range(e):
        size = base + (1 if k < extra else 0)
        mask = 0
        for q in qubits[start:start + size]:
            mask |= 1 << q
        parts.append(column.restrict(mask))
        start += size
    return tuple(parts)


def expand_circuit(circuit: Circuit, params: ExpansionParams = ExpansionParams()) -> Circuit:
    if not params.enabled:
        return circuit
    new_cols: list[Column] = []
    last_of: dict[int, int] = {}
    for k, col in enumerate(circuit.columns):
        new_cols.extend(expand_column(col, params, circuit.n))
        last_of[k] = len(new_cols) - 1
    residues = tuple(
        r if r.anchor is None or r.anchor < 0 else CliffordResidue(r.qubit, r.axis, r.phase, last_of[r.anchor])
        for r in circuit.residues
    )
    return Circuit(circuit.n, tuple(new_cols), residues)
