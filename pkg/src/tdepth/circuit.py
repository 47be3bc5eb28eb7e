"""Columnar T-layer circuits and the merge/commute algebra on them.

A circuit is a time-ordered sequence of columns over ``n`` qubits.  Each
column holds at most one pi/8 rotation per qubit (about X, Y or Z) and one
sign shared by the whole column, so column ``j`` implements
``exp(i * s_j * pi/8 * sum_q P_q)``.  Column 0 is applied first.

Cells are stored as three bitmasks (one per axis), which keeps every
predicate below to a few integer operations even at 100+ qubits.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum, IntEnum
from functools import cached_property
from typing import Iterable, Sequence

from .errors import CircuitError, CommutationError, MergeError, PlanError


class Axis(IntEnum):
    X = 0
    Y = 1
    Z = 2

    def __str__(self):
        return self.name


class Phase(Enum):
    PLUS = "+"
    MINUS = "-"

    @property
    def sign(self) -> int:
        return 1 if self is Phase.PLUS else -1

    def __str__(self):
        return self.value


class Overlap(Enum):
    """How cells occupied in both columns are treated by a merge."""

    DISJOINT_ONLY = "disjoint"
    EQUAL_AXIS = "overlap"


class Order(Enum):
    """Where merged columns land in the next circuit."""

    PAPER = "paper"
    STRICT = "strict"


@dataclass(frozen=True)
class MergePolicy:
    overlap: Overlap = Overlap.EQUAL_AXIS
    order: Order = Order.STRICT

    def __str__(self):
        return f"{self.overlap.value}/{self.order.value}"


class MergeCheck(Enum):
    """Outcome of :func:`can_merge`; truthy only for ``OK``."""

    OK = "ok"
    PHASE_MISMATCH = "phase_mismatch"
    AXIS_CONFLICT = "axis_conflict"
    SUPPORT_OVERLAP = "support_overlap"

    def __bool__(self):
        return self is MergeCheck.OK


def _conflict(ax: int, ay: int, az: int, bx: int, by: int, bz: int) -> int:
    """Mask of qubits where both sides hold a rotation about different axes."""
    return (ax & (by | bz)) | (ay & (bx | bz)) | (az & (bx | by))


@dataclass(frozen=True)
class Column:
    """One T layer.  ``x``, ``y``, ``z`` are bitmasks of the qubits rotated about each axis."""

    n: int
    x: int = 0
    y: int = 0
    z: int = 0
    phase: Phase = Phase.PLUS

    def __post_init__(self):
        if self.n < 0:
            raise CircuitError(f"negative qubit count {self.n}")
        full = (1 << self.n) - 1
        x, y, z = self.x, self.y, self.z
        if (x | y | z) & ~full:
            raise CircuitError(f"rotation outside qubit range 0..{self.n - 1}")
        if (x & y) | (x & z) | (y & z):
            raise CircuitError("a qubit carries two rotations in one column")
        if not (x | y | z) and self.phase is not Phase.PLUS:
            object.__setattr__(self, "phase", Phase.PLUS)

    @classmethod
    def from_cells(cls, cells: Iterable[Axis | str | None], phase: Phase | str = Phase.PLUS) -> Column:
        """Build from per-qubit cells; ``None``, ``"I"`` or ``"."`` mean identity."""
        masks = [0, 0, 0]
        n = 0
        for q, cell in enumerate(cells):
            n = q + 1
            if cell is None or cell in ("I", "."):
                continue
            masks[int(Axis[cell] if isinstance(cell, str) else Axis(cell))] |= 1 << q
        return cls(n, *masks, phase=Phase(phase))

    @classmethod
    def from_gates(cls, n: int, gates: dict[int, Axis | str], phase: Phase | str = Phase.PLUS) -> Column:
        masks = [0, 0, 0]
        for q, axis in gates.items():
            if not 0 <= q < n:
                raise CircuitError(f"qubit {q} outside 0..{n - 1}")
            axis = Axis[axis] if isinstance(axis, str) else Axis(axis)
            masks[int(axis)] |= 1 << q
        return cls(n, *masks, phase=Phase(phase))

    @property
    def support(self) -> int:
        return self.x | self.y | self.z

    @property
    def t_count(self) -> int:
        return self.support.bit_count()

    @property
    def is_empty(self) -> bool:
        return not self.support

    def mask(self, axis: Axis) -> int:
        return (self.x, self.y, self.z)[axis]

    def __len__(self):
        return self.n

    def __getitem__(self, q: int) -> Axis | None:
        if not 0 <= q < self.n:
            raise IndexError(q)
        bit = 1 << q
        if self.x & bit:
            return Axis.X
        if self.y & bit:
            return Axis.Y
        if self.z & bit:
            return Axis.Z
        return None

    @property
    def cells(self) -> tuple[Axis | None, ...]:
        return tuple(self[q] for q in range(self.n))

    def gates(self) -> dict[int, Axis]:
        """Rotation-bearing qubits in ascending order."""
        return {q: a for q, a in enumerate(self.cells) if a is not None}

    def restrict(self, mask: int) -> Column:
        """Same column with every qubit outside ``mask`` set to identity."""
        return Column(self.n, self.x & mask, self.y & mask, self.z & mask, self.phase)

    def __str__(self):
        body = " ".join("." if a is None else a.name for a in self.cells)
        return f"{self.phase.value}[{body}]"


@dataclass(frozen=True)
class CliffordResidue:
    """A pi/4 rotation left behind when two equal-axis pi/8 rotations are merged.

    ``anchor`` is the index of the column the residue is applied right after
    (``-1``: before every column, ``None``: after the last column).
    """

    qubit: int
    axis: Axis
    phase: Phase = Phase.PLUS
    anchor: int | None = None


@dataclass(frozen=True)
class Circuit:
    n: int
    columns: tuple[Column, ...] = ()
    residues: tuple[CliffordResidue, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "residues", tuple(self.residues))
        for k, col in enumerate(self.columns):
            if col.n != self.n:
                raise CircuitError(f"column {k} has {col.n} cells, circuit has {self.n} qubits")
        for r in self.residues:
            if not 0 <= r.qubit < self.n:
                raise CircuitError(f"residue on qubit {r.qubit} outside 0..{self.n - 1}")
            if r.anchor is not None and not -1 <= r.anchor < len(self.columns):
                raise CircuitError(f"residue anchor {r.anchor} outside the circuit")

    def __len__(self):
        return len(self.columns)

    @cached_property
    def residue_masks(self) -> dict[int | None, tuple[int, int, int]]:
        """Per-anchor (x, y, z) masks of the residues sitting after each column."""
        out: dict[int | None, list[int]] = {}
        for r in self.residues:
            out.setdefault(r.anchor, [0, 0, 0])[r.axis] |= 1 << r.qubit
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def suffix_masks(self) -> list[tuple[int, int, int]]:
        """``suffix_masks[k]``: union of the (x, y, z) masks of columns ``k..end``."""
        out = [(0, 0, 0)] * (len(self.columns) + 1)
        x = y = z = 0
        for k in range(len(self.columns) - 1, -1, -1):
            col = self.columns[k]
            x, y, z = x | col.x, y | col.y, z | col.z
            out[k] = (x, y, z)
        return out

    def with_columns(self, columns: Sequence[Column], residues=None) -> Circuit:
        return Circuit(self.n, tuple(columns), self.residues if residues is None else tuple(residues))


def t_count(circuit: Circuit) -> int:
    return sum(col.t_count for col in circuit.columns)


def t_depth(circuit: Circuit) -> int:
    return sum(1 for col in circuit.columns if col.support)


def _check_lengths(a: Column, b: Column):
    if a.n != b.n:
        raise CircuitError(f"column lengths differ: {a.n} vs {b.n}")


def columns_commute(a: Column, b: Column) -> bool:
    """Single-qubit rotations commute iff one side is identity or both share the axis."""
    _check_lengths(a, b)
    return not _conflict(a.x, a.y, a.z, b.x, b.y, b.z)


def can_merge(a: Column, b: Column, policy: MergePolicy = MergePolicy()) -> MergeCheck:
    _check_lengths(a, b)
    # an empty column has no meaningful phase
    if a.phase is not b.phase and a.support and b.support:
        return MergeCheck.PHASE_MISMATCH
    if _conflict(a.x, a.y, a.z, b.x, b.y, b.z):
        return MergeCheck.AXIS_CONFLICT
    if policy.overlap is Overlap.DISJOINT_ONLY and a.support & b.support:
        return MergeCheck.SUPPORT_OVERLAP
    return MergeCheck.OK


def merge(a: Column, b: Column, policy: MergePolicy = MergePolicy()) -> tuple[Column, tuple[CliffordResidue, ...]]:
    """Merge two columns into one.

    Equal-axis overlaps cancel out of the merged column; each one is returned
    as a pi/4 residue (unanchored) so that ``merged * residues == a * b``.
    """
    check = can_merge(a, b, policy)
    if not check:
        raise MergeError(check)
    phase = a.phase if a.support else b.phase
    overlap = a.support & b.support
    residues = []
    q = 0
    while overlap >> q:
        if (overlap >> q) & 1:
            residues.append(CliffordResidue(q, a[q], phase))
        q += 1
    merged = Column(a.n, a.x ^ b.x, a.y ^ b.y, a.z ^ b.z, phase)
    return merged, tuple(residues)


def strict_obstacle(circuit: Circuit, i: int, j: int) -> str | None:
    """Describe what makes merging ``(i, j)`` unsound under strict order, or ``None``.

    Column ``j`` travels left past columns ``i+1 .. j-1`` and past every
    residue anchored at ``i .. j-1``; it must commute with all of them.
    Any residue the merge extracts must also commute with every column after
    ``j``, so that it can be deferred to the end of the circuit.
    """
    cols = circuit.columns
    c = cols[j]
    rmasks = circuit.residue_masks
    for k in range(j - 1, i - 1, -1):
        rm = rmasks.get(k)
        if rm and _conflict(c.x, c.y, c.z, *rm):
            return f"residue after column {k}"
        if k > i:
            b = cols[k]
            if _conflict(c.x, c.y, c.z, b.x, b.y, b.z):
                return f"column {k}"
    a = cols[i]
    ox, oy, oz = a.x & c.x, a.y & c.y, a.z & c.z
    if (ox | oy | oz) and _conflict(ox, oy, oz, *circuit.suffix_masks[j + 1]):
        for k in range(j + 1, len(cols)):
            b = cols[k]
            if _conflict(ox, oy, oz, b.x, b.y, b.z):
                return f"column {k} (blocks deferring the extracted residue)"
    return None


def pair_is_valid(circuit: Circuit, i: int, j: int, policy: MergePolicy = MergePolicy()) -> bool:
    """The validity predicate shared by candidate enumeration, fitness and plan application."""
    if i > j:
        i, j = j, i
    cols = circuit.columns
    if not can_merge(cols[i], cols[j], policy):
        return False
    return policy.order is Order.PAPER or strict_obstacle(circuit, i, j) is None


def _reanchor(anchor: int | None, new_index: dict[int, int]) -> int | None:
    """Map an anchor onto the nearest surviving column at or before it."""
    if anchor is None or anchor < 0:
        return anchor
    for k in range(anchor, -1, -1):
        if k in new_index:
            return new_index[k]
    return -1


def validate_plan(circuit: Circuit, plan: Sequence[tuple[int, int]]) -> list[tuple[int, int]]:
    """Normalise pairs to ``i < j`` and reject out-of-range or overlapping indices."""
    c = len(circuit.columns)
    used: set[int] = set()
    pairs = []
    for pair in plan:
        i, j = sorted(pair)
        if i == j:
            raise PlanError(f"pair {tuple(pair)} merges a column with itself")
        if i < 0 or j >= c:
            raise PlanError(f"pair {tuple(pair)} outside 0..{c - 1}")
        if i in used or j in used:
            raise PlanError(f"pair {tuple(pair)} reuses a column already in the plan")
        used.update((i, j))
        pairs.append((i, j))
    return pairs


def apply_merge_plan(circuit: Circuit, plan: Sequence[tuple[int, int]], policy: MergePolicy = MergePolicy()) -> Circuit:
    pairs = validate_plan(circuit, plan)
    if not pairs:
        return circuit
    cols = circuit.columns
    merged: dict[int, tuple[Column, tuple[CliffordResidue, ...]]] = {}
    for i, j in pairs:
        check = can_merge(cols[i], cols[j], policy)
        if not check:
            raise MergeError(check, f"pair {(i, j)}: {check.name}")
        if policy.order is Order.STRICT:
            blocker = strict_obstacle(circuit, i, j)
            if blocker is not None:
                raise CommutationError((i, j), blocker)
        merged[i] = merge(cols[i], cols[j], policy)

    partner = {j: i for i, j in pairs}
    new_cols: list[Column] = []
    new_index: dict[int, int] = {}
    if policy.order is Order.STRICT:
        for k, col in enumerate(cols):
            if k in partner:
                continue
            new_index[k] = len(new_cols)
            new_cols.append(merged[k][0] if k in merged else col)
    else:
        for i, j in pairs:
            new_index[i] = new_index[j] = len(new_cols)
            new_cols.append(merged[i][0])
        for k, col in enumerate(cols):
            if k not in new_index:
                new_index[k] = len(new_cols)
                new_cols.append(col)

    residues = [
        CliffordResidue(r.qubit, r.axis, r.phase, _reanchor(r.anchor, new_index))
        for r in circuit.residues
    ]
    for i, _ in pairs:
        at = new_index[i]
        residues.extend(CliffordResidue(r.qubit, r.axis, r.phase, at) for r in merged[i][1])
    return Circuit(circuit.n, tuple(new_cols), tuple(residues))


def canonicalize(circuit: Circuit) -> Circuit:
    """Drop all-identity columns, keeping residues attached to the surviving layers."""
    if all(col.support for col in circuit.columns):
        return circuit
    new_cols = []
    new_index = {}
    for k, col in enumerate(circuit.columns):
        if col.support:
            new_index[k] = len(new_cols)
            new_cols.append(col)
    residues = tuple(
        CliffordResidue(r.qubit, r.axis, r.phase, _reanchor(r.anchor, new_index))
        for r in circuit.residues
    )
    return Circuit(circuit.n, tuple(new_cols), residues)
