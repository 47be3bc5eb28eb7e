"""Reference optimizers: an exhaustive oracle for tiny circuits and a window lookahead."""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

from .candidates import Pair, candidate_pairs
from .circuit import (
    Circuit,
    CliffordResidue,
    Column,
    MergePolicy,
    Order,
    Overlap,
    _conflict,
    apply_merge_plan,
    can_merge,
    canonicalize,
    merge,
    t_count,
    t_depth,
)
from .errors import SearchLimitError

MAX_WINDOW = 8


def _clash(a: Column, b: Column) -> bool:
    return bool(_conflict(a.x, a.y, a.z, b.x, b.y, b.z))


def _column_key(col: Column):
    return (col.support, col.x, col.y, col.z, col.phase.value)


def canonical_order(columns) -> tuple[Column, ...]:
    """Smallest ordering (by support, axis masks, phase) reachable by swapping commuting neighbours.

    Two column sequences implement the same unitary by reordering alone iff
    they share this canonical form.
    """
    remaining = list(columns)
    out = []
    while remaining:
        best = None
        for pos, c in enumerate(remaining):
            if any(_clash(remaining[m], c) for m in range(pos)):
                continue
            if best is None or _column_key(c) < _column_key(remaining[best]):
                best = pos
        out.append(remaining.pop(best))
    return tuple(out)


def trace_merge(columns, i: int, j: int, policy: MergePolicy = MergePolicy()):
    """Merge columns ``i < j`` after any commutation-legal reordering, or return ``None``.

    Columns between the two that must stay before ``j`` are moved in front of
    the merged column, the rest go behind it; this fails exactly when one
    intervening column must stay after ``i`` and before ``j``.  Returns the
    new column sequence (an emptied merge is dropped) and the residues.
    """
    a, b = columns[i], columns[j]
    if not can_merge(a, b, policy):
        return None
    before: set[int] = set()
    for k in range(j - 1, i, -1):
        if _clash(columns[k], b) or any(_clash(columns[k], columns[m]) for m in before):
            before.add(k)
    after_i: set[int] = set()
    for k in range(i + 1, j):
        if _clash(a, columns[k]) or any(_clash(columns[m], columns[k]) for m in after_i):
            after_i.add(k)
    if before & after_i:
        return None
    merged, residues = merge(a, b, policy)
    if policy.order is Order.STRICT and residues:
        ox, oy, oz = a.x & b.x, a.y & b.y, a.z & b.z
        if any(_conflict(ox, oy, oz, c.x, c.y, c.z) for c in columns[j + 1:]):
            return None
    mid = [columns[k] for k in range(i + 1, j) if k in before]
    rest = [columns[k] for k in range(i + 1, j) if k not in before]
    new = list(columns[:i]) + mid + ([merged] if merged.support else []) + rest + list(columns[j + 1:])
    return tuple(new), residues


def brute_force_optimum(circuit: Circuit, policy: MergePolicy = MergePolicy(), max_columns: int = 8) -> tuple[int, list[Pair]]:
    """Minimum T-depth reachable by any sequence of sound merges.

    Under strict order a merge may use any commutation-legal reordering (see
    :func:`trace_merge`) and states are memoised on :func:`canonical_order`;
    each witness pair indexes the canonical ordering of the state reached so
    far.  Under ``Order.PAPER`` every mergeable pair is allowed and each witness
    pair indexes the circuit produced by the previous merge.
    """
    start = canonicalize(circuit)
    if t_depth(start) > max_columns:
        raise SearchLimitError(f"{t_depth(start)} layers exceeds the exhaustive-search limit of {max_columns}")
    if policy.order is Order.STRICT:
        if start.residues:
            raise ValueError("exhaustive strict search expects a circuit without residues")
        return _strict_search(canonical_order(start.columns), policy)
    memo: dict = {}
    floor = 0 if policy.overlap is Overlap.EQUAL_AXIS else min(1, t_depth(start))

    def search(c: Circuit) -> tuple[int, list[Pair]]:
        hit = memo.get(c.columns)
        if hit is not None:
            return hit
        best = (t_depth(c), [])
        for pair in candidate_pairs(c, policy):
            if best[0] <= floor:
                break
            depth, tail = search(canonicalize(apply_merge_plan(c, [pair], policy)))
            if depth < best[0]:
                best = (depth, [pair, *tail])
        memo[c.columns] = best
        return best

    depth, witness = search(start)
    return depth, list(witness)


def _strict_search(start: tuple[Column, ...], policy: MergePolicy) -> tuple[int, list[Pair]]:
    memo: dict = {}
    floor = 0 if policy.overlap is Overlap.EQUAL_AXIS else min(1, len(start))

    def search(cols: tuple[Column, ...]) -> tuple[int, list[Pair]]:
        hit = memo.get(cols)
        if hit is not None:
            return hit
        best = (len(cols), [])
        for i, j in itertools.combinations(range(len(cols)), 2):
            if best[0] <= floor:
                break
            step = trace_merge(cols, i, j, policy)
            if step is None:
                continue
            depth, tail = search(canonical_order(step[0]))
            if depth < best[0]:
                best = (depth, [(i, j), *tail])
        memo[cols] = best
        return best

    depth, witness = search(start)
    return depth, list(witness)


@dataclass(frozen=True)
class LookaheadParams:
    window: int = 6
    policy: MergePolicy = MergePolicy()

    def __post_init__(self):
        if not 2 <= self.window <= MAX_WINDOW:
            raise ValueError(f"window must be in 2..{MAX_WINDOW}, got {self.window}")


def _chain_merge(cols, perm, policy, after=(0, 0, 0)):
    """Merge neighbours greedily along ``perm``; returns (columns, residues by local index, merges).

    ``after`` holds the (x, y, z) masks of every column past the window; under
    strict order a merge is refused if its residues would not commute with them
    or with the rest of the window.
    """
    strict = policy.order is Order.STRICT
    later = [tuple(after)] * len(perm)
    for t in range(len(perm) - 2, -1, -1):
        c = cols[perm[t + 1]]
        lx, ly, lz = later[t + 1]
        later[t] = (lx | c.x, ly | c.y, lz | c.z)
    out: list[Column] = []
    out_res: list[tuple[int, CliffordResidue]] = []
    acc = cols[perm[0]]
    acc_res: list[CliffordResidue] = []
    rmask = [0, 0, 0]
    merges = 0
    for t in range(1, len(perm)):
        nxt = cols[perm[t]]
        ok = bool(can_merge(acc, nxt, policy))
        if ok and strict and acc_res:
            ok = not _conflict(nxt.x, nxt.y, nxt.z, *rmask)
        if ok and strict and acc.support & nxt.support:
            ok = not _conflict(acc.x & nxt.x, acc.y & nxt.y, acc.z & nxt.z, *later[t])
        if ok:
            acc, extracted = merge(acc, nxt, policy)
            acc_res.extend(extracted)
            for r in extracted:
                rmask[r.axis] |= 1 << r.qubit
            merges += 1
            continue
        out.append(acc)
        out_res.extend((len(out) - 1, r) for r in acc_res)
        acc, acc_res, rmask = nxt, [], [0, 0, 0]
    out.append(acc)
    out_res.extend((len(out) - 1, r) for r in acc_res)
    return out, out_res, merges


def _legal_permutations(cols, strict):
    """Window orderings reachable by swapping commuting neighbours only."""
    w = len(cols)
    if not strict:
        yield from itertools.permutations(range(w))
        return
    clash = [[bool(_conflict(a.x, a.y, a.z, b.x, b.y, b.z)) for b in cols] for a in cols]
    for perm in itertools.permutations(range(w)):
        if all(not (perm[p] > perm[q] and clash[perm[p]][perm[q]]) for p in range(w) for q in range(p + 1, w)):
            yield perm


def lookahead_optimize(circuit: Circuit, params: LookaheadParams = LookaheadParams()) -> tuple[Circuit, dict]:
    """Window-permutation merging, the reference lookahead baseline.

    The circuit is cut into consecutive windows of ``params.window`` layers.
    Within each window every ordering (every commutation-legal ordering under
    strict order) is tried, neighbours are merged greedily along it, and the
    ordering with the most merges wins (first one on ties).
    """
    t0 = time.perf_counter()
    policy = params.policy
    start = canonicalize(circuit)
    if start.residues:
        raise ValueError("lookahead expects a circuit without residues")
    cols = start.columns
    strict = policy.order is Order.STRICT
    new_cols: list[Column] = []
    residues: list[CliffordResidue] = []
    merges = 0
    windows = 0
    for lo in range(0, len(cols), params.window):
        win = cols[lo:lo + params.window]
        windows += 1
        after = start.suffix_masks[min(lo + params.window, len(cols))]
        best = None
        for perm in _legal_permutations(win, strict):
            out, out_res, count = _chain_merge(win, perm, policy, after)
            if best is None or count > best[2]:
                best = (out, out_res, count)
            if count == len(win) - 1:
                break
        out, out_res, count = best
        base = len(new_cols)
        new_cols.extend(out)
        residues.extend(CliffordResidue(r.qubit, r.axis, r.phase, base + k) for k, r in out_res)
        merges += count
    result = canonicalize(Circuit(start.n, tuple(new_cols), tuple(residues)))
    report = {
        "method": "reference lookahead",
        "window": params.window,
        "policy": str(policy),
        "windows": windows,
        "merges": merges,
        "t_depth": t_depth(result),
        "t_count": t_count(result),
        "seconds": time.perf_counter() - t0,
    }
    return result, report
