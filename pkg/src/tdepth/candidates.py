"""Candidate merge pairs, the score-based greedy filter, and initial populations."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .circuit import Circuit, MergePolicy, Order, Overlap, _conflict
from .errors import PlanError

Pair = tuple[int, int]


@dataclass(frozen=True)
class GreedyParams:
    t_max: int | None = None  # None: the circuit's qubit count
    delta_max: float = 1.0
    k_min: int = 8
    beta: float = 0.8

    def __post_init__(self):
        if not 0 <= self.beta < 1:
            raise ValueError(f"beta must be in [0, 1), got {self.beta}")
        if not 0 <= self.delta_max <= 1:
            raise ValueError(f"delta_max must be in [0, 1], got {self.delta_max}")
        if self.k_min < 0:
            raise ValueError(f"k_min must be non-negative, got {self.k_min}")
        if self.t_max is not None and self.t_max < 1:
            raise ValueError(f"t_max must be positive, got {self.t_max}")


@dataclass(frozen=True)
class ScoredPair:
    i: int
    j: int
    score: float


@dataclass(frozen=True)
class Chromosome:
    """An ordered merge plan whose pairs never share a column."""

    pairs: tuple[Pair, ...] = ()

    def __post_init__(self):
        pairs = tuple((min(p), max(p)) for p in self.pairs)
        used: set[int] = set()
        for i, j in pairs:
            if i == j or i in used or j in used:
                raise PlanError(f"chromosome pair {(i, j)} overlaps an earlier pair")
            used.update((i, j))
        object.__setattr__(self, "pairs", pairs)

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)


def candidate_pairs(circuit: Circuit, policy: MergePolicy = MergePolicy()) -> list[Pair]:
    """All valid merge pairs ``i < j`` in lexicographic order.

    Under strict ordering, column ``j`` is walked leftwards and the walk stops
    at the first column or residue it does not commute with, since no pair
    further left can be reached.  Pairs whose extracted residues would not
    commute with the columns after ``j`` are skipped.
    """
    cols = circuit.columns
    disjoint = policy.overlap is Overlap.DISJOINT_ONLY
    strict = policy.order is Order.STRICT
    rmasks = circuit.residue_masks
    suffix = circuit.suffix_masks
    out: list[Pair] = []
    for j, b in enumerate(cols):
        bx, by, bz, bs = b.x, b.y, b.z, b.support
        bphase = b.phase
        later = suffix[j + 1]
        for i in range(j - 1, -1, -1):
            if strict:
                rm = rmasks.get(i)
                if rm and _conflict(bx, by, bz, *rm):
                    break
            a = cols[i]
            clash = _conflict(a.x, a.y, a.z, bx, by, bz)
            if not clash:
                asup = a.support
                overlap = asup & bs
                if (a.phase is bphase or not asup or not bs) and not (disjoint and overlap):
                    # extracted residues must commute with everything after j
                    if not (strict and overlap and _conflict(a.x & bx, a.y & by, a.z & bz, *later)):
                        out.append((i, j))
            elif strict:
                break
    out.sort()
    return out


def greedy_filter(circuit: Circuit, pairs: Iterable[Pair], params: GreedyParams = GreedyParams()) -> list[Pair]:
    """Keep the best-scoring non-overlapping pairs.

    Small pools (``len(pairs) <= k_min``) are returned untouched.
    """
    pairs = list(pairs)
    if len(pairs) <= params.k_min:
        return pairs
    n = circuit.n
    t_max = n if params.t_max is None else params.t_max
    counts = [col.t_count for col in circuit.columns]
    density = [t / n for t in counts]
    scored = []
    for i, j in pairs:
        gap = abs(density[i] - density[j])
        t_sum = counts[i] + counts[j]
        if gap <= params.delta_max and t_sum <= t_max:
            scored.append(ScoredPair(i, j, 1.0 - gap + params.beta * (t_max - t_sum)))
    scored.sort(key=lambda s: (-s.score, s.i, s.j))
    used: set[int] = set()
    selected = []
    for s in scored:
        if s.i not in used and s.j not in used:
            selected.append((s.i, s.j))
            used.update((s.i, s.j))
    return selected


def substream(seed: int, *keys: int) -> np.random.Generator:
    """Independent PCG64 stream for one (seed, round, generation, slot) address."""
    return np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, *keys])


def random_chromosome(pool: Sequence[Pair], rng: np.random.Generator) -> Chromosome:
    """Random maximal non-overlapping subset of ``pool``."""
    used: set[int] = set()
    pairs = []
    for k in rng.permutation(len(pool)):
        i, j = pool[k]
        if i not in used and j not in used:
            pairs.append((i, j))
            used.update((i, j))
    return Chromosome(tuple(pairs))


def density_pairing(circuit: Circuit, pool: Sequence[Pair]) -> Chromosome:
    """Pair the densest columns with the sparsest partners the pool allows."""
    n = max(circuit.n, 1)
    gamma = [col.t_count / n for col in circuit.columns]
    partners: dict[int, list[int]] = {}
    for i, j in pool:
        partners.setdefault(i, []).append(j)
        partners.setdefault(j, []).append(i)
    used: set[int] = set()
    pairs = []
    for u in sorted(partners, key=lambda k: (-gamma[k], k)):
        if u in used:
            continue
        free = [v for v in partners[u] if v not in used]
        if not free:
            continue
        v = min(free, key=lambda k: (gamma[k], k))
        pairs.append((min(u, v), max(u, v)))
        used.update((u, v))
    return Chromosome(tuple(pairs))


def seed_population(
    circuit: Circuit,
    filtered: Sequence[Pair],
    population_size: int,
    seed: int,
    round_index: int = 0,
) -> list[Chromosome]:
    if population_size < 1:
        raise ValueError("population size must be at least 1")
    filtered = list(filtered)
    if not filtered:
        return [Chromosome() for _ in range(population_size)]
    population = [density_pairing(circuit, filtered)]
    for slot in range(1, population_size):
        population.append(random_chromosome(filtered, substream(seed, round_index, 0, slot)))
    return population
