"""Genetic search over merge plans, and the round loop that applies the winners."""
from __future__ import annotations

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .candidates import (
    Chromosome,
    GreedyParams,
    Pair,
    candidate_pairs,
    greedy_filter,
    random_chromosome,
    seed_population,
    substream,
)
from .circuit import (
    Circuit,
    MergePolicy,
    apply_merge_plan,
    canonicalize,
    pair_is_valid,
    t_count,
    t_depth,
)
from .errors import CircuitError
from .expansion import ExpansionParams, expand_circuit

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GaParams:
    population_size: int = 20
    generations: int = 20
    elite_k: int = 4
    mutation_rate: float = 0.2
    max_rounds: int | None = None
    rng_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.population_size < 1:
            raise ValueError("population_size must be at least 1")
        if self.generations < 1:
            raise ValueError("generations must be at least 1")
        if not 1 <= self.elite_k <= self.population_size:
            raise ValueError(f"elite_k must be in 1..{self.population_size}, got {self.elite_k}")
        if not 0 <= self.mutation_rate <= 1:
            raise ValueError(f"mutation_rate must be in [0, 1], got {self.mutation_rate}")
        if self.max_rounds is not None and self.max_rounds < 0:
            raise ValueError("max_rounds must be non-negative")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")


@dataclass(frozen=True)
class RoundLog:
    round: int
    pool_size: int
    filtered_size: int
    best_fitness: int
    pairs: tuple[Pair, ...]
    t_depth: int
    t_count: int
    residues: int
    history: tuple[int, ...] = ()  # best-so-far fitness after each generation

    def as_dict(self) -> dict:
        return {
            "round": self.round,
            "pool_size": self.pool_size,
            "filtered_size": self.filtered_size,
            "best_fitness": self.best_fitness,
            "pairs": [list(p) for p in self.pairs],
            "t_depth": self.t_depth,
            "t_count": self.t_count,
            "residues": self.residues,
            "history": list(self.history),
        }


def fitness(chromosome: Chromosome | Sequence[Pair], circuit: Circuit, policy: MergePolicy = MergePolicy(), valid=None) -> int:
    """Number of pairs that are valid merges when taken in order with a used-column set.

    ``valid`` optionally supplies a precomputed set of valid pairs for ``circuit``.
    """
    c = len(circuit.columns)
    used: set[int] = set()
    score = 0
    for pair in chromosome:
        i, j = min(pair), max(pair)
        if i < 0 or j >= c:
            raise CircuitError(f"pair {tuple(pair)} outside 0..{c - 1}")
        if i in used or j in used or i == j:
            continue
        ok = (i, j) in valid if valid is not None else pair_is_valid(circuit, i, j, policy)
        if ok:
            score += 1
            used.update((i, j))
    return score


def counted_pairs(chromosome: Chromosome, circuit: Circuit, policy: MergePolicy = MergePolicy(), valid=None) -> tuple[Pair, ...]:
    """The pairs :func:`fitness` counts, i.e. the plan that actually gets applied."""
    used: set[int] = set()
    out = []
    for i, j in chromosome:
        if i in used or j in used:
            continue
        if (i, j) in valid if valid is not None else pair_is_valid(circuit, i, j, policy):
            out.append((i, j))
            used.update((i, j))
    return tuple(out)


def crossover(a: Chromosome, b: Chromosome, rng=None) -> Chromosome:
    """Front half of ``a`` (rounded up) followed by the back half of ``b``, overlaps dropped.

    Deterministic; ``rng`` is accepted for interface symmetry with :func:`mutate`.
    """
    head = a.pairs[: (len(a.pairs) + 1) // 2]
    tail = b.pairs[len(b.pairs) // 2:]
    used: set[int] = set()
    out = []
    for i, j in itertools.chain(head, tail):
        if i not in used and j not in used:
            out.append((i, j))
            used.update((i, j))
    return Chromosome(tuple(out))


def mutate(offspring: Chromosome, pool: Sequence[Pair], rate: float, rng: np.random.Generator) -> Chromosome:
    """Reset mutation: with probability ``rate`` replace the offspring by a fresh random plan."""
    if not 0 <= rate <= 1:
        raise ValueError(f"mutation rate must be in [0, 1], got {rate}")
    if rng.random() < rate:
        return random_chromosome(pool, rng)
    return offspring


def _evaluate(population, circuit, policy, valid, workers):
    if workers > 1 and len(population) > 1:
        with ThreadPoolExecutor(workers) as ex:
            return list(ex.map(lambda ch: fitness(ch, circuit, policy, valid), population))
    return [fitness(ch, circuit, policy, valid) for ch in population]


def evolve_round(
    circuit: Circuit,
    params: GaParams = GaParams(),
    greedy: GreedyParams = GreedyParams(),
    policy: MergePolicy = MergePolicy(),
    round_index: int = 1,
) -> tuple[Chromosome, RoundLog]:
    """One outer round: enumerate, filter, seed, then evolve for ``generations``.

    An empty candidate pool returns an empty chromosome with fitness 0.
    """
    pool = candidate_pairs(circuit, policy)
    depth, count = t_depth(circuit), t_count(circuit)
    if not pool:
        return Chromosome(), RoundLog(round_index, 0, 0, 0, (), depth, count, 0)
    filtered = greedy_filter(circuit, pool, greedy)
    valid = frozenset(pool)
    seed = params.rng_seed
    n_pop, k = params.population_size, params.elite_k
    k = min(k, n_pop)

    population = seed_population(circuit, filtered, n_pop, seed, round_index)
    scores = _evaluate(population, circuit, policy, valid, params.workers)
    top = max(range(n_pop), key=lambda s: (scores[s], -s))
    best, best_score = population[top], scores[top]
    history = []
    for gen in range(1, params.generations + 1):
        ranked = sorted(range(n_pop), key=lambda s: -scores[s])
        elite = [population[s] for s in ranked[:k]]
        elite_scores = [scores[s] for s in ranked[:k]]
        children = []
        for slot in range(k, n_pop):
            rng = substream(seed, round_index, gen, slot)
            a, b = rng.integers(k), rng.integers(k)
            child = crossover(elite[a], elite[b])
            children.append(mutate(child, filtered, params.mutation_rate, rng))
        population = elite + children
        scores = elite_scores + _evaluate(children, circuit, policy, valid, params.workers)
        top = max(range(n_pop), key=lambda s: (scores[s], -s))
        if scores[top] > best_score:
            best, best_score = population[top], scores[top]
        history.append(best_score)

    plan = Chromosome(counted_pairs(best, circuit, policy, valid))
    return plan, RoundLog(round_index, len(pool), len(filtered), best_score, plan.pairs, depth, count, 0, tuple(history))


@dataclass(frozen=True)
class Optimization:
    """Result of :func:`optimize`; unpacks as ``(circuit, logs)``."""

    circuit: Circuit
    logs: tuple[RoundLog, ...]
    input_t_depth: int
    input_t_count: int
    expanded_t_depth: int
    fell_back: bool = False

    def __iter__(self):
        return iter((self.circuit, self.logs))

    @property
    def merges(self) -> list[tuple[int, Pair]]:
        return [(lg.round, p) for lg in self.logs for p in lg.pairs]


def _rounds(current: Circuit, params, greedy, expansion, policy) -> tuple[Circuit, list[RoundLog]]:
    logs: list[RoundLog] = []
    for r in itertools.count(1):
        if params.max_rounds is not None and r > params.max_rounds:
            break
        work = current
        if r > 1 and expansion.enabled and expansion.every_round:
            work = expand_circuit(current, expansion)
        best, info = evolve_round(work, params, greedy, policy, r)
        if info.best_fitness == 0:
            break
        before = len(work.residues)
        nxt = canonicalize(apply_merge_plan(work, best.pairs, policy))
        if t_depth(nxt) >= t_depth(current):
            # only reachable when re-expansion undoes the round's gains
            break
        current = nxt
        logs.append(RoundLog(
            r, info.pool_size, info.filtered_size, info.best_fitness, info.pairs,
            t_depth(current), t_count(current), len(current.residues) - before, info.history,
        ))
        log.debug("round %d: %d merges, depth %d, count %d", r, info.best_fitness, t_depth(current), t_count(current))
    return current, logs


def optimize(
    circuit: Circuit,
    params: GaParams = GaParams(),
    greedy: GreedyParams = GreedyParams(),
    expansion: ExpansionParams = ExpansionParams(),
    policy: MergePolicy = MergePolicy(),
) -> Optimization:
    """Expand, then repeat GA rounds until a round finds nothing to merge.

    The result never has more T layers than the input: if the expanded search
    ends deeper than the input, the search is rerun on the unexpanded circuit,
    where every round strictly lowers the depth.
    """
    start = canonicalize(circuit)
    in_depth, in_count = t_depth(start), t_count(start)
    expanded = expand_circuit(start, expansion) if expansion.enabled else start
    current, logs = _rounds(expanded, params, greedy, expansion, policy)
    fell_back = t_depth(current) > in_depth
    if fell_back:
        log.info("expanded search ended deeper than the input (%d > %d); retrying unexpanded", t_depth(current), in_depth)
        current, logs = _rounds(start, params, greedy, ExpansionParams(expansion.alpha, expansion.locality_k, enabled=False), policy)
    return Optimization(current, tuple(logs), in_depth, in_count, t_depth(expanded), fell_back)
