"""Seeded synthetic T-layer circuits and size/density suites.

Every instance draws from numpy's PCG64 generator seeded with its own
integer seed, so an instance can be rebuilt from its manifest entry alone.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .circuit import Circuit, Column, Phase


@dataclass(frozen=True)
class GenSpec:
    n: int
    c: int
    t_total: int
    seed: int

    def __post_init__(self):
        if self.n < 1 or self.c < 0:
            raise ValueError(f"need n >= 1 and c >= 0, got n={self.n}, c={self.c}")
        if not 0 <= self.t_total <= self.n * self.c:
            raise ValueError(f"t_total={self.t_total} outside 0..{self.n * self.c}")

    @property
    def density(self) -> float:
        return self.t_total / (self.n * self.c) if self.c else 0.0


@dataclass(frozen=True)
class SuiteProfile:
    name: str
    qubits: tuple[int, int]
    columns: tuple[int, int]
    densities: tuple[float, ...]
    count: int


PROFILES = {
    "small": SuiteProfile("small", (10, 20), (40, 60), (0.1, 0.3, 0.5, 1.0), 20),
    "moderate": SuiteProfile("moderate", (60, 70), (200, 300), (0.1, 0.3, 0.5, 1.0), 20),
    "large": SuiteProfile("large", (90, 100), (450, 500), (0.3, 0.5, 0.75, 1.0), 20),
}


def generate(spec: GenSpec) -> Circuit:
    """Place ``t_total`` rotations on distinct cells of the n-by-c grid, uniformly.

    Draw order (fixed, part of the reproducibility contract): cell indices,
    then one axis per rotation, then one sign per column.
    """
    n, c = spec.n, spec.c
    rng = np.random.default_rng(spec.seed)
    cells = rng.choice(n * c, size=spec.t_total, replace=False)
    axes = rng.integers(0, 3, size=spec.t_total)
    plus = rng.random(c) < 0.5
    masks = [[0, 0, 0] for _ in range(c)]
    for cell, axis in zip(cells.tolist(), axes.tolist()):
        col, q = divmod(cell, n)
        masks[col][axis] |= 1 << q
    columns = tuple(
        Column(n, *m, phase=Phase.PLUS if p else Phase.MINUS) for m, p in zip(masks, plus.tolist())
    )
    return Circuit(n, columns)


def suite_specs(profile: SuiteProfile, master_seed: int) -> list[GenSpec]:
    """Instance specs for a suite; densities cycle through the profile's grades."""
    rng = np.random.default_rng(master_seed)
    specs = []
    for k in range(profile.count):
        n = int(rng.integers(profile.qubits[0], profile.qubits[1] + 1))
        c = int(rng.integers(profile.columns[0], profile.columns[1] + 1))
        density = profile.densities[k % len(profile.densities)]
        seed = int(rng.integers(0, 2**63 - 1))
        specs.append(GenSpec(n, c, round(density * n * c), seed))
    return specs


def generate_suite(profile: SuiteProfile, master_seed: int) -> list[tuple[GenSpec, Circuit]]:
    return [(spec, generate(spec)) for spec in suite_specs(profile, master_seed)]


def manifest(specs) -> list[dict]:
    return [asdict(s) for s in specs]


def specs_from_manifest(records) -> list[GenSpec]:
    return [GenSpec(int(r["n"]), int(r["c"]), int(r["t_total"]), int(r["seed"])) for r in records]
