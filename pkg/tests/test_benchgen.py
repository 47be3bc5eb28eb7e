import numpy as np
import pytest

from tdepth.benchgen import PROFILES, GenSpec, SuiteProfile, generate, generate_suite, manifest, specs_from_manifest, suite_specs
from tdepth.circuit import Phase, canonicalize, t_count, t_depth
from tdepth.expansion import column_stats


def test_empty_and_saturated():
    assert t_depth(canonicalize(generate(GenSpec(5, 7, 0, 1)))) == 0
    full = generate(GenSpec(5, 7, 35, 1))
    assert all(column_stats(c).gamma == 1.0 for c in full.columns)


def test_spec_validation():
    with pytest.raises(ValueError):
        GenSpec(3, 3, 10, 0)
    with pytest.raises(ValueError):
        GenSpec(0, 3, 0, 0)


def test_exact_t_count_and_determinism():
    rng = np.random.default_rng(0)
    for _ in range(50):
        n, c = int(rng.integers(1, 30)), int(rng.integers(1, 40))
        spec = GenSpec(n, c, int(rng.integers(0, n * c + 1)), int(rng.integers(1 << 40)))
        circ = generate(spec)
        assert t_count(circ) == spec.t_total
        assert generate(spec) == circ
    assert generate(GenSpec(8, 8, 20, 1)) != generate(GenSpec(8, 8, 20, 2))


def test_phase_balance():
    # saturated grid: empty columns would have their sign normalised away
    circ = generate(GenSpec(2, 20000, 40000, 3))
    plus = sum(c.phase is Phase.PLUS for c in circ.columns)
    assert abs(plus / 20000 - 0.5) <= 0.02


def test_axis_balance():
    circ = generate(GenSpec(20, 500, 5000, 4))
    counts = np.zeros(3)
    for c in circ.columns:
        for a in c.gates().values():
            counts[a] += 1
    assert np.all(np.abs(counts / 5000 - 1 / 3) < 0.03)


def test_column_occupancy_chi_square():
    # sampling cells without replacement makes per-column counts hypergeometric
    from scipy import stats

    n, c, t, runs = 10, 20, 60, 300
    obs = np.zeros(n + 1)
    for seed in range(runs):
        for col in generate(GenSpec(n, c, t, seed)).columns:
            obs[col.t_count] += 1
    expected = stats.hypergeom(n * c, n, t).pmf(np.arange(n + 1)) * runs * c
    keep = expected >= 5
    chi2 = ((obs[keep] - expected[keep]) ** 2 / expected[keep]).sum()
    # lump the sparse tail into one bin
    tail_o, tail_e = obs[~keep].sum(), expected[~keep].sum()
    if tail_e > 0:
        chi2 += (tail_o - tail_e) ** 2 / tail_e
    dof = keep.sum() + (tail_e > 0) - 1
    assert stats.chi2.sf(chi2, dof) > 0.001


def test_suite_ranges_and_determinism():
    for prof in PROFILES.values():
        specs = suite_specs(prof, 42)
        assert len(specs) == prof.count
        for s in specs:
            assert prof.qubits[0] <= s.n <= prof.qubits[1]
            assert prof.columns[0] <= s.c <= prof.columns[1]
        assert specs == suite_specs(prof, 42)
        assert manifest(specs) == manifest(suite_specs(prof, 42))


def test_empty_suite():
    assert generate_suite(SuiteProfile("small", (10, 20), (4, 6), (0.5,), 0), 1) == []


def test_large_full_density_grade():
    prof = SuiteProfile("large", (90, 100), (8, 10), (1.0,), 2)
    for _, circ in generate_suite(prof, 5):
        assert all(column_stats(c).gamma == 1.0 for c in circ.columns)


def test_manifest_round_trip_rebuilds_instance():
    specs = suite_specs(PROFILES["small"], 9)
    again = specs_from_manifest(manifest(specs))
    assert again == specs
    assert generate(again[3]) == generate(specs[3])
