import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import circuits, col, ref_circuit, ref_column, random_circuit, same_up_to_phase
from tdepth.circuit import Circuit, Column, canonicalize, t_count
from tdepth.errors import DegenerateInputError
from tdepth.expansion import (
    ColumnStats,
    ExpansionParams,
    column_stats,
    expand_circuit,
    expand_column,
    expansion_factor,
    local_density_scores,
    split_scores,
)


def full(n, axis="Z", phase="+"):
    return col(n, {q: axis for q in range(n)}, phase)


def test_column_stats_examples():
    assert column_stats(col(10)) == ColumnStats(0, 0.0, 0.0)
    assert column_stats(full(10)) == ColumnStats(10, 1.0, 0.0)
    assert column_stats(col(10, {q: "X" for q in range(5)})) == ColumnStats(5, 0.5, 0.25)


def test_expansion_factor_empty_column_is_one():
    assert expansion_factor(ColumnStats(0, 0.0, 0.0), 10) == 1


def test_expansion_factor_full_column_n100():
    tau = max(1.0, 100**0.3 * math.e**2)
    assert tau == pytest.approx(29.4, abs=0.05)
    assert math.ceil(100 / tau) == 4
    assert expansion_factor(column_stats(full(100)), 100, 0.3) == 4


def test_expansion_factor_half_column_n10():
    first = math.log(11) * 0.75 * 0.5**1.5
    second = math.ceil(5 / max(1.0, 10**0.3 * math.e))
    assert first == pytest.approx(0.636, abs=1e-3)
    assert second == 1
    c = col(10, {q: "Y" for q in range(5)})
    assert expansion_factor(column_stats(c), 10, 0.3) == 2


def test_expansion_factor_first_term_vanishes_at_full_density():
    for n in (1, 7, 32, 100):
        stats = column_stats(full(n))
        tau = max(1.0, n**0.3 * math.e**2)
        assert expansion_factor(stats, n) == min(max(math.ceil(n / tau), 1), n)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 120), st.data(), st.floats(0.05, 1.0))
def test_expansion_factor_in_range(n, data, alpha):
    t = data.draw(st.integers(0, n))
    g = t / n
    e = expansion_factor(ColumnStats(t, g, g * (1 - g)), n, alpha)
    assert 1 <= e <= max(t, 1)


def _hand_scores(occ, k):
    """Per-qubit scalar reference for the three-term local density score."""
    n = len(occ)
    gamma = sum(occ) / n
    mu = gamma * (1 - gamma)
    out = []
    for i in range(n):
        nb = [occ[j] for j in range(n) if abs(j - i) <= k]
        mean = sum(nb) / len(nb)
        out.append(occ[i] + mu * (occ[i] - mean) + (1 - gamma) * sum(nb))
    return out


def test_local_density_scores_examples():
    assert np.all(local_density_scores(col(6), column_stats(col(6)), 2) == 0)
    assert np.allclose(local_density_scores(full(6), column_stats(full(6)), 2), 1.0)
    c = col(5, {0: "Z", 1: "X"})
    got = local_density_scores(c, column_stats(c), 1)
    # hand evaluation: gamma=0.4, mu=0.24
    assert got[0] == pytest.approx(1 + 0.24 * (1 - 1.0) + 0.6 * 2)
    assert got[2] == pytest.approx(0 + 0.24 * (0 - 1 / 3) + 0.6 * 1)
    assert got[4] == pytest.approx(0.0)
    assert np.allclose(got, _hand_scores([1, 1, 0, 0, 0], 1))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.booleans(), min_size=1, max_size=30), st.integers(1, 9))
def test_local_density_scores_match_hand_reference(occ, k):
    c = col(len(occ), {q: "X" for q, b in enumerate(occ) if b})
    got = local_density_scores(c, column_stats(c), k)
    assert np.allclose(got, _hand_scores([int(b) for b in occ], k), atol=1e-12)


def test_split_scores_examples():
    assert np.allclose(split_scores([1, 1, 1, 1]), [0.25] * 4)
    assert np.allclose(split_scores([2, 0, 0, 2]), [0.5, 0, 0, 0.5])
    with pytest.raises(DegenerateInputError):
        split_scores([0, 0])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0, 100), min_size=1, max_size=20).filter(lambda p: sum(p) > 1e-6), st.floats(0.01, 100))
def test_split_scores_normalised_and_scale_invariant(p, c):
    s = split_scores(p)
    assert abs(s.sum() - 1) <= 1e-12
    assert np.allclose(split_scores([c * x for x in p]), s, atol=1e-12)


def test_expand_column_no_split():
    c = col(10, {0: "Z"})
    assert expand_column(c) == (c,)


def test_expand_column_two_way_example():
    # on 6 qubits four rotations give E = round(0.55 + 1) = 2
    c = col(6, {0: "Z", 1: "X", 2: "Y", 3: "Z"})
    assert expansion_factor(column_stats(c), 6) == 2
    parts = expand_column(c)
    assert len(parts) == 2
    assert [p.t_count for p in parts] == [2, 2]
    assert parts[0].support & parts[1].support == 0
    assert all(p.phase == c.phase for p in parts)
    assert same_up_to_phase(ref_column(parts[1]) @ ref_column(parts[0]), ref_column(c))


def test_expand_full_column_n100():
    parts = expand_column(full(100, "X", "-"))
    assert [p.t_count for p in parts] == [25, 25, 25, 25]


def test_expand_column_partitions_support():
    rng = np.random.default_rng(3)
    for _ in range(200):
        n = int(rng.integers(1, 60))
        gates = {q: "XYZ"[int(rng.integers(3))] for q in range(n) if rng.random() < rng.random()}
        c = col(n, gates, "-")
        parts = expand_column(c)
        union = 0
        for p in parts:
            assert union & p.support == 0
            union |= p.support
            assert p.phase == c.phase and p.t_count >= 1 or c.is_empty
            assert all(p[q] == c[q] for q in p.gates())
        assert union == c.support


def test_expand_circuit_disabled_and_empty():
    c = random_circuit(1, 5, 6, 0.8)
    assert expand_circuit(c, ExpansionParams(enabled=False)) is c
    empty = Circuit(3, (col(3), col(3)))
    assert canonicalize(expand_circuit(empty)) == canonicalize(empty)


@settings(max_examples=100, deadline=None)
@given(circuits(max_n=6, max_c=5))
def test_expand_circuit_preserves_count_and_unitary(circ):
    out = expand_circuit(circ)
    assert t_count(out) == t_count(circ)
    assert same_up_to_phase(ref_circuit(out), ref_circuit(circ))


def test_expansion_params_validation():
    with pytest.raises(ValueError):
        ExpansionParams(alpha=0)
    with pytest.raises(ValueError):
        ExpansionParams(locality_k=10)
