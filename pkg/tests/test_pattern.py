import numpy as np
import pytest

from beamhop import (
    IlluminationPattern,
    RelaxedPattern,
    count_unordered_patterns,
    enumerate_patterns,
    quantize,
    random_pattern,
    random_pattern_with_remainder,
    repair_coverage,
)
from beamhop.errors import InvalidDimensions, TooLarge, Unrepairable

GOLDEN_6_2_3_SEED7 = [[0, 0, 1], [0, 0, 1], [0, 1, 0],
                      [1, 0, 0], [1, 0, 0], [0, 1, 0]]


def test_random_pattern_constraints():
    pat = random_pattern(4, 2, 2, np.random.default_rng(0))
    assert list(pat.column_sums()) == [2, 2]
    assert list(pat.row_sums()) == [1, 1, 1, 1]


def test_random_pattern_unique_case():
    pat = random_pattern(2, 2, 1, np.random.default_rng(123))
    assert np.array_equal(pat.x, np.ones((2, 1), dtype=int))


def test_random_pattern_golden():
    pat = random_pattern(6, 2, 3, np.random.default_rng(7))
    assert pat.x.tolist() == GOLDEN_6_2_3_SEED7


def test_random_pattern_rejects_partition_mismatch():
    with pytest.raises(InvalidDimensions):
        random_pattern(5, 2, 2, np.random.default_rng(0))
    with pytest.raises(InvalidDimensions):
        random_pattern(6, 2, 4, np.random.default_rng(0))


def test_random_pattern_with_remainder():
    pat = random_pattern_with_remainder(7, 3, np.random.default_rng(1))
    assert pat.m_slots == 3
    assert sorted(pat.column_sums().tolist()) == [1, 3, 3]
    assert pat.column_sums()[2] == 1  # remainder slot comes last
    assert list(pat.row_sums()) == [1] * 7


def test_enumerate_counts():
    assert len(enumerate_patterns(4, 2, 2)) == 6
    assert len(enumerate_patterns(2, 2, 1)) == 1
    pats = enumerate_patterns(6, 2, 3)
    assert len(pats) == 90
    assert len({p.x.tobytes() for p in pats}) == 90
    for p in pats:
        assert list(p.column_sums()) == [2, 2, 2]
        assert list(p.row_sums()) == [1] * 6


def test_enumerate_too_large():
    with pytest.raises(TooLarge):
        enumerate_patterns(16, 2, 8)


def test_count_unordered():
    assert count_unordered_patterns(4, 2, 2) == 3
    assert count_unordered_patterns(6, 2, 3) == 15
    assert count_unordered_patterns(2, 2, 1) == 1
    with pytest.raises(InvalidDimensions):
        count_unordered_patterns(5, 2, 2)


def test_random_pattern_covers_support():
    # All 90 ordered layouts appear across many seeded draws.
    seen = set()
    rng = np.random.default_rng(2024)
    for _ in range(10_000):
        seen.add(random_pattern(6, 2, 3, rng).x.tobytes())
    assert len(seen) == 90


def test_quantize_binary_identity():
    rng = np.random.default_rng(6)
    for _ in range(25):
        pat = random_pattern(6, 2, 3, rng)
        relaxed = RelaxedPattern.from_weights(pat.weights())
        assert np.array_equal(quantize(relaxed, 6, 2, 3).x, pat.x)


def test_quantize_overfull_column_keeps_largest():
    weights = np.array([[0.9], [0.8], [0.7], [0.1]])
    relaxed = RelaxedPattern.from_weights(weights)
    out = quantize(relaxed, 4, 2, 1)
    assert out.x[:, 0].tolist() == [1, 1, 0, 0]


def test_quantize_tie_break_lowest_index():
    relaxed = RelaxedPattern.uniform(4, 2, 2)
    out = quantize(relaxed, 4, 2, 2)
    assert out.x.tolist() == [[1, 1], [1, 1], [0, 0], [0, 0]]


def test_repair_noop_when_covered():
    pat = random_pattern(4, 2, 2, np.random.default_rng(1))
    relaxed = RelaxedPattern.uniform(4, 2, 2)
    assert np.array_equal(repair_coverage(pat, relaxed, 2).x, pat.x)


def test_repair_spare_capacity():
    x = np.array([[1, 0], [1, 0], [0, 1], [0, 0]])
    relaxed = RelaxedPattern.from_weights(
        np.array([[0.9, 0.1], [0.8, 0.1], [0.1, 0.9], [0.2, 0.6]]))
    out = repair_coverage(IlluminationPattern(x=x), relaxed, 2)
    # beam 3 goes to slot 1, the only slot with spare capacity.
    assert out.x[3].tolist() == [0, 1]
    assert np.array_equal(out.x[:3], x[:3])


def test_repair_displacement():
    # All slots full; beam 3 prefers slot 0, where beam 0 (the only row
    # lit elsewhere as well) gives up its entry.
    x = np.array([[1, 1], [1, 0], [0, 1], [0, 0]])
    relaxed = RelaxedPattern.from_weights(
        np.array([[0.4, 0.8], [0.9, 0.1], [0.1, 0.9], [0.6, 0.2]]))
    out = repair_coverage(IlluminationPattern(x=x), relaxed, 2)
    assert out.x[3].tolist() == [1, 0]
    assert out.x[0].tolist() == [0, 1]
    assert np.array_equal(out.x[1:3], x[1:3])
    assert np.all(out.column_sums() <= 2)
    assert np.all(out.row_sums() >= 1)


def test_quantize_repair_invariants():
    rng = np.random.default_rng(99)
    n_s, k, m = 5, 2, 3
    for _ in range(200):
        vec = rng.uniform(size=n_s * m)
        relaxed = RelaxedPattern(x_vec=vec, n_s=n_s, m=m)
        out = repair_coverage(quantize(relaxed, n_s, k, m), relaxed, k)
        assert np.all(out.column_sums() <= k)
        assert np.all(out.row_sums() >= 1)


def test_repair_unrepairable():
    x = np.zeros((5, 2), dtype=int)
    relaxed = RelaxedPattern(x_vec=np.zeros(10), n_s=5, m=2)
    with pytest.raises(Unrepairable):
        repair_coverage(IlluminationPattern(x=x), relaxed, 2)


def test_pattern_json_roundtrip():
    pat = random_pattern(6, 2, 3, np.random.default_rng(17))
    again = IlluminationPattern.from_json(pat.to_json())
    assert again == pat
    assert hash(again) == hash(pat)


def test_relaxed_pattern_layout():
    # Stacked vector index n + N_s * t maps back to weights[n, t].
    vec = np.arange(8) / 10.0
    relaxed = RelaxedPattern(x_vec=vec, n_s=4, m=2)
    w = relaxed.weights()
    assert w[1, 0] == pytest.approx(0.1)
    assert w[1, 1] == pytest.approx(0.5)
    assert np.array_equal(RelaxedPattern.from_weights(w).x_vec, vec)


def test_pattern_validation():
    with pytest.raises(InvalidDimensions):
        IlluminationPattern(x=np.array([[0, 2], [1, 0]]))
    with pytest.raises(InvalidDimensions):
        RelaxedPattern(x_vec=np.array([0.5, 1.4]), n_s=2, m=1)
