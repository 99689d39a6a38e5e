import dataclasses

import numpy as np
import pytest

from beamhop import (
    SystemConfig,
    dedupe_candidates,
    enumerate_patterns,
    random_pattern,
    rate_matrix,
    run_iprs,
)
from beamhop.errors import NoCandidates

from conftest import gaussian_channel


def test_dedupe_removes_exact_duplicates():
    rng = np.random.default_rng(0)
    x = random_pattern(4, 2, 2, rng)
    y = random_pattern(4, 2, 2, rng)
    while y == x:
        y = random_pattern(4, 2, 2, rng)
    assert dedupe_candidates([x, x, y]) == [x, y]


def test_dedupe_keeps_distinct():
    pats = enumerate_patterns(4, 2, 2)
    assert dedupe_candidates(pats) == pats


def test_dedupe_bounded_by_ordered_count():
    rng = np.random.default_rng(1)
    candidates = [random_pattern(6, 2, 3, rng) for _ in range(1000)]
    assert len(dedupe_candidates(candidates)) <= 90


def test_run_iprs_deterministic(tiny_config):
    ch = gaussian_channel(5, 4, 4)
    a = run_iprs(ch, tiny_config, 5, np.random.default_rng(99))
    b = run_iprs(ch, tiny_config, 5, np.random.default_rng(99))
    assert np.array_equal(a.per_candidate_totals, b.per_candidate_totals)
    assert a.best_pattern == b.best_pattern
    assert np.array_equal(a.best_precoders.slots, b.best_precoders.slots)
    assert a.best_report.total == b.best_report.total


def test_run_iprs_monotone_in_candidate_count(tiny_config):
    # Best-so-far over the first I candidates never decreases with I.
    ch = gaussian_channel(6, 4, 4)
    result = run_iprs(ch, tiny_config, 6, np.random.default_rng(3))
    prefix_best = np.maximum.accumulate(result.per_candidate_totals)
    assert np.all(np.diff(prefix_best) >= 0)
    assert result.best_report.total == pytest.approx(prefix_best[-1])


def test_run_iprs_best_total_recomputable(tiny_config):
    ch = gaussian_channel(7, 4, 4)
    result = run_iprs(ch, tiny_config, 4, np.random.default_rng(4))
    recomputed = rate_matrix(ch, result.best_precoders,
                             result.best_pattern.weights(),
                             tiny_config.sigma_sq).total
    assert abs(recomputed - result.best_report.total) < 1e-9


def test_run_iprs_duplicates_share_totals(tiny_config):
    ch = gaussian_channel(8, 4, 4)
    pats = enumerate_patterns(4, 2, 2)
    candidates = [pats[0], pats[1], pats[0]]
    result = run_iprs(ch, tiny_config, 3, np.random.default_rng(0),
                      candidates=candidates)
    assert result.candidates_evaluated == 2
    assert result.per_candidate_totals[0] == result.per_candidate_totals[2]


def test_run_iprs_exhaustive_matches_bruteforce(tiny_config):
    from beamhop.fp_engine import ascend_beamformers
    pats = enumerate_patterns(4, 2, 2)
    for seed in (11, 12):
        ch = gaussian_channel(seed, 4, 4)
        result = run_iprs(ch, tiny_config, len(pats), np.random.default_rng(0),
                          candidates=pats)
        best_total, best_idx = -np.inf, None
        for idx, pat in enumerate(pats):
            p, _, _ = ascend_beamformers(ch, pat.weights(), tiny_config,
                                         max_iters=tiny_config.iprs_fp_iters)
            total = rate_matrix(ch, p, pat.weights(), 1.0).total
            if total > best_total:
                best_total, best_idx = total, idx
        assert result.best_index == best_idx
        assert result.best_report.total == pytest.approx(best_total, rel=1e-9)


def test_run_iprs_all_infeasible_flagged(tiny_config):
    cfg = dataclasses.replace(tiny_config, gamma=1000.0)
    ch = gaussian_channel(9, 4, 4)
    result = run_iprs(ch, cfg, 3, np.random.default_rng(1))
    assert not result.feasible
    assert result.candidates_infeasible == result.candidates_evaluated
    assert result.best_report.total == result.per_candidate_totals.max()


def test_run_iprs_no_candidates(tiny_config):
    ch = gaussian_channel(1, 4, 4)
    with pytest.raises(NoCandidates):
        run_iprs(ch, tiny_config, 0, np.random.default_rng(0))
    with pytest.raises(NoCandidates):
        run_iprs(ch, tiny_config, 1, np.random.default_rng(0), candidates=[])


def test_run_iprs_remainder_layout():
    cfg = SystemConfig(n_bs=4, n_s=3, n_rf=3, k_beams=2, m_slots=2,
                       p_tot=10.0, gamma=0.0)
    ch = gaussian_channel(13, 3, 4)
    result = run_iprs(ch, cfg, 3, np.random.default_rng(2))
    assert result.best_pattern.m_slots == 2
    assert np.all(result.best_pattern.column_sums() <= 2)
    assert np.all(result.best_pattern.row_sums() == 1)
