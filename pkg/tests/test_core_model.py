import math

import numpy as np
import pytest

from beamhop import (
    ChannelSet,
    PrecoderSet,
    SystemConfig,
    check_feasibility,
    random_pattern,
    rate_matrix,
    run_ipao,
)
from beamhop.errors import DimensionMismatch, NonFiniteInput

from conftest import gaussian_channel, random_precoders


class TestSystemConfig:
    def test_gamma_broadcast(self):
        cfg = SystemConfig(n_s=4, k_beams=2, m_slots=2, n_rf=4, n_bs=8, gamma=0.3)
        assert cfg.gamma.shape == (4,)
        assert np.all(cfg.gamma == 0.3)

    def test_gamma_vector(self):
        cfg = SystemConfig(n_s=3, k_beams=1, m_slots=3, n_rf=4, n_bs=8,
                           gamma=[0.1, 0.2, 0.3])
        assert cfg.gamma.tolist() == [0.1, 0.2, 0.3]

    def test_coverage_invariant(self):
        with pytest.raises(ValueError):
            SystemConfig(n_s=7, k_beams=2, m_slots=3, n_rf=4, n_bs=8)

    def test_rf_chain_ordering(self):
        with pytest.raises(ValueError):
            SystemConfig(n_s=4, k_beams=3, m_slots=2, n_rf=2, n_bs=8)
        with pytest.raises(ValueError):
            SystemConfig(n_s=4, k_beams=2, m_slots=2, n_rf=16, n_bs=8)

    def test_positivity(self):
        with pytest.raises(ValueError):
            SystemConfig(p_tot=0.0)
        with pytest.raises(ValueError):
            SystemConfig(sigma_sq=0.0)
        with pytest.raises(ValueError):
            SystemConfig(gamma=-0.1)


def scalar_rate_oracle(h, slots, weights, sigma_sq):
    """Element-by-element evaluation of the per-beam rate, written
    independently of the vectorized implementation."""
    n_s = len(h)
    m = len(slots)
    rates = [[0.0] * m for _ in range(n_s)]
    for n in range(n_s):
        for t in range(m):
            own = 0.0 + 0.0j
            for i in range(len(h[n])):
                own += h[n][i] * slots[t][i][n]
            num = weights[n][t] * (own.real ** 2 + own.imag ** 2)
            den = sigma_sq
            for k in range(n_s):
                if k == n:
                    continue
                cross = 0.0 + 0.0j
                for i in range(len(h[n])):
                    cross += h[n][i] * slots[t][i][k]
                den += weights[k][t] * (cross.real ** 2 + cross.imag ** 2)
            rates[n][t] = math.log2(1.0 + num / den)
    return np.array(rates)


class TestRateMatrix:
    def test_zero_weight_zero_rate(self):
        ch = gaussian_channel(0, 3, 4)
        p = random_precoders(1, 4, 3, 2, 10.0)
        w = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]])
        report = rate_matrix(ch, p, w, 1.0)
        assert report.rates[0, 1] == 0.0
        assert report.rates[1, 0] == 0.0
        assert np.all(report.rates[w == 0] == 0.0)

    def test_single_beam_matched_filter(self):
        ch = gaussian_channel(2, 2, 4)
        p_tot = 5.0
        p = np.zeros((1, 4, 2), dtype=complex)
        p[0][:, 0] = np.sqrt(p_tot) * ch.h[0].conj() / np.linalg.norm(ch.h[0])
        w = np.array([[1.0], [0.0]])
        report = rate_matrix(ch, p, w, 1.0)
        expected = np.log2(1 + p_tot * np.linalg.norm(ch.h[0]) ** 2)
        assert report.rates[0, 0] == pytest.approx(expected, rel=1e-12)

    def test_matches_scalar_oracle(self):
        ch = gaussian_channel(7, 2, 4)
        p = random_precoders(8, 4, 2, 1, 10.0)
        w = np.array([[1.0], [1.0]])
        report = rate_matrix(ch, p, w, 1.0)
        oracle = scalar_rate_oracle(ch.h.tolist(), p.tolist(), w.tolist(), 1.0)
        assert np.max(np.abs(report.rates - oracle)) < 1e-12

    def test_total_consistent(self):
        ch = gaussian_channel(3, 4, 6)
        p = random_precoders(4, 6, 4, 3, 12.0)
        w = np.random.default_rng(5).uniform(size=(4, 3))
        report = rate_matrix(ch, p, w, 1.0)
        assert report.total == pytest.approx(report.rates.sum(), rel=1e-12)
        assert np.allclose(report.per_beam_sum, report.rates.sum(axis=1))

    def test_gamma_satisfied(self):
        ch = gaussian_channel(3, 4, 6)
        p = random_precoders(4, 6, 4, 3, 12.0)
        w = np.ones((4, 3))
        report = rate_matrix(ch, p, w, 1.0, gamma=np.array([0.0, 1e9, 0.0, 1e9]))
        assert report.gamma_satisfied.tolist() == [True, False, True, False]

    def test_binary_weights_bit_identical(self):
        ch = gaussian_channel(9, 4, 5)
        p = random_precoders(10, 5, 4, 2, 8.0)
        rng = np.random.default_rng(11)
        w_int = (rng.uniform(size=(4, 2)) < 0.5).astype(int)
        a = rate_matrix(ch, p, w_int, 1.0)
        b = rate_matrix(ch, p, w_int.astype(float), 1.0)
        assert np.array_equal(a.rates, b.rates)

    def test_own_power_monotonicity(self):
        ch = gaussian_channel(13, 3, 4)
        p = random_precoders(14, 4, 3, 2, 9.0, fill=0.5)
        w = np.ones((3, 2))
        base = rate_matrix(ch, p, w, 1.0)
        for c in (1.3, 2.0):
            scaled = p.copy()
            scaled[0][:, 1] *= c
            up = rate_matrix(ch, scaled, w, 1.0)
            assert up.rates[1, 0] >= base.rates[1, 0] - 1e-12

    def test_interference_monotonicity(self):
        ch = gaussian_channel(13, 3, 4)
        p = random_precoders(14, 4, 3, 2, 9.0, fill=0.5)
        w = np.ones((3, 2))
        base = rate_matrix(ch, p, w, 1.0)
        scaled = p.copy()
        scaled[0][:, 2] *= 1.7
        up = rate_matrix(ch, scaled, w, 1.0)
        assert up.rates[1, 0] <= base.rates[1, 0] + 1e-12

    def test_slot_permutation_equivariance(self):
        ch = gaussian_channel(21, 4, 5)
        p = random_precoders(22, 5, 4, 3, 10.0)
        w = np.random.default_rng(23).uniform(size=(4, 3))
        perm = [2, 0, 1]
        a = rate_matrix(ch, p, w, 1.0)
        b = rate_matrix(ch, p[perm], w[:, perm], 1.0)
        assert np.array_equal(a.rates[:, perm], b.rates)

    def test_dimension_mismatch(self):
        ch = gaussian_channel(1, 3, 4)
        p = random_precoders(2, 4, 2, 2, 5.0)
        with pytest.raises(DimensionMismatch):
            rate_matrix(ch, p, np.ones((3, 2)), 1.0)

    def test_non_finite_rejected(self):
        ch = gaussian_channel(1, 3, 4)
        p = random_precoders(2, 4, 3, 2, 5.0)
        p[0, 0, 0] = np.nan
        with pytest.raises(NonFiniteInput):
            rate_matrix(ch, p, np.ones((3, 2)), 1.0)


class TestCheckFeasibility:
    def test_zero_precoders_zero_gamma(self, tiny_config):
        ch = gaussian_channel(0, 4, 4)
        pat = random_pattern(4, 2, 2, np.random.default_rng(0))
        p = PrecoderSet.fully_digital(np.zeros((2, 4, 4), dtype=complex))
        report = rate_matrix(ch, p, pat.weights(), 1.0, gamma=tiny_config.gamma)
        verdict = check_feasibility(report, pat, p, tiny_config)
        assert verdict.feasible

    def test_power_violation_localized(self, tiny_config):
        ch = gaussian_channel(0, 4, 4)
        pat = random_pattern(4, 2, 2, np.random.default_rng(0))
        slots = random_precoders(3, 4, 4, 2, tiny_config.p_tot, fill=1.0)
        slots[1] *= np.sqrt(1.01)
        p = PrecoderSet.fully_digital(slots)
        report = rate_matrix(ch, p, pat.weights(), 1.0, gamma=tiny_config.gamma)
        verdict = check_feasibility(report, pat, p, tiny_config)
        assert verdict.power_violations == [1]
        assert "slot_power" in verdict.violated_families

    def test_gamma_violation_reported(self, tiny_config):
        import dataclasses
        cfg = dataclasses.replace(tiny_config, gamma=100.0)
        ch = gaussian_channel(0, 4, 4)
        pat = random_pattern(4, 2, 2, np.random.default_rng(0))
        p = PrecoderSet.fully_digital(random_precoders(3, 4, 4, 2, cfg.p_tot))
        report = rate_matrix(ch, p, pat.weights(), 1.0, gamma=cfg.gamma)
        verdict = check_feasibility(report, pat, p, cfg)
        assert verdict.gamma_violations == [0, 1, 2, 3]

    def test_unit_modulus_checked_for_hybrid(self, tiny_config):
        analog = np.exp(1j * np.random.default_rng(1).uniform(size=(2, 4, 4)))
        analog[0, 0, 0] *= 1.5
        digital = np.zeros((2, 4, 4), dtype=complex)
        p = PrecoderSet.hybrid(analog, digital)
        pat = random_pattern(4, 2, 2, np.random.default_rng(0))
        ch = gaussian_channel(0, 4, 4)
        report = rate_matrix(ch, p, pat.weights(), 1.0)
        verdict = check_feasibility(report, pat, p, tiny_config)
        assert verdict.unit_modulus_violations == [0]

    def test_beam_count_and_binariness(self, tiny_config):
        x = np.array([[1, 0], [1, 0], [1, 0], [0, 1]])
        ch = gaussian_channel(0, 4, 4)
        p = PrecoderSet.fully_digital(np.zeros((2, 4, 4), dtype=complex))
        report = rate_matrix(ch, p, x.astype(float), 1.0)
        verdict = check_feasibility(report, x, p, tiny_config)
        assert verdict.beam_count_violations == [0]

    def test_converged_ipao_is_feasible(self):
        cfg = SystemConfig(n_bs=4, n_s=2, n_rf=2, k_beams=2, m_slots=1,
                           p_tot=10.0, gamma=0.01)
        ch = gaussian_channel(31, 2, 4)
        result = run_ipao(ch, cfg)
        verdict = check_feasibility(result.report, result.pattern,
                                    result.precoders, cfg)
        assert verdict.feasible
