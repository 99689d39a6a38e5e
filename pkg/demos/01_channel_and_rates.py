"""Build a seeded downlink channel and evaluate per-beam rates.

Walks the basic objects: the link budget folds free-space loss, antenna
gains, and thermal noise into one per-path gain, the channel stacks
Rician multipath rows, and the rate report scores a precoder/pattern
pair in bit/s/Hz.
"""

import numpy as np

from beamhop import (
    LinkBudget,
    PathSpec,
    SystemConfig,
    generate_channel,
    path_power,
    rate_matrix,
    steering_vector,
)
from beamhop.fp_engine import matched_filter_precoders
from beamhop.pattern import random_pattern

cfg = SystemConfig(n_bs=32, n_s=6, n_rf=6, k_beams=2, m_slots=3, p_tot=120.0)
budget = LinkBudget()
paths = PathSpec()

print("== link budget ==")
eta = path_power(budget, cfg.n_bs)
print(f"per-path mean power gain eta = {eta:.3e}")
print(f"steering vector (4 antennas, boresight): {steering_vector(4, 0.0)}")

print("\n== channel ==")
channel = generate_channel(cfg, budget, paths, np.random.default_rng(42))
print(f"H shape: {channel.h.shape}")
print("per-beam ||h_n||^2:", np.round(np.sum(np.abs(channel.h) ** 2, axis=1), 6))

print("\n== matched-filter rates on a random illumination pattern ==")
pattern = random_pattern(cfg.n_s, cfg.k_beams, cfg.m_slots, np.random.default_rng(7))
print("pattern (beams x slots):")
print(pattern.x)
precoders = matched_filter_precoders(channel, pattern.weights(), cfg.p_tot)
report = rate_matrix(channel, precoders, pattern.weights(), cfg.sigma_sq,
                     gamma=cfg.gamma)
print("rate matrix (bit/s/Hz):")
print(np.round(report.rates, 4))
print(f"per-beam sums: {np.round(report.per_beam_sum, 4)}")
print(f"sum-rate over the hopping period: {report.total:.4f} bit/s/Hz")
