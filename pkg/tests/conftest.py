import numpy as np
import pytest

from beamhop import ChannelSet, SystemConfig


def gaussian_channel(seed, n_s, n_bs):
    """Unit-variance complex Gaussian rows; moderate-SNR test channels."""
    r = np.random.default_rng(seed)
    h = (r.standard_normal((n_s, n_bs)) + 1j * r.standard_normal((n_s, n_bs))) / np.sqrt(2)
    return ChannelSet(h=h)


def random_precoders(seed, n_bs, n_s, m, p_tot, fill=0.9):
    """Random complex precoders scaled to a fraction of the power budget."""
    r = np.random.default_rng(seed)
    p = r.standard_normal((m, n_bs, n_s)) + 1j * r.standard_normal((m, n_bs, n_s))
    for t in range(m):
        p[t] *= np.sqrt(fill * p_tot / np.sum(np.abs(p[t]) ** 2))
    return p


@pytest.fixture
def tiny_config():
    """4-beam, 2-slot system used across the solver tests."""
    return SystemConfig(n_bs=4, n_s=4, n_rf=4, k_beams=2, m_slots=2,
                        p_tot=10.0, gamma=0.0)


@pytest.fixture
def midsize_config():
    return SystemConfig(n_bs=8, n_s=4, n_rf=4, k_beams=2, m_slots=2,
                        p_tot=10.0, gamma=0.0)
