"""Rician multipath downlink channel between satellite and beam positions.

The per-path power folds the whole link budget (free-space loss, antenna
gains, thermal noise) into a single dimensionless gain, so rate
computations can use unit noise power downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidSize

LIGHT_SPEED = 299792458.0


@dataclass(frozen=True)
class LinkBudget:
    """Link-budget scalars; all strictly positive."""

    bandwidth_hz: float = 250e6
    carrier_hz: float = 20e9
    distance_m: float = 550e3          # orbit altitude; not pinned by the model
    boltzmann: float = 1.380649e-23
    noise_temp_k: float = 293.0
    tx_gain: float = 1.0
    rx_gain: float = 1.0
    antenna_spacing_wavelengths: float = 0.5
    light_speed: float = LIGHT_SPEED

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if not value > 0:
                raise ValueError(f"LinkBudget.{name} must be strictly positive")


@dataclass(frozen=True)
class PathSpec:
    """Multipath geometry: path count, Rician factor, physical angle range."""

    n_paths: int = 2
    rician_factor_db: float = 10.0
    # Physical departure angles drawn uniformly from this interval (radians).
    angle_low: float = -math.pi / 3
    angle_high: float = math.pi / 3

    def __post_init__(self):
        if self.n_paths < 1:
            raise ValueError("n_paths must be >= 1")
        if not math.isfinite(self.rician_factor_db):
            raise ValueError("rician_factor_db must be finite")
        if not self.angle_low < self.angle_high:
            raise ValueError("angle_low must be below angle_high")


@dataclass(frozen=True)
class ChannelSet:
    """Stacked channel rows, one per beam position: h has shape (N_s, N_BS)."""

    h: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.h, dtype=complex)
        if h.ndim != 2:
            raise ValueError("channel matrix must be 2-D")
        if not np.all(np.isfinite(h)):
            raise ValueError("channel matrix must be finite")
        h = np.ascontiguousarray(h)
        h.flags.writeable = False
        object.__setattr__(self, "h", h)

    @property
    def n_beams(self) -> int:
        return self.h.shape[0]

    @property
    def n_antennas(self) -> int:
        return self.h.shape[1]

    def row(self, n: int) -> np.ndarray:
        return self.h[n]


def steering_vector(n_ants: int, theta: float) -> np.ndarray:
    """Uniform-linear-array steering vector, unit Euclidean norm.

    ``theta`` is the spatial frequency 2 * spacing * (f_c / c) * sin of the
    physical angle; entry i equals exp(j*pi*theta*i) / sqrt(n_ants).
    """
    if n_ants < 1:
        raise InvalidSize("steering vector needs at least one antenna")
    phases = np.exp(1j * np.pi * theta * np.arange(n_ants))
    return phases / np.sqrt(n_ants)


def path_power(budget: LinkBudget, n_bs: int) -> float:
    """Mean squared path gain: free-space loss times gains over noise power."""
    fsl = (budget.light_speed / (4.0 * np.pi * budget.carrier_hz * budget.distance_m)) ** 2
    noise = budget.boltzmann * budget.bandwidth_hz * budget.noise_temp_k
    return fsl * budget.rx_gain * budget.tx_gain * n_bs / noise


def _linear_rician(rician_factor_db: float) -> float:
    return 10.0 ** (rician_factor_db / 10.0)


def sample_path_gain(eta: float, rician_factor_db: float, rng) -> complex:
    """One Rician path gain with E|g|^2 = eta.

    Deterministic line-of-sight part with uniformly random phase plus a
    circular Gaussian diffuse part, mixed by the linear Rician factor.
    """
    chi = _linear_rician(rician_factor_db)
    phase = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
    diffuse = (rng.standard_normal() + 1j * rng.standard_normal()) / np.sqrt(2.0)
    return np.sqrt(eta) * (np.sqrt(chi / (1 + chi)) * phase
                           + np.sqrt(1.0 / (1 + chi)) * diffuse)


def generate_channel(config, budget: LinkBudget, paths: PathSpec, rng) -> ChannelSet:
    """Draw the full (N_s, N_BS) channel matrix.

    Each beam row is the sum over paths of gain times the conjugated
    steering vector.  All draws go through ``rng`` in a fixed order, so
    the result is a pure function of (config, budget, paths, seed).
    """
    n_s, n_bs, n_paths = config.n_s, config.n_bs, paths.n_paths
    eta = path_power(budget, n_bs)
    chi = _linear_rician(paths.rician_factor_db)

    physical = rng.uniform(paths.angle_low, paths.angle_high, size=(n_s, n_paths))
    theta = 2.0 * budget.antenna_spacing_wavelengths * np.sin(physical)
    los_phase = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, size=(n_s, n_paths)))
    diffuse = (rng.standard_normal((n_s, n_paths))
               + 1j * rng.standard_normal((n_s, n_paths))) / np.sqrt(2.0)
    gains = np.sqrt(eta) * (np.sqrt(chi / (1 + chi)) * los_phase
                            + np.sqrt(1.0 / (1 + chi)) * diffuse)

    steering = np.exp(1j * np.pi * theta[:, :, None] * np.arange(n_bs)) / np.sqrt(n_bs)
    h = np.sum(gains[:, :, None] * np.conj(steering), axis=1)
    return ChannelSet(h=h)
