"""Quadratic-transform auxiliaries and the concave rate surrogate.

The auxiliary update and the surrogate share one identity: plugging the
stationary auxiliary back into the surrogate reproduces the true rate
exactly.  The same closed form serves both the beamforming block (binary
or relaxed weights with the precoders free) and the illumination block
(precoders frozen, weights free); instances carry a role tag so the two
uses cannot be mixed up silently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core_model import PrecoderSet
from ..errors import DimensionMismatch, NonPositiveLogArgument

ROLE_BEAMFORMING = "beamforming"
ROLE_ILLUMINATION = "illumination"


@dataclass(frozen=True)
class AuxiliaryVars:
    """Per-(beam, slot) auxiliary ratios; zero wherever the weight is zero."""

    values: np.ndarray  # (N_s, M) complex
    role: str

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.values, dtype=complex))
        if v.ndim != 2:
            raise DimensionMismatch("auxiliary values must be (n_s, m_slots)")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def abs_sq(self) -> np.ndarray:
        return np.abs(self.values) ** 2


def _effective(precoders) -> np.ndarray:
    if isinstance(precoders, PrecoderSet):
        return precoders.slots
    return np.asarray(precoders, dtype=complex)


def link_terms(h, slots, weights):
    """Own-signal and interference terms of every (beam, slot) pair.

    Returns ``own[n, t] = h_n p_n^t`` (complex) and the weighted
    interference ``interf[n, t] = sum_{k != n} x_{k,t} |h_n p_k^t|^2``.
    """
    m = slots.shape[0]
    n_s = h.shape[0]
    own = np.empty((n_s, m), dtype=complex)
    interf = np.empty((n_s, m))
    for t in range(m):
        cross = h @ slots[t]
        gains = np.abs(cross) ** 2
        own[:, t] = np.diag(cross)
        interf[:, t] = gains @ weights[:, t] - np.diag(gains) * weights[:, t]
    return own, interf


def _auxiliary(channel, precoders, weights, sigma_sq) -> np.ndarray:
    h = channel.h
    slots = _effective(precoders)
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (h.shape[0], slots.shape[0]):
        raise DimensionMismatch("weights must be (n_s, m_slots)")
    own, interf = link_terms(h, slots, weights)
    return np.sqrt(weights) * own / (interf + sigma_sq)


def beamforming_auxiliary(channel, precoders, weights, sigma_sq) -> AuxiliaryVars:
    """Stationary auxiliary for the beamformer block at the given point."""
    return AuxiliaryVars(values=_auxiliary(channel, precoders, weights, sigma_sq),
                         role=ROLE_BEAMFORMING)


def illumination_auxiliary(channel, precoders, weights, sigma_sq) -> AuxiliaryVars:
    """Stationary auxiliary for the illumination block at the given point.

    Same closed form as the beamforming auxiliary (the two coincide
    entrywise for binary weights); tagged separately because downstream
    consumers differ.
    """
    return AuxiliaryVars(values=_auxiliary(channel, precoders, weights, sigma_sq),
                         role=ROLE_ILLUMINATION)


def surrogate_arguments(channel, precoders, weights, aux, sigma_sq) -> np.ndarray:
    """The (1 + concave quadratic) argument inside the surrogate log."""
    h = channel.h
    slots = _effective(precoders)
    weights = np.asarray(weights, dtype=float)
    values = aux.values if isinstance(aux, AuxiliaryVars) else np.asarray(aux, dtype=complex)
    own, interf = link_terms(h, slots, weights)
    return (1.0
            + 2.0 * np.sqrt(weights) * np.real(np.conj(values) * own)
            - np.abs(values) ** 2 * (interf + sigma_sq))


def surrogate_rates(channel, precoders, weights, aux, sigma_sq) -> np.ndarray:
    """Concave surrogate of the per-beam rate at a fixed auxiliary.

    Equals the true rate matrix when ``aux`` is the stationary auxiliary
    of (precoders, weights) and lower-bounds it for any other auxiliary.
    Raises NonPositiveLogArgument when the log argument is not positive,
    which indicates an auxiliary/precoder mismatch far from the fixed
    point.
    """
    arg = surrogate_arguments(channel, precoders, weights, aux, sigma_sq)
    if np.any(arg <= 0.0):
        raise NonPositiveLogArgument(
            f"surrogate log argument has minimum {arg.min():.3e}"
        )
    return np.log2(arg)
