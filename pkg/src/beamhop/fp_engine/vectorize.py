"""Stacked vectorization of the illumination subproblem.

With the precoders frozen, every per-(beam, slot) surrogate becomes a
function of the stacked relaxed vector x (index n + N_s * t): a square
root of the own entry scaled by a signal coefficient minus a linear
interference term.  The dense per-pair vectors carry exactly one nonzero
signal entry and at most N_s - 1 interference entries, all inside the
slot's block; internally we only store the compact per-slot tables.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core_model import PrecoderSet
from .auxiliary import AuxiliaryVars


@dataclass(frozen=True)
class PatternVectorization:
    """Compact tables of the stacked illumination subproblem.

    signal[n, t]        coefficient of sqrt(x_{n,t}) (2 Re of auxiliary
                        times own-link gain); nonnegative at the
                        stationary auxiliary.
    interference[n, t, k]  |h_n p_k^t|^2 for k != n, zero at k = n.
    aux_abs_sq[n, t]    squared magnitude of the frozen auxiliary.
    """

    signal: np.ndarray
    interference: np.ndarray
    aux_abs_sq: np.ndarray
    n_s: int
    m: int

    def signal_vector(self, n: int, t: int) -> np.ndarray:
        """Dense stacked signal vector of pair (n, t): one nonzero entry."""
        v = np.zeros(self.n_s * self.m)
        v[n + self.n_s * t] = self.signal[n, t]
        return v

    def interference_vector(self, n: int, t: int) -> np.ndarray:
        """Dense stacked interference vector of pair (n, t)."""
        d = np.zeros(self.n_s * self.m)
        d[self.n_s * t:self.n_s * (t + 1)] = self.interference[n, t]
        return d

    def coverage_matrix(self) -> np.ndarray:
        """Row-coverage operator: M horizontally stacked identities."""
        return np.tile(np.eye(self.n_s), self.m)

    def surrogate_values(self, x_vec: np.ndarray, sigma_sq: float) -> np.ndarray:
        """Surrogate matrix (N_s, M) evaluated at a stacked point."""
        xm = np.asarray(x_vec).reshape(self.m, self.n_s)
        arg = self.arguments(xm, sigma_sq)
        return np.log2(arg)

    def arguments(self, xm: np.ndarray, sigma_sq: float) -> np.ndarray:
        """Log arguments as an (N_s, M) matrix; xm is the (M, N_s) reshape."""
        interf = np.einsum("ntk,tk->nt", self.interference, xm)
        return (1.0 + np.sqrt(xm.T) * self.signal
                - self.aux_abs_sq * (interf + sigma_sq))


def build_pattern_vectorization(channel, precoders, aux: AuxiliaryVars) -> PatternVectorization:
    """Freeze the precoders and auxiliary into the stacked tables."""
    h = channel.h
    slots = precoders.slots if isinstance(precoders, PrecoderSet) else np.asarray(precoders, dtype=complex)
    values = aux.values
    n_s, m = values.shape

    signal = np.empty((n_s, m))
    interference = np.empty((n_s, m, n_s))
    for t in range(m):
        cross = h @ slots[t]
        gains = np.abs(cross) ** 2
        signal[:, t] = 2.0 * np.real(np.conj(values[:, t]) * np.diag(cross))
        block = gains.copy()
        np.fill_diagonal(block, 0.0)
        interference[:, t, :] = block
    return PatternVectorization(signal=signal, interference=interference,
                                aux_abs_sq=np.abs(values) ** 2, n_s=n_s, m=m)
