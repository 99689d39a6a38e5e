"""System-level domain types, the SINR/rate evaluator, and feasibility checks.

All rates are in bit/s/Hz (log base 2). The noise power defaults to 1
because the link-budget normalization already folds the thermal noise
into the channel gain; configs may override ``sigma_sq``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NonFiniteInput

# Relative slack applied to every numeric constraint check.  Interior-point
# style solvers return eps-feasible points; exact comparison would fail.
FEAS_RTOL = 1e-9


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class SystemConfig:
    """Scalar system parameters, thresholds, and solver knobs.

    ``gamma`` accepts a scalar (broadcast over beam positions) or a
    length-``n_s`` sequence of per-beam rate thresholds in bit/s/Hz.
    """

    n_bs: int = 64            # satellite antennas
    n_s: int = 6              # total beam positions
    n_rf: int = 6             # RF chains (hybrid stage only)
    k_beams: int = 2          # simultaneous beams per slot
    m_slots: int = 3          # slots per hopping period
    p_tot: float = 120.0      # per-slot transmit power budget, watts
    gamma: object = 0.0       # per-beam rate thresholds, bit/s/Hz
    sigma_sq: float = 1.0     # noise power after normalization
    rng_seed: int = 0

    # Iteration caps, one per stop condition.
    iprs_fp_iters: int = 20       # T1: FP rounds per random-search candidate
    ipao_bf_iters: int = 20       # T2: FP rounds, beamformer block
    ipao_ip_iters: int = 20       # T3: FP rounds, illumination block
    ipao_outer_iters: int = 15    # T4: outer alternations
    hbf_iters: int = 50           # T5: hybrid-factorization alternations

    # Solver tolerances.
    bf_tol: float = 1e-6          # eps for the beamformer subproblem
    ip_tol: float = 1e-6          # eps for the illumination subproblem
    plateau_rtol: float = 1e-4    # early exit on relative objective change

    # Hybrid factorization knobs.
    hbf_restarts: int = 3
    hbf_conjugate_gradient: bool = False

    def __post_init__(self):
        gamma = np.atleast_1d(np.asarray(self.gamma, dtype=float))
        if gamma.size == 1:
            gamma = np.full(self.n_s, float(gamma[0]))
        object.__setattr__(self, "gamma", _freeze(gamma))
        for name in ("n_bs", "n_s", "n_rf", "k_beams", "m_slots"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.k_beams * self.m_slots < self.n_s:
            raise ValueError(
                "k_beams * m_slots must cover all beam positions "
                f"({self.k_beams} * {self.m_slots} < {self.n_s})"
            )
        if not (self.k_beams <= self.n_rf <= self.n_bs):
            raise ValueError("need k_beams <= n_rf <= n_bs")
        if not self.p_tot > 0:
            raise ValueError("p_tot must be positive")
        if not self.sigma_sq > 0:
            raise ValueError("sigma_sq must be positive")
        if gamma.shape != (self.n_s,) or np.any(gamma < 0) or not np.all(np.isfinite(gamma)):
            raise ValueError("gamma must be a nonnegative length-n_s vector")


@dataclass(frozen=True)
class PrecoderSet:
    """Per-slot precoders, either fully digital or hybrid pairs.

    ``slots[t]`` is the effective N_BS x N_s precoding matrix of slot t
    (for hybrid sets this is the analog/digital product).
    """

    slots: np.ndarray                 # (M, N_BS, N_s) complex
    analog: np.ndarray | None = None  # (M, N_BS, N_RF), unit modulus
    digital: np.ndarray | None = None  # (M, N_RF, N_s)

    @classmethod
    def fully_digital(cls, slots) -> "PrecoderSet":
        slots = np.ascontiguousarray(np.asarray(slots, dtype=complex))
        if slots.ndim != 3:
            raise DimensionMismatch("expected (m_slots, n_bs, n_s) array")
        return cls(slots=_freeze(slots))

    @classmethod
    def hybrid(cls, analog, digital) -> "PrecoderSet":
        analog = np.asarray(analog, dtype=complex)
        digital = np.asarray(digital, dtype=complex)
        if analog.ndim != 3 or digital.ndim != 3 or analog.shape[0] != digital.shape[0]:
            raise DimensionMismatch("analog/digital stacks disagree on slot count")
        if analog.shape[2] != digital.shape[1]:
            raise DimensionMismatch("RF-chain dimension mismatch between analog and digital")
        slots = np.einsum("tbr,trn->tbn", analog, digital)
        return cls(slots=_freeze(slots), analog=_freeze(analog.copy()),
                   digital=_freeze(digital.copy()))

    @property
    def is_hybrid(self) -> bool:
        return self.analog is not None

    @property
    def m_slots(self) -> int:
        return self.slots.shape[0]

    def slot_powers(self) -> np.ndarray:
        """Per-slot transmit power, sum of squared column norms."""
        return np.sum(np.abs(self.slots) ** 2, axis=(1, 2))


@dataclass(frozen=True)
class RateReport:
    """Per-beam-per-slot achievable rates and derived aggregates."""

    rates: np.ndarray          # (N_s, M), bit/s/Hz
    per_beam_sum: np.ndarray   # (N_s,)
    total: float
    gamma_satisfied: np.ndarray  # (N_s,) bool

    @property
    def all_gamma_satisfied(self) -> bool:
        return bool(np.all(self.gamma_satisfied))


@dataclass(frozen=True)
class FeasibilityVerdict:
    """Lists each violated constraint family; empty lists mean feasible."""

    gamma_violations: list = field(default_factory=list)       # beam indices
    power_violations: list = field(default_factory=list)       # slot indices
    unit_modulus_violations: list = field(default_factory=list)  # slot indices
    beam_count_violations: list = field(default_factory=list)  # slot indices
    binariness_violations: list = field(default_factory=list)  # (beam, slot)

    @property
    def feasible(self) -> bool:
        return not (self.gamma_violations or self.power_violations
                    or self.unit_modulus_violations or self.beam_count_violations
                    or self.binariness_violations)

    @property
    def violated_families(self) -> list:
        out = []
        if self.gamma_violations:
            out.append("rate_thresholds")
        if self.power_violations:
            out.append("slot_power")
        if self.unit_modulus_violations:
            out.append("unit_modulus")
        if self.beam_count_violations:
            out.append("beams_per_slot")
        if self.binariness_violations:
            out.append("binariness")
        return out


def _effective_slots(precoders) -> np.ndarray:
    if isinstance(precoders, PrecoderSet):
        return precoders.slots
    arr = np.asarray(precoders, dtype=complex)
    if arr.ndim != 3:
        raise DimensionMismatch("expected a PrecoderSet or an (m, n_bs, n_s) array")
    return arr


def rate_matrix(channel, precoders, pattern_weights, sigma_sq, gamma=None) -> RateReport:
    """Achievable rate of every beam position in every slot.

    ``pattern_weights`` may be the binary illumination indicator or its
    continuous relaxation in [0, 1]; binary inputs are cast to float and
    produce bit-identical results either way.  ``gamma`` defaults to all
    zeros, in which case every threshold is trivially satisfied.
    """
    h = channel.h if hasattr(channel, "h") else np.asarray(channel, dtype=complex)
    slots = _effective_slots(precoders)
    weights = np.asarray(pattern_weights, dtype=float)

    n_s, m = weights.shape if weights.ndim == 2 else (weights.shape[0], 1)
    if weights.ndim != 2:
        raise DimensionMismatch("pattern_weights must be (n_s, m_slots)")
    if h.shape[0] != n_s or slots.shape != (m, h.shape[1], n_s):
        raise DimensionMismatch(
            f"channel {h.shape}, precoders {slots.shape}, weights {weights.shape}"
        )
    if not (np.all(np.isfinite(h)) and np.all(np.isfinite(slots)) and np.all(np.isfinite(weights))):
        raise NonFiniteInput("channel, precoders, and weights must be finite")
    if np.any(weights < 0) or np.any(weights > 1 + 1e-12):
        raise ValueError("pattern weights must lie in [0, 1]")

    rates = np.empty((n_s, m))
    for t in range(m):
        gains = np.abs(h @ slots[t]) ** 2          # gains[n, k] = |h_n p_k|^2
        x = weights[:, t]
        own = np.diag(gains) * x
        interference = gains @ x - np.diag(gains) * x
        rates[:, t] = np.log2(1.0 + own / (interference + sigma_sq))

    rates = _freeze(rates)
    per_beam = _freeze(rates.sum(axis=1))
    if gamma is None:
        gamma = np.zeros(n_s)
    gamma = np.asarray(gamma, dtype=float)
    satisfied = _freeze(per_beam >= gamma)
    return RateReport(rates=rates, per_beam_sum=per_beam,
                      total=float(rates.sum()), gamma_satisfied=satisfied)


def check_feasibility(report, pattern, precoders, config) -> FeasibilityVerdict:
    """Check the full joint-design constraint set and list every violation.

    Numeric constraints use relative slack FEAS_RTOL.  Always returns a
    verdict; it never raises.
    """
    x = np.asarray(pattern.x if hasattr(pattern, "x") else pattern)
    gamma_bad = [int(n) for n in range(config.n_s)
                 if report.per_beam_sum[n] < config.gamma[n] * (1 - FEAS_RTOL) - FEAS_RTOL]

    power_bad = []
    if isinstance(precoders, PrecoderSet):
        powers = precoders.slot_powers()
    else:
        powers = np.sum(np.abs(np.asarray(precoders)) ** 2, axis=(1, 2))
    for t, p in enumerate(powers):
        if p > config.p_tot * (1 + FEAS_RTOL):
            power_bad.append(t)

    modulus_bad = []
    if isinstance(precoders, PrecoderSet) and precoders.is_hybrid:
        for t in range(precoders.m_slots):
            if np.max(np.abs(np.abs(precoders.analog[t]) - 1.0)) > FEAS_RTOL:
                modulus_bad.append(t)

    count_bad = [int(t) for t in range(x.shape[1])
                 if x[:, t].sum() > config.k_beams]
    binary_bad = [(int(n), int(t)) for n, t in zip(*np.nonzero((x != 0) & (x != 1)))]

    return FeasibilityVerdict(
        gamma_violations=gamma_bad,
        power_violations=power_bad,
        unit_modulus_violations=modulus_bad,
        beam_count_violations=count_bad,
        binariness_violations=binary_bad,
    )
