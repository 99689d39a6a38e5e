"""Alternating optimization of precoders and a relaxed illumination pattern.

Relax the binary indicators to [0, 1], alternate the beamformer block and
the illumination block (each an inner FP ascent) until the relaxed
objective plateaus, quantize back to binary with coverage repair, and
re-solve the beamformers at the final binary pattern.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core_model import PrecoderSet, RateReport, check_feasibility, rate_matrix
from .fp_engine import ascend_beamformers, ascend_pattern
from .pattern import IlluminationPattern, RelaxedPattern, quantize, repair_coverage


@dataclass(frozen=True)
class IpaoResult:
    pattern: IlluminationPattern
    precoders: PrecoderSet
    report: RateReport
    outer_trace: tuple                 # (iteration, relaxed objective) pairs
    quantization_delta: float          # relaxed objective minus final total
    relaxed: RelaxedPattern            # pre-quantization iterate
    feasible: bool                     # final binary design meets all constraints
    relaxed_phase_feasible: bool       # thresholds held throughout the relaxation


def relaxed_objective(channel, precoders, relaxed: RelaxedPattern, sigma_sq) -> float:
    """Total sum-rate with the continuous pattern weights."""
    return rate_matrix(channel, precoders, relaxed.weights(), sigma_sq).total


def run_ipao(channel, config, rng=None) -> IpaoResult:
    """Alternating-optimization scheme.

    ``rng`` is accepted for interface parity with the random-search
    scheme but unused: the relaxation starts from the uniform point and
    every step is deterministic.
    """
    del rng
    n_s, k, m = config.n_s, config.k_beams, config.m_slots
    x = RelaxedPattern.uniform(n_s, k, m)
    p = None
    relaxed_ok = True
    trace = []
    prev_obj = None

    for outer in range(1, config.ipao_outer_iters + 1):
        p, _, ok_bf = ascend_beamformers(channel, x.weights(), config,
                                         initial=p, max_iters=config.ipao_bf_iters)
        x, _, ok_ip = ascend_pattern(channel, p, x, config,
                                     max_iters=config.ipao_ip_iters)
        relaxed_ok = relaxed_ok and ok_bf and ok_ip
        obj = relaxed_objective(channel, p, x, config.sigma_sq)
        trace.append((outer, obj))
        if prev_obj is not None and abs(obj - prev_obj) <= config.plateau_rtol * max(abs(prev_obj), 1e-9):
            break
        prev_obj = obj

    binary = repair_coverage(quantize(x, n_s, k, m), x, k)

    # Re-solve at the binary pattern from the standard start so the result
    # is directly comparable with a per-pattern random-search solve.
    p_final, _, ok_final = ascend_beamformers(
        channel, binary.weights(), config, max_iters=config.ipao_bf_iters)
    report = rate_matrix(channel, p_final, binary.weights(), config.sigma_sq,
                         gamma=config.gamma)
    verdict = check_feasibility(report, binary, p_final, config)

    return IpaoResult(
        pattern=binary,
        precoders=p_final,
        report=report,
        outer_trace=tuple(trace),
        quantization_delta=float(trace[-1][1] - report.total) if trace else float("nan"),
        relaxed=x,
        feasible=ok_final and verdict.feasible,
        relaxed_phase_feasible=relaxed_ok,
    )
