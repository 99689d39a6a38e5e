"""Fractional-programming block-ascent drivers.

Each round alternates a closed-form auxiliary update with one convex
subproblem solve.  Both updates are ascent steps on the true objective
(the auxiliary is its block maximizer and the subproblem solver never
returns a point below its warm start), so the recorded traces are
non-decreasing up to solver tolerance.
"""

from __future__ import annotations

import numpy as np

from ..core_model import PrecoderSet, rate_matrix
from ..errors import InfeasibleRateConstraints, MaxIterationsExceeded
from .auxiliary import beamforming_auxiliary, illumination_auxiliary
from .subproblems import (
    matched_filter_init,
    solve_beamformer_subproblem,
    solve_pattern_subproblem,
)
from .vectorize import build_pattern_vectorization


def matched_filter_precoders(channel, weights, p_tot) -> PrecoderSet:
    """Feasible matched-filter start, power split over the active beams."""
    return PrecoderSet.fully_digital(
        matched_filter_init(channel.h, np.asarray(weights, dtype=float), p_tot))


def full_power_scale(precoders, p_tot) -> PrecoderSet:
    """Scale every nonzero slot to the exact power budget.

    Uniformly scaling one slot's precoders up never decreases any rate
    (the noise term is the only part that does not scale), so this is an
    ascent step on the true objective.  The surrogate subproblem at a
    frozen auxiliary saturates before the budget binds, which otherwise
    leaves a sliver of power unused at every fixed point.
    """
    slots = precoders.slots if isinstance(precoders, PrecoderSet) else np.asarray(precoders, dtype=complex)
    out = np.array(slots, dtype=complex)
    for t in range(out.shape[0]):
        power = np.sum(np.abs(out[t]) ** 2)
        if power > 0:
            out[t] *= np.sqrt(p_tot / power)
    return PrecoderSet.fully_digital(out)


def _plateaued(trace, rtol) -> bool:
    if rtol is None or len(trace) < 2:
        return False
    prev, cur = trace[-2], trace[-1]
    return abs(cur - prev) <= rtol * max(abs(prev), 1e-9)


def ascend_beamformers(channel, weights, config, initial=None, max_iters=None,
                       plateau_rtol=None, sigma_sq=None):
    """FP ascent over precoders at fixed pattern weights.

    Returns (precoders, trace, feasible): the trace holds the true
    objective at the start and after every round; ``feasible`` is False
    when the rate thresholds forced best-effort iterates.
    """
    weights = np.asarray(weights, dtype=float)
    if max_iters is None:
        max_iters = config.ipao_bf_iters
    if plateau_rtol is None:
        plateau_rtol = config.plateau_rtol
    if sigma_sq is None:
        sigma_sq = config.sigma_sq

    p = initial if initial is not None else matched_filter_precoders(
        channel, weights, config.p_tot)
    feasible = True
    trace = [rate_matrix(channel, p, weights, sigma_sq).total]
    for _ in range(max_iters):
        aux = beamforming_auxiliary(channel, p, weights, sigma_sq)
        try:
            p = solve_beamformer_subproblem(channel, weights, aux, config, initial=p)
        except InfeasibleRateConstraints as err:
            p = err.best_effort
            feasible = False
        except MaxIterationsExceeded:
            break
        p = full_power_scale(p, config.p_tot)
        trace.append(rate_matrix(channel, p, weights, sigma_sq).total)
        if _plateaued(trace, plateau_rtol):
            break
    if not isinstance(p, PrecoderSet):
        p = PrecoderSet.fully_digital(p)
    return p, trace, feasible


def ascend_pattern(channel, precoders, relaxed, config, max_iters=None,
                   plateau_rtol=None):
    """FP ascent over the relaxed pattern at fixed precoders.

    Returns (relaxed, trace, feasible) with the same conventions as
    ``ascend_beamformers``.
    """
    if max_iters is None:
        max_iters = config.ipao_ip_iters
    if plateau_rtol is None:
        plateau_rtol = config.plateau_rtol

    x = relaxed
    feasible = True
    trace = [rate_matrix(channel, precoders, x.weights(), config.sigma_sq).total]
    for _ in range(max_iters):
        aux = illumination_auxiliary(channel, precoders, x.weights(), config.sigma_sq)
        vec = build_pattern_vectorization(channel, precoders, aux)
        try:
            x = solve_pattern_subproblem(vec, config.gamma, config.k_beams,
                                         config, initial=x)
        except InfeasibleRateConstraints as err:
            x = err.best_effort
            feasible = False
        except MaxIterationsExceeded:
            break
        trace.append(rate_matrix(channel, precoders, x.weights(), config.sigma_sq).total)
        if _plateaued(trace, plateau_rtol):
            break
    return x, trace, feasible
