"""Constrained random search over illumination patterns.

Draw candidate patterns (every slot fully loaded, every beam lit once),
design the per-candidate precoders by fractional programming, and keep
the candidate with the largest sum-rate among those meeting the per-beam
thresholds.  Exhaustive mode (explicit candidate list) doubles as the
brute-force oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core_model import PrecoderSet, RateReport, check_feasibility, rate_matrix
from .errors import NoCandidates
from .fp_engine import ascend_beamformers
from .pattern import IlluminationPattern, random_pattern, random_pattern_with_remainder


@dataclass(frozen=True)
class IprsResult:
    best_pattern: IlluminationPattern
    best_precoders: PrecoderSet
    best_report: RateReport
    per_candidate_totals: np.ndarray   # one entry per requested candidate
    candidates_evaluated: int          # unique candidates actually solved
    candidates_infeasible: int         # unique candidates failing thresholds
    feasible: bool                     # False when no candidate met them
    best_index: int


def dedupe_candidates(candidates) -> list:
    """Order-preserving removal of exact duplicate patterns."""
    seen = set()
    unique = []
    for pattern in candidates:
        key = pattern.x.tobytes()
        if key not in seen:
            seen.add(key)
            unique.append(pattern)
    return unique


def _draw_candidates(config, i_candidates, rng):
    n_s, k, m = config.n_s, config.k_beams, config.m_slots
    out = []
    for _ in range(i_candidates):
        if k * m == n_s:
            out.append(random_pattern(n_s, k, m, rng))
        else:
            # Remainder layout: full slots plus one slot with the leftover
            # beams; requires the config to budget that extra slot.
            pat = random_pattern_with_remainder(n_s, k, rng)
            if pat.m_slots != m:
                raise ValueError(
                    f"remainder layout needs m_slots={pat.m_slots}, config has {m}")
            out.append(pat)
    return out


def run_iprs(channel, config, i_candidates, rng, candidates=None) -> IprsResult:
    """Random-search scheme: best pattern/precoder pair over candidates.

    ``candidates`` overrides random generation (used for exhaustive
    sweeps).  Duplicate candidates are solved once; their totals repeat
    the first occurrence.  Candidates violating the thresholds are
    excluded from the argmax and counted; if none survives, the largest
    total is returned flagged infeasible.
    """
    if candidates is None:
        if i_candidates < 1:
            raise NoCandidates("i_candidates must be >= 1")
        candidates = _draw_candidates(config, i_candidates, rng)
    else:
        candidates = list(candidates)
        if not candidates:
            raise NoCandidates("empty candidate list")

    unique = dedupe_candidates(candidates)
    solved = {}
    infeasible_count = 0
    for pattern in unique:
        weights = pattern.weights()
        precoders, _, ok = ascend_beamformers(
            channel, weights, config, max_iters=config.iprs_fp_iters)
        report = rate_matrix(channel, precoders, weights, config.sigma_sq,
                             gamma=config.gamma)
        verdict = check_feasibility(report, pattern, precoders, config)
        feasible = ok and verdict.feasible
        if not feasible:
            infeasible_count += 1
        solved[pattern.x.tobytes()] = (pattern, precoders, report, feasible)

    totals = np.array([solved[p.x.tobytes()][2].total for p in candidates])

    best_idx = None
    for idx, pattern in enumerate(candidates):
        feasible = solved[pattern.x.tobytes()][3]
        if not feasible:
            continue
        if best_idx is None or totals[idx] > totals[best_idx]:
            best_idx = idx
    overall_feasible = best_idx is not None
    if best_idx is None:
        best_idx = int(np.argmax(totals))

    pattern, precoders, report, _ = solved[candidates[best_idx].x.tobytes()]
    return IprsResult(
        best_pattern=pattern,
        best_precoders=precoders,
        best_report=report,
        per_candidate_totals=totals,
        candidates_evaluated=len(unique),
        candidates_infeasible=infeasible_count,
        feasible=overall_feasible,
        best_index=best_idx,
    )
