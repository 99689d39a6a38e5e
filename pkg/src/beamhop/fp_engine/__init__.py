"""Fractional-programming core.

Closed-form auxiliary updates, the concave surrogate of the per-beam
rate, the stacked vectorization of the illumination subproblem, and a
self-contained log-barrier maximizer for the two convex inner problems.
"""

from .auxiliary import (
    AuxiliaryVars,
    beamforming_auxiliary,
    illumination_auxiliary,
    surrogate_rates,
)
from .vectorize import PatternVectorization, build_pattern_vectorization
from .subproblems import solve_beamformer_subproblem, solve_pattern_subproblem
from .loops import (
    ascend_beamformers,
    ascend_pattern,
    full_power_scale,
    matched_filter_precoders,
)

__all__ = [
    "AuxiliaryVars",
    "beamforming_auxiliary",
    "illumination_auxiliary",
    "surrogate_rates",
    "PatternVectorization",
    "build_pattern_vectorization",
    "solve_beamformer_subproblem",
    "solve_pattern_subproblem",
    "ascend_beamformers",
    "ascend_pattern",
    "full_power_scale",
    "matched_filter_precoders",
]
