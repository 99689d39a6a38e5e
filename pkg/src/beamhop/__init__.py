"""Joint beamforming and illumination-pattern design for beam-hopping
LEO satellite downlinks.

Public surface: domain types and the rate evaluator (``core_model``),
the seeded Rician channel (``channel``), illumination-pattern tooling
(``pattern``), the fractional-programming engine (``fp_engine``), the
two fully-digital design schemes (``scheme_iprs``, ``scheme_ipao``),
the hybrid factorization stage (``hbf_am``), and the experiment harness
(``harness``).
"""

from .channel import ChannelSet, LinkBudget, PathSpec, generate_channel, path_power, sample_path_gain, steering_vector
from .core_model import (
    FeasibilityVerdict,
    PrecoderSet,
    RateReport,
    SystemConfig,
    check_feasibility,
    rate_matrix,
)
from .hbf_am import HybridPrecoder, factorize, factorize_all, hybrid_precoder_set, ls_digital, riemannian_analog
from .pattern import (
    IlluminationPattern,
    RelaxedPattern,
    count_unordered_patterns,
    enumerate_patterns,
    quantize,
    random_pattern,
    random_pattern_with_remainder,
    repair_coverage,
)
from .scheme_iprs import IprsResult, dedupe_candidates, run_iprs
from .scheme_ipao import IpaoResult, relaxed_objective, run_ipao

__version__ = "0.1.0"

__all__ = [
    "ChannelSet",
    "LinkBudget",
    "PathSpec",
    "generate_channel",
    "path_power",
    "sample_path_gain",
    "steering_vector",
    "FeasibilityVerdict",
    "PrecoderSet",
    "RateReport",
    "SystemConfig",
    "check_feasibility",
    "rate_matrix",
    "HybridPrecoder",
    "factorize",
    "factorize_all",
    "hybrid_precoder_set",
    "ls_digital",
    "riemannian_analog",
    "IlluminationPattern",
    "RelaxedPattern",
    "count_unordered_patterns",
    "enumerate_patterns",
    "quantize",
    "random_pattern",
    "random_pattern_with_remainder",
    "repair_coverage",
    "IprsResult",
    "dedupe_candidates",
    "run_iprs",
    "IpaoResult",
    "relaxed_objective",
    "run_ipao",
]
