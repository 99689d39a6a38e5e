"""Experiment orchestration: config ingestion, seeded sweeps, CSV/JSON
emission, and the command-line interface."""

from .config import load_config, load_preset, preset_names, spec_from_dict
from .experiment import (
    ExperimentSpec,
    PartialFailure,
    SweepRow,
    run_experiment,
    run_trial,
)

__all__ = [
    "ExperimentSpec",
    "PartialFailure",
    "SweepRow",
    "load_config",
    "load_preset",
    "preset_names",
    "run_experiment",
    "run_trial",
    "spec_from_dict",
]
