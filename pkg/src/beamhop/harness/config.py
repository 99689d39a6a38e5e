"""Experiment-config ingestion: JSON schema, defaults, validation, presets.

Schema (all keys optional unless noted; unknown keys are rejected):

  n_bs, n_s, n_rf, k_beams, m_slots   system dimensions (n_rf defaults
                                      to min(n_s, n_bs))
  p_tot                               per-slot power budget, watts
  gamma                               per-beam rate threshold, bit/s/Hz;
                                      scalar broadcast or length-n_s list
  sigma_sq                            noise power after normalization
  seed                                base seed for channels and schemes
  solver                              dict of iteration caps/tolerances
                                      (bf_tol, ip_tol, iprs_fp_iters,
                                      ipao_bf_iters, ipao_ip_iters,
                                      ipao_outer_iters, hbf_iters,
                                      plateau_rtol, hbf_restarts,
                                      hbf_conjugate_gradient)
  link_budget                         dict of LinkBudget fields
  paths                               dict of PathSpec fields
  sweep_axis                          p_tot | gamma | n_bs | km_pairs
  sweep_values                        nonempty list (pairs for km_pairs)
  scheme                              iprs | ipao
  stage                               fdbf | hbf
  trials                              Monte-Carlo channel draws per value
  output_path                         directory for CSV/JSON results
  iprs_candidates                     random-search width
  parallel                            trial worker count
"""

from __future__ import annotations

import dataclasses
import json
from importlib import resources
from pathlib import Path

from ..channel import LinkBudget, PathSpec
from ..core_model import SystemConfig
from ..errors import ParseError, ValidationError
from .experiment import SCHEMES, STAGES, SWEEP_AXES, ExperimentSpec

_TOP_KEYS = {
    "n_bs", "n_s", "n_rf", "k_beams", "m_slots", "p_tot", "gamma", "sigma_sq",
    "seed", "solver", "link_budget", "paths", "sweep_axis", "sweep_values",
    "scheme", "stage", "trials", "output_path", "iprs_candidates", "parallel",
}
_SOLVER_KEYS = {
    "bf_tol", "ip_tol", "iprs_fp_iters", "ipao_bf_iters", "ipao_ip_iters",
    "ipao_outer_iters", "hbf_iters", "plateau_rtol", "hbf_restarts",
    "hbf_conjugate_gradient",
}
_BUDGET_KEYS = {f.name for f in dataclasses.fields(LinkBudget)}
_PATH_KEYS = {f.name for f in dataclasses.fields(PathSpec)}


def _reject_unknown(mapping, allowed, where, violations):
    for key in mapping:
        if key not in allowed:
            violations.append(f"unknown key {key!r} in {where}")


def spec_from_dict(raw: dict, default_output="runs/experiment") -> ExperimentSpec:
    """Build a validated ExperimentSpec; collects every violation."""
    violations = []
    if not isinstance(raw, dict):
        raise ValidationError(["top-level config must be a JSON object"])
    _reject_unknown(raw, _TOP_KEYS, "config", violations)
    solver = raw.get("solver", {})
    if isinstance(solver, dict):
        _reject_unknown(solver, _SOLVER_KEYS, "solver", violations)
    else:
        violations.append("solver must be an object")
        solver = {}
    budget_raw = raw.get("link_budget", {})
    if isinstance(budget_raw, dict):
        _reject_unknown(budget_raw, _BUDGET_KEYS, "link_budget", violations)
    else:
        violations.append("link_budget must be an object")
        budget_raw = {}
    paths_raw = raw.get("paths", {})
    if isinstance(paths_raw, dict):
        _reject_unknown(paths_raw, _PATH_KEYS, "paths", violations)
    else:
        violations.append("paths must be an object")
        paths_raw = {}

    n_bs = int(raw.get("n_bs", 64))
    n_s = int(raw.get("n_s", 6))
    n_rf = int(raw.get("n_rf", min(n_s, n_bs)))
    k_beams = int(raw.get("k_beams", 2))
    m_slots = int(raw.get("m_slots", 3))
    seed = int(raw.get("seed", 0))

    config = None
    try:
        config = SystemConfig(
            n_bs=n_bs, n_s=n_s, n_rf=n_rf, k_beams=k_beams, m_slots=m_slots,
            p_tot=float(raw.get("p_tot", 120.0)),
            gamma=raw.get("gamma", 0.0),
            sigma_sq=float(raw.get("sigma_sq", 1.0)),
            rng_seed=seed,
            **{k: v for k, v in solver.items()},
        )
    except (ValueError, TypeError) as err:
        violations.append(f"config: {err}")

    budget = None
    try:
        budget = LinkBudget(**budget_raw)
    except (ValueError, TypeError) as err:
        violations.append(f"link_budget: {err}")
    paths = None
    try:
        paths = PathSpec(**paths_raw)
    except (ValueError, TypeError) as err:
        violations.append(f"paths: {err}")

    sweep_axis = raw.get("sweep_axis", "p_tot")
    if sweep_axis not in SWEEP_AXES:
        violations.append(f"sweep_axis must be one of {SWEEP_AXES}")
    sweep_values = raw.get("sweep_values")
    if sweep_values is None:
        sweep_values = [float(raw.get("p_tot", 120.0))] if sweep_axis == "p_tot" else []
    if not isinstance(sweep_values, (list, tuple)) or len(sweep_values) == 0:
        violations.append("sweep_values must be a nonempty list")
        sweep_values = []
    if sweep_axis == "km_pairs":
        for v in sweep_values:
            if not (isinstance(v, (list, tuple)) and len(v) == 2):
                violations.append(f"km_pairs sweep values must be [k, m] pairs, got {v!r}")

    scheme = raw.get("scheme", "ipao")
    if scheme not in SCHEMES:
        violations.append(f"scheme must be one of {SCHEMES}")
    stage = raw.get("stage", "fdbf")
    if stage not in STAGES:
        violations.append(f"stage must be one of {STAGES}")

    trials = int(raw.get("trials", 1))
    if trials < 1:
        violations.append("trials must be >= 1")
    iprs_candidates = int(raw.get("iprs_candidates", 10))
    parallel = int(raw.get("parallel", 1))
    if parallel < 1:
        violations.append("parallel must be >= 1")

    if violations:
        raise ValidationError(violations)
    return ExperimentSpec(
        config=config, budget=budget, paths=paths,
        sweep_axis=sweep_axis,
        sweep_values=tuple(tuple(v) if isinstance(v, (list, tuple)) else v
                           for v in sweep_values),
        scheme=scheme, stage=stage, trials=trials,
        output_path=str(raw.get("output_path", default_output)),
        seed_base=seed, iprs_candidates=iprs_candidates, parallel=parallel,
    )


def load_config(path) -> ExperimentSpec:
    """Parse and validate an experiment config file."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(f"{path}: line {err.lineno} column {err.colno}: {err.msg}") from err
    return spec_from_dict(raw, default_output=f"runs/{Path(path).stem}")


def preset_names() -> list:
    """Shipped presets, one per reproduced figure."""
    root = resources.files("beamhop.harness") / "presets"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_preset(name: str) -> ExperimentSpec:
    root = resources.files("beamhop.harness") / "presets"
    candidate = root / f"{name}.json"
    try:
        text = candidate.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ValidationError([f"unknown preset {name!r}; available: {preset_names()}"])
    raw = json.loads(text)
    return spec_from_dict(raw, default_output=f"runs/{name}")
