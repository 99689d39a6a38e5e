"""Seeded Monte-Carlo sweeps over power, thresholds, antennas, or slot
layouts, with CSV summaries and per-trial JSON audit records.

Determinism: the channel seed of trial j depends only on (seed_base, j),
never on the sweep axis, so every axis value sees the same channel draws
and paired comparisons are meaningful.  Aggregation reduces over sorted
trial indices, so worker scheduling cannot change any output number.
"""

from __future__ import annotations

import dataclasses
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..channel import LinkBudget, PathSpec, generate_channel
from ..core_model import SystemConfig, check_feasibility, rate_matrix
from ..hbf_am import factorize_all, hybrid_precoder_set
from ..scheme_iprs import run_iprs
from ..scheme_ipao import run_ipao

SWEEP_AXES = ("p_tot", "gamma", "n_bs", "km_pairs")
SCHEMES = ("iprs", "ipao")
STAGES = ("fdbf", "hbf")

CSV_HEADER = "axis,mean_total,std_total,mean_per_beam_min,infeasible_fraction,seed_base"


@dataclass(frozen=True)
class ExperimentSpec:
    """One experiment: base system plus a sweep recipe."""

    config: SystemConfig
    budget: LinkBudget
    paths: PathSpec
    sweep_axis: str
    sweep_values: tuple
    scheme: str
    stage: str
    trials: int
    output_path: str
    seed_base: int
    iprs_candidates: int = 10
    parallel: int = 1


@dataclass(frozen=True)
class SweepRow:
    """Aggregated results of one axis value."""

    axis_value: object
    mean_total: float
    std_total: float
    mean_per_beam_min: float
    infeasible_fraction: float
    wall_time_s: float
    seed_base: int


def _axis_config(spec: ExperimentSpec, value) -> SystemConfig:
    cfg = spec.config
    if spec.sweep_axis == "p_tot":
        return dataclasses.replace(cfg, p_tot=float(value))
    if spec.sweep_axis == "gamma":
        return dataclasses.replace(cfg, gamma=value)
    if spec.sweep_axis == "n_bs":
        n_bs = int(value)
        return dataclasses.replace(cfg, n_bs=n_bs, n_rf=min(cfg.n_rf, n_bs))
    if spec.sweep_axis == "km_pairs":
        k, m = int(value[0]), int(value[1])
        return dataclasses.replace(cfg, k_beams=k, m_slots=m)
    raise ValueError(f"unknown sweep axis {spec.sweep_axis!r}")


def _axis_label(axis, value) -> str:
    if axis == "km_pairs":
        return f"{int(value[0])}x{int(value[1])}"
    if isinstance(value, (list, tuple, np.ndarray)):
        return "|".join(repr(float(v)) for v in value)
    return repr(float(value)) if isinstance(value, (int, float)) else str(value)


def run_trial(spec: ExperimentSpec, axis_index: int, trial: int) -> dict:
    """One Monte-Carlo trial: channel draw, scheme run, optional hybrid
    stage, rate report.  Pure function of (spec, axis_index, trial)."""
    value = spec.sweep_values[axis_index]
    cfg = _axis_config(spec, value)
    # Channel seed is axis-independent: paired draws across axis values.
    channel_rng = np.random.default_rng(
        np.random.SeedSequence((spec.seed_base, trial, 0)))
    scheme_rng = np.random.default_rng(
        np.random.SeedSequence((spec.seed_base, trial, 1)))
    hbf_rng = np.random.default_rng(
        np.random.SeedSequence((spec.seed_base, trial, 2)))

    start = time.perf_counter()
    channel = generate_channel(cfg, spec.budget, spec.paths, channel_rng)
    if spec.scheme == "iprs":
        result = run_iprs(channel, cfg, spec.iprs_candidates, scheme_rng)
        pattern, precoders = result.best_pattern, result.best_precoders
        feasible = result.feasible
    else:
        result = run_ipao(channel, cfg, scheme_rng)
        pattern, precoders = result.pattern, result.precoders
        feasible = result.feasible

    if spec.stage == "hbf":
        factors = factorize_all(precoders, cfg, hbf_rng)
        precoders = hybrid_precoder_set(factors)
        report = rate_matrix(channel, precoders, pattern.weights(),
                             cfg.sigma_sq, gamma=cfg.gamma)
        feasible = check_feasibility(report, pattern, precoders, cfg).feasible
    else:
        report = rate_matrix(channel, precoders, pattern.weights(),
                             cfg.sigma_sq, gamma=cfg.gamma)
    wall = time.perf_counter() - start

    return {
        "axis_index": axis_index,
        "axis": _axis_label(spec.sweep_axis, value),
        "trial": trial,
        "total": float(report.total),
        "per_beam_sum": [float(v) for v in report.per_beam_sum],
        "per_beam_min": float(report.per_beam_sum.min()),
        "feasible": bool(feasible),
        "scheme": spec.scheme,
        "stage": spec.stage,
        "pattern": pattern.x.tolist(),
        "wall_time_s": wall,
    }


def _float_repr(x: float) -> str:
    return repr(float(x))


def _write_row(handle, row: SweepRow):
    handle.write(",".join([
        str(row.axis_value),
        _float_repr(row.mean_total),
        _float_repr(row.std_total),
        _float_repr(row.mean_per_beam_min),
        _float_repr(row.infeasible_fraction),
        str(row.seed_base),
    ]) + "\n")
    handle.flush()


def resolved_spec_dict(spec: ExperimentSpec) -> dict:
    cfg = dataclasses.asdict(spec.config)
    cfg["gamma"] = [float(v) for v in spec.config.gamma]
    return {
        "config": cfg,
        "link_budget": dataclasses.asdict(spec.budget),
        "paths": dataclasses.asdict(spec.paths),
        "sweep_axis": spec.sweep_axis,
        "sweep_values": [list(v) if isinstance(v, (tuple, list)) else v
                         for v in spec.sweep_values],
        "scheme": spec.scheme,
        "stage": spec.stage,
        "trials": spec.trials,
        "output_path": spec.output_path,
        "seed": spec.seed_base,
        "iprs_candidates": spec.iprs_candidates,
        "parallel": spec.parallel,
    }


def run_experiment(spec: ExperimentSpec) -> list:
    """Run the sweep, writing summary.csv and per-trial JSON records.

    Returns the list of SweepRow aggregates.  Trials that raise are
    counted into infeasible_fraction and excluded from the means; the
    run then reports partial failure through the returned rows' trial
    records (the CLI maps that to exit code 3).
    """
    out_dir = Path(spec.output_path)
    trials_dir = out_dir / "trials"
    trials_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "resolved_config.json", "w", encoding="utf-8") as fh:
        json.dump(resolved_spec_dict(spec), fh, indent=2, sort_keys=True)
        fh.write("\n")

    rows = []
    errors = 0
    with open(out_dir / "summary.csv", "w", encoding="utf-8", newline="\n") as csv:
        csv.write(CSV_HEADER + "\n")
        for axis_index, value in enumerate(spec.sweep_values):
            started = time.perf_counter()
            records = {}
            failed = 0
            if spec.parallel > 1:
                with ProcessPoolExecutor(max_workers=spec.parallel) as pool:
                    futures = {trial: pool.submit(run_trial, spec, axis_index, trial)
                               for trial in range(spec.trials)}
                    for trial, future in futures.items():
                        try:
                            records[trial] = future.result()
                        except Exception:  # noqa: BLE001 - counted per contract
                            failed += 1
            else:
                for trial in range(spec.trials):
                    try:
                        records[trial] = run_trial(spec, axis_index, trial)
                    except Exception:  # noqa: BLE001 - counted per contract
                        failed += 1
            errors += failed

            # Deterministic reduction over sorted trial indices.
            ordered = [records[t] for t in sorted(records)]
            for rec in ordered:
                name = f"axis{axis_index:02d}_trial{rec['trial']:04d}.json"
                with open(trials_dir / name, "w", encoding="utf-8") as fh:
                    json.dump(rec, fh, indent=2, sort_keys=True)
                    fh.write("\n")

            totals = np.array([r["total"] for r in ordered])
            mins = np.array([r["per_beam_min"] for r in ordered])
            infeasible = failed + sum(1 for r in ordered if not r["feasible"])
            row = SweepRow(
                axis_value=_axis_label(spec.sweep_axis, value),
                mean_total=float(totals.mean()) if totals.size else float("nan"),
                std_total=float(totals.std()) if totals.size else float("nan"),
                mean_per_beam_min=float(mins.mean()) if mins.size else float("nan"),
                infeasible_fraction=infeasible / spec.trials,
                wall_time_s=time.perf_counter() - started,
                seed_base=spec.seed_base,
            )
            rows.append(row)
            _write_row(csv, row)

    if errors:
        raise PartialFailure(rows, errors)
    return rows


class PartialFailure(Exception):
    """Some trials raised; carries the aggregated rows anyway."""

    def __init__(self, rows, failed_trials):
        self.rows = rows
        self.failed_trials = failed_trials
        super().__init__(f"{failed_trials} trial(s) failed")
