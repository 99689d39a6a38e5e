"""Command-line entry point.

Subcommands: ``run <config.json>``, ``presets list``, ``presets run
<name>``, and ``oracle <tiny-config.json>`` (exhaustive-pattern brute
force).  Exit codes: 0 success, 2 config error, 3 partial trial
failures, 4 I/O error.  BEAMHOP_THREADS overrides ``--parallel``.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

import numpy as np

from ..channel import generate_channel
from ..errors import ConfigError, TooLarge
from ..pattern import enumerate_patterns
from ..scheme_iprs import run_iprs
from .config import load_config, load_preset, preset_names
from .experiment import PartialFailure, run_experiment


def _apply_overrides(spec, args):
    updates = {}
    if args.seed is not None:
        updates["seed_base"] = args.seed
        updates["config"] = dataclasses.replace(spec.config, rng_seed=args.seed)
    if args.trials is not None:
        updates["trials"] = args.trials
    if args.out is not None:
        updates["output_path"] = args.out
    parallel = args.parallel
    env = os.environ.get("BEAMHOP_THREADS")
    if env is not None:
        parallel = int(env)
    if parallel is not None:
        updates["parallel"] = parallel
    return dataclasses.replace(spec, **updates) if updates else spec


def _run_spec(spec) -> int:
    try:
        rows = run_experiment(spec)
    except PartialFailure as err:
        for row in err.rows:
            print(f"axis={row.axis_value} mean_total={row.mean_total:.6f} "
                  f"infeasible={row.infeasible_fraction:.2f}")
        print(f"warning: {err.failed_trials} trial(s) failed", file=sys.stderr)
        return 3
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return 4
    for row in rows:
        print(f"axis={row.axis_value} mean_total={row.mean_total:.6f} "
              f"std={row.std_total:.6f} infeasible={row.infeasible_fraction:.2f}")
    print(f"results in {spec.output_path}")
    return 0


def _cmd_run(args) -> int:
    spec = _apply_overrides(load_config(args.config), args)
    return _run_spec(spec)


def _cmd_presets(args) -> int:
    if args.action == "list":
        for name in preset_names():
            print(name)
        return 0
    spec = _apply_overrides(load_preset(args.name), args)
    return _run_spec(spec)


def _cmd_oracle(args) -> int:
    spec = _apply_overrides(load_config(args.config), args)
    cfg = spec.config
    try:
        candidates = enumerate_patterns(cfg.n_s, cfg.k_beams, cfg.m_slots)
    except TooLarge as err:
        print(f"config too large for exhaustive search: {err}", file=sys.stderr)
        return 2
    rng = np.random.default_rng(np.random.SeedSequence((spec.seed_base, 0, 0)))
    channel = generate_channel(cfg, spec.budget, spec.paths, rng)
    result = run_iprs(channel, cfg, len(candidates), np.random.default_rng(0),
                      candidates=candidates)
    record = {
        "patterns_enumerated": len(candidates),
        "best_total": result.best_report.total,
        "best_pattern": result.best_pattern.x.tolist(),
        "per_candidate_totals": result.per_candidate_totals.tolist(),
        "feasible": result.feasible,
        "seed": spec.seed_base,
    }
    out = Path(spec.output_path)
    try:
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "oracle.json", "w", encoding="utf-8") as fh:
            json.dump(record, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return 4
    print(f"best_total={record['best_total']:.6f} "
          f"over {len(candidates)} patterns -> {out / 'oracle.json'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="override base seed")
    common.add_argument("--trials", type=int, default=None, help="override trial count")
    common.add_argument("--out", type=str, default=None, help="override output directory")
    common.add_argument("--parallel", type=int, default=None,
                        help="trial worker count (BEAMHOP_THREADS overrides)")

    parser = argparse.ArgumentParser(
        prog="beamhop",
        description="Beam-hopping beamforming/illumination experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", parents=[common], help="run an experiment config")
    p_run.add_argument("config")
    p_run.set_defaults(func=_cmd_run)

    p_presets = sub.add_parser("presets", help="list or run shipped presets")
    presets_sub = p_presets.add_subparsers(dest="action", required=True)
    p_list = presets_sub.add_parser("list", parents=[common])
    p_list.set_defaults(func=_cmd_presets, action="list")
    p_prun = presets_sub.add_parser("run", parents=[common])
    p_prun.add_argument("name")
    p_prun.set_defaults(func=_cmd_presets, action="run")

    p_oracle = sub.add_parser("oracle", parents=[common],
                              help="exhaustive-pattern brute force")
    p_oracle.add_argument("config")
    p_oracle.set_defaults(func=_cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
