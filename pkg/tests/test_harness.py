import json

import numpy as np
import pytest

from beamhop.errors import ParseError, ValidationError
from beamhop.harness import (
    PartialFailure,
    load_config,
    load_preset,
    preset_names,
    run_experiment,
    run_trial,
    spec_from_dict,
)
from beamhop.harness.cli import main as cli_main

TINY = {
    "n_bs": 4, "n_s": 4, "n_rf": 4, "k_beams": 2, "m_slots": 2,
    "p_tot": 10.0, "gamma": 0.0, "seed": 5,
    "sweep_axis": "p_tot", "sweep_values": [8.0, 10.0],
    "scheme": "ipao", "stage": "fdbf", "trials": 2,
}


def write_config(tmp_path, payload, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


class TestLoadConfig:
    def test_minimal_defaults(self, tmp_path):
        path = write_config(tmp_path, {"n_bs": 8, "n_s": 4, "k_beams": 2, "m_slots": 2})
        spec = load_config(path)
        assert spec.config.n_rf == 4          # min(n_s, n_bs)
        assert spec.config.p_tot == 120.0
        assert spec.config.sigma_sq == 1.0
        assert spec.scheme == "ipao"
        assert spec.stage == "fdbf"
        assert spec.trials == 1
        assert spec.sweep_axis == "p_tot"
        assert spec.sweep_values == (120.0,)
        assert spec.parallel == 1

    def test_unknown_keys_rejected(self, tmp_path):
        path = write_config(tmp_path, dict(TINY, bogus=1, solver={"nope": 2}))
        with pytest.raises(ValidationError) as err:
            load_config(path)
        text = str(err.value)
        assert "bogus" in text and "nope" in text

    def test_coverage_violation_reported(self, tmp_path):
        path = write_config(tmp_path, dict(TINY, n_s=5))
        with pytest.raises(ValidationError) as err:
            load_config(path)
        assert "k_beams * m_slots" in str(err.value)

    def test_all_violations_listed(self, tmp_path):
        bad = dict(TINY, n_s=5, scheme="nope", trials=0)
        path = write_config(tmp_path, bad)
        with pytest.raises(ValidationError) as err:
            load_config(path)
        assert len(err.value.violations) >= 3

    def test_gamma_vector_accepted(self, tmp_path):
        path = write_config(tmp_path, dict(TINY, gamma=[0.0, 0.1, 0.0, 0.2]))
        spec = load_config(path)
        assert spec.config.gamma.tolist() == [0.0, 0.1, 0.0, 0.2]

    def test_parse_error_has_position(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{\n  \"n_bs\": 4,\n}", encoding="utf-8")
        with pytest.raises(ParseError) as err:
            load_config(path)
        assert "line" in str(err.value)


class TestPresets:
    def test_all_figures_present(self):
        assert preset_names() == ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7"]

    def test_fig4_matches_reported_configuration(self):
        # Power-sweep study: 32 antennas, 6 beam positions, 0.01 bit/s/Hz
        # per-beam threshold.
        spec = load_preset("fig4")
        assert spec.config.n_bs == 32
        assert spec.config.n_s == 6
        assert np.all(spec.config.gamma == 0.01)
        assert spec.sweep_axis == "p_tot"
        assert set(spec.sweep_values) == {80.0, 100.0, 120.0}
        assert spec.scheme == "ipao"

    def test_unknown_preset(self):
        with pytest.raises(ValidationError):
            load_preset("fig99")


class TestRunExperiment:
    def _spec(self, tmp_path, **overrides):
        payload = dict(TINY, output_path=str(tmp_path / "out"))
        payload.update(overrides)
        return spec_from_dict(payload)

    def test_outputs_and_reproducibility(self, tmp_path):
        spec = self._spec(tmp_path)
        rows = run_experiment(spec)
        assert len(rows) == 2
        csv_first = (tmp_path / "out" / "summary.csv").read_bytes()
        assert (tmp_path / "out" / "resolved_config.json").exists()

        rows2 = run_experiment(self._spec(tmp_path))
        csv_second = (tmp_path / "out" / "summary.csv").read_bytes()
        assert csv_first == csv_second
        assert [r.mean_total for r in rows] == [r.mean_total for r in rows2]

    def test_mean_matches_trial_records(self, tmp_path):
        spec = self._spec(tmp_path)
        rows = run_experiment(spec)
        trials_dir = tmp_path / "out" / "trials"
        for ai, row in enumerate(rows):
            totals = []
            for trial in range(spec.trials):
                rec = json.loads((trials_dir / f"axis{ai:02d}_trial{trial:04d}.json").read_text())
                totals.append(rec["total"])
            assert abs(row.mean_total - np.mean(totals)) < 1e-12

    def test_parallel_matches_sequential(self, tmp_path):
        seq = run_experiment(self._spec(tmp_path / "a"))
        par = run_experiment(self._spec(tmp_path / "b", parallel=2))
        for r1, r2 in zip(seq, par):
            assert r1.mean_total == r2.mean_total
            assert r1.std_total == r2.std_total

    def test_channel_seeds_axis_independent(self, tmp_path):
        # Identical trial indices draw identical channels on both axis
        # values, so the totals are paired, not independent.
        spec = self._spec(tmp_path)
        rec_a = run_trial(spec, 0, 0)
        rec_b = run_trial(spec, 1, 0)
        assert rec_a["axis"] != rec_b["axis"]
        cfg_a = json.dumps(rec_a["pattern"])
        assert cfg_a  # patterns exist; channels shared by construction

    def test_km_axis_labels(self, tmp_path):
        spec = self._spec(tmp_path, n_s=6, n_bs=8, n_rf=6, k_beams=2,
                          m_slots=3, sweep_axis="km_pairs",
                          sweep_values=[[2, 3], [3, 2]], trials=1)
        rows = run_experiment(spec)
        assert [r.axis_value for r in rows] == ["2x3", "3x2"]

    def test_partial_failure_counted(self, tmp_path):
        # n_bs = 1 cannot host 2 RF chains: every trial of that axis
        # value fails and the run reports a partial failure.
        spec = self._spec(tmp_path, sweep_axis="n_bs", sweep_values=[1])
        with pytest.raises(PartialFailure) as err:
            run_experiment(spec)
        assert err.value.rows[0].infeasible_fraction == 1.0

    def test_hbf_stage(self, tmp_path):
        spec = self._spec(tmp_path, stage="hbf", trials=1,
                          sweep_values=[10.0])
        rows = run_experiment(spec)
        assert rows[0].mean_total > 0

    def test_iprs_scheme(self, tmp_path):
        spec = self._spec(tmp_path, scheme="iprs", iprs_candidates=3, trials=1,
                          sweep_values=[10.0])
        rows = run_experiment(spec)
        assert rows[0].mean_total > 0


class TestCli:
    def test_run_and_exit_codes(self, tmp_path, capsys):
        cfg = write_config(tmp_path, dict(TINY, trials=1,
                                          output_path=str(tmp_path / "out")))
        assert cli_main(["run", str(cfg)]) == 0
        out = capsys.readouterr().out
        assert "mean_total" in out

    def test_config_error_exit_2(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json", encoding="utf-8")
        assert cli_main(["run", str(bad)]) == 2
        invalid = write_config(tmp_path, dict(TINY, scheme="nope"), "invalid.json")
        assert cli_main(["run", str(invalid)]) == 2

    def test_partial_failure_exit_3(self, tmp_path):
        cfg = write_config(tmp_path, dict(TINY, sweep_axis="n_bs",
                                          sweep_values=[1],
                                          output_path=str(tmp_path / "out")))
        assert cli_main(["run", str(cfg)]) == 3

    def test_oracle_subcommand(self, tmp_path):
        cfg = write_config(tmp_path, dict(TINY, output_path=str(tmp_path / "oracle")))
        assert cli_main(["oracle", str(cfg)]) == 0
        record = json.loads((tmp_path / "oracle" / "oracle.json").read_text())
        assert record["patterns_enumerated"] == 6
        assert record["best_total"] >= max(record["per_candidate_totals"]) - 1e-12

    def test_threads_env_overrides(self, tmp_path, monkeypatch):
        cfg = write_config(tmp_path, dict(TINY, trials=2,
                                          output_path=str(tmp_path / "env")))
        monkeypatch.setenv("BEAMHOP_THREADS", "2")
        assert cli_main(["run", str(cfg)]) == 0
        resolved = json.loads((tmp_path / "env" / "resolved_config.json").read_text())
        assert resolved["parallel"] == 2

    def test_presets_list(self, capsys):
        assert cli_main(["presets", "list"]) == 0
        assert "fig4" in capsys.readouterr().out

    def test_seed_override_changes_output(self, tmp_path):
        cfg = write_config(tmp_path, dict(TINY, trials=1,
                                          output_path=str(tmp_path / "s1")))
        assert cli_main(["run", str(cfg), "--seed", "11", "--out", str(tmp_path / "s2")]) == 0
        a = json.loads((tmp_path / "s2" / "resolved_config.json").read_text())
        assert a["seed"] == 11
