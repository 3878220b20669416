"""Config plumbing, run orchestration, artifact round-trips, CLI contract."""

import json

import numpy as np
import pytest

from nskshock.cli import main
from nskshock.diagnostics import read_diagnostics_csv
from nskshock.harness import (
    RunConfig,
    evolve,
    run_profile_command,
    run_simulate_command,
    run_sweep,
    run_verify,
    set_by_path,
)


def fast_config(**kw):
    """Coarse, short scenario for plumbing tests."""
    cfg = RunConfig()
    cfg.grid.dx_target = 1.0
    cfg.t_final = 3.0
    cfg.diag_cadence = 0.5
    for k, v in kw.items():
        setattr(cfg, k, v)
    return cfg


class TestConfig:
    def test_dict_roundtrip_lossless(self):
        cfg = RunConfig()
        cfg.end_states.delta_s = 0.123456789012345678
        cfg.grid.n = 1025
        back = RunConfig.from_dict(json.loads(json.dumps(cfg.to_dict())))
        assert back == cfg

    def test_set_by_path_parses_json_values(self):
        d = RunConfig().to_dict()
        set_by_path(d, "grid.n", "2049")
        set_by_path(d, "scheme.kind", "imex")
        set_by_path(d, "end_states.delta_s", "0.04")
        cfg = RunConfig.from_dict(d)
        assert cfg.grid.n == 2049
        assert cfg.scheme.kind == "imex"
        assert cfg.end_states.delta_s == 0.04

    def test_unknown_keys_rejected(self):
        d = RunConfig().to_dict()
        with pytest.raises(KeyError):
            set_by_path(d, "grid.nx", "10")
        with pytest.raises(KeyError):
            set_by_path(d, "turbo.mode", "on")
        with pytest.raises(ValueError):
            RunConfig.from_dict({"not_a_key": 1})


class TestEvolve:
    def test_short_run_produces_records(self):
        result = evolve(fast_config())
        assert not result.aborted
        assert len(result.records) == 7  # t = 0, 0.5, ..., 3.0
        assert result.records[-1].t == pytest.approx(3.0, abs=0.05)
        # conservation bookkeeping stays at machine level
        assert abs(result.records[-1].mass_res_v) <= 1e-8

    def test_zero_perturbation_keeps_shift_small(self):
        cfg = fast_config()
        cfg.perturbation.kind = "none"
        cfg.perturbation.amp_u = 0.0
        result = evolve(cfg)
        assert abs(result.final_state.X) <= 1e-4

    def test_inconsistent_w_start_reported(self):
        cfg = fast_config()
        cfg.perturbation.w_mode = "independent"
        cfg.perturbation.amp_w = 0.01
        result = evolve(cfg)
        ts, vals = zip(*result.w_consistency_series)
        assert vals[0] >= 0.005  # off the constraint manifold by design

    def test_imex_scheme_runs(self):
        cfg = fast_config()
        cfg.scheme.kind = "imex"
        cfg.scheme.dt_override = 0.05
        result = evolve(cfg)
        assert not result.aborted

    def test_lab_frame_runs(self):
        cfg = fast_config()
        cfg.grid.frame = "lab"
        cfg.t_final = 1.0
        result = evolve(cfg)
        assert not result.aborted


class TestArtifacts:
    def test_profile_files(self, tmp_path):
        cfg = RunConfig()
        rep = run_profile_command(cfg, tmp_path)
        for name in ("profile.csv", "profile_meta.json", "profile_report.json", "manifest.json"):
            assert (tmp_path / name).exists()
        assert rep["monotone"] is True
        meta = json.loads((tmp_path / "profile_meta.json").read_text())
        assert meta["end_states"]["delta_s"] == pytest.approx(0.05, rel=1e-12)

    def test_simulate_files_and_determinism(self, tmp_path):
        cfg = fast_config()
        cfg.snapshot_cadence = 1.5
        a = tmp_path / "a"
        b = tmp_path / "b"
        run_simulate_command(cfg, a)
        run_simulate_command(cfg, b)
        assert (a / "diagnostics.csv").read_bytes() == (b / "diagnostics.csv").read_bytes()
        assert (a / "manifest.json").exists()
        assert (a / "snapshot_00000.csv").exists()
        recs = read_diagnostics_csv(a / "diagnostics.csv")
        assert len(recs) == 7

    def test_snapshot_readable(self, tmp_path):
        cfg = fast_config()
        cfg.snapshot_cadence = 2.0
        run_simulate_command(cfg, tmp_path)
        data = np.genfromtxt(tmp_path / "snapshot_00000.csv", delimiter=",", names=True)
        assert list(data.dtype.names) == ["x", "v", "u", "w"]
        assert data["v"].min() > 0.0


class TestVerify:
    def test_battery_all_pass(self):
        report = run_verify()
        failing = [k for k, v in report.items() if isinstance(v, dict) and not v["pass"]]
        assert failing == []
        assert report["all_pass"]

    def test_negative_control_fails_kernel(self):
        report = run_verify(flip_cstar_sign=True)
        assert not report["g1_kernel"]["pass"]
        assert not report["all_pass"]


class TestSweep:
    def test_strength_sweep_fits(self, tmp_path):
        cfg = RunConfig()
        res = run_sweep(cfg, "end_states.delta_s", [0.02, 0.04, 0.08], out_dir=tmp_path, max_workers=1)
        assert all(r["status"] == "ok" for r in res["rows"])
        fits = res["fits"]
        assert 0.8 <= fits["tail_rate_left_vs_delta_s"] <= 1.2
        assert 0.8 <= fits["tail_rate_right_vs_delta_s"] <= 1.2
        assert fits["diffusion_residual_right_vs_delta_s"] >= 1.8
        assert (tmp_path / "sweep.csv").exists()
        assert (tmp_path / "sweep_fits.json").exists()

    def test_failures_recorded_not_raised(self, tmp_path):
        cfg = RunConfig()
        res = run_sweep(cfg, "end_states.delta_s", [0.05, -1.0], out_dir=tmp_path, max_workers=1)
        statuses = [r["status"] for r in res["rows"]]
        assert statuses[0] == "ok"
        assert statuses[1].startswith("failed")

    def test_empty_values_rejected(self):
        with pytest.raises(ValueError):
            run_sweep(RunConfig(), "end_states.delta_s", [])

    def test_unknown_param_rejected(self):
        with pytest.raises(KeyError):
            run_sweep(RunConfig(), "end_states.typo", [0.1])


class TestCli:
    def test_missing_config_is_usage_error(self, tmp_path, capsys):
        rc = main(["profile", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path)])
        assert rc == 1

    def test_profile_weak_and_strong(self, tmp_path):
        rc = main(["profile", "--v-plus", "0.7", "--delta-s", "0.05", "--out", str(tmp_path / "weak")])
        assert rc == 0
        rep = json.loads((tmp_path / "weak" / "profile_report.json").read_text())
        assert rep["monotone"] is True
        rc = main(["profile", "--v-plus", "0.7", "--delta-s", "0.5", "--out", str(tmp_path / "strong")])
        assert rc == 0
        rep = json.loads((tmp_path / "strong" / "profile_report.json").read_text())
        assert rep["monotone"] is False

    def test_profile_failure_exit_code(self, tmp_path):
        # window far too small for the tails: solver reports failure, exit 2
        rc = main([
            "profile", "--delta-s", "0.05", "--out", str(tmp_path),
            "--set", "profile.L=30.0",
        ])
        assert rc == 2

    def test_blowup_exit_code_with_diagnostics(self, tmp_path):
        cfg = fast_config()
        cfg.t_final = 30.0
        cfg.perturbation.kind = "random_smooth"
        cfg.perturbation.width = 3.0  # high-frequency content seeds the instability
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg.to_dict()))
        rc = main([
            "simulate", "--config", str(cfg_path), "--out", str(tmp_path / "run"),
            "--set", "scheme.cfl=6.0",
        ])
        assert rc == 3
        recs = read_diagnostics_csv(tmp_path / "run" / "diagnostics.csv")
        assert len(recs) >= 1  # final diagnostics still written
        manifest = json.loads((tmp_path / "run" / "manifest.json").read_text())
        assert manifest["aborted"] is True

    def test_verify_ok_and_mutation(self, tmp_path):
        assert main(["verify", "--out", str(tmp_path / "v1")]) == 0
        assert main(["verify", "--out", str(tmp_path / "v2"), "--flip-cstar-sign"]) == 4
        rep = json.loads((tmp_path / "v2" / "verify_report.json").read_text())
        assert not rep["g1_kernel"]["pass"]

    def test_sweep_cli_and_empty_values(self, tmp_path):
        rc = main([
            "sweep", "--param", "end_states.delta_s", "--values", "0.04,0.08",
            "--task", "profile", "--out", str(tmp_path), "--workers", "1",
        ])
        assert rc == 0
        assert (tmp_path / "sweep.csv").exists()
        assert main(["sweep", "--param", "end_states.delta_s", "--values", "", "--out", str(tmp_path)]) == 1

    def test_config_file_and_overrides(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({"end_states": {"delta_s": 0.04}}))
        rc = main([
            "profile", "--config", str(cfg_path), "--out", str(tmp_path / "out"),
            "--set", "profile.n=1001",
        ])
        assert rc == 0
        manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
        assert manifest["config"]["end_states"]["delta_s"] == 0.04
        assert manifest["config"]["profile"]["n"] == 1001

    def test_usage_error_on_bad_set(self, tmp_path):
        assert main(["profile", "--set", "oops", "--out", str(tmp_path)]) == 1
        assert main(["profile", "--set", "grid.toto=1", "--out", str(tmp_path)]) == 1
