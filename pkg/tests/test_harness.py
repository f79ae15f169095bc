import math

import numpy as np
import pytest

from pursuitbench import (
    ConfigError,
    ControllerKind,
    ParameterError,
    emit_report,
    load_config,
    load_sweep_config,
    run_comparison,
    run_lookahead_sweep,
)
from pursuitbench.cli import main

SMALL_CONFIG = """
paths:
  - {name: B, corner_angle_deg: 90.0, segment_length: 1.5, waypoint_spacing: 0.05}
controllers: [rpp, dwpp]
trials: 2
noise: {sigma_pose_init: 0.01, seed: 3}
"""


@pytest.fixture
def small_config(tmp_path):
    file = tmp_path / "small.yaml"
    file.write_text(SMALL_CONFIG)
    return load_config(file)


class TestLoadConfig:
    def test_default_profile_values(self):
        cfg = load_config("experiment_table1")
        limits = cfg.limits
        assert (limits.v_max, limits.v_min) == (0.5, 0.0)
        assert (limits.omega_max, limits.omega_min) == (1.0, -1.0)
        assert (limits.accel_max, limits.decel_max) == (0.5, 0.5)
        assert (limits.ang_accel_max, limits.ang_decel_max) == (1.0, 1.0)
        assert limits.dt == 0.033
        assert cfg.lookahead.mode == "velocity_scaled"
        assert cfg.lookahead.fixed_distance == 0.6
        assert (cfg.lookahead.min_distance, cfg.lookahead.max_distance) == (0.3, 0.7)
        assert cfg.lookahead.projection_time == 1.4
        assert cfg.regulation.min_turn_radius == 0.9
        assert cfg.regulation.min_regulated_speed == 0.25
        assert cfg.regulation.enable_proximity is False
        assert [name for name, _ in cfg.paths] == ["A", "B", "C"]
        assert [math.degrees(spec.corner_angle) for _, spec in cfg.paths] == pytest.approx(
            [45.0, 90.0, 135.0]
        )
        assert all(spec.segment_length == 3.0 for _, spec in cfg.paths)
        assert [kind.value for kind in cfg.controllers] == ["pp", "app", "rpp", "dwpp"]
        assert cfg.trials == 5

    def test_sweep_profile_values(self):
        sweep = load_sweep_config("simulation_table6")
        limits = sweep.base.limits
        assert (limits.v_max, limits.accel_max, limits.decel_max) == (0.26, 0.26, 0.26)
        assert (limits.omega_max, limits.omega_min) == (0.5, -0.5)
        assert (limits.ang_accel_max, limits.ang_decel_max) == (0.5, 0.5)
        assert limits.dt == 0.033
        assert sweep.base.lookahead.mode == "fixed"
        assert not sweep.base.regulation.enable_curvature
        assert not sweep.base.regulation.enable_proximity
        assert not sweep.base.regulation.enable_goal
        assert sweep.lookahead_values == (0.26, 0.39, 0.52, 0.65, 0.78, 0.91, 1.04)
        assert [name for name, _ in sweep.base.paths] == ["C"]

    def test_empty_file_means_all_defaults(self, tmp_path):
        file = tmp_path / "empty.yaml"
        file.write_text("")
        assert load_config(file) == load_config("experiment_table1")

    def test_override_merges_with_defaults(self, tmp_path):
        file = tmp_path / "override.yaml"
        file.write_text("limits: {v_max: 0.3}\ntrials: 2\n")
        cfg = load_config(file)
        assert cfg.limits.v_max == 0.3
        assert cfg.limits.dt == 0.033
        assert cfg.trials == 2

    def test_zero_trials_rejected(self, tmp_path):
        file = tmp_path / "bad.yaml"
        file.write_text("trials: 0\n")
        with pytest.raises(ConfigError, match="trials"):
            load_config(file)

    def test_unknown_top_level_key_rejected(self, tmp_path):
        file = tmp_path / "bad.yaml"
        file.write_text("lookahed: {}\n")
        with pytest.raises(ConfigError, match="lookahed"):
            load_config(file)

    def test_unknown_nested_key_rejected(self, tmp_path):
        file = tmp_path / "bad.yaml"
        file.write_text("limits: {vmax: 0.5}\n")
        with pytest.raises(ConfigError, match="vmax"):
            load_config(file)

    def test_invalid_value_names_section(self, tmp_path):
        file = tmp_path / "bad.yaml"
        file.write_text("limits: {dt: -1.0}\n")
        with pytest.raises(ConfigError, match="limits"):
            load_config(file)

    def test_unknown_controller_rejected(self, tmp_path):
        file = tmp_path / "bad.yaml"
        file.write_text("controllers: [pp, teb]\n")
        with pytest.raises(ConfigError, match="teb"):
            load_config(file)

    def test_duplicate_path_name_rejected(self, tmp_path):
        file = tmp_path / "bad.yaml"
        file.write_text(
            "paths:\n  - {name: A, corner_angle_deg: 45}\n  - {name: A, corner_angle_deg: 90}\n"
        )
        with pytest.raises(ConfigError, match="duplicate"):
            load_config(file)

    def test_non_increasing_sweep_values_rejected(self, tmp_path):
        file = tmp_path / "bad.yaml"
        file.write_text("lookahead_values: [0.5, 0.4]\n")
        with pytest.raises(ConfigError, match="lookahead_values"):
            load_sweep_config(file)

    def test_missing_source_rejected(self):
        with pytest.raises(ConfigError, match="neither"):
            load_config("no_such_profile")


class TestRunComparison:
    def test_writes_expected_artifacts(self, small_config, tmp_path):
        out = tmp_path / "out"
        results = run_comparison(small_config, out)
        assert set(results) == {("B", "rpp"), ("B", "dwpp")}
        assert (out / "path_B.csv").exists()
        for controller in ("rpp", "dwpp"):
            for trial in range(2):
                assert (out / f"traj_B_{controller}_trial{trial}.csv").exists()
        lines = (out / "metrics.csv").read_text().strip().splitlines()
        assert len(lines) == 1 + 2 * 2  # header + |paths|*|controllers|*trials
        assert lines[0].startswith("path,controller,trial,seed,")

    def test_trial_seeds_offset_from_base(self, small_config, tmp_path):
        run_comparison(small_config, tmp_path / "out")
        rows = (tmp_path / "out" / "metrics.csv").read_text().strip().splitlines()[1:]
        seeds = [int(row.split(",")[3]) for row in rows]
        assert sorted(set(seeds)) == [3, 4]

    def test_rerun_is_byte_identical(self, small_config, tmp_path):
        run_comparison(small_config, tmp_path / "a")
        run_comparison(small_config, tmp_path / "b")
        assert (tmp_path / "a" / "metrics.csv").read_bytes() == (
            tmp_path / "b" / "metrics.csv"
        ).read_bytes()

    def test_multi_trial_noise_gives_positive_sd(self, small_config, tmp_path):
        results = run_comparison(small_config, tmp_path / "out")
        assert results[("B", "rpp")].mean_cte.sd > 0.0
        assert results[("B", "dwpp")].violation_ratio == (0.0, 0.0)

    def test_single_trial_sd_is_zero(self, tmp_path):
        file = tmp_path / "one.yaml"
        file.write_text(SMALL_CONFIG.replace("trials: 2", "trials: 1"))
        results = run_comparison(load_config(file), tmp_path / "out")
        agg = results[("B", "rpp")]
        assert agg.trial_count == 1
        assert agg.mean_cte.sd == 0.0


class TestRunLookaheadSweep:
    def test_single_value_single_row(self, tmp_path):
        file = tmp_path / "sweep.yaml"
        file.write_text(SMALL_CONFIG + "lookahead_values: [0.4]\n")
        rows = run_lookahead_sweep(load_sweep_config(file), tmp_path / "out")
        assert len(rows) == 1
        assert rows[0][0] == 0.4

    def test_rows_cover_configured_values_in_order(self, tmp_path):
        file = tmp_path / "sweep.yaml"
        file.write_text(SMALL_CONFIG + "lookahead_values: [0.3, 0.5, 0.7]\n")
        out = tmp_path / "out"
        rows = run_lookahead_sweep(load_sweep_config(file), out)
        assert [row[0] for row in rows] == [0.3, 0.5, 0.7]
        csv_lines = (out / "sweep.csv").read_text().strip().splitlines()
        assert csv_lines[0] == "lookahead,mean_cte,travel_time"
        assert len(csv_lines) == 4
        assert [float(line.split(",")[0]) for line in csv_lines[1:]] == [0.3, 0.5, 0.7]


class TestEmitReport:
    def test_report_layout(self, small_config, tmp_path):
        out = tmp_path / "out"
        results = run_comparison(small_config, out)
        text = emit_report(results, small_config, out)
        for title in (
            "Constraint violation ratio [%]",
            "Mean cross track error [m]",
            "Max cross track error [m]",
            "Travel time [s]",
        ):
            assert title in text
        assert "RPP" in text and "DWPP" in text
        assert "±" in text
        assert (out / "summary.txt").read_text() == text
        assert (out / "summary.csv").exists()

    def test_stability_advisory_reference_case(self, small_config, tmp_path):
        # v_max 0.5 with the default stability settings needs 0.4 m; every
        # configured controller operates at or above that.
        text = emit_report(
            run_comparison(small_config, tmp_path / "out"), small_config, tmp_path / "out"
        )
        assert "minimum stable lookahead at v_max=0.5 m/s: 0.400 m" in text
        assert "BELOW ADVISORY THRESHOLD" not in text

    def test_advisory_flags_short_lookahead(self, tmp_path):
        file = tmp_path / "short.yaml"
        file.write_text(SMALL_CONFIG + "lookahead: {mode: fixed, fixed_distance: 0.2}\n")
        cfg = load_config(file)
        results = run_comparison(cfg, tmp_path / "out")
        text = emit_report(results, cfg, tmp_path / "out")
        assert "BELOW ADVISORY THRESHOLD" in text

    def test_empty_results_rejected(self, small_config, tmp_path):
        with pytest.raises(ParameterError):
            emit_report({}, small_config, tmp_path / "out")


class TestCli:
    def test_compare_subcommand(self, tmp_path, capsys):
        config = tmp_path / "cfg.yaml"
        config.write_text(SMALL_CONFIG)
        out = tmp_path / "out"
        assert main(["compare", "--config", str(config), "--out", str(out)]) == 0
        assert (out / "metrics.csv").exists()
        assert (out / "summary.txt").exists()
        assert "Travel time [s]" in capsys.readouterr().out

    def test_sweep_subcommand(self, tmp_path, capsys):
        config = tmp_path / "cfg.yaml"
        config.write_text(SMALL_CONFIG + "lookahead_values: [0.3, 0.6]\n")
        out = tmp_path / "out"
        assert main(["sweep", "--config", str(config), "--out", str(out)]) == 0
        assert (out / "sweep.csv").exists()
        assert "mean_cte" in capsys.readouterr().out

    def test_simulate_named_path(self, tmp_path, capsys):
        config = tmp_path / "cfg.yaml"
        config.write_text(SMALL_CONFIG)
        out = tmp_path / "out"
        code = main(
            ["simulate", "--controller", "dwpp", "--path", "B", "--config", str(config), "--out", str(out)]
        )
        assert code == 0
        assert (out / "traj_B_dwpp.csv").exists()
        assert "reached=True" in capsys.readouterr().out

    def test_simulate_csv_path_with_fixed_lookahead(self, tmp_path, capsys):
        waypoints = tmp_path / "line.csv"
        xs = np.linspace(0.0, 2.0, 41)
        waypoints.write_text("x,y\n" + "\n".join(f"{x},0.0" for x in xs))
        out = tmp_path / "out"
        code = main(
            ["simulate", "--controller", "pp", "--path", str(waypoints), "--lookahead", "0.4", "--out", str(out)]
        )
        assert code == 0
        assert (out / "traj_line_pp.csv").exists()

    def test_simulate_unknown_path_fails(self, tmp_path, capsys):
        assert main(["simulate", "--controller", "pp", "--path", "Z", "--out", str(tmp_path)]) == 1
        assert "error:" in capsys.readouterr().err

    def test_check_optimal_agrees_with_grid(self, capsys):
        code = main(
            ["check-optimal", "--v-lo", "0.2", "--v-hi", "0.5", "--w-lo", "-1", "--w-hi", "1", "--kappa", "10"]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "analytic" in out
        assert "yes" in out

    def test_bad_config_exits_nonzero(self, tmp_path, capsys):
        config = tmp_path / "bad.yaml"
        config.write_text("trials: 0\n")
        assert main(["compare", "--config", str(config), "--out", str(tmp_path)]) == 1
        assert "trials" in capsys.readouterr().err
