"""Tests for the sweep/convergence harness and the command-line interface."""

import numpy as np
import pytest

from risce.baselines import SchemeId
from risce.cli import main, read_config_file
from risce.errors import ConfigError
from risce.experiments import (
    ExperimentConfig,
    run_convergence,
    run_sweep,
    run_validation,
)

FAST = dict(k=2, m=3, l=2, trials=3, snr_db=(0.0, 10.0), accelerate=True)


class TestExperimentConfig:
    def test_defaults_fill_b_and_tau(self):
        cfg = ExperimentConfig(**FAST)
        assert cfg.b == 4 and cfg.tau == 2

    def test_validation_errors(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(estimator="map")
        with pytest.raises(ConfigError):
            ExperimentConfig(trials=0)
        with pytest.raises(ConfigError):
            ExperimentConfig(k=2, m=3, b=3)
        with pytest.raises(ConfigError):
            ExperimentConfig(k=2, m=3, tau=1)
        with pytest.raises(ConfigError):
            ExperimentConfig(m=8, rho=3, schemes=(SchemeId.PROPOSED_GROUPED,))
        with pytest.raises(ConfigError):
            ExperimentConfig(m=3, b=5, schemes=(SchemeId.ON_OFF,))

    def test_power_from_snr(self):
        cfg = ExperimentConfig(**FAST)
        assert np.allclose(cfg.power(10.0), 10.0)


class TestRunSweep:
    def test_row_order_and_determinism(self):
        cfg = ExperimentConfig(**FAST, seed=3,
                               schemes=(SchemeId.PROPOSED, SchemeId.NAIVE))
        rows_a = run_sweep(cfg)
        rows_b = run_sweep(cfg)
        assert len(rows_a) == 2 * 2 * 3
        keys = [(r.scheme, r.snr_db, r.trial) for r in rows_a]
        assert keys == sorted(
            keys, key=lambda t: (["proposed", "naive"].index(t[0]), t[1], t[2])
        )
        # byte-identical modulo wall-clock timing
        for a, b in zip(rows_a, rows_b):
            assert (a.scheme, a.snr_db, a.trial) == (b.scheme, b.snr_db, b.trial)
            assert a.analytic_nmse == b.analytic_nmse
            assert a.empirical_nmse == b.empirical_nmse
            assert a.iterations == b.iterations

    def test_common_draws_across_schemes(self):
        # the same (snr, trial) cell uses identical channel/noise draws for
        # every scheme, so equal designs give exactly equal empirical values
        cfg = ExperimentConfig(**FAST, seed=5,
                               schemes=(SchemeId.NAIVE, SchemeId.NAIVE))
        rows = run_sweep(cfg)
        half = len(rows) // 2
        for a, b in zip(rows[:half], rows[half:]):
            assert a.empirical_nmse == b.empirical_nmse

    def test_analytic_only_mode(self):
        cfg = ExperimentConfig(**FAST, simulate=False,
                               schemes=(SchemeId.PROPOSED,))
        rows = run_sweep(cfg)
        assert len(rows) == 2
        assert all(r.empirical_nmse is None for r in rows)

    def test_empirical_tracks_analytic(self):
        cfg = ExperimentConfig(k=2, m=3, l=2, trials=400, snr_db=(0.0,),
                               seed=7, schemes=(SchemeId.NAIVE,))
        rows = run_sweep(cfg)
        emp = np.mean([r.empirical_nmse for r in rows])
        assert emp == pytest.approx(rows[0].analytic_nmse, rel=0.1)

    def test_grouped_scheme_runs(self):
        cfg = ExperimentConfig(k=2, m=4, l=2, trials=2, snr_db=(0.0,), rho=2,
                               schemes=(SchemeId.PROPOSED_GROUPED,),
                               estimator="lmmse")
        rows = run_sweep(cfg)
        assert len(rows) == 2
        assert all(np.isfinite(r.analytic_nmse) for r in rows)

    def test_lmmse_estimator_path(self):
        cfg = ExperimentConfig(**FAST, estimator="lmmse",
                               schemes=(SchemeId.PROPOSED, SchemeId.NAIVE))
        rows = run_sweep(cfg)
        by = {(r.scheme, r.snr_db): r.analytic_nmse for r in rows}
        for snr in (0.0, 10.0):
            assert by[("proposed", snr)] <= by[("naive", snr)] + 1e-12


class TestRunConvergence:
    def test_traces_non_increasing_and_deterministic(self):
        cfg = ExperimentConfig(**FAST)
        rows = run_convergence(cfg)
        variants = {r.variant for r in rows}
        assert variants == {"mm", "accelerated"}
        for variant in variants:
            objs = [r.objective for r in rows if r.variant == variant]
            assert all(b <= a + 1e-12 for a, b in zip(objs, objs[1:]))
        rows_b = run_convergence(cfg)
        assert [r.objective for r in rows] == [r.objective for r in rows_b]

    def test_accelerated_uses_fewer_updates_to_reach_plain_level(self):
        cfg = ExperimentConfig(k=2, m=6, l=4, trials=1, snr_db=(0.0,))
        rows = run_convergence(cfg)
        plain = [r for r in rows if r.variant == "mm"]
        acc = [r for r in rows if r.variant == "accelerated"]
        target = plain[-1].objective * (1 + 1e-3)
        reached = [r.updates for r in acc if r.objective <= target]
        assert reached and reached[0] < plain[-1].updates


class TestValidation:
    def test_all_checks_pass_on_defaults(self):
        cfg = ExperimentConfig(**FAST)
        checks = run_validation(cfg)
        failed = [name for name, ok, _ in checks if not ok]
        assert not failed, f"failed checks: {failed}"


class TestCli:
    def test_sweep_writes_csv(self, tmp_path):
        out = tmp_path / "sweep.csv"
        rc = main([
            "sweep", "--k", "2", "--m", "3", "--l", "2", "--trials", "2",
            "--snr-db", "0", "--scheme", "naive,onoff", "--seed", "1",
            "--output", str(out),
        ])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "scheme,estimator,snr_db,trial,analytic_nmse,empirical_nmse,iterations,wall_ms"
        assert len(lines) == 1 + 2 * 2

    def test_sweep_output_deterministic_except_wall(self, tmp_path):
        args = ["sweep", "--k", "2", "--m", "3", "--l", "2", "--trials", "2",
                "--snr-db", "0", "5", "--scheme", "naive", "--seed", "9"]
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(args + ["--output", str(out1)]) == 0
        assert main(args + ["--output", str(out2)]) == 0
        strip = lambda p: [",".join(line.split(",")[:-1])
                           for line in p.read_text().splitlines()]
        assert strip(out1) == strip(out2)

    def test_config_file_and_overrides(self, tmp_path):
        cfgfile = tmp_path / "exp.cfg"
        cfgfile.write_text(
            "# comment\n"
            "m = 3\n"
            "l = 2\n"
            "snr-db = 0, 5\n"
            "schemes = naive\n"
            "trials = 2\n"
        )
        out = tmp_path / "sweep.csv"
        rc = main(["sweep", "--config", str(cfgfile), "--k", "2",
                   "--trials", "1", "--output", str(out)])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 1 + 2  # trials overridden to 1, two SNRs

    def test_bad_config_file_reports_line(self, tmp_path):
        cfgfile = tmp_path / "bad.cfg"
        cfgfile.write_text("m = 3\nwhat\n")
        rc = main(["sweep", "--config", str(cfgfile), "--output", "-"])
        assert rc == 2

    def test_unknown_key_rejected(self, tmp_path):
        cfgfile = tmp_path / "bad.cfg"
        cfgfile.write_text("mm = 3\n")
        assert main(["sweep", "--config", str(cfgfile)]) == 2
        with pytest.raises(ConfigError):
            read_config_file(str(cfgfile))

    def test_bad_scheme_is_config_error(self):
        rc = main(["sweep", "--scheme", "bogus", "--trials", "1"])
        assert rc == 2

    def test_converge_subcommand(self, tmp_path):
        out = tmp_path / "conv.csv"
        rc = main(["converge", "--k", "2", "--m", "3", "--l", "2",
                   "--snr-db", "0", "--output", str(out)])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "variant,iteration,objective,updates,wall_ms"
        assert len(lines) > 4

    def test_design_subcommand(self, tmp_path):
        out = tmp_path / "design.csv"
        rc = main(["design", "--k", "2", "--m", "3", "--l", "2",
                   "--snr-db", "0", "--scheme", "naive", "--output", str(out)])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "matrix,row,col,re,im"
        # V is 4x4 and X is 2x2 at these dimensions
        assert len(lines) == 1 + 16 + 4

    def test_validate_subcommand(self, capsys):
        rc = main(["validate", "--k", "2", "--m", "3", "--l", "2",
                   "--snr-db", "0"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "PASS" in out and "FAIL" not in out

    def test_plot_data_emitter(self, tmp_path):
        out = tmp_path / "sweep.csv"
        plot = tmp_path / "plot.dat"
        rc = main(["sweep", "--k", "2", "--m", "3", "--l", "2", "--trials", "2",
                   "--snr-db", "0", "5", "--scheme", "naive",
                   "--output", str(out), "--plot-data", str(plot)])
        assert rc == 0
        text = plot.read_text()
        assert text.startswith("# naive ls")
        assert len([l for l in text.splitlines() if l and not l.startswith("#")]) == 2

    def test_analytic_only_flag(self, tmp_path):
        out = tmp_path / "sweep.csv"
        rc = main(["sweep", "--k", "2", "--m", "3", "--l", "2",
                   "--snr-db", "0", "--scheme", "naive", "--analytic-only",
                   "--output", str(out)])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 2
        assert lines[1].split(",")[5] == ""  # empirical column empty

    def test_twelve_significant_digits(self, tmp_path):
        out = tmp_path / "sweep.csv"
        main(["sweep", "--k", "2", "--m", "3", "--l", "2", "--trials", "1",
              "--snr-db", "0", "--scheme", "naive", "--output", str(out)])
        value = out.read_text().splitlines()[1].split(",")[4]
        assert len(value.replace(".", "").replace("-", "").lstrip("0")) >= 10
