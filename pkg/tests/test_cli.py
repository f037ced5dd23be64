"""End-to-end checks of the console script in a subprocess."""

import os
import subprocess

SMALL_HOM = "tau_points = 51\n"


def run_cli(*args, cwd, extra_env=None):
    env = dict(os.environ)
    if extra_env:
        env.update(extra_env)
    return subprocess.run(
        ["homcat", *args],
        cwd=cwd,
        env=env,
        capture_output=True,
        text=True,
        timeout=300,
    )


def write_config(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestUsage:
    def test_no_arguments_prints_usage_and_fails(self, tmp_path):
        proc = run_cli(cwd=tmp_path)
        assert proc.returncode == 1
        assert "usage:" in proc.stderr
        assert "pick an experiment" in proc.stderr
        assert proc.stdout == ""

    def test_empty_config_file_also_prints_usage(self, tmp_path):
        cfg = write_config(tmp_path, "# nothing here\n")
        proc = run_cli("--config", cfg, cwd=tmp_path)
        assert proc.returncode == 1
        assert "usage:" in proc.stderr

    def test_unknown_experiment_token_fails(self, tmp_path):
        proc = run_cli("homm", cwd=tmp_path)
        assert proc.returncode == 1
        assert "validation error" in proc.stderr
        assert "homm" in proc.stderr

    def test_stray_token_pair_fails(self, tmp_path):
        proc = run_cli("hom", "eraser", cwd=tmp_path)
        assert proc.returncode == 1
        assert "wigner cat-decomp" in proc.stderr


class TestConfigErrors:
    def test_missing_config_file_fails(self, tmp_path):
        proc = run_cli("hom", "--config", "no-such-file.cfg", cwd=tmp_path)
        assert proc.returncode == 1
        assert "config file not found" in proc.stderr

    def test_bad_key_is_reported_with_its_line(self, tmp_path):
        cfg = write_config(tmp_path, "tau_points = 51\nfilter_widht_pm = 50\n")
        proc = run_cli("hom", "--config", cfg, cwd=tmp_path)
        assert proc.returncode == 1
        assert "line 2" in proc.stderr
        assert "filter_widht_pm" in proc.stderr

    def test_ambiguous_detector_window_exits_with_the_regime_code(self, tmp_path):
        cfg = write_config(
            tmp_path, "taubar_points = 51\ndetector_window_s = 2.55e-11\n"
        )
        proc = run_cli("time-resolved", "--config", cfg, cwd=tmp_path)
        assert proc.returncode == 2
        assert "numeric-regime error" in proc.stderr


class TestRuns:
    def test_hom_writes_the_announced_files(self, tmp_path):
        cfg = write_config(tmp_path, SMALL_HOM)
        proc = run_cli("hom", "--config", cfg, "--out", "results", cwd=tmp_path)
        assert proc.returncode == 0, proc.stderr
        assert "visibility = " in proc.stdout
        announced = [
            line.split(" ", 1)[1]
            for line in proc.stdout.splitlines()
            if line.startswith("wrote ")
        ]
        assert announced == [
            "results/hom_trace.csv",
            "results/hom_trace.png",
            "results/hom_report.txt",
        ]
        for name in announced:
            assert (tmp_path / name).exists()

    def test_experiment_can_come_from_the_config_file(self, tmp_path):
        cfg = write_config(tmp_path, "experiment = hom\n" + SMALL_HOM)
        proc = run_cli("--config", cfg, "--out", "r2", cwd=tmp_path)
        assert proc.returncode == 0, proc.stderr
        assert (tmp_path / "r2" / "hom_trace.csv").exists()

    def test_csv_bytes_survive_reruns_and_thread_counts(self, tmp_path):
        cfg = write_config(tmp_path, SMALL_HOM)
        first = run_cli("hom", "--config", cfg, "--out", "a", cwd=tmp_path)
        second = run_cli(
            "hom",
            "--config",
            cfg,
            "--out",
            "b",
            cwd=tmp_path,
            extra_env={"OMP_NUM_THREADS": "8", "OPENBLAS_NUM_THREADS": "4"},
        )
        assert first.returncode == 0 and second.returncode == 0
        trace_a = (tmp_path / "a" / "hom_trace.csv").read_bytes()
        trace_b = (tmp_path / "b" / "hom_trace.csv").read_bytes()
        assert trace_a == trace_b
        png_a = (tmp_path / "a" / "hom_trace.png").read_bytes()
        png_b = (tmp_path / "b" / "hom_trace.png").read_bytes()
        assert png_a == png_b

    def test_cat_decomposition_subcommand_writes_three_grids(self, tmp_path):
        cfg = write_config(tmp_path, "map_time_points = 33\n")
        proc = run_cli(
            "wigner", "cat-decomp", "--config", cfg, "--out", "cat", cwd=tmp_path
        )
        assert proc.returncode == 0, proc.stderr
        for name in ("cat_w12_map.csv", "cat_w21_map.csv", "cat_beating_map.csv"):
            assert (tmp_path / "cat" / name).exists()
        assert "sum identity max residual = " in proc.stdout
        report = (tmp_path / "cat" / "cat_decomp_report.txt").read_text()
        residual = float(
            [l for l in report.splitlines() if "sum identity" in l][0].split("=")[-1]
        )
        assert residual < 1e-10


class TestPrintConfig:
    def test_resolved_echo_in_canonical_units(self, tmp_path):
        cfg = write_config(tmp_path, "filter_width_pm = 50\n")
        proc = run_cli("hom", "--config", cfg, "--print-config", cwd=tmp_path)
        assert proc.returncode == 0, proc.stderr
        assert "filter_width_rads = 39201905667.197784" in proc.stdout
        assert "experiment = hom" in proc.stdout
        assert "placement = after_splitter" in proc.stdout
        assert not (tmp_path / "homcat-results").exists()

    def test_echo_round_trips_through_the_parser(self, tmp_path):
        cfg = write_config(tmp_path, "filter_width_pm = 50\n")
        first = run_cli("eraser", "--config", cfg, "--print-config", cwd=tmp_path)
        echoed = write_config(tmp_path, first.stdout, name="echo.cfg")
        second = run_cli("--config", echoed, "--print-config", cwd=tmp_path)
        assert second.returncode == 0, second.stderr
        assert second.stdout == first.stdout


class TestSelftest:
    def test_selftest_passes(self, tmp_path):
        proc = run_cli("--selftest", cwd=tmp_path)
        assert proc.returncode == 0, proc.stdout
        assert "selftest: PASS (11/11 criteria)" in proc.stdout

    def test_coarsened_grids_fail_with_the_acceptance_code(self, tmp_path):
        proc = run_cli("--selftest-coarsen-grids", cwd=tmp_path)
        assert proc.returncode == 3
        assert "selftest: FAIL" in proc.stdout
        assert "GridResolutionError" in proc.stdout
