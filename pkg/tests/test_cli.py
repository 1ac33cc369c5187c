import json

import numpy as np
import pytest

from qwalk.cli import main
from qwalk.experiments import EXPERIMENTS, ExperimentConfig, run_experiment
from qwalk.errors import ConfigError


def write_cfg(path, payload):
    path.write_text(json.dumps(payload))
    return str(path)


def run_cli(tmp_path, payload, *extra):
    cfg = write_cfg(tmp_path / "cfg.json", payload)
    return main(["run", "--config", cfg, *extra])


class TestConfigValidation:
    def test_unknown_experiment(self):
        with pytest.raises(ConfigError):
            ExperimentConfig("nope", {})

    def test_bad_format(self):
        with pytest.raises(ConfigError):
            ExperimentConfig("qrw", {}, output_format="yaml")

    def test_field_level_message(self):
        cfg = ExperimentConfig("classical", {"walk": "gillis", "eps": 2.0})
        with pytest.raises(ConfigError, match="parameters.eps"):
            run_experiment(cfg)

    def test_missing_required(self):
        cfg = ExperimentConfig("zn-factor", {"factors": [2, 3]})
        with pytest.raises(ConfigError, match="parameters.n"):
            run_experiment(cfg)

    def test_exit_codes(self, tmp_path, capsys):
        bad = {"experiment": "classical", "parameters": {"walk": "gillis", "eps": 2.0}}
        assert run_cli(tmp_path, bad, "--out", str(tmp_path / "o")) == 1
        guard = {
            "experiment": "cs-qrw",
            "parameters": {"m": 8, "beta_re": 1.4, "steps": 12},
        }
        assert run_cli(tmp_path, guard, "--out", str(tmp_path / "o2")) == 2

    def test_list_experiments(self, capsys):
        assert main(["list-experiments"]) == 0
        out = capsys.readouterr().out.split()
        assert list(EXPERIMENTS) == out


class TestRunArtifacts:
    def test_classical_run_writes_files(self, tmp_path):
        payload = {
            "experiment": "classical",
            "parameters": {"walk": "polya", "size": 9, "steps": 4},
            "output": {"path": str(tmp_path / "out"), "format": "csv"},
            "seed": 3,
        }
        assert run_cli(tmp_path, payload) == 0
        out = tmp_path / "out"
        assert (out / "results.csv").exists()
        assert (out / "meta.json").exists()
        assert (out / "pd.dat").exists()
        assert (out / "entropy.dat").exists()
        meta = json.loads((out / "meta.json").read_text())
        assert meta["experiment"] == "classical"
        assert "wall_time_s" in meta

    def test_zero_steps_returns_input(self, tmp_path):
        payload = {
            "experiment": "classical",
            "parameters": {"walk": "polya", "size": 7, "steps": 0, "p0": "point"},
            "output": {"path": str(tmp_path / "out"), "format": "csv"},
        }
        assert run_cli(tmp_path, payload) == 0
        lines = (tmp_path / "out" / "results.csv").read_text().strip().splitlines()
        assert len(lines) == 2  # header + step 0
        row = lines[1].split(",")
        pd = np.array([float(x) for x in row[3:]])
        want = np.zeros(7)
        want[3] = 1.0
        assert np.array_equal(pd, want)

    def test_determinism_byte_identical(self, tmp_path):
        payload = {
            "experiment": "majorization-audit",
            "parameters": {"size": 11, "steps": 5, "trials": 5},
            "seed": 42,
        }
        run_cli(tmp_path, payload, "--out", str(tmp_path / "a"))
        run_cli(tmp_path, payload, "--out", str(tmp_path / "b"))
        assert (tmp_path / "a" / "results.csv").read_bytes() == (
            tmp_path / "b" / "results.csv"
        ).read_bytes()

    def test_json_round_trip_full_precision(self, tmp_path):
        payload = {
            "experiment": "classical",
            "parameters": {"walk": "ls", "eps": 0.8, "size": 7, "steps": 3, "p0": "random"},
            "output": {"path": str(tmp_path / "out"), "format": "json"},
            "seed": 11,
        }
        assert run_cli(tmp_path, payload) == 0
        parsed = json.loads((tmp_path / "out" / "results.json").read_text())
        cfg = ExperimentConfig(
            "classical",
            {"walk": "ls", "eps": 0.8, "size": 7, "steps": 3, "p0": "random"},
            seed=11,
        )
        direct = run_experiment(cfg)
        for row_file, row_mem in zip(parsed["rows"], direct.rows):
            for a, b in zip(row_file[3:], row_mem[3:]):
                assert float(a) == float(b)

    def test_seed_changes_random_output(self, tmp_path):
        payload = {
            "experiment": "classical",
            "parameters": {"walk": "polya", "size": 9, "steps": 2, "p0": "random"},
        }
        run_cli(tmp_path, payload, "--out", str(tmp_path / "a"), "--seed", "1")
        run_cli(tmp_path, payload, "--out", str(tmp_path / "b"), "--seed", "2")
        assert (tmp_path / "a" / "results.csv").read_text() != (
            tmp_path / "b" / "results.csv"
        ).read_text()


class TestPlotData:
    def test_crw_sigma_series_is_sqrt_n(self, tmp_path):
        payload = {
            "experiment": "qrw",
            "parameters": {"scheme": "crw", "steps": 8},
            "output": {"path": str(tmp_path / "out"), "format": "csv"},
        }
        assert run_cli(tmp_path, payload) == 0
        rows = [
            line.split()
            for line in (tmp_path / "out" / "sigma.dat").read_text().splitlines()
            if not line.startswith("#") and line
        ]
        crw = {int(r[0]): float(r[1]) for r in rows if r[2] == "crw"}
        for n in range(1, 9):
            assert abs(crw[n] - np.sqrt(n)) < 1e-10

    def test_qrw2_ratio_column_ends_at_two(self, tmp_path):
        payload = {
            "experiment": "qrw",
            "parameters": {"scheme": "qrw2", "steps": 5},
            "output": {"path": str(tmp_path / "out"), "format": "csv"},
        }
        assert run_cli(tmp_path, payload) == 0
        lines = (tmp_path / "out" / "results.csv").read_text().strip().splitlines()
        header = lines[0].split(",")
        ratio_col = header.index("sigma_ratio")
        last = lines[-1].split(",")
        assert abs(float(last[ratio_col]) - 2.0) < 1e-9

    def test_qrw1_sigma_over_n_near_asymptote(self, tmp_path):
        payload = {
            "experiment": "qrw",
            "parameters": {"scheme": "qrw1", "steps": 40},
            "output": {"path": str(tmp_path / "out"), "format": "csv"},
        }
        assert run_cli(tmp_path, payload) == 0
        rows = [
            line.split()
            for line in (tmp_path / "out" / "sigma.dat").read_text().splitlines()
            if not line.startswith("#") and line
        ]
        q1 = {int(r[0]): float(r[1]) for r in rows if r[2] == "qrw1"}
        target = np.sqrt((2.0 - np.sqrt(2.0)) / 2.0)
        assert abs(q1[40] / 40.0 - target) < 0.1 * target

    def test_empty_series_header_only(self, tmp_path):
        from qwalk.cli import emit_plot_data
        from qwalk.experiments import RunResult

        res = RunResult(columns=["x"], rows=[], series={"empty": (("x", "y"), [])})
        paths = emit_plot_data(res, tmp_path)
        assert paths[0].read_text() == "# x y\n"

    def test_diffusion_limit_series(self, tmp_path):
        payload = {
            "experiment": "diffusion-limit",
            "parameters": {"m": 24, "gamma": 0.05, "t": 0.5, "n_list": [4, 8], "dt": 5e-3},
            "output": {"path": str(tmp_path / "out"), "format": "csv"},
        }
        assert run_cli(tmp_path, payload) == 0
        rows = [
            line.split()
            for line in (tmp_path / "out" / "deviation.dat").read_text().splitlines()
            if not line.startswith("#") and line
        ]
        devs = [float(r[1]) for r in rows]
        assert devs[1] < devs[0]

    def test_master_eq_run(self, tmp_path):
        payload = {
            "experiment": "master-eq",
            "parameters": {"m": 16, "gamma_re": 0.05, "t": 0.3, "dt": 2e-3, "samples": 3},
            "output": {"path": str(tmp_path / "out"), "format": "csv"},
        }
        assert run_cli(tmp_path, payload) == 0
        lines = (tmp_path / "out" / "results.csv").read_text().strip().splitlines()
        drift_col = lines[0].split(",").index("trace_drift")
        for line in lines[1:]:
            assert float(line.split(",")[drift_col]) < 1e-9

    def test_zn_factor_run(self, tmp_path):
        payload = {
            "experiment": "zn-factor",
            "parameters": {"n": 60, "factors": [3, 4, 5], "steps": 20},
            "output": {"path": str(tmp_path / "out"), "format": "csv"},
            "seed": 5,
        }
        assert run_cli(tmp_path, payload) == 0
        lines = (tmp_path / "out" / "results.csv").read_text().strip().splitlines()
        dev_col = lines[0].split(",").index("deviation")
        devs = [float(line.split(",")[dev_col]) for line in lines[1:]]
        assert max(devs) < 1e-11
