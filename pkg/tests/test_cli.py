"""Command line: checks, simulation, experiments, manifests and config diagnostics."""

import csv
import json

import numpy as np
import pytest

from heavylin.cli import main
from heavylin.conditions import fdd_condition_trend
from heavylin.config import ConfigError, load_config, load_preset, preset_names

BASE_MODEL = """[model]
alpha = 0.75
p = 1.0
q = 0.0
seed = 3
"""


def write(tmp_path, text, name="run.toml"):
    path = tmp_path / name
    path.write_text(text)
    return path


def read_json(path):
    return json.loads(path.read_text())


class TestCheck:
    def test_cancel_preset(self, tmp_path, capsys):
        assert main(["check", "--preset", "c01_minus", "--out", str(tmp_path)]) == 0
        report = read_json(tmp_path / "report.json")
        np.testing.assert_allclose(report["left"], [1e-2, 1e-3, 1e-4], rtol=1e-12)
        assert report["right"] == [0.0, 0.0, 0.0]
        assert (tmp_path / "report.txt").read_text().startswith(" " * 9 + "n")
        assert "left" in capsys.readouterr().out

    def test_empty_coefficients(self, tmp_path):
        cfg = write(tmp_path, BASE_MODEL + '[coefficients]\nkind = "finite_support"\nvalues = []\n')
        assert main(["check", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
        report = read_json(tmp_path / "o" / "report.json")
        assert report["left"] == [0.0, 0.0, 0.0] and report["right"] == [0.0, 0.0, 0.0]

    def test_matches_library(self, tmp_path):
        assert main(["check", "--preset", "example_41", "--out", str(tmp_path)]) == 0
        report = read_json(tmp_path / "report.json")
        cfg = load_preset("example_41")
        lib = fdd_condition_trend(cfg.seq, cfg.model, cfg.experiment["n_list"])
        assert report["left"] == lib.left and report["right"] == lib.right
        verdicts = {k: v["verdict"] for k, v in report["corollary_verdicts"].items()}
        assert verdicts == {"beta_summable": "fails", "bounded_ratio": "holds",
                            "weak_regularity": "fails"}


class TestSimulate:
    def test_rows_and_columns(self, tmp_path):
        assert main(["simulate", "--preset", "intro_cancel", "--n", "100", "--seed", "5",
                     "--out", str(tmp_path)]) == 0
        with open(tmp_path / "paths_seed5.csv") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["t", "S", "Z", "T_plus", "T_minus"]
        assert len(rows) == 102

    def test_deterministic(self, tmp_path):
        for d in ("a", "b"):
            main(["simulate", "--preset", "intro_cancel", "--n", "50", "--out", str(tmp_path / d)])
        assert (tmp_path / "a" / "paths_seed20240501.csv").read_bytes() == \
            (tmp_path / "b" / "paths_seed20240501.csv").read_bytes()

    def test_single_tap_scales_innovation_path(self, tmp_path):
        cfg = write(tmp_path, BASE_MODEL + "[coefficients]\nvalues = [2.5]\n[experiment]\nn = 64\n")
        assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
        data = np.loadtxt(tmp_path / "o" / "paths_seed3.csv", delimiter=",", skiprows=1)
        np.testing.assert_allclose(data[:, 1], 2.5 * data[:, 2], rtol=1e-12, atol=1e-15)


class TestExperiment:
    def test_frechet(self, tmp_path, capsys):
        code = main(["experiment", "frechet", "--preset", "intro_cancel", "--n", "500", "--reps", "400",
                     "--out", str(tmp_path), "--raw"])
        report = read_json(tmp_path / "report.json")
        assert code == 0 and report["passed"] and report["failures"] == []
        assert report["statistics"]["cdf_table"]["1.0"]["frechet"] == pytest.approx(0.36787944, rel=1e-7)
        assert "ks_to_frechet" in report["statistics"]
        assert (tmp_path / "raw.csv").exists()
        assert "PASS" in capsys.readouterr().out

    def test_m1_reports_theta(self, tmp_path):
        main(["experiment", "m1", "--preset", "example_52", "--n", "500", "--reps", "200",
              "--out", str(tmp_path)])
        probe = read_json(tmp_path / "report.json")["statistics"]["probes"]["delta=0.05,eta=1.0"]
        assert probe["theta"] == pytest.approx(0.6321, abs=1e-4)

    def test_failure_exit_code(self, tmp_path, capsys):
        cfg = write(tmp_path, """[model]
alpha = 0.7
p = 1.0
q = 0.0
seed = 1

[coefficients]
values = [1.0, -1.0]

[experiment]
n = 200
reps = 200
thresholds = { ks = 0.0 }
""")
        assert main(["experiment", "frechet", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 1
        err = capsys.readouterr().err
        assert json.loads(err.strip().splitlines()[-1]) == {"failures": ["ks_to_frechet"]}
        assert read_json(tmp_path / "o" / "report.json")["failures"] == ["ks_to_frechet"]

    def test_unknown_kind(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["experiment", "bogus", "--preset", "intro_cancel"])
        assert exc.value.code == 2


class TestReplay:
    @pytest.mark.parametrize("argv", [
        ["experiment", "fdd", "--preset", "two_tap", "--n", "300", "--reps", "300", "--threads", "2"],
        ["check", "--preset", "example_41"],
        ["simulate", "--preset", "intro_cancel", "--n", "40"],
    ])
    def test_byte_identical(self, tmp_path, argv):
        out = tmp_path / "run"
        main(argv + ["--out", str(out)])
        manifest = read_json(out / "manifest.json")
        assert manifest["command"] == argv[0] and "timestamp" in manifest
        main(["replay", str(out / "manifest.json")])
        assert (out / "replay" / "report.json").read_bytes() == (out / "report.json").read_bytes()
        first, again = read_json(out / "manifest.json"), read_json(out / "replay" / "manifest.json")
        first.pop("timestamp"), again.pop("timestamp")
        assert first == again


class TestConfig:
    def test_presets_listed(self, capsys):
        assert main(["presets"]) == 0
        assert capsys.readouterr().out.split() == preset_names()
        assert {"intro_cancel", "example_41", "example_52"} <= set(preset_names())

    def test_bad_alpha_names_line(self, tmp_path, capsys):
        cfg = write(tmp_path, "[model]\nalpha = 2.5\n[coefficients]\nvalues = [1.0]\n", "bad.toml")
        assert main(["check", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
        assert "bad.toml:2" in capsys.readouterr().err

    def test_unknown_experiment_key(self, tmp_path):
        cfg = write(tmp_path, BASE_MODEL + "[coefficients]\nvalues = [1.0]\n[experiment]\nn = 5\nrepz = 4\n")
        with pytest.raises(ConfigError, match=r"run\.toml:10: .*'repz'"):
            load_config(cfg)

    def test_unknown_table(self, tmp_path):
        cfg = write(tmp_path, BASE_MODEL + "[coefficients]\nvalues = [1.0]\n[plots]\nx = 1\n")
        with pytest.raises(ConfigError, match=r"run\.toml:8: unknown table"):
            load_config(cfg)

    def test_missing_table(self, tmp_path):
        cfg = write(tmp_path, BASE_MODEL)
        with pytest.raises(ConfigError, match="missing table"):
            load_config(cfg)

    def test_toml_syntax(self, tmp_path):
        with pytest.raises(ConfigError, match="TOML syntax"):
            load_config(write(tmp_path, "[model\n"))

    def test_needs_a_source(self, capsys):
        assert main(["check"]) == 2

    def test_overrides(self):
        cfg = load_preset("two_tap").with_overrides(seed=9, reps=11, n=None)
        assert cfg.seed == 9 and cfg.experiment["reps"] == 11
        assert cfg.experiment_config().n == load_preset("two_tap").experiment_config().n
