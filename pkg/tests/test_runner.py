"""Experiment configs, reports, emitted files, and the command line."""

import json

import numpy as np
import pytest

import spinsource as ss
from spinsource import cli
from spinsource.errors import ConfigError
from spinsource.runner import (
    CSV_HEADER,
    ExperimentConfig,
    RunReport,
    emit_report,
    run_config_file,
    run_experiment,
)

# configs travel as JSON, so matrices here are plain lists
RHO_SITE = [[0.75, 0.25], [0.25, 0.25]]
APERIODIC_T = [[0.9, 0.1], [0.2, 0.8]]
PERIOD2_T = [[0.0, 1.0], [1.0, 0.0]]


def iid_config(**overrides):
    base = {
        "name": "iid_small",
        "seed": 7,
        "source": {"kind": "iid", "state": RHO_SITE},
        "tests": "all",
        "n_max": 120,
        "observable_count": 1,
        "backend": "transfer",
    }
    base.update(overrides)
    return ExperimentConfig.from_dict(base)


def markov_config(transition, name, **overrides):
    base = {
        "name": name,
        "seed": 11,
        "source": {
            "kind": "classically_correlated",
            "process": {"kind": "markov", "transition": transition},
            "alphabet": "computational",
        },
        "tests": "all",
        "n_max": 150,
        "observable_count": 1,
        "backend": "transfer",
    }
    base.update(overrides)
    return ExperimentConfig.from_dict(base)


class TestConfigParsing:
    def test_seed_is_mandatory(self):
        with pytest.raises(ConfigError, match="seed"):
            ExperimentConfig.from_dict({"name": "x", "source": {"kind": "iid", "state": RHO_SITE}})

    def test_seed_must_be_int(self):
        with pytest.raises(ConfigError, match="seed"):
            ExperimentConfig.from_dict(
                {"name": "x", "seed": 1.5, "source": {"kind": "iid", "state": RHO_SITE}}
            )

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown"):
            ExperimentConfig.from_dict(
                {"name": "x", "seed": 1, "source": {"kind": "iid", "state": RHO_SITE}, "zzz": 1}
            )

    def test_bad_test_name(self):
        with pytest.raises(ConfigError, match="tests"):
            iid_config(tests=["strong", "nope"])

    def test_test_aliases(self):
        cfg = iid_config(tests=["ergodic", "weak", "strong"])
        assert cfg.tests == ("ergodic_mean", "weak_mixing", "strong_mixing")

    def test_bad_matrix_entry(self):
        with pytest.raises(ConfigError, match="source.state"):
            ExperimentConfig.from_dict(
                {"name": "x", "seed": 1, "source": {"kind": "iid", "state": [[1, "a"], [0, 0]]}}
            )

    def test_complex_entries_as_pairs(self):
        cfg = ExperimentConfig.from_dict(
            {
                "name": "x",
                "seed": 1,
                "source": {"kind": "iid", "state": [[0.5, [0, 0.1]], [[0, -0.1], 0.5]]},
            }
        )
        src, _ = ss.runner.build_source(cfg)
        assert src.density(1).entries[0, 1] == pytest.approx(0.1j)

    def test_bad_process_kind(self):
        with pytest.raises(ConfigError, match="process"):
            markov_config(APERIODIC_T, "x", source={
                "kind": "classically_correlated",
                "process": {"kind": "mystery"},
                "alphabet": "computational",
            })

    def test_name_must_be_path_safe(self):
        with pytest.raises(ConfigError, match="name"):
            iid_config(name="a/b")

    def test_n_max_floor(self):
        with pytest.raises(ConfigError, match="n_max"):
            iid_config(n_max=4)

    def test_tolerance_range(self):
        with pytest.raises(ConfigError, match="tolerance"):
            iid_config(tolerance=0.0)

    def test_bad_json_reports_position(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"name": "x",}')
        with pytest.raises(ConfigError, match="line"):
            ExperimentConfig.from_json(path)

    def test_echo_round_trips(self):
        cfg = markov_config(APERIODIC_T, "echo_me", tolerance=0.02)
        assert ExperimentConfig.from_dict(cfg.echo()) == cfg

    def test_echo_hides_output_dir(self):
        cfg = iid_config(output_dir="/tmp/somewhere")
        assert "output_dir" not in cfg.echo()


class TestRunExperiment:
    def test_iid_run_passes(self):
        report = run_experiment(iid_config())
        assert report.passed and not report.failures
        # a bare density source carries no classical process to classify
        assert report.classification is None
        assert report.sweep.verdicts == ("pass", "pass", "pass")

    def test_markov_run_carries_oracle(self):
        report = run_experiment(markov_config(APERIODIC_T, "oracle"))
        assert report.classification.verdicts == (True, True, True)
        oracle = report.payload()["classification_oracle"]
        assert oracle["verdicts"] == {
            "ergodic_mean": True,
            "weak_mixing": True,
            "strong_mixing": True,
        }

    def test_period2_run_fails_with_named_pairs(self):
        report = run_experiment(markov_config(PERIOD2_T, "flip"))
        assert not report.passed
        kinds = {f["kind"] for f in report.failures}
        assert kinds == {"test"}
        names = {f["name"] for f in report.failures}
        assert names == {"weak_mixing", "strong_mixing"}
        assert all("pair" in f and "final_deviation" in f for f in report.failures)

    def test_checks_only_selection(self):
        cfg = iid_config(tests=["consistency", "stationarity"])
        report = run_experiment(cfg)
        assert report.sweep is None
        assert set(report.payload()["checks"]) == {"consistency", "stationarity"}

    def test_channel_spec_applies(self):
        cfg = markov_config(
            APERIODIC_T,
            "dep",
            channel={"kind": "depolarizing", "params": {"p": 0.3}},
        )
        report = run_experiment(cfg)
        assert report.passed

    def test_block_channel_switches_to_block_stationarity(self):
        cfg = iid_config(
            name="blocked",
            channel={"kind": "amplitude_damping", "params": {"gamma": 0.4}, "block_sites": 2},
            tests=["consistency", "stationarity"],
        )
        report = run_experiment(cfg)
        checks = report.payload()["checks"]
        assert checks["stationarity"]["mode"].startswith("block")
        assert report.passed

    def test_wall_time_tracked_but_not_emitted(self):
        report = run_experiment(iid_config())
        assert report.wall_time_s > 0
        payload = json.dumps(report.payload())
        assert "wall" not in payload


class TestEmitReport:
    def test_files_and_determinism(self, tmp_path):
        cfg = markov_config(APERIODIC_T, "emit_demo", output_dir=str(tmp_path / "a"))
        paths_a = emit_report(run_experiment(cfg))
        paths_b = emit_report(run_experiment(cfg), output_dir=tmp_path / "b")
        blobs_a = [p.read_bytes() for p in paths_a]
        blobs_b = [p.read_bytes() for p in paths_b]
        assert blobs_a == blobs_b
        assert paths_a[0].name == "emit_demo.report.json"
        assert paths_a[1].name == "emit_demo.decay.csv"

    def test_csv_row_count_contract(self, tmp_path):
        cfg = markov_config(APERIODIC_T, "rows", n_max=60, output_dir=str(tmp_path))
        report = run_experiment(cfg)
        json_path, csv_path = emit_report(report)
        lines = csv_path.read_text().strip().split("\n")
        pair_count = len(report.sweep.pairs)
        # block m = 1 here, so each pair contributes n_max - m + 1 = 60 rows
        assert len(lines) == 1 + pair_count * 60
        assert lines[0] == ",".join(CSV_HEADER)

    def test_iid_csv_deviation_column_is_zero(self, tmp_path):
        cfg = iid_config(name="flat", n_max=40, output_dir=str(tmp_path))
        _, csv_path = emit_report(run_experiment(cfg))
        rows = csv_path.read_text().strip().split("\n")[1:]
        devs = {row.split(",")[5] for row in rows}
        assert devs == {"0.0"}

    def test_report_json_is_sorted_and_versioned(self, tmp_path):
        cfg = iid_config(name="meta", output_dir=str(tmp_path))
        json_path, _ = emit_report(run_experiment(cfg))
        payload = json.loads(json_path.read_text())
        assert payload["toolkit_version"] == ss.__version__
        assert list(payload) == sorted(payload)

    def test_payload_echo_reruns_identically(self, tmp_path):
        cfg = markov_config(APERIODIC_T, "rerun", n_max=80)
        first = run_experiment(cfg)
        echoed = ExperimentConfig.from_dict(first.payload()["config"])
        second = run_experiment(echoed)
        assert first.payload() == second.payload()


class TestCLI:
    def write_config(self, tmp_path, name="cli_iid", **overrides):
        body = {
            "name": name,
            "seed": 3,
            "source": {"kind": "iid", "state": RHO_SITE},
            "tests": "all",
            "n_max": 100,
            "observable_count": 1,
            "backend": "transfer",
        }
        body.update(overrides)
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(body))
        return path

    def test_exit_zero_on_pass(self, tmp_path, capsys):
        path = self.write_config(tmp_path)
        code = cli.main([str(path), "--output-dir", str(tmp_path)])
        assert code == 0
        out = capsys.readouterr().out
        assert "cli_iid" in out and "pass" in out

    def test_exit_one_on_verdict_failure(self, tmp_path, capsys):
        path = self.write_config(
            tmp_path,
            name="cli_flip",
            source={
                "kind": "classically_correlated",
                "process": {"kind": "markov", "transition": PERIOD2_T},
                "alphabet": "computational",
            },
        )
        code = cli.main([str(path), "--output-dir", str(tmp_path)])
        assert code == 1
        assert "fail" in capsys.readouterr().out

    def test_exit_two_on_config_error(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text(json.dumps({"name": "broken"}))
        code = cli.main([str(path), "--output-dir", str(tmp_path)])
        assert code == 2
        assert "seed" in capsys.readouterr().err

    def test_exit_three_on_cap(self, tmp_path, capsys):
        path = self.write_config(tmp_path, name="cli_cap", backend="dense", n_max=40)
        code = cli.main([str(path), "--output-dir", str(tmp_path)])
        assert code == 3

    def test_overrides_apply(self, tmp_path):
        path = self.write_config(tmp_path, name="cli_over")
        code = cli.main(
            [
                str(path),
                "--output-dir",
                str(tmp_path),
                "--seed",
                "9",
                "--n-max",
                "64",
            ]
        )
        assert code == 0
        payload = json.loads((tmp_path / "cli_over.report.json").read_text())
        assert payload["config"]["seed"] == 9
        assert payload["config"]["n_max"] == 64

    def test_parallel_jobs_byte_identical(self, tmp_path):
        p1 = self.write_config(tmp_path, name="par_a")
        p2 = self.write_config(
            tmp_path,
            name="par_b",
            source={
                "kind": "classically_correlated",
                "process": {"kind": "markov", "transition": APERIODIC_T},
                "alphabet": "computational",
            },
        )
        serial = tmp_path / "serial"
        threaded = tmp_path / "threaded"
        assert cli.main([str(p1), str(p2), "--output-dir", str(serial)]) == 0
        assert cli.main([str(p1), str(p2), "--output-dir", str(threaded), "--jobs", "2"]) == 0
        for name in ("par_a.report.json", "par_a.decay.csv", "par_b.report.json", "par_b.decay.csv"):
            assert (serial / name).read_bytes() == (threaded / name).read_bytes()

    def test_verbose_prints_pairs(self, tmp_path, capsys):
        path = self.write_config(tmp_path, name="cli_verbose")
        cli.main([str(path), "--output-dir", str(tmp_path), "-v"])
        out = capsys.readouterr().out
        assert "proj_0" in out

    def test_run_config_file_override_helper(self, tmp_path):
        path = self.write_config(tmp_path, name="helper", output_dir=str(tmp_path))
        report, written = run_config_file(path, overrides={"n_max": 72})
        assert report.config.n_max == 72
        assert [p.name for p in written] == ["helper.report.json", "helper.decay.csv"]
