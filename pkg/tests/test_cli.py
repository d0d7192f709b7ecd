import json
from pathlib import Path

import pytest

from nomadfa.cli import EXIT_OK, EXIT_USAGE, main
from nomadfa.nominal_dfa import dfa_from_record, equivalence_check
from nomadfa.fixtures import aa_language

CONFIG = Path(__file__).resolve().parent.parent / "configs" / "desk.toml"


def run(command, tmp_path, config=CONFIG, extra=()):
    args = [command, "--out", str(tmp_path / "out")]
    if config is not None:
        args += ["--config", str(config)]
    args += list(extra)
    return main(args)


class TestExitCodes:
    def test_verify_bounds_passes(self, tmp_path):
        assert run("verify-bounds", tmp_path, config=None) == EXIT_OK

    def test_dims(self, tmp_path):
        assert run("dims", tmp_path) == EXIT_OK

    def test_learn(self, tmp_path):
        assert run("learn", tmp_path) == EXIT_OK

    def test_witness(self, tmp_path):
        assert run("witness", tmp_path) == EXIT_OK

    def test_missing_config_is_usage_error(self, tmp_path):
        assert run("dims", tmp_path, config=tmp_path / "nope.toml") == EXIT_USAGE

    def test_malformed_config_is_usage_error(self, tmp_path):
        bad = tmp_path / "bad.toml"
        bad.write_text("[learn\n")
        assert run("dims", tmp_path, config=bad) == EXIT_USAGE

    def test_bad_jobs_value(self, tmp_path):
        assert run("dims", tmp_path, extra=["--jobs", "0"]) == EXIT_USAGE

    def test_missing_key_is_usage_error(self, tmp_path):
        partial = tmp_path / "partial.toml"
        partial.write_text("[[witness.jobs]]\nkind = \"nominal-orbits\"\n")
        assert run("witness", tmp_path, config=partial) == EXIT_USAGE

    def test_budget_exceeded_is_usage_error(self, tmp_path, capsys):
        huge = tmp_path / "huge.toml"
        huge.write_text("[[dims.advice]]\nn = 4\nm = 4\nk = 3\n")
        assert run("dims", tmp_path, config=huge) == EXIT_USAGE
        assert "budget exceeded" in capsys.readouterr().err


class TestOutputs:
    def test_empty_config_gives_header_only_csv(self, tmp_path):
        empty = tmp_path / "empty.toml"
        empty.write_text("")
        assert run("dims", tmp_path, config=empty) == EXIT_OK
        lines = (tmp_path / "out" / "dims.csv").read_text().splitlines()
        assert len(lines) == 2  # digest comment + header
        assert lines[0].startswith("# config_sha256=")

    def test_every_output_embeds_digest_and_seed(self, tmp_path):
        run("learn", tmp_path)
        run("witness", tmp_path)
        for csv_file in (tmp_path / "out").glob("*.csv"):
            first = csv_file.read_text().splitlines()[0]
            assert first.startswith("# config_sha256=") and "seed=" in first
        for json_file in (tmp_path / "out").rglob("*.json"):
            data = json.loads(json_file.read_text())
            assert "config_sha256" in data and "seed" in data

    def test_witness_report_contains_skip_row(self, tmp_path):
        run("witness", tmp_path)
        text = (tmp_path / "out" / "witness_report.csv").read_text()
        assert "skipped" in text
        assert "ok" in text

    def test_non_equivariance_job_runs(self, tmp_path):
        run("witness", tmp_path)
        text = (tmp_path / "out" / "witness_report.csv").read_text()
        assert "orbit_label_clash,non-equivariance,ok,2,2" in text

    def test_fixture_files_round_trip(self, tmp_path):
        assert run("fixtures", tmp_path, config=None) == EXIT_OK
        record = json.loads((tmp_path / "out" / "fixtures" / "aa.json").read_text())
        loaded = dfa_from_record(record["automaton"])
        assert equivalence_check(loaded, aa_language()) is None

    def test_learn_summary_flags_degenerate_suites(self, tmp_path):
        run("learn", tmp_path)
        summary = json.loads((tmp_path / "out" / "learn_summary.json").read_text())
        degenerate = [s for s in summary["suites"] if s["degenerate_cd"]]
        proper = [s for s in summary["suites"] if not s["degenerate_cd"]]
        assert degenerate and proper
        assert all(s["bound_ok"] for s in proper)
        assert all(s["cd_product"] == 0 for s in degenerate)


class TestDeterminism:
    @pytest.mark.parametrize("command", ["dims", "learn", "witness", "enumerate",
                                         "verify-bounds", "fixtures"])
    def test_byte_identical_reruns(self, command, tmp_path, capsys):
        first = tmp_path / "a"
        second = tmp_path / "b"
        assert main([command, "--config", str(CONFIG), "--out", str(first)]) == EXIT_OK
        assert main([command, "--config", str(CONFIG), "--out", str(second)]) == EXIT_OK
        capsys.readouterr()
        files_a = sorted(p.relative_to(first) for p in first.rglob("*") if p.is_file())
        files_b = sorted(p.relative_to(second) for p in second.rglob("*") if p.is_file())
        assert files_a == files_b and files_a
        for rel in files_a:
            assert (first / rel).read_bytes() == (second / rel).read_bytes()

    def test_jobs_flag_does_not_change_output(self, tmp_path):
        serial = tmp_path / "serial"
        parallel = tmp_path / "parallel"
        main(["learn", "--config", str(CONFIG), "--out", str(serial)])
        main(["learn", "--config", str(CONFIG), "--out", str(parallel), "--jobs", "4"])
        assert (serial / "learn_transcripts.csv").read_bytes() == \
            (parallel / "learn_transcripts.csv").read_bytes()
