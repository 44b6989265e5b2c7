import csv
import json

import pytest
from click.testing import CliRunner

from toonbench.cli import main

SUBCOMMANDS = {
    "run": ["--corpus", "--config", "--backend", "--replay-file", "--formats", "--out"],
    "score": ["--records", "--corpus", "--alpha", "--beta", "--gamma", "--xref", "--out"],
    "compare": ["--scored", "--format-a", "--format-b", "--metric"],
    "sweep": ["--scored", "--steps", "--cross"],
    "report": ["--scored", "--out"],
    "convert": ["--from", "--to"],
    "validate": ["--format"],
}


@pytest.fixture
def cli():
    runner = CliRunner()

    def invoke(*args, input=None):
        return runner.invoke(main, [str(a) for a in args], input=input, catch_exceptions=False)

    return invoke


@pytest.fixture
def run_dir(cli, corpus_path, replay_path, tmp_path):
    out = tmp_path / "run"
    result = cli("run", "--corpus", corpus_path, "--backend", "replay", "--replay-file", replay_path, "--out", out)
    assert result.exit_code == 0, result.output
    return out


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.mark.parametrize("name,flags", sorted(SUBCOMMANDS.items()))
def test_help(cli, name, flags):
    result = cli(name, "--help")
    assert result.exit_code == 0
    for flag in flags:
        assert flag in result.stdout


def test_top_level_help(cli):
    result = cli("--help")
    assert result.exit_code == 0
    assert all(name in result.stdout for name in SUBCOMMANDS)


def test_unknown_flag(cli):
    assert cli("convert", "--from", "json", "--to", "toon", "--bogus").exit_code == 2


class TestRun:
    def test_fixture_replay(self, run_dir):
        lines = (run_dir / "records.jsonl").read_text().splitlines()
        assert len(lines) == 24
        assert {json.loads(line)["format"] for line in lines} == {"json", "toon"}
        assert not (run_dir / ".toonbench.lock").exists()

    def test_replay_needs_file(self, cli, corpus_path, tmp_path):
        result = cli("run", "--corpus", corpus_path, "--backend", "replay", "--out", tmp_path)
        assert result.exit_code == 2

    def test_unreachable_http(self, cli, corpus_path, tmp_path):
        cfg = tmp_path / "cfg.yaml"
        cfg.write_text("backend:\n  url: http://127.0.0.1:9/v1\n  model_id: m\n  max_attempts: 2\n  backoff_s: 0\n  timeout_s: 2\n")
        result = cli("run", "--corpus", corpus_path, "--config", cfg, "--backend", "http", "--out", tmp_path / "o")
        assert result.exit_code == 1
        assert "attempt" in result.stderr

    def test_http_without_url(self, cli, corpus_path, tmp_path):
        result = cli("run", "--corpus", corpus_path, "--backend", "http", "--model", "m", "--out", tmp_path)
        assert result.exit_code == 2

    def test_bad_config(self, cli, corpus_path, replay_path, tmp_path):
        cfg = tmp_path / "cfg.yaml"
        cfg.write_text("unknown: 1\n")
        result = cli("run", "--corpus", corpus_path, "--config", cfg, "--backend", "replay",
                     "--replay-file", replay_path, "--out", tmp_path)
        assert result.exit_code == 2

    def test_unknown_format(self, cli, corpus_path, replay_path, tmp_path):
        result = cli("run", "--corpus", corpus_path, "--backend", "replay", "--replay-file", replay_path,
                     "--formats", "json,csv", "--out", tmp_path)
        assert result.exit_code == 2

    def test_replay_miss(self, cli, corpus_path, replay_path, tmp_path):
        result = cli("run", "--corpus", corpus_path, "--backend", "replay", "--replay-file", replay_path,
                     "--model", "other", "--out", tmp_path)
        assert result.exit_code == 1

    def test_locked_output(self, cli, corpus_path, replay_path, tmp_path):
        (tmp_path / ".toonbench.lock").write_text("1")
        result = cli("run", "--corpus", corpus_path, "--backend", "replay", "--replay-file", replay_path, "--out", tmp_path)
        assert result.exit_code == 2
        assert "in use" in result.stderr


class TestScore:
    def test_defaults_match_golden(self, cli, run_dir, corpus_path, golden_dir):
        result = cli("score", "--records", run_dir / "records.jsonl", "--corpus", corpus_path, "--out", run_dir)
        assert result.exit_code == 0
        assert (run_dir / "summary.csv").read_bytes() == (golden_dir / "summary.csv").read_bytes()
        assert (run_dir / "scored.jsonl").read_bytes() == (golden_dir / "scored.jsonl").read_bytes()

    def test_weights_must_sum_to_one(self, cli, run_dir, corpus_path):
        result = cli("score", "--records", run_dir / "records.jsonl", "--corpus", corpus_path,
                     "--alpha", 0.3, "--beta", 0.8, "--out", run_dir)
        assert result.exit_code == 2

    def test_single_weight_implies_the_other(self, cli, run_dir, corpus_path):
        result = cli("score", "--records", run_dir / "records.jsonl", "--corpus", corpus_path, "--alpha", 0.5, "--out", run_dir)
        assert result.exit_code == 0
        for line in (run_dir / "scored.jsonl").read_text().splitlines():
            s = json.loads(line)["scores"]
            assert s["gcs"] == pytest.approx(0.5 * s["render"] + 0.5 * s["syntax"])

    def test_gamma_zero(self, cli, run_dir, corpus_path):
        cli("score", "--records", run_dir / "records.jsonl", "--corpus", corpus_path, "--gamma", 0, "--out", run_dir)
        rows = {(r["format"], r["metric"]): r for r in read_csv(run_dir / "summary.csv")}
        for fmt in ("json", "toon"):
            assert rows[(fmt, "gcs_env")]["mean"] == rows[(fmt, "gcs")]["mean"]

    def test_schema_mismatch(self, cli, corpus_path, tmp_path):
        bad = tmp_path / "r.jsonl"
        bad.write_text('{"instance_id": "x"}\n')
        result = cli("score", "--records", bad, "--corpus", corpus_path, "--out", tmp_path)
        assert result.exit_code == 2

    def test_unknown_instance(self, cli, run_dir, tmp_path):
        corpus = tmp_path / "c.jsonl"
        corpus.write_text('{"instance_id":"zz","description":"d","expected":{"a":1},"formats":["json"]}\n')
        result = cli("score", "--records", run_dir / "records.jsonl", "--corpus", corpus, "--out", tmp_path)
        assert result.exit_code == 2

    def test_token_factor_mode(self, cli, run_dir, corpus_path):
        result = cli("score", "--records", run_dir / "records.jsonl", "--corpus", corpus_path,
                     "--emission-mode", "token_factor", "--token-factor", 0.002, "--out", run_dir)
        assert result.exit_code == 0
        ees = {json.loads(line)["scores"]["ees"] for line in (run_dir / "scored.jsonl").read_text().splitlines()}
        assert max(ees) - min(ees) < 1e-12


class TestAnalysis:
    @pytest.fixture
    def scored(self, golden_dir):
        return golden_dir / "scored.jsonl"

    def test_compare(self, cli, scored, tmp_path):
        result = cli("compare", "--scored", scored, "--format-a", "json", "--metric", "ees", "--out", tmp_path)
        assert result.exit_code == 0
        assert "p=" in result.stdout
        (row,) = read_csv(tmp_path / "pairs.csv")
        assert row["method"] == "exact"

    def test_compare_missing_format(self, cli, scored):
        assert cli("compare", "--scored", scored, "--format-a", "xml").exit_code == 1

    def test_sweep_with_crossing(self, cli, scored, tmp_path):
        result = cli("sweep", "--scored", scored, "--steps", 5, "--cross", "json:toon", "--out", tmp_path)
        assert result.exit_code == 0
        assert "cross at gamma=" in result.stdout
        assert len(read_csv(tmp_path / "gamma_sweep.csv")) == 10

    def test_report(self, cli, scored, golden_dir, tmp_path):
        assert cli("report", "--scored", scored, "--out", tmp_path).exit_code == 0
        for name in ("summary.csv", "pairs.csv", "gamma_sweep.csv"):
            assert (tmp_path / name).read_bytes() == (golden_dir / name).read_bytes()


class TestConvert:
    def test_json_to_toon(self, cli):
        src = '{"users":[{"id":1,"name":"Alice"},{"id":2,"name":"Bob"}]}'
        result = cli("convert", "--from", "json", "--to", "toon", input=src)
        assert result.exit_code == 0
        assert result.stdout == "users[2]{id,name}:\n  1,Alice\n  2,Bob\n"

    def test_identity(self, cli):
        result = cli("convert", "--from", "json", "--to", "json", input='{"a":1}')
        assert result.stdout == '{"a":1}\n'

    def test_round_trip_through_every_format(self, cli):
        text = '{"doc":{"title":"T","tags":["a","b"]}}'
        for fmt in ("yaml", "xml", "toon"):
            there = cli("convert", "--from", "json", "--to", fmt, input=text).stdout
            back = cli("convert", "--from", fmt, "--to", "json", input=there).stdout
            assert back == text + "\n"

    def test_malformed(self, cli):
        result = cli("convert", "--from", "json", "--to", "toon", input='{"a":')
        assert result.exit_code == 1
        assert "json" in result.stderr

    def test_unrepresentable(self, cli):
        result = cli("convert", "--from", "json", "--to", "xml", input='{"a":1,"b":2}')
        assert result.exit_code == 2


class TestValidate:
    def test_valid(self, cli):
        result = cli("validate", input="users[2]{id,name}:\n  1,Alice\n  2,Bob\n")
        assert result.exit_code == 0

    def test_invalid(self, cli):
        result = cli("validate", input="xs[3]: 1,2")
        assert result.exit_code == 1
        assert "LengthMismatch" in result.stderr

    def test_dialect(self, cli):
        assert cli("validate", "--indent", 4, "--delimiter", "|", input="t[2]{a|b}:\n    1|2\n    3|4").exit_code == 0
        assert cli("validate", "--delimiter", "\\t", input="xs[2]: 1\t2").exit_code == 0

    def test_lenient(self, cli):
        assert cli("validate", "--lenient", input="xs[3]: 1,2").exit_code == 0

    def test_other_formats(self, cli):
        assert cli("validate", "--format", "yaml", input="a: 1").exit_code == 0
        assert cli("validate", "--format", "xml", input="<a>").exit_code == 1
