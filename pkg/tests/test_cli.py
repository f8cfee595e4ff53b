import csv
import io
import json
from importlib import resources

import jsonschema
import pytest
from click.testing import CliRunner

from packsearch.cli import main


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def text_file(tmp_path):
    path = tmp_path / "q.txt"
    path.write_bytes(b"abacacababca")
    return path


def load_schema():
    ref = resources.files("packsearch") / "schemas" / "search_result.schema.json"
    return json.loads(ref.read_text())


class TestSearch:
    def test_single_match(self, runner, text_file):
        result = runner.invoke(main, ["search", "ababca", str(text_file)])
        assert result.exit_code == 0
        assert result.output == "12\n"

    def test_no_match_exit_code(self, runner, tmp_path):
        dna = tmp_path / "t.fa"
        dna.write_bytes(b"ACGTACGT\nACGT\n")
        result = runner.invoke(main, ["search", "GATTACA", str(dna), "--alphabet", "dna"])
        assert result.exit_code == 1
        assert result.output == ""

    def test_json_output_matches_schema(self, runner, text_file):
        result = runner.invoke(
            main, ["search", "ababca", str(text_file), "--format", "json", "--r", "4"]
        )
        assert result.exit_code == 0
        doc = json.loads(result.output)
        jsonschema.validate(doc, load_schema())
        assert doc["matches"] == [12]
        assert doc["stats"]["N_accept"] == 1
        assert doc["stats"]["r"] == 4
        assert doc["stats"]["sigma"] == 256

    def test_start_offsets(self, runner, text_file):
        result = runner.invoke(main, ["search", "ababca", str(text_file), "--start-offsets"])
        assert result.exit_code == 0
        assert result.output == "6\n"

    def test_verify_flag_passes(self, runner, text_file):
        result = runner.invoke(main, ["search", "ababca", str(text_file), "--verify"])
        assert result.exit_code == 0

    def test_verify_failure_loud(self, runner, text_file, monkeypatch):
        import packsearch.cli as climod

        monkeypatch.setattr(climod, "naive_scan", lambda p, t: [])
        result = runner.invoke(main, ["search", "ababca", str(text_file), "--verify"])
        assert result.exit_code == 2
        assert "verification failed" in result.output

    def test_unmappable_byte_reports_offset(self, runner, tmp_path):
        path = tmp_path / "t.fa"
        path.write_bytes(b"ACGT\nNACGT\n")
        result = runner.invoke(main, ["search", "ACGT", str(path), "--alphabet", "dna"])
        assert result.exit_code == 2
        assert "offset 5" in result.output

    def test_custom_mapping(self, runner, tmp_path):
        mapping = tmp_path / "ab.json"
        mapping.write_text(json.dumps({"sigma": 2, "codes": {"a": 0, "b": 1}}))
        text = tmp_path / "t.txt"
        text.write_bytes(b"abab")
        result = runner.invoke(main, ["search", "ab", str(text), "--alphabet", str(mapping)])
        assert result.exit_code == 0
        assert result.output.splitlines() == ["2", "4"]

    def test_odd_span_rejected(self, runner, text_file):
        result = runner.invoke(main, ["search", "ababca", str(text_file), "--r", "3"])
        assert result.exit_code == 2

    def test_pattern_file(self, runner, text_file, tmp_path):
        pat = tmp_path / "p.bin"
        pat.write_bytes(b"ababca")
        result = runner.invoke(
            main, ["search", "ignored", str(text_file), "--pattern-file", str(pat)]
        )
        assert result.exit_code == 0
        assert result.output == "12\n"

    def test_table_cache_roundtrip(self, runner, text_file, tmp_path):
        cache = tmp_path / "table.pksm"
        first = runner.invoke(
            main, ["search", "ababca", str(text_file), "--table-cache", str(cache), "--r", "4"]
        )
        assert first.exit_code == 0 and cache.exists()
        again = runner.invoke(
            main, ["search", "ababca", str(text_file), "--table-cache", str(cache), "--r", "4"]
        )
        assert again.exit_code == 0
        assert again.output == "12\n"


def parse_csv(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    comments = [ln for ln in text.splitlines() if ln.startswith("#")]
    return list(csv.reader(io.StringIO("\n".join(lines)))), comments


class TestBench:
    def test_row_count_and_agreement(self, runner, tmp_path):
        out = tmp_path / "bench.csv"
        result = runner.invoke(
            main,
            ["bench", "--sigma", "4", "--n", "20000", "--m", "32", "--trials", "3",
             "--seed", "5", "--out", str(out), "--no-figure"],
        )
        assert result.exit_code == 0
        rows, comments = parse_csv(out.read_text())
        header, data = rows[0], rows[1:]
        assert header == ["engine", "sigma", "n", "m", "r", "seconds",
                          "matches", "N_hforward", "N_hfail"]
        assert len(data) == 9
        assert [row[0] for row in data] == ["packed", "mp_baseline", "naive"] * 3
        for trial in range(3):
            counts = {row[6] for row in data[trial * 3 : trial * 3 + 3]}
            assert len(counts) == 1
        assert any("packed_vs_mp_baseline_seconds_ratio" in c for c in comments)

    def test_periodic_generator_counts(self, runner):
        result = runner.invoke(
            main,
            ["bench", "--sigma", "4", "--n", "5000", "--m", "25", "--trials", "1",
             "--seed", "3", "--generator", "periodic"],
        )
        assert result.exit_code == 0
        rows, _ = parse_csv(result.output)
        data = rows[1:]
        # a text that is the pattern repeated matches at every period
        expected = (5000 - 25) // 25 + 1
        assert all(int(row[6]) == expected for row in data)

    def test_deterministic_apart_from_seconds(self, runner):
        args = ["bench", "--sigma", "2", "--n", "4000", "--m", "8", "--trials", "2",
                "--seed", "11"]
        a = runner.invoke(main, args)
        b = runner.invoke(main, args)
        assert a.exit_code == b.exit_code == 0

        def scrub(text):
            rows, comments = parse_csv(text)
            return [row[:5] + row[6:] for row in rows], len(comments)

        assert scrub(a.output) == scrub(b.output)

    def test_figure_rendered(self, runner, tmp_path):
        out = tmp_path / "bench.csv"
        result = runner.invoke(
            main,
            ["bench", "--sigma", "4", "--n", "2000", "--m", "8", "--trials", "1",
             "--seed", "1", "--out", str(out)],
        )
        assert result.exit_code == 0
        figure = out.with_suffix(".png")
        assert figure.exists() and figure.stat().st_size > 1000

    def test_all_equal_generator(self, runner):
        result = runner.invoke(
            main,
            ["bench", "--sigma", "2", "--n", "3000", "--m", "4", "--trials", "1",
             "--seed", "0", "--generator", "all-equal"],
        )
        assert result.exit_code == 0
        rows, _ = parse_csv(result.output)
        assert all(int(row[6]) == 3000 - 4 + 1 for row in rows[1:])

    def test_rejects_m_larger_than_n(self, runner):
        result = runner.invoke(main, ["bench", "--n", "10", "--m", "20"])
        assert result.exit_code == 2


class TestSelftest:
    def test_passes(self, runner):
        result = runner.invoke(main, ["selftest"])
        assert result.exit_code == 0
        assert result.output.count("PASS") == 5
        assert "(0,0) -> (0,3)" in result.output  # walkthrough trace is printed

    def test_fault_injection_names_suite(self, runner):
        result = runner.invoke(main, ["selftest", "--inject-fault", "tabulation"])
        assert result.exit_code == 2
        assert "tabulation: FAIL" in result.output
