import json
import subprocess
import sys

import pytest

from tercode import cli, parse_test_set, read_container


def run_cli(args):
    return cli.main(args)


@pytest.fixture()
def corpus_file(tmp_path):
    path = tmp_path / "corpus.txt"
    code = run_cli(
        [
            "gen-corpus",
            "--output", str(path),
            "--patterns", "30",
            "--width", "48",
            "--x-density", "0.3",
            "--templates", "3",
            "--flip-prob", "0.05",
            "--template-width", "12",
            "--seed", "41",
        ]
    )
    assert code == 0
    return path


EA_SPEED_FLAGS = [
    "--runs", "2",
    "--population", "5",
    "--children", "3",
    "--stagnation", "5",
    "--max-evals", "80",
]


class TestGenCorpus:
    def test_writes_requested_grid(self, corpus_file):
        ts = parse_test_set(corpus_file.read_text())
        assert ts.pattern_count == 30
        assert ts.width == 48

    def test_same_seed_same_file(self, tmp_path):
        outs = []
        for name in ("a.txt", "b.txt"):
            path = tmp_path / name
            run_cli(
                ["gen-corpus", "--output", str(path), "--patterns", "10",
                 "--width", "20", "--x-density", "0.4", "--seed", "7"]
            )
            outs.append(path.read_bytes())
        assert outs[0] == outs[1]

    def test_all_x_at_density_one(self, tmp_path):
        path = tmp_path / "x.txt"
        run_cli(
            ["gen-corpus", "--output", str(path), "--patterns", "4",
             "--width", "9", "--x-density", "1.0", "--seed", "1"]
        )
        ts = parse_test_set(path.read_text())
        assert set("".join(ts.patterns)) == {"X"}

    def test_single_template_no_flips_identical_rows(self, tmp_path):
        path = tmp_path / "t.txt"
        run_cli(
            ["gen-corpus", "--output", str(path), "--patterns", "6",
             "--width", "24", "--templates", "1", "--flip-prob", "0",
             "--x-density", "0", "--seed", "2"]
        )
        ts = parse_test_set(path.read_text())
        assert len(set(ts.patterns)) == 1


class TestCompress:
    def test_9c_json_report(self, corpus_file, tmp_path, capsys):
        out = tmp_path / "c.tcc"
        code = run_cli(
            ["compress", "--input", str(corpus_file), "--output", str(out),
             "--method", "9c", "-K", "6", "--report", "json"]
        )
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["method"] == "9c"
        assert report["k"] == 6
        assert report["original_bits"] == 30 * 48
        assert report["payload_bits"] > 0
        assert "duration_seconds" not in report
        stream = read_container(out.read_bytes())
        assert stream.payload_bits == report["payload_bits"]
        assert stream.pattern_width == 48

    def test_repeated_block_rate_9c(self, tmp_path, capsys):
        # one 6-bit pattern repeated: every block costs the 5-bit codeword
        path = tmp_path / "rep.txt"
        path.write_text("111000\n" * 10)
        out = tmp_path / "rep.tcc"
        run_cli(
            ["compress", "--input", str(path), "--output", str(out),
             "--method", "9c", "-K", "6", "--report", "json"]
        )
        report = json.loads(capsys.readouterr().out)
        assert report["payload_bits"] == 50
        assert report["compression_rate"] == pytest.approx(100 * (60 - 50) / 60)

    def test_ea_method_reports_runs(self, corpus_file, tmp_path, capsys):
        out = tmp_path / "ea.tcc"
        code = run_cli(
            ["compress", "--input", str(corpus_file), "--output", str(out),
             "--method", "ea", "-K", "12", "-L", "8", "--seed", "5",
             "--report", "json", *EA_SPEED_FLAGS]
        )
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert len(report["ea_stats"]["run_rates"]) == 2
        assert report["ea_stats"]["best_rate"] >= report["ea_stats"]["mean_rate"]
        # container holds the best individual's encoding
        assert report["compression_rate"] == pytest.approx(
            report["ea_stats"]["best_rate"]
        )

    def test_odd_k_with_9c_is_usage_error(self, corpus_file, tmp_path):
        code = run_cli(
            ["compress", "--input", str(corpus_file),
             "--output", str(tmp_path / "x.tcc"), "--method", "9c", "-K", "5"]
        )
        assert code == 2

    def test_bad_input_format_exit_code(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("01\n0\n")
        code = run_cli(
            ["compress", "--input", str(bad),
             "--output", str(tmp_path / "x.tcc"), "--method", "9c", "-K", "2"]
        )
        assert code == 3

    def test_missing_input_exit_code(self, tmp_path):
        code = run_cli(
            ["compress", "--input", str(tmp_path / "nope.txt"),
             "--output", str(tmp_path / "x.tcc")]
        )
        assert code == 3

    def test_deterministic_output(self, corpus_file, tmp_path, capsys):
        containers = []
        reports = []
        for name in ("one.tcc", "two.tcc"):
            out = tmp_path / name
            run_cli(
                ["compress", "--input", str(corpus_file), "--output", str(out),
                 "--method", "ea", "-K", "6", "-L", "6", "--seed", "33",
                 "--report", "json", *EA_SPEED_FLAGS]
            )
            containers.append(out.read_bytes())
            reports.append(capsys.readouterr().out)
        assert containers[0] == containers[1]
        assert reports[0] == reports[1]

    def test_seed_env_fallback(self, corpus_file, tmp_path, capsys, monkeypatch):
        outputs = []
        for name, env in (("e1.tcc", "12"), ("e2.tcc", "12"), ("e3.tcc", "13")):
            monkeypatch.setenv(cli.SEED_ENV_VAR, env)
            out = tmp_path / name
            run_cli(
                ["compress", "--input", str(corpus_file), "--output", str(out),
                 "--method", "ea", "-K", "6", "-L", "4", "--report", "json",
                 *EA_SPEED_FLAGS]
            )
            capsys.readouterr()
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]
        assert outputs[0] != outputs[2]

    def test_fill_policies(self, tmp_path, capsys):
        # 10XXXX covers via UUU111, so its first three bits travel as
        # fills and the X among them takes the fill value
        path = tmp_path / "fills.txt"
        path.write_text("10XXXX\n" * 4)
        for fill, expected in (("zero", "100111"), ("one", "101111")):
            out = tmp_path / f"{fill}.tcc"
            run_cli(
                ["compress", "--input", str(path), "--output", str(out),
                 "--method", "9c", "-K", "6", "--fill", fill]
            )
            restored = tmp_path / f"{fill}.txt"
            run_cli(
                ["decompress", "--input", str(out), "--output", str(restored)]
            )
            decoded = parse_test_set(restored.read_text())
            assert decoded.patterns == (expected,) * 4
        capsys.readouterr()
        # random fill is seed-deterministic
        outs = []
        for name in ("r1.txt", "r2.txt"):
            out = tmp_path / f"{name}.tcc"
            run_cli(
                ["compress", "--input", str(path), "--output", str(out),
                 "--method", "9c", "-K", "6", "--fill", "random", "--seed", "4"]
            )
            restored = tmp_path / name
            run_cli(
                ["decompress", "--input", str(out), "--output", str(restored)]
            )
            outs.append(restored.read_text())
        capsys.readouterr()
        assert outs[0] == outs[1]

    def test_seed_9c_flag(self, corpus_file, tmp_path, capsys):
        out = tmp_path / "s9.tcc"
        code = run_cli(
            ["compress", "--input", str(corpus_file), "--output", str(out),
             "--method", "ea", "-K", "6", "-L", "10", "--seed", "2",
             "--seed-9c", "--report", "json", *EA_SPEED_FLAGS]
        )
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["ea_stats"]["best_rate"] >= report["ea_stats"]["mean_rate"]

    def test_config_file(self, corpus_file, tmp_path, capsys):
        conf = tmp_path / "ea.conf"
        conf.write_text("l = 4\npopulation_size = 4\nchildren_per_generation = 3\n"
                        "stagnation_limit = 4\nmax_evaluations = 50\nruns = 1\n")
        out = tmp_path / "conf.tcc"
        code = run_cli(
            ["compress", "--input", str(corpus_file), "--output", str(out),
             "--method", "ea", "-K", "6", "--seed", "3", "--config", str(conf),
             "--report", "json"]
        )
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["l"] == 4
        assert len(report["ea_stats"]["run_rates"]) == 1


class TestDecompress:
    def _compress(self, corpus_file, tmp_path, extra=()):
        out = tmp_path / "c.tcc"
        code = run_cli(
            ["compress", "--input", str(corpus_file), "--output", str(out),
             "--method", "9c", "-K", "6", *extra]
        )
        assert code == 0
        return out

    def test_round_trip_specified_positions(self, corpus_file, tmp_path, capsys):
        container = self._compress(corpus_file, tmp_path)
        restored = tmp_path / "restored.txt"
        code = run_cli(
            ["decompress", "--input", str(container), "--output", str(restored)]
        )
        assert code == 0
        original = parse_test_set(corpus_file.read_text())
        decoded = parse_test_set(restored.read_text())
        assert decoded.pattern_count == original.pattern_count
        assert decoded.width == original.width
        assert "X" not in "".join(decoded.patterns)
        for row_o, row_d in zip(original.patterns, decoded.patterns):
            for want, got in zip(row_o, row_d):
                if want != "X":
                    assert got == want

    def test_width_flag_overrides(self, corpus_file, tmp_path):
        container = self._compress(corpus_file, tmp_path)
        restored = tmp_path / "r.txt"
        code = run_cli(
            ["decompress", "--input", str(container), "--output", str(restored),
             "--width", "24"]
        )
        assert code == 0
        assert parse_test_set(restored.read_text()).width == 24

    def test_width_not_dividing_is_error(self, corpus_file, tmp_path):
        container = self._compress(corpus_file, tmp_path)
        code = run_cli(
            ["decompress", "--input", str(container),
             "--output", str(tmp_path / "r.txt"), "--width", "7"]
        )
        assert code == 3

    def test_corrupt_container_exit_code(self, corpus_file, tmp_path):
        container = self._compress(corpus_file, tmp_path)
        data = bytearray(container.read_bytes())
        data[10] ^= 0xFF
        container.write_bytes(bytes(data))
        code = run_cli(
            ["decompress", "--input", str(container),
             "--output", str(tmp_path / "r.txt")]
        )
        assert code == 4


class TestStats:
    def test_reports_overhead(self, corpus_file, tmp_path, capsys):
        out = tmp_path / "c.tcc"
        run_cli(
            ["compress", "--input", str(corpus_file), "--output", str(out),
             "--method", "9c", "-K", "6"]
        )
        capsys.readouterr()
        code = run_cli(["stats", "--input", str(out), "--report", "json"])
        assert code == 0
        info = json.loads(capsys.readouterr().out)
        assert info["container_bytes"] == len(out.read_bytes())
        assert info["payload_bytes"] == (info["payload_bits"] + 7) // 8
        assert info["header_overhead_bytes"] == (
            info["container_bytes"] - info["payload_bytes"]
        )
        assert info["original_bits"] == 30 * 48
        assert info["pattern_width"] == 48


class TestCompare:
    def test_rates_match_individual_compress_runs(
        self, corpus_file, tmp_path, capsys
    ):
        code = run_cli(
            ["compare", "--input", str(corpus_file), "-K", "6", "-L", "6",
             "--seed", "9", "--report", "json", *EA_SPEED_FLAGS]
        )
        assert code == 0
        rows = json.loads(capsys.readouterr().out)
        by_method = {row["method"]: row for row in rows}
        assert set(by_method) == {"9c", "9c-hc", "ea"}
        assert (
            by_method["9c-hc"]["compression_rate"]
            >= by_method["9c"]["compression_rate"]
        )
        ea_row = by_method["ea"]
        assert ea_row["ea_stats"]["best_rate"] >= ea_row["ea_stats"]["mean_rate"]

        for method in ("9c", "9c-hc", "ea"):
            out = tmp_path / f"{method}.tcc"
            run_cli(
                ["compress", "--input", str(corpus_file), "--output", str(out),
                 "--method", method, "-K", "6", "-L", "6", "--seed", "9",
                 "--report", "json", *EA_SPEED_FLAGS]
            )
            single = json.loads(capsys.readouterr().out)
            assert single["compression_rate"] == pytest.approx(
                by_method[method]["compression_rate"]
            )
            assert single["payload_bits"] == by_method[method]["payload_bits"]

    def test_table_output(self, corpus_file, capsys):
        code = run_cli(
            ["compare", "--input", str(corpus_file), "-K", "6", "-L", "4",
             "--seed", "1", *EA_SPEED_FLAGS]
        )
        assert code == 0
        text = capsys.readouterr().out
        assert "9c-hc" in text
        assert "ea (mean)" in text
        assert "ea (best)" in text


class TestEntryPoints:
    def test_module_invocation(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "tercode", "gen-corpus",
             "--output", str(tmp_path / "m.txt"),
             "--patterns", "3", "--width", "6", "--seed", "0"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert (tmp_path / "m.txt").exists()

    def test_usage_error_exit_code(self):
        with pytest.raises(SystemExit) as err:
            cli.main(["compress", "--no-such-flag"])
        assert err.value.code == 2
