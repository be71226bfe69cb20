import csv
import json

import numpy as np
import pytest

import deg
from deg.cli import BENCH_COLUMNS, _parse_sweep, main
from deg.io import read_hqry


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """synth -> build -> gt artifacts shared by the CLI tests."""
    root = tmp_path_factory.mktemp("cli")
    prefix = str(root / "toy")
    assert main([
        "synth", "--n", "300", "--d", "6", "--m", "3", "--queries", "40",
        "--alpha-scheme", "grid", "--k", "5", "--seed", "1",
        "--out-prefix", prefix,
    ]) == 0
    assert main([
        "build", "--e", f"{prefix}.e.hvec", "--s", f"{prefix}.s.hvec",
        "--M", "8", "--ef-construction", "32", "--out", f"{prefix}.deg",
    ]) == 0
    assert main([
        "gt", "--e", f"{prefix}.e.hvec", "--s", f"{prefix}.s.hvec",
        "--queries", f"{prefix}.hqry", "--k-prime", "20",
        "--out", f"{prefix}.hgt",
    ]) == 0
    return root, prefix


class TestSweepParsing:
    def test_default_sweep_has_twenty_values(self):
        assert _parse_sweep("10:200:10") == list(range(10, 201, 10))
        assert len(_parse_sweep("10:200:10")) == 20

    def test_bad_sweeps_rejected(self):
        from deg.cli import CliError
        for bad in ("10:5:1", "0:10:1", "1:10", "a:b:c"):
            with pytest.raises(CliError):
                _parse_sweep(bad)


class TestPipeline:
    def test_artifacts_exist_with_run_records(self, pipeline):
        root, prefix = pipeline
        for suffix in (".e.hvec", ".s.hvec", ".hqry", ".deg", ".hgt"):
            assert (root / f"toy{suffix}").exists()
        record = json.loads((root / "toy.deg.run.json").read_text())
        assert record["command"] == "build"
        assert record["parameters"]["M"] == 8
        assert set(record["inputs"]) == {"e", "s"}
        assert "index" in record["outputs"]

    def test_build_defaults_match_library_defaults(self, pipeline, tmp_path):
        root, prefix = pipeline
        out = tmp_path / "default.deg"
        assert main([
            "build", "--e", f"{prefix}.e.hvec", "--s", f"{prefix}.s.hvec",
            "--out", str(out),
        ]) == 0
        meta = deg.load(out).meta
        assert meta.m_max == 40
        assert meta.ef_construction == 200
        assert meta.th == 0.1

    def test_search_writes_expected_rows(self, pipeline, tmp_path, capsys):
        root, prefix = pipeline
        out = tmp_path / "res.csv"
        assert main([
            "search", "--index", f"{prefix}.deg", "--e", f"{prefix}.e.hvec",
            "--s", f"{prefix}.s.hvec", "--queries", f"{prefix}.hqry",
            "--ef-search", "20", "--out", str(out),
        ]) == 0
        rows = list(csv.DictReader(out.open()))
        _, _, alphas, k = read_hqry(f"{prefix}.hqry")
        assert len(rows) == len(alphas) * k
        first = [r for r in rows if r["query"] == "0"]
        dists = [float(r["dist"]) for r in first]
        assert dists == sorted(dists)

    def test_bench_csv_shape(self, pipeline, tmp_path):
        root, prefix = pipeline
        out = tmp_path / "bench.csv"
        assert main([
            "bench", "--index", f"{prefix}.deg", "--e", f"{prefix}.e.hvec",
            "--s", f"{prefix}.s.hvec", "--queries", f"{prefix}.hqry",
            "--gt", f"{prefix}.hgt", "--k", "5",
            "--ef-search-sweep", "10:30:10", "--out", str(out),
        ]) == 0
        rows = list(csv.DictReader(out.open()))
        assert list(rows[0].keys()) == BENCH_COLUMNS
        # grid queries cover all five intervals: 3 sweep values x 5 intervals
        assert len(rows) == 15
        for row in rows:
            assert 0.0 <= float(row["recall_at_k"]) <= 1.0
            assert float(row["qps"]) > 0

    def test_bench_with_fusion_baseline(self, pipeline, tmp_path):
        root, prefix = pipeline
        out = tmp_path / "bench.csv"
        base_out = tmp_path / "base.csv"
        assert main([
            "bench", "--index", f"{prefix}.deg", "--e", f"{prefix}.e.hvec",
            "--s", f"{prefix}.s.hvec", "--queries", f"{prefix}.hqry",
            "--gt", f"{prefix}.hgt", "--k", "5", "--ef-search-sweep", "20:20:1",
            "--baseline", "fusion:0.5", "--baseline-out", str(base_out),
            "--out", str(out),
        ]) == 0
        base_rows = list(csv.DictReader(base_out.open()))
        assert list(base_rows[0].keys()) == BENCH_COLUMNS
        assert len(base_rows) == 5
        assert all(float(r["edges_skipped"]) == 0 for r in base_rows)

    def test_bench_threads_flag(self, pipeline, tmp_path):
        root, prefix = pipeline
        out = tmp_path / "bench_mt.csv"
        assert main([
            "bench", "--index", f"{prefix}.deg", "--e", f"{prefix}.e.hvec",
            "--s", f"{prefix}.s.hvec", "--queries", f"{prefix}.hqry",
            "--gt", f"{prefix}.hgt", "--k", "5", "--ef-search-sweep", "20:20:1",
            "--threads", "2", "--out", str(out),
        ]) == 0
        assert len(list(csv.DictReader(out.open()))) == 5


class TestErrors:
    def test_bad_magic_is_machine_readable(self, tmp_path, capsys):
        bogus = tmp_path / "bogus.hvec"
        bogus.write_bytes(b"JUNKJUNKJUNK")
        code = main([
            "build", "--e", str(bogus), "--s", str(bogus), "--out",
            str(tmp_path / "x.deg"),
        ])
        assert code == 2
        err = capsys.readouterr().err
        payload = json.loads(err.strip().splitlines()[-1])
        assert payload["error"] == "FileFormatError"

    def test_gt_query_mismatch(self, pipeline, tmp_path, capsys):
        root, prefix = pipeline
        other = tmp_path / "other"
        assert main([
            "synth", "--n", "50", "--d", "6", "--m", "3", "--queries", "3",
            "--alpha-scheme", "fixed:0.5", "--k", "2", "--seed", "2",
            "--out-prefix", str(other),
        ]) == 0
        code = main([
            "bench", "--index", f"{prefix}.deg", "--e", f"{prefix}.e.hvec",
            "--s", f"{prefix}.s.hvec", "--queries", f"{other}.hqry",
            "--gt", f"{prefix}.hgt", "--k", "5",
            "--ef-search-sweep", "10:10:1",
        ])
        assert code == 2
        payload = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert "disagree" in payload["message"]


class TestVerifyCommand:
    def test_table1_suite_passes(self, capsys):
        assert main(["verify", "--suite", "table1"]) == 0
        out = capsys.readouterr().out
        assert out.count("[PASS]") == 3

    def test_seeds_suite_passes(self, capsys):
        assert main(["verify", "--suite", "seeds", "--n", "200"]) == 0
        assert "[PASS] seeds-inverse-frontier" in capsys.readouterr().out
