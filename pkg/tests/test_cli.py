"""Tests for the command-line interface: CSV dialect, exit codes, artifacts."""

import csv
import json

import numpy as np
import pytest

from macomss.cli import main
from macomss.synthgen import GenSpec, gen_lowrank


def write_csv(path, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        csv.writer(fh).writerows(rows)


def read_csv_floats(path, skip_header=False):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if skip_header:
        rows = rows[1:]
    return np.array([[float(c) for c in row] for row in rows])


def block_csv_rows(truth, m1, m2, header=None):
    p1, p2 = truth.shape
    rows = [] if header is None else [header]
    for i in range(p1):
        rows.append(["NA" if (i >= m1 and j >= m2) else repr(float(truth[i, j]))
                     for j in range(p2)])
    return rows


class TestImpute:
    def test_roundtrip_recovers_missing_block(self, tmp_path):
        truth = gen_lowrank(GenSpec("lowrank_orthogonal", 12, 12, 2, seed=0))
        inp = tmp_path / "in.csv"
        out = tmp_path / "out.csv"
        write_csv(inp, block_csv_rows(truth, 5, 5))
        code = main(["impute", "--input", str(inp), "--m1", "5", "--m2", "5",
                     "--output", str(out)])
        assert code == 0
        got = read_csv_floats(out)
        np.testing.assert_allclose(got, truth, atol=1e-8)
        sidecar = json.loads((out.parent / "out.csv.report.json").read_text())
        assert sidecar["r_hat"] == 2
        assert "diagnostics" in sidecar

    def test_header_preserved(self, tmp_path):
        truth = gen_lowrank(GenSpec("lowrank_orthogonal", 8, 8, 2, seed=1))
        header = [f"c{j}" for j in range(8)]
        inp = tmp_path / "in.csv"
        out = tmp_path / "out.csv"
        write_csv(inp, block_csv_rows(truth, 4, 4, header=header))
        assert main(["impute", "--input", str(inp), "--m1", "4", "--m2", "4",
                     "--output", str(out)]) == 0
        with open(out, newline="", encoding="utf-8") as fh:
            assert next(csv.reader(fh)) == header

    def test_na_case_insensitive(self, tmp_path):
        inp = tmp_path / "in.csv"
        out = tmp_path / "out.csv"
        write_csv(inp, [["1.0", "2.0"], ["3.0", "na"]])
        assert main(["impute", "--input", str(inp), "--m1", "1", "--m2", "1",
                     "--output", str(out)]) == 0

    def test_malformed_cell_location(self, tmp_path, capsys):
        inp = tmp_path / "in.csv"
        write_csv(inp, [["1.0", "2.0"], ["3.0", "4.0"], ["5.0", "1.2.3"]])
        code = main(["impute", "--input", str(inp), "--m1", "2", "--m2", "1",
                     "--output", str(tmp_path / "out.csv")])
        assert code == 2
        err = capsys.readouterr().err
        assert "row 3, column 2" in err

    def test_missing_file(self, tmp_path, capsys):
        code = main(["impute", "--input", str(tmp_path / "absent.csv"),
                     "--m1", "1", "--m2", "1",
                     "--output", str(tmp_path / "out.csv")])
        assert code == 2

    def test_ragged_rows(self, tmp_path):
        inp = tmp_path / "in.csv"
        write_csv(inp, [["1.0", "2.0"], ["3.0"]])
        code = main(["impute", "--input", str(inp), "--m1", "1", "--m2", "1",
                     "--output", str(tmp_path / "out.csv")])
        assert code == 2

    def test_bad_partition(self, tmp_path, capsys):
        inp = tmp_path / "in.csv"
        write_csv(inp, [["1.0", "2.0"], ["3.0", "4.0"]])
        code = main(["impute", "--input", str(inp), "--m1", "5", "--m2", "1",
                     "--output", str(tmp_path / "out.csv")])
        assert code == 2


class TestEval:
    def test_scores_printed(self, tmp_path, capsys):
        rng = np.random.default_rng(2)
        truth = rng.standard_normal((4, 4))
        est = truth + 0.1
        write_csv(tmp_path / "t.csv", [[repr(float(v)) for v in row] for row in truth])
        write_csv(tmp_path / "e.csv", [[repr(float(v)) for v in row] for row in est])
        write_csv(tmp_path / "m.csv", [["1"] * 4] * 4)
        code = main(["eval", "--estimate", str(tmp_path / "e.csv"),
                     "--truth", str(tmp_path / "t.csv"),
                     "--mask", str(tmp_path / "m.csv")])
        assert code == 0
        out = capsys.readouterr().out
        assert "nmse=" in out and "frob_loss=" in out and "spec_loss=" in out

    def test_shape_mismatch(self, tmp_path, capsys):
        write_csv(tmp_path / "t.csv", [["1.0", "2.0"]])
        write_csv(tmp_path / "e.csv", [["1.0"]])
        write_csv(tmp_path / "m.csv", [["1", "1"]])
        code = main(["eval", "--estimate", str(tmp_path / "e.csv"),
                     "--truth", str(tmp_path / "t.csv"),
                     "--mask", str(tmp_path / "m.csv")])
        assert code == 2


class TestRun:
    def write_config(self, path, workers=1):
        path.write_text(
            'experiment = "custom"\n'
            "replicates = 2\n"
            "seed = 11\n"
            f"workers = {workers}\n"
            'methods = ["macomss", "mean"]\n'
            "[params]\n"
            "p = 30\nr = 2\nm = 12\nsigma_mult = 0.1\ntheta_c = 0.05\n",
            encoding="utf-8")

    def test_artifacts_written(self, tmp_path):
        config = tmp_path / "config.toml"
        self.write_config(config)
        out = tmp_path / "out"
        assert main(["run", "--config", str(config), "--out", str(out)]) == 0
        report = json.loads((out / "report.json").read_text())
        assert report["config_echo"]["seed"] == 11
        assert len(report["rows"]) == 4
        with open(out / "replicates.csv", newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["replicate", "method", "metric", "value"]
        assert (out / "timings.csv").exists()

    def test_worker_invariant_report(self, tmp_path):
        config = tmp_path / "config.toml"
        self.write_config(config)
        out1, out2 = tmp_path / "o1", tmp_path / "o2"
        assert main(["run", "--config", str(config), "--out", str(out1)]) == 0
        assert main(["run", "--config", str(config), "--out", str(out2),
                     "--workers", "2"]) == 0
        assert (out1 / "report.json").read_bytes() == (out2 / "report.json").read_bytes()

    def test_seed_env_override(self, tmp_path, monkeypatch):
        config = tmp_path / "config.toml"
        self.write_config(config)
        out1, out2 = tmp_path / "o1", tmp_path / "o2"
        assert main(["run", "--config", str(config), "--out", str(out1)]) == 0
        monkeypatch.setenv("MACOMSS_SEED", "99")
        assert main(["run", "--config", str(config), "--out", str(out2)]) == 0
        r2 = json.loads((out2 / "report.json").read_text())
        assert r2["config_echo"]["seed"] == 99

    def test_bad_config_exit_code(self, tmp_path, capsys):
        config = tmp_path / "config.toml"
        config.write_text('experiment = "bogus"\n', encoding="utf-8")
        assert main(["run", "--config", str(config),
                     "--out", str(tmp_path / "out")]) == 1

    def test_unparseable_config(self, tmp_path):
        config = tmp_path / "config.toml"
        config.write_text("not toml ===", encoding="utf-8")
        assert main(["run", "--config", str(config),
                     "--out", str(tmp_path / "out")]) == 1
