import json
import subprocess
import sys

import numpy as np
import pytest

import disttest.acceptance as acceptance
from disttest.cli import ExperimentConfig, build_parser, main, run_batch
from disttest.core import Distribution, load_distribution, save_distribution
from disttest.errors import ParameterError
from disttest.linprop import Polyhedron, save_polyhedron
from disttest.adversarial import verify_adversarial, AdversarialPair, Pairing
from disttest.core import NonConcentrationParams


@pytest.fixture
def dist_file(tmp_path):
    path = tmp_path / "d.json"
    save_distribution(Distribution.uniform(200), path)
    return str(path)


@pytest.fixture
def small_dist_file(tmp_path):
    path = tmp_path / "small.json"
    save_distribution(Distribution.uniform_on(range(4), 100), path)
    return str(path)


def strip_wall_ms(text: str) -> list:
    out = []
    for line in text.splitlines():
        if line.startswith("#") or line.startswith("seed,"):
            out.append(line)
        else:
            out.append(",".join(line.split(",")[:-1]))
    return out


class TestExperimentConfig:
    def test_unknown_parameter_keys_rejected(self):
        with pytest.raises(ParameterError, match="unknown parameter"):
            ExperimentConfig("learn", (1,), 1, {"dist": "x", "bogus": 3}, None)

    def test_empty_seeds_rejected(self):
        with pytest.raises(ParameterError):
            ExperimentConfig("learn", (), 1, {"dist": "x"}, None)

    def test_repeats_validated(self):
        with pytest.raises(ParameterError):
            ExperimentConfig("learn", (1,), 0, {"dist": "x"}, None)


class TestRunBatch:
    def test_csv_schema_and_summary(self, small_dist_file, tmp_path, capsys):
        out = tmp_path / "runs.csv"
        cfg = ExperimentConfig(
            "learn",
            (1, 2, 3),
            1,
            {"dist": small_dist_file, "eta": 0.0, "delta": 0.5},
            str(out),
        )
        records = run_batch(cfg)
        text = out.read_text()
        lines = text.splitlines()
        assert lines[0] == "seed,repeat,command,params_digest,metric,samples_used,extras,wall_ms"
        data = [l for l in lines if not l.startswith("#") and not l.startswith("seed,")]
        assert len(data) == 3
        assert all("final_guess=" in l and "measured_l1=" in l for l in data)
        summary = [l for l in lines if l.startswith("#")]
        assert any(l.startswith("# runs=3") for l in summary)
        assert any(l.startswith("# success_fraction=") for l in summary)
        assert any(l.startswith("# mean_samples=") for l in summary)
        assert any(l.startswith("# confidence_radius=") for l in summary)
        assert [r.seed for r in records] == [1, 2, 3]

    def test_point_mass_learn_single_row(self, tmp_path):
        dist = tmp_path / "pm.json"
        save_distribution(Distribution.point_mass(50, 7), dist)
        out = tmp_path / "o.csv"
        cfg = ExperimentConfig(
            "learn", (1,), 1, {"dist": str(dist), "eta": 0.0, "delta": 0.5}, str(out)
        )
        run_batch(cfg)
        rows = [l for l in out.read_text().splitlines() if not l.startswith(("#", "seed,"))]
        assert len(rows) == 1
        assert rows[0].split(",")[4] == "Learned"

    def test_tolerant_test_batch_summary_fraction(self, dist_file, tmp_path):
        out = tmp_path / "batch.csv"
        cfg = ExperimentConfig(
            "tolerant-test",
            tuple(range(30)),
            1,
            {"dist": dist_file, "property": "uniform", "lambda": 50, "gamma1": 0.1, "gamma2": 0.3},
            str(out),
        )
        run_batch(cfg)
        summary = {
            line[2:].split("=")[0]: line.split("=")[1]
            for line in out.read_text().splitlines()
            if line.startswith("#")
        }
        assert float(summary["success_fraction"]) >= 2 / 3

    def test_byte_identical_reruns_excluding_wall_ms(self, small_dist_file, tmp_path):
        outs = []
        for name in ("a.csv", "b.csv"):
            cfg = ExperimentConfig(
                "learn",
                (7, 8),
                2,
                {"dist": small_dist_file, "eta": 0.0, "delta": 0.5},
                str(tmp_path / name),
            )
            run_batch(cfg)
            outs.append(strip_wall_ms((tmp_path / name).read_text()))
        assert outs[0] == outs[1]

    def test_parallel_rows_in_seed_order(self, small_dist_file, tmp_path, monkeypatch):
        monkeypatch.setenv("DISTTEST_THREADS", "4")
        out = tmp_path / "par.csv"
        cfg = ExperimentConfig(
            "learn",
            (5, 1, 9, 3),
            1,
            {"dist": small_dist_file, "eta": 0.0, "delta": 0.5},
            str(out),
        )
        run_batch(cfg)
        seeds = [int(l.split(",")[0]) for l in out.read_text().splitlines()[1:5]]
        assert seeds == [1, 3, 5, 9]


class TestMainEntry:
    def test_lp_feasible_prints_word(self, tmp_path, capsys):
        path = tmp_path / "p.json"
        save_polyhedron(Polyhedron(np.array([[1.0], [-1.0]]), np.array([0.0, -1.0])), path)
        code = main(["lp-feasible", "--lp", str(path), "--out", str(tmp_path / "o.csv")])
        assert code == 0
        assert "infeasible" in capsys.readouterr().out

    def test_missing_file_exits_nonzero(self, tmp_path, capsys):
        code = main(["lp-feasible", "--lp", str(tmp_path / "nope.json")])
        assert code == 2
        assert "error:" in capsys.readouterr().err

    def test_malformed_dist_exits_nonzero(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"n": 2, "pmf": [0.9, 0.9]}))
        code = main(
            ["learn", "--dist", str(bad), "--eta", "0", "--delta", "0.5", "--out", str(tmp_path / "o.csv")]
        )
        assert code == 2

    def test_seeds_file(self, small_dist_file, tmp_path):
        seeds = tmp_path / "seeds.txt"
        seeds.write_text("4\n5\n# comment\n6\n")
        out = tmp_path / "o.csv"
        code = main(
            [
                "learn",
                "--dist",
                small_dist_file,
                "--eta",
                "0",
                "--delta",
                "0.5",
                "--seeds-file",
                str(seeds),
                "--out",
                str(out),
            ]
        )
        assert code == 0
        rows = [l for l in out.read_text().splitlines() if not l.startswith(("#", "seed,"))]
        assert [int(r.split(",")[0]) for r in rows] == [4, 5, 6]

    def test_config_file_merges(self, small_dist_file, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"seeds": [11], "repeats": 2, "params": {"delta": 0.5}}))
        out = tmp_path / "o.csv"
        code = main(
            [
                "learn",
                "--dist",
                small_dist_file,
                "--eta",
                "0",
                "--delta",
                "0.9",
                "--config",
                str(cfg),
                "--out",
                str(out),
            ]
        )
        assert code == 0
        rows = [l for l in out.read_text().splitlines() if not l.startswith(("#", "seed,"))]
        assert len(rows) == 2
        assert all(r.startswith("11,") for r in rows)

    def test_config_unknown_key_rejected(self, small_dist_file, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"params": {"mystery": 1}}))
        code = main(
            [
                "learn",
                "--dist",
                small_dist_file,
                "--eta",
                "0",
                "--delta",
                "0.5",
                "--config",
                str(cfg),
            ]
        )
        assert code == 2

    def test_gen_adversarial_writes_loadable_bundle(self, tmp_path):
        dist = tmp_path / "u.json"
        save_distribution(Distribution.uniform(100), dist)
        yes, no, rep = tmp_path / "yes.json", tmp_path / "no.json", tmp_path / "rep.csv"
        code = main(
            [
                "gen-adversarial",
                "--dist",
                str(dist),
                "--alpha",
                "0.2",
                "--beta",
                "0.2",
                "--mode",
                "label-invariant",
                "--seed",
                "5",
                "--out-yes",
                str(yes),
                "--out-no",
                str(no),
                "--report",
                str(rep),
            ]
        )
        assert code == 0
        d_yes, d_no = load_distribution(yes), load_distribution(no)
        assert np.count_nonzero(d_no.pmf) == 80
        assert "pass" in rep.read_text()

    def test_tolerant_test_row_fields(self, dist_file, tmp_path):
        out = tmp_path / "t.csv"
        code = main(
            [
                "tolerant-test",
                "--dist",
                dist_file,
                "--lambda",
                "50",
                "--gamma1",
                "0.1",
                "--gamma2",
                "0.3",
                "--seed",
                "3",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        row = out.read_text().splitlines()[1].split(",")
        assert row[2] == "tolerant-test"
        assert row[4] in ("Accept", "Reject")
        assert int(row[5]) > 0
        assert "h_size=" in row[6]

    def test_cli_entry_point_installed(self):
        proc = subprocess.run(
            [sys.executable, "-m", "disttest.cli", "--help"], capture_output=True, text=True
        )
        assert proc.returncode == 0
        for cmd in ("tolerant-test", "lp-feasible", "gen-adversarial", "collision-rate", "learn", "accept"):
            assert cmd in proc.stdout


class TestAcceptCommand:
    def test_exit_codes_follow_results(self, monkeypatch, capsys):
        good = acceptance.CriterionResult("criterion-01", "stub", True, "x=1", 0.0)
        bad = acceptance.CriterionResult("criterion-02", "stub", False, "x=2", 0.0)

        monkeypatch.setattr(acceptance, "run_all", lambda: [good])
        assert acceptance.run_acceptance_suite() == 0
        out = capsys.readouterr().out
        assert "PASS" in out and "criterion-13" in out

        monkeypatch.setattr(acceptance, "run_all", lambda: [good, bad])
        assert acceptance.run_acceptance_suite() == 1
        assert "FAIL" in capsys.readouterr().out

    def test_accept_parser_wired(self):
        parser = build_parser()
        args = parser.parse_args(["accept"])
        assert args.command == "accept"
