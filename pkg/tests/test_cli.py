import json
import math

import numpy as np
import pytest

from crbselect.cli import main, parse_angle, _aggregate_curves
from crbselect.records import SelectionRecord, read_csv


def run(argv):
    return main(argv)


class TestParseAngle:
    def test_plain_radians(self):
        assert parse_angle("1.25") == 1.25

    def test_rad_suffix(self):
        assert parse_angle("0.5rad") == 0.5

    def test_deg_suffix(self):
        assert parse_angle("180deg") == math.pi
        assert parse_angle("10deg") == pytest.approx(math.pi / 18, abs=0)


class TestSelect:
    def test_writes_record_and_roundtrips(self, tmp_path, capsys):
        out = tmp_path / "sel.json"
        assert run(["select", "--n", "8", "--m", "4", "--seed", "3",
                    "--grid-points", "32", "--out", str(out)]) == 0
        printed = capsys.readouterr().out.splitlines()
        record = SelectionRecord.read(out)
        assert record.method == "proposed"
        assert record.m == 4 and len(record.selected) == 4
        assert printed[0] == "".join(
            "1" if i in record.selected else "0" for i in range(8))
        assert printed[1] == printed[0].replace("1", "#").replace("0", ".")
        # re-evaluation on the recorded grid reproduces the stored value
        csv_out = tmp_path / "eval.csv"
        assert run(["evaluate", "--selection", str(out), "--out", str(csv_out)]) == 0
        worst_line = capsys.readouterr().out.splitlines()[0]
        reproduced = float(worst_line.split("worst_case=")[1].split()[0])
        assert reproduced == pytest.approx(record.worst_case, abs=1e-12)
        rows = read_csv(csv_out)
        assert list(rows[0].keys()) == ["delta_omega", "crb"]
        assert len(rows) == 32
        assert max(float(r["crb"]) for r in rows) == pytest.approx(
            record.worst_case, abs=1e-12)

    def test_seed_reproducibility_modulo_timestamp(self, tmp_path):
        args = ["select", "--n", "6", "--m", "3", "--seed", "11",
                "--grid-points", "16"]
        out_a, out_b = tmp_path / "a.json", tmp_path / "b.json"
        assert run(args + ["--out", str(out_a)]) == 0
        assert run(args + ["--out", str(out_b)]) == 0
        doc_a = json.loads(out_a.read_text())
        doc_b = json.loads(out_b.read_text())
        doc_a.pop("created_at"), doc_b.pop("created_at")
        assert doc_a == doc_b

    def test_explicit_positions(self, tmp_path):
        out = tmp_path / "sel.json"
        assert run(["select", "--positions", "0,1,2.5,4,7,9.5", "--m", "3",
                    "--grid-points", "16", "--out", str(out)]) == 0
        record = SelectionRecord.read(out)
        assert record.positions == [0.0, 1.0, 2.5, 4.0, 7.0, 9.5]

    def test_m_too_small_is_config_error(self):
        assert run(["select", "--n", "8", "--m", "1"]) == 2

    def test_positions_conflict_is_config_error(self):
        assert run(["select", "--n", "3", "--positions", "0,1,2,3", "--m", "2"]) == 2


class TestBaseline:
    def test_edge_record(self, tmp_path, capsys):
        out = tmp_path / "edge.json"
        assert run(["baseline", "--method", "edge", "--n", "8", "--m", "4",
                    "--grid-points", "16", "--out", str(out)]) == 0
        record = SelectionRecord.read(out)
        assert record.selected == [0, 1, 6, 7]
        assert record.seed is None
        pattern = capsys.readouterr().out.splitlines()[0]
        assert pattern == "11000011"

    def test_exhaustive_matches_library(self, tmp_path):
        from crbselect import CrbParams, exhaustive_best, make_default_grid, make_ula

        out = tmp_path / "ex.json"
        assert run(["baseline", "--method", "exhaustive", "--n", "7", "--m", "3",
                    "--grid-points", "16", "--out", str(out)]) == 0
        record = SelectionRecord.read(out)
        geometry = make_ula(7)
        sel, value = exhaustive_best(geometry, 3, make_default_grid(geometry, 16),
                                     CrbParams.from_factor(1.0))
        assert record.selected == sel.indices.tolist()
        assert record.worst_case == pytest.approx(value, rel=1e-12)


class TestEvaluate:
    def test_singleton_grid_hand_value(self, tmp_path, capsys):
        record = SelectionRecord(
            n=3, m=3, positions=[0.0, 1.0, 2.0], selected=[0, 1, 2],
            method="exhaustive", worst_case=0.5, argmax_dw=math.pi, factor=1.0,
            grid={"points": 1, "min": math.pi, "max": math.pi})
        path = tmp_path / "full3.json"
        record.write(path)
        csv_out = tmp_path / "full3.csv"
        assert run(["evaluate", "--selection", str(path),
                    "--out", str(csv_out)]) == 0
        rows = read_csv(csv_out)
        assert len(rows) == 1
        assert float(rows[0]["crb"]) == pytest.approx(0.5)
        assert "worst_case=0.5" in capsys.readouterr().out

    def test_malformed_file_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"n": 4, "selected": [0, 1]}')
        assert run(["evaluate", "--selection", str(bad)]) == 2
        assert "cannot read" in capsys.readouterr().err

    def test_missing_file_exits_2(self, tmp_path):
        assert run(["evaluate", "--selection", str(tmp_path / "nope.json")]) == 2


class TestSweep:
    def test_row_count_schema_and_order(self, tmp_path):
        out = tmp_path / "sweep.csv"
        assert run(["sweep", "--vary", "n", "--values", "8,12",
                    "--methods", "proposed,edge,random", "--random-seeds", "5",
                    "--grid-points", "16", "--trials", "20",
                    "--out", str(out)]) == 0
        rows = read_csv(out)
        assert list(rows[0].keys()) == ["N", "M", "method", "seed",
                                        "worst_case_crb", "argmax_dw"]
        assert len(rows) == 2 * (2 + 5)
        keys = [(int(r["N"]), int(r["M"]), r["method"], int(r["seed"]))
                for r in rows]
        assert keys == sorted(keys)

    def test_vary_m_requires_n(self, tmp_path):
        assert run(["sweep", "--vary", "m", "--values", "3,4",
                    "--out", str(tmp_path / "x.csv")]) == 2

    def test_empty_values_exit_2(self, tmp_path):
        assert run(["sweep", "--vary", "n", "--values", "",
                    "--out", str(tmp_path / "x.csv")]) == 2

    def test_vary_m_fixed_n(self, tmp_path):
        out = tmp_path / "sweep_m.csv"
        assert run(["sweep", "--vary", "m", "--n", "12", "--values", "3,4",
                    "--methods", "edge", "--grid-points", "8",
                    "--out", str(out)]) == 0
        rows = read_csv(out)
        assert [(int(r["N"]), int(r["M"])) for r in rows] == [(12, 3), (12, 4)]


class TestFigureData:
    def test_unknown_figure_exits_2(self, tmp_path):
        assert run(["figure-data", "--figure", "7", "--out", str(tmp_path)]) == 2

    def test_figure2_bundle(self, tmp_path):
        out = tmp_path / "fig2"
        assert run(["figure-data", "--figure", "2", "--grid-points", "24",
                    "--trials", "20", "--out", str(out)]) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["figure"] == "2"
        assert manifest["kind"] == "patterns"
        rows = read_csv(out / manifest["files"][0])
        assert [r["method"] for r in rows] == ["edge", "proposed"]
        for row in rows:
            assert len(row["pattern"]) == 64
            assert row["pattern"].count("1") == 16

    def test_aggregate_curves(self):
        rows = [
            {"N": 8, "method": "random", "worst_case_crb": 1.0},
            {"N": 8, "method": "random", "worst_case_crb": 3.0},
            {"N": 8, "method": "edge", "worst_case_crb": 2.0},
            {"N": 16, "method": "random", "worst_case_crb": math.inf},
        ]
        curves = _aggregate_curves(rows, "N")
        by_key = {(c["x"], c["method"]): c for c in curves}
        assert by_key[(8, "random")] == {"x": 8, "method": "random",
                                         "mean": 2.0, "min": 1.0, "max": 3.0}
        assert math.isinf(by_key[(16, "random")]["mean"])
