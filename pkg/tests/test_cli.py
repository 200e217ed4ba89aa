import csv
import json
import os

import pytest

from factorindex.cli import main
from factorindex.config import config_from_dict

from conftest import make_table, write_table_csv


def write_identity_correlation_csv(tmp_path):
    """Nine cases, four variables with disjoint-support deviations.

    Every off-diagonal product of standardized columns has a zero factor,
    so the sample correlation matrix is the exact identity and eigenvalue
    retention by the Kaiser rule has nothing to keep.
    """
    rows = []
    for case in range(9):
        row = [5.0, 5.0, 5.0, 5.0]
        if case < 8:
            row[case // 2] = 7.0 if case % 2 == 0 else 3.0
        rows.append(row)
    path = tmp_path / "identity.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["case", "a", "b", "c", "d"])
        for i, row in enumerate(rows):
            writer.writerow([f"case{i}"] + [repr(v) for v in row])
    return str(path)


@pytest.fixture()
def table_csv(tmp_path):
    ids, names, values = make_table()
    return write_table_csv(tmp_path / "table.csv", ids, names, values)


class TestAnalyze:
    def test_full_run_writes_everything(self, table_csv, tmp_path, capsys):
        out = tmp_path / "out"
        rc = main(["analyze", "--input", table_csv, "--out-dir", str(out),
                   "--format", "json", "--format", "csv", "--format", "text"])
        assert rc == 0
        files = set(os.listdir(out))
        assert {"factor_model.json", "factor_model.csv", "factor_model.txt",
                "ranking.json", "ranking.csv", "ranking.txt",
                "comparison.json", "comparison.csv", "comparison.txt",
                "run_summary.json"} <= files
        printed = capsys.readouterr().out
        assert "run_summary.json" in printed

    def test_k_out_of_range_exits_2(self, table_csv, tmp_path, capsys):
        rc = main(["analyze", "--input", table_csv,
                   "--out-dir", str(tmp_path / "x"), "--k", "60"])
        assert rc == 2
        err = capsys.readouterr().err
        assert "floor(n/2) = 44" in err and "88" in err
        assert not (tmp_path / "x").exists()  # no partial outputs

    def test_kaiser_with_identity_correlation_exits_3(self, tmp_path, capsys):
        path = write_identity_correlation_csv(tmp_path)
        rc = main(["analyze", "--input", path, "--out-dir",
                   str(tmp_path / "y"), "--k", "2"])
        assert rc == 3
        err = capsys.readouterr().err
        assert "extraction" in err
        assert not (tmp_path / "y").exists()

    def test_deterministic_outputs(self, table_csv, tmp_path):
        out = tmp_path / "out"
        args = ["analyze", "--input", table_csv, "--out-dir", str(out),
                "--format", "json", "--format", "csv"]
        assert main(list(args)) == 0
        first = {name: (out / name).read_bytes() for name in os.listdir(out)}
        assert main(list(args)) == 0
        second = {name: (out / name).read_bytes() for name in os.listdir(out)}
        assert first == second

    def test_missing_input_exits_2(self, capsys):
        assert main(["analyze"]) == 2
        assert "input" in capsys.readouterr().err

    def test_nonexistent_file_exits_2(self, tmp_path, capsys):
        rc = main(["analyze", "--input", str(tmp_path / "nope.csv")])
        assert rc == 2


class TestSubcommands:
    def test_factors_stops_after_model(self, table_csv, tmp_path):
        out = tmp_path / "fac"
        rc = main(["factors", "--input", table_csv, "--out-dir", str(out),
                   "--format", "csv"])
        assert rc == 0
        files = set(os.listdir(out))
        assert "factor_model.csv" in files
        assert "ranking.csv" not in files and "comparison.csv" not in files

    def test_factors_csv_table_layout(self, table_csv, tmp_path):
        out = tmp_path / "fac"
        main(["factors", "--input", table_csv, "--out-dir", str(out),
              "--format", "csv"])
        with open(out / "factor_model.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0][0] == "variable"
        assert rows[0][1] == "factor_1"
        assert len(rows) == 1 + 34  # variables as rows

    def test_rank_through_ranking(self, table_csv, tmp_path):
        out = tmp_path / "rank"
        rc = main(["rank", "--input", table_csv, "--out-dir", str(out),
                   "--format", "text", "--direction", "ascending", "--k", "10"])
        assert rc == 0
        text = (out / "ranking.txt").read_text()
        assert "Rank | Communities" in text
        assert "comparison.txt" not in set(os.listdir(out))

    def test_compare_with_explicit_groups(self, table_csv, tmp_path):
        ids, _, _ = make_table()
        out = tmp_path / "cmp"
        rc = main(["compare", "--input", table_csv, "--out-dir", str(out),
                   "--group1", ",".join(ids[:10]),
                   "--group2", ",".join(ids[-10:]),
                   "--format", "json"])
        assert rc == 0
        files = set(os.listdir(out))
        assert files == {"comparison.json", "run_summary.json"}
        parsed = json.loads((out / "comparison.json").read_text())
        assert parsed["group1_ids"] == list(ids[:10])
        assert len(parsed["variables"]) == 34

    def test_compare_requires_groups(self, table_csv, capsys):
        assert main(["compare", "--input", table_csv]) == 2
        assert "group1" in capsys.readouterr().err

    def test_unknown_subcommand_exits_2(self, capsys):
        assert main(["frobnicate"]) == 2
        assert "usage" in capsys.readouterr().err

    def test_unknown_flag_exits_2(self, table_csv, capsys):
        assert main(["analyze", "--input", table_csv, "--frob"]) == 2
        assert "usage" in capsys.readouterr().err

    def test_rotation_none_flag(self, table_csv, tmp_path):
        out = tmp_path / "unrotated"
        rc = main(["factors", "--input", table_csv, "--out-dir", str(out),
                   "--format", "json", "--rotation", "none"])
        assert rc == 0
        parsed = json.loads((out / "factor_model.json").read_text())
        assert parsed["rotation_method"] == "none"
        assert parsed["loadings_rotated"] == parsed["loadings_unrotated"]

    def test_listwise_policy_flag(self, tmp_path):
        path = tmp_path / "gaps.csv"
        path.write_text("id,a,b\nw,1,2\nx,3,\ny,5,6\nz,7,9\n")
        out = tmp_path / "out"
        with pytest.warns(UserWarning, match="x"):
            rc = main(["factors", "--input", str(path), "--out-dir", str(out),
                       "--missing-policy", "listwise", "--retention", "fixed",
                       "--retention-k", "1"])
        assert rc == 0


class TestConfigFile:
    def test_config_driven_run(self, table_csv, tmp_path):
        out = tmp_path / "out"
        cfg = {
            "input": table_csv,
            "retention": {"rule": "fixed", "k": 4},
            "ranking": {"factor": 1, "direction": "descending", "k": 8},
            "output": {"dir": str(out), "formats": ["json"]},
        }
        cfg_path = tmp_path / "run.json"
        cfg_path.write_text(json.dumps(cfg))
        assert main(["analyze", "--config", str(cfg_path)]) == 0
        summary = json.loads((out / "run_summary.json").read_text())
        assert summary["config"]["retention"] == {"rule": "fixed", "k": 4}
        assert summary["config"]["ranking"]["k"] == 8
        ranking = json.loads((out / "ranking.json").read_text())
        assert ranking["direction"] == "descending"
        assert len(ranking["group1_ids"]) == 8

    def test_flags_override_config(self, table_csv, tmp_path):
        out = tmp_path / "out"
        cfg = {"input": table_csv,
               "ranking": {"k": 10},
               "output": {"dir": str(out), "formats": ["json"]}}
        cfg_path = tmp_path / "run.json"
        cfg_path.write_text(json.dumps(cfg))
        assert main(["analyze", "--config", str(cfg_path), "--k", "5"]) == 0
        summary = json.loads((out / "run_summary.json").read_text())
        assert summary["config"]["ranking"]["k"] == 5

    def test_summary_round_trips_to_config(self, table_csv, tmp_path):
        out = tmp_path / "out"
        rc = main(["analyze", "--input", table_csv, "--out-dir", str(out),
                   "--format", "json", "--alpha", "0.1"])
        assert rc == 0
        summary = json.loads((out / "run_summary.json").read_text())
        rebuilt = config_from_dict(summary["config"])
        assert rebuilt.input == table_csv
        assert rebuilt.alpha == 0.1
        assert rebuilt.to_dict() == summary["config"]

    def test_unknown_config_key_exits_2(self, table_csv, tmp_path, capsys):
        cfg_path = tmp_path / "run.json"
        cfg_path.write_text(json.dumps({"input": table_csv, "rotcfg": {}}))
        assert main(["analyze", "--config", str(cfg_path)]) == 2
        assert "rotcfg" in capsys.readouterr().err

    def test_invalid_json_exits_2(self, tmp_path, capsys):
        cfg_path = tmp_path / "run.json"
        cfg_path.write_text("{not json")
        assert main(["analyze", "--config", str(cfg_path)]) == 2
        assert "invalid JSON" in capsys.readouterr().err


class TestConfigValidation:
    def test_enum_values_rejected(self):
        from factorindex.errors import ValidationError
        with pytest.raises(ValidationError, match="retention.rule"):
            config_from_dict({"input": "x.csv", "retention": {"rule": "scree"}})
        with pytest.raises(ValidationError, match="direction"):
            config_from_dict({"input": "x.csv", "ranking": {"direction": "up"}})
        with pytest.raises(ValidationError, match="formats"):
            config_from_dict({"input": "x.csv", "output": {"formats": ["yaml"]}})

    def test_numeric_bounds(self):
        from factorindex.errors import ValidationError
        with pytest.raises(ValidationError, match="alpha"):
            config_from_dict({"input": "x.csv", "comparison": {"alpha": 1.5}})
        with pytest.raises(ValidationError, match="ci_level"):
            config_from_dict({"input": "x.csv", "comparison": {"ci_level": 0.0}})
        with pytest.raises(ValidationError, match="ranking.k"):
            config_from_dict({"input": "x.csv", "ranking": {"k": 0}})

    def test_fixed_retention_needs_k(self):
        from factorindex.errors import ValidationError
        with pytest.raises(ValidationError, match="requires retention k"):
            config_from_dict({"input": "x.csv", "retention": {"rule": "fixed"}})

    def test_defaults_round_trip(self):
        cfg = config_from_dict({"input": "x.csv"})
        assert cfg.retention_rule == "kaiser"
        assert cfg.ranking_k == 10
        assert cfg.standardize_scope == "selected"
        assert config_from_dict(cfg.to_dict()) == cfg
