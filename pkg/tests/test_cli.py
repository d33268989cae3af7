"""End-to-end command driver checks through main()."""

import json

import pytest

from leveltower import cli
from leveltower.errors import (
    CapExceeded,
    NotAFlag,
    OracleMismatch,
    PreconditionError,
    RankCapExceeded,
)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_exit_code_mapping():
    assert cli.exit_code_for(PreconditionError("x")) == 2
    assert cli.exit_code_for(NotAFlag("x")) == 2
    assert cli.exit_code_for(CapExceeded("x")) == 3
    assert cli.exit_code_for(RankCapExceeded("x")) == 3
    assert cli.exit_code_for(OracleMismatch("x")) == 4
    assert cli.EXIT_CODES["mismatch"] == 4


def test_tower_command(capsys):
    code, out, err = run(capsys, "tower", "--q", "2", "--n", "2", "--m", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == "leveltower/report/1"
    assert doc["results"]["rank"] == 6
    assert doc["results"]["stage_degrees"] == [3, 2]
    assert doc["results"]["level_check"]["ok"] is True


def test_tower_rank_cap_exit(capsys):
    code, out, err = run(capsys, "tower", "--q", "3", "--n", "3", "--m", "1")
    assert code == 3
    assert "cap" in err


def test_tower_cache_hit(capsys, tmp_path):
    argv = ["tower", "--q", "2", "--n", "2", "--m", "1",
            "--cache-dir", str(tmp_path)]
    code1, out1, _ = run(capsys, *argv)
    code2, out2, _ = run(capsys, *argv)
    assert code1 == code2 == 0
    d1, d2 = json.loads(out1), json.loads(out2)
    assert d1["results"]["cache"]["hit"] is False
    assert d2["results"]["cache"]["hit"] is True
    assert d1["results"]["rank"] == d2["results"]["rank"]
    assert d1["results"]["level_check"] == d2["results"]["level_check"]


def test_reports_are_byte_identical(capsys):
    code1, out1, _ = run(capsys, "jl", "--q", "2")
    code2, out2, _ = run(capsys, "jl", "--q", "2")
    assert code1 == code2 == 0
    assert out1 == out2


def test_strata_command(capsys):
    code, out, _ = run(capsys, "strata", "--q", "2", "--n", "3", "--m", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["results"]["counts"] == {"1": 7, "2": 7}
    assert doc["results"]["total"] == 14


def test_strata_action_zero_table(capsys):
    code, out, _ = run(capsys, "strata-action", "--q", "2", "--n", "3", "--m", "1",
                       "--g", "companion:T^3+T+1", "--scan-m", "2")
    assert code == 0
    doc = json.loads(out)
    for row in doc["results"]["fixed_counts"].values():
        assert set(row.values()) == {0}
    assert doc["results"]["observed_minimal_free_level"] == {"1": 1, "2": 1}


def test_strata_action_rejects_non_unit(capsys):
    code, out, err = run(capsys, "strata-action", "--q", "2", "--n", "2",
                         "--g", "companion:T^2+P")
    assert code == 2
    assert "unit" in err


def test_flags_command(capsys):
    code, out, _ = run(capsys, "flags", "--q", "2", "--n", "2", "--m", "1")
    assert code == 0
    assert json.loads(out)["results"]["count"] == 3


def test_flag_of_point_command(capsys, tmp_path):
    table = tmp_path / "vt.txt"
    table.write_text("2 2 1\n0,1 : 1\n1,0 : 2\n1,1 : 2\n")
    code, out, _ = run(capsys, "flag-of-point", "--table", str(table))
    assert code == 0
    assert json.loads(out)["results"]["signature"] == [1, 2]
    bad = tmp_path / "bad.txt"
    bad.write_text("2 2 1\n0,1 : 1\n1,0 : 1\n1,1 : 2\n")
    code, out, err = run(capsys, "flag-of-point", "--table", str(bad))
    assert code == 2


def test_count_command(capsys):
    code, out, _ = run(capsys, "count", "--q", "2", "--n", "2", "--m", "1",
                       "--b", "x:2", "--g", "companion:T^2+T+1")
    assert code == 0
    doc = json.loads(out)
    assert doc["results"]["agreement"] is True
    assert doc["results"]["total"] == doc["results"]["per_fiber"] * 2
    assert doc["results"]["structured"]["per_fiber"] == doc["results"]["bruteforce"]["per_fiber"]


def test_jl_cap_exit(capsys):
    code, out, err = run(capsys, "jl", "--q", "5")
    assert code == 3


def test_jl_command_values(capsys):
    code, out, _ = run(capsys, "jl", "--q", "2")
    doc = json.loads(out)
    assert doc["results"]["pairs"] == [[0, 2]]
    assert doc["results"]["cuspidal_count"] == 1


def test_config_file_with_flag_override(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("q = 3\nn = 2\nm = 1\n# comment\nformat = json\n")
    code, out, _ = run(capsys, "strata", "--config", str(cfg))
    assert code == 0
    doc = json.loads(out)
    assert doc["config"]["q"] == 3
    assert doc["results"]["counts"] == {"1": 4}
    code, out, _ = run(capsys, "strata", "--config", str(cfg), "--q", "2")
    assert json.loads(out)["config"]["q"] == 2


def test_csv_format_versioned_header(capsys):
    code, out, _ = run(capsys, "strata", "--q", "2", "--n", "3", "--m", "1",
                       "--format", "csv")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "schema,command,q,n,m,h,count"
    assert lines[1].startswith("leveltower-csv/1,strata,2,3,1,1,7")


def test_text_format(capsys):
    code, out, _ = run(capsys, "flags", "--q", "2", "--n", "2", "--m", "1",
                       "--format", "text")
    assert code == 0
    assert out.startswith("command: flags")


def test_bad_format_rejected(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("format = nope\n")
    code, out, err = run(capsys, "strata", "--q", "2", "--config", str(cfg))
    assert code == 2
    assert "format" in err


def test_selftest_command(capsys):
    code, out, _ = run(capsys, "selftest")
    assert code == 0
    doc = json.loads(out)
    assert all(c["status"] == "pass" for c in doc["results"]["checks"])
