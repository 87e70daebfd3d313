"""Tests for the exotic-orbits command line."""

import io
import json
import os
import subprocess
import sys
from pathlib import Path
from unittest.mock import patch

import pytest

from exotic_orbits.cli import join_negative_values, main, parse_k_list
from exotic_orbits.utils import DomainError, UsageError

SRC = str(Path(__file__).resolve().parents[1] / "src")


def run_cli(argv):
    """Run main() and return its exit code."""
    with pytest.raises(SystemExit) as exc:
        main(argv)
    return exc.value.code


def test_verify_passes(capsys):
    """One passing suite exits 0 and logs a summary line."""
    code = run_cli(
        ["verify", "--suite", "algebra", "--algebra", "quaternion", "--samples", "50"]
    )
    out, err = capsys.readouterr()
    assert code == 0
    doc = json.loads(out)
    assert doc["pass"] is True
    assert doc["suite"] == "algebra"
    assert doc["config"]["algebra"] == "quaternion"
    assert "algebra [quaternion]: pass" in err


def test_verify_failure_exit_code(capsys):
    """A failed check exits 1 with the failure on stderr."""
    argv = ["verify", "--suite", "bundle-welldef", "--algebra", "h", "--k=3"]
    code = run_cli(argv + ["--samples", "50", "--tol", "1e-300"])
    out, err = capsys.readouterr()
    assert code == 1
    assert json.loads(out)["pass"] is False
    assert "failed:" in err


def test_verify_both_algebras(capsys):
    """--algebra all merges runs into one report."""
    code = run_cli(["verify", "--suite", "algebra", "--samples", "20", "--seed", "3"])
    doc = json.loads(capsys.readouterr().out)
    assert code == 0
    assert len(doc["config"]["runs"]) == 2
    assert {c["algebra"] for c in doc["checks"]} == {"quaternion", "octonion"}
    assert all(c["suite"] == "algebra" for c in doc["checks"])
    assert doc["seed"] == 3


def test_verify_seed_from_environment(monkeypatch, capsys):
    """EXOTIC_ORBITS_SEED is used when --seed is missing."""
    monkeypatch.setenv("EXOTIC_ORBITS_SEED", "42")
    argv = ["verify", "--suite", "z2-coincide", "--algebra", "o", "--k=1"]
    code = run_cli(argv + ["--samples", "30"])
    assert code == 0
    assert json.loads(capsys.readouterr().out)["seed"] == 42


def test_verify_writes_report(tmp_path, capsys):
    """--out keeps stdout empty."""
    out_file = tmp_path / "report.json"
    argv = ["verify", "--suite", "negative-controls", "--algebra", "octonion"]
    code = run_cli(argv + ["--k=-1,3", "--samples", "40", "--out", str(out_file)])
    assert code == 0
    assert capsys.readouterr().out == ""
    doc = json.loads(out_file.read_text(encoding="utf-8"))
    assert doc["config"]["k"] == [-1, 3]
    assert all(c["expect"] == "above" for c in doc["checks"])


def test_verify_through_sys_argv(capsys):
    """main() reads sys.argv when given nothing."""
    argv = ["exotic-orbits", "verify", "--suite", "algebra", "--algebra", "h"]
    with patch.object(sys, "argv", argv + ["--samples", "10", "--shards", "2"]):
        with pytest.raises(SystemExit) as exc:
            main()
    assert exc.value.code == 0
    assert json.loads(capsys.readouterr().out)["config"]["shards"] == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--suite", "algebra", "--k=2"],
        ["verify", "--suite", "algebra", "--k=1,x"],
        ["verify", "--suite", "algebra", "--seed", "-1"],
        ["verify", "--suite", "algebra", "--algebra", "sedenion"],
        ["verify", "--suite", "algebra", "--tol", "0"],
        ["verify", "--suite", "algebra", "--samples", "0"],
        ["verify", "--suite", "algebra", "--samples", "4", "--shards", "5"],
        ["sample", "--source", "exotic:2"],
        ["sample", "--source", "round", "--n", "0"],
        ["classify", "--h-range", "4..1"],
        ["classify", "--h-range", "1-4"],
    ],
)
def test_usage_errors(argv, capsys):
    """Bad arguments exit 2 with a prefixed error."""
    assert run_cli(argv) == 2
    assert "[exotic-orbits] error:" in capsys.readouterr().err


def test_bad_seed_environment(monkeypatch, capsys):
    monkeypatch.setenv("EXOTIC_ORBITS_SEED", "many")
    assert run_cli(["sample", "--source", "round", "--n", "3"]) == 2
    assert "EXOTIC_ORBITS_SEED" in capsys.readouterr().err


def test_argparse_errors():
    """Missing commands and bad choices exit 2."""
    assert run_cli([]) == 2
    assert run_cli(["verify", "--suite", "nothing"]) == 2
    assert run_cli(["sample"]) == 2


def test_domain_and_unexpected_errors(capsys):
    """Domain errors and crashes both exit 1."""
    with patch("exotic_orbits.cli.sample_orbit_space", side_effect=DomainError("off")):
        assert run_cli(["sample", "--source", "round"]) == 1
    with patch("exotic_orbits.cli.run_suite", side_effect=RuntimeError("boom")):
        assert run_cli(["verify", "--suite", "algebra"]) == 1
    err = capsys.readouterr().err
    assert "error: off" in err
    assert "unexpected error: boom" in err


def test_unwritable_output(tmp_path, capsys):
    target = tmp_path / "missing" / "cloud.csv"
    assert run_cli(["sample", "--source", "round", "--out", str(target)]) == 1
    assert "error:" in capsys.readouterr().err


def test_sample_csv_file(tmp_path):
    """Writing the same seeded cloud twice gives the same file."""
    target = tmp_path / "cloud.csv"
    argv = ["sample", "--source", "exotic:3", "--n", "10", "--seed", "1"]
    assert run_cli(argv + ["--out", str(target)]) == 0
    lines = target.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "x,y,z"
    assert len(lines) == 11
    first = target.read_text(encoding="utf-8")
    assert run_cli(argv + ["--out", str(target)]) == 0
    assert target.read_text(encoding="utf-8") == first


def test_sample_json_stdout(capsys):
    argv = ["sample", "--source", "round", "--algebra", "quaternion", "--n", "5"]
    assert run_cli(argv + ["--format", "json"]) == 0
    assert len(json.loads(capsys.readouterr().out)["points"]) == 5


def test_sample_debug_log(monkeypatch, capsys):
    monkeypatch.setenv("EXOTIC_ORBITS_DEBUG", "1")
    assert run_cli(["sample", "--source", "round", "--n", "4", "--seed", "8"]) == 0
    assert "sampled 4 points from round (octonion, seed 8)" in capsys.readouterr().err


def test_classify_text(capsys):
    """Text output ends with the quaternionic note."""
    assert run_cli(["classify", "--h-range", "1..4"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[1].split() == ["1", "1", "no"]
    assert lines[2].split() == ["2", "3", "yes"]
    assert lines[-1].startswith("note: b=4")


def test_classify_csv(capsys):
    assert run_cli(["classify", "--h-range=-1..1", "--format", "csv"]) == 0
    expected = "h,k,odd_bP16\n-1,-3,true\n0,-1,false\n1,1,false\n"
    assert capsys.readouterr().out == expected


def test_classify_json(capsys):
    """The JSON table carries the quaternionic note."""
    assert run_cli(["classify", "--h-range=-4..8", "--format", "json", "--debug"]) == 0
    out, err = capsys.readouterr()
    doc = json.loads(out)
    assert len(doc["rows"]) == 13
    assert doc["rows"][0] == {"h": -4, "k": -9, "odd_bP16": False}
    assert "16" in doc["note"]
    assert "classified h in -4..8: 6 odd" in err


def test_negative_values_after_a_space(capsys):
    """--k -3,1 and --h-range -2..1 parse like their = forms."""
    argv = ["verify", "--suite", "z2-coincide", "--algebra", "h", "--k", "-3,1"]
    assert run_cli(argv + ["--samples", "20"]) == 0
    assert json.loads(capsys.readouterr().out)["config"]["k"] == [-3, 1]
    assert run_cli(["classify", "--h-range", "-2..1", "--format", "csv"]) == 0
    assert capsys.readouterr().out.splitlines()[1] == "-2,-5,true"


def test_join_negative_values():
    """Only values after --k or --h-range are joined."""
    assert join_negative_values(["--k", "-1", "--seed", "3"]) == [
        "--k=-1",
        "--seed",
        "3",
    ]
    assert join_negative_values(["--h-range", "1..2"]) == ["--h-range", "1..2"]
    assert join_negative_values(["--k", "--debug"]) == ["--k", "--debug"]
    assert join_negative_values(["--k"]) == ["--k"]


def test_parse_k_list():
    assert parse_k_list("-3,-1, 1") == (-3, -1, 1)
    with pytest.raises(UsageError, match="odd"):
        parse_k_list("1,4")
    with pytest.raises(UsageError, match="empty"):
        parse_k_list(",")


def test_module_entry_point():
    """python -m exotic_orbits.cli works without installation."""
    env = dict(os.environ, PYTHONPATH=SRC)
    result = subprocess.run(
        [sys.executable, "-m", "exotic_orbits.cli", "classify", "--h-range", "1..4"]
        + ["--format", "csv"],
        capture_output=True,
        check=False,
        env=env,
    )
    assert result.returncode == 0, result.stderr
    expected = "h,k,odd_bP16\n1,1,false\n2,3,true\n3,5,true\n4,7,false\n"
    assert result.stdout.decode() == expected


def test_stdout_is_patchable():
    buffer = io.StringIO()
    with patch.object(sys, "stdout", buffer):
        with pytest.raises(SystemExit):
            main(["classify", "--h-range", "2..2", "--format", "csv"])
    assert buffer.getvalue() == "h,k,odd_bP16\n2,3,true\n"
