from pathlib import Path

import pytest

from qkint.cli import main
from qkint.scenario import load_report

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def test_run_passing(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert main(["run", str(SCENARIOS / "dwork.json"), "--report", str(out)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines and all(line.startswith("PASS") for line in lines)
    assert load_report(out)["passed"] is True


def test_run_failing(tmp_path, capsys):
    path = tmp_path / "s.json"
    path.write_text('{"kind": "dwork", "parameters": {"series": "factorial_control", '
                    '"primes": [3], "levels": [1]}}')
    assert main(["run", str(path)]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_invalid_scenario(tmp_path, capsys):
    path = tmp_path / "s.json"
    path.write_text('{"kind": "trs"')
    assert main(["run", str(path)]) == 2
    assert main(["validate", str(path)]) == 2
    assert "error:" in capsys.readouterr().err


def test_validate(capsys):
    assert main(["validate", str(SCENARIOS / "qq.json")]) == 0
    assert "ok:" in capsys.readouterr().out


def test_unwritable_report(tmp_path):
    dest = tmp_path / "no" / "such" / "dir.json"
    assert main(["run", str(SCENARIOS / "dwork.json"), "--report", str(dest)]) == 2


def test_overrides(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["run", str(SCENARIOS / "spinchain.json"), "--seed", "5", "--report", str(a)]) == 0
    assert main(["run", str(SCENARIOS / "spinchain.json"), "--seed", "5", "--report", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert load_report(a)["seed"] == 5
    assert main(["run", str(SCENARIOS / "trs.json"), "--tolerance", "-1"]) == 2


def test_timing_flag(tmp_path):
    out = tmp_path / "r.json"
    main(["run", str(SCENARIOS / "trs.json"), "--timing", "--report", str(out)])
    assert "duration_seconds" in load_report(out)


def test_usage_error():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
