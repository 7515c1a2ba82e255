import json
import subprocess
import sys

import pytest
from conftest import FIXTURES

from ptsbench.argstruct import is_closed, parse_arg
from ptsbench.cli import SCHEMA, run

GOLDEN = json.loads((FIXTURES / "golden.json").read_text())


@pytest.mark.parametrize("case", GOLDEN, ids=[" ".join(c["args"][:3]) for c in GOLDEN])
def test_golden(case, monkeypatch, capsys):
    monkeypatch.chdir(FIXTURES)
    code = run(case["args"])
    out = capsys.readouterr().out
    assert code == case["exit"]
    assert case["contains"] in out


def test_json_output(monkeypatch, capsys):
    monkeypatch.chdir(FIXTURES)
    code = run(["split", "transform", "--arg", "split_case2.arg", "--base", "p_to_q.base", "--json"])
    payload = json.loads(capsys.readouterr().out)
    assert code == 0
    assert payload["schema"] == SCHEMA
    assert payload["status"] == "valid" and payload["case"] == 2


def test_json_refutation(capsys):
    code = run(["bes", "check", "--sequent", "==> (imp p q)", "--json"])
    payload = json.loads(capsys.readouterr().out)
    assert code == 1
    assert payload["status"] == "refuted" and payload["certified"] is True
    assert "(rule => p)" in payload["extension"]


def test_split_writes_output(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(FIXTURES)
    out = tmp_path / "final.arg"
    assert run(["split", "transform", "--arg", "split_level2.arg", "--base", "level2.base", "--out", str(out)]) == 0
    final = parse_arg(out.read_text())
    assert is_closed(final) and str(final.formula) == "(or (imp p q) (imp p r))"


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "ptsbench", "derive", "--goal", "p", "--assume", "(rule => p)"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and "(by (rule => p))" in proc.stdout


def test_missing_file_is_a_usage_error(capsys):
    assert run(["arg", "reduce", "--arg", "no/such/file.arg"]) == 2
    assert "error" in capsys.readouterr().err
