from __future__ import annotations

import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from markoff.checkpoint import Checkpoint, run_enumeration
from markoff.cli import main


def run_cli(*args: str, env: dict[str, str] | None = None) -> subprocess.CompletedProcess[str]:
    return subprocess.run(
        [sys.executable, "-m", "markoff", *args],
        capture_output=True,
        text=True,
        env={**os.environ, **(env or {})},
    )


def read_records(path: Path) -> list[dict[str, str]]:
    return [json.loads(line) for line in path.read_text().splitlines()]


def test_enumerate_1000(tmp_path: Path) -> None:
    out = tmp_path / "t.jsonl"
    assert main(["enumerate", "--max-c", "1000", "--out", str(out)]) == 0
    recs = read_records(out)
    assert len(recs) == 13
    assert recs[0] == {"a": "1", "b": "1", "c": "1", "path": ""}
    assert [int(r["c"]) for r in recs] == sorted(int(r["c"]) for r in recs)


def test_enumerate_1(tmp_path: Path) -> None:
    out = tmp_path / "t.jsonl"
    assert main(["enumerate", "--max-c", "1", "--out", str(out)]) == 0
    assert read_records(out) == [{"a": "1", "b": "1", "c": "1", "path": ""}]


def test_enumerate_googol_regression(tmp_path: Path) -> None:
    out = tmp_path / "t.jsonl"
    assert main(["enumerate", "--max-c", str(10**100), "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 9670


def test_workers_byte_identical(tmp_path: Path) -> None:
    one, many = tmp_path / "1.jsonl", tmp_path / "n.jsonl"
    bound = str(10**40)
    assert main(["enumerate", "--max-c", bound, "--out", str(one)]) == 0
    assert main(["enumerate", "--max-c", bound, "--out", str(many), "--workers", "4"]) == 0
    assert one.read_bytes() == many.read_bytes()


def test_checkpointed_run_matches_plain(tmp_path: Path) -> None:
    plain, ck = tmp_path / "p.jsonl", tmp_path / "c.jsonl"
    run_enumeration(10**30, plain)
    run_enumeration(10**30, ck, tmp_path / "ck.json", interval=7)
    assert plain.read_bytes() == ck.read_bytes()
    assert not (tmp_path / "ck.json").exists()


def test_kill_and_resume_is_byte_identical(tmp_path: Path) -> None:
    bound = str(10**40)
    ref, out, ck = tmp_path / "ref.jsonl", tmp_path / "out.jsonl", tmp_path / "ck.json"
    assert main(["enumerate", "--max-c", bound, "--out", str(ref)]) == 0
    total = len(ref.read_text().splitlines())

    killed = run_cli("enumerate", "--max-c", bound, "--out", str(out), "--checkpoint", str(ck),
                     "--checkpoint-every", "50", "--halt-after", str(total // 2 + 13))
    assert killed.returncode == 137
    assert ck.exists() and not out.exists()
    saved = Checkpoint.from_json(ck.read_text())
    partial = tmp_path / "out.jsonl.partial"
    # records written after the last checkpoint exist on disk and must not be duplicated
    assert len(partial.read_text().splitlines()) > saved.emitted_count

    resumed = run_cli("enumerate", "--max-c", bound, "--out", str(out), "--checkpoint", str(ck),
                      "--checkpoint-every", "50")
    assert resumed.returncode == 0, resumed.stderr
    assert out.read_bytes() == ref.read_bytes()
    assert not partial.exists()


def test_malformed_checkpoint_exits_1(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    ck = tmp_path / "ck.json"
    ck.write_text("{not json")
    rc = main(["enumerate", "--max-c", "1000", "--out", str(tmp_path / "o"), "--checkpoint", str(ck)])
    assert rc == 1
    assert "checkpoint" in capsys.readouterr().err
    ck.write_text(json.dumps({"schema_version": 99, "c_bound": "1000", "emitted_count": "0", "frontier": []}))
    assert main(["enumerate", "--max-c", "1000", "--out", str(tmp_path / "o"), "--checkpoint", str(ck)]) == 1


def test_checkpoint_bound_mismatch_exits_1(tmp_path: Path) -> None:
    ck = tmp_path / "ck.json"
    ck.write_text(Checkpoint(5, [], 0).to_json())
    (tmp_path / "o.partial").write_text("")
    assert main(["enumerate", "--max-c", "1000", "--out", str(tmp_path / "o"), "--checkpoint", str(ck)]) == 1


def test_unwritable_path_exits_1(tmp_path: Path) -> None:
    out = tmp_path / "missing" / "dir" / "o.jsonl"
    assert main(["enumerate", "--max-c", "1000", "--out", str(out)]) == 1


def test_bad_arguments_exit_nonzero() -> None:
    assert run_cli("enumerate", "--max-c", "0", "--out", "x").returncode != 0
    assert run_cli("farey", "--fraction", "2/4").returncode == 1
    assert run_cli("farey", "--fraction", "3/2").returncode == 1


def test_audit_1000(tmp_path: Path) -> None:
    report = tmp_path / "r.json"
    res = run_cli("audit", "--max-c", "1000", "--report", str(report), "--witness", str(tmp_path / "w.json"))
    assert res.returncode == 0, res.stderr
    data = json.loads(report.read_text())
    assert data["summary"]["classes"] == 13 and data["summary"]["ok"]
    assert not (tmp_path / "w.json").exists()
    assert "13 classes audited, 0 failed" in res.stdout


def test_audit_5(tmp_path: Path) -> None:
    assert main(["audit", "--max-c", "5", "--witness", str(tmp_path / "w.json")]) == 0


def test_audit_fault_injection_writes_witness(tmp_path: Path) -> None:
    wit = tmp_path / "w.json"
    res = run_cli("audit", "--max-c", "1000", "--inject-fault", "13", "--witness", str(wit))
    assert res.returncode == 2
    data = json.loads(wit.read_text())
    (fail,) = data["failures"]
    assert fail["c"] == "13"
    a, b = fail["matrix"]
    det = int(a[0]) * int(b[1]) - int(a[1]) * int(b[0])
    assert det != 1


def test_farey_2_5(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["farey", "--fraction", "2/5"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["matrix"] == [["46", "65"], ["29", "41"]]
    assert out["trace"] == "87" and out["c"] == "29"
    assert out["letters"] == "AABAB"


def test_gaps_csv(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["gaps", "--max-c", "13", "--digits", "60", "--format", "csv"]) == 0
    captured = capsys.readouterr()
    rows = captured.out.splitlines()
    assert rows[0] == "c,center,width_lo,width_hi"
    assert len(rows) == 7
    assert rows[1].startswith("1,0/1,0.7639320")
    summary = json.loads(captured.err)
    assert summary["partial_sum"]["lo"].startswith("0.996972")
    assert summary["disjointness"] == "DISJOINT"


def test_gaps_json_and_env_digits(monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture[str]) -> None:
    monkeypatch.setenv("MARKOFF_DIGITS", "12")
    assert main(["gaps", "--max-c", "5", "--format", "json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["summary"]["digits"] == 12
    assert len(out["gaps"]) == 4
    assert len(out["gaps"][0]["width_lo"].split(".")[1]) == 12


def test_gaps_summary_file(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    summary = tmp_path / "s.json"
    assert main(["gaps", "--max-c", "1000", "--digits", "60", "--summary", str(summary)]) == 0
    assert json.loads(summary.read_text())["gap_count"] == 24


def test_certify_5(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["certify", "--c", "5"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert [c["fraction"] for c in out["classes"]] == ["1/3", "2/3"]
    assert all(c["key"] == ["5", "2"] for c in out["classes"])
    (cert,) = out["certificates"]
    assert cert["certificate"]["c"] == "5" and out["distinct"] == []


def test_certify_not_markoff(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["certify", "--c", "6"]) == 1
    assert "not found" in capsys.readouterr().err


def test_certify_mixed_class_reports_distinct_keys(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["certify", "--c", "610"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert len(out["classes"]) == 2 and len(out["certificates"]) == 1
