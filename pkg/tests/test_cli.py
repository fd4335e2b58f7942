import subprocess
import sys

import pytest

from pathlib import Path

from riskforge.cli import main

CORPUS_FILE = str(Path(__file__).resolve().parents[1] / "corpus" / "g1-healthcare.atdl")

BROKEN = 'goal G "g" node r OR { leaf a "a" bk=low tc=low insider=no category=conventional pre=p-ghost }\n'


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_score_corpus_file(capsys):
    code, out, err = run(capsys, "score", CORPUS_FILE, "--goal", "G1")
    assert code == 0
    for score in ("| 20 |", "| 16 |", "| 12 |", "| 9 |"):
        assert score in out
    assert err == ""


def test_validate_broken_file(tmp_path, capsys):
    path = tmp_path / "broken.atdl"
    path.write_text(BROKEN)
    code, out, err = run(capsys, "validate", str(path))
    assert code == 1
    assert "p-ghost" in err


def test_validate_clean(capsys):
    code, out, _ = run(capsys, "validate", "g1-healthcare")
    assert code == 0 and "0 error(s)" in out


def test_whatif(capsys):
    code, out, _ = run(capsys, "whatif", "g1-healthcare", "--scenario", "harden-prompt")
    assert code == 0
    assert "| G1-R1 | 20 → 15 |" in out


def test_whatif_csv_and_json(capsys):
    assert run(capsys, "whatif", "g1-healthcare", "--scenario", "harden-prompt", "--format", "csv")[0] == 0
    code, out, _ = run(capsys, "whatif", "g1-healthcare", "--scenario", "harden-prompt", "--format", "canonical-json")
    assert code == 0 and '"delta_score": -5' in out


def test_whatif_unknown_scenario(capsys):
    code, _, err = run(capsys, "whatif", "g1-healthcare", "--scenario", "ghost")
    assert code == 1 and "ghost" in err


def test_external_profile_warnings_go_to_stderr(capsys):
    code, out, err = run(capsys, "score", "g1-healthcare", "--profile", "external")
    assert code == 0
    assert "clamped" in err and "clamped" not in out


@pytest.mark.parametrize("kind", ["assessment", "framework", "matrix", "shared-pre"])
def test_report_kinds(capsys, kind):
    code, out, _ = run(capsys, "report", "g1-healthcare", "--kind", kind)
    assert code == 0 and out


def test_report_framework_rows(capsys):
    code, out, _ = run(capsys, "report", "g1-healthcare", "--kind", "framework", "--rows", "ls-hijack-fixation")
    assert code == 0 and "Session Hijack / Fixation" in out


def test_paths_and_budget(capsys):
    code, out, _ = run(capsys, "paths", "g1-healthcare")
    assert code == 0 and out.startswith("53 minimal attack path(s)")
    code, _, err = run(capsys, "paths", "g1-healthcare", "--budget", "5")
    assert code == 1 and "5" in err


def test_export(capsys):
    code, out, _ = run(capsys, "export", "g1-healthcare", "--json")
    assert code == 0 and out.startswith("{")
    code, out, _ = run(capsys, "export", "g1-healthcare", "--dot", "--highlight", "G1-R1")
    assert code == 0 and out.startswith("digraph")
    code, _, err = run(capsys, "export", "g1-healthcare", "--dot", "--highlight", "G9-R9")
    assert code == 1


def test_parse_and_io_errors(tmp_path, capsys):
    bad = tmp_path / "bad.atdl"
    bad.write_text('leaf x "y" bk=enormous')
    code, _, err = run(capsys, "score", str(bad))
    assert code == 1 and "bad.atdl:1:15" in err
    code, _, err = run(capsys, "score", str(tmp_path / "missing.atdl"))
    assert code == 1 and "cannot read" in err


@pytest.mark.parametrize(
    "argv",
    [["bogus"], ["score", "g1-healthcare", "--frobnicate"], [], ["export", "g1-healthcare"],
     ["score", "g1-healthcare", "--format", "pdf"]],
)
def test_usage_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert out == "" and "usage" in err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "riskforge", "score", "g1-healthcare"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert "G1-R1" in proc.stdout
