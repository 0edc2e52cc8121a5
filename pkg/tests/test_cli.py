"""The command-line interface: subcommands, output, exit codes."""
from __future__ import annotations

import json
from pathlib import Path

import pytest

from patchloom.cli import main


PROGRAM = """public class Z {
    void broken() {
        int a = 1;
        int b = 2;
    }
    void donor() {
        int c = 3;
        int d = c + 1;
    }
}
"""

RUNNABLE = """public class Main {
    public static void main(String[] args) {
        System.out.println("ok");
    }
}
"""


@pytest.fixture()
def workspace(tmp_path):
    program = tmp_path / "program"
    program.mkdir()
    (program / "Z.java").write_text(PROGRAM, encoding="utf-8")
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    (corpus / "Util.java").write_text(
        "public class Util {\n"
        "    int twice(int v) {\n"
        "        int w = v + v;\n"
        "        return w;\n"
        "    }\n"
        "}\n",
        encoding="utf-8",
    )
    sites = tmp_path / "sites.txt"
    sites.write_text("Z.java:3 0.9\n", encoding="utf-8")
    return tmp_path, program, corpus, sites


def _index(workspace):
    tmp_path, _, corpus, _ = workspace
    out = tmp_path / "corpus.idx"
    assert main(["index", "build", "--corpus", str(corpus), "--out", str(out)]) == 0
    return out


# ---- index and search -----------------------------------------------------------


def test_index_build_writes_and_reports(workspace, capsys):
    tmp_path, _, corpus, _ = workspace
    out = tmp_path / "corpus.idx"
    code = main(["index", "build", "--corpus", str(corpus), "--out", str(out)])
    assert code == 0
    assert out.is_file()
    stdout = capsys.readouterr().out
    assert "indexed 1 methods" in stdout
    assert "(k=3)" in stdout


def test_search_prints_ranked_hits(workspace, capsys):
    tmp_path, program, _, _ = workspace
    index = _index(workspace)
    capsys.readouterr()
    code = main([
        "search", "--index", str(index),
        "--file", str(program / "Z.java"), "--line", "3", "--top", "5",
    ])
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines
    first = lines[0].split("\t")
    assert first[0] == "1"
    assert first[2] == "Util.java"
    assert first[4].startswith("twice/1")


def test_search_empty_index_exits_two(workspace, tmp_path, capsys):
    _, program, _, _ = workspace
    empty = tmp_path / "empty"
    empty.mkdir()
    index = tmp_path / "empty.idx"
    main(["index", "build", "--corpus", str(empty), "--out", str(index)])
    code = main([
        "search", "--index", str(index),
        "--file", str(program / "Z.java"), "--line", "3",
    ])
    assert code == 2


def test_search_outside_any_method_errors(workspace, capsys):
    _, program, _, _ = workspace
    index = _index(workspace)
    code = main([
        "search", "--index", str(index),
        "--file", str(program / "Z.java"), "--line", "1",
    ])
    assert code == 1
    assert "no method at" in capsys.readouterr().err


# ---- repair ----------------------------------------------------------------------


def _repair_args(workspace, index, out_dir, test_cmd="true"):
    tmp_path, program, _, sites = workspace
    return [
        "repair",
        "--program", str(program),
        "--index", str(index),
        "--local", str(program),
        "--sites", str(sites),
        "--build-cmd", "true",
        "--test-cmd", test_cmd,
        "--out-dir", str(out_dir),
    ]


def test_repair_success_exits_zero(workspace, capsys):
    tmp_path = workspace[0]
    index = _index(workspace)
    out_dir = tmp_path / "out"
    capsys.readouterr()
    code = main(_repair_args(workspace, index, out_dir))
    assert code == 0
    stdout = capsys.readouterr().out
    assert "site 1:" in stdout
    assert "status=plausible-found" in stdout
    assert "plausible patch:" in stdout
    assert f"report: {out_dir / 'report.json'}" in stdout
    payload = json.loads((out_dir / "report.json").read_text())
    assert payload["plausible_found"] is True


def test_repair_failure_exits_two(workspace, capsys):
    tmp_path = workspace[0]
    index = _index(workspace)
    out_dir = tmp_path / "out2"
    capsys.readouterr()
    code = main(_repair_args(workspace, index, out_dir, test_cmd="false"))
    assert code == 2
    stdout = capsys.readouterr().out
    assert "no plausible patch found" in stdout
    assert (out_dir / "report.json").is_file()


def test_repair_bad_index_errors(workspace, capsys):
    tmp_path = workspace[0]
    code = main(_repair_args(workspace, tmp_path / "missing.idx", tmp_path / "o"))
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_repair_warns_on_bad_sites(workspace, capsys):
    tmp_path, program, _, sites = workspace
    sites.write_text("junk\nZ.java:3 0.9\n", encoding="utf-8")
    index = _index(workspace)
    capsys.readouterr()
    code = main(_repair_args(workspace, index, tmp_path / "out3"))
    assert code == 0
    assert "warning: skipping malformed site record" in capsys.readouterr().err


# ---- audit-fi --------------------------------------------------------------------


def test_audit_found_exits_zero(workspace, capsys):
    tmp_path, program, _, _ = workspace
    index = _index(workspace)
    capsys.readouterr()
    code = main([
        "audit-fi", "--snippet", "int w = v + v;", "--class", "M5",
        "--local", str(program), "--index", str(index),
    ])
    assert code == 0
    out = capsys.readouterr().out
    assert "ingredient: int w = v + v;" in out
    assert "class: M5 (FI5)" in out
    assert "G-EM=yes" in out
    assert "L-EM=no" in out
    assert "exact\tglobal\t" in out


def test_audit_not_found_exits_two(workspace, capsys):
    tmp_path, program, _, _ = workspace
    index = _index(workspace)
    code = main([
        "audit-fi", "--snippet", "reticulate(splines)", "--class", "M1",
        "--local", str(program), "--index", str(index),
    ])
    assert code == 2


def test_audit_out_dir_writes_report(workspace, capsys):
    tmp_path, program, _, _ = workspace
    index = _index(workspace)
    out_dir = tmp_path / "audit-out"
    code = main([
        "audit-fi", "--snippet", "int w = v + v;", "--class", "M5",
        "--local", str(program), "--index", str(index),
        "--out-dir", str(out_dir),
    ])
    assert code == 0
    assert (out_dir / "audit.json").is_file()


def test_audit_rejects_unparseable_snippet(workspace, capsys):
    tmp_path, program, _, _ = workspace
    index = _index(workspace)
    code = main([
        "audit-fi", "--snippet", "if (", "--class", "M2",
        "--local", str(program), "--index", str(index),
    ])
    assert code == 1
    assert "error:" in capsys.readouterr().err


# ---- harness commands ------------------------------------------------------------


def test_jcheck_clean_and_dirty(tmp_path, capsys):
    root = tmp_path / "prog"
    root.mkdir()
    (root / "Main.java").write_text(RUNNABLE, encoding="utf-8")
    assert main(["jcheck", str(root)]) == 0
    (root / "Bad.java").write_text(
        "public class Bad { void f() { ghost = 1; } }\n", encoding="utf-8"
    )
    capsys.readouterr()
    assert main(["jcheck", str(root)]) == 1
    assert "undeclared variable: ghost" in capsys.readouterr().out


def test_jrun_propagates_exit_and_output(tmp_path, capsys):
    root = tmp_path / "prog"
    root.mkdir()
    (root / "Main.java").write_text(RUNNABLE, encoding="utf-8")
    assert main(["jrun", "--main", "Main", str(root)]) == 0
    assert capsys.readouterr().out == "ok\n"
    (root / "Main.java").write_text(
        RUNNABLE.replace('System.out.println("ok");', "System.exit(5);"),
        encoding="utf-8",
    )
    assert main(["jrun", "--main", "Main", str(root)]) == 5


def test_unknown_subcommand_is_a_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["nonsense"])
    assert info.value.code == 2
