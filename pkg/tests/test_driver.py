"""Site loading, the repair loop's statuses, and the fix-ingredient audit."""
from __future__ import annotations

import itertools
from pathlib import Path

import pytest

from patchloom.corpus import load_program, parse_source
from patchloom.driver import (
    RepairConfig,
    audit_fix_ingredient,
    load_suspicious_sites,
    repair,
)
from patchloom.index import build_index, save_index
from patchloom.tokens import make_fix_ingredient


# ---- site records ----------------------------------------------------------------


@pytest.fixture()
def c4_units(c4_program):
    return load_program(c4_program)


def _write_sites(tmp_path, text):
    path = tmp_path / "sites.txt"
    path.write_text(text, encoding="utf-8")
    return path


def test_sites_sorted_by_score_with_stable_ties(tmp_path, c4_program, c4_units):
    path = _write_sites(
        tmp_path,
        "ChartRenderer.java:10 0.4\n"
        "ChartRenderer.java:11 0.9\n"
        "ChartRenderer.java:12 0.4\n",
    )
    sites, warnings = load_suspicious_sites(path, c4_units, c4_program)
    assert warnings == []
    assert [(s.line, s.score) for s in sites] == [(11, 0.9), (10, 0.4), (12, 0.4)]


def test_sites_resolve_to_statements(tmp_path, c4_program, c4_units):
    path = _write_sites(tmp_path, "ChartRenderer.java:10 0.91\n")
    sites, _ = load_suspicious_sites(path, c4_units, c4_program)
    assert len(sites) == 1
    assert "getAnnotations" in sites[0].statement.text()


def test_comments_and_blanks_are_ignored(tmp_path, c4_program, c4_units):
    path = _write_sites(
        tmp_path, "# header\n\nChartRenderer.java:10 0.5\n"
    )
    sites, warnings = load_suspicious_sites(path, c4_units, c4_program)
    assert len(sites) == 1 and warnings == []


def test_malformed_records_warn_and_skip(tmp_path, c4_program, c4_units):
    path = _write_sites(
        tmp_path,
        "garbage\n"
        "ChartRenderer.java:ten 0.5\n"
        "ChartRenderer.java:10 half\n"
        "ChartRenderer.java:10 0.5 extra\n"
        "ChartRenderer.java:10 0.5\n",
    )
    sites, warnings = load_suspicious_sites(path, c4_units, c4_program)
    assert len(sites) == 1
    assert len(warnings) == 4
    assert all("malformed" in w for w in warnings)


def test_unknown_file_and_bad_line_warn(tmp_path, c4_program, c4_units):
    path = _write_sites(
        tmp_path,
        "Nope.java:3 0.5\n"
        "ChartRenderer.java:1 0.5\n",
    )
    sites, warnings = load_suspicious_sites(path, c4_units, c4_program)
    assert sites == []
    assert any("unknown file" in w for w in warnings)
    assert any("no enclosing statement" in w for w in warnings)


def test_absolute_site_paths_resolve(tmp_path, c4_program, c4_units):
    absolute = c4_program / "ChartRenderer.java"
    path = _write_sites(tmp_path, f"{absolute}:10 0.5\n")
    sites, warnings = load_suspicious_sites(path, c4_units, c4_program)
    assert len(sites) == 1 and warnings == []


# ---- the repair loop ---------------------------------------------------------------


TWO_METHODS = """public class Z {
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


@pytest.fixture()
def z_setup(tmp_path):
    program = tmp_path / "program"
    program.mkdir()
    (program / "Z.java").write_text(TWO_METHODS, encoding="utf-8")
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    index_path = tmp_path / "corpus.idx"
    save_index(build_index(corpus), index_path)
    sites = tmp_path / "sites.txt"
    sites.write_text("Z.java:3 0.9\nZ.java:4 0.5\n", encoding="utf-8")
    return program, index_path, sites


def _config(z_setup, tmp_path, **kw):
    program, index_path, sites = z_setup
    defaults = dict(
        program_root=str(program),
        index_path=str(index_path),
        sites_file=str(sites),
        build_cmd="true",
        test_cmd="false",
        out_dir=str(tmp_path / "out"),
    )
    defaults.update(kw)
    return RepairConfig(**defaults)


def test_missing_config_fields_raise(z_setup, tmp_path):
    config = _config(z_setup, tmp_path, build_cmd="", test_cmd="")
    with pytest.raises(ValueError, match="build_cmd, test_cmd"):
        repair(config)


def test_exhausted_when_every_patch_fails(z_setup, tmp_path):
    report = repair(_config(z_setup, tmp_path, test_cmd="false"))
    assert report.plausible is None
    assert not report.budget_exhausted
    assert [r.status for r in report.sites] == ["exhausted", "exhausted"]
    first = report.sites[0]
    assert first.candidates_examined > 0
    assert first.patches_generated > 0
    assert first.patches_validated > 0
    assert all(o.stage != "plausible" for o in first.outcomes)


def test_plausible_found_skips_later_sites(z_setup, tmp_path):
    report = repair(_config(z_setup, tmp_path, test_cmd="true"))
    assert report.plausible is not None
    assert report.plausible.stage == "plausible"
    assert [r.status for r in report.sites] == ["plausible-found", "skipped"]
    assert report.sites[0].winner is report.plausible
    assert report.sites[1].outcomes == []


def test_no_candidates_status(tmp_path, z_setup):
    program, index_path, _ = z_setup
    lone = tmp_path / "lone"
    lone.mkdir()
    (lone / "Q.java").write_text(
        "public class Q {\n    void only() {\n        zebra(9);\n    }\n}\n",
        encoding="utf-8",
    )
    sites = tmp_path / "lone-sites.txt"
    sites.write_text("Q.java:3 0.9\n", encoding="utf-8")
    config = RepairConfig(
        program_root=str(lone),
        index_path=str(index_path),
        sites_file=str(sites),
        build_cmd="true",
        test_cmd="true",
    )
    report = repair(config)
    assert report.plausible is None
    assert [r.status for r in report.sites] == ["no-candidates"]


def test_budget_exhaustion_marks_sites(z_setup, tmp_path):
    ticker = itertools.count()
    config = _config(
        z_setup, tmp_path, budget_minutes=0.0,
        clock=lambda: float(next(ticker)),
    )
    report = repair(config)
    assert report.budget_exhausted
    assert report.plausible is None
    assert [r.status for r in report.sites] == [
        "budget-exhausted", "budget-exhausted"
    ]


def test_repair_leaves_program_untouched(z_setup, tmp_path):
    program, _, _ = z_setup
    before = (program / "Z.java").read_bytes()
    repair(_config(z_setup, tmp_path, test_cmd="true"))
    assert (program / "Z.java").read_bytes() == before
    assert sorted(p.name for p in program.iterdir()) == ["Z.java"]


def test_site_warnings_reach_the_report(z_setup, tmp_path):
    program, index_path, _ = z_setup
    sites = tmp_path / "warn-sites.txt"
    sites.write_text("junk\nZ.java:3 0.9\n", encoding="utf-8")
    config = _config((program, index_path, sites), tmp_path, test_cmd="true")
    report = repair(config)
    assert len(report.warnings) == 1
    assert "malformed" in report.warnings[0]


# ---- fix-ingredient audit ------------------------------------------------------------


@pytest.fixture()
def audit_dirs(tmp_path):
    local = tmp_path / "local"
    local.mkdir()
    (local / "Local.java").write_text(
        "public class Local {\n"
        "    boolean probe(double fa, double fb) {\n"
        "        boolean ok = fa * fb > 0.0;\n"
        "        return ok;\n"
        "    }\n"
        "}\n",
        encoding="utf-8",
    )
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    (corpus / "Renamed.java").write_text(
        "public class Renamed {\n"
        "    boolean scan(double ga, double gb) {\n"
        "        boolean fine = ga * gb > 0.0;\n"
        "        return fine;\n"
        "    }\n"
        "}\n",
        encoding="utf-8",
    )
    return local, build_index(corpus)


def test_audit_finds_exact_local_match(audit_dirs):
    local, index = audit_dirs
    fi = make_fix_ingredient("fa * fb > 0.0", "M2")
    result = audit_fix_ingredient(fi, local, index)
    flags = result.categories()
    assert flags["L-EM"] and flags["LG-EM"]
    assert not flags["G-EM"]
    assert result.found()
    assert any("fa * fb > 0.0" in m.text for m in result.exact)


def test_audit_finds_renamed_global_match(audit_dirs):
    local, index = audit_dirs
    fi = make_fix_ingredient("fa * fb > 0.0", "M2")
    result = audit_fix_ingredient(fi, local, index)
    flags = result.categories()
    assert flags["G-PM"] and flags["LG-PM"]
    assert not flags["G-EM"]
    renamed = [m for m in result.parameterized if m.source == "global"]
    assert any("ga * gb" in m.text for m in renamed)


def test_exact_matches_are_parameterized_matches(audit_dirs):
    local, index = audit_dirs
    fi = make_fix_ingredient("fa * fb > 0.0", "M2")
    result = audit_fix_ingredient(fi, local, index)
    exact_keys = {(m.source, m.path, m.start) for m in result.exact}
    param_keys = {(m.source, m.path, m.start) for m in result.parameterized}
    assert exact_keys <= param_keys


def test_audit_without_index_is_local_only(audit_dirs):
    local, _ = audit_dirs
    fi = make_fix_ingredient("fa * fb > 0.0", "M2")
    result = audit_fix_ingredient(fi, local)
    assert result.global_statements == 0
    flags = result.categories()
    assert flags["L-EM"] and not flags["G-EM"] and not flags["G-PM"]


def test_audit_misses_absent_snippets(audit_dirs):
    local, index = audit_dirs
    fi = make_fix_ingredient("widget.reticulate(splines)", "M1")
    result = audit_fix_ingredient(fi, local, index)
    assert not result.found()
    assert result.categories() == {
        "L-EM": False, "G-EM": False, "LG-EM": False,
        "L-PM": False, "G-PM": False, "LG-PM": False,
    }


def test_audit_skips_the_faulty_method(tmp_path):
    local = tmp_path / "empty-local"
    local.mkdir()
    corpus = tmp_path / "fixed-corpus"
    corpus.mkdir()
    (corpus / "Fixed.java").write_text(
        "package app;\n"
        "public class Fixed {\n"
        "    int bump(int v) {\n"
        "        v = v + 41;\n"
        "        return v;\n"
        "    }\n"
        "}\n",
        encoding="utf-8",
    )
    index = build_index(corpus)
    sig = index.methods[0].signature
    fi = make_fix_ingredient("v = v + 41;", "M4")
    hit = audit_fix_ingredient(fi, local, index)
    assert hit.categories()["G-EM"]
    miss = audit_fix_ingredient(
        fi, local, index, faulty_signature=sig, faulty_package="app"
    )
    assert not miss.found()


def test_audit_statement_counts(audit_dirs):
    local, index = audit_dirs
    fi = make_fix_ingredient("fa * fb > 0.0", "M2")
    result = audit_fix_ingredient(fi, local, index)
    assert result.local_statements == 2
    assert result.global_statements == 2
    capped = audit_fix_ingredient(fi, local, index, top_n=1)
    assert capped.global_statements <= 2
