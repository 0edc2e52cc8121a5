"""Report serialization and the on-disk artifact tree."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import pytest

from patchloom.driver import RepairConfig, audit_fix_ingredient, repair
from patchloom.index import build_index, save_index
from patchloom.report import (
    AUDIT_SCHEMA,
    REPORT_SCHEMA,
    audit_dict,
    report_dict,
    write_audit_report,
    write_report,
)
from patchloom.tokens import make_fix_ingredient

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"

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


@pytest.fixture()
def ran(tmp_path):
    program = tmp_path / "program"
    program.mkdir()
    (program / "Z.java").write_text(PROGRAM, encoding="utf-8")
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    index_path = tmp_path / "corpus.idx"
    save_index(build_index(corpus), index_path)
    sites = tmp_path / "sites.txt"
    sites.write_text("Z.java:3 0.9\n", encoding="utf-8")
    config = RepairConfig(
        program_root=str(program),
        index_path=str(index_path),
        sites_file=str(sites),
        build_cmd="true",
        test_cmd="true",
        out_dir=str(tmp_path / "out"),
    )
    return repair(config), tmp_path / "out"


def test_report_dict_shape(ran):
    report, _ = ran
    payload = report_dict(report)
    assert payload["schema"] == REPORT_SCHEMA
    assert payload["plausible_found"] is True
    assert payload["budget_exhausted"] is False
    assert payload["warnings"] == []
    assert isinstance(payload["total_seconds"], float)
    site = payload["sites"][0]
    assert site["index"] == 1
    assert site["file"] == "Z.java"
    assert site["line"] == 3
    assert site["status"] == "plausible-found"
    assert site["patches_generated"] >= site["patches_validated"] > 0
    assert site["winner"]["stage"] == "plausible"
    assert site["winner"]["file"] == "Z.java"
    assert site["outcomes"][-1]["stage"] == "plausible"


def test_report_dict_is_json_serializable(ran):
    report, _ = ran
    payload = report_dict(report)
    assert json.loads(json.dumps(payload)) == payload


def test_outcome_entries_reference_patches(ran):
    report, _ = ran
    site = report_dict(report)["sites"][0]
    for outcome in site["outcomes"]:
        assert outcome["kind"] in {
            "replacement", "insertion-before", "insertion-after",
            "if-guard-single", "if-guard-block", "method-replacement",
        }
        assert outcome["stage"] in {
            "static-rejected", "compile-failed", "tests-failed", "plausible"
        }
        assert len(outcome["span"]) == 2
        assert outcome["patch_ordinal"] >= 1
        assert outcome["seconds"] >= 0.0


def test_artifact_tree_is_written(ran):
    report, out = ran
    path = write_report(report, out)
    assert path == out / "report.json"
    assert json.loads(path.read_text())["schema"] == REPORT_SCHEMA
    assert (out / "candidates.csv").is_file()
    assert (out / "patches.csv").is_file()
    assert (out / "figures" / "outcomes.png").read_bytes()[:8] == PNG_MAGIC
    assert (out / "figures" / "site-001-candidates.png").read_bytes()[:8] == PNG_MAGIC
    diffs = sorted((out / "diffs").glob("*.diff"))
    assert diffs
    assert diffs[0].name.startswith("site-001-patch-")


def test_candidates_csv_columns(ran):
    report, out = ran
    write_report(report, out)
    with (out / "candidates.csv").open() as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == [
        "site", "rank", "source", "origin", "signature", "raw_score", "norm_score"
    ]
    assert len(rows) - 1 == report.sites[0].candidates_examined
    ranks = [int(r[1]) for r in rows[1:]]
    assert ranks == sorted(ranks)


def test_patches_csv_columns_and_stages(ran):
    report, out = ran
    write_report(report, out)
    with (out / "patches.csv").open() as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == [
        "site", "patch", "kind", "file", "span_start", "span_end",
        "candidate_id", "candidate_rank", "pair_score", "stage", "diff",
    ]
    assert len(rows) - 1 == report.sites[0].patches_generated
    stages = [r[9] for r in rows[1:]]
    assert "plausible" in stages
    validated = report.sites[0].patches_validated
    assert sum(1 for s in stages if s) == validated


def test_diff_files_match_patch_count(ran):
    report, out = ran
    write_report(report, out)
    diffs = list((out / "diffs").glob("*.diff"))
    assert len(diffs) == report.sites[0].patches_generated
    sample = diffs[0].read_text()
    assert "# kind:" in sample and "# candidate:" in sample


def test_site_paths_are_relative_in_report(ran):
    report, _ = ran
    payload = report_dict(report)
    for site in payload["sites"]:
        assert not Path(site["file"]).is_absolute()


# ---- audit artifacts ------------------------------------------------------------


@pytest.fixture()
def audited(tmp_path):
    local = tmp_path / "local"
    local.mkdir()
    (local / "L.java").write_text(
        "public class L {\n"
        "    boolean f(double fa, double fb) {\n"
        "        return fa * fb > 0.0;\n"
        "    }\n"
        "}\n",
        encoding="utf-8",
    )
    fi = make_fix_ingredient("fa * fb > 0.0", "M2")
    return audit_fix_ingredient(fi, local, build_index(local))


def test_audit_dict_shape(audited):
    payload = audit_dict(audited)
    assert payload["schema"] == AUDIT_SCHEMA
    assert payload["snippet"] == "fa * fb > 0.0"
    assert payload["modification_class"] == "M2"
    assert payload["ingredient_class"] == "FI2"
    assert payload["found"] is True
    assert set(payload["categories"]) == {
        "L-EM", "G-EM", "LG-EM", "L-PM", "G-PM", "LG-PM"
    }
    assert payload["exact"] and payload["parameterized"]
    assert json.loads(json.dumps(payload)) == payload


def test_audit_artifacts_are_written(audited, tmp_path):
    out = tmp_path / "audit-out"
    path = write_audit_report(audited, out)
    assert path == out / "audit.json"
    assert json.loads(path.read_text())["schema"] == AUDIT_SCHEMA
    with (out / "matches.csv").open() as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == ["match", "source", "path", "start", "end", "text"]
    assert {r[0] for r in rows[1:]} == {"exact", "parameterized"}
    png = (out / "figures" / "audit-matches.png").read_bytes()
    assert png[:8] == PNG_MAGIC
