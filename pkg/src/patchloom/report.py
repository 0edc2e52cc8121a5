"""Run reports: one JSON document plus CSV tables, diffs, and charts.

`write_report` lays out an output directory for a repair run::

    report.json          the run summary (schema: patchloom-report/1)
    candidates.csv       one row per merged candidate per site
    patches.csv          one row per generated patch per site
    diffs/               a unified diff per generated patch
    figures/             candidate-score and outcome charts (PNG)

`write_audit_report` does the same for a fix-ingredient audit with
audit.json, matches.csv, and one match-count chart.  All artifacts are
deterministic for a fixed input and clock, so two identical runs produce
byte-identical trees.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .corpus import SourceUnit, parse_source
from .driver import FiAuditResult, RepairReport, SiteResult
from .patches import Patch, patch_diff
from .validate import STAGES

REPORT_SCHEMA = "patchloom-report/1"
AUDIT_SCHEMA = "patchloom-audit/1"


def _rel(path: str, root: str) -> str:
    try:
        return Path(path).resolve().relative_to(Path(root)).as_posix()
    except ValueError:
        return path


def _diff_name(site_index: int, patch_ordinal: int) -> str:
    return f"site-{site_index:03d}-patch-{patch_ordinal:04d}.diff"


def _patch_ordinal(site: SiteResult, patch: Patch) -> int | None:
    for i, candidate in enumerate(site.patches, start=1):
        if candidate is patch:
            return i
    return None


def _outcome_dict(site: SiteResult, outcome, root: str) -> dict:
    ordinal = _patch_ordinal(site, outcome.patch)
    return {
        "stage": outcome.stage,
        "kind": outcome.patch.kind,
        "file": _rel(outcome.patch.file, root),
        "span": list(outcome.patch.span),
        "candidate_id": outcome.patch.candidate_id,
        "candidate_rank": outcome.patch.candidate_rank,
        "patch_ordinal": ordinal,
        "diagnostics": outcome.diagnostics,
        "seconds": round(outcome.wall_seconds, 6),
    }


def report_dict(report: RepairReport) -> dict:
    """The report as a plain dict, exactly what report.json serializes."""
    root = report.program_root
    sites = []
    for index, site in enumerate(report.sites, start=1):
        entry = {
            "index": index,
            "file": _rel(site.site.path, root),
            "line": site.site.line,
            "score": site.site.score,
            "status": site.status,
            "candidates_examined": site.candidates_examined,
            "translation_failures": site.translation_failures,
            "patches_generated": site.patches_generated,
            "patches_validated": site.patches_validated,
            "seconds": round(site.seconds, 6),
            "outcomes": [
                _outcome_dict(site, o, root) for o in site.outcomes
            ],
            "winner": (
                _outcome_dict(site, site.winner, root)
                if site.winner is not None
                else None
            ),
        }
        sites.append(entry)
    return {
        "schema": REPORT_SCHEMA,
        "program_root": root,
        "plausible_found": report.plausible is not None,
        "budget_exhausted": report.budget_exhausted,
        "total_seconds": round(report.total_seconds, 6),
        "warnings": report.warnings,
        "sites": sites,
    }


def _write_json(payload: dict, path: Path) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def _write_candidates_csv(report: RepairReport, path: Path) -> None:
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(
            ["site", "rank", "source", "origin", "signature",
             "raw_score", "norm_score"]
        )
        for index, site in enumerate(report.sites, start=1):
            for cand in site.candidates:
                writer.writerow(
                    [index, cand.rank, cand.source, cand.origin,
                     cand.orig_signature,
                     f"{cand.raw_score:.6f}", f"{cand.norm_score:.6f}"]
                )


def _write_patches_csv(report: RepairReport, path: Path) -> None:
    root = report.program_root
    stage_by_patch: dict[int, str] = {}
    for site in report.sites:
        for outcome in site.outcomes:
            stage_by_patch[id(outcome.patch)] = outcome.stage
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(
            ["site", "patch", "kind", "file", "span_start", "span_end",
             "candidate_id", "candidate_rank", "pair_score", "stage", "diff"]
        )
        for index, site in enumerate(report.sites, start=1):
            for ordinal, patch in enumerate(site.patches, start=1):
                writer.writerow(
                    [index, ordinal, patch.kind, _rel(patch.file, root),
                     patch.span[0], patch.span[1], patch.candidate_id,
                     patch.candidate_rank, f"{patch.pair_score:.6f}",
                     stage_by_patch.get(id(patch), ""),
                     _diff_name(index, ordinal)]
                )


def _write_diffs(report: RepairReport, diff_dir: Path) -> None:
    units: dict[str, SourceUnit] = {}
    diff_dir.mkdir(parents=True, exist_ok=True)
    for index, site in enumerate(report.sites, start=1):
        for ordinal, patch in enumerate(site.patches, start=1):
            if patch.file not in units:
                units[patch.file] = parse_source(patch.file)
            text = patch_diff(units[patch.file], patch)
            (diff_dir / _diff_name(index, ordinal)).write_text(
                text, encoding="utf-8"
            )


def _render_repair_figures(report: RepairReport, figure_dir: Path) -> None:
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    figure_dir.mkdir(parents=True, exist_ok=True)
    for index, site in enumerate(report.sites, start=1):
        if not site.candidates:
            continue
        shown = site.candidates[:50]
        ranks = [c.rank for c in shown]
        scores = [c.norm_score for c in shown]
        colors = ["tab:blue" if c.source == "local" else "tab:orange"
                  for c in shown]
        fig, ax = plt.subplots(figsize=(8, 3))
        ax.bar(ranks, scores, color=colors)
        ax.set_xlabel("candidate rank")
        ax.set_ylabel("normalized score")
        ax.set_title(f"site {index}: {_rel(site.site.path, report.program_root)}"
                     f":{site.site.line}")
        ax.set_ylim(0.0, 1.05)
        fig.tight_layout()
        fig.savefig(figure_dir / f"site-{index:03d}-candidates.png", dpi=100)
        plt.close(fig)

    counts = {stage: 0 for stage in STAGES}
    for site in report.sites:
        for outcome in site.outcomes:
            if outcome.stage in counts:
                counts[outcome.stage] += 1
    fig, ax = plt.subplots(figsize=(6, 3))
    ax.bar(list(counts), [counts[s] for s in counts], color="tab:gray")
    ax.set_ylabel("patches")
    ax.set_title("validation outcomes")
    fig.tight_layout()
    fig.savefig(figure_dir / "outcomes.png", dpi=100)
    plt.close(fig)


def write_report(report: RepairReport, out_dir: str | Path) -> Path:
    """Writes the full artifact tree for a repair run; returns report.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report_path = out / "report.json"
    _write_json(report_dict(report), report_path)
    _write_candidates_csv(report, out / "candidates.csv")
    _write_patches_csv(report, out / "patches.csv")
    _write_diffs(report, out / "diffs")
    _render_repair_figures(report, out / "figures")
    return report_path


# ---- audit reports -----------------------------------------------------------


def _locator_dict(locator) -> dict:
    return {
        "source": locator.source,
        "path": locator.path,
        "start": locator.start,
        "end": locator.end,
        "text": locator.text,
    }


def audit_dict(result: FiAuditResult) -> dict:
    """The audit result as a plain dict, exactly what audit.json serializes."""
    return {
        "schema": AUDIT_SCHEMA,
        "snippet": result.ingredient.snippet,
        "modification_class": result.ingredient.mclass,
        "ingredient_class": result.ingredient.ficlass,
        "found": result.found(),
        "categories": result.categories(),
        "local_statements": result.local_statements,
        "global_statements": result.global_statements,
        "exact": [_locator_dict(m) for m in result.exact],
        "parameterized": [_locator_dict(m) for m in result.parameterized],
    }


def _write_matches_csv(result: FiAuditResult, path: Path) -> None:
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["match", "source", "path", "start", "end", "text"])
        for kind, matches in (("exact", result.exact),
                              ("parameterized", result.parameterized)):
            for m in matches:
                writer.writerow([kind, m.source, m.path, m.start, m.end, m.text])


def _render_audit_figure(result: FiAuditResult, figure_dir: Path) -> None:
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    figure_dir.mkdir(parents=True, exist_ok=True)
    groups = ("local", "global")
    exact = [sum(1 for m in result.exact if m.source == g) for g in groups]
    param = [sum(1 for m in result.parameterized if m.source == g)
             for g in groups]
    fig, ax = plt.subplots(figsize=(5, 3))
    xs = range(len(groups))
    ax.bar([x - 0.2 for x in xs], exact, width=0.4, label="exact",
           color="tab:blue")
    ax.bar([x + 0.2 for x in xs], param, width=0.4, label="parameterized",
           color="tab:orange")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(groups)
    ax.set_ylabel("matching statements")
    ax.set_title("fix-ingredient matches")
    ax.legend()
    fig.tight_layout()
    fig.savefig(figure_dir / "audit-matches.png", dpi=100)
    plt.close(fig)


def write_audit_report(result: FiAuditResult, out_dir: str | Path) -> Path:
    """Writes audit.json, matches.csv, and the match chart; returns audit.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    audit_path = out / "audit.json"
    _write_json(audit_dict(result), audit_path)
    _write_matches_csv(result, out / "matches.csv")
    _render_audit_figure(result, out / "figures")
    return audit_path
