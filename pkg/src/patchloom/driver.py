"""End-to-end repair orchestration and the fix-ingredient auditor.

`repair` walks suspicious sites in score order.  For each site it searches
globally (k-gram index over a corpus) and locally (LCS1 over the program),
translates retrieved code into the target's naming, matches statements and
expressions, generates candidate patches, and validates them in order until
one passes the build and the tests.  `audit_fix_ingredient` answers a
different question: is a given snippet already present, exactly or up to
identifier renaming, in the local program or the corpus.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .corpus import (
    MethodChunk,
    SourceUnit,
    StatementNode,
    enclosing_statement,
    load_program,
    method_at,
    parse_source,
    resolve_bindings,
    segment,
    statements_of,
)
from .index import (
    Candidate,
    CorpusIndex,
    global_search,
    load_index,
    local_search,
    merge_and_filter,
    pick_candidate_statements,
)
from .matching import match_code, pair_score
from .patches import (
    Patch,
    dedupe_patches,
    gen_if_guard,
    gen_insertion,
    gen_method_replacement,
    gen_replacement,
    order_patches,
    parses_after,
)
from .tokens import FixIngredient, is_token_subsequence, parameterize
from .translate import translate
from .validate import ValidationConfig, ValidationOutcome, find_first_plausible

log = logging.getLogger(__name__)

SEARCH_TOP = 500


@dataclass
class SuspiciousSite:
    path: str
    line: int
    score: float
    statement: StatementNode


@dataclass
class RepairConfig:
    program_root: str
    index_path: str
    sites_file: str
    build_cmd: str
    test_cmd: str
    local_root: str | None = None
    top: int = 200
    search_top: int = SEARCH_TOP
    budget_minutes: float = 120.0
    test_timeout: float = 600.0
    out_dir: str | None = None
    keep_work: bool = False
    jobs: int = 1
    clock: Callable[[], float] = time.monotonic

    def require_complete(self) -> None:
        missing = [
            name
            for name in ("program_root", "index_path", "sites_file",
                         "build_cmd", "test_cmd")
            if not getattr(self, name)
        ]
        if missing:
            raise ValueError(f"configuration error: missing {', '.join(missing)}")


@dataclass
class SiteResult:
    site: SuspiciousSite
    status: str  # plausible-found | exhausted | no-candidates | budget-exhausted | skipped
    candidates: list[Candidate] = field(default_factory=list)
    candidates_examined: int = 0
    translation_failures: int = 0
    patches: list[Patch] = field(default_factory=list)
    patches_generated: int = 0
    patches_validated: int = 0
    outcomes: list[ValidationOutcome] = field(default_factory=list)
    winner: ValidationOutcome | None = None
    seconds: float = 0.0


@dataclass
class RepairReport:
    program_root: str
    sites: list[SiteResult]
    plausible: ValidationOutcome | None
    total_seconds: float
    budget_exhausted: bool
    warnings: list[str] = field(default_factory=list)


def load_suspicious_sites(
    path: str | Path, units: list[SourceUnit], program_root: str | Path
) -> tuple[list[SuspiciousSite], list[str]]:
    """Parses `path:line score` records and resolves each to a statement.

    Unresolvable or malformed records are skipped with a warning.  The
    result is sorted by score descending; ties keep input order.
    """
    root = Path(program_root).resolve()
    by_path = {str(Path(u.path).resolve()): u for u in units}
    sites: list[SuspiciousSite] = []
    warnings: list[str] = []
    text = Path(path).read_text(encoding="utf-8")
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            warnings.append(f"skipping malformed site record: {line!r}")
            continue
        locator, score_text = parts
        file_part, _, line_part = locator.rpartition(":")
        try:
            lineno = int(line_part)
            score = float(score_text)
            if not file_part:
                raise ValueError
        except ValueError:
            warnings.append(f"skipping malformed site record: {line!r}")
            continue
        candidate_paths = [str((root / file_part).resolve()),
                           str(Path(file_part).resolve())]
        unit = next((by_path[p] for p in candidate_paths if p in by_path), None)
        if unit is None:
            warnings.append(f"skipping site in unknown file: {line!r}")
            continue
        stmt = enclosing_statement(unit, lineno)
        if stmt is None:
            warnings.append(
                f"skipping site with no enclosing statement: {line!r}"
            )
            continue
        sites.append(SuspiciousSite(unit.path, lineno, score, stmt))
    sites.sort(key=lambda s: -s.score)
    for message in warnings:
        log.warning("%s", message)
    return sites, warnings


class _UnitCache:
    def __init__(self) -> None:
        self._units: dict[str, SourceUnit] = {}

    def get(self, path: str) -> SourceUnit | None:
        if path not in self._units:
            try:
                self._units[path] = parse_source(path)
            except OSError:
                return None
        return self._units[path]


def _global_candidates(
    index: CorpusIndex,
    cache: _UnitCache,
    site: SuspiciousSite,
    search_top: int,
) -> tuple[list[Candidate], int]:
    """Search, translate each hit method, and pick its two best statements."""
    tgt_unit = site.statement.unit
    tgt_method = site.statement.method
    hits = global_search(index, tgt_method, top_n=search_top)
    candidates: list[Candidate] = []
    failures = 0
    for hit in hits:
        cand_unit = cache.get(index.resolve(hit.path))
        if cand_unit is None:
            failures += 1
            continue
        cand_method = method_at(cand_unit, hit.start)
        if cand_method is None or cand_method.node.start != hit.start:
            failures += 1
            continue
        outcome = translate(cand_unit, cand_method, tgt_unit, tgt_method)
        if not outcome.ok:
            failures += 1
            continue
        for stmt in pick_candidate_statements(outcome.method, site.statement):
            candidates.append(
                Candidate(
                    source="global",
                    stmt=stmt,
                    method=outcome.method,
                    orig_signature=hit.signature,
                    orig_package=hit.package,
                    raw_score=hit.raw_score,
                    source_rank=hit.rank,
                    origin=f"{hit.path}:{hit.start}",
                )
            )
    return candidates, failures


def _local_candidates(
    local_units: list[SourceUnit], site: SuspiciousSite, search_top: int
) -> list[Candidate]:
    hits = local_search(local_units, site.statement, top_n=search_top)
    candidates: list[Candidate] = []
    for hit in hits:
        stmt = hit.statement
        if stmt is None:
            continue
        candidates.append(
            Candidate(
                source="local",
                stmt=stmt,
                method=stmt.method,
                orig_signature=stmt.method.signature,
                orig_package=stmt.unit.package_path,
                raw_score=hit.raw_score,
                source_rank=hit.rank,
                origin=f"{hit.path}:{stmt.node.start}",
            )
        )
    return candidates


def _reuse_statement(
    candidate: Candidate, site: SuspiciousSite
) -> tuple[StatementNode, MethodChunk] | None:
    """The candidate statement in target naming, with its enclosing method.

    Global candidates were translated during search.  Local candidates are
    translated here: rename the enclosing method, then relocate the
    statement by its position, which renaming preserves.
    """
    if candidate.source == "global":
        return candidate.stmt, candidate.method
    tgt_unit = site.statement.unit
    outcome = translate(
        candidate.stmt.unit, candidate.method, tgt_unit, site.statement.method
    )
    if not outcome.ok:
        return None
    before = statements_of(candidate.method)
    position = next(
        (i for i, s in enumerate(before) if s.node is candidate.stmt.node), None
    )
    if position is None:
        return None
    after = statements_of(outcome.method)
    if position >= len(after):
        return None
    return after[position], outcome.method


def _generate_for_candidate(
    candidate: Candidate, site: SuspiciousSite, rank: int
) -> tuple[list[Patch], bool]:
    reused = _reuse_statement(candidate, site)
    if reused is None:
        return [], False
    cand_stmt, cand_method = reused
    tgt_unit = site.statement.unit
    cid = candidate.origin or f"{candidate.source}-{rank}"
    cmap = match_code(
        tgt_unit, site.statement.node, cand_stmt.unit, cand_stmt.node
    )
    stmt_score = pair_score(
        tgt_unit, site.statement.node, cand_stmt.unit, cand_stmt.node
    )
    patches: list[Patch] = []
    patches.extend(gen_replacement(cmap, tgt_unit, cand_stmt.unit, cid, rank))
    patches.extend(gen_insertion(site.statement, cand_stmt, cid, rank, stmt_score))
    patches.extend(gen_if_guard(site.statement, cand_stmt, cid, rank, stmt_score))
    patches.extend(
        gen_method_replacement(
            site.statement.method, cand_method, cid, rank, stmt_score
        )
    )
    return patches, True


def _class_names(units: list[SourceUnit]) -> frozenset[str]:
    names = set()
    for unit in units:
        for kind in ("class_decl", "interface_decl", "enum_decl"):
            for decl in unit.tree.find_all(kind):
                if decl.value:
                    names.add(decl.value)
    return frozenset(names)


def _repair_site(
    site: SuspiciousSite,
    index: CorpusIndex,
    cache: _UnitCache,
    local_units: list[SourceUnit],
    units_by_path: dict[str, SourceUnit],
    config: RepairConfig,
    extra_names: frozenset[str],
    remaining_seconds: float,
) -> SiteResult:
    t0 = config.clock()
    result = SiteResult(site, "exhausted")
    global_cands, failures = _global_candidates(
        index, cache, site, config.search_top
    )
    result.translation_failures += failures
    local_cands = _local_candidates(local_units, site, config.search_top)
    merged = merge_and_filter(global_cands, local_cands, site.statement, config.top)
    result.candidates = merged
    result.candidates_examined = len(merged)
    if not merged:
        result.status = "no-candidates"
        result.seconds = config.clock() - t0
        return result

    patches: list[Patch] = []
    for candidate in merged:
        generated, ok = _generate_for_candidate(candidate, site, candidate.rank)
        if not ok:
            result.translation_failures += 1
            continue
        patches.extend(generated)
    patches = order_patches(dedupe_patches(patches))
    tgt_unit = site.statement.unit
    patches = [p for p in patches if parses_after(tgt_unit, p)]
    result.patches = patches
    result.patches_generated = len(patches)

    vconfig = ValidationConfig(
        build_cmd=config.build_cmd,
        test_cmd=config.test_cmd,
        budget_seconds=remaining_seconds,
        test_timeout=config.test_timeout,
        jobs=config.jobs,
        keep_work=config.keep_work,
        work_root=config.out_dir,
        clock=config.clock,
    )
    winner, outcomes = find_first_plausible(
        config.program_root, units_by_path, patches, vconfig,
        extra_names=extra_names,
    )
    result.outcomes = outcomes
    result.patches_validated = len(outcomes)
    result.winner = winner
    if winner is not None:
        result.status = "plausible-found"
    elif any(o.diagnostics == ["budget exhausted"] for o in outcomes):
        result.status = "budget-exhausted"
    elif not patches:
        result.status = "no-candidates"
    result.seconds = config.clock() - t0
    return result


def repair(config: RepairConfig) -> RepairReport:
    """Runs the repair pipeline over every suspicious site in score order.

    Stops early once a site yields a plausible patch; later sites are
    reported as skipped.  All file edits happen in working copies, so the
    program tree is untouched.
    """
    config.require_complete()
    start = config.clock()
    program_root = str(Path(config.program_root).resolve())
    units = load_program(program_root)
    units_by_path = {u.path: u for u in units}
    local_units = (
        load_program(config.local_root) if config.local_root else units
    )
    index = load_index(config.index_path)
    sites, warnings = load_suspicious_sites(config.sites_file, units, program_root)
    extra_names = _class_names(units)
    cache = _UnitCache()
    budget_seconds = config.budget_minutes * 60.0

    results: list[SiteResult] = []
    plausible: ValidationOutcome | None = None
    budget_exhausted = False
    for site in sites:
        if plausible is not None:
            results.append(SiteResult(site, "skipped"))
            continue
        elapsed = config.clock() - start
        if elapsed > budget_seconds:
            budget_exhausted = True
            results.append(SiteResult(site, "budget-exhausted"))
            continue
        result = _repair_site(
            site, index, cache, local_units, units_by_path, config,
            extra_names, budget_seconds - elapsed,
        )
        results.append(result)
        if result.status == "budget-exhausted":
            budget_exhausted = True
        if result.winner is not None:
            plausible = result.winner
    return RepairReport(
        program_root=program_root,
        sites=results,
        plausible=plausible,
        total_seconds=config.clock() - start,
        budget_exhausted=budget_exhausted,
        warnings=warnings,
    )


# ---- fix-ingredient audit ----------------------------------------------------


@dataclass
class MatchLocator:
    source: str  # "local" | "global"
    path: str
    start: int
    end: int
    text: str


@dataclass
class FiAuditResult:
    ingredient: FixIngredient
    exact: list[MatchLocator]
    parameterized: list[MatchLocator]
    local_statements: int
    global_statements: int

    def categories(self) -> dict[str, bool]:
        """The six presence flags: local/global/either, exact/parameterized."""
        l_em = any(m.source == "local" for m in self.exact)
        g_em = any(m.source == "global" for m in self.exact)
        l_pm = any(m.source == "local" for m in self.parameterized)
        g_pm = any(m.source == "global" for m in self.parameterized)
        return {
            "L-EM": l_em, "G-EM": g_em, "LG-EM": l_em or g_em,
            "L-PM": l_pm, "G-PM": g_pm, "LG-PM": l_pm or g_pm,
        }

    def found(self) -> bool:
        return bool(self.exact or self.parameterized)


def _parameterized_tokens(
    unit: SourceUnit, stmt: StatementNode
) -> list[str]:
    from .tokens import chunk_tokens

    bag = chunk_tokens(unit, stmt.node, "lexical")
    bindings = resolve_bindings(unit, stmt.method, include_class_members=True)
    return parameterize(bag, bindings).tokens


def _check_statement(
    fi_exact: list[str],
    fi_param: list[str],
    stmt: StatementNode,
    source: str,
    exact_out: list[MatchLocator],
    param_out: list[MatchLocator],
) -> None:
    from .tokens import chunk_tokens

    unit = stmt.unit
    bag = chunk_tokens(unit, stmt.node, "lexical")
    locator = MatchLocator(
        source, unit.path, stmt.node.start, stmt.node.end, stmt.text()
    )
    exact = is_token_subsequence(fi_exact, bag.tokens)
    if exact:
        exact_out.append(locator)
    # Exact presence counts as parameterized presence by definition.
    if exact or is_token_subsequence(
        fi_param, _parameterized_tokens(unit, stmt)
    ):
        param_out.append(locator)


def audit_fix_ingredient(
    fi: FixIngredient,
    local_root: str | Path,
    index: CorpusIndex | None = None,
    top_n: int = SEARCH_TOP,
    faulty_signature: str = "",
    faulty_package: str = "",
) -> FiAuditResult:
    """Looks for the ingredient as a token subsequence of any statement.

    Local statements are all checked.  Globally, the ingredient's synthetic
    method queries the index; statements stream from retrieved methods in
    rank order, then from unscored methods in path order, up to top_n.
    Methods matching the faulty signature and package are skipped, which
    keeps a bug's own fixed version out of its audit.
    """
    fi_exact = list(fi.bag.tokens)
    fi_param = parameterize(fi.bag, fi.bindings).tokens
    exact: list[MatchLocator] = []
    parameterized: list[MatchLocator] = []

    local_count = 0
    for unit in load_program(local_root):
        for stmt in segment(unit)[1]:
            local_count += 1
            _check_statement(fi_exact, fi_param, stmt, "local", exact, parameterized)

    global_count = 0
    if index is not None:
        query = segment(fi.unit)[0][0]
        hits = global_search(index, query, top_n=len(index.methods) or 1)
        scored_ids = []
        seen = set()
        for hit in hits:
            scored_ids.append((hit.path, hit.start))
            seen.add((hit.path, hit.start))
        tail = sorted(
            (m.path, m.start) for m in index.methods
            if (m.path, m.start) not in seen
        )
        cache = _UnitCache()
        by_span = {(m.path, m.start): m for m in index.methods}
        for path, start in scored_ids + tail:
            if global_count >= top_n:
                break
            meta = by_span.get((path, start))
            if meta is not None and faulty_signature and faulty_package and \
                    meta.signature == faulty_signature and \
                    meta.package == faulty_package:
                continue
            unit = cache.get(index.resolve(path))
            if unit is None:
                continue
            method = method_at(unit, start)
            if method is None or method.node.start != start:
                continue
            for stmt in statements_of(method):
                if global_count >= top_n:
                    break
                global_count += 1
                _check_statement(
                    fi_exact, fi_param, stmt, "global", exact, parameterized
                )
    return FiAuditResult(fi, exact, parameterized, local_count, global_count)
