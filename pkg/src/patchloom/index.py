"""Corpus index and the two retrieval paths.

Global search ranks whole methods by Dice similarity over structural
k-grams, served from a persisted postings index.  Local search ranks every
statement of the faulty program by LCS1 Dice against the suspicious
statement.  Results from both sources are score-normalized, merged, and
filtered into one candidate list.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .corpus import MethodChunk, SourceUnit, StatementNode, load_program, segment
from .tokens import chunk_tokens, dice_list, structural_kgrams
from .tree import compact

log = logging.getLogger(__name__)

FORMAT_MAGIC = "patchloom-index"
FORMAT_VERSION = 1


@dataclass
class IndexedMethod:
    mid: int
    path: str
    package: str
    signature: str
    start: int
    end: int
    gram_count: int


@dataclass
class CorpusIndex:
    k: int
    methods: list[IndexedMethod]
    postings: dict[str, list[tuple[int, int]]]
    root: str = ""

    def method_count(self) -> int:
        return len(self.methods)

    def resolve(self, rel_path: str) -> str:
        """Absolute path of an indexed file, anchored at the build-time root."""
        return str(Path(self.root) / rel_path) if self.root else rel_path


@dataclass
class SearchHit:
    source: str  # "global" | "local"
    raw_score: float
    path: str
    start: int
    end: int
    signature: str = ""
    package: str = ""
    statement: StatementNode | None = None
    rank: int = 0
    norm_score: float = 0.0


@dataclass
class Candidate:
    source: str  # "global" | "local"
    stmt: StatementNode
    method: MethodChunk
    orig_signature: str
    orig_package: str
    raw_score: float
    norm_score: float = 0.0
    rank: int = 0
    source_rank: int = 0
    origin: str = ""

    def redundancy_key(self) -> str:
        return self.stmt.redundancy_key()

    def text(self) -> str:
        return self.stmt.text()


# ---- building and persistence ------------------------------------------------


def build_index(corpus_root: str | Path, k: int = 3) -> CorpusIndex:
    """Indexes every method under a directory by its structural k-grams."""
    root = Path(corpus_root)
    units = load_program(root)
    methods: list[IndexedMethod] = []
    postings: dict[str, list[tuple[int, int]]] = {}
    rows: list[tuple[str, SourceUnit, MethodChunk]] = []
    for unit in units:
        rel = Path(unit.path).relative_to(root).as_posix()
        for chunk in segment(unit)[0]:
            rows.append((rel, unit, chunk))
    rows.sort(key=lambda row: (row[0], row[2].node.start))
    if not rows:
        log.warning("no parseable methods under %s; index is empty", root)
    for mid, (rel, unit, chunk) in enumerate(rows):
        grams = structural_kgrams(chunk, k)
        methods.append(
            IndexedMethod(
                mid, rel, unit.package_path, chunk.signature,
                chunk.node.start, chunk.node.end, len(grams.tokens),
            )
        )
        for gram, count in sorted(Counter(grams.tokens).items()):
            postings.setdefault(gram, []).append((mid, count))
    return CorpusIndex(k, methods, postings, root=str(root.resolve()))


def save_index(index: CorpusIndex, path: str | Path) -> None:
    """Writes the index in a line-oriented format; output is deterministic."""
    lines = [f"{FORMAT_MAGIC} {FORMAT_VERSION}", f"k {index.k}", f"root {index.root}"]
    for m in index.methods:
        lines.append(
            f"M {m.mid} {m.gram_count} {m.start} {m.end} "
            f"{m.package or '-'} {m.signature} {m.path}"
        )
    for gram in sorted(index.postings):
        entries = " ".join(f"{mid}:{count}" for mid, count in sorted(index.postings[gram]))
        lines.append(f"G {gram} {entries}")
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_index(path: str | Path) -> CorpusIndex:
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines or not lines[0].startswith(FORMAT_MAGIC):
        raise ValueError(f"{path}: not an index file")
    version = int(lines[0].split()[1])
    if version != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported index version {version}")
    k = int(lines[1].split()[1])
    root = ""
    body_start = 2
    if len(lines) > 2 and lines[2].startswith("root"):
        root = lines[2][4:].strip()
        body_start = 3
    methods: list[IndexedMethod] = []
    postings: dict[str, list[tuple[int, int]]] = {}
    for line in lines[body_start:]:
        if line.startswith("M "):
            parts = line[2:].split(" ", 6)
            mid, gram_count, start, end = (int(x) for x in parts[:4])
            package = "" if parts[4] == "-" else parts[4]
            methods.append(
                IndexedMethod(mid, parts[6], package, parts[5], start, end, gram_count)
            )
        elif line.startswith("G "):
            gram, _, rest = line[2:].partition(" ")
            entries = []
            for item in rest.split():
                mid_s, _, count_s = item.partition(":")
                entries.append((int(mid_s), int(count_s)))
            postings[gram] = entries
    return CorpusIndex(k, methods, postings, root=root)


# ---- retrieval ----------------------------------------------------------------


def _finish_hits(hits: list[SearchHit], top_n: int) -> list[SearchHit]:
    hits.sort(key=lambda h: (-h.raw_score, h.path, h.start))
    hits = hits[:top_n]
    best = hits[0].raw_score if hits else 0.0
    for i, hit in enumerate(hits, start=1):
        hit.rank = i
        hit.norm_score = hit.raw_score / best if best > 0.0 else 0.0
    return hits


def global_search(
    index: CorpusIndex, method: MethodChunk, top_n: int = 500
) -> list[SearchHit]:
    """Ranks indexed methods by k-gram Dice against a query method.

    Only methods sharing at least one gram appear; ties break on
    (path, start) ascending.
    """
    query = structural_kgrams(method, index.k)
    by_mid = {m.mid: m for m in index.methods}
    counts = Counter(query.tokens)
    overlap: dict[int, int] = {}
    for gram, qcount in counts.items():
        for mid, mcount in index.postings.get(gram, ()):
            overlap[mid] = overlap.get(mid, 0) + min(qcount, mcount)
    qlen = len(query.tokens)
    hits = []
    for mid, m in overlap.items():
        meta = by_mid[mid]
        score = (2.0 * m) / (qlen + meta.gram_count)
        if score > 0.0:
            hits.append(
                SearchHit(
                    "global", score, meta.path, meta.start, meta.end,
                    meta.signature, meta.package,
                )
            )
    return _finish_hits(hits, top_n)


def local_search(
    units: list[SourceUnit], target: StatementNode, top_n: int = 500
) -> list[SearchHit]:
    """Ranks every statement of the local program by LCS1 Dice."""
    query = chunk_tokens(target.unit, target.node, "lcs1")
    hits: list[SearchHit] = []
    for unit in units:
        for stmt in segment(unit)[1]:
            bag = chunk_tokens(unit, stmt.node, "lcs1")
            score = dice_list(query, bag)
            if score > 0.0:
                hits.append(
                    SearchHit(
                        "local", score, unit.path, stmt.node.start, stmt.node.end,
                        stmt.method.signature, unit.package_path, stmt,
                    )
                )
    return _finish_hits(hits, top_n)


def pick_candidate_statements(
    method: MethodChunk, target: StatementNode
) -> list[StatementNode]:
    """Two statements of a retrieved method most similar to the target.

    Similarity is LCS1 Dice; ties prefer the earlier statement.  Methods
    with a single statement yield one entry, empty bodies none.
    """
    from .corpus import statements_of

    target_bag = chunk_tokens(target.unit, target.node, "lcs1")
    scored = []
    for stmt in statements_of(method):
        bag = chunk_tokens(method.unit, stmt.node, "lcs1")
        scored.append((dice_list(target_bag, bag), stmt))
    scored.sort(key=lambda pair: (-pair[0], pair[1].node.start))
    return [stmt for _, stmt in scored[:2]]


def normalize_scores(candidates: list[Candidate]) -> None:
    """Rescales raw scores so each source's best candidate sits at 1.0."""
    best = max((c.raw_score for c in candidates), default=0.0)
    if best > 0.0:
        for c in candidates:
            c.norm_score = c.raw_score / best


def merge_and_filter(
    global_candidates: list[Candidate],
    local_candidates: list[Candidate],
    target: StatementNode,
    limit: int = 200,
) -> list[Candidate]:
    """Normalizes, merges, filters, and caps the candidate list.

    Filters, in order: candidates whose original enclosing method matches
    the target's signature and package (bug-fixed versions of the faulty
    code), redundant candidates (same statement with the same neighbors),
    and candidates textually identical to the target.  Equal normalized
    scores order local before global, then by source rank.
    """
    normalize_scores(global_candidates)
    normalize_scores(local_candidates)
    for rank, cand in enumerate(local_candidates):
        cand.source_rank = rank
    for rank, cand in enumerate(global_candidates):
        cand.source_rank = rank
    merged = sorted(
        local_candidates + global_candidates,
        key=lambda c: (-c.norm_score, 0 if c.source == "local" else 1, c.source_rank),
    )
    target_sig = target.method.signature
    target_pkg = target.unit.package_path
    target_text = compact(target.text())
    seen: set[str] = set()
    out: list[Candidate] = []
    for cand in merged:
        if cand.orig_signature == target_sig and cand.orig_package == target_pkg:
            continue
        key = cand.redundancy_key()
        if key in seen:
            continue
        if compact(cand.text()) == target_text:
            continue
        seen.add(key)
        out.append(cand)
        if len(out) >= limit:
            break
    for i, cand in enumerate(out, start=1):
        cand.rank = i
    return out
