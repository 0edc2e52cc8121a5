"""Candidate-to-target identifier mapping and renaming.

A retrieved candidate method talks about its own variables, types, and
methods.  Before any of its statements can be reused at the fault site, its
program-specific identifiers are mapped onto identifiers accessible from
the target method, then renamed in place.  Mapping proceeds in four phases:
equal long names, enclosing class and method names, matched usage-context
patterns, and shared conceptual tokens.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .corpus import (
    IdentifierBinding,
    MethodChunk,
    SourceUnit,
    enclosing_class,
    method_at,
    resolve_bindings,
    stdlib_table,
    stop_words,
)
from .tokens import PARAM_SYMBOLS, conceptual_tokens
from .tree import EXPRESSION_KINDS, Node, STATEMENT_KINDS, kind_sequence

HOLE = "<hole>"


@dataclass
class MappedPair:
    source: IdentifierBinding
    target: IdentifierBinding
    phase: str  # same-name | enclosing-class | enclosing-method | usage-context | concept


@dataclass
class IdentifierMap:
    pairs: list[MappedPair] = field(default_factory=list)

    def add(self, source: IdentifierBinding, target: IdentifierBinding, phase: str) -> None:
        self.pairs.append(MappedPair(source, target, phase))

    def contains_source(self, binding: IdentifierBinding) -> bool:
        return any(
            p.source.name == binding.name and p.source.kind == binding.kind
            for p in self.pairs
        )

    def contains_target(self, binding: IdentifierBinding) -> bool:
        return any(
            p.target.name == binding.name and p.target.kind == binding.kind
            for p in self.pairs
        )

    def as_dict(self) -> dict[str, str]:
        return {p.source.name: p.target.name for p in self.pairs}

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass
class TranslationOutcome:
    ok: bool
    unit: SourceUnit | None
    method: MethodChunk | None
    imap: IdentifierMap
    reason: str = ""


def collect_candidate_ids(
    unit: SourceUnit, method: MethodChunk, stdlib: frozenset[str] | None = None
) -> list[IdentifierBinding]:
    """Program-specific identifier bindings used inside the candidate method."""
    bindings = resolve_bindings(unit, method, include_class_members=False, stdlib=stdlib)
    return [b for b in bindings if b.origin == "program"]


def collect_target_ids(
    unit: SourceUnit, method: MethodChunk, stdlib: frozenset[str] | None = None
) -> list[IdentifierBinding]:
    """Program-specific identifiers accessible at the target.

    Covers names used in the target method plus the declared fields and
    methods of its class, whether or not the method mentions them.
    """
    bindings = resolve_bindings(unit, method, include_class_members=True, stdlib=stdlib)
    return [b for b in bindings if b.origin == "program"]


def _class_name_binding(
    unit: SourceUnit, method: MethodChunk, ids: list[IdentifierBinding]
) -> IdentifierBinding | None:
    class_node = enclosing_class(unit.tree, method.node)
    if class_node is None or not class_node.value:
        return None
    name = class_node.value
    for binding in ids:
        if binding.name == name and binding.kind == "type":
            return binding
    name_node = next((c for c in class_node.children if c.kind == "identifier"), None)
    decl = (name_node.start, name_node.end) if name_node is not None else None
    return IdentifierBinding(name, "type", "program", decl, [])


def _method_name_binding(
    unit: SourceUnit, method: MethodChunk, ids: list[IdentifierBinding]
) -> IdentifierBinding | None:
    name = method.name
    if not name:
        return None
    for binding in ids:
        if binding.name == name and binding.kind == "method":
            return binding
    name_node = next((c for c in method.node.children if c.kind == "identifier"), None)
    decl = (name_node.start, name_node.end) if name_node is not None else None
    return IdentifierBinding(name, "method", "program", decl, [])


# ---- usage-context patterns ----------------------------------------------------


def _ancestors(method_node: Node, span: tuple[int, int]) -> list[Node]:
    """Ancestors of the identifier occupying span, innermost first."""
    start, end = span
    path: list[Node] = []

    def visit(node: Node, trail: list[Node]) -> bool:
        nonlocal path
        if node.kind == "identifier" and node.start == start and node.end == end:
            path = trail[:-1] if trail and trail[-1] is node else list(trail)
            return True
        for child in node.children:
            if child.start <= start and end <= child.end:
                trail.append(child)
                if visit(child, trail):
                    return True
                trail.pop()
        return False

    visit(method_node, [method_node])
    return list(reversed(path))


def usage_patterns(
    unit: SourceUnit,
    method: MethodChunk,
    binding: IdentifierBinding,
    site_symbols: dict[tuple[int, int], str],
) -> set[str]:
    """Discriminative context patterns for one identifier binding.

    Each occurrence contributes the token sequence of its nearest enclosing
    expression (falling back to the enclosing statement), with the occurrence
    itself as a hole and other program identifiers generalized to their kind
    symbols.  A pattern counts only if it retains at least one operator,
    keyword, literal, or verbatim name; pure punctuation scaffolding (for
    example a hole wrapped in a call's parentheses) matches far too easily
    to tell identifiers apart.
    """
    patterns: set[str] = set()
    for site in binding.use_sites:
        if not (method.node.start <= site[0] and site[1] <= method.node.end):
            continue
        chain = _ancestors(method.node, site)
        context = next((n for n in chain if n.kind in EXPRESSION_KINDS), None)
        if context is None:
            context = next((n for n in chain if n.kind in STATEMENT_KINDS), None)
        if context is None:
            continue
        rendered: list[str] = []
        discriminative = False
        for tok in unit.tokens_in(context.start, context.end):
            if (tok.start, tok.end) == site:
                rendered.append(HOLE)
                continue
            if tok.kind == "identifier":
                symbol = site_symbols.get((tok.start, tok.end))
                if symbol is not None:
                    rendered.append(symbol)
                    continue
                rendered.append(tok.text)
                discriminative = True
                continue
            rendered.append(tok.text)
            if tok.kind in ("keyword", "operator", "number", "string", "char"):
                discriminative = True
        if discriminative and HOLE in rendered:
            patterns.add(" ".join(rendered))
    return patterns


def _site_symbols(ids: list[IdentifierBinding]) -> dict[tuple[int, int], str]:
    symbols: dict[tuple[int, int], str] = {}
    for binding in ids:
        symbol = PARAM_SYMBOLS.get(binding.kind)
        if symbol is None:
            continue
        for site in binding.use_sites:
            symbols[site] = symbol
        if binding.decl_site is not None:
            symbols[binding.decl_site] = symbol
    return symbols


def map_ids_by_contexts(
    cids: list[IdentifierBinding],
    tids: list[IdentifierBinding],
    imap: IdentifierMap,
    cand: tuple[SourceUnit, MethodChunk],
    target: tuple[SourceUnit, MethodChunk],
) -> None:
    """Maps identifiers whose occurrences share a usage-context pattern.

    Among same-kind, still-unmapped pairs, the target identifier sharing
    the most patterns wins; at least one shared pattern is required.
    """
    cand_unit, cand_method = cand
    tgt_unit, tgt_method = target
    cand_symbols = _site_symbols(cids)
    tgt_symbols = _site_symbols(tids)
    tgt_patterns = [
        usage_patterns(tgt_unit, tgt_method, tid, tgt_symbols) for tid in tids
    ]
    for cid in cids:
        if imap.contains_source(cid):
            continue
        cpat = usage_patterns(cand_unit, cand_method, cid, cand_symbols)
        if not cpat:
            continue
        best: IdentifierBinding | None = None
        best_shared = 0
        for tid, tpat in zip(tids, tgt_patterns):
            if tid.kind != cid.kind or imap.contains_target(tid):
                continue
            shared = len(cpat & tpat)
            if shared > best_shared:
                best, best_shared = tid, shared
        if best is not None:
            imap.add(cid, best, "usage-context")


# ---- conceptual-token phase -----------------------------------------------------


def _concept_bag(name: str, stops: frozenset[str]) -> list[str]:
    return [t for t in conceptual_tokens(name) if t not in stops]


def _dice(a: list[str], b: list[str]) -> float:
    if not a and not b:
        return 0.0
    ca, cb = Counter(a), Counter(b)
    overlap = sum(min(ca[t], cb[t]) for t in ca)
    return (2.0 * overlap) / (len(a) + len(b))


def map_ids_by_concepts(
    cids: list[IdentifierBinding],
    tids: list[IdentifierBinding],
    imap: IdentifierMap,
    stops: frozenset[str],
) -> None:
    """Maps remaining identifiers by shared conceptual tokens.

    Stop words do not count toward the overlap, so identifiers related only
    through words like "get" or "set" stay unmapped.
    """
    for cid in cids:
        if imap.contains_source(cid):
            continue
        cbag = _concept_bag(cid.name, stops)
        best: IdentifierBinding | None = None
        best_score = 0.0
        for tid in tids:
            if tid.kind != cid.kind or imap.contains_target(tid):
                continue
            score = _dice(cbag, _concept_bag(tid.name, stops))
            if score > best_score:
                best, best_score = tid, score
        if best is not None:
            imap.add(cid, best, "concept")


# ---- the full mapping algorithm --------------------------------------------------


def build_identifier_map(
    cand_unit: SourceUnit,
    cand_method: MethodChunk,
    tgt_unit: SourceUnit,
    tgt_method: MethodChunk,
    stdlib: frozenset[str] | None = None,
    stops: frozenset[str] | None = None,
) -> IdentifierMap:
    """Maps the candidate method's program identifiers onto target ones.

    Phases, in order: identical names longer than two characters; the
    enclosing class and (non-constructor) method names; matched usage
    contexts; shared conceptual tokens.  Earlier phases win, and a target
    identifier consumed by the class/method, context, or concept phase is
    not reused.
    """
    if stdlib is None:
        stdlib = stdlib_table()
    if stops is None:
        stops = stop_words()
    cids = collect_candidate_ids(cand_unit, cand_method, stdlib)
    tids = collect_target_ids(tgt_unit, tgt_method, stdlib)
    imap = IdentifierMap()

    for cid in cids:
        if len(cid.name) <= 2:
            continue
        tid = next((t for t in tids if t.name == cid.name and t.kind == cid.kind), None)
        if tid is not None:
            imap.add(cid, tid, "same-name")

    ccid = _class_name_binding(cand_unit, cand_method, cids)
    tcid = _class_name_binding(tgt_unit, tgt_method, tids)
    if ccid is not None and tcid is not None:
        if not imap.contains_source(ccid) and not imap.contains_target(tcid):
            imap.add(ccid, tcid, "enclosing-class")
    cmid = _method_name_binding(cand_unit, cand_method, cids)
    tmid = _method_name_binding(tgt_unit, tgt_method, tids)
    if cmid is not None and tmid is not None:
        is_ctor = cand_method.node.kind == "constructor_decl"
        if not is_ctor and not imap.contains_source(cmid) and not imap.contains_target(tmid):
            imap.add(cmid, tmid, "enclosing-method")

    map_ids_by_contexts(cids, tids, imap, (cand_unit, cand_method), (tgt_unit, tgt_method))
    map_ids_by_concepts(cids, tids, imap, stops)
    return imap


# ---- renaming --------------------------------------------------------------------


def rename_chunk(
    cand_unit: SourceUnit, cand_method: MethodChunk, imap: IdentifierMap
) -> TranslationOutcome:
    """Applies the mapping's renames inside the candidate method's span.

    The rewritten unit is re-parsed; the translation is rejected if the
    renamed method no longer parses to the same structure, which protects
    later stages from renames that collide with keywords or literals.
    """
    edits: list[tuple[int, int, str]] = []
    span_lo, span_hi = cand_method.node.start, cand_method.node.end
    for pair in imap.pairs:
        if pair.source.name == pair.target.name:
            continue
        sites = list(pair.source.use_sites)
        if pair.source.decl_site is not None and pair.source.decl_site not in sites:
            sites.append(pair.source.decl_site)
        for start, end in sites:
            if span_lo <= start and end <= span_hi:
                edits.append((start, end, pair.target.name))
    if not edits:
        return TranslationOutcome(True, cand_unit, cand_method, imap)
    edits.sort(reverse=True)
    text = cand_unit.text
    for start, end, replacement in edits:
        text = text[:start] + replacement + text[end:]
    new_unit = SourceUnit.from_text(text, cand_unit.path)
    new_method = method_at(new_unit, span_lo)
    if new_method is None or new_method.node.start != span_lo:
        return TranslationOutcome(
            False, None, None, imap, "renamed method no longer parses in place"
        )
    if kind_sequence(new_method.node) != kind_sequence(cand_method.node):
        return TranslationOutcome(
            False, None, None, imap, "renaming changed the method's structure"
        )
    return TranslationOutcome(True, new_unit, new_method, imap)


def translate(
    cand_unit: SourceUnit,
    cand_method: MethodChunk,
    tgt_unit: SourceUnit,
    tgt_method: MethodChunk,
    stdlib: frozenset[str] | None = None,
    stops: frozenset[str] | None = None,
) -> TranslationOutcome:
    """Builds the identifier mapping and renames the candidate method."""
    imap = build_identifier_map(
        cand_unit, cand_method, tgt_unit, tgt_method, stdlib, stops
    )
    return rename_chunk(cand_unit, cand_method, imap)
