"""Patch generation: textual edits derived from a matched candidate.

Four operator families produce patches for one suspicious statement:
replacement rewrites a mapped target node as its candidate counterpart,
insertion splices the candidate statement's block neighbors before or
after the target, if-guard wraps the target (alone, or with the rest of
its block) in the candidate's enclosing if-condition, and method
replacement swaps in the candidate's whole method body.  Deletion is
deliberately absent.  Patches carry provenance and a total ordering key.
"""

from __future__ import annotations

import difflib
from dataclasses import dataclass

from .corpus import MethodChunk, SourceUnit, StatementNode
from .matching import CodeMapping
from .parser import parse_program
from .tree import Node, STATEMENT_KINDS

KIND_ORDER = {
    "replacement": 0,
    "insertion-before": 1,
    "insertion-after": 2,
    "if-guard-single": 3,
    "if-guard-block": 4,
    "method-replacement": 5,
}


@dataclass
class Patch:
    kind: str
    file: str
    span: tuple[int, int]
    new_text: str
    candidate_id: str
    candidate_rank: int
    pair_score: float

    @property
    def order_key(self) -> tuple:
        return (
            self.candidate_rank,
            KIND_ORDER[self.kind],
            -self.pair_score,
            self.span[0],
            self.span[1],
            self.new_text,
        )

    def apply(self, text: str) -> str:
        start, end = self.span
        return text[:start] + self.new_text + text[end:]


def parent_of(root: Node, node: Node) -> Node | None:
    """Direct parent of a node, located by identity."""
    for n in root.walk():
        for child in n.children:
            if child is node:
                return n
    return None


def _indent_of(unit: SourceUnit, offset: int) -> str:
    line_start = unit.text.rfind("\n", 0, offset) + 1
    prefix = unit.text[line_start:offset]
    return prefix if prefix.strip() == "" else ""


def _following_statements(target: StatementNode) -> list[Node]:
    parent = parent_of(target.method.node, target.node)
    if parent is None:
        return []
    out: list[Node] = []
    seen = False
    for child in parent.children:
        if child is target.node:
            seen = True
            continue
        if seen and child.kind in STATEMENT_KINDS:
            out.append(child)
    return out


def gen_replacement(
    cmap: CodeMapping,
    tgt_unit: SourceUnit,
    cand_unit: SourceUnit,
    candidate_id: str,
    candidate_rank: int,
) -> list[Patch]:
    """One patch per mapped pair whose two texts differ."""
    patches = []
    for pair in cmap.pairs:
        t_text = pair.target.text(tgt_unit.text)
        c_text = pair.candidate.text(cand_unit.text)
        if t_text == c_text:
            continue
        patches.append(
            Patch(
                "replacement",
                tgt_unit.path,
                (pair.target.start, pair.target.end),
                c_text,
                candidate_id,
                candidate_rank,
                pair.score,
            )
        )
    return patches


def gen_insertion(
    target: StatementNode,
    candidate: StatementNode,
    candidate_id: str,
    candidate_rank: int,
    pair_score: float = 0.0,
) -> list[Patch]:
    """The candidate's block neighbors, inserted before and after the target."""
    patches = []
    indent = _indent_of(target.unit, target.node.start)
    if candidate.prev is not None:
        text = candidate.prev.text(candidate.unit.text)
        patches.append(
            Patch(
                "insertion-before",
                target.unit.path,
                (target.node.start, target.node.start),
                f"{text}\n{indent}",
                candidate_id,
                candidate_rank,
                pair_score,
            )
        )
    if candidate.next is not None:
        text = candidate.next.text(candidate.unit.text)
        patches.append(
            Patch(
                "insertion-after",
                target.unit.path,
                (target.node.end, target.node.end),
                f"\n{indent}{text}",
                candidate_id,
                candidate_rank,
                pair_score,
            )
        )
    return patches


def guard_condition(candidate: StatementNode) -> str | None:
    """Condition of the if-statement enclosing the candidate, if any.

    The candidate's parent may be the if-statement itself (unbraced branch)
    or a block directly under it; anything else yields no condition.
    """
    parent = parent_of(candidate.method.node, candidate.node)
    if parent is None:
        return None
    if parent.kind == "block":
        parent = parent_of(candidate.method.node, parent)
    if parent is None or parent.kind != "if_stmt" or not parent.children:
        return None
    return parent.children[0].text(candidate.unit.text)


def gen_if_guard(
    target: StatementNode,
    candidate: StatementNode,
    candidate_id: str,
    candidate_rank: int,
    pair_score: float = 0.0,
) -> list[Patch]:
    """Guards the target with the candidate's enclosing if-condition.

    Emits one patch wrapping the target statement alone and, when the
    target has following statements in its block, one wrapping the target
    together with all of them.
    """
    condition = guard_condition(candidate)
    if condition is None:
        return []
    unit = target.unit
    indent = _indent_of(unit, target.node.start)
    single_body = target.node.text(unit.text)
    patches = [
        Patch(
            "if-guard-single",
            unit.path,
            (target.node.start, target.node.end),
            f"if ({condition}) {{ {single_body} }}",
            candidate_id,
            candidate_rank,
            pair_score,
        )
    ]
    following = _following_statements(target)
    if following:
        end = following[-1].end
        region = unit.text[target.node.start : end]
        patches.append(
            Patch(
                "if-guard-block",
                unit.path,
                (target.node.start, end),
                f"if ({condition}) {{\n{indent}{region}\n{indent}}}",
                candidate_id,
                candidate_rank,
                pair_score,
            )
        )
    return patches


def gen_method_replacement(
    tgt_method: MethodChunk,
    cand_method: MethodChunk,
    candidate_id: str,
    candidate_rank: int,
    pair_score: float = 0.0,
) -> list[Patch]:
    """Replaces the target method's body with the candidate's."""
    if tgt_method.body is None or cand_method.body is None:
        return []
    new_body = cand_method.body.text(cand_method.unit.text)
    old_body = tgt_method.body.text(tgt_method.unit.text)
    if new_body == old_body:
        return []
    return [
        Patch(
            "method-replacement",
            tgt_method.unit.path,
            (tgt_method.body.start, tgt_method.body.end),
            new_body,
            candidate_id,
            candidate_rank,
            pair_score,
        )
    ]


def dedupe_patches(patches: list[Patch]) -> list[Patch]:
    """Drops patches that repeat an earlier (kind, span, text) triple."""
    seen: set[tuple[str, tuple[int, int], str]] = set()
    out = []
    for patch in patches:
        key = (patch.kind, patch.span, patch.new_text)
        if key in seen:
            continue
        seen.add(key)
        out.append(patch)
    return out


def order_patches(patches: list[Patch]) -> list[Patch]:
    """Total, deterministic order: rank, then kind, then score, then place."""
    return sorted(patches, key=lambda p: p.order_key)


def parses_after(unit: SourceUnit, patch: Patch) -> bool:
    """Whether applying the patch leaves the unit as parseable as before."""
    def error_count(tree: Node) -> int:
        return sum(1 for n in tree.walk() if n.kind == "error")

    patched = parse_program(patch.apply(unit.text))
    return error_count(patched) <= error_count(unit.tree)


def patch_diff(unit: SourceUnit, patch: Patch) -> str:
    """Unified diff for one patch, with a provenance trailer."""
    before = unit.text.splitlines(keepends=True)
    after = patch.apply(unit.text).splitlines(keepends=True)
    lines = list(
        difflib.unified_diff(before, after, fromfile=unit.path, tofile=unit.path)
    )
    trailer = (
        f"# candidate: {patch.candidate_id}\n"
        f"# rank: {patch.candidate_rank}\n"
        f"# kind: {patch.kind}\n"
        f"# score: {patch.pair_score:.6f}\n"
    )
    body = "".join(lines)
    if body and not body.endswith("\n"):
        body += "\n"
    return body + trailer
