"""Statement and expression matching between target and candidate.

After translation, each statement or non-trivial expression of the target
chunk is paired with the most LCS2-similar compatible node of the candidate
chunk.  The pairs drive patch generation: replacements rewrite a target
node as its counterpart, and the counterpart's surroundings supply
insertions and guards.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .corpus import SourceUnit
from .tokens import chunk_tokens, dice_list
from .tree import EXPRESSION_KINDS, LOOP_KINDS, Node, STATEMENT_KINDS

_TRIVIAL_EXPRESSIONS = frozenset(
    {
        "identifier",
        "number_literal",
        "boolean_literal",
        "null_literal",
        "char_literal",
        "string_literal",
    }
)


@dataclass
class MatchPair:
    target: Node
    candidate: Node
    score: float


@dataclass
class CodeMapping:
    pairs: list[MatchPair] = field(default_factory=list)

    def for_target(self, node: Node) -> MatchPair | None:
        for pair in self.pairs:
            if pair.target is node:
                return pair
        return None

    def __len__(self) -> int:
        return len(self.pairs)


def collect_ses(node: Node) -> list[Node]:
    """Statements and non-trivial expressions of a chunk, in pre-order.

    Bare identifiers, number constants, and boolean, null, character, and
    string literals carry no structure worth matching and are skipped.
    """
    out: list[Node] = []
    for n in node.walk():
        if n.kind in STATEMENT_KINDS:
            out.append(n)
        elif n.kind in EXPRESSION_KINDS and n.kind not in _TRIVIAL_EXPRESSIONS:
            out.append(n)
    return out


def _unwrap(node: Node) -> Node:
    """An expression-statement stands for the expression it wraps."""
    if node.kind == "expr_stmt" and node.children:
        return node.children[0]
    return node


def compatible(a: Node, b: Node) -> bool:
    """Whether two statements/expressions may be paired.

    Statements pair when both are loops or share a kind; expressions pair
    on equal kinds; a statement pairs with an expression only when the
    statement declares a variable and the expression assigns one.
    Expression-statements are unwrapped first, so a declaration and a plain
    assignment statement count as the declaration/assignment case.
    """
    a, b = _unwrap(a), _unwrap(b)
    a_stmt = a.kind in STATEMENT_KINDS
    b_stmt = b.kind in STATEMENT_KINDS
    if a_stmt and b_stmt:
        if a.kind in LOOP_KINDS and b.kind in LOOP_KINDS:
            return True
        return a.kind == b.kind
    if not a_stmt and not b_stmt:
        return a.kind == b.kind
    stmt, expr = (a, b) if a_stmt else (b, a)
    return stmt.kind == "local_var_decl" and expr.kind == "assign_expr"


def pair_score(
    tgt_unit: SourceUnit, target: Node, cand_unit: SourceUnit, candidate: Node
) -> float:
    """LCS2 Dice over the two nodes' source spans."""
    tbag = chunk_tokens(tgt_unit, target, "lcs2")
    cbag = chunk_tokens(cand_unit, candidate, "lcs2")
    return dice_list(tbag, cbag)


def match_code(
    tgt_unit: SourceUnit,
    tgt_node: Node,
    cand_unit: SourceUnit,
    cand_node: Node,
) -> CodeMapping:
    """Maps each target node to its best compatible candidate node.

    Best means maximal LCS2 Dice, which must be positive; ties keep the
    earlier candidate node in pre-order.  Targets with no positive-score
    compatible counterpart stay unmapped.
    """
    tses = collect_ses(tgt_node)
    cses = collect_ses(cand_node)
    mapping = CodeMapping()
    cand_bags = [chunk_tokens(cand_unit, c, "lcs2") for c in cses]
    for tse in tses:
        tbag = chunk_tokens(tgt_unit, tse, "lcs2")
        best: Node | None = None
        best_score = 0.0
        for cse, cbag in zip(cses, cand_bags):
            if not compatible(tse, cse):
                continue
            score = dice_list(tbag, cbag)
            if score > best_score:
                best, best_score = cse, score
        if best is not None:
            mapping.pairs.append(MatchPair(tse, best, best_score))
    return mapping
