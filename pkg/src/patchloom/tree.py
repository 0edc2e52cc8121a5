"""Parse tree node type and traversal helpers.

Nodes are deliberately uniform: a kind string, a character span into the
source text, ordered children, and an optional value (the operator symbol
for operator nodes, nothing otherwise).  Identifier text is recovered by
slicing the source with the node span, which keeps nodes cheap and makes
span bookkeeping the single source of truth.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

# Statement-level node kinds.  Block nodes are structural only: statement
# enumeration skips them and recurses into their children.
STATEMENT_KINDS = frozenset(
    {
        "if_stmt",
        "while_stmt",
        "do_stmt",
        "for_stmt",
        "foreach_stmt",
        "return_stmt",
        "throw_stmt",
        "try_stmt",
        "switch_stmt",
        "break_stmt",
        "continue_stmt",
        "sync_stmt",
        "assert_stmt",
        "local_var_decl",
        "expr_stmt",
        "empty_stmt",
        "labeled_stmt",
    }
)

LOOP_KINDS = frozenset({"while_stmt", "do_stmt", "for_stmt", "foreach_stmt"})

EXPRESSION_KINDS = frozenset(
    {
        "assign_expr",
        "ternary_expr",
        "binary_expr",
        "instanceof_expr",
        "unary_expr",
        "postfix_expr",
        "cast_expr",
        "call_expr",
        "new_expr",
        "array_new_expr",
        "array_init",
        "field_access",
        "array_access",
        "identifier",
        "this_expr",
        "super_expr",
        "paren_expr",
        "lambda_expr",
        "method_ref",
        "class_literal",
        "number_literal",
        "string_literal",
        "char_literal",
        "boolean_literal",
        "null_literal",
    }
)

LITERAL_KINDS = frozenset(
    {"number_literal", "string_literal", "char_literal", "boolean_literal", "null_literal"}
)


@dataclass
class Node:
    kind: str
    start: int
    end: int
    children: list["Node"] = field(default_factory=list)
    value: str | None = None

    def text(self, source: str) -> str:
        return source[self.start : self.end]

    def walk(self) -> Iterator["Node"]:
        """Pre-order traversal including this node."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def find_all(self, kind: str) -> Iterator["Node"]:
        return (n for n in self.walk() if n.kind == kind)

    def is_statement(self) -> bool:
        return self.kind in STATEMENT_KINDS

    def is_expression(self) -> bool:
        return self.kind in EXPRESSION_KINDS


def kind_sequence(node: Node) -> list[str]:
    """Pre-order node-kind names with identifiers and literals collapsed.

    Identifier nodes become "ID" and literal nodes become "LIT" so that the
    sequence captures shape, not naming.
    """
    out: list[str] = []
    for n in node.walk():
        if n.kind == "identifier":
            out.append("ID")
        elif n.kind in LITERAL_KINDS:
            out.append("LIT")
        else:
            out.append(n.kind)
    return out


def compact(text: str) -> str:
    """Removes every whitespace character; used for texts compared by shape."""
    return "".join(text.split())
