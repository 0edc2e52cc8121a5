"""Source model: parsed units, method chunks, statements, and bindings.

A SourceUnit is one parsed file.  Methods and statements are lightweight
views over its tree; identifier bindings aggregate every occurrence of a
name within a scope together with its syntactic kind (variable, type, or
method) and its origin (program-specific or standard-library).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .lexer import LineIndex, Token, tokenize
from .parser import parse_program
from .tree import LOOP_KINDS, Node, STATEMENT_KINDS, compact

_CATEGORY_BY_KIND = {
    "if_stmt": "if",
    "while_stmt": "loop",
    "do_stmt": "loop",
    "for_stmt": "loop",
    "foreach_stmt": "loop",
    "return_stmt": "return",
    "local_var_decl": "variable-declaration",
    "expr_stmt": "expression-statement",
    "switch_stmt": "switch-case",
    "throw_stmt": "throw",
    "try_stmt": "try",
    "block": "block",
}

_DECL_KINDS = frozenset({"method_decl", "constructor_decl", "class_decl", "interface_decl", "enum_decl"})


@dataclass
class SourceUnit:
    path: str
    text: str
    tree: Node
    tokens: list[Token]
    lines: LineIndex
    package_path: str

    @classmethod
    def from_text(cls, text: str, path: str = "<memory>") -> "SourceUnit":
        tree = parse_program(text)
        package = ""
        for node in tree.children:
            if node.kind == "package_decl":
                package = compact(node.text(text))[len("package") : -1]
                break
        return cls(path, text, tree, tokenize(text), LineIndex(text), package)

    @classmethod
    def from_file(cls, path: str | Path) -> "SourceUnit":
        p = Path(path)
        return cls.from_text(p.read_text(encoding="utf-8", errors="replace"), str(p))

    def tokens_in(self, start: int, end: int) -> list[Token]:
        return [t for t in self.tokens if t.start >= start and t.end <= end]


@dataclass
class MethodChunk:
    unit: SourceUnit
    node: Node
    class_name: str
    name: str
    signature: str
    body: Node | None

    @property
    def span(self) -> tuple[int, int]:
        return (self.node.start, self.node.end)

    def text(self) -> str:
        return self.node.text(self.unit.text)


@dataclass
class StatementNode:
    unit: SourceUnit
    node: Node
    method: MethodChunk
    prev: Node | None = None
    next: Node | None = None

    @property
    def kind(self) -> str:
        return _CATEGORY_BY_KIND.get(self.node.kind, "other")

    @property
    def span(self) -> tuple[int, int]:
        return (self.node.start, self.node.end)

    def text(self) -> str:
        return self.node.text(self.unit.text)

    def redundancy_key(self) -> str:
        """Whitespace-compacted (previous, this, next) statement texts."""
        parts = []
        for node in (self.prev, self.node, self.next):
            parts.append(compact(node.text(self.unit.text)) if node is not None else "")
        return "\x1f".join(parts)


@dataclass
class IdentifierBinding:
    name: str
    kind: str  # variable | type | method
    origin: str  # program | stdlib
    decl_site: tuple[int, int] | None
    use_sites: list[tuple[int, int]] = field(default_factory=list)

    def first_site(self) -> tuple[int, int]:
        sites = list(self.use_sites)
        if self.decl_site is not None:
            sites.append(self.decl_site)
        return min(sites)


def parse_source(path: str | Path) -> SourceUnit:
    """Parses one file into a SourceUnit; never raises on bad syntax."""
    return SourceUnit.from_file(path)


def load_program(root: str | Path) -> list[SourceUnit]:
    """Parses every .java file under a directory, in sorted path order."""
    rootp = Path(root)
    units = []
    for path in sorted(rootp.rglob("*.java")):
        if path.is_file():
            units.append(parse_source(path))
    return units


def segment(unit: SourceUnit) -> tuple[list[MethodChunk], list[StatementNode]]:
    """Enumerates method chunks and their statements, in source order.

    Only methods and constructors with bodies count.  Statements are listed
    pre-order, nested statements included; block nodes are structural and
    are skipped.  Nested type or method declarations end the enclosing
    method's statement region, so nothing is listed twice.
    """
    methods: list[MethodChunk] = []
    for node, class_name in _methods_with_classes(unit.tree):
        body = next((c for c in node.children if c.kind == "block"), None)
        if body is None:
            continue
        params = [c for c in node.children if c.kind == "param"]
        param_types = []
        for p in params:
            tref = p.children[0] if p.children else None
            param_types.append(compact(tref.text(unit.text)) if tref is not None else "?")
        signature = f"{node.value}/{len(params)}({','.join(param_types)})"
        methods.append(MethodChunk(unit, node, class_name, node.value or "", signature, body))
    statements: list[StatementNode] = []
    for method in methods:
        statements.extend(statements_of(method))
    return methods, statements


def _methods_with_classes(tree: Node) -> list[tuple[Node, str]]:
    found: list[tuple[Node, str]] = []

    def visit(node: Node, class_name: str) -> None:
        next_class = class_name
        if node.kind in ("class_decl", "interface_decl", "enum_decl") and node.value:
            next_class = node.value
        if node.kind in ("method_decl", "constructor_decl"):
            found.append((node, next_class))
        for child in node.children:
            visit(child, next_class)

    visit(tree, "")
    return found


def statements_of(method: MethodChunk) -> list[StatementNode]:
    """Pre-order statements of one method, stopping at nested declarations."""
    if method.body is None:
        return []
    out: list[StatementNode] = []

    def visit(node: Node) -> None:
        siblings = [c for c in node.children if c.kind in STATEMENT_KINDS]
        for child in node.children:
            if child.kind in _DECL_KINDS:
                continue
            if child.kind in ("for_init", "for_update"):
                # Loop headers hold declaration and update fragments, not
                # standalone statements.
                continue
            if child.kind in STATEMENT_KINDS:
                idx = siblings.index(child)
                prev = siblings[idx - 1] if idx > 0 else None
                nxt = siblings[idx + 1] if idx + 1 < len(siblings) else None
                out.append(StatementNode(method.unit, child, method, prev, nxt))
            visit(child)

    visit(method.body)
    return out


def enclosing_statement(unit: SourceUnit, line: int) -> StatementNode | None:
    """Innermost statement whose line range covers a 1-based line."""
    methods, statements = segment(unit)
    best: StatementNode | None = None
    for stmt in statements:
        first = unit.lines.line_of(stmt.node.start)
        last = unit.lines.line_of(max(stmt.node.end - 1, stmt.node.start))
        if first <= line <= last:
            if best is None or stmt.node.start >= best.node.start:
                best = stmt
    return best


def method_at(unit: SourceUnit, offset: int) -> MethodChunk | None:
    """Innermost method chunk whose span contains a character offset."""
    methods, _ = segment(unit)
    best: MethodChunk | None = None
    for m in methods:
        if m.node.start <= offset < m.node.end:
            if best is None or m.node.start >= best.node.start:
                best = m
    return best


# ---- identifier bindings ---------------------------------------------------


def resolve_bindings(
    unit: SourceUnit,
    method: MethodChunk,
    include_class_members: bool = False,
    stdlib: frozenset[str] | None = None,
) -> list[IdentifierBinding]:
    """Aggregates identifier occurrences in a method into bindings.

    Each binding carries every occurrence span (declaration included), its
    syntactic kind, and its origin.  A name declared in scope is always
    program-specific; otherwise membership in the standard-library symbol
    table decides.  With include_class_members, declared fields and methods
    of the enclosing class join the scope even when unused in the method.
    """
    if stdlib is None:
        stdlib = stdlib_table()
    table: dict[tuple[str, str], IdentifierBinding] = {}

    def record(name: str, kind: str, span: tuple[int, int], is_decl: bool) -> None:
        key = (name, kind)
        binding = table.get(key)
        if binding is None:
            binding = IdentifierBinding(name, kind, "program", None, [])
            table[key] = binding
        if is_decl and binding.decl_site is None:
            binding.decl_site = span
        binding.use_sites.append(span)

    for node, parent in _walk_with_parents(method.node):
        if node.kind != "identifier" or parent is None:
            continue
        classified = _classify_identifier(node, parent)
        if classified is None:
            continue
        kind, is_decl = classified
        record(node.text(unit.text), kind, (node.start, node.end), is_decl)

    if include_class_members:
        class_node = enclosing_class(unit.tree, method.node)
        if class_node is not None:
            for member in class_node.children:
                if member.kind == "field_decl":
                    for decl in member.children:
                        if decl.kind == "var_declarator" and decl.children:
                            name_node = decl.children[0]
                            record(
                                name_node.text(unit.text), "variable",
                                (name_node.start, name_node.end), True,
                            )
                elif member.kind in ("method_decl", "constructor_decl") and member.value:
                    name_node = next(
                        (c for c in member.children if c.kind == "identifier"), None
                    )
                    if name_node is not None:
                        record(
                            member.value, "method",
                            (name_node.start, name_node.end), True,
                        )

    bindings = list(table.values())
    for binding in bindings:
        binding.use_sites.sort()
        if binding.decl_site is not None:
            binding.origin = "program"
        elif binding.name in stdlib:
            binding.origin = "stdlib"
        else:
            binding.origin = "program"
    bindings.sort(key=lambda b: b.first_site())
    return bindings


def _walk_with_parents(root: Node):
    stack: list[tuple[Node, Node | None]] = [(root, None)]
    while stack:
        node, parent = stack.pop()
        yield node, parent
        for child in reversed(node.children):
            stack.append((child, node))


def _classify_identifier(node: Node, parent: Node) -> tuple[str, bool] | None:
    """Returns (kind, is_declaration) for an identifier occurrence.

    Labels are skipped entirely: they are control-flow markers, not names
    worth mapping or parameterizing.
    """
    kind = parent.kind
    children = parent.children
    if kind == "type_ref":
        return ("type", False)
    if kind == "call_expr" and len(children) >= 2 and node is children[-2]:
        return ("method", False)
    if kind == "method_ref" and node is children[-1]:
        return ("method", False)
    if kind in ("method_decl", "constructor_decl"):
        return ("method", True)
    if kind in ("var_declarator", "param", "foreach_var", "catch_param"):
        return ("variable", node is children[0] or kind != "var_declarator")
    if kind in ("class_decl", "interface_decl", "enum_decl"):
        return ("type", True)
    if kind == "enum_const":
        return ("variable", True)
    if kind == "class_literal":
        return ("type", False)
    if kind == "lambda_expr" and node is not children[-1]:
        return ("variable", True)
    if kind in ("labeled_stmt", "break_stmt", "continue_stmt"):
        return None
    return ("variable", False)


def enclosing_class(tree: Node, method_node: Node) -> Node | None:
    best: Node | None = None

    def visit(node: Node, current: Node | None) -> None:
        nonlocal best
        nxt = node if node.kind in ("class_decl", "interface_decl", "enum_decl") else current
        if node is method_node:
            best = nxt
            return
        for child in node.children:
            visit(child, nxt)

    visit(tree, None)
    return best


# ---- bundled symbol tables ---------------------------------------------------


def _load_words(filename: str, override: str | Path | None) -> frozenset[str]:
    if override is not None:
        text = Path(override).read_text(encoding="utf-8")
    else:
        text = resources.files("patchloom.data").joinpath(filename).read_text(encoding="utf-8")
    words = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line)
    return frozenset(words)


@lru_cache(maxsize=4)
def stdlib_table(override: str | None = None) -> frozenset[str]:
    """Simple names treated as standard-library symbols."""
    return _load_words("stdlib_symbols.txt", override)


@lru_cache(maxsize=4)
def stop_words(override: str | None = None) -> frozenset[str]:
    """Conceptual tokens that never count as evidence on their own."""
    return _load_words("stop_words.txt", override)
