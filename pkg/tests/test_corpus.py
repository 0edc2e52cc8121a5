"""Source model: segmentation, statement enumeration, name bindings."""

from __future__ import annotations

from pathlib import Path

from conftest import unit_from

from patchloom.corpus import (
    enclosing_statement,
    load_program,
    method_at,
    parse_source,
    resolve_bindings,
    segment,
    statements_of,
    stdlib_table,
    stop_words,
)

SRC = """
public class Counter {
    private int total;

    public void addAll(int[] values) {
        for (int i = 0; i < values.length; i++) {
            total += values[i];
        }
    }

    public int current() {
        return total;
    }
}
"""


def test_segment_methods_in_source_order() -> None:
    unit = unit_from(SRC)
    methods, statements = segment(unit)
    assert [m.name for m in methods] == ["addAll", "current"]
    starts = [s.node.start for s in statements]
    assert starts == sorted(starts)


def test_statements_include_nested() -> None:
    unit = unit_from(SRC)
    _, statements = segment(unit)
    kinds = [s.node.kind for s in statements]
    assert "for_stmt" in kinds
    assert "expr_stmt" in kinds  # the nested body statement
    assert "return_stmt" in kinds


def test_statement_neighbors() -> None:
    unit = unit_from(
        "class A { void m() { int a = 1; int b = 2; int c = 3; } }"
    )
    _, statements = segment(unit)
    a, b, c = statements
    assert a.prev is None and a.next is b.node
    assert b.prev is a.node and b.next is c.node
    assert c.prev is b.node and c.next is None


def test_enclosing_statement_resolves_line(c4_program: Path) -> None:
    unit = parse_source(c4_program / "ChartRenderer.java")
    stmt = enclosing_statement(unit, 10)
    assert stmt is not None
    assert "getAnnotations" in stmt.text()
    assert stmt.kind == "variable-declaration"


def test_enclosing_statement_innermost() -> None:
    unit = unit_from("class A { void m() { while (x) { y = 1; } } }")
    # both statements sit on line 1; the innermost one wins
    stmt = enclosing_statement(unit, 1)
    assert stmt is not None and stmt.kind == "expression-statement"


def test_method_at_offsets() -> None:
    unit = unit_from(SRC)
    methods, _ = segment(unit)
    for method in methods:
        mid = (method.node.start + method.node.end) // 2
        found = method_at(unit, mid)
        assert found is not None and found.name == method.name
    assert method_at(unit, 0) is None


def test_resolve_bindings_kinds() -> None:
    unit = unit_from(SRC)
    methods, _ = segment(unit)
    bindings = resolve_bindings(unit, methods[0], include_class_members=True)
    by_name = {b.name: b for b in bindings}
    assert by_name["values"].kind == "variable"
    assert by_name["i"].kind == "variable"
    assert by_name["total"].kind == "variable"
    assert by_name["addAll"].kind == "method"
    # length resolves through the standard library, not the program
    assert by_name.get("length") is None or by_name["length"].origin != "program"


def test_load_program_walks_tree(tmp_path: Path) -> None:
    (tmp_path / "sub").mkdir()
    (tmp_path / "A.java").write_text("class A {}", encoding="utf-8")
    (tmp_path / "sub" / "B.java").write_text("class B {}", encoding="utf-8")
    (tmp_path / "notes.txt").write_text("not source", encoding="utf-8")
    units = load_program(tmp_path)
    names = sorted(Path(u.path).name for u in units)
    assert names == ["A.java", "B.java"]


def test_stdlib_and_stop_words_available() -> None:
    stdlib = stdlib_table()
    assert "println" in stdlib and "iterator" in stdlib
    stops = stop_words()
    assert "get" in stops and "set" in stops


def test_redundancy_key_same_statement_same_neighbors() -> None:
    unit1 = unit_from("class A { void m() { int a = 1; f(a); g(a); } }")
    unit2 = unit_from("class B { void n() { int a = 1; f(a); g(a); } }")
    s1 = segment(unit1)[1]
    s2 = segment(unit2)[1]
    assert s1[1].redundancy_key() == s2[1].redundancy_key()
    assert s1[0].redundancy_key() != s1[1].redundancy_key()


def test_statements_of_returns_method_statements() -> None:
    unit = unit_from(SRC)
    methods, _ = segment(unit)
    stmts = statements_of(methods[1])
    assert len(stmts) == 1 and stmts[0].node.kind == "return_stmt"
