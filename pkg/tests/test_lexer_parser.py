"""Lexing and parsing basics the rest of the pipeline leans on."""

from __future__ import annotations

from patchloom.lexer import Token, tokenize
from patchloom.parser import parse_program, parse_snippet
from patchloom.tree import Node, compact, kind_sequence

SAMPLE = """
public class Sample {
    private int count;

    public int bump(int by) {
        count += by;
        return count;
    }
}
"""


def test_token_spans_reproduce_source() -> None:
    for token in tokenize(SAMPLE):
        assert SAMPLE[token.start : token.end] == token.text


def test_token_kinds() -> None:
    kinds = {t.text: t.kind for t in tokenize("int x = foo(41, \"s\", 'c');")}
    assert kinds["int"] == "keyword"
    assert kinds["x"] == "identifier"
    assert kinds["foo"] == "identifier"
    assert kinds["41"] == "number"
    assert kinds['"s"'] == "string"
    assert kinds["'c'"] == "char"
    assert kinds["="] == "operator"
    assert kinds[";"] == "punct"


def test_maximal_munch_on_operators() -> None:
    texts = [t.text for t in tokenize("a >= b >>= c > d != e")]
    assert ">=" in texts
    assert ">>=" in texts
    assert "!=" in texts
    # ">=" must not decay into ">" followed by "="
    assert texts.count(">") == 1


def test_comments_and_whitespace_are_skipped() -> None:
    tokens = tokenize("x = 1; // trailing\n/* block\ncomment */ y = 2;")
    assert [t.text for t in tokens] == ["x", "=", "1", ";", "y", "=", "2", ";"]


def test_parse_produces_class_and_method() -> None:
    tree = parse_program(SAMPLE)
    classes = list(tree.find_all("class_decl"))
    assert len(classes) == 1
    assert classes[0].value == "Sample"
    methods = list(tree.find_all("method_decl"))
    assert [m.value for m in methods] == ["bump"]


def test_children_nest_within_parents() -> None:
    tree = parse_program(SAMPLE)
    for node in tree.walk():
        for child in node.children:
            assert node.start <= child.start <= child.end <= node.end


def test_statement_kinds() -> None:
    tree = parse_program(SAMPLE)
    kinds = [n.kind for n in tree.walk() if n.is_statement()]
    assert "expr_stmt" in kinds
    assert "return_stmt" in kinds


def test_error_recovery_keeps_later_members() -> None:
    broken = "public class Broken { int bad( ; public int ok() { return 1; } }"
    tree = parse_program(broken)
    assert any(n.kind == "error" for n in tree.walk())
    assert any(m.value == "ok" for m in tree.find_all("method_decl"))


def test_parse_snippet_expression_and_statement() -> None:
    node, _, offset = parse_snippet("fa*fb>0.0")
    assert any(n.kind == "binary_expr" for n in node.walk())
    node, text, offset = parse_snippet("int x = 0;")
    decls = [n for n in node.walk() if n.kind == "local_var_decl"]
    assert decls and compact(decls[0].text(text)) == "intx=0;"
    assert offset >= 0


def test_kind_sequence_collapses_names_and_literals() -> None:
    a = parse_program("class A { int f() { return x + 1; } }")
    b = parse_program("class B { int g() { return y + 2; } }")
    assert kind_sequence(a) == kind_sequence(b)


def test_control_flow_shapes() -> None:
    src = """
    class C {
        void m(int n) {
            if (n > 0) { n = n - 1; } else { n = 0; }
            while (n < 10) { n++; }
            do { n--; } while (n > 0);
            for (int i = 0; i < n; i++) { n += i; }
            switch (n) { case 0: break; default: n = 1; }
            try { n = n / n; } catch (ArithmeticException e) { n = 0; } finally { n = 2; }
        }
    }
    """
    tree = parse_program(src)
    for kind in ("if_stmt", "while_stmt", "do_stmt", "for_stmt",
                 "switch_stmt", "try_stmt"):
        assert any(tree.find_all(kind)), kind
    assert not any(tree.find_all("error"))
