"""Token schemes, list Dice, parameterization, fix ingredients.

The four token listings for the annotation-collection statement and the
upper-bound assignment are pinned verbatim; they anchor every similarity
number downstream (most prominently the 14/23 pair score).
"""

from __future__ import annotations

import pytest

from conftest import unit_from

from patchloom.corpus import resolve_bindings, segment
from patchloom.tokens import (
    SCHEMES,
    chunk_tokens,
    conceptual_tokens,
    dice_list,
    is_token_subsequence,
    make_fix_ingredient,
    parameterize,
    split_words,
    structural_kgrams,
)

TARGET_STMT = "Collection c = r.getAnnotations();"
CAND_STMT = "result = r.getUpperBound();"

TARGET_LCS0 = [
    "Collectionc=r.getAnnotations();",
    "Collection",
    "c=r.getAnnotations()",
    "c",
    "r.getAnnotations()",
    "r",
    "getAnnotations()",
]
TARGET_LCS1 = ["collection", "collect", "c", "r",
               "getannotations", "get", "annotations"]
TARGET_LCS2 = ["collection", "collect", "c", "=", "r", ".",
               "getannotations", "get", "annotations", "(", ")", ";"]
CAND_LCS2 = ["result", "=", "r", ".",
             "getupperbound", "get", "upper", "bound", "(", ")", ";"]


def _stmt_bag(stmt_src: str, scheme: str):
    unit = unit_from(f"class T {{ void m() {{ {stmt_src} }} }}")
    _, statements = segment(unit)
    return chunk_tokens(unit, statements[0].node, scheme)


def test_target_statement_lcs0() -> None:
    assert _stmt_bag(TARGET_STMT, "lcs0").tokens == TARGET_LCS0


def test_target_statement_lcs1() -> None:
    assert _stmt_bag(TARGET_STMT, "lcs1").tokens == TARGET_LCS1


def test_target_statement_lcs2() -> None:
    assert _stmt_bag(TARGET_STMT, "lcs2").tokens == TARGET_LCS2


def test_candidate_statement_lcs2() -> None:
    assert _stmt_bag(CAND_STMT, "lcs2").tokens == CAND_LCS2


def test_statement_pair_dice_is_14_over_23() -> None:
    a = _stmt_bag(TARGET_STMT, "lcs2")
    b = _stmt_bag(CAND_STMT, "lcs2")
    assert dice_list(a, b) == pytest.approx(14 / 23, abs=1e-12)


def test_lexical_scheme_keeps_verbatim_tokens_and_spans() -> None:
    unit = unit_from("class T { void m() { x = y + 1; } }")
    _, statements = segment(unit)
    bag = chunk_tokens(unit, statements[0].node, "lexical")
    assert bag.tokens == ["x", "=", "y", "+", "1", ";"]
    for token, (start, end) in zip(bag.tokens, bag.spans):
        assert unit.text[start:end] == token


def test_dice_rejects_mixed_schemes() -> None:
    a = _stmt_bag(TARGET_STMT, "lcs1")
    b = _stmt_bag(TARGET_STMT, "lcs2")
    with pytest.raises(ValueError):
        dice_list(a, b)


def test_dice_multiset_overlap() -> None:
    # duplicated tokens count once per occurrence, not once per type
    a = _stmt_bag("f(x, x, x);", "lexical")
    b = _stmt_bag("g(x, x);", "lexical")
    # shared: ( , x , x , ) , ; and the comma
    expected = 2 * 6 / (len(a.tokens) + len(b.tokens))
    assert dice_list(a, b) == pytest.approx(expected)


def test_split_words_camel_and_underscore() -> None:
    assert split_words("getUpperBound") == ["get", "Upper", "Bound"]
    assert split_words("MAX_VALUE") == ["MAX", "VALUE"]
    assert split_words("result") == ["result"]


def test_conceptual_tokens_rules() -> None:
    # single word with a distinct stem: word + stem
    assert conceptual_tokens("Collection") == ["collection", "collect"]
    # single word whose stem is itself: word only
    assert conceptual_tokens("result") == ["result"]
    # multi-word: full lowercased name + sub-words, no stems
    assert conceptual_tokens("getAnnotations") == [
        "getannotations", "get", "annotations"
    ]


def test_structural_kgrams_ignore_naming() -> None:
    u1 = unit_from("class A { int f(int a) { return a + 1; } }")
    u2 = unit_from("class B { int g(int z) { return z + 2; } }")
    b1 = structural_kgrams(segment(u1)[0][0])
    b2 = structural_kgrams(segment(u2)[0][0])
    assert b1.tokens == b2.tokens
    assert b1.scheme == "struct_kgram"


def test_structural_kgram_window_size() -> None:
    unit = unit_from("class A { void f() { x = 1; } }")
    bag = structural_kgrams(segment(unit)[0][0], k=3)
    assert all(len(gram.split(",")) == 3 for gram in bag.tokens)


def test_parameterize_replaces_program_identifiers() -> None:
    unit = unit_from("class T { void m(int fa, int fb) { bad = fa * fb > 0.0; } }")
    methods, statements = segment(unit)
    bag = chunk_tokens(unit, statements[0].node, "lexical")
    bindings = resolve_bindings(unit, methods[0], include_class_members=True)
    out = parameterize(bag, bindings)
    assert "$v$" in out.tokens
    assert "fa" not in out.tokens and "fb" not in out.tokens
    # structure tokens survive
    assert "*" in out.tokens and ">" in out.tokens and "0.0" in out.tokens


def test_parameterize_is_idempotent() -> None:
    unit = unit_from("class T { void m(int fa) { fa = fa + tick(); } }")
    methods, statements = segment(unit)
    bag = chunk_tokens(unit, statements[0].node, "lexical")
    bindings = resolve_bindings(unit, methods[0], include_class_members=True)
    once = parameterize(bag, bindings)
    twice = parameterize(once, bindings)
    assert once.tokens == twice.tokens


def test_make_fix_ingredient_expression() -> None:
    fi = make_fix_ingredient("fa*fb>0.0", "M2")
    assert fi.mclass == "M2" and fi.ficlass == "FI2"
    assert fi.bag.tokens == ["fa", "*", "fb", ">", "0.0"]


def test_make_fix_ingredient_statement() -> None:
    fi = make_fix_ingredient("int x = 0;", "M5")
    assert fi.ficlass == "FI5"
    assert fi.bag.tokens == ["int", "x", "=", "0", ";"]


def test_make_fix_ingredient_rejects_garbage() -> None:
    with pytest.raises(ValueError):
        make_fix_ingredient("if (", "M3")


def test_subsequence_semantics() -> None:
    assert is_token_subsequence(["a", "c"], ["a", "b", "c"])
    assert not is_token_subsequence(["c", "a"], ["a", "b", "c"])
    assert is_token_subsequence([], ["a"])
    assert not is_token_subsequence(["a"], [])


def test_schemes_constant() -> None:
    assert SCHEMES == ("lexical", "lcs0", "lcs1", "lcs2", "struct_kgram")
