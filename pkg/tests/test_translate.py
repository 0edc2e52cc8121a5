"""Identifier mapping and candidate-method translation."""
from __future__ import annotations

import pytest

from patchloom.corpus import IdentifierBinding, resolve_bindings, segment
from patchloom.translate import (
    IdentifierMap,
    MappedPair,
    build_identifier_map,
    collect_candidate_ids,
    collect_target_ids,
    rename_chunk,
    translate,
    usage_patterns,
)

from conftest import unit_from


CAND_SRC = """
public class Bumper {
    private int count;
    public void bump() {
        count = count + 1;
    }
}
"""

TGT_SRC = """
public class Meter {
    private int tally;
    public void step() {
        tally = tally + 1;
    }
}
"""


def _only_method(unit):
    return segment(unit)[0][0]


def _pairs_by_source(imap: IdentifierMap) -> dict[str, MappedPair]:
    return {p.source.name: p for p in imap.pairs}


# ---- id collection ---------------------------------------------------------------


def test_candidate_ids_are_method_scoped():
    unit = unit_from(CAND_SRC, "Bumper.java")
    ids = {b.name for b in collect_candidate_ids(unit, _only_method(unit))}
    assert "count" in ids
    assert "Bumper" not in ids  # class name never occurs inside the body


def test_target_ids_include_unused_class_members():
    src = """
    public class Holder {
        private int spareField;
        public void noop() {
            int x = 1;
        }
        public int helperMethod() { return 2; }
    }
    """
    unit = unit_from(src, "Holder.java")
    noop = next(m for m in segment(unit)[0] if m.name == "noop")
    names = {b.name for b in collect_target_ids(unit, noop)}
    assert {"spareField", "helperMethod", "x"} <= names


def test_stdlib_names_are_excluded():
    src = """
    public class P {
        public void say(String msg) {
            System.out.println(msg);
        }
    }
    """
    unit = unit_from(src, "P.java")
    names = {b.name for b in collect_candidate_ids(unit, _only_method(unit))}
    assert "println" not in names
    assert "System" not in names
    assert "msg" in names


# ---- mapping phases ---------------------------------------------------------------


def test_same_name_phase_maps_long_identical_names():
    cand = unit_from(
        "public class A { public int go(int total) { return total; } }", "A.java"
    )
    tgt = unit_from(
        "public class B { public int run(int total) { return total + 1; } }", "B.java"
    )
    imap = build_identifier_map(cand, _only_method(cand), tgt, _only_method(tgt))
    pair = _pairs_by_source(imap)["total"]
    assert pair.target.name == "total"
    assert pair.phase == "same-name"


def test_same_name_phase_skips_short_names():
    cand = unit_from("public class A { public int go(int xy) { return xy; } }", "A.java")
    tgt = unit_from("public class B { public int run(int xy) { return xy; } }", "B.java")
    imap = build_identifier_map(cand, _only_method(cand), tgt, _only_method(tgt))
    pair = _pairs_by_source(imap).get("xy")
    assert pair is None or pair.phase != "same-name"


def test_enclosing_class_and_method_phases():
    cand = unit_from(CAND_SRC, "Bumper.java")
    tgt = unit_from(TGT_SRC, "Meter.java")
    imap = build_identifier_map(cand, _only_method(cand), tgt, _only_method(tgt))
    by_source = _pairs_by_source(imap)
    assert by_source["Bumper"].target.name == "Meter"
    assert by_source["Bumper"].phase == "enclosing-class"
    assert by_source["bump"].target.name == "step"
    assert by_source["bump"].phase == "enclosing-method"


def test_constructor_name_is_never_mapped_as_method():
    cand = unit_from(
        "public class Box { private int v; public Box(int v) { this.v = v; } }",
        "Box.java",
    )
    tgt = unit_from(TGT_SRC, "Meter.java")
    ctor = segment(cand)[0][0]
    assert ctor.node.kind == "constructor_decl"
    imap = build_identifier_map(cand, ctor, tgt, _only_method(tgt))
    assert all(p.phase != "enclosing-method" for p in imap.pairs)


def test_usage_context_phase_maps_by_shared_patterns():
    cand = unit_from(CAND_SRC, "Bumper.java")
    tgt = unit_from(TGT_SRC, "Meter.java")
    imap = build_identifier_map(cand, _only_method(cand), tgt, _only_method(tgt))
    pair = _pairs_by_source(imap)["count"]
    assert pair.target.name == "tally"
    assert pair.phase == "usage-context"


def test_usage_patterns_generalize_other_ids():
    unit = unit_from(CAND_SRC, "Bumper.java")
    method = _only_method(unit)
    binding = next(
        b for b in collect_candidate_ids(unit, method) if b.name == "count"
    )
    symbols = {site: "$v$" for site in binding.use_sites}
    patterns = usage_patterns(unit, method, binding, symbols)
    assert "<hole> = $v$ + 1" in patterns


def test_pure_punctuation_patterns_are_rejected():
    src = """
    public class Q {
        private int count;
        public void helper(int x) { }
        public void go() {
            helper(count);
        }
    }
    """
    unit = unit_from(src, "Q.java")
    go = next(m for m in segment(unit)[0] if m.name == "go")
    binding = next(b for b in collect_candidate_ids(unit, go) if b.name == "count")
    symbols = dict.fromkeys(binding.use_sites, "$v$")
    helper = next(b for b in collect_candidate_ids(unit, go) if b.name == "helper")
    for site in helper.use_sites:
        symbols[site] = "$m$"
    assert usage_patterns(unit, go, binding, symbols) == set()


def test_concept_phase_maps_by_shared_subwords():
    cand = unit_from(
        "public class A { public int go(int fetchWidth) { return fetchWidth; } }",
        "A.java",
    )
    tgt = unit_from(
        "public class B { public int run(int frameWidth) { return frameWidth * 2; } }",
        "B.java",
    )
    imap = build_identifier_map(cand, _only_method(cand), tgt, _only_method(tgt))
    pair = _pairs_by_source(imap)["fetchWidth"]
    assert pair.target.name == "frameWidth"
    assert pair.phase == "concept"


def test_stop_words_do_not_create_concept_pairs():
    cand = unit_from(
        "public class A { public int go(int getFoo) { return getFoo; } }", "A.java"
    )
    tgt = unit_from(
        "public class B { public int run(int getBar) { return getBar; } }", "B.java"
    )
    imap = build_identifier_map(cand, _only_method(cand), tgt, _only_method(tgt))
    pair = _pairs_by_source(imap).get("getFoo")
    assert pair is None or pair.target.name != "getBar" or pair.phase != "concept"
    assert "getFoo" not in {
        p.source.name for p in imap.pairs if p.phase == "concept"
    } or imap.as_dict().get("getFoo") != "getBar"


def test_earlier_phases_consume_targets():
    cand = unit_from(CAND_SRC, "Bumper.java")
    tgt = unit_from(TGT_SRC, "Meter.java")
    imap = build_identifier_map(cand, _only_method(cand), tgt, _only_method(tgt))
    targets = [p.target.name for p in imap.pairs]
    assert len(targets) == len(set(targets))
    sources = [p.source.name for p in imap.pairs]
    assert len(sources) == len(set(sources))


# ---- the frozen chart-renderer mapping --------------------------------------------


def test_chart_renderer_donor_maps_onto_faulty_method(
    c4_unit, c4_target_method, c4_donor_method
):
    imap = build_identifier_map(
        c4_unit, c4_donor_method, c4_unit, c4_target_method
    )
    assert imap.as_dict() == {
        "upperBoundOf": "upperBoundOf",
        "Range": "Range",
        "result": "result",
        "ChartRenderer": "ChartRenderer",
        "r": "r",
    }
    phases = {p.source.name: p.phase for p in imap.pairs}
    assert phases == {
        "upperBoundOf": "same-name",
        "Range": "same-name",
        "result": "same-name",
        "ChartRenderer": "enclosing-class",
        "r": "concept",
    }
    assert "getUpperBound" not in imap.as_dict()


def test_chart_renderer_translation_is_identity(
    c4_unit, c4_target_method, c4_donor_method
):
    outcome = translate(c4_unit, c4_donor_method, c4_unit, c4_target_method)
    assert outcome.ok
    assert outcome.unit.text == c4_unit.text


# ---- renaming ----------------------------------------------------------------------


def test_translate_renames_cross_class_donor():
    cand = unit_from(
        """
        public class Scaler {
            public double max(Src s) {
                double best = 0.0;
                if (s != null) {
                    best = s.peak();
                }
                return best;
            }
        }
        """,
        "Scaler.java",
    )
    tgt = unit_from(
        """
        public class Plot {
            public double top(Src s) {
                double best = 1.0;
                return best + s.peak();
            }
        }
        """,
        "Plot.java",
    )
    outcome = translate(cand, _only_method(cand), tgt, _only_method(tgt))
    assert outcome.ok
    text = outcome.unit.text[
        outcome.method.node.start : outcome.method.node.end
    ]
    assert "double best = 0.0;" in text
    assert "best = s.peak();" in text
    assert "top(" in text  # enclosing-method rename applied


def test_rename_without_edits_returns_original_unit(
    c4_unit, c4_target_method, c4_donor_method
):
    imap = build_identifier_map(
        c4_unit, c4_donor_method, c4_unit, c4_target_method
    )
    outcome = rename_chunk(c4_unit, c4_donor_method, imap)
    assert outcome.ok
    assert outcome.unit is c4_unit


def test_rename_rejects_structure_breaking_names():
    unit = unit_from(CAND_SRC, "Bumper.java")
    method = _only_method(unit)
    binding = next(
        b for b in collect_candidate_ids(unit, method) if b.name == "count"
    )
    imap = IdentifierMap()
    imap.add(binding, IdentifierBinding("9bad", "variable", "program", None, []), "concept")
    outcome = rename_chunk(unit, method, imap)
    assert not outcome.ok
    assert outcome.unit is None
    assert outcome.reason


def test_identifier_map_contains_checks():
    a = IdentifierBinding("alpha", "variable", "program", None, [])
    b = IdentifierBinding("beta", "variable", "program", None, [])
    imap = IdentifierMap()
    imap.add(a, b, "same-name")
    assert imap.contains_source(a)
    assert imap.contains_target(b)
    assert not imap.contains_source(b)
    assert len(imap) == 1
