from __future__ import annotations

from pathlib import Path

import pytest

from patchloom.corpus import MethodChunk, SourceUnit, parse_source, segment

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def c4_program() -> Path:
    return FIXTURES / "c4" / "program"


@pytest.fixture(scope="session")
def c4_unit(c4_program: Path) -> SourceUnit:
    return parse_source(c4_program / "ChartRenderer.java")


@pytest.fixture(scope="session")
def c4_target_method(c4_unit: SourceUnit) -> MethodChunk:
    methods, _ = segment(c4_unit)
    return next(m for m in methods if m.name == "drawAnnotations")


@pytest.fixture(scope="session")
def c4_donor_method(c4_unit: SourceUnit) -> MethodChunk:
    methods, _ = segment(c4_unit)
    return next(m for m in methods if m.name == "upperBoundOf")


def unit_from(text: str, path: str = "Snippet.java") -> SourceUnit:
    return SourceUnit.from_text(text, path)
