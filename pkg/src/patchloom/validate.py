"""Patch validation: static screening, then compile-and-test.

A patch first passes a cheap name-resolution screen over the patched
method; survivors are applied to an isolated working copy where the
configured build and test commands decide their fate.  Validation walks
the ordered patch list and stops at the first plausible patch.
"""

from __future__ import annotations

import shutil
import subprocess
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .corpus import (
    MethodChunk,
    SourceUnit,
    enclosing_class,
    method_at,
    stdlib_table,
)
from .patches import Patch
from .tree import Node

STAGES = ("static-rejected", "compile-failed", "tests-failed", "plausible")


@dataclass
class ValidationOutcome:
    patch: Patch
    stage: str
    diagnostics: list[str] = field(default_factory=list)
    wall_seconds: float = 0.0


@dataclass
class ValidationConfig:
    build_cmd: str
    test_cmd: str
    budget_seconds: float = 120 * 60
    test_timeout: float = 600.0
    jobs: int = 1
    keep_work: bool = False
    work_root: str | None = None
    clock: Callable[[], float] = time.monotonic


# ---- static screening ----------------------------------------------------------


def _visibility(unit: SourceUnit, method: MethodChunk) -> list[tuple[str, int, int]]:
    """(name, visible-from, visible-to) for every declaration in the method."""
    spans: list[tuple[str, int, int]] = []
    node = method.node
    for param in node.children:
        if param.kind == "param" and param.value:
            spans.append((param.value, param.end, node.end))

    def enclosing_region(trail: list[Node]) -> Node:
        for anc in reversed(trail):
            if anc.kind in ("block", "for_stmt", "foreach_stmt", "switch_case"):
                return anc
        return node

    def visit(n: Node, trail: list[Node]) -> None:
        if n.kind == "var_declarator" and n.value:
            region = enclosing_region(trail)
            spans.append((n.value, n.end, region.end))
        elif n.kind == "foreach_var" and n.value:
            region = enclosing_region(trail)
            spans.append((n.value, n.end, region.end))
        elif n.kind == "catch_param" and n.value:
            region = trail[-1] if trail else node
            spans.append((n.value, n.end, region.end))
        elif n.kind == "lambda_expr":
            for child in n.children:
                if child.kind == "param" and child.value:
                    spans.append((child.value, child.end, n.end))
        trail.append(n)
        for child in n.children:
            visit(child, trail)
        trail.pop()

    visit(node, [])
    return spans


def _class_member_names(unit: SourceUnit, method: MethodChunk) -> tuple[set[str], set[str]]:
    fields: set[str] = set()
    methods: set[str] = set()
    class_node = enclosing_class(unit.tree, method.node)
    if class_node is not None:
        if class_node.value:
            methods.add(class_node.value)  # constructor-style self reference
        for member in class_node.children:
            if member.kind == "field_decl":
                for decl in member.children:
                    if decl.kind == "var_declarator" and decl.value:
                        fields.add(decl.value)
            elif member.kind in ("method_decl", "constructor_decl") and member.value:
                methods.add(member.value)
    return fields, methods


def static_check(
    unit: SourceUnit,
    method: MethodChunk,
    stdlib: frozenset[str] | None = None,
    extra_names: frozenset[str] = frozenset(),
) -> list[str]:
    """Name-resolution diagnostics for one (patched) method.

    Every simple variable reference must resolve to a preceding local
    declaration, a parameter, a class field, the standard-library table, or
    a supplied extra name (typically the program's class names).  Unqualified
    call names must be class methods or library names.  Qualified member
    accesses are left to the build step, which knows receiver types.
    """
    if stdlib is None:
        stdlib = stdlib_table()
    spans = _visibility(unit, method)
    fields, methods = _class_member_names(unit, method)
    diagnostics: list[str] = []
    flagged: set[tuple[str, int]] = set()

    def var_ok(name: str, offset: int) -> bool:
        if name in fields or name in stdlib or name in extra_names:
            return True
        return any(lo <= offset <= hi for n, lo, hi in spans if n == name)

    def visit(n: Node, parent: Node | None) -> None:
        for child in n.children:
            visit(child, n)
        if n.kind != "identifier" or parent is None:
            return
        name = unit.text[n.start : n.end]
        if parent.kind == "field_access" and parent.children and parent.children[-1] is n:
            receiver = parent.children[0]
            if receiver.kind == "this_expr":
                if name not in fields and (name, n.start) not in flagged:
                    flagged.add((name, n.start))
                    diagnostics.append(f"undeclared field: {name}")
            return
        if parent.kind == "call_expr":
            if len(parent.children) >= 2 and parent.children[-2] is n:
                qualified = len(parent.children) > 2
                if not qualified and name not in methods and name not in stdlib \
                        and name not in extra_names and (name, n.start) not in flagged:
                    flagged.add((name, n.start))
                    diagnostics.append(f"unknown method: {name}")
                return
        if parent.kind in (
            "type_ref", "param", "foreach_var", "catch_param",
            "method_decl", "constructor_decl", "class_decl", "interface_decl",
            "enum_decl", "method_ref", "class_literal", "labeled_stmt",
        ):
            return
        if parent.kind == "var_declarator" and parent.children and parent.children[0] is n:
            return
        if parent.kind == "break_stmt" or parent.kind == "continue_stmt":
            return
        if not var_ok(name, n.start) and (name, n.start) not in flagged:
            flagged.add((name, n.start))
            diagnostics.append(f"undeclared variable: {name}")

    visit(method.node, None)
    return diagnostics


def static_check_patch(
    unit: SourceUnit,
    patch: Patch,
    stdlib: frozenset[str] | None = None,
    extra_names: frozenset[str] = frozenset(),
) -> list[str]:
    """Applies a patch in memory and screens the patched method."""
    patched = SourceUnit.from_text(patch.apply(unit.text), unit.path)
    method = method_at(patched, patch.span[0])
    if method is None:
        return ["patched region is no longer inside a method"]
    return static_check(patched, method, stdlib, extra_names)


# ---- dynamic validation ----------------------------------------------------------


def _run(cmd: str, cwd: Path, timeout: float) -> tuple[int, str, bool]:
    try:
        proc = subprocess.run(
            cmd, shell=True, cwd=str(cwd), capture_output=True, text=True,
            timeout=timeout,
        )
        output = (proc.stdout + proc.stderr).strip()
        return proc.returncode, output[-2000:], False
    except subprocess.TimeoutExpired:
        return 124, f"timed out after {timeout:.0f}s", True


def compile_and_test(
    workdir: str | Path,
    build_cmd: str,
    test_cmd: str,
    timeout: float = 600.0,
) -> tuple[str, list[str]]:
    """Runs the build gate, then the test command, in a working copy.

    Returns (stage, diagnostics): compile-failed when the build exits
    nonzero, tests-failed on test failure or timeout, plausible otherwise.
    """
    cwd = Path(workdir)
    code, output, _ = _run(build_cmd, cwd, timeout)
    if code != 0:
        return "compile-failed", [output] if output else ["build failed"]
    code, output, timed_out = _run(test_cmd, cwd, timeout)
    if timed_out:
        return "tests-failed", [output]
    if code != 0:
        return "tests-failed", [output] if output else [f"test exit code {code}"]
    return "plausible", []


def _materialize(program_root: Path, patch: Patch, work_root: Path) -> Path:
    workdir = Path(tempfile.mkdtemp(prefix="patch-", dir=str(work_root)))
    dest = workdir / "program"
    shutil.copytree(program_root, dest)
    rel = Path(patch.file).resolve().relative_to(program_root.resolve())
    target = dest / rel
    original = target.read_text(encoding="utf-8")
    target.write_text(patch.apply(original), encoding="utf-8")
    return dest


def _validate_one(
    program_root: Path, patch: Patch, config: ValidationConfig, work_root: Path
) -> tuple[str, list[str]]:
    # Commands run at the working-copy root; the patched tree is ./program.
    dest = _materialize(program_root, patch, work_root)
    try:
        return compile_and_test(
            dest.parent, config.build_cmd, config.test_cmd, config.test_timeout
        )
    finally:
        if not config.keep_work:
            shutil.rmtree(dest.parent, ignore_errors=True)


def find_first_plausible(
    program_root: str | Path,
    units_by_path: dict[str, SourceUnit],
    patches: list[Patch],
    config: ValidationConfig,
    stdlib: frozenset[str] | None = None,
    extra_names: frozenset[str] = frozenset(),
) -> tuple[ValidationOutcome | None, list[ValidationOutcome]]:
    """Validates ordered patches until one is plausible or budget runs out.

    Statically rejected patches never spawn a working copy.  With jobs > 1,
    dynamic validations run in windows of that size, but selection respects
    the patch order: the earliest plausible patch wins regardless of finish
    order.  Appends a budget-exhausted marker outcome when time runs out.
    """
    root = Path(program_root)
    outcomes: list[ValidationOutcome] = []
    start = config.clock()
    work_root = Path(config.work_root) if config.work_root else Path(tempfile.gettempdir())
    work_root.mkdir(parents=True, exist_ok=True)
    jobs = max(1, config.jobs)
    ordinal = {id(p): n for n, p in enumerate(patches)}

    def in_patch_order(found: ValidationOutcome | None) -> tuple[
        ValidationOutcome | None, list[ValidationOutcome]
    ]:
        outcomes.sort(key=lambda o: ordinal.get(id(o.patch), len(patches)))
        return found, outcomes

    i = 0
    while i < len(patches):
        if config.clock() - start > config.budget_seconds:
            outcomes.append(
                ValidationOutcome(patches[i], "static-rejected", ["budget exhausted"], 0.0)
            )
            return in_patch_order(None)
        # Screen in patch order until a window of dynamically checkable patches
        # fills up; static rejections never spawn a working copy.
        window: list[Patch] = []
        while i < len(patches) and len(window) < jobs:
            patch = patches[i]
            i += 1
            unit = units_by_path[patch.file]
            t0 = config.clock()
            diagnostics = static_check_patch(unit, patch, stdlib, extra_names)
            if diagnostics:
                outcomes.append(
                    ValidationOutcome(
                        patch, "static-rejected", diagnostics, config.clock() - t0
                    )
                )
            else:
                window.append(patch)
        if not window:
            continue
        t0 = config.clock()
        if jobs == 1 or len(window) == 1:
            results = [_validate_one(root, window[0], config, work_root)]
        else:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                futures = [
                    pool.submit(_validate_one, root, p, config, work_root)
                    for p in window
                ]
                results = [f.result() for f in futures]
        elapsed = config.clock() - t0
        for patch, (stage, diagnostics) in zip(window, results):
            outcome = ValidationOutcome(patch, stage, diagnostics, elapsed / len(window))
            outcomes.append(outcome)
            if stage == "plausible":
                return in_patch_order(outcome)
    return in_patch_order(None)
