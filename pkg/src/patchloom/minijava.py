"""A desk-scale Java toolchain used as the build and test commands.

`check_program` plays the compiler role: it reports syntax errors,
duplicate classes, unresolved names, missing members on known receiver
types, and return-type mismatches.  `run_program` is a tree-walking
interpreter with Java-flavored semantics: truncating integer division,
string concatenation, null pointer and array bounds exceptions, and
System.exit.  Both operate on a directory of .java files, which keeps
validation working copies self-contained.

The surface is deliberately small: single-file class hierarchies without
inheritance-based dispatch, a handful of library types (String,
ArrayList, StringBuilder, Iterator, Math, wrapper classes), and the
standard exception families.  Integer overflow is not emulated.
"""

from __future__ import annotations

import math
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, TextIO

from .corpus import SourceUnit, MethodChunk, load_program as load_units, stdlib_table
from .tree import Node, STATEMENT_KINDS
from .validate import static_check

# ---- program model ----------------------------------------------------------


@dataclass
class JavaMethod:
    name: str
    params: list[tuple[str, str]]  # (type, name)
    return_type: str | None  # None for constructors
    body: Node | None
    is_static: bool
    node: Node


@dataclass
class JavaField:
    name: str
    type: str
    init: Node | None
    is_static: bool


@dataclass
class JavaClass:
    name: str
    unit: SourceUnit
    node: Node
    supers: list[str] = field(default_factory=list)
    fields: list[JavaField] = field(default_factory=list)
    methods: dict[str, list[JavaMethod]] = field(default_factory=dict)
    ctors: list[JavaMethod] = field(default_factory=list)

    def field_map(self) -> dict[str, JavaField]:
        return {f.name: f for f in self.fields}


@dataclass
class JavaProgram:
    classes: dict[str, JavaClass]
    units: list[SourceUnit]
    diagnostics: list[str]


def type_name(text: str) -> str:
    """Normalizes a declared type: drops generics and qualifiers, keeps []."""
    t = re.sub(r"<.*>", "", text).strip()
    arr = ""
    while t.endswith("[]"):
        arr += "[]"
        t = t[:-2].strip()
    t = t.split(".")[-1].strip()
    return t + arr


def _has_static(unit: SourceUnit, node: Node) -> bool:
    limit = node.children[0].start if node.children else node.end
    for child in node.children:
        if child.kind not in ("annotation",):
            limit = child.start
            break
    return re.search(r"\bstatic\b", unit.text[node.start : limit]) is not None


def _method_info(unit: SourceUnit, node: Node) -> JavaMethod:
    params: list[tuple[str, str]] = []
    return_type: str | None = None
    body: Node | None = None
    for child in node.children:
        if child.kind == "param" and child.value:
            tref = next((c for c in child.children if c.kind == "type_ref"), None)
            ptype = type_name(unit.text[tref.start : tref.end]) if tref else "?"
            params.append((ptype, child.value))
        elif child.kind == "type_ref" and return_type is None:
            return_type = type_name(unit.text[child.start : child.end])
        elif child.kind == "block":
            body = child
    if node.kind == "constructor_decl":
        return_type = None
    return JavaMethod(
        node.value or "?", params, return_type, body, _has_static(unit, node), node
    )


def _line_of(unit: SourceUnit, offset: int) -> int:
    return unit.text.count("\n", 0, offset) + 1


def load_java_program(root: str | Path) -> JavaProgram:
    units = load_units(root)
    classes: dict[str, JavaClass] = {}
    diagnostics: list[str] = []
    for unit in units:
        for err in unit.tree.find_all("error"):
            diagnostics.append(
                f"{unit.path}:{_line_of(unit, err.start)}: syntax error near "
                f"{unit.text[err.start:err.end][:30]!r}"
            )
        for decl in unit.tree.find_all("class_decl"):
            name = decl.value or "?"
            if name in classes:
                diagnostics.append(
                    f"{unit.path}:{_line_of(unit, decl.start)}: duplicate class {name}"
                )
                continue
            cls = JavaClass(name, unit, decl)
            saw_member = False
            for member in decl.children:
                if member.kind in STATEMENT_KINDS or member.kind in (
                    "method_decl", "constructor_decl", "field_decl",
                    "class_decl", "interface_decl", "enum_decl", "initializer_block",
                ):
                    saw_member = True
                if member.kind == "type_ref" and not saw_member:
                    cls.supers.append(type_name(unit.text[member.start : member.end]))
                elif member.kind == "field_decl":
                    is_static = _has_static(unit, member)
                    tref = next(
                        (c for c in member.children if c.kind == "type_ref"), None
                    )
                    ftype = type_name(unit.text[tref.start : tref.end]) if tref else "?"
                    for vd in member.children:
                        if vd.kind == "var_declarator" and vd.value:
                            init = vd.children[1] if len(vd.children) > 1 else None
                            cls.fields.append(JavaField(vd.value, ftype, init, is_static))
                elif member.kind == "method_decl":
                    info = _method_info(unit, member)
                    cls.methods.setdefault(info.name, []).append(info)
                elif member.kind == "constructor_decl":
                    cls.ctors.append(_method_info(unit, member))
            classes[name] = cls
    return JavaProgram(classes, units, diagnostics)


# ---- library surface ----------------------------------------------------------

OBJECT_METHODS = {"toString": "String", "equals": "boolean", "hashCode": "int"}

_LIST_METHODS = {
    "add": "boolean", "get": "Object", "set": "Object", "remove": "Object",
    "size": "int", "isEmpty": "boolean", "contains": "boolean", "clear": "void",
    "iterator": "Iterator", "indexOf": "int", "addAll": "boolean",
    "toString": "String",
}

_EXCEPTION_METHODS = {
    "getMessage": "String", "toString": "String", "printStackTrace": "void",
}

BUILTIN_METHODS: dict[str, dict[str, str]] = {
    "String": {
        "length": "int", "charAt": "char", "substring": "String",
        "indexOf": "int", "lastIndexOf": "int", "contains": "boolean",
        "equals": "boolean", "equalsIgnoreCase": "boolean", "isEmpty": "boolean",
        "startsWith": "boolean", "endsWith": "boolean", "toUpperCase": "String",
        "toLowerCase": "String", "trim": "String", "concat": "String",
        "replace": "String", "split": "String[]", "compareTo": "int",
        "toCharArray": "char[]", "hashCode": "int", "toString": "String",
    },
    "StringBuilder": {
        "append": "StringBuilder", "toString": "String", "length": "int",
        "insert": "StringBuilder", "reverse": "StringBuilder", "charAt": "char",
        "deleteCharAt": "StringBuilder", "setLength": "void",
    },
    "ArrayList": _LIST_METHODS,
    "LinkedList": _LIST_METHODS,
    "List": _LIST_METHODS,
    "Collection": _LIST_METHODS,
    "Iterable": {"iterator": "Iterator"},
    "Iterator": {"hasNext": "boolean", "next": "Object", "remove": "void"},
    "PrintStream": {"println": "void", "print": "void", "flush": "void"},
    "Integer": {
        "intValue": "int", "doubleValue": "double", "compareTo": "int",
        "toString": "String", "equals": "boolean",
    },
    "Double": {
        "doubleValue": "double", "intValue": "int", "isNaN": "boolean",
        "compareTo": "int", "toString": "String", "equals": "boolean",
    },
    "Boolean": {"booleanValue": "boolean", "toString": "String"},
    "Object": dict(OBJECT_METHODS),
}

BUILTIN_STATICS: dict[str, dict[str, str]] = {
    "Math": {
        "abs": "?", "max": "?", "min": "?", "pow": "double", "sqrt": "double",
        "floor": "double", "ceil": "double", "round": "long", "random": "double",
        "exp": "double", "log": "double", "signum": "double",
    },
    "Integer": {"parseInt": "int", "valueOf": "Integer", "toString": "String"},
    "Long": {"parseLong": "long", "valueOf": "Long", "toString": "String"},
    "Double": {
        "parseDouble": "double", "valueOf": "Double", "toString": "String",
        "isNaN": "boolean", "isInfinite": "boolean", "compare": "int",
    },
    "Boolean": {"parseBoolean": "boolean", "valueOf": "Boolean"},
    "String": {"valueOf": "String", "format": "String", "join": "String"},
    "System": {"exit": "void", "currentTimeMillis": "long", "arraycopy": "void",
               "identityHashCode": "int"},
    "Character": {
        "isDigit": "boolean", "isLetter": "boolean", "isWhitespace": "boolean",
        "toUpperCase": "char", "toLowerCase": "char",
    },
    "Objects": {
        "equals": "boolean", "isNull": "boolean", "nonNull": "boolean",
        "requireNonNull": "Object", "toString": "String",
    },
}

BUILTIN_STATIC_FIELDS: dict[str, dict[str, str]] = {
    "System": {"out": "PrintStream", "err": "PrintStream"},
    "Integer": {"MAX_VALUE": "int", "MIN_VALUE": "int"},
    "Long": {"MAX_VALUE": "long", "MIN_VALUE": "long"},
    "Double": {
        "MAX_VALUE": "double", "MIN_VALUE": "double", "NaN": "double",
        "POSITIVE_INFINITY": "double", "NEGATIVE_INFINITY": "double",
    },
    "Math": {"PI": "double", "E": "double"},
    "Boolean": {"TRUE": "Boolean", "FALSE": "Boolean"},
}

EXCEPTION_PARENT: dict[str, str | None] = {
    "ArithmeticException": "RuntimeException",
    "NullPointerException": "RuntimeException",
    "ClassCastException": "RuntimeException",
    "IllegalArgumentException": "RuntimeException",
    "NumberFormatException": "IllegalArgumentException",
    "IllegalStateException": "RuntimeException",
    "IndexOutOfBoundsException": "RuntimeException",
    "ArrayIndexOutOfBoundsException": "IndexOutOfBoundsException",
    "StringIndexOutOfBoundsException": "IndexOutOfBoundsException",
    "NegativeArraySizeException": "RuntimeException",
    "UnsupportedOperationException": "RuntimeException",
    "NoSuchElementException": "RuntimeException",
    "ConcurrentModificationException": "RuntimeException",
    "RuntimeException": "Exception",
    "IOException": "Exception",
    "Exception": "Throwable",
    "AssertionError": "Error",
    "StackOverflowError": "Error",
    "NoSuchMethodError": "Error",
    "NoSuchFieldError": "Error",
    "Error": "Throwable",
    "Throwable": None,
}

INSTANTIABLE_BUILTINS = frozenset(
    {"ArrayList", "LinkedList", "StringBuilder", "Object", "String",
     "Integer", "Double", "Boolean"} | set(EXCEPTION_PARENT)
)

PRIMITIVES = frozenset(
    {"int", "long", "short", "byte", "double", "float", "boolean", "char", "void"}
)


def _exception_chain(name: str, program: JavaProgram) -> list[str]:
    chain = [name]
    seen = {name}
    current: str | None = name
    while current is not None:
        nxt: str | None = None
        if current in EXCEPTION_PARENT:
            nxt = EXCEPTION_PARENT[current]
        elif current in program.classes:
            supers = program.classes[current].supers
            nxt = supers[0] if supers else None
        if nxt is None or nxt in seen:
            break
        chain.append(nxt)
        seen.add(nxt)
        current = nxt
    return chain


# ---- static checking ----------------------------------------------------------


class _Types:
    """Best-effort expression typing from declared types; unknowns stay None."""

    def __init__(self, program: JavaProgram, cls: JavaClass, unit: SourceUnit,
                 method: JavaMethod):
        self.program = program
        self.cls = cls
        self.unit = unit
        self.names: dict[str, str] = {}
        for f in cls.fields:
            self.names[f.name] = f.type
        for ptype, pname in method.params:
            self.names[pname] = ptype
        if method.body is not None:
            self._collect(method.body)

    def _collect(self, node: Node) -> None:
        if node.kind == "local_var_decl":
            tref = next((c for c in node.children if c.kind == "type_ref"), None)
            if tref is not None:
                dtype = type_name(self.unit.text[tref.start : tref.end])
                for vd in node.children:
                    if vd.kind == "var_declarator" and vd.value:
                        self.names[vd.value] = dtype
        elif node.kind in ("foreach_var", "catch_param", "param") and node.value:
            tref = next((c for c in node.children if c.kind == "type_ref"), None)
            if tref is not None:
                self.names[node.value] = type_name(
                    self.unit.text[tref.start : tref.end]
                )
        for child in node.children:
            self._collect(child)

    def text(self, node: Node) -> str:
        return self.unit.text[node.start : node.end]

    def of(self, node: Node) -> str | tuple[str, str] | None:
        """Returns a type name, ("class", name) for a static reference, or None."""
        kind = node.kind
        if kind == "identifier":
            name = self.text(node)
            if name in self.names:
                return self.names[name]
            if name in self.program.classes or name in BUILTIN_METHODS \
                    or name in BUILTIN_STATICS or name in BUILTIN_STATIC_FIELDS \
                    or name in EXCEPTION_PARENT:
                return ("class", name)
            return None
        if kind == "this_expr":
            return self.cls.name
        if kind == "number_literal":
            text = self.text(node)
            if re.search(r"[.eE]", text.replace("0x", "").replace("0X", "")) \
                    or text[-1] in "fFdD":
                return "double"
            return "long" if text[-1] in "lL" else "int"
        if kind == "string_literal":
            return "String"
        if kind == "char_literal":
            return "char"
        if kind == "boolean_literal":
            return "boolean"
        if kind == "paren_expr":
            return self.of(node.children[0]) if node.children else None
        if kind == "cast_expr":
            tref = node.children[0]
            return type_name(self.text(tref))
        if kind == "new_expr":
            return type_name(self.text(node.children[0]))
        if kind == "array_new_expr":
            base = type_name(self.text(node.children[0]))
            return base + "[]"
        if kind == "array_access":
            base = self.of(node.children[0])
            if isinstance(base, str) and base.endswith("[]"):
                return base[:-2]
            return None
        if kind == "field_access":
            return self._field_type(node)
        if kind == "call_expr":
            return self._call_type(node)
        if kind == "assign_expr":
            return self.of(node.children[0])
        if kind == "ternary_expr" and len(node.children) == 3:
            t = self.of(node.children[1])
            return t if t is not None else self.of(node.children[2])
        if kind == "unary_expr":
            if node.value == "!":
                return "boolean"
            return self.of(node.children[0]) if node.children else None
        if kind == "postfix_expr":
            return self.of(node.children[0]) if node.children else None
        if kind == "instanceof_expr":
            return "boolean"
        if kind == "binary_expr":
            op = node.value or ""
            if op in ("&&", "||", "<", "<=", ">", ">=", "==", "!="):
                return "boolean"
            left = self.of(node.children[0]) if node.children else None
            right = self.of(node.children[-1]) if len(node.children) > 1 else None
            if op == "+" and ("String" in (left, right)):
                return "String"
            if "double" in (left, right) or "float" in (left, right):
                return "double"
            if isinstance(left, str) and left in PRIMITIVES:
                return left
            if isinstance(right, str) and right in PRIMITIVES:
                return right
            return None
        return None

    def _field_type(self, node: Node) -> str | tuple[str, str] | None:
        if len(node.children) < 2:
            return None
        recv, member = node.children[0], node.children[-1]
        if member.kind != "identifier":
            return self.of(recv)
        name = self.text(member)
        rtype = self.of(recv)
        if isinstance(rtype, tuple):
            cls_name = rtype[1]
            table = BUILTIN_STATIC_FIELDS.get(cls_name, {})
            if name in table:
                return table[name]
            if cls_name in self.program.classes:
                f = self.program.classes[cls_name].field_map().get(name)
                return f.type if f else None
            return None
        if isinstance(rtype, str):
            if rtype.endswith("[]") and name == "length":
                return "int"
            if rtype in self.program.classes:
                f = self.program.classes[rtype].field_map().get(name)
                return f.type if f else None
        return None

    def _call_type(self, node: Node) -> str | None:
        if len(node.children) == 2:
            first = node.children[0]
            if first.kind != "identifier":
                return None
            name = self.text(first)
            overloads = self.cls.methods.get(name)
            if overloads:
                return overloads[0].return_type
            return None
        recv, member = node.children[0], node.children[1]
        if member.kind != "identifier":
            return None
        name = self.text(member)
        rtype = self.of(recv)
        if isinstance(rtype, tuple):
            cls_name = rtype[1]
            if cls_name in self.program.classes:
                overloads = self.program.classes[cls_name].methods.get(name)
                return overloads[0].return_type if overloads else None
            ret = BUILTIN_STATICS.get(cls_name, {}).get(name)
            return None if ret in (None, "?") else ret
        if isinstance(rtype, str):
            if rtype in self.program.classes:
                overloads = self.program.classes[rtype].methods.get(name)
                return overloads[0].return_type if overloads else None
            table = BUILTIN_METHODS.get(rtype)
            if table is not None:
                return table.get(name) or OBJECT_METHODS.get(name)
        return None


def _check_members(program: JavaProgram, cls: JavaClass, method: JavaMethod,
                   diagnostics: list[str]) -> None:
    unit = cls.unit
    if method.body is None:
        return
    types = _Types(program, cls, unit, method)

    def report(node: Node, message: str) -> None:
        diagnostics.append(f"{unit.path}:{_line_of(unit, node.start)}: {message}")

    def visit(node: Node) -> None:
        if node.kind == "call_expr" and len(node.children) == 3:
            recv, member, args = node.children
            if member.kind == "identifier":
                name = types.text(member)
                nargs = sum(1 for a in args.children)
                rtype = types.of(recv)
                if isinstance(rtype, tuple):
                    _check_static_call(rtype[1], name, nargs, node)
                elif isinstance(rtype, str):
                    _check_instance_call(rtype, name, nargs, node)
        elif node.kind == "new_expr":
            tname = type_name(types.text(node.children[0]))
            args = next((c for c in node.children if c.kind == "args"), None)
            nargs = len(args.children) if args is not None else 0
            if tname in program.classes:
                ctors = program.classes[tname].ctors
                if ctors and not any(len(c.params) == nargs for c in ctors):
                    report(node, f"no constructor of {tname} takes {nargs} arguments")
                elif not ctors and nargs > 0:
                    report(node, f"no constructor of {tname} takes {nargs} arguments")
            elif tname not in INSTANTIABLE_BUILTINS and tname not in PRIMITIVES:
                report(node, f"unknown class: {tname}")
        elif node.kind == "return_stmt":
            if method.return_type == "void" and node.children:
                report(node, f"cannot return a value from void method {method.name}")
            elif method.return_type not in (None, "void", "?") and not node.children:
                report(node, f"missing return value in {method.name}")
        for child in node.children:
            visit(child)

    def _check_instance_call(rtype: str, name: str, nargs: int, node: Node) -> None:
        if rtype in program.classes:
            target = program.classes[rtype]
            overloads = target.methods.get(name)
            if not overloads:
                if name not in OBJECT_METHODS:
                    report(node, f"{rtype} has no method {name}")
            elif not any(len(m.params) == nargs for m in overloads):
                report(node, f"no overload of {rtype}.{name} takes {nargs} arguments")
        elif rtype in BUILTIN_METHODS:
            table = BUILTIN_METHODS[rtype]
            if name not in table and name not in OBJECT_METHODS:
                report(node, f"{rtype} has no method {name}")
        elif rtype in EXCEPTION_PARENT:
            if name not in _EXCEPTION_METHODS and name not in OBJECT_METHODS:
                report(node, f"{rtype} has no method {name}")

    def _check_static_call(cls_name: str, name: str, nargs: int, node: Node) -> None:
        if cls_name in program.classes:
            target = program.classes[cls_name]
            overloads = target.methods.get(name)
            if not overloads:
                report(node, f"{cls_name} has no method {name}")
            elif not any(len(m.params) == nargs for m in overloads):
                report(node, f"no overload of {cls_name}.{name} takes {nargs} arguments")
        elif cls_name in BUILTIN_STATICS:
            if name not in BUILTIN_STATICS[cls_name] \
                    and name not in BUILTIN_METHODS.get(cls_name, {}):
                report(node, f"{cls_name} has no method {name}")

    visit(method.body)


def check_program(root: str | Path) -> list[str]:
    """Compiler-style diagnostics for a program directory; empty means buildable."""
    program = load_java_program(root)
    if not program.classes and not program.diagnostics:
        return [f"no classes under {root}"]
    diagnostics = list(program.diagnostics)
    stdlib = stdlib_table()
    known = frozenset(program.classes) | frozenset(BUILTIN_STATICS) \
        | frozenset(BUILTIN_STATIC_FIELDS) | frozenset(BUILTIN_METHODS) \
        | frozenset(EXCEPTION_PARENT)
    for cls in program.classes.values():
        for chunk_node in [m.node for ms in cls.methods.values() for m in ms] + [
            c.node for c in cls.ctors
        ]:
            if not any(c.kind == "block" for c in chunk_node.children):
                continue
            chunk = _as_chunk(cls.unit, chunk_node)
            for msg in static_check(cls.unit, chunk, stdlib, known):
                line = _line_of(cls.unit, chunk_node.start)
                diagnostics.append(f"{cls.unit.path}:{line}: {msg}")
    for cls in program.classes.values():
        for overloads in cls.methods.values():
            for m in overloads:
                _check_members(program, cls, m, diagnostics)
        for ctor in cls.ctors:
            _check_members(program, cls, ctor, diagnostics)
    return diagnostics


def _as_chunk(unit: SourceUnit, node: Node) -> MethodChunk:
    from .corpus import segment

    methods, _ = segment(unit)
    for chunk in methods:
        if chunk.node is node:
            return chunk
    body = next((c for c in node.children if c.kind == "block"), None)
    return MethodChunk(
        unit=unit, node=node, class_name="?", name=node.value or "?",
        signature=node.value or "?", body=body,
    )


# ---- runtime values ----------------------------------------------------------


class ExitSignal(Exception):
    def __init__(self, code: int):
        self.code = code


class JavaError(Exception):
    def __init__(self, jclass: str, message: str | None = None, obj: Any = None):
        super().__init__(message or jclass)
        self.jclass = jclass
        self.message = message
        self.obj = obj


class _Return(Exception):
    def __init__(self, value: Any):
        self.value = value


class _Break(Exception):
    def __init__(self, label: str | None = None):
        self.label = label


class _Continue(Exception):
    def __init__(self, label: str | None = None):
        self.label = label


class JObject:
    __slots__ = ("cls", "fields", "oid")

    def __init__(self, cls: JavaClass | None, oid: int):
        self.cls = cls
        self.fields: dict[str, Any] = {}
        self.oid = oid


class JArray:
    __slots__ = ("elems", "elem_type")

    def __init__(self, elems: list[Any], elem_type: str = "Object"):
        self.elems = elems
        self.elem_type = elem_type


class JList:
    __slots__ = ("elems",)

    def __init__(self, elems: list[Any] | None = None):
        self.elems = elems if elems is not None else []


class JIterator:
    __slots__ = ("elems", "pos")

    def __init__(self, elems: list[Any]):
        self.elems = elems
        self.pos = 0


class JStringBuilder:
    __slots__ = ("parts",)

    def __init__(self, initial: str = ""):
        self.parts = [initial] if initial else []


class JExc:
    __slots__ = ("jclass", "message")

    def __init__(self, jclass: str, message: str | None):
        self.jclass = jclass
        self.message = message


class JPrintStream:
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name


class ClassRef:
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name


class Env:
    __slots__ = ("vars", "parent")

    def __init__(self, parent: "Env | None" = None):
        self.vars: dict[str, Any] = {}
        self.parent = parent

    def declare(self, name: str, value: Any) -> None:
        self.vars[name] = value

    def lookup(self, name: str) -> tuple[bool, Any]:
        env: Env | None = self
        while env is not None:
            if name in env.vars:
                return True, env.vars[name]
            env = env.parent
        return False, None

    def assign(self, name: str, value: Any) -> bool:
        env: Env | None = self
        while env is not None:
            if name in env.vars:
                env.vars[name] = value
                return True
            env = env.parent
        return False


@dataclass
class Frame:
    cls: JavaClass | None
    this: JObject | None
    env: Env


def _default_value(type_text: str) -> Any:
    t = type_name(type_text)
    if t in ("int", "long", "short", "byte"):
        return 0
    if t in ("double", "float"):
        return 0.0
    if t == "boolean":
        return False
    if t == "char":
        return "\u0000"
    return None


_ESCAPES = {
    "n": "\n", "t": "\t", "r": "\r", "b": "\b", "f": "\f",
    "0": "\0", "'": "'", '"': '"', "\\": "\\",
}


def _unescape(text: str) -> str:
    out: list[str] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\" and i + 1 < len(text):
            nxt = text[i + 1]
            if nxt == "u" and i + 5 < len(text):
                out.append(chr(int(text[i + 2 : i + 6], 16)))
                i += 6
                continue
            out.append(_ESCAPES.get(nxt, nxt))
            i += 2
            continue
        out.append(ch)
        i += 1
    return "".join(out)


def _parse_number(raw: str) -> int | float:
    text = raw.replace("_", "")
    if text[-1] in "lL":
        return int(text[:-1], 0)
    if text[-1] in "fFdD" and not text.lower().startswith("0x"):
        return float(text[:-1])
    lowered = text.lower()
    if lowered.startswith("0x") or lowered.startswith("0b"):
        return int(text, 0)
    if "." in text or "e" in lowered:
        return float(text)
    if len(text) > 1 and text[0] == "0" and text.isdigit():
        return int(text, 8)
    return int(text)


# ---- the interpreter ----------------------------------------------------------


class Interpreter:
    def __init__(self, program: JavaProgram, stdout: TextIO | None = None,
                 stderr: TextIO | None = None):
        self.program = program
        self.stdout = stdout if stdout is not None else sys.stdout
        self.stderr = stderr if stderr is not None else sys.stderr
        self.statics: dict[str, dict[str, Any]] = {}
        self._next_oid = 1
        self._init_statics()

    def _oid(self) -> int:
        oid = self._next_oid
        self._next_oid += 1
        return oid

    def _init_statics(self) -> None:
        for cls in self.program.classes.values():
            self.statics[cls.name] = {
                f.name: _default_value(f.type) for f in cls.fields if f.is_static
            }
        for cls in self.program.classes.values():
            frame = Frame(cls, None, Env())
            for f in cls.fields:
                if f.is_static and f.init is not None:
                    self.statics[cls.name][f.name] = self._eval(f.init, frame, cls.unit)

    # -- entry point --

    def run_main(self, class_name: str, args: list[str]) -> int:
        cls = self.program.classes.get(class_name)
        if cls is None:
            print(f"error: class not found: {class_name}", file=self.stderr)
            return 1
        mains = cls.methods.get("main")
        if not mains:
            print(f"error: no main method in {class_name}", file=self.stderr)
            return 1
        main = mains[0]
        frame = Frame(cls, None, Env())
        if main.params:
            frame.env.declare(main.params[0][1], JArray(list(args), "String"))
        try:
            if main.body is not None:
                self._exec_block(main.body, frame, cls.unit)
            return 0
        except ExitSignal as exit_sig:
            return exit_sig.code
        except _Return:
            return 0
        except JavaError as err:
            qualifier = "java.lang." if err.jclass in EXCEPTION_PARENT else ""
            detail = f": {err.message}" if err.message is not None else ""
            print(
                f'Exception in thread "main" {qualifier}{err.jclass}{detail}',
                file=self.stderr,
            )
            return 1
        except RecursionError:
            print('Exception in thread "main" java.lang.StackOverflowError',
                  file=self.stderr)
            return 1

    # -- helpers --

    def to_display(self, value: Any) -> str:
        if value is None:
            return "null"
        if value is True:
            return "true"
        if value is False:
            return "false"
        if isinstance(value, float):
            if math.isnan(value):
                return "NaN"
            if math.isinf(value):
                return "Infinity" if value > 0 else "-Infinity"
            return str(value)
        if isinstance(value, (int, str)):
            return str(value)
        if isinstance(value, JList):
            return "[" + ", ".join(self.to_display(v) for v in value.elems) + "]"
        if isinstance(value, JStringBuilder):
            return "".join(value.parts)
        if isinstance(value, JExc):
            prefix = "java.lang." if value.jclass in EXCEPTION_PARENT else ""
            if value.message is None:
                return prefix + value.jclass
            return f"{prefix}{value.jclass}: {value.message}"
        if isinstance(value, JArray):
            return f"[{value.elem_type}@{value.elems and id(value.elems) % 4096 or 0:x}"
        if isinstance(value, JObject):
            if value.cls is not None and "toString" in value.cls.methods:
                return self._invoke_method(value.cls, "toString", value, [])
            name = value.cls.name if value.cls is not None else "Object"
            return f"{name}@{value.oid:x}"
        if isinstance(value, ClassRef):
            return f"class {value.name}"
        return str(value)

    def _npe(self, what: str) -> JavaError:
        return JavaError("NullPointerException", what)

    # -- statements --

    def _exec_block(self, block: Node, frame: Frame, unit: SourceUnit) -> None:
        inner = Frame(frame.cls, frame.this, Env(frame.env))
        for stmt in block.children:
            self._exec(stmt, inner, unit)

    def _exec(self, node: Node, frame: Frame, unit: SourceUnit) -> None:
        kind = node.kind
        if kind == "block":
            self._exec_block(node, frame, unit)
        elif kind == "expr_stmt":
            if node.children:
                self._eval(node.children[0], frame, unit)
        elif kind == "local_var_decl":
            tref = next((c for c in node.children if c.kind == "type_ref"), None)
            dtype = unit.text[tref.start : tref.end] if tref is not None else "Object"
            for vd in node.children:
                if vd.kind != "var_declarator" or not vd.value:
                    continue
                if len(vd.children) > 1:
                    value = self._eval(vd.children[1], frame, unit)
                else:
                    value = _default_value(dtype)
                frame.env.declare(vd.value, value)
        elif kind == "if_stmt":
            cond = self._truth(self._eval(node.children[0], frame, unit))
            if cond:
                self._exec(node.children[1], frame, unit)
            elif len(node.children) > 2:
                self._exec(node.children[2], frame, unit)
        elif kind == "while_stmt":
            self._loop_while(node, frame, unit)
        elif kind == "do_stmt":
            self._loop_do(node, frame, unit)
        elif kind == "for_stmt":
            self._loop_for(node, frame, unit)
        elif kind == "foreach_stmt":
            self._loop_foreach(node, frame, unit)
        elif kind == "return_stmt":
            value = self._eval(node.children[0], frame, unit) if node.children else None
            raise _Return(value)
        elif kind == "break_stmt":
            label = unit.text[node.children[0].start : node.children[0].end] \
                if node.children else None
            raise _Break(label)
        elif kind == "continue_stmt":
            label = unit.text[node.children[0].start : node.children[0].end] \
                if node.children else None
            raise _Continue(label)
        elif kind == "throw_stmt":
            value = self._eval(node.children[0], frame, unit)
            if isinstance(value, JExc):
                raise JavaError(value.jclass, value.message)
            if isinstance(value, JObject) and value.cls is not None:
                raise JavaError(
                    value.cls.name, value.fields.get("message"), obj=value
                )
            if value is None:
                raise self._npe("throw on null")
            raise JavaError("Error", "bad throw operand")
        elif kind == "try_stmt":
            self._exec_try(node, frame, unit)
        elif kind == "switch_stmt":
            self._exec_switch(node, frame, unit)
        elif kind == "assert_stmt":
            if not self._truth(self._eval(node.children[0], frame, unit)):
                message = None
                if len(node.children) > 1:
                    message = self.to_display(
                        self._eval(node.children[1], frame, unit)
                    )
                raise JavaError("AssertionError", message)
        elif kind == "sync_stmt":
            self._exec(node.children[-1], frame, unit)
        elif kind == "labeled_stmt":
            label = node.value
            try:
                for child in node.children:
                    self._exec(child, frame, unit)
            except _Break as brk:
                if brk.label != label:
                    raise
            except _Continue as cont:
                if cont.label != label:
                    raise
        elif kind == "empty_stmt":
            pass
        elif kind in ("class_decl", "interface_decl", "enum_decl"):
            pass
        else:
            self._eval(node, frame, unit)

    def _loop_body(self, body: Node, frame: Frame, unit: SourceUnit,
                   label: str | None = None) -> bool:
        """Runs one iteration; returns False when the loop should stop."""
        try:
            self._exec(body, frame, unit)
        except _Break as brk:
            if brk.label is None or brk.label == label:
                return False
            raise
        except _Continue as cont:
            if cont.label is not None and cont.label != label:
                raise
        return True

    def _loop_while(self, node: Node, frame: Frame, unit: SourceUnit) -> None:
        cond, body = node.children[0], node.children[1]
        while self._truth(self._eval(cond, frame, unit)):
            if not self._loop_body(body, frame, unit):
                break

    def _loop_do(self, node: Node, frame: Frame, unit: SourceUnit) -> None:
        body, cond = node.children[0], node.children[1]
        while True:
            if not self._loop_body(body, frame, unit):
                break
            if not self._truth(self._eval(cond, frame, unit)):
                break

    def _loop_for(self, node: Node, frame: Frame, unit: SourceUnit) -> None:
        scope = Frame(frame.cls, frame.this, Env(frame.env))
        init = next((c for c in node.children if c.kind == "for_init"), None)
        cond = next((c for c in node.children if c.kind == "for_cond"), None)
        update = next((c for c in node.children if c.kind == "for_update"), None)
        body = node.children[-1]
        if init is not None:
            for child in init.children:
                if child.kind in STATEMENT_KINDS:
                    self._exec(child, scope, unit)
                else:
                    self._eval(child, scope, unit)
        while True:
            if cond is not None and cond.children:
                if not self._truth(self._eval(cond.children[0], scope, unit)):
                    break
            if not self._loop_body(body, scope, unit):
                break
            if update is not None:
                for child in update.children:
                    self._eval(child, scope, unit)

    def _loop_foreach(self, node: Node, frame: Frame, unit: SourceUnit) -> None:
        var, iterable, body = node.children[0], node.children[1], node.children[-1]
        value = self._eval(iterable, frame, unit)
        if value is None:
            raise self._npe("foreach over null")
        if isinstance(value, JList):
            elems = list(value.elems)
        elif isinstance(value, JArray):
            elems = list(value.elems)
        elif isinstance(value, str):
            elems = list(value)
        else:
            raise JavaError("Error", "foreach over non-iterable")
        scope = Frame(frame.cls, frame.this, Env(frame.env))
        scope.env.declare(var.value or "?", None)
        for elem in elems:
            scope.env.assign(var.value or "?", elem)
            if not self._loop_body(body, scope, unit):
                break

    def _exec_try(self, node: Node, frame: Frame, unit: SourceUnit) -> None:
        body = next(c for c in node.children if c.kind == "block")
        catches = [c for c in node.children if c.kind == "catch_clause"]
        finallies = [c for c in node.children if c.kind == "finally_clause"]
        try:
            self._exec_block(body, frame, unit)
        except JavaError as err:
            chain = set(_exception_chain(err.jclass, self.program))
            for clause in catches:
                param = next(c for c in clause.children if c.kind == "catch_param")
                types = [
                    type_name(unit.text[t.start : t.end])
                    for t in param.children if t.kind == "type_ref"
                ]
                if any(t in chain for t in types):
                    catch_frame = Frame(frame.cls, frame.this, Env(frame.env))
                    bound = err.obj if err.obj is not None \
                        else JExc(err.jclass, err.message)
                    catch_frame.env.declare(param.value or "?", bound)
                    block = next(c for c in clause.children if c.kind == "block")
                    self._exec_block(block, catch_frame, unit)
                    break
            else:
                raise
        finally:
            for clause in finallies:
                block = next(c for c in clause.children if c.kind == "block")
                self._exec_block(block, frame, unit)

    def _exec_switch(self, node: Node, frame: Frame, unit: SourceUnit) -> None:
        subject = self._eval(node.children[0], frame, unit)
        cases = [c for c in node.children if c.kind == "switch_case"]
        match_idx = None
        default_idx = None
        for i, case in enumerate(cases):
            label = case.children[0] if case.children else None
            if label is None or label.kind in STATEMENT_KINDS:
                default_idx = i if default_idx is None else default_idx
                continue
            label_value = self._eval(label, frame, unit)
            if self._equals(subject, label_value):
                match_idx = i
                break
        start = match_idx if match_idx is not None else default_idx
        if start is None:
            return
        scope = Frame(frame.cls, frame.this, Env(frame.env))
        try:
            for case in cases[start:]:
                stmts = [
                    c for c in case.children
                    if c.kind in STATEMENT_KINDS or c.kind == "block"
                ]
                for stmt in stmts:
                    self._exec(stmt, scope, unit)
        except _Break as brk:
            if brk.label is not None:
                raise

    # -- expressions --

    def _truth(self, value: Any) -> bool:
        if isinstance(value, bool):
            return value
        if value is None:
            raise self._npe("null condition")
        return bool(value)

    def _equals(self, a: Any, b: Any) -> bool:
        if a is None or b is None:
            return a is b
        if isinstance(a, bool) or isinstance(b, bool):
            return a is b
        if isinstance(a, (int, float)) and isinstance(b, (int, float)):
            return a == b
        if isinstance(a, str) and isinstance(b, str):
            return a == b
        return a is b

    def _eval(self, node: Node, frame: Frame, unit: SourceUnit) -> Any:
        kind = node.kind
        if kind == "number_literal":
            return _parse_number(unit.text[node.start : node.end])
        if kind == "string_literal":
            return _unescape(unit.text[node.start + 1 : node.end - 1])
        if kind == "char_literal":
            return _unescape(unit.text[node.start + 1 : node.end - 1])
        if kind == "boolean_literal":
            return unit.text[node.start : node.end] == "true"
        if kind == "null_literal":
            return None
        if kind == "identifier":
            return self._resolve(unit.text[node.start : node.end], frame)
        if kind == "this_expr":
            return frame.this
        if kind == "paren_expr":
            return self._eval(node.children[0], frame, unit)
        if kind == "field_access":
            return self._eval_field(node, frame, unit)
        if kind == "call_expr":
            return self._eval_call(node, frame, unit)
        if kind == "assign_expr":
            return self._eval_assign(node, frame, unit)
        if kind == "binary_expr":
            return self._eval_binary(node, frame, unit)
        if kind == "unary_expr":
            return self._eval_unary(node, frame, unit)
        if kind == "postfix_expr":
            return self._eval_postfix(node, frame, unit)
        if kind == "ternary_expr":
            cond = self._truth(self._eval(node.children[0], frame, unit))
            branch = node.children[1] if cond else node.children[2]
            return self._eval(branch, frame, unit)
        if kind == "cast_expr":
            return self._eval_cast(node, frame, unit)
        if kind == "instanceof_expr":
            return self._eval_instanceof(node, frame, unit)
        if kind == "new_expr":
            return self._eval_new(node, frame, unit)
        if kind == "array_new_expr":
            return self._eval_array_new(node, frame, unit)
        if kind == "array_init":
            elems = [self._eval(c, frame, unit) for c in node.children]
            return JArray(elems)
        if kind == "array_access":
            arr = self._eval(node.children[0], frame, unit)
            idx = self._eval(node.children[1], frame, unit)
            return self._array_get(arr, idx)
        if kind == "super_expr":
            return frame.this
        raise JavaError("Error", f"unsupported construct: {kind}")

    def _resolve(self, name: str, frame: Frame) -> Any:
        found, value = frame.env.lookup(name)
        if found:
            return value
        if frame.this is not None and name in frame.this.fields:
            return frame.this.fields[name]
        if frame.cls is not None and name in self.statics.get(frame.cls.name, {}):
            return self.statics[frame.cls.name][name]
        if name in self.program.classes or name in BUILTIN_STATICS \
                or name in BUILTIN_STATIC_FIELDS or name in BUILTIN_METHODS \
                or name in EXCEPTION_PARENT:
            return ClassRef(name)
        raise JavaError("Error", f"cannot resolve name {name}")

    def _store(self, name: str, value: Any, frame: Frame) -> None:
        if frame.env.assign(name, value):
            return
        if frame.this is not None and name in frame.this.fields:
            frame.this.fields[name] = value
            return
        if frame.cls is not None and name in self.statics.get(frame.cls.name, {}):
            self.statics[frame.cls.name][name] = value
            return
        raise JavaError("Error", f"cannot assign to unknown name {name}")

    def _array_get(self, arr: Any, idx: Any) -> Any:
        if arr is None:
            raise self._npe("index into null array")
        if isinstance(arr, JArray):
            if not isinstance(idx, int) or isinstance(idx, bool):
                raise JavaError("Error", "array index must be an int")
            if idx < 0 or idx >= len(arr.elems):
                raise JavaError(
                    "ArrayIndexOutOfBoundsException",
                    f"Index {idx} out of bounds for length {len(arr.elems)}",
                )
            return arr.elems[idx]
        raise JavaError("Error", "index into non-array value")

    def _array_set(self, arr: Any, idx: Any, value: Any) -> None:
        if arr is None:
            raise self._npe("index into null array")
        if isinstance(arr, JArray):
            if not isinstance(idx, int) or isinstance(idx, bool):
                raise JavaError("Error", "array index must be an int")
            if idx < 0 or idx >= len(arr.elems):
                raise JavaError(
                    "ArrayIndexOutOfBoundsException",
                    f"Index {idx} out of bounds for length {len(arr.elems)}",
                )
            arr.elems[idx] = value
            return
        raise JavaError("Error", "index into non-array value")

    def _eval_field(self, node: Node, frame: Frame, unit: SourceUnit) -> Any:
        recv_node, member = node.children[0], node.children[-1]
        if member.kind == "this_expr":
            return frame.this
        name = unit.text[member.start : member.end]
        recv = self._eval(recv_node, frame, unit)
        return self._field_of(recv, name)

    def _field_of(self, recv: Any, name: str) -> Any:
        if recv is None:
            raise self._npe(
                f'Cannot read field "{name}" because the receiver is null'
            )
        if isinstance(recv, ClassRef):
            table = BUILTIN_STATIC_FIELDS.get(recv.name)
            if table is not None and name in table:
                return self._builtin_constant(recv.name, name)
            statics = self.statics.get(recv.name)
            if statics is not None and name in statics:
                return statics[name]
            raise JavaError(
                "NoSuchFieldError", f"{recv.name}.{name}"
            )
        if isinstance(recv, JArray) and name == "length":
            return len(recv.elems)
        if isinstance(recv, JObject):
            if name in recv.fields:
                return recv.fields[name]
            raise JavaError("NoSuchFieldError", name)
        raise JavaError("Error", f"no field {name} on {type(recv).__name__}")

    def _builtin_constant(self, cls_name: str, name: str) -> Any:
        if cls_name == "System":
            return JPrintStream(name)
        constants: dict[tuple[str, str], Any] = {
            ("Integer", "MAX_VALUE"): 2147483647,
            ("Integer", "MIN_VALUE"): -2147483648,
            ("Long", "MAX_VALUE"): 9223372036854775807,
            ("Long", "MIN_VALUE"): -9223372036854775808,
            ("Double", "MAX_VALUE"): 1.7976931348623157e308,
            ("Double", "MIN_VALUE"): 4.9e-324,
            ("Double", "NaN"): math.nan,
            ("Double", "POSITIVE_INFINITY"): math.inf,
            ("Double", "NEGATIVE_INFINITY"): -math.inf,
            ("Math", "PI"): math.pi,
            ("Math", "E"): math.e,
            ("Boolean", "TRUE"): True,
            ("Boolean", "FALSE"): False,
        }
        return constants[(cls_name, name)]

    # -- calls --

    def _eval_call(self, node: Node, frame: Frame, unit: SourceUnit) -> Any:
        args_node = node.children[-1]
        args = [self._eval(a, frame, unit) for a in args_node.children]
        if len(node.children) == 2:
            first = node.children[0]
            if first.kind == "identifier":
                name = unit.text[first.start : first.end]
                if frame.cls is not None and name in frame.cls.methods:
                    return self._invoke_method(frame.cls, name, frame.this, args)
                raise JavaError("NoSuchMethodError", name)
            if first.kind == "this_expr":
                if frame.cls is None or frame.this is None:
                    raise JavaError("Error", "this() outside constructor")
                self._invoke_ctor(frame.cls, frame.this, args)
                return None
            if first.kind == "super_expr":
                return None
            raise JavaError("Error", "unsupported call form")
        recv_node, member = node.children[0], node.children[1]
        name = unit.text[member.start : member.end]
        recv = self._eval(recv_node, frame, unit)
        return self._dispatch(recv, name, args)

    def _dispatch(self, recv: Any, name: str, args: list[Any]) -> Any:
        if recv is None:
            raise self._npe(
                f'Cannot invoke "{name}" because the receiver is null'
            )
        if isinstance(recv, JPrintStream):
            return self._print_stream(recv, name, args)
        if isinstance(recv, ClassRef):
            return self._static_call(recv.name, name, args)
        if isinstance(recv, str):
            return self._string_method(recv, name, args)
        if isinstance(recv, JList):
            return self._list_method(recv, name, args)
        if isinstance(recv, JIterator):
            return self._iterator_method(recv, name, args)
        if isinstance(recv, JStringBuilder):
            return self._builder_method(recv, name, args)
        if isinstance(recv, JExc):
            if name == "getMessage":
                return recv.message
            if name == "toString":
                return self.to_display(recv)
            if name == "printStackTrace":
                print(self.to_display(recv), file=self.stderr)
                return None
            raise JavaError("NoSuchMethodError", f"{recv.jclass}.{name}")
        if isinstance(recv, JObject):
            cls = recv.cls
            if cls is not None and name in cls.methods:
                return self._invoke_method(cls, name, recv, args)
            if name == "toString":
                return self.to_display(recv)
            if name == "equals":
                return recv is args[0] if args else False
            if name == "hashCode":
                return recv.oid
            if name == "getMessage":
                return recv.fields.get("message")
            owner = cls.name if cls is not None else "Object"
            raise JavaError("NoSuchMethodError", f"{owner}.{name}")
        if isinstance(recv, bool):
            if name == "booleanValue":
                return recv
            if name == "toString":
                return self.to_display(recv)
            raise JavaError("NoSuchMethodError", f"Boolean.{name}")
        if isinstance(recv, (int, float)):
            if name == "intValue":
                return int(recv)
            if name == "doubleValue":
                return float(recv)
            if name == "toString":
                return self.to_display(recv)
            if name == "equals":
                return bool(args) and self._equals(recv, args[0])
            if name == "compareTo":
                other = args[0]
                return (recv > other) - (recv < other)
            if name == "isNaN":
                return isinstance(recv, float) and math.isnan(recv)
            raise JavaError("NoSuchMethodError", f"Number.{name}")
        raise JavaError("Error", f"cannot call {name} on {type(recv).__name__}")

    def _print_stream(self, stream: JPrintStream, name: str, args: list[Any]) -> Any:
        target = self.stdout if stream.name == "out" else self.stderr
        if name == "println":
            text = self.to_display(args[0]) if args else ""
            print(text, file=target)
            return None
        if name == "print":
            print(self.to_display(args[0]) if args else "", end="", file=target)
            return None
        if name == "flush":
            target.flush()
            return None
        raise JavaError("NoSuchMethodError", f"PrintStream.{name}")

    def _static_call(self, cls_name: str, name: str, args: list[Any]) -> Any:
        if cls_name in self.program.classes:
            cls = self.program.classes[cls_name]
            if name in cls.methods:
                return self._invoke_method(cls, name, None, args)
            raise JavaError("NoSuchMethodError", f"{cls_name}.{name}")
        if cls_name == "System":
            if name == "exit":
                raise ExitSignal(int(args[0]) if args else 0)
            if name == "currentTimeMillis":
                return 0
            if name == "arraycopy":
                src, src_pos, dest, dest_pos, length = args
                for i in range(int(length)):
                    self._array_set(
                        dest, int(dest_pos) + i,
                        self._array_get(src, int(src_pos) + i),
                    )
                return None
            if name == "identityHashCode":
                value = args[0]
                return value.oid if isinstance(value, JObject) else 0
        if cls_name == "Math":
            return self._math_call(name, args)
        if cls_name == "Integer":
            if name == "parseInt":
                return self._parse_int_arg(args[0])
            if name == "valueOf":
                return self._parse_int_arg(args[0]) if isinstance(args[0], str) \
                    else int(args[0])
            if name == "toString":
                return self.to_display(args[0])
        if cls_name == "Long":
            if name == "parseLong":
                return self._parse_int_arg(args[0])
            if name in ("valueOf", "toString"):
                return args[0] if name == "valueOf" else self.to_display(args[0])
        if cls_name == "Double":
            if name == "parseDouble":
                try:
                    return float(args[0])
                except (TypeError, ValueError):
                    raise JavaError(
                        "NumberFormatException", f'For input string: "{args[0]}"'
                    ) from None
            if name == "valueOf":
                return float(args[0])
            if name == "isNaN":
                return isinstance(args[0], float) and math.isnan(args[0])
            if name == "isInfinite":
                return isinstance(args[0], float) and math.isinf(args[0])
            if name == "compare":
                a, b = args
                return (a > b) - (a < b)
            if name == "toString":
                return self.to_display(args[0])
        if cls_name == "Boolean":
            if name == "parseBoolean":
                return isinstance(args[0], str) and args[0].lower() == "true"
            if name == "valueOf":
                return args[0] if isinstance(args[0], bool) \
                    else str(args[0]).lower() == "true"
        if cls_name == "String":
            if name == "valueOf":
                return self.to_display(args[0])
            if name == "format":
                return self._format(args)
            if name == "join":
                sep = args[0]
                parts = args[1].elems if isinstance(args[1], (JList, JArray)) \
                    else args[1:]
                return str(sep).join(self.to_display(p) for p in parts)
        if cls_name == "Character":
            ch = str(args[0]) if args else ""
            if name == "isDigit":
                return ch.isdigit()
            if name == "isLetter":
                return ch.isalpha()
            if name == "isWhitespace":
                return ch.isspace()
            if name == "toUpperCase":
                return ch.upper()
            if name == "toLowerCase":
                return ch.lower()
        if cls_name == "Objects":
            if name == "equals":
                return self._object_equals(args[0], args[1])
            if name == "isNull":
                return args[0] is None
            if name == "nonNull":
                return args[0] is not None
            if name == "requireNonNull":
                if args[0] is None:
                    raise self._npe(str(args[1]) if len(args) > 1 else "null")
                return args[0]
            if name == "toString":
                return self.to_display(args[0])
        raise JavaError("NoSuchMethodError", f"{cls_name}.{name}")

    def _object_equals(self, a: Any, b: Any) -> bool:
        if a is None or b is None:
            return a is b
        if isinstance(a, JObject) and a.cls is not None and "equals" in a.cls.methods:
            return bool(self._invoke_method(a.cls, "equals", a, [b]))
        return self._equals(a, b)

    def _parse_int_arg(self, value: Any) -> int:
        try:
            return int(str(value).strip())
        except ValueError:
            raise JavaError(
                "NumberFormatException", f'For input string: "{value}"'
            ) from None

    def _math_call(self, name: str, args: list[Any]) -> Any:
        a = args[0] if args else 0
        if name == "abs":
            return abs(a)
        if name == "max":
            return max(a, args[1])
        if name == "min":
            return min(a, args[1])
        if name == "pow":
            return float(a) ** float(args[1])
        if name == "sqrt":
            return math.sqrt(a) if a >= 0 else math.nan
        if name == "floor":
            return float(math.floor(a))
        if name == "ceil":
            return float(math.ceil(a))
        if name == "round":
            return math.floor(a + 0.5)
        if name == "exp":
            return math.exp(a)
        if name == "log":
            if a < 0:
                return math.nan
            return math.log(a) if a > 0 else -math.inf
        if name == "signum":
            return float((a > 0) - (a < 0))
        if name == "random":
            return 0.5
        raise JavaError("NoSuchMethodError", f"Math.{name}")

    def _format(self, args: list[Any]) -> str:
        template = str(args[0])
        values = args[1:]
        out: list[str] = []
        i = 0
        vi = 0
        while i < len(template):
            ch = template[i]
            if ch == "%" and i + 1 < len(template):
                spec = template[i + 1]
                if spec == "%":
                    out.append("%")
                elif spec == "n":
                    out.append("\n")
                elif vi < len(values):
                    out.append(self.to_display(values[vi]))
                    vi += 1
                i += 2
                continue
            out.append(ch)
            i += 1
        return "".join(out)

    def _string_method(self, s: str, name: str, args: list[Any]) -> Any:
        if name == "length":
            return len(s)
        if name == "charAt":
            idx = int(args[0])
            if idx < 0 or idx >= len(s):
                raise JavaError(
                    "StringIndexOutOfBoundsException",
                    f"index {idx}, length {len(s)}",
                )
            return s[idx]
        if name == "substring":
            lo = int(args[0])
            hi = int(args[1]) if len(args) > 1 else len(s)
            if lo < 0 or hi > len(s) or lo > hi:
                raise JavaError(
                    "StringIndexOutOfBoundsException",
                    f"begin {lo}, end {hi}, length {len(s)}",
                )
            return s[lo:hi]
        if name == "indexOf":
            return s.find(str(args[0]))
        if name == "lastIndexOf":
            return s.rfind(str(args[0]))
        if name == "contains":
            return str(args[0]) in s
        if name == "equals":
            return isinstance(args[0], str) and s == args[0]
        if name == "equalsIgnoreCase":
            return isinstance(args[0], str) and s.lower() == args[0].lower()
        if name == "isEmpty":
            return len(s) == 0
        if name == "startsWith":
            return s.startswith(str(args[0]))
        if name == "endsWith":
            return s.endswith(str(args[0]))
        if name == "toUpperCase":
            return s.upper()
        if name == "toLowerCase":
            return s.lower()
        if name == "trim":
            return s.strip()
        if name == "concat":
            return s + str(args[0])
        if name == "replace":
            return s.replace(str(args[0]), str(args[1]))
        if name == "split":
            parts = re.split(str(args[0]), s)
            return JArray(parts, "String")
        if name == "compareTo":
            other = str(args[0])
            return (s > other) - (s < other)
        if name == "toCharArray":
            return JArray(list(s), "char")
        if name == "toString":
            return s
        if name == "hashCode":
            h = 0
            for ch in s:
                h = (h * 31 + ord(ch)) & 0xFFFFFFFF
            return h - 0x100000000 if h >= 0x80000000 else h
        raise JavaError("NoSuchMethodError", f"String.{name}")

    def _list_method(self, lst: JList, name: str, args: list[Any]) -> Any:
        if name == "add":
            if len(args) == 2:
                idx = int(args[0])
                if idx < 0 or idx > len(lst.elems):
                    raise JavaError(
                        "IndexOutOfBoundsException",
                        f"Index: {idx}, Size: {len(lst.elems)}",
                    )
                lst.elems.insert(idx, args[1])
                return None
            lst.elems.append(args[0])
            return True
        if name == "get":
            idx = int(args[0])
            if idx < 0 or idx >= len(lst.elems):
                raise JavaError(
                    "IndexOutOfBoundsException",
                    f"Index {idx} out of bounds for length {len(lst.elems)}",
                )
            return lst.elems[idx]
        if name == "set":
            idx = int(args[0])
            if idx < 0 or idx >= len(lst.elems):
                raise JavaError(
                    "IndexOutOfBoundsException",
                    f"Index {idx} out of bounds for length {len(lst.elems)}",
                )
            old = lst.elems[idx]
            lst.elems[idx] = args[1]
            return old
        if name == "remove":
            if isinstance(args[0], int) and not isinstance(args[0], bool):
                idx = args[0]
                if idx < 0 or idx >= len(lst.elems):
                    raise JavaError(
                        "IndexOutOfBoundsException",
                        f"Index {idx} out of bounds for length {len(lst.elems)}",
                    )
                return lst.elems.pop(idx)
            for i, elem in enumerate(lst.elems):
                if self._object_equals(elem, args[0]):
                    lst.elems.pop(i)
                    return True
            return False
        if name == "size":
            return len(lst.elems)
        if name == "isEmpty":
            return len(lst.elems) == 0
        if name == "contains":
            return any(self._object_equals(e, args[0]) for e in lst.elems)
        if name == "clear":
            lst.elems.clear()
            return None
        if name == "iterator":
            return JIterator(lst.elems)
        if name == "indexOf":
            for i, elem in enumerate(lst.elems):
                if self._object_equals(elem, args[0]):
                    return i
            return -1
        if name == "addAll":
            other = args[0]
            if isinstance(other, (JList, JArray)):
                lst.elems.extend(other.elems)
                return True
            return False
        if name == "toString":
            return self.to_display(lst)
        raise JavaError("NoSuchMethodError", f"List.{name}")

    def _iterator_method(self, it: JIterator, name: str, args: list[Any]) -> Any:
        if name == "hasNext":
            return it.pos < len(it.elems)
        if name == "next":
            if it.pos >= len(it.elems):
                raise JavaError("NoSuchElementException", None)
            value = it.elems[it.pos]
            it.pos += 1
            return value
        if name == "remove":
            if it.pos == 0:
                raise JavaError("IllegalStateException", None)
            it.elems.pop(it.pos - 1)
            it.pos -= 1
            return None
        raise JavaError("NoSuchMethodError", f"Iterator.{name}")

    def _builder_method(self, sb: JStringBuilder, name: str, args: list[Any]) -> Any:
        if name == "append":
            sb.parts.append(self.to_display(args[0]) if args else "")
            return sb
        if name == "toString":
            return "".join(sb.parts)
        if name == "length":
            return len("".join(sb.parts))
        if name == "insert":
            text = "".join(sb.parts)
            idx = int(args[0])
            sb.parts = [text[:idx] + self.to_display(args[1]) + text[idx:]]
            return sb
        if name == "reverse":
            sb.parts = ["".join(sb.parts)[::-1]]
            return sb
        if name == "charAt":
            text = "".join(sb.parts)
            return self._string_method(text, "charAt", args)
        if name == "deleteCharAt":
            text = "".join(sb.parts)
            idx = int(args[0])
            if idx < 0 or idx >= len(text):
                raise JavaError(
                    "StringIndexOutOfBoundsException", f"index {idx}"
                )
            sb.parts = [text[:idx] + text[idx + 1 :]]
            return sb
        if name == "setLength":
            text = "".join(sb.parts)
            n = int(args[0])
            sb.parts = [text[:n] + "\u0000" * max(0, n - len(text))]
            return None
        raise JavaError("NoSuchMethodError", f"StringBuilder.{name}")

    # -- construction and invocation --

    def _instantiate(self, cls: JavaClass, args: list[Any]) -> JObject:
        obj = JObject(cls, self._oid())
        for f in cls.fields:
            if not f.is_static:
                obj.fields[f.name] = _default_value(f.type)
        frame = Frame(cls, obj, Env())
        for f in cls.fields:
            if not f.is_static and f.init is not None:
                obj.fields[f.name] = self._eval(f.init, frame, cls.unit)
        if cls.ctors:
            self._invoke_ctor(cls, obj, args)
        elif args:
            raise JavaError(
                "Error", f"no constructor of {cls.name} takes {len(args)} arguments"
            )
        return obj

    def _invoke_ctor(self, cls: JavaClass, obj: JObject, args: list[Any]) -> None:
        ctor = next((c for c in cls.ctors if len(c.params) == len(args)), None)
        if ctor is None:
            raise JavaError(
                "Error", f"no constructor of {cls.name} takes {len(args)} arguments"
            )
        self._run_body(cls, ctor, obj, args)

    def _invoke_method(self, cls: JavaClass, name: str, this: JObject | None,
                       args: list[Any]) -> Any:
        overloads = cls.methods.get(name, [])
        method = next((m for m in overloads if len(m.params) == len(args)), None)
        if method is None:
            raise JavaError(
                "NoSuchMethodError",
                f"no overload of {cls.name}.{name} takes {len(args)} arguments",
            )
        return self._run_body(cls, method, this, args)

    def _run_body(self, cls: JavaClass, method: JavaMethod, this: JObject | None,
                  args: list[Any]) -> Any:
        if method.body is None:
            raise JavaError("Error", f"{cls.name}.{method.name} has no body")
        frame = Frame(cls, None if method.is_static else this, Env())
        for (ptype, pname), value in zip(method.params, args):
            frame.env.declare(pname, value)
        try:
            self._exec_block(method.body, frame, cls.unit)
        except _Return as ret:
            return ret.value
        return None

    def _eval_new(self, node: Node, frame: Frame, unit: SourceUnit) -> Any:
        tname = type_name(unit.text[node.children[0].start : node.children[0].end])
        args_node = next((c for c in node.children if c.kind == "args"), None)
        args = [self._eval(a, frame, unit) for a in args_node.children] \
            if args_node is not None else []
        if tname in self.program.classes:
            return self._instantiate(self.program.classes[tname], args)
        if tname in ("ArrayList", "LinkedList"):
            if args and isinstance(args[0], (JList, JArray)):
                return JList(list(args[0].elems))
            return JList()
        if tname == "StringBuilder":
            return JStringBuilder(str(args[0]) if args else "")
        if tname == "String":
            return str(args[0]) if args else ""
        if tname == "Object":
            return JObject(None, self._oid())
        if tname in ("Integer", "Long"):
            return int(args[0]) if args else 0
        if tname in ("Double", "Float"):
            return float(args[0]) if args else 0.0
        if tname == "Boolean":
            return bool(args[0]) if args else False
        if tname in EXCEPTION_PARENT:
            message = None
            if args and args[0] is not None:
                message = self.to_display(args[0])
            return JExc(tname, message)
        raise JavaError("Error", f"unknown class: {tname}")

    def _eval_array_new(self, node: Node, frame: Frame, unit: SourceUnit) -> JArray:
        tref = node.children[0]
        elem_type = type_name(unit.text[tref.start : tref.end])
        init = next((c for c in node.children if c.kind == "array_init"), None)
        if init is not None:
            value = self._eval(init, frame, unit)
            value.elem_type = elem_type
            return value
        sizes = [
            self._eval(c, frame, unit)
            for c in node.children[1:]
            if c.kind not in ("array_init",)
        ]
        if not sizes:
            return JArray([], elem_type)
        n = int(sizes[0])
        if n < 0:
            raise JavaError("NegativeArraySizeException", str(n))
        if len(sizes) > 1:
            return JArray(
                [JArray([_default_value(elem_type)] * int(sizes[1]), elem_type)
                 for _ in range(n)],
                elem_type + "[]",
            )
        return JArray([_default_value(elem_type)] * n, elem_type)

    def _eval_cast(self, node: Node, frame: Frame, unit: SourceUnit) -> Any:
        tref = node.children[0]
        target = type_name(unit.text[tref.start : tref.end])
        value = self._eval(node.children[1], frame, unit)
        if target in ("int", "long", "short", "byte"):
            if isinstance(value, float):
                if math.isnan(value):
                    return 0
                return math.trunc(value)
            if isinstance(value, str) and len(value) == 1:
                return ord(value)
            return int(value)
        if target in ("double", "float"):
            return float(value)
        if target == "char" and isinstance(value, int):
            return chr(value)
        return value

    def _eval_instanceof(self, node: Node, frame: Frame, unit: SourceUnit) -> bool:
        value = self._eval(node.children[0], frame, unit)
        tref = node.children[-1]
        target = type_name(unit.text[tref.start : tref.end])
        if value is None:
            return False
        if isinstance(value, str):
            return target in ("String", "CharSequence", "Comparable", "Object")
        if isinstance(value, bool):
            return target in ("Boolean", "Object")
        if isinstance(value, int):
            return target in ("Integer", "Long", "Number", "Object")
        if isinstance(value, float):
            return target in ("Double", "Float", "Number", "Object")
        if isinstance(value, JList):
            return target in ("ArrayList", "LinkedList", "List", "Collection",
                              "Iterable", "Object")
        if isinstance(value, JArray):
            return target == "Object" or target.endswith("[]")
        if isinstance(value, JExc):
            return target == "Object" \
                or target in _exception_chain(value.jclass, self.program)
        if isinstance(value, JObject):
            if target == "Object":
                return True
            if value.cls is None:
                return False
            return target in _exception_chain(value.cls.name, self.program)
        return target == "Object"

    # -- operators --

    def _eval_assign(self, node: Node, frame: Frame, unit: SourceUnit) -> Any:
        lhs, rhs = node.children[0], node.children[1]
        op = node.value or "="
        value = self._eval(rhs, frame, unit)
        if op != "=":
            current = self._eval(lhs, frame, unit)
            value = self._binop(op[:-1], current, value)
        self._assign_to(lhs, value, frame, unit)
        return value

    def _assign_to(self, lhs: Node, value: Any, frame: Frame,
                   unit: SourceUnit) -> None:
        if lhs.kind == "identifier":
            self._store(unit.text[lhs.start : lhs.end], value, frame)
            return
        if lhs.kind == "paren_expr":
            self._assign_to(lhs.children[0], value, frame, unit)
            return
        if lhs.kind == "field_access":
            recv_node, member = lhs.children[0], lhs.children[-1]
            name = unit.text[member.start : member.end]
            recv = self._eval(recv_node, frame, unit)
            if recv is None:
                raise self._npe(
                    f'Cannot assign field "{name}" because the receiver is null'
                )
            if isinstance(recv, JObject):
                recv.fields[name] = value
                return
            if isinstance(recv, ClassRef) and recv.name in self.statics:
                self.statics[recv.name][name] = value
                return
            raise JavaError("Error", f"cannot assign field {name}")
        if lhs.kind == "array_access":
            arr = self._eval(lhs.children[0], frame, unit)
            idx = self._eval(lhs.children[1], frame, unit)
            self._array_set(arr, idx, value)
            return
        raise JavaError("Error", f"bad assignment target: {lhs.kind}")

    def _eval_unary(self, node: Node, frame: Frame, unit: SourceUnit) -> Any:
        op = node.value or ""
        operand = node.children[0]
        if op == "!":
            return not self._truth(self._eval(operand, frame, unit))
        if op == "-":
            value = self._eval(operand, frame, unit)
            return -value
        if op == "+":
            return self._eval(operand, frame, unit)
        if op == "~":
            return ~int(self._eval(operand, frame, unit))
        if op in ("++", "--"):
            current = self._eval(operand, frame, unit)
            delta = 1 if op == "++" else -1
            value = self._binop("+", current, delta)
            self._assign_to(operand, value, frame, unit)
            return value
        raise JavaError("Error", f"unsupported unary operator {op}")

    def _eval_postfix(self, node: Node, frame: Frame, unit: SourceUnit) -> Any:
        op = node.value or ""
        operand = node.children[0]
        current = self._eval(operand, frame, unit)
        if op in ("++", "--"):
            delta = 1 if op == "++" else -1
            self._assign_to(operand, self._binop("+", current, delta), frame, unit)
            return current
        raise JavaError("Error", f"unsupported postfix operator {op}")

    def _eval_binary(self, node: Node, frame: Frame, unit: SourceUnit) -> Any:
        op = node.value or ""
        left_node, right_node = node.children[0], node.children[-1]
        if op == "&&":
            return self._truth(self._eval(left_node, frame, unit)) \
                and self._truth(self._eval(right_node, frame, unit))
        if op == "||":
            return self._truth(self._eval(left_node, frame, unit)) \
                or self._truth(self._eval(right_node, frame, unit))
        left = self._eval(left_node, frame, unit)
        right = self._eval(right_node, frame, unit)
        return self._binop(op, left, right)

    def _binop(self, op: str, a: Any, b: Any) -> Any:
        try:
            if op == "+":
                if isinstance(a, str) or isinstance(b, str):
                    return self.to_display(a) + self.to_display(b)
                return a + b
            if op == "-":
                return a - b
            if op == "*":
                return a * b
            if op == "/":
                return self._divide(a, b)
            if op == "%":
                return self._modulo(a, b)
            if op == "==":
                return self._equals(a, b)
            if op == "!=":
                return not self._equals(a, b)
            if op == "<":
                return a < b
            if op == "<=":
                return a <= b
            if op == ">":
                return a > b
            if op == ">=":
                return a >= b
            if op == "&":
                if isinstance(a, bool) and isinstance(b, bool):
                    return a and b
                return int(a) & int(b)
            if op == "|":
                if isinstance(a, bool) and isinstance(b, bool):
                    return a or b
                return int(a) | int(b)
            if op == "^":
                if isinstance(a, bool) and isinstance(b, bool):
                    return a != b
                return int(a) ^ int(b)
            if op == "<<":
                return int(a) << (int(b) & 63)
            if op == ">>":
                return int(a) >> (int(b) & 63)
            if op == ">>>":
                return (int(a) & 0xFFFFFFFF) >> (int(b) & 31)
        except TypeError:
            raise JavaError(
                "Error", f"bad operand types for {op}: "
                f"{type(a).__name__}, {type(b).__name__}"
            ) from None
        raise JavaError("Error", f"unsupported operator {op}")

    def _divide(self, a: Any, b: Any) -> Any:
        if isinstance(a, float) or isinstance(b, float):
            a, b = float(a), float(b)
            if b == 0.0:
                if a == 0.0 or math.isnan(a):
                    return math.nan
                sign = math.copysign(1.0, a) * math.copysign(1.0, b)
                return math.inf * sign
            return a / b
        if b == 0:
            raise JavaError("ArithmeticException", "/ by zero")
        q = abs(a) // abs(b)
        return q if (a >= 0) == (b >= 0) else -q

    def _modulo(self, a: Any, b: Any) -> Any:
        if isinstance(a, float) or isinstance(b, float):
            a, b = float(a), float(b)
            if b == 0.0:
                return math.nan
            return math.fmod(a, b)
        if b == 0:
            raise JavaError("ArithmeticException", "/ by zero")
        return a - self._divide(a, b) * b


def run_program(root: str | Path, main_class: str, args: list[str] | None = None,
                stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    """Loads a program directory and runs CLASS.main; returns the exit code."""
    program = load_java_program(root)
    err_stream = stderr if stderr is not None else sys.stderr
    if program.diagnostics:
        for diag in program.diagnostics:
            print(diag, file=err_stream)
        return 1
    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(20000)
    try:
        interp = Interpreter(program, stdout=stdout, stderr=stderr)
        return interp.run_main(main_class, list(args or ()))
    except JavaError as err:
        print(f"error during class initialization: {err.jclass}", file=err_stream)
        return 1
    finally:
        sys.setrecursionlimit(old_limit)
