"""Recursive-descent parser for a broad Java subset.

Produces a uniform Node tree (see tree.py) with exact character spans.
The parser is tolerant: any member or statement it cannot understand is
consumed up to a safe synchronization point and recorded as an "error"
node, so one exotic construct never sinks a whole file.  Generic-type
closers are handled by splitting ">>" / ">>>" tokens on demand, with an
undo log so speculative parses can back out cleanly.
"""

from __future__ import annotations

from .lexer import Token, tokenize
from .tree import Node

PRIMITIVE_TYPES = frozenset(
    {"boolean", "byte", "short", "int", "long", "char", "float", "double", "void", "var"}
)

MODIFIER_WORDS = frozenset(
    {
        "public", "private", "protected", "static", "final", "abstract",
        "native", "synchronized", "transient", "volatile", "strictfp", "default",
    }
)

ASSIGN_OPS = frozenset(
    {"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>="}
)

_BINARY_LEVELS = [
    ("||",),
    ("&&",),
    ("|",),
    ("^",),
    ("&",),
    ("==", "!="),
    ("<", ">", "<=", ">="),  # instanceof handled at this level
    ("<<", ">>", ">>>"),
    ("+", "-"),
    ("*", "/", "%"),
]


class ParseError(Exception):
    def __init__(self, message: str, pos: int) -> None:
        super().__init__(message)
        self.pos = pos


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0
        self._splits: list[tuple[int, Token]] = []

    # ---- token plumbing -------------------------------------------------

    def _mark(self) -> tuple[int, int]:
        return (self.pos, len(self._splits))

    def _restore(self, mark: tuple[int, int]) -> None:
        pos, nsplits = mark
        while len(self._splits) > nsplits:
            idx, tok = self._splits.pop()
            self.tokens[idx] = tok
        self.pos = pos

    def _peek(self, ahead: int = 0) -> Token | None:
        i = self.pos + ahead
        return self.tokens[i] if i < len(self.tokens) else None

    def _at(self, text: str) -> bool:
        tok = self._peek()
        return tok is not None and tok.text == text

    def _at_any(self, texts) -> bool:
        tok = self._peek()
        return tok is not None and tok.text in texts

    def _advance(self) -> Token:
        tok = self._peek()
        if tok is None:
            raise ParseError("unexpected end of input", len(self.text))
        self.pos += 1
        return tok

    def _expect(self, text: str) -> Token:
        tok = self._peek()
        if tok is None or tok.text != text:
            at = tok.text if tok else "<eof>"
            raise ParseError(f"expected {text!r}, found {at!r}", self._here())
        return self._advance()

    def _expect_identifier(self) -> Token:
        tok = self._peek()
        if tok is None or tok.kind != "identifier":
            at = tok.text if tok else "<eof>"
            raise ParseError(f"expected identifier, found {at!r}", self._here())
        return self._advance()

    def _here(self) -> int:
        tok = self._peek()
        return tok.start if tok else len(self.text)

    def _prev_end(self) -> int:
        return self.tokens[self.pos - 1].end if self.pos > 0 else 0

    def _consume_gt(self) -> None:
        """Consumes one '>' of a generic closer, splitting >> and >>> tokens."""
        tok = self._peek()
        if tok is None:
            raise ParseError("expected '>'", len(self.text))
        if tok.text == ">":
            self._advance()
            return
        if tok.text in (">>", ">>>", ">="):
            self._splits.append((self.pos, tok))
            rest = tok.text[1:]
            kind = "operator"
            self.tokens[self.pos] = Token(rest, kind, tok.start + 1, tok.end)
            return
        raise ParseError(f"expected '>', found {tok.text!r}", tok.start)

    # ---- program level --------------------------------------------------

    def parse_program(self) -> Node:
        children: list[Node] = []
        start = self._here()
        if self._at("package"):
            children.append(self._parse_package())
        while self._at("import"):
            children.append(self._guarded(self._parse_import, self._recover_statement))
        while self._peek() is not None:
            if self._at(";"):
                tok = self._advance()
                children.append(Node("empty_stmt", tok.start, tok.end))
                continue
            children.append(self._guarded(self._parse_type_decl, self._recover_member))
        return Node("program", 0, len(self.text), children)

    def _guarded(self, production, recovery) -> Node:
        mark = self._mark()
        try:
            return production()
        except ParseError:
            self._restore(mark)
            return recovery()

    def _parse_package(self) -> Node:
        start = self._expect("package").start
        self._parse_qualified_name()
        end = self._expect(";").end
        return Node("package_decl", start, end)

    def _parse_import(self) -> Node:
        start = self._expect("import").start
        if self._at("static"):
            self._advance()
        self._parse_qualified_name()
        if self._at("."):
            self._advance()
            self._expect("*")
        end = self._expect(";").end
        return Node("import_decl", start, end)

    def _parse_qualified_name(self) -> list[Token]:
        parts = [self._expect_identifier()]
        while self._at(".") and self._is_identifier(1):
            self._advance()
            parts.append(self._expect_identifier())
        return parts

    def _is_identifier(self, ahead: int = 0) -> bool:
        tok = self._peek(ahead)
        return tok is not None and tok.kind == "identifier"

    # ---- type declarations ----------------------------------------------

    def _parse_type_decl(self) -> Node:
        start = self._here()
        anns = self._parse_modifiers()
        tok = self._peek()
        if tok is None or tok.text not in ("class", "interface", "enum"):
            raise ParseError("expected type declaration", self._here())
        keyword = self._advance().text
        name_tok = self._expect_identifier()
        children: list[Node] = list(anns)
        name_node = Node("identifier", name_tok.start, name_tok.end)
        children.append(name_node)
        if self._at("<"):
            children.append(self._parse_type_params())
        while self._at_any(("extends", "implements")):
            self._advance()
            children.append(self._parse_type())
            while self._at(","):
                self._advance()
                children.append(self._parse_type())
        if keyword == "enum":
            body_children = self._parse_enum_body()
        else:
            body_children = self._parse_class_body(name_tok.text)
        children.extend(body_children)
        end = self._prev_end()
        kind = {"class": "class_decl", "interface": "interface_decl", "enum": "enum_decl"}[keyword]
        return Node(kind, start, end, children, value=name_tok.text)

    def _parse_class_body(self, class_name: str) -> list[Node]:
        self._expect("{")
        members: list[Node] = []
        while not self._at("}") and self._peek() is not None:
            if self._at(";"):
                self._advance()
                continue
            members.append(self._guarded(lambda: self._parse_member(class_name), self._recover_member))
        self._expect("}")
        return members

    def _parse_enum_body(self) -> list[Node]:
        self._expect("{")
        members: list[Node] = []
        while self._is_identifier() or self._at("@"):
            mark = self._mark()
            try:
                members.append(self._parse_enum_constant())
            except ParseError:
                self._restore(mark)
                break
            if self._at(","):
                self._advance()
            else:
                break
        if self._at(";"):
            self._advance()
            while not self._at("}") and self._peek() is not None:
                if self._at(";"):
                    self._advance()
                    continue
                members.append(self._guarded(lambda: self._parse_member(""), self._recover_member))
        self._expect("}")
        return members

    def _parse_enum_constant(self) -> Node:
        start = self._here()
        while self._at("@"):
            self._parse_annotation()
        name_tok = self._expect_identifier()
        children = [Node("identifier", name_tok.start, name_tok.end)]
        if self._at("("):
            children.append(self._parse_args())
        if self._at("{"):
            children.extend(self._parse_class_body(""))
        return Node("enum_const", start, self._prev_end(), children, value=name_tok.text)

    def _parse_member(self, class_name: str) -> Node:
        if self._at_any(("class", "interface", "enum")) or self._member_is_type_decl():
            return self._parse_type_decl()
        start = self._here()
        anns = self._parse_modifiers()
        if self._at_any(("class", "interface", "enum")):
            return self._parse_type_decl()
        if self._at("{"):  # instance or static initializer
            block = self._parse_block()
            return Node("initializer_block", start, block.end, [block])
        children: list[Node] = list(anns)
        if self._at("<"):
            children.append(self._parse_type_params())
        # Constructor: name token equals the class name, directly before '('.
        if self._is_identifier() and self._peek().text == class_name and self._peek(1) is not None \
                and self._peek(1).text == "(":
            name_tok = self._advance()
            children.append(Node("identifier", name_tok.start, name_tok.end))
            children.extend(self._parse_params())
            self._skip_throws()
            children.append(self._parse_block())
            return Node("constructor_decl", start, self._prev_end(), children, value=name_tok.text)
        rtype = self._parse_type()
        if self._is_identifier() and self._peek(1) is not None and self._peek(1).text == "(":
            name_tok = self._advance()
            children.append(rtype)
            children.append(Node("identifier", name_tok.start, name_tok.end))
            children.extend(self._parse_params())
            while self._at("["):
                self._advance()
                self._expect("]")
            self._skip_throws()
            if self._at(";"):
                self._advance()
            elif self._at("default"):
                self._advance()
                self._parse_expression()
                self._expect(";")
            else:
                children.append(self._parse_block())
            return Node("method_decl", start, self._prev_end(), children, value=name_tok.text)
        # Field declaration.
        children.append(rtype)
        children.append(self._parse_var_declarator())
        while self._at(","):
            self._advance()
            children.append(self._parse_var_declarator())
        end = self._expect(";").end
        return Node("field_decl", start, end, children)

    def _member_is_type_decl(self) -> bool:
        """Looks ahead over modifiers for a class/interface/enum keyword."""
        i = 0
        while True:
            tok = self._peek(i)
            if tok is None:
                return False
            if tok.text in MODIFIER_WORDS:
                i += 1
                continue
            if tok.text == "@":
                # Skip annotation name (and stop scanning on arguments).
                i += 1
                while self._peek(i) is not None and self._peek(i).kind == "identifier":
                    i += 1
                    if self._peek(i) is not None and self._peek(i).text == ".":
                        i += 1
                        continue
                    break
                if self._peek(i) is not None and self._peek(i).text == "(":
                    return False
                continue
            return tok.text in ("class", "interface", "enum")

    def _parse_modifiers(self) -> list[Node]:
        anns: list[Node] = []
        while True:
            if self._at("@") and not (self._peek(1) is not None and self._peek(1).text == "interface"):
                anns.append(self._parse_annotation())
                continue
            tok = self._peek()
            if tok is not None and tok.text in MODIFIER_WORDS:
                nxt = self._peek(1)
                if tok.text == "synchronized" and nxt is not None and nxt.text == "(":
                    break
                if tok.text == "default" and nxt is not None and nxt.text == ":":
                    break
                self._advance()
                continue
            break
        return anns

    def _parse_annotation(self) -> Node:
        start = self._expect("@").start
        self._parse_qualified_name()
        if self._at("("):
            depth = 0
            while self._peek() is not None:
                tok = self._advance()
                if tok.text == "(":
                    depth += 1
                elif tok.text == ")":
                    depth -= 1
                    if depth == 0:
                        break
        return Node("annotation", start, self._prev_end())

    def _parse_type_params(self) -> Node:
        start = self._expect("<").start
        depth = 1
        while depth > 0:
            tok = self._peek()
            if tok is None:
                raise ParseError("unterminated type parameters", len(self.text))
            if tok.text == "<":
                depth += 1
                self._advance()
            elif tok.text in (">", ">>", ">>>"):
                take = min(depth, len(tok.text))
                for _ in range(take):
                    self._consume_gt()
                depth -= take
            elif tok.text in (";", "{", ")"):
                raise ParseError("unterminated type parameters", tok.start)
            else:
                self._advance()
        return Node("type_params", start, self._prev_end())

    def _skip_throws(self) -> None:
        if self._at("throws"):
            self._advance()
            self._parse_type()
            while self._at(","):
                self._advance()
                self._parse_type()

    def _parse_params(self) -> list[Node]:
        self._expect("(")
        params: list[Node] = []
        if not self._at(")"):
            params.append(self._parse_param())
            while self._at(","):
                self._advance()
                params.append(self._parse_param())
        self._expect(")")
        return params

    def _parse_param(self) -> Node:
        start = self._here()
        while self._at("@"):
            self._parse_annotation()
        while self._at("final"):
            self._advance()
        ptype = self._parse_type()
        if self._at("..."):
            self._advance()
        name_tok = self._expect_identifier()
        children = [ptype, Node("identifier", name_tok.start, name_tok.end)]
        while self._at("["):
            self._advance()
            self._expect("]")
        return Node("param", start, self._prev_end(), children, value=name_tok.text)

    # ---- types -----------------------------------------------------------

    def _parse_type(self) -> Node:
        start = self._here()
        while self._at("@"):
            self._parse_annotation()
        children: list[Node] = []
        tok = self._peek()
        if tok is None:
            raise ParseError("expected type", len(self.text))
        if tok.text in PRIMITIVE_TYPES:
            self._advance()
        else:
            if tok.kind != "identifier":
                raise ParseError(f"expected type, found {tok.text!r}", tok.start)
            name_tok = self._advance()
            children.append(Node("identifier", name_tok.start, name_tok.end))
            if self._at("<"):
                children.extend(self._parse_type_args())
            while self._at(".") and self._is_identifier(1):
                self._advance()
                seg = self._advance()
                children.append(Node("identifier", seg.start, seg.end))
                if self._at("<"):
                    children.extend(self._parse_type_args())
        while self._at("[") and self._peek(1) is not None and self._peek(1).text == "]":
            self._advance()
            self._advance()
        return Node("type_ref", start, self._prev_end(), children)

    def _parse_type_args(self) -> list[Node]:
        self._expect("<")
        args: list[Node] = []
        if self._at_any((">", ">>", ">>>")):  # diamond
            self._consume_gt()
            return args
        args.append(self._parse_type_arg())
        while self._at(","):
            self._advance()
            args.append(self._parse_type_arg())
        self._consume_gt()
        return args

    def _parse_type_arg(self) -> Node:
        if self._at("?"):
            start = self._advance().start
            children: list[Node] = []
            if self._at_any(("extends", "super")):
                self._advance()
                children.append(self._parse_type())
            return Node("type_ref", start, self._prev_end(), children)
        return self._parse_type()

    # ---- statements --------------------------------------------------------

    def _parse_block(self) -> Node:
        start = self._expect("{").start
        children: list[Node] = []
        while not self._at("}") and self._peek() is not None:
            children.append(self._guarded(self._parse_statement, self._recover_statement))
        end = self._expect("}").end
        return Node("block", start, end, children)

    def _parse_statement(self) -> Node:
        tok = self._peek()
        if tok is None:
            raise ParseError("expected statement", len(self.text))
        text = tok.text
        if text == "{":
            return self._parse_block()
        if text == ";":
            self._advance()
            return Node("empty_stmt", tok.start, tok.end)
        if text == "if":
            return self._parse_if()
        if text == "while":
            return self._parse_while()
        if text == "do":
            return self._parse_do()
        if text == "for":
            return self._parse_for()
        if text == "return":
            self._advance()
            children = []
            if not self._at(";"):
                children.append(self._parse_expression())
            end = self._expect(";").end
            return Node("return_stmt", tok.start, end, children)
        if text == "throw":
            self._advance()
            expr = self._parse_expression()
            end = self._expect(";").end
            return Node("throw_stmt", tok.start, end, [expr])
        if text == "try":
            return self._parse_try()
        if text == "switch":
            return self._parse_switch()
        if text in ("break", "continue"):
            self._advance()
            children = []
            if self._is_identifier():
                name = self._advance()
                children.append(Node("identifier", name.start, name.end))
            end = self._expect(";").end
            kind = "break_stmt" if text == "break" else "continue_stmt"
            return Node(kind, tok.start, end, children)
        if text == "synchronized" and self._peek(1) is not None and self._peek(1).text == "(":
            self._advance()
            self._expect("(")
            expr = self._parse_expression()
            self._expect(")")
            body = self._parse_block()
            return Node("sync_stmt", tok.start, body.end, [expr, body])
        if text == "assert":
            self._advance()
            children = [self._parse_expression()]
            if self._at(":"):
                self._advance()
                children.append(self._parse_expression())
            end = self._expect(";").end
            return Node("assert_stmt", tok.start, end, children)
        if text in ("class", "interface", "enum") or (
            text in ("final", "abstract", "static") and self._peek(1) is not None
            and self._peek(1).text in ("class", "interface", "enum")
        ):
            return self._parse_type_decl()
        if tok.kind == "identifier" and self._peek(1) is not None and self._peek(1).text == ":" \
                and (self._peek(2) is None or self._peek(2).text != ":"):
            label = self._advance()
            self._advance()
            inner = self._parse_statement()
            label_node = Node("identifier", label.start, label.end)
            return Node("labeled_stmt", label.start, inner.end, [label_node, inner])
        decl = self._try_local_var_decl(require_semi=True)
        if decl is not None:
            return decl
        expr = self._parse_expression()
        end = self._expect(";").end
        return Node("expr_stmt", tok.start, end, [expr])

    def _try_local_var_decl(self, require_semi: bool) -> Node | None:
        tok = self._peek()
        if tok is None:
            return None
        starts_ok = tok.text == "final" or tok.text == "@" or tok.text in PRIMITIVE_TYPES \
            or tok.kind == "identifier"
        if not starts_ok:
            return None
        mark = self._mark()
        start = tok.start
        try:
            while self._at("final") or self._at("@"):
                if self._at("@"):
                    self._parse_annotation()
                else:
                    self._advance()
            vtype = self._parse_type()
            if not self._is_identifier():
                raise ParseError("not a declaration", self._here())
            follow = self._peek(1)
            if follow is None or follow.text not in ("=", ",", ";", "["):
                raise ParseError("not a declaration", self._here())
            children = [vtype, self._parse_var_declarator()]
            while self._at(","):
                self._advance()
                children.append(self._parse_var_declarator())
            if require_semi:
                end = self._expect(";").end
            else:
                end = self._prev_end()
            return Node("local_var_decl", start, end, children)
        except ParseError:
            self._restore(mark)
            return None

    def _parse_var_declarator(self) -> Node:
        name_tok = self._expect_identifier()
        children = [Node("identifier", name_tok.start, name_tok.end)]
        while self._at("[") and self._peek(1) is not None and self._peek(1).text == "]":
            self._advance()
            self._advance()
        if self._at("="):
            self._advance()
            if self._at("{"):
                children.append(self._parse_array_init())
            else:
                children.append(self._parse_expression())
        return Node("var_declarator", name_tok.start, self._prev_end(), children, value=name_tok.text)

    def _parse_array_init(self) -> Node:
        start = self._expect("{").start
        children: list[Node] = []
        while not self._at("}") and self._peek() is not None:
            if self._at("{"):
                children.append(self._parse_array_init())
            else:
                children.append(self._parse_expression())
            if self._at(","):
                self._advance()
        end = self._expect("}").end
        return Node("array_init", start, end, children)

    def _parse_if(self) -> Node:
        start = self._expect("if").start
        self._expect("(")
        cond = self._parse_expression()
        self._expect(")")
        then = self._parse_statement()
        children = [cond, then]
        if self._at("else"):
            self._advance()
            children.append(self._parse_statement())
        return Node("if_stmt", start, self._prev_end(), children)

    def _parse_while(self) -> Node:
        start = self._expect("while").start
        self._expect("(")
        cond = self._parse_expression()
        self._expect(")")
        body = self._parse_statement()
        return Node("while_stmt", start, body.end, [cond, body])

    def _parse_do(self) -> Node:
        start = self._expect("do").start
        body = self._parse_statement()
        self._expect("while")
        self._expect("(")
        cond = self._parse_expression()
        self._expect(")")
        end = self._expect(";").end
        return Node("do_stmt", start, end, [body, cond])

    def _parse_for(self) -> Node:
        start = self._expect("for").start
        self._expect("(")
        mark = self._mark()
        # Enhanced for: [final] Type name : iterable
        try:
            while self._at("final") or self._at("@"):
                if self._at("@"):
                    self._parse_annotation()
                else:
                    self._advance()
            vtype = self._parse_type()
            name_tok = self._expect_identifier()
            self._expect(":")
            var = Node(
                "foreach_var",
                vtype.start,
                name_tok.end,
                [vtype, Node("identifier", name_tok.start, name_tok.end)],
                value=name_tok.text,
            )
            iterable = self._parse_expression()
            self._expect(")")
            body = self._parse_statement()
            return Node("foreach_stmt", start, body.end, [var, iterable, body])
        except ParseError:
            self._restore(mark)
        init_start = self._here()
        init_children: list[Node] = []
        if not self._at(";"):
            decl = self._try_local_var_decl(require_semi=False)
            if decl is not None:
                init_children.append(decl)
            else:
                init_children.append(self._parse_expression())
                while self._at(","):
                    self._advance()
                    init_children.append(self._parse_expression())
        init = Node("for_init", init_start, self._prev_end() if init_children else init_start, init_children)
        self._expect(";")
        cond_start = self._here()
        cond_children = [] if self._at(";") else [self._parse_expression()]
        cond = Node("for_cond", cond_start, self._prev_end() if cond_children else cond_start, cond_children)
        self._expect(";")
        upd_start = self._here()
        upd_children: list[Node] = []
        if not self._at(")"):
            upd_children.append(self._parse_expression())
            while self._at(","):
                self._advance()
                upd_children.append(self._parse_expression())
        update = Node("for_update", upd_start, self._prev_end() if upd_children else upd_start, upd_children)
        self._expect(")")
        body = self._parse_statement()
        return Node("for_stmt", start, body.end, [init, cond, update, body])

    def _parse_try(self) -> Node:
        start = self._expect("try").start
        children: list[Node] = []
        if self._at("("):
            res_start = self._advance().start
            res_children: list[Node] = []
            while not self._at(")") and self._peek() is not None:
                decl = self._try_local_var_decl(require_semi=False)
                if decl is None:
                    res_children.append(self._parse_expression())
                else:
                    res_children.append(decl)
                if self._at(";"):
                    self._advance()
            end = self._expect(")").end
            children.append(Node("resources", res_start, end, res_children))
        children.append(self._parse_block())
        while self._at("catch"):
            cstart = self._advance().start
            self._expect("(")
            pstart = self._here()
            while self._at("final") or self._at("@"):
                if self._at("@"):
                    self._parse_annotation()
                else:
                    self._advance()
            ptypes = [self._parse_type()]
            while self._at("|"):
                self._advance()
                ptypes.append(self._parse_type())
            name_tok = self._expect_identifier()
            param = Node(
                "catch_param",
                pstart,
                name_tok.end,
                ptypes + [Node("identifier", name_tok.start, name_tok.end)],
                value=name_tok.text,
            )
            self._expect(")")
            body = self._parse_block()
            children.append(Node("catch_clause", cstart, body.end, [param, body]))
        if self._at("finally"):
            fstart = self._advance().start
            body = self._parse_block()
            children.append(Node("finally_clause", fstart, body.end, [body]))
        return Node("try_stmt", start, self._prev_end(), children)

    def _parse_switch(self) -> Node:
        start = self._expect("switch").start
        self._expect("(")
        selector = self._parse_expression()
        self._expect(")")
        self._expect("{")
        children: list[Node] = [selector]
        current: Node | None = None
        while not self._at("}") and self._peek() is not None:
            if self._at("case"):
                cstart = self._advance().start
                label = self._parse_expression()
                self._expect(":")
                current = Node("switch_case", cstart, self._prev_end(), [label])
                children.append(current)
                continue
            if self._at("default"):
                cstart = self._advance().start
                self._expect(":")
                current = Node("switch_case", cstart, self._prev_end(), [])
                children.append(current)
                continue
            stmt = self._guarded(self._parse_statement, self._recover_statement)
            if current is None:
                current = Node("switch_case", stmt.start, stmt.end, [])
                children.append(current)
            current.children.append(stmt)
            current.end = stmt.end
        end = self._expect("}").end
        return Node("switch_stmt", start, end, children)

    # ---- expressions ------------------------------------------------------

    def _parse_expression(self) -> Node:
        return self._parse_assignment()

    def _parse_assignment(self) -> Node:
        lhs = self._parse_ternary()
        tok = self._peek()
        if tok is not None and tok.text in ASSIGN_OPS:
            op = self._advance()
            if self._at("{"):
                rhs: Node = self._parse_array_init()
            else:
                rhs = self._parse_assignment()
            return Node("assign_expr", lhs.start, rhs.end, [lhs, rhs], value=op.text)
        return lhs

    def _parse_ternary(self) -> Node:
        cond = self._parse_binary(0)
        if self._at("?"):
            self._advance()
            then = self._parse_expression()
            self._expect(":")
            other = self._parse_ternary()
            return Node("ternary_expr", cond.start, other.end, [cond, then, other])
        return cond

    def _parse_binary(self, level: int) -> Node:
        if level >= len(_BINARY_LEVELS):
            return self._parse_unary()
        ops = _BINARY_LEVELS[level]
        left = self._parse_binary(level + 1)
        while True:
            tok = self._peek()
            if tok is None:
                return left
            if "instanceof" == tok.text and ops == ("<", ">", "<=", ">="):
                self._advance()
                rtype = self._parse_type()
                left = Node("instanceof_expr", left.start, rtype.end, [left, rtype])
                continue
            if tok.text not in ops:
                return left
            if tok.text == "<" and self._looks_like_no_operand(1):
                return left
            self._advance()
            right = self._parse_binary(level + 1)
            left = Node("binary_expr", left.start, right.end, [left, right], value=tok.text)

    def _looks_like_no_operand(self, ahead: int) -> bool:
        tok = self._peek(ahead)
        return tok is None or tok.text in (")", "]", ",", ";", "}")

    def _parse_unary(self) -> Node:
        tok = self._peek()
        if tok is None:
            raise ParseError("expected expression", len(self.text))
        if tok.text in ("+", "-", "!", "~", "++", "--"):
            self._advance()
            operand = self._parse_unary()
            return Node("unary_expr", tok.start, operand.end, [operand], value=tok.text)
        if tok.text == "(":
            cast = self._try_cast()
            if cast is not None:
                return cast
        return self._parse_postfix()

    def _try_cast(self) -> Node | None:
        mark = self._mark()
        start = self._here()
        try:
            self._expect("(")
            ctype = self._parse_type()
            self._expect(")")
            nxt = self._peek()
            if nxt is None:
                raise ParseError("not a cast", self._here())
            is_primitive = len(ctype.children) == 0
            operand_start = (
                nxt.kind in ("identifier", "number", "string", "char")
                or nxt.text in ("(", "this", "super", "new", "true", "false", "null")
            )
            if not is_primitive:
                # (a) - b must stay a subtraction, not a cast of -b.
                if nxt.text in ("!", "~"):
                    operand_start = True
                elif nxt.text in ("+", "-", "++", "--"):
                    operand_start = False
            elif nxt.text in ("+", "-", "!", "~", "++", "--"):
                operand_start = True
            if not operand_start:
                raise ParseError("not a cast", self._here())
            operand = self._parse_unary()
            return Node("cast_expr", start, operand.end, [ctype, operand])
        except ParseError:
            self._restore(mark)
            return None

    def _parse_postfix(self) -> Node:
        node = self._parse_primary()
        while True:
            tok = self._peek()
            if tok is None:
                return node
            if tok.text == ".":
                nxt = self._peek(1)
                if nxt is None:
                    return node
                if nxt.text == "class":
                    self._advance()
                    end = self._advance().end
                    node = Node("class_literal", node.start, end, [node])
                    continue
                if nxt.text == "this":
                    self._advance()
                    end = self._advance().end
                    node = Node("field_access", node.start, end, [node, Node("this_expr", end - 4, end)])
                    continue
                if nxt.text == "new":
                    self._advance()
                    self._advance()
                    inner = self._parse_creator(node.start)
                    node = inner
                    continue
                if nxt.kind != "identifier":
                    return node
                self._advance()
                name_tok = self._advance()
                name_node = Node("identifier", name_tok.start, name_tok.end)
                if self._at("("):
                    args = self._parse_args()
                    node = Node("call_expr", node.start, args.end, [node, name_node, args])
                else:
                    node = Node("field_access", node.start, name_tok.end, [node, name_node])
                continue
            if tok.text == "[":
                self._advance()
                index = self._parse_expression()
                end = self._expect("]").end
                node = Node("array_access", node.start, end, [node, index])
                continue
            if tok.text == "::":
                self._advance()
                if self._at("new"):
                    name_tok = self._advance()
                else:
                    name_tok = self._expect_identifier()
                name_node = Node("identifier", name_tok.start, name_tok.end)
                node = Node("method_ref", node.start, name_tok.end, [node, name_node])
                continue
            if tok.text in ("++", "--"):
                self._advance()
                node = Node("postfix_expr", node.start, tok.end, [node], value=tok.text)
                continue
            return node

    def _parse_args(self) -> Node:
        start = self._expect("(").start
        children: list[Node] = []
        if not self._at(")"):
            children.append(self._parse_expression())
            while self._at(","):
                self._advance()
                children.append(self._parse_expression())
        end = self._expect(")").end
        return Node("args", start, end, children)

    def _parse_primary(self) -> Node:
        tok = self._peek()
        if tok is None:
            raise ParseError("expected expression", len(self.text))
        if tok.kind == "number":
            self._advance()
            return Node("number_literal", tok.start, tok.end)
        if tok.kind == "string":
            self._advance()
            return Node("string_literal", tok.start, tok.end)
        if tok.kind == "char":
            self._advance()
            return Node("char_literal", tok.start, tok.end)
        if tok.text in ("true", "false"):
            self._advance()
            return Node("boolean_literal", tok.start, tok.end)
        if tok.text == "null":
            self._advance()
            return Node("null_literal", tok.start, tok.end)
        if tok.text == "this":
            self._advance()
            node = Node("this_expr", tok.start, tok.end)
            if self._at("("):
                args = self._parse_args()
                return Node("call_expr", tok.start, args.end, [node, args])
            return node
        if tok.text == "super":
            self._advance()
            node = Node("super_expr", tok.start, tok.end)
            if self._at("("):
                args = self._parse_args()
                return Node("call_expr", tok.start, args.end, [node, args])
            return node
        if tok.text == "new":
            self._advance()
            return self._parse_creator(tok.start)
        if tok.text == "(":
            lambda_node = self._try_lambda()
            if lambda_node is not None:
                return lambda_node
            self._advance()
            inner = self._parse_expression()
            end = self._expect(")").end
            return Node("paren_expr", tok.start, end, [inner])
        if tok.kind == "identifier":
            nxt = self._peek(1)
            if nxt is not None and nxt.text == "->":
                self._advance()
                self._advance()
                body = self._parse_lambda_body()
                param = Node("identifier", tok.start, tok.end)
                return Node("lambda_expr", tok.start, body.end, [param, body])
            self._advance()
            name_node = Node("identifier", tok.start, tok.end)
            if self._at("("):
                args = self._parse_args()
                return Node("call_expr", tok.start, args.end, [name_node, args])
            return name_node
        if tok.kind in ("keyword",) and tok.text in PRIMITIVE_TYPES:
            # Primitive class literal: int.class
            self._advance()
            if self._at(".") and self._peek(1) is not None and self._peek(1).text == "class":
                self._advance()
                end = self._advance().end
                return Node("class_literal", tok.start, end)
            raise ParseError(f"unexpected {tok.text!r}", tok.start)
        raise ParseError(f"unexpected {tok.text!r}", tok.start)

    def _try_lambda(self) -> Node | None:
        # At '(' -- scan for the matching ')' and check for '->'.
        depth = 0
        i = self.pos
        while i < len(self.tokens):
            text = self.tokens[i].text
            if text == "(":
                depth += 1
            elif text == ")":
                depth -= 1
                if depth == 0:
                    nxt = self.tokens[i + 1] if i + 1 < len(self.tokens) else None
                    if nxt is None or nxt.text != "->":
                        return None
                    break
            elif text in (";", "{"):
                return None
            i += 1
        else:
            return None
        mark = self._mark()
        try:
            start = self._expect("(").start
            params: list[Node] = []
            while not self._at(")"):
                while self._at("final") or self._at("@"):
                    if self._at("@"):
                        self._parse_annotation()
                    else:
                        self._advance()
                first = self._expect_identifier()
                if self._is_identifier() or self._at("<") or self._at("["):
                    # Typed parameter: re-parse the type properly.
                    self._restore((self.pos - 1, len(self._splits)))
                    self._parse_type()
                    name_tok = self._expect_identifier()
                else:
                    name_tok = first
                params.append(Node("identifier", name_tok.start, name_tok.end))
                if self._at(","):
                    self._advance()
            self._expect(")")
            self._expect("->")
            body = self._parse_lambda_body()
            return Node("lambda_expr", start, body.end, params + [body])
        except ParseError:
            self._restore(mark)
            return None

    def _parse_lambda_body(self) -> Node:
        if self._at("{"):
            return self._parse_block()
        return self._parse_expression()

    def _parse_creator(self, start: int) -> Node:
        ctype = self._parse_type_for_new()
        if self._at("["):
            children: list[Node] = [ctype]
            while self._at("["):
                self._advance()
                if self._at("]"):
                    self._advance()
                else:
                    children.append(self._parse_expression())
                    self._expect("]")
            if self._at("{"):
                children.append(self._parse_array_init())
            return Node("array_new_expr", start, self._prev_end(), children)
        args = self._parse_args() if self._at("(") else Node("args", self._prev_end(), self._prev_end())
        children = [ctype, args]
        if self._at("{"):
            body_start = self._here()
            members = self._parse_class_body("")
            children.append(Node("anon_body", body_start, self._prev_end(), members))
        return Node("new_expr", start, self._prev_end(), children)

    def _parse_type_for_new(self) -> Node:
        # Like _parse_type but without trailing array dims (sizes follow).
        start = self._here()
        children: list[Node] = []
        tok = self._peek()
        if tok is None:
            raise ParseError("expected type", len(self.text))
        if tok.text in PRIMITIVE_TYPES:
            self._advance()
        else:
            if tok.kind != "identifier":
                raise ParseError(f"expected type, found {tok.text!r}", tok.start)
            name_tok = self._advance()
            children.append(Node("identifier", name_tok.start, name_tok.end))
            if self._at("<"):
                children.extend(self._parse_type_args())
            while self._at(".") and self._is_identifier(1):
                self._advance()
                seg = self._advance()
                children.append(Node("identifier", seg.start, seg.end))
                if self._at("<"):
                    children.extend(self._parse_type_args())
        return Node("type_ref", start, self._prev_end(), children)

    # ---- recovery ----------------------------------------------------------

    def _recover_statement(self) -> Node:
        start = self._here()
        if self._peek() is None:
            return Node("error", start, len(self.text))
        depth = 0
        while self._peek() is not None:
            tok = self._peek()
            if depth == 0 and tok.text == "}":
                break
            self._advance()
            if tok.text == "{":
                depth += 1
            elif tok.text == "}":
                depth -= 1
                if depth <= 0:
                    break
            elif tok.text == ";" and depth == 0:
                break
        end = self._prev_end()
        if end <= start:
            # Ensure progress even on a lone closer.
            tok = self._advance()
            end = tok.end
        return Node("error", start, end)

    def _recover_member(self) -> Node:
        return self._recover_statement()


def parse_program(text: str) -> Node:
    """Parses a compilation unit; unparseable stretches become error nodes."""
    return _Parser(text).parse_program()


def parse_snippet(snippet: str) -> tuple[Node, str, int]:
    """Parses a bare statement or expression snippet.

    The snippet is wrapped in a synthetic class and method so the normal
    grammar applies.  Returns (program node, wrapped text, offset of the
    snippet within the wrapped text); all node spans index the wrapped text.
    """
    body = snippet.strip()
    if not body.endswith(";") and not body.endswith("}"):
        body = body + ";"
    prefix = "class __Snippet { void __snippet() { "
    wrapped = prefix + body + " } }"
    program = parse_program(wrapped)
    return program, wrapped, len(prefix)
