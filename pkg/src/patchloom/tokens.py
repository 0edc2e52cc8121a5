"""Token schemes and bag similarity.

Five schemes cover the pipeline's needs:

- lexical:      verbatim lexer tokens with spans (comments dropped)
- lcs0:         compacted texts of a statement and its sub-expressions
- lcs1:         conceptual tokens of identifiers and keywords, source order
- lcs2:         lcs1 plus every operator and punctuation token, interleaved
- struct_kgram: length-k windows over the method body's node-kind sequence

Conceptual tokens split camelCase and underscores; a single-word name also
contributes its stem when the stem differs.  Similarity for every scheme is
the list-adapted Dice coefficient over multisets.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .corpus import (
    IdentifierBinding,
    MethodChunk,
    SourceUnit,
    resolve_bindings,
    segment,
)
from .parser import parse_snippet
from .stemmer import stem
from .tree import EXPRESSION_KINDS, Node, compact, kind_sequence

SCHEMES = ("lexical", "lcs0", "lcs1", "lcs2", "struct_kgram")

PARAM_SYMBOLS = {"variable": "$v$", "type": "$t$", "method": "$m$"}

_FI_LABELS = {
    "M0": ("FI0", "combined boolean condition"),
    "M1": ("FI1", "parent of the changed expression"),
    "M2": ("FI2", "changed if-condition"),
    "M3": ("FI3", "added if-condition"),
    "M4": ("FI4", "replacement statement"),
    "M5": ("FI5", "inserted statement"),
}


@dataclass
class TokenBag:
    scheme: str
    tokens: list[str]
    spans: list[tuple[int, int]] | None = None

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass
class FixIngredient:
    """A code snippet audited for presence in a program or corpus."""

    snippet: str
    mclass: str
    ficlass: str
    description: str
    unit: SourceUnit
    bag: TokenBag
    bindings: list[IdentifierBinding]


def split_words(name: str) -> list[str]:
    """Splits an identifier into sub-words on underscores and case changes."""
    parts: list[str] = []
    for chunk in name.replace("$", "_").split("_"):
        if not chunk:
            continue
        start = 0
        for i in range(1, len(chunk)):
            prev, cur = chunk[i - 1], chunk[i]
            boundary = (prev.islower() or prev.isdigit()) and cur.isupper()
            if not boundary and cur.isupper() and i + 1 < len(chunk) and chunk[i + 1].islower():
                boundary = prev.isupper()
            if boundary:
                parts.append(chunk[start:i])
                start = i
        parts.append(chunk[start:])
    return [p for p in parts if p]


def conceptual_tokens(name: str) -> list[str]:
    """Lowercased name, plus sub-words if multi-word, else stem if distinct."""
    lowered = name.lower()
    words = split_words(name)
    if len(words) > 1:
        return [lowered] + [w.lower() for w in words]
    stemmed = stem(lowered)
    if stemmed != lowered:
        return [lowered, stemmed]
    return [lowered]


# ---- scheme extraction -------------------------------------------------------


def chunk_tokens(unit: SourceUnit, node: Node, scheme: str) -> TokenBag:
    """Token bag for one tree node (statement, expression, or method)."""
    if scheme == "lexical":
        toks = unit.tokens_in(node.start, node.end)
        return TokenBag("lexical", [t.text for t in toks], [(t.start, t.end) for t in toks])
    if scheme == "lcs0":
        out: list[str] = []
        _lcs0_walk(node, unit.text, out)
        return TokenBag("lcs0", out)
    if scheme == "lcs1":
        return TokenBag("lcs1", _conceptual_stream(unit, node, with_symbols=False))
    if scheme == "lcs2":
        return TokenBag("lcs2", _conceptual_stream(unit, node, with_symbols=True))
    raise ValueError(f"unknown scheme {scheme!r}")


def _conceptual_stream(unit: SourceUnit, node: Node, with_symbols: bool) -> list[str]:
    out: list[str] = []
    for tok in unit.tokens_in(node.start, node.end):
        if tok.kind == "identifier":
            out.extend(conceptual_tokens(tok.text))
        elif tok.kind == "keyword":
            out.append(tok.text)
        elif with_symbols and tok.kind in ("operator", "punct"):
            out.append(tok.text)
    return out


def _lcs0_walk(node: Node, text: str, out: list[str]) -> None:
    emit = (
        node.is_statement()
        or node.kind in EXPRESSION_KINDS
        or node.kind in ("type_ref", "var_declarator")
    )
    if emit:
        out.append(compact(node.text(text)))
    if node.kind == "type_ref":
        return  # the type text stands for the whole reference
    if node.kind == "call_expr" and len(node.children) == 3:
        receiver, name, args = node.children
        _lcs0_walk(receiver, text, out)
        out.append(compact(name.text(text) + args.text(text)))
        for arg in args.children:
            _lcs0_walk(arg, text, out)
        return
    for child in node.children:
        _lcs0_walk(child, text, out)


def structural_kgrams(method: MethodChunk, k: int = 3) -> TokenBag:
    """Multiset of k-length windows over the body's collapsed kind sequence."""
    if k < 1:
        raise ValueError("k must be positive")
    body = method.body if method.body is not None else method.node
    seq = kind_sequence(body)
    if len(seq) <= k:
        grams = [",".join(seq)]
    else:
        grams = [",".join(seq[i : i + k]) for i in range(len(seq) - k + 1)]
    return TokenBag("struct_kgram", grams)


# ---- parameterization --------------------------------------------------------


def parameterize(bag: TokenBag, bindings: list[IdentifierBinding]) -> TokenBag:
    """Replaces program-specific identifiers with $v$ / $t$ / $m$ symbols.

    Tokens are matched to bindings by span when the bag carries spans, by
    name otherwise.  Standard-library identifiers, keywords, literals, and
    symbols pass through unchanged; the result is idempotent.
    """
    if bag.scheme != "lexical":
        raise ValueError("parameterize expects a lexical bag")
    span_map: dict[tuple[int, int], IdentifierBinding] = {}
    name_map: dict[str, IdentifierBinding] = {}
    for binding in bindings:
        if binding.origin != "program":
            continue
        if binding.name not in name_map:
            name_map[binding.name] = binding
        for site in binding.use_sites:
            span_map[site] = binding
        if binding.decl_site is not None:
            span_map[binding.decl_site] = binding
    tokens: list[str] = []
    for i, tok in enumerate(bag.tokens):
        binding = None
        if bag.spans is not None:
            binding = span_map.get(bag.spans[i])
        if binding is None:
            binding = name_map.get(tok)
        if binding is not None:
            tokens.append(PARAM_SYMBOLS[binding.kind])
        else:
            tokens.append(tok)
    return TokenBag("lexical", tokens, bag.spans)


# ---- similarity --------------------------------------------------------------


def dice_list(a: TokenBag, b: TokenBag) -> float:
    """List-adapted Dice: 2*|multiset intersection| / (|a| + |b|)."""
    if a.scheme != b.scheme:
        raise ValueError(f"scheme mismatch: {a.scheme!r} vs {b.scheme!r}")
    denom = len(a.tokens) + len(b.tokens)
    if denom == 0:
        return 0.0
    m = sum((Counter(a.tokens) & Counter(b.tokens)).values())
    return (2.0 * m) / denom


# ---- fix ingredients ---------------------------------------------------------


def make_fix_ingredient(snippet: str, mclass: str) -> FixIngredient:
    """Parses a snippet and prepares its lexical bag and bindings.

    The snippet has no surrounding scope, so each identifier's kind comes
    from its syntactic role and its origin from the symbol table alone.
    """
    if mclass not in _FI_LABELS:
        raise ValueError(f"unknown modification class {mclass!r}; expected M0..M5")
    ficlass, description = _FI_LABELS[mclass]
    program, wrapped, offset = parse_snippet(snippet)
    unit = SourceUnit.from_text(wrapped, "<snippet>")
    if any(n.kind == "error" for n in unit.tree.walk()):
        raise ValueError(f"snippet does not parse: {snippet!r}")
    methods, statements = segment(unit)
    method = methods[0]
    bindings = resolve_bindings(unit, method, include_class_members=False)
    # The synthetic wrapper method's own name is scaffolding, not snippet code.
    bindings = [b for b in bindings if b.name != "__snippet"]
    if not statements:
        raise ValueError(f"snippet holds no statement or expression: {snippet!r}")
    first, last = statements[0], statements[-1]
    toks = unit.tokens_in(first.node.start, last.node.end)
    texts = [t.text for t in toks]
    spans = [(t.start, t.end) for t in toks]
    # Drop the synthetic trailing semicolon added for bare expressions.
    if texts and texts[-1] == ";" and not snippet.rstrip().endswith((";", "}")):
        texts.pop()
        spans.pop()
    bag = TokenBag("lexical", texts, spans)
    return FixIngredient(snippet, mclass, ficlass, description, unit, bag, bindings)


def is_token_subsequence(needle: list[str], haystack: list[str]) -> bool:
    """True when needle's tokens appear in haystack in order (gaps allowed)."""
    if not needle:
        return True
    it = iter(haystack)
    return all(any(tok == h for h in it) for tok in needle)
