"""Java lexer producing a flat token stream with character spans.

The rest of the package works either on the token stream (lexical token
schemes, parameterization) or on the parse tree built from it, so every
token records its [start, end) offsets into the original text.  Comments
and whitespace are consumed but not emitted.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

KEYWORDS = frozenset(
    """
    abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package
    private protected public return short static strictfp super switch
    synchronized this throw throws transient try void volatile while
    true false null var record yield
    """.split()
)

# Longest-first so multi-character operators win over their prefixes.
OPERATORS = (
    ">>>=", ">>>", ">>=", "<<=", "->", "::", "==", "!=", "<=", ">=",
    "&&", "||", "++", "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=",
    "^=", "<<", ">>", "+", "-", "*", "/", "%", "=", "<", ">", "!", "~",
    "&", "|", "^", "?", ":",
)

PUNCTUATION = ("...", "(", ")", "{", "}", "[", "]", ";", ",", ".", "@")

_IDENT_START = frozenset(
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_$"
)
_IDENT_PART = _IDENT_START | frozenset("0123456789")
_DIGITS = frozenset("0123456789")


@dataclass(frozen=True)
class Token:
    """One lexical token: verbatim text, category, and character span."""

    text: str
    kind: str  # identifier | keyword | number | string | char | operator | punct | other
    start: int
    end: int


class LineIndex:
    """Maps character offsets to 1-based line numbers and back."""

    def __init__(self, text: str) -> None:
        self._starts = [0]
        for i, ch in enumerate(text):
            if ch == "\n":
                self._starts.append(i + 1)

    def line_of(self, offset: int) -> int:
        return bisect_right(self._starts, offset)

    def offset_of(self, line: int) -> int:
        """Offset of the first character of a 1-based line."""
        idx = min(max(line, 1), len(self._starts)) - 1
        return self._starts[idx]


def tokenize(text: str) -> list[Token]:
    """Lexes Java source, skipping whitespace and comments.

    Never raises: unexpected characters become single-char tokens of kind
    "other" and unterminated literals run to end of line or end of input.
    """
    tokens: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in " \t\r\n\f":
            i += 1
            continue
        if ch == "/" and i + 1 < n:
            nxt = text[i + 1]
            if nxt == "/":
                j = text.find("\n", i)
                i = n if j < 0 else j + 1
                continue
            if nxt == "*":
                j = text.find("*/", i + 2)
                i = n if j < 0 else j + 2
                continue
        if ch in _IDENT_START:
            j = i + 1
            while j < n and text[j] in _IDENT_PART:
                j += 1
            word = text[i:j]
            kind = "keyword" if word in KEYWORDS else "identifier"
            tokens.append(Token(word, kind, i, j))
            i = j
            continue
        if ch in _DIGITS or (ch == "." and i + 1 < n and text[i + 1] in _DIGITS):
            j = _scan_number(text, i)
            tokens.append(Token(text[i:j], "number", i, j))
            i = j
            continue
        if ch == '"':
            j = _scan_quoted(text, i, '"')
            tokens.append(Token(text[i:j], "string", i, j))
            i = j
            continue
        if ch == "'":
            j = _scan_quoted(text, i, "'")
            tokens.append(Token(text[i:j], "char", i, j))
            i = j
            continue
        punct = _match_fixed(text, i, PUNCTUATION)
        if punct:
            tokens.append(Token(punct, "punct", i, i + len(punct)))
            i += len(punct)
            continue
        op = _match_fixed(text, i, OPERATORS)
        if op:
            tokens.append(Token(op, "operator", i, i + len(op)))
            i += len(op)
            continue
        tokens.append(Token(ch, "other", i, i + 1))
        i += 1
    return tokens


def _match_fixed(text: str, i: int, table: tuple[str, ...]) -> str | None:
    for cand in table:
        if text.startswith(cand, i):
            return cand
    return None


def _scan_number(text: str, i: int) -> int:
    n = len(text)
    j = i
    if text.startswith(("0x", "0X", "0b", "0B"), i):
        j = i + 2
        while j < n and (text[j] in "0123456789abcdefABCDEF_"):
            j += 1
    else:
        seen_dot = False
        seen_exp = False
        while j < n:
            ch = text[j]
            if ch in _DIGITS or ch == "_":
                j += 1
            elif ch == "." and not seen_dot and not seen_exp:
                if j + 1 < n and text[j + 1] in _DIGITS:
                    seen_dot = True
                    j += 1
                elif j == i:
                    j += 1
                else:
                    break
            elif ch in "eE" and not seen_exp and j + 1 < n and (
                text[j + 1] in _DIGITS or text[j + 1] in "+-"
            ):
                seen_exp = True
                j += 2
            else:
                break
    if j < n and text[j] in "lLfFdD":
        j += 1
    return j


def _scan_quoted(text: str, i: int, quote: str) -> int:
    n = len(text)
    j = i + 1
    while j < n:
        ch = text[j]
        if ch == "\\" and j + 1 < n:
            j += 2
            continue
        if ch == quote:
            return j + 1
        if ch == "\n":
            return j
        j += 1
    return n
