"""Tokenizer for the metric query language.

Keywords are case-sensitive uppercase. Every token carries its byte
offset into the source so parse and scope errors can point at the
offending spot.
"""

from __future__ import annotations

from dataclasses import dataclass

KEYWORDS = ("MATCH", "WHERE", "WITH", "RETURN", "AS", "IN", "AND", "OR", "NOT", "DISTINCT")

_SYMBOLS = (
    # longest first
    ("<=", "LE"),
    (">=", "GE"),
    ("<>", "NE"),
    ("<-", "ARROW_LEFT"),
    ("->", "ARROW_RIGHT"),
    ("(", "LPAREN"),
    (")", "RPAREN"),
    ("[", "LBRACKET"),
    ("]", "RBRACKET"),
    ("{", "LBRACE"),
    ("}", "RBRACE"),
    (",", "COMMA"),
    (":", "COLON"),
    (".", "DOT"),
    ("=", "EQ"),
    ("<", "LT"),
    (">", "GT"),
    ("-", "DASH"),
)


class LexError(Exception):
    def __init__(self, message: str, offset: int, snippet: str):
        super().__init__(f"{message} at offset {offset}: {snippet!r}")
        self.offset = offset
        self.snippet = snippet


@dataclass(frozen=True)
class Token:
    kind: str  # keyword name, symbol name, IDENT, INT, FLOAT, STRING, EOF
    text: str
    offset: int
    value: object = None


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def _is_ident_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if _is_ident_start(ch):
            start = i
            while i < n and _is_ident_char(text[i]):
                i += 1
            word = text[start:i]
            if word in KEYWORDS:
                tokens.append(Token(word, word, start))
            else:
                tokens.append(Token("IDENT", word, start))
            continue
        if ch.isdigit():
            start = i
            while i < n and text[i].isdigit():
                i += 1
            if i < n and text[i] == "." and i + 1 < n and text[i + 1].isdigit():
                i += 1
                while i < n and text[i].isdigit():
                    i += 1
                literal = text[start:i]
                tokens.append(Token("FLOAT", literal, start, float(literal)))
            else:
                literal = text[start:i]
                tokens.append(Token("INT", literal, start, int(literal)))
            continue
        if ch == '"':
            start = i
            i += 1
            chars: list[str] = []
            while True:
                if i >= n:
                    raise LexError("unterminated string", start, text[start : start + 20])
                c = text[i]
                if c == "\\":
                    if i + 1 >= n:
                        raise LexError("unterminated string", start, text[start : start + 20])
                    escape = text[i + 1]
                    if escape not in ('"', "\\"):
                        raise LexError("bad escape", i, text[i : i + 2])
                    chars.append(escape)
                    i += 2
                    continue
                if c == '"':
                    i += 1
                    break
                chars.append(c)
                i += 1
            tokens.append(Token("STRING", text[start:i], start, "".join(chars)))
            continue
        for symbol, kind in _SYMBOLS:
            if text.startswith(symbol, i):
                tokens.append(Token(kind, symbol, i))
                i += len(symbol)
                break
        else:
            raise LexError("stray character", i, text[i : i + 10])
    tokens.append(Token("EOF", "", n))
    return tokens
