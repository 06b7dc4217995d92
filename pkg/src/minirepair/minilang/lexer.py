"""Tokenizer for Mini source text."""

from __future__ import annotations

from dataclasses import dataclass


KEYWORDS = {"fun", "var", "if", "else", "while", "return", "true", "false"}

# Longest first so "->" beats "-", "==" beats "=", etc.
PUNCTUATION = [
    "->", "||", "&&", "==", "!=", "<=", ">=",
    "<", ">", "+", "-", "*", "/", "%", "!", "=",
    "?", ":", "(", ")", "{", "}", ",", ";",
]

_ESCAPES = {"n": "\n", "t": "\t", "\\": "\\", '"': '"'}


@dataclass(frozen=True)
class Token:
    """``type`` is "IDENT", "INT", "FLOAT", "STRING", "EOF", or the keyword
    or punctuation text itself.  Positions are 1-based; ``end_col`` is the
    column of the token's last character."""

    type: str
    value: str
    line: int
    col: int
    end_line: int
    end_col: int


@dataclass(frozen=True)
class LexError:
    line: int
    col: int
    message: str


def tokenize(text: str) -> tuple[list[Token], list[LexError]]:
    """Token list always ends with an EOF token.  Unrecognized characters
    and unterminated strings are reported as errors and skipped."""
    tokens: list[Token] = []
    errors: list[LexError] = []
    i = 0
    line = 1
    col = 1
    n = len(text)

    def advance(k: int = 1) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if i < n and text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            advance()
            continue
        if ch == "/" and i + 1 < n and text[i + 1] == "/":
            while i < n and text[i] != "\n":
                advance()
            continue
        start_line, start_col = line, col
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            is_float = False
            if j < n and text[j] == "." and j + 1 < n and text[j + 1].isdigit():
                is_float = True
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    is_float = True
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            value = text[i:j]
            advance(j - i)
            tokens.append(Token("FLOAT" if is_float else "INT", value,
                                start_line, start_col, line, col - 1))
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            value = text[i:j]
            advance(j - i)
            ttype = value if value in KEYWORDS else "IDENT"
            tokens.append(Token(ttype, value, start_line, start_col, line, col - 1))
            continue
        if ch == '"':
            j = i + 1
            parts: list[str] = []
            bad_escape = None
            while j < n and text[j] != '"' and text[j] != "\n":
                if text[j] == "\\":
                    if j + 1 < n and text[j + 1] in _ESCAPES:
                        parts.append(_ESCAPES[text[j + 1]])
                        j += 2
                        continue
                    bad_escape = text[j + 1] if j + 1 < n else ""
                    j += 2
                    continue
                parts.append(text[j])
                j += 1
            if j >= n or text[j] == "\n":
                advance(j - i)
                errors.append(LexError(start_line, start_col, "unterminated string literal"))
                continue
            advance(j + 1 - i)
            if bad_escape is not None:
                errors.append(LexError(start_line, start_col,
                                       f"invalid escape sequence '\\{bad_escape}'"))
                continue
            tokens.append(Token("STRING", "".join(parts),
                                start_line, start_col, line, col - 1))
            continue
        for punct in PUNCTUATION:
            if text.startswith(punct, i):
                advance(len(punct))
                tokens.append(Token(punct, punct, start_line, start_col, line, col - 1))
                break
        else:
            errors.append(LexError(line, col, f"unexpected character {ch!r}"))
            advance()

    tokens.append(Token("EOF", "", line, col, line, col))
    return tokens, errors
