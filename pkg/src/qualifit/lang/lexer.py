"""Tokenizer for constraint statements."""

import re
from dataclasses import dataclass

from ..errors import ConstraintSyntaxError

KEYWORDS = frozenset(
    ["at", "time", "always", "once", "between", "weight",
     "confidence", "tolerance", "pmin", "pmax", "group"]
)
RELOPS = ("<=", ">=", "<", ">")

_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "number", "keyword", "relop", "=", ",", "eol"
    text: str
    line: int
    column: int
    value: float = None

    def __str__(self):
        return f"{self.kind} {self.text!r}" if self.kind != "eol" else "end of line"


def tokenize_line(text, line=1):
    """Tokens of one statement line. Columns are 1-based; ``#`` starts a comment."""
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        col = i + 1
        if ch in " \t\r\n":
            i += 1
        elif ch == "#":
            break
        elif ch in "<>":
            op = text[i:i + 2] if text[i:i + 2] in RELOPS else ch
            j = i + len(op)
            if j < n and text[j] in "<>":
                raise ConstraintSyntaxError(
                    f"malformed operator {text[i:j + 1]!r}", line, col, text
                )
            tokens.append(Token("relop", op, line, col))
            i = j
        elif ch in "=,":
            tokens.append(Token(ch, ch, line, col))
            i += 1
        elif ch.isdigit() or ch == "." or (ch in "+-" and i + 1 < n and (text[i + 1].isdigit() or text[i + 1] == ".")):
            m = _NUMBER.match(text, i)
            if not m:
                raise ConstraintSyntaxError(f"malformed number at {text[i:]!r}", line, col, text)
            end = m.end()
            if end < n and (text[end].isalnum() or text[end] == "_"):
                raise ConstraintSyntaxError(
                    f"malformed number {text[i:end + 1]!r}", line, col, text
                )
            tokens.append(Token("number", m.group(), line, col, float(m.group())))
            i = end
        elif ch.isalpha() or ch == "_":
            m = _IDENT.match(text, i)
            word = m.group()
            kind = "keyword" if word in KEYWORDS else "ident"
            tokens.append(Token(kind, word, line, col))
            i = m.end()
        else:
            raise ConstraintSyntaxError(f"unexpected character {ch!r}", line, col, text)
    return tokens


def tokenize(source):
    """Token stream for a whole constraint file.

    Each non-empty statement line is terminated by an ``eol`` token, so an
    empty or comment-only source yields an empty list.
    """
    tokens = []
    for lineno, text in enumerate(source.splitlines(), start=1):
        line_tokens = tokenize_line(text, lineno)
        if line_tokens:
            tokens.extend(line_tokens)
            tokens.append(Token("eol", "", lineno, len(text.rstrip()) + 1))
    return tokens
